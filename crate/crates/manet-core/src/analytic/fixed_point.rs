//! Self-consistent relay-overflow probability under the feedback mechanism.
//!
//! With feedback the source service rate depends on the relay overflow
//! probability, which in turn depends on the source-empty probability: the
//! overflow probability is the fixed point of that composition. Plain
//! iteration from zero converges in practice; if the iterates ever
//! oscillate, the solver switches to half-step damping before giving up.

use crate::error::{ModelError, Result};
use crate::mac::SchedProbs;
use crate::params::NetworkParams;

use super::relay::relay_overflow_prob;
use super::source::source_empty_prob;

/// Convergence accuracy of the iteration.
pub const FIXED_POINT_TOL: f64 = 1e-6;
/// Iteration budget before reporting failure.
pub const MAX_ITERATIONS: u32 = 10_000;

/// Converged overflow solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    /// Relay overflow probability `x` with `|F(x) - x| < 1e-6`.
    pub overflow: f64,
    /// Source service rate `psd + psr (1 - x)` at the solution.
    pub mu_s: f64,
    pub iterations: u32,
    /// `|F(x) - x|` at the returned point.
    pub residual: f64,
}

/// One application of the self-map: overflow guess -> implied overflow.
fn overflow_map(params: &NetworkParams, probs: &SchedProbs, x: f64) -> Result<f64> {
    let mu_s = probs.psd + probs.psr * (1.0 - x);
    let pi_s0 = source_empty_prob(params.lambda_s, mu_s, params.bs)?;
    Ok(relay_overflow_prob(params.n, params.br, pi_s0))
}

/// Solves for the feedback-mode relay overflow probability.
pub fn overflow_fixed_point(
    params: &NetworkParams,
    probs: &SchedProbs,
) -> Result<FixedPointSolution> {
    params.validate()?;
    if !params.feedback {
        return Err(ModelError::param(
            "feedback",
            "the fixed point only exists in feedback mode",
        ));
    }
    if params.br < 1 {
        return Err(ModelError::param(
            "br",
            "feedback overflow needs a relay buffer of at least one packet",
        ));
    }
    // No relaying at all: the relay chain never leaves the empty state.
    if probs.psr == 0.0 {
        return Ok(FixedPointSolution {
            overflow: 0.0,
            mu_s: probs.psd,
            iterations: 0,
            residual: 0.0,
        });
    }

    solve(|x| overflow_map(params, probs, x), probs)
}

/// Shared iteration core; `map` is the self-map whose fixed point is wanted.
pub(crate) fn solve<F>(map: F, probs: &SchedProbs) -> Result<FixedPointSolution>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut x = 0.0f64;
    let mut prev_step = 0.0f64;
    let mut damped = false;
    for iteration in 1..=MAX_ITERATIONS {
        let fx = map(x)?;
        let next = if damped { 0.5 * (x + fx) } else { fx };
        let step = next - x;
        // Sign flips mean plain iteration is bouncing around the solution.
        if !damped && step * prev_step < 0.0 {
            damped = true;
        }
        prev_step = step;
        x = next.clamp(0.0, 1.0);
        if step.abs() < FIXED_POINT_TOL {
            let residual = (map(x)? - x).abs();
            if residual < FIXED_POINT_TOL {
                return Ok(FixedPointSolution {
                    overflow: x,
                    mu_s: probs.psd + probs.psr * (1.0 - x),
                    iterations: iteration,
                    residual,
                });
            }
        }
    }
    let residual = (map(x)? - x).abs();
    Err(ModelError::FixedPointDiverged {
        iterations: MAX_ITERATIONS,
        residual,
    })
}
