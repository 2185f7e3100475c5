//! Limiting throughput and delay as one or both buffers grow unbounded.

use crate::error::{ModelError, Result};
use crate::mac::SchedProbs;
use crate::params::NetworkParams;

use super::fixed_point;
use super::relay::{relay_osd, relay_overflow_prob, RelayOsd};
use super::source::{source_conditional_len, source_empty_prob, tau};

/// Which buffer grows unbounded for the limiting throughput.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThroughputRegime {
    /// Source buffer unbounded, relay buffer at `params.br`.
    SourceInf,
    /// Relay buffer unbounded, source buffer at `params.bs`.
    RelayInf,
    /// Both buffers unbounded.
    BothInf,
}

/// Which buffer grows unbounded for the limiting delay, split on stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayRegime {
    /// Source buffer unbounded with `lambda >= mu_s`: the queue diverges.
    SourceInfSaturated,
    /// Source buffer unbounded with `lambda < mu_s`.
    SourceInfStable,
    /// Relay buffer unbounded.
    RelayInf,
    /// Both buffers unbounded with `lambda < psd + psr`.
    BothInfStable,
}

/// Occupancy load `rho_s = min(lambda / mu_s, 1)` together with the service
/// rate and relay overflow that are self-consistent in the infinite-source
/// regime. Without feedback this is a direct evaluation; with feedback the
/// overflow is again a fixed point, now with the source-empty probability
/// replaced by its infinite-buffer limit `1 - rho_s`.
fn source_inf_state(params: &NetworkParams, probs: &SchedProbs) -> Result<(f64, f64, f64)> {
    let solve_for = |feedback: bool| -> Result<fixed_point::FixedPointSolution> {
        if !feedback || probs.psr == 0.0 {
            let mu = if feedback && params.br == 0 {
                probs.psd
            } else {
                probs.psd + probs.psr
            };
            let rho = (params.lambda_s / mu).min(1.0);
            let x = relay_overflow_prob(params.n, params.br, 1.0 - rho);
            return Ok(fixed_point::FixedPointSolution {
                overflow: x,
                mu_s: mu,
                iterations: 0,
                residual: 0.0,
            });
        }
        fixed_point::solve(
            |x| {
                let mu = probs.psd + probs.psr * (1.0 - x);
                let rho = (params.lambda_s / mu).min(1.0);
                Ok(relay_overflow_prob(params.n, params.br, 1.0 - rho))
            },
            probs,
        )
    };
    let sol = solve_for(params.feedback)?;
    let rho = (params.lambda_s / sol.mu_s).min(1.0);
    Ok((rho, sol.mu_s, sol.overflow))
}

fn relay_osd_at_load(params: &NetworkParams, rho: f64) -> Result<RelayOsd> {
    relay_osd(params.n, params.br, 1.0 - rho)
}

/// Limiting per-flow throughput for the chosen regime.
pub fn limiting_throughput(
    params: &NetworkParams,
    probs: &SchedProbs,
    regime: ThroughputRegime,
) -> Result<f64> {
    params.validate()?;
    match regime {
        ThroughputRegime::SourceInf => {
            let (rho, _, _) = source_inf_state(params, probs)?;
            let osd = relay_osd_at_load(params, rho)?;
            // psd rho + psr * sum_{k<Br} C_k rho^{k+1} / sum_{k<=Br} C_k rho^k,
            // which regroups to rho (psd + psr (1 - overflow)).
            Ok(probs.psd * rho + probs.psr * rho * (1.0 - osd.overflow_prob()))
        }
        ThroughputRegime::RelayInf => {
            // The overflow probability vanishes, so feedback changes nothing.
            let mu = probs.psd + probs.psr;
            let pi_s0 = source_empty_prob(params.lambda_s, mu, params.bs)?;
            Ok(mu * (1.0 - pi_s0))
        }
        ThroughputRegime::BothInf => Ok(params.lambda_s.min(probs.psd + probs.psr)),
    }
}

/// Limiting expected end-to-end delay for the chosen regime; the saturated
/// infinite-source regime reports `f64::INFINITY`.
pub fn limiting_delay(
    params: &NetworkParams,
    probs: &SchedProbs,
    regime: DelayRegime,
) -> Result<f64> {
    params.validate()?;
    match regime {
        DelayRegime::SourceInfSaturated => {
            let (_, mu, _) = source_inf_state(params, probs)?;
            if params.lambda_s < mu {
                return Err(ModelError::RegimeMismatch {
                    regime: "SourceInfSaturated",
                    requirement: format!(
                        "lambda_s >= mu_s, but {} < {mu}",
                        params.lambda_s
                    ),
                });
            }
            Ok(f64::INFINITY)
        }
        DelayRegime::SourceInfStable => {
            let (rho, mu, _) = source_inf_state(params, probs)?;
            if params.lambda_s >= mu {
                return Err(ModelError::RegimeMismatch {
                    regime: "SourceInfStable",
                    requirement: format!(
                        "lambda_s < mu_s, but {} >= {mu}",
                        params.lambda_s
                    ),
                });
            }
            let osd = relay_osd_at_load(params, rho)?;
            let through = 1.0 - osd.overflow_prob();
            Ok((1.0 - params.lambda_s) / (mu - params.lambda_s)
                + (f64::from(params.n - 2) + osd.conditional_len()) * through
                    / (probs.psd + probs.psr * through))
        }
        DelayRegime::RelayInf => {
            let mu = probs.psd + probs.psr;
            let pi_s0 = source_empty_prob(params.lambda_s, mu, params.bs)?;
            if pi_s0 == 0.0 {
                // lambda = 1: the unbounded relay stage is null recurrent.
                return Ok(f64::INFINITY);
            }
            let ls = source_conditional_len(tau(params.lambda_s, mu), params.bs);
            Ok((f64::from(params.n - 2) + pi_s0 * (1.0 + ls)) / (pi_s0 * mu))
        }
        DelayRegime::BothInfStable => {
            let mu = probs.psd + probs.psr;
            if params.lambda_s >= mu {
                return Err(ModelError::RegimeMismatch {
                    regime: "BothInfStable",
                    requirement: format!(
                        "lambda_s < psd + psr, but {} >= {mu}",
                        params.lambda_s
                    ),
                });
            }
            Ok((f64::from(params.n) - 1.0 - params.lambda_s) / (mu - params.lambda_s))
        }
    }
}
