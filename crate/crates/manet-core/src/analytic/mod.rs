//! Exact evaluation of the queueing model: buffer occupancy laws, throughput,
//! expected end-to-end delay, throughput capacity and their limiting forms.

pub mod fixed_point;
pub mod limits;
pub mod metrics;
pub mod oracle;
pub mod relay;
pub mod source;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mac::{sched_probs, SchedProbs};
use crate::params::NetworkParams;

pub use fixed_point::{overflow_fixed_point, FixedPointSolution};
pub use limits::{limiting_delay, limiting_throughput, DelayRegime, ThroughputRegime};
pub use metrics::{expected_delay, service_rate, throughput, throughput_capacity};
pub use oracle::{stationary_oracle, Tridiagonal};
pub use relay::{relay_osd, relay_substate_dist, relay_transition_probs, RelayOsd};
pub use source::{source_conditional_len, source_empty_prob, source_osd, SourceOsd};

/// Every closed-form output of the model for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    /// Per-flow throughput, packets per slot.
    pub throughput: f64,
    /// Expected end-to-end delay, slots.
    pub expected_delay: f64,
    /// Throughput capacity, packets per slot.
    pub capacity: f64,
    /// Expected source-buffer occupancy given the buffer is not full.
    pub source_len: f64,
    /// Expected relay-buffer occupancy given the buffer is not full.
    pub relay_len: f64,
    /// Probability the source buffer is empty.
    pub source_empty: f64,
    /// Probability the relay buffer is full.
    pub relay_overflow: f64,
    /// Source service-chance probability per slot.
    pub service_rate: f64,
}

/// Runs the full pipeline for the scenario's MAC.
pub fn analyze(params: &NetworkParams) -> Result<TheoryReport> {
    params.validate()?;
    let probs = sched_probs(params)?;
    analyze_with_probs(params, &probs)
}

/// Same pipeline with caller-supplied scheduling probabilities, the hook for
/// MAC providers beyond the two shipped ones.
pub fn analyze_with_probs(params: &NetworkParams, probs: &SchedProbs) -> Result<TheoryReport> {
    params.validate()?;

    // Relay overflow and service rate first; the order depends on feedback.
    let (relay_overflow, mu_s) = if params.br == 0 {
        (1.0, metrics::service_rate(probs, params.feedback, 1.0))
    } else if probs.psr == 0.0 {
        // Nothing ever reaches a relay buffer.
        (0.0, metrics::service_rate(probs, params.feedback, 0.0))
    } else if params.feedback {
        let sol = fixed_point::overflow_fixed_point(params, probs)?;
        (sol.overflow, sol.mu_s)
    } else {
        let mu = metrics::service_rate(probs, false, 0.0);
        let pi_s0 = source::source_empty_prob(params.lambda_s, mu, params.bs)?;
        (relay::relay_overflow_prob(params.n, params.br, pi_s0), mu)
    };

    let src = source::source_osd(params.lambda_s, mu_s, params.bs)?;
    let pi_s0 = src.empty_prob();
    let relay = if params.br == 0 || probs.psr == 0.0 {
        let mut pi = vec![0.0; params.br as usize + 1];
        pi[0] = 1.0;
        RelayOsd { pi }
    } else {
        relay::relay_osd(params.n, params.br, pi_s0)?
    };

    let source_len = source::source_conditional_len(src.tau, params.bs);
    let relay_len = relay.conditional_len();

    Ok(TheoryReport {
        throughput: metrics::throughput(pi_s0, relay_overflow, probs),
        expected_delay: metrics::expected_delay(
            relay_overflow,
            mu_s,
            source_len,
            relay_len,
            probs,
            params.n,
        ),
        capacity: metrics::throughput_capacity(probs, params.n, params.br),
        source_len,
        relay_len,
        source_empty: pi_s0,
        relay_overflow,
        service_rate: mu_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::NetworkParams;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vanishing_load_sends_nothing() {
        let params = NetworkParams {
            lambda_s: 1e-9,
            ..Default::default()
        };
        let r = analyze(&params).unwrap();
        assert!(r.throughput < 1e-8);
        assert!(r.expected_delay > 0.0);
    }

    #[test]
    fn report_fields_are_consistent() {
        for feedback in [false, true] {
            for lambda in [0.01, 0.05, 0.2, 0.9] {
                let params = NetworkParams {
                    lambda_s: lambda,
                    feedback,
                    ..Default::default()
                };
                let r = analyze(&params).unwrap();
                assert!(r.throughput >= 0.0);
                assert!(
                    r.throughput <= r.capacity + 1e-9,
                    "T {} > Tc {} at lambda {lambda} feedback {feedback}",
                    r.throughput,
                    r.capacity
                );
                assert!((0.0..=1.0).contains(&r.source_empty));
                assert!((0.0..=1.0).contains(&r.relay_overflow));
                assert!(r.expected_delay > 0.0);
            }
        }
    }

    #[test]
    fn zero_relay_buffer_degenerates_cleanly() {
        let params = NetworkParams {
            br: 0,
            ..Default::default()
        };
        let r = analyze(&params).unwrap();
        assert_eq!(r.relay_overflow, 1.0);
        assert_eq!(r.relay_len, 0.0);
        // Only direct deliveries remain.
        assert_abs_diff_eq!(
            r.throughput,
            crate::mac::ls_probs(72, 6).unwrap().psd * (1.0 - r.source_empty),
            epsilon = 1e-15
        );
    }

    #[test]
    fn single_cell_network_has_empty_relays() {
        let params = NetworkParams {
            m: 1,
            feedback: true,
            ..Default::default()
        };
        let r = analyze(&params).unwrap();
        assert_eq!(r.relay_overflow, 0.0);
        assert_abs_diff_eq!(r.service_rate, 1.0 / 72.0, epsilon = 1e-15);
    }
}
