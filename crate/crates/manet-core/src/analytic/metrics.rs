//! Closed-form throughput, delay and capacity expressions.

use crate::mac::SchedProbs;

/// Per-slot source service-chance probability. Without feedback every
/// Source-to-Destination or Source-to-Relay chance serves the queue; with
/// feedback a Source-to-Relay chance is lost when the drawn receiver's relay
/// buffer is full.
pub fn service_rate(probs: &SchedProbs, feedback: bool, relay_overflow: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&relay_overflow));
    if feedback {
        probs.psd + probs.psr * (1.0 - relay_overflow)
    } else {
        probs.psd + probs.psr
    }
}

/// Per-flow throughput in packets per slot: direct deliveries plus relayed
/// deliveries that were not lost to relay overflow.
pub fn throughput(pi_s0: f64, relay_overflow: f64, probs: &SchedProbs) -> f64 {
    let busy = 1.0 - pi_s0;
    probs.psd * busy + probs.psr * busy * (1.0 - relay_overflow)
}

/// Expected end-to-end delay in slots: source queueing and service, plus the
/// relay-stage wait weighted by the chance the packet went through a relay.
pub fn expected_delay(
    relay_overflow: f64,
    mu_s: f64,
    source_len: f64,
    relay_len: f64,
    probs: &SchedProbs,
    n: u32,
) -> f64 {
    let through = 1.0 - relay_overflow;
    (1.0 + source_len) / mu_s
        + (f64::from(n - 2) + relay_len) * through / (probs.psd + probs.psr * through)
}

/// Throughput capacity: the supremum of per-flow throughput over generating
/// rates. Identical with and without feedback, and independent of the source
/// buffer size.
pub fn throughput_capacity(probs: &SchedProbs, n: u32, br: u32) -> f64 {
    probs.psd + probs.psr * f64::from(br) / (f64::from(n - 2) + f64::from(br))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn probs(psd: f64, psr: f64) -> SchedProbs {
        SchedProbs::new(psd, psr, psr).unwrap()
    }

    #[test]
    fn service_rate_forms() {
        let p = probs(0.2, 0.3);
        assert_abs_diff_eq!(service_rate(&p, false, 0.7), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(service_rate(&p, true, 1.0), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(service_rate(&p, true, 0.5), 0.35, epsilon = 1e-15);
    }

    #[test]
    fn empty_sources_send_nothing() {
        assert_eq!(throughput(1.0, 0.3, &probs(0.2, 0.3)), 0.0);
    }

    #[test]
    fn capacity_without_relay_space_is_direct_only() {
        let p = probs(0.1, 0.2);
        assert_eq!(throughput_capacity(&p, 10, 0), 0.1);
    }

    #[test]
    fn reference_capacity() {
        // Inputs are the oracle-validated LS probabilities for n=72, m=6.
        let p = probs(0.007969, 0.145468);
        assert_abs_diff_eq!(throughput_capacity(&p, 72, 5), 0.017667, epsilon = 5e-6);
    }

    #[test]
    fn delay_reduces_to_service_plus_delivery_at_tiny_buffers() {
        // Bs = 1 gives Ls = 0, so the first term is exactly 1/mu.
        let p = probs(0.05, 0.1);
        let mu = 0.15;
        let d = expected_delay(0.3, mu, 0.0, 0.0, &p, 10);
        let delivery = 8.0 * 0.7 / (0.05 + 0.1 * 0.7);
        assert_abs_diff_eq!(d, 1.0 / mu + delivery, epsilon = 1e-12);
    }
}
