//! Stationary occupancy law of the finite source queue.
//!
//! The source buffer is a discrete-time single-server queue with Bernoulli
//! arrivals (probability `lambda`), Bernoulli service chances (probability
//! `mu_s`), capacity `bs`, and departure-before-arrival order within a slot.

use crate::error::{ModelError, Result};

/// `|lambda - mu_s|` below this uses the tau -> 1 limit of the closed form;
/// the singularity is removable.
pub const TAU_SINGULARITY_TOL: f64 = 1e-9;

/// Stationary occupancy distribution of the source buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceOsd {
    /// `pi[i]` = stationary probability of `i` buffered packets, length `bs + 1`.
    pub pi: Vec<f64>,
    /// Per-slot service-chance probability used to build the law.
    pub mu_s: f64,
    /// Occupancy ratio `lambda (1 - mu) / (mu (1 - lambda))`; `f64::INFINITY`
    /// when `lambda = 1`.
    pub tau: f64,
}

impl SourceOsd {
    pub fn empty_prob(&self) -> f64 {
        self.pi[0]
    }
}

fn check_rates(lambda: f64, mu_s: f64, bs: u32) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(ModelError::param(
            "lambda_s",
            format!("must lie in (0, 1], got {lambda}"),
        ));
    }
    if !(mu_s > 0.0 && mu_s <= 1.0) {
        return Err(ModelError::param(
            "mu_s",
            format!("must lie in (0, 1], got {mu_s}"),
        ));
    }
    if bs < 1 {
        return Err(ModelError::param("bs", "source buffer size must be >= 1"));
    }
    if lambda == 1.0 && mu_s == 1.0 {
        return Err(ModelError::DegenerateSourceQueue);
    }
    Ok(())
}

/// Occupancy ratio tau.
pub fn tau(lambda: f64, mu_s: f64) -> f64 {
    if lambda == 1.0 {
        f64::INFINITY
    } else {
        lambda * (1.0 - mu_s) / (mu_s * (1.0 - lambda))
    }
}

/// Full stationary distribution over `0..=bs` packets.
///
/// The interior weights `tau^i / (1 - mu_s)` are assembled in log space so
/// that large buffers with tau far from one neither overflow nor underflow.
pub fn source_osd(lambda: f64, mu_s: f64, bs: u32) -> Result<SourceOsd> {
    check_rates(lambda, mu_s, bs)?;
    let size = bs as usize + 1;

    // lambda = 1: a packet arrives every slot, the buffer pins at capacity.
    if lambda == 1.0 {
        let mut pi = vec![0.0; size];
        pi[bs as usize] = 1.0;
        return Ok(SourceOsd {
            pi,
            mu_s,
            tau: f64::INFINITY,
        });
    }
    // mu_s = 1: every slot serves, so at a slot boundary the buffer holds at
    // most the packet that arrived after the service instant.
    if mu_s == 1.0 {
        let mut pi = vec![0.0; size];
        pi[0] = 1.0 - lambda;
        pi[1] = lambda;
        return Ok(SourceOsd { pi, mu_s, tau: 0.0 });
    }
    // Removable singularity at lambda = mu_s: uniform interior mass.
    if (lambda - mu_s).abs() < TAU_SINGULARITY_TOL {
        let denom = 1.0 - mu_s + f64::from(bs);
        let mut pi = vec![1.0 / denom; size];
        pi[0] = (1.0 - mu_s) / denom;
        return Ok(SourceOsd {
            pi,
            mu_s,
            tau: 1.0,
        });
    }

    let t = tau(lambda, mu_s);
    let ln_tau = t.ln();
    let ln_interior = -(1.0 - mu_s).ln();
    let mut log_w = Vec::with_capacity(size);
    log_w.push(0.0);
    for i in 1..size {
        log_w.push(i as f64 * ln_tau + ln_interior);
    }
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pi: Vec<f64> = log_w.iter().map(|lw| (lw - max).exp()).collect();
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }
    Ok(SourceOsd { pi, mu_s, tau: t })
}

/// Probability that the source buffer is empty, straight from the closed
/// form. This is the only piece of the source law the fixed-point iteration
/// needs, so it is kept O(1).
pub fn source_empty_prob(lambda: f64, mu_s: f64, bs: u32) -> Result<f64> {
    check_rates(lambda, mu_s, bs)?;
    if lambda == 1.0 {
        return Ok(0.0);
    }
    if (lambda - mu_s).abs() < TAU_SINGULARITY_TOL {
        return Ok((1.0 - mu_s) / (1.0 - mu_s + f64::from(bs)));
    }
    let t = tau(lambda, mu_s);
    let t_pow = t.powi(bs as i32);
    if t_pow.is_infinite() {
        return Ok(0.0);
    }
    Ok((mu_s - lambda) / (mu_s - lambda * t_pow))
}

/// Expected number of buffered packets conditioned on the buffer not being
/// full: the mean of the distribution proportional to `tau^i` on `0..bs`.
///
/// Evaluated as a direct sum (every term positive, so no cancellation); the
/// familiar closed form is the same quantity and is cross-checked in tests.
pub fn source_conditional_len(t: f64, bs: u32) -> f64 {
    if bs <= 1 {
        return 0.0;
    }
    if t.is_infinite() {
        return f64::from(bs - 1);
    }
    if (t - 1.0).abs() < TAU_SINGULARITY_TOL {
        return f64::from(bs - 1) / 2.0;
    }
    // Scale by the largest weight so neither branch overflows.
    let top = bs as i32 - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..bs {
        let w = if t > 1.0 {
            t.powi(i as i32 - top)
        } else {
            t.powi(i as i32)
        };
        num += f64::from(i) * w;
        den += w;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vanishing_arrivals_empty_the_buffer() {
        let osd = source_osd(1e-12, 0.5, 3).unwrap();
        assert_abs_diff_eq!(osd.pi[0], 1.0, epsilon = 1e-9);
        assert!(osd.pi[1..].iter().all(|&p| p < 1e-9));
    }

    #[test]
    fn reference_distribution() {
        // Frozen from the stationary oracle over the 4-state chain
        // (see tests/oracle_equivalence.rs).
        let osd = source_osd(0.2, 0.5, 3).unwrap();
        let expected = [0.603774, 0.301887, 0.075472, 0.018868];
        for (p, e) in osd.pi.iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 5e-7);
        }
        assert_abs_diff_eq!(osd.pi.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn balanced_rates_use_the_limit_form() {
        // lambda = mu = 0.4, Bs = 2: pi = [0.6, 1, 1] / 2.6.
        let osd = source_osd(0.4, 0.4, 2).unwrap();
        assert_abs_diff_eq!(osd.pi[0], 0.6 / 2.6, epsilon = 1e-12);
        assert_abs_diff_eq!(osd.pi[1], 1.0 / 2.6, epsilon = 1e-12);
        assert_abs_diff_eq!(osd.pi[2], 1.0 / 2.6, epsilon = 1e-12);
        assert_eq!(osd.tau, 1.0);
    }

    #[test]
    fn empty_prob_matches_full_distribution() {
        for lambda in [0.05, 0.3, 0.7, 0.99] {
            for mu in [0.1, 0.5, 0.9] {
                for bs in [1, 3, 10] {
                    let osd = source_osd(lambda, mu, bs).unwrap();
                    let p0 = source_empty_prob(lambda, mu, bs).unwrap();
                    assert_abs_diff_eq!(osd.pi[0], p0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn saturated_source_pins_at_capacity() {
        let osd = source_osd(1.0, 0.3, 4).unwrap();
        assert_eq!(osd.pi[4], 1.0);
        assert_eq!(source_empty_prob(1.0, 0.3, 4).unwrap(), 0.0);
    }

    #[test]
    fn certain_service_keeps_at_most_one_packet() {
        let osd = source_osd(0.3, 1.0, 5).unwrap();
        assert_abs_diff_eq!(osd.pi[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(osd.pi[1], 0.3, epsilon = 1e-15);
        assert!(osd.pi[2..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn degenerate_queue_rejected() {
        assert!(matches!(
            source_osd(1.0, 1.0, 3),
            Err(ModelError::DegenerateSourceQueue)
        ));
    }

    #[test]
    fn huge_buffers_stay_finite() {
        // tau > 1 with Bs = 500 overflows the naive closed form.
        let osd = source_osd(0.9, 0.2, 500).unwrap();
        assert!(osd.pi.iter().all(|p| p.is_finite() && *p >= 0.0));
        assert_abs_diff_eq!(osd.pi.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(source_empty_prob(0.9, 0.2, 500).unwrap() < 1e-100);
    }

    #[test]
    fn conditional_len_matches_closed_form() {
        // Ls = (tau - Bs tau^Bs + (Bs-1) tau^(Bs+1)) / ((1-tau)(1-tau^Bs))
        // wherever that expression is well-conditioned.
        for (t, bs) in [(0.25f64, 5u32), (0.8, 3), (1.7, 4), (0.5, 12)] {
            let closed = (t - f64::from(bs) * t.powi(bs as i32)
                + f64::from(bs - 1) * t.powi(bs as i32 + 1))
                / ((1.0 - t) * (1.0 - t.powi(bs as i32)));
            assert_abs_diff_eq!(source_conditional_len(t, bs), closed, epsilon = 1e-10);
        }
    }

    #[test]
    fn conditional_len_edges() {
        assert_eq!(source_conditional_len(0.3, 1), 0.0);
        assert_abs_diff_eq!(source_conditional_len(1.0, 5), 2.0, epsilon = 1e-12);
        assert_eq!(source_conditional_len(f64::INFINITY, 7), 6.0);
    }
}
