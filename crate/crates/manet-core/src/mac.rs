//! Per-slot scheduling probabilities for the two case-study MAC schemes.
//!
//! Everything downstream of the MAC is expressed in terms of the triple
//! `(psd, psr, prd)`: the probabilities that a node gets the chance to run a
//! Source-to-Destination, Source-to-Relay, or Relay-to-Destination operation
//! in a slot. Getting the chance does not imply a transmission happens.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::params::{MacKind, NetworkParams};

/// The scheduling-probability triple feeding the analytic pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedProbs {
    pub psd: f64,
    pub psr: f64,
    pub prd: f64,
}

impl SchedProbs {
    /// Validates the structural invariants: every entry in [0, 1],
    /// `psr == prd`, and `psd + psr + prd <= 1`.
    pub fn new(psd: f64, psr: f64, prd: f64) -> Result<Self> {
        for (name, v) in [("psd", psd), ("psr", psr), ("prd", prd)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::InvalidProbs(format!(
                    "{name} = {v} is not a probability"
                )));
            }
        }
        if (psr - prd).abs() > 1e-12 {
            return Err(ModelError::InvalidProbs(format!(
                "psr = {psr} and prd = {prd} must be equal"
            )));
        }
        if psd + psr + prd > 1.0 + 1e-12 {
            return Err(ModelError::InvalidProbs(format!(
                "psd + psr + prd = {} exceeds 1",
                psd + psr + prd
            )));
        }
        Ok(SchedProbs { psd, psr, prd })
    }
}

/// EC cell-partition geometry derived from `(m, nu, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcGeometry {
    /// Partition period: cells of the same class sit `epsilon` apart and each
    /// class is active once every `epsilon^2` slots.
    pub epsilon: u32,
    /// Number of cells inside one transmission range: `(2 nu - 1)^2`.
    pub gamma: u32,
}

/// `1 - (1 - 1/m^2)^e`, accurate when the power is close to one.
fn one_minus_occupancy_pow(m2: f64, e: f64) -> f64 {
    -(e * (-1.0 / m2).ln_1p()).exp_m1()
}

/// Scheduling probabilities under local scheduling: one transmission per
/// nonempty cell, coverage limited to that cell.
pub fn ls_probs(n: u32, m: u32) -> Result<SchedProbs> {
    if n < 4 {
        return Err(ModelError::param("n", "need at least 4 nodes"));
    }
    if m < 1 {
        return Err(ModelError::param("m", "need at least one cell per side"));
    }
    let nf = f64::from(n);
    let m2 = f64::from(m) * f64::from(m);
    // e = 1 - (1 - 1/m^2)^(n-1); the closed forms are regrouped around it to
    // dodge the catastrophic cancellation of the textbook arrangement.
    let e = one_minus_occupancy_pow(m2, nf - 1.0);
    let q_n1 = 1.0 - e;
    let psd = (nf - 1.0 - (m2 - 1.0) * e) / (nf * (nf - 1.0));
    let psr = 0.5 * ((m2 - 1.0) / (nf - 1.0) * e - q_n1);
    let psr = psr.max(0.0);
    SchedProbs::new(psd.max(0.0), psr, psr)
}

/// Partition period and coverage for the EC scheme.
pub fn ec_geometry(m: u32, nu: u32, delta: f64) -> Result<EcGeometry> {
    if nu < 1 {
        return Err(ModelError::param("nu", "EC range parameter must be >= 1"));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(ModelError::param("delta", "EC guard factor must be >= 0"));
    }
    let gamma = (2 * nu - 1).pow(2);
    if gamma > m * m {
        return Err(ModelError::CoverageExceedsNetwork {
            gamma,
            cells: m * m,
        });
    }
    let nu_f = f64::from(nu);
    let spacing = ((1.0 + delta) * std::f64::consts::SQRT_2 * nu_f + nu_f).ceil() as u32;
    let epsilon = spacing.min(m);
    // Same-class cells sit epsilon apart except across the torus seam, where
    // the gap shrinks to m mod epsilon. A seam gap below the coverage
    // diameter would let two concurrent transmissions share receivers, which
    // both engines assume never happens.
    if epsilon < m && m % epsilon != 0 && m % epsilon < 2 * nu - 1 {
        return Err(ModelError::param(
            "m",
            format!(
                "EC pattern wraps badly: {m} mod {epsilon} leaves a seam gap of {} cells, \
                 below the coverage diameter {}",
                m % epsilon,
                2 * nu - 1
            ),
        ));
    }
    Ok(EcGeometry { epsilon, gamma })
}

/// Scheduling probabilities under equivalence-class scheduling.
pub fn ec_probs(n: u32, m: u32, nu: u32, delta: f64) -> Result<(SchedProbs, EcGeometry)> {
    if n < 4 {
        return Err(ModelError::param("n", "need at least 4 nodes"));
    }
    let geo = ec_geometry(m, nu, delta)?;
    let nf = f64::from(n);
    let m2 = f64::from(m) * f64::from(m);
    let gamma = f64::from(geo.gamma);
    let eps2 = f64::from(geo.epsilon) * f64::from(geo.epsilon);
    let e = one_minus_occupancy_pow(m2, nf - 1.0);
    // Same regrouping as ls_probs; with gamma = 1 this reduces to the LS
    // bracket divided by the activation period.
    let psd = (nf - 1.0 - (m2 - 1.0) * e + (gamma - 1.0) * nf * e) / (eps2 * nf * (nf - 1.0));
    let far = if gamma >= m2 {
        0.0
    } else {
        ((nf - 1.0) * (-gamma / m2).ln_1p()).exp()
    };
    let psr = ((m2 - gamma) / (nf - 1.0) * e - far) / (2.0 * eps2);
    let psr = psr.max(0.0);
    Ok((SchedProbs::new(psd.max(0.0), psr, psr)?, geo))
}

/// Anything that can map a scenario to scheduling probabilities may drive the
/// analytic pipeline; the two cell-partitioned schemes below are the shipped
/// providers.
pub trait SchedulingModel {
    fn sched_probs(&self, params: &NetworkParams) -> Result<SchedProbs>;
}

/// Local-scheduling MAC provider.
#[derive(Debug, Clone, Copy, Default)]
pub struct LsMac;

impl SchedulingModel for LsMac {
    fn sched_probs(&self, params: &NetworkParams) -> Result<SchedProbs> {
        ls_probs(params.n, params.m)
    }
}

/// Equivalence-class MAC provider.
#[derive(Debug, Clone, Copy, Default)]
pub struct EcMac;

impl SchedulingModel for EcMac {
    fn sched_probs(&self, params: &NetworkParams) -> Result<SchedProbs> {
        ec_probs(params.n, params.m, params.nu, params.delta).map(|(p, _)| p)
    }
}

/// Dispatches on `params.mac`.
pub fn sched_probs(params: &NetworkParams) -> Result<SchedProbs> {
    match params.mac {
        MacKind::Ls => LsMac.sched_probs(params),
        MacKind::Ec => EcMac.sched_probs(params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_cell_network_has_no_relaying() {
        // m = 1 kills every (m^2 - 1) term: psd = 1/n, psr = prd = 0.
        let p = ls_probs(4, 1).unwrap();
        assert_abs_diff_eq!(p.psd, 0.25, epsilon = 1e-15);
        assert_eq!(p.psr, 0.0);
        assert_eq!(p.prd, 0.0);
    }

    #[test]
    fn reference_ls_probabilities() {
        // Frozen against the Monte Carlo occupancy oracle (see
        // tests/mac_montecarlo.rs) which brackets these to ~1e-4.
        let p = ls_probs(72, 6).unwrap();
        assert_abs_diff_eq!(p.psd, 0.007969, epsilon = 5e-6);
        assert_abs_diff_eq!(p.psr, 0.145468, epsilon = 5e-6);
        assert_eq!(p.psr, p.prd);
    }

    #[test]
    fn ec_geometry_reference_point() {
        // nu = 1, delta = 1: ceil(2 sqrt(2) + 1) = 4, clamped by m.
        let g = ec_geometry(6, 1, 1.0).unwrap();
        assert_eq!(g.epsilon, 4);
        assert_eq!(g.gamma, 1);
        let g = ec_geometry(3, 1, 1.0).unwrap();
        assert_eq!(g.epsilon, 3);
    }

    #[test]
    fn ec_with_unit_range_is_scaled_ls() {
        // With gamma = 1 coverage shrinks to the transmitter's own cell, so the
        // EC forms must equal the LS forms divided by the activation period.
        for n in [4, 10, 33, 72, 150] {
            for m in [2, 4, 6, 9] {
                let ls = ls_probs(n, m).unwrap();
                let (ec, geo) = ec_probs(n, m, 1, 1.0).unwrap();
                let eps2 = f64::from(geo.epsilon * geo.epsilon);
                assert_abs_diff_eq!(ec.psd, ls.psd / eps2, epsilon = 1e-15);
                assert_abs_diff_eq!(ec.psr, ls.psr / eps2, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn ec_rejects_oversized_coverage() {
        assert!(matches!(
            ec_probs(10, 4, 3, 1.0),
            Err(ModelError::CoverageExceedsNetwork { .. })
        ));
    }

    #[test]
    fn ec_rejects_seam_overlap() {
        // nu=2, delta=0 gives epsilon 5; on an 11-wide torus the seam gap is
        // 11 mod 5 = 1 cell, inside the 3-cell coverage diameter.
        assert!(ec_probs(30, 11, 2, 0.0).is_err());
        // A 10-wide torus divides evenly and stays valid.
        assert!(ec_probs(30, 10, 2, 0.0).is_ok());
    }

    #[test]
    fn outputs_are_probabilities_and_bounded() {
        for n in [4, 5, 8, 20, 72, 200, 500] {
            for m in [1, 2, 3, 6, 10, 20] {
                let p = ls_probs(n, m).unwrap();
                assert!(p.psd >= 0.0 && p.psd <= 1.0);
                assert!(p.psr >= 0.0 && p.psr <= 1.0);
                assert!(p.psd + 2.0 * p.psr <= 1.0 + 1e-12, "n={n} m={m}");
                if 2 * 2 - 1 <= m {
                    let (p, _) = ec_probs(n, m, 2, 0.5).unwrap();
                    assert!(p.psd >= 0.0 && p.psd + 2.0 * p.psr <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_coverage_leaves_no_relay_chances() {
        // gamma = m^2 means every destination is always in range.
        let (p, geo) = ec_probs(30, 3, 2, 0.0).unwrap();
        assert_eq!(geo.gamma, 9);
        assert_eq!(p.psr, 0.0);
        assert!(p.psd > 0.0);
    }

    #[test]
    fn sched_probs_rejects_asymmetric_relay_probs() {
        assert!(SchedProbs::new(0.1, 0.2, 0.25).is_err());
        assert!(SchedProbs::new(0.5, 0.3, 0.3).is_err()); // sum > 1
        assert!(SchedProbs::new(0.2, 0.3, 0.3).is_ok());
    }
}
