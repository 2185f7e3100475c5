//! Scenario description shared by the analytic engine and the simulator.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Media access control scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MacKind {
    /// Local scheduling: one transmission per nonempty cell per slot,
    /// coverage limited to the transmitter's own cell.
    Ls,
    /// Equivalence-class scheduling: cells spaced `epsilon` apart take turns,
    /// each active every `epsilon^2` slots, coverage radius `nu - 1` cells.
    Ec,
}

/// Node mobility model. Both keep node locations uniform on the torus in
/// steady state, so they share the same analytic model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mobility {
    /// Fresh uniform cell each slot.
    Iid,
    /// Random walk: uniform over the current cell and its 8 torus neighbors.
    Rw,
}

/// Complete description of one network scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Number of nodes (>= 4).
    pub n: u32,
    /// Cells per torus side (>= 1).
    pub m: u32,
    /// Source buffer size in packets (>= 1).
    pub bs: u32,
    /// Shared relay buffer size in packets (>= 0).
    pub br: u32,
    /// Per-slot packet generating probability, in (0, 1].
    pub lambda_s: f64,
    /// Whether receivers report a full relay buffer so senders idle instead
    /// of transmitting into it.
    pub feedback: bool,
    pub mac: MacKind,
    /// EC transmission-range parameter (>= 1, EC only).
    pub nu: u32,
    /// EC guard factor (>= 0, EC only).
    pub delta: f64,
    /// Simulator only; the analytic model is mobility-agnostic.
    pub mobility: Mobility,
}

impl Default for NetworkParams {
    /// The reference scenario: n=72, m=6, Bs=Br=5, LS-MAC, i.i.d mobility,
    /// no feedback, lambda_s = 0.05.
    fn default() -> Self {
        NetworkParams {
            n: 72,
            m: 6,
            bs: 5,
            br: 5,
            lambda_s: 0.05,
            feedback: false,
            mac: MacKind::Ls,
            nu: 1,
            delta: 1.0,
            mobility: Mobility::Iid,
        }
    }
}

impl NetworkParams {
    /// Checks every structural invariant; all engines call this first.
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(ModelError::param(
                "n",
                format!("need at least 4 nodes, got {}", self.n),
            ));
        }
        if self.m < 1 {
            return Err(ModelError::param("m", "need at least one cell per side"));
        }
        if self.bs < 1 {
            return Err(ModelError::param(
                "bs",
                "source buffer must hold at least one packet",
            ));
        }
        if !(self.lambda_s > 0.0 && self.lambda_s <= 1.0) {
            return Err(ModelError::param(
                "lambda_s",
                format!("must lie in (0, 1], got {}", self.lambda_s),
            ));
        }
        if self.mac == MacKind::Ec {
            // Full geometric validity, including the torus seam condition.
            crate::mac::ec_geometry(self.m, self.nu, self.delta)?;
        }
        Ok(())
    }

    /// Default source-destination pairing: flow from node `i` terminates at
    /// node `(i + 1) mod n`. Any derangement works; this one is deterministic.
    pub fn shift_derangement(&self) -> Vec<u16> {
        (0..self.n as u16)
            .map(|i| (i + 1) % self.n as u16)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_are_valid() {
        NetworkParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_small_networks() {
        let p = NetworkParams {
            n: 3,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn rejects_bad_lambda() {
        for bad in [0.0, -0.1, 1.2, f64::NAN] {
            let p = NetworkParams {
                lambda_s: bad,
                ..Default::default()
            };
            assert!(p.validate().is_err(), "lambda_s = {bad} accepted");
        }
    }

    #[test]
    fn rejects_oversized_ec_coverage() {
        let p = NetworkParams {
            mac: MacKind::Ec,
            m: 4,
            nu: 3, // gamma = 25 > 16 cells
            ..Default::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ModelError::CoverageExceedsNetwork { .. })
        ));
    }

    #[test]
    fn shift_derangement_has_no_fixed_point() {
        let p = NetworkParams::default();
        let phi = p.shift_derangement();
        assert_eq!(phi.len(), 72);
        assert!(phi.iter().enumerate().all(|(i, &d)| i != d as usize));
    }
}
