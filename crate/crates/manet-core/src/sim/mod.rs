//! Slotted Monte Carlo simulation of the cell-partitioned network.

mod engine;
pub mod mobility;
pub mod node;
mod report;
mod rng_util;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::params::NetworkParams;

pub use report::{CiHalfwidths, OpportunityEstimates, ReplicationSummary, SimReport};

/// How sources are paired with destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Derangement {
    /// Deterministic rotation: flow `i` terminates at `(i + 1) mod n`.
    Shift,
    /// Uniform random derangement drawn from the run seed.
    Random,
}

/// Run-level knobs beyond the scenario itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub slots: u64,
    /// Leading fraction of slots discarded before collecting statistics.
    pub warmup_fraction: f64,
    pub seed: u64,
    pub replications: u32,
    pub derangement: Derangement,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            slots: 2_000_000,
            warmup_fraction: 0.2,
            seed: 1,
            replications: 10,
            derangement: Derangement::Shift,
        }
    }
}

impl RunOptions {
    fn validate(&self) -> Result<()> {
        if self.slots < 10_000 {
            return Err(ModelError::param("slots", "need at least 10^4 slots"));
        }
        if !(0.0..=0.5).contains(&self.warmup_fraction) {
            return Err(ModelError::param(
                "warmup_fraction",
                format!("must lie in [0, 0.5], got {}", self.warmup_fraction),
            ));
        }
        if self.replications < 1 {
            return Err(ModelError::param("replications", "need at least one"));
        }
        Ok(())
    }
}

/// Spreads replication indices across the seed space.
fn replication_seed(base: u64, rep: u32) -> u64 {
    base ^ (u64::from(rep) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn derangement(params: &NetworkParams, opts: &RunOptions) -> Vec<u16> {
    match opts.derangement {
        Derangement::Shift => params.shift_derangement(),
        Derangement::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xDE7A_4A6E_0000_0001);
            let mut phi: Vec<u16> = (0..params.n as u16).collect();
            // Rejection sampling keeps the draw uniform over derangements.
            loop {
                phi.shuffle(&mut rng);
                if phi.iter().enumerate().all(|(i, &d)| i != d as usize) {
                    return phi;
                }
            }
        }
    }
}

/// Runs `opts.replications` independent replications and merges their
/// statistics. Identical `(params, opts)` give a bit-identical report;
/// replications execute in parallel but merge in index order.
pub fn run(params: &NetworkParams, opts: &RunOptions) -> Result<SimReport> {
    params.validate()?;
    opts.validate()?;
    let phi = derangement(params, opts);
    let warmup_slots = (opts.slots as f64 * opts.warmup_fraction).floor() as u64;

    let outcomes: Vec<report::RepOutcome> = (0..opts.replications)
        .into_par_iter()
        .map(|rep| {
            let rng = ChaCha8Rng::seed_from_u64(replication_seed(opts.seed, rep));
            engine::Engine::new(params, &phi, opts.slots, warmup_slots, rng).run()
        })
        .collect();

    Ok(SimReport::merge(params, opts.slots, warmup_slots, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_opts() -> RunOptions {
        RunOptions {
            slots: 20_000,
            replications: 2,
            seed: 42,
            ..Default::default()
        }
    }

    fn desk_params() -> NetworkParams {
        NetworkParams {
            n: 20,
            m: 4,
            bs: 3,
            br: 3,
            lambda_s: 0.04,
            ..Default::default()
        }
    }

    #[test]
    fn rejects_tiny_runs() {
        let opts = RunOptions {
            slots: 100,
            ..Default::default()
        };
        assert!(run(&desk_params(), &opts).is_err());
    }

    #[test]
    fn near_zero_load_delivers_nothing() {
        let params = NetworkParams {
            lambda_s: 1e-12,
            ..desk_params()
        };
        let r = run(&params, &small_opts()).unwrap();
        assert_eq!(r.generated, 0);
        assert_eq!(r.delivered, 0);
        assert_eq!(r.dropped_source + r.dropped_relay + r.in_flight, 0);
        assert_eq!(r.mean_delay, None);
        assert!(r.conservation_holds());
    }

    #[test]
    fn conservation_and_activity_at_moderate_load() {
        let r = run(&desk_params(), &small_opts()).unwrap();
        assert!(r.conservation_holds());
        assert!(r.delivered > 0);
        assert!(r.throughput_mean > 0.0);
        assert!(r.mean_delay.unwrap() >= 1.0);
    }

    #[test]
    fn random_derangement_is_a_derangement() {
        let params = desk_params();
        let opts = RunOptions {
            derangement: Derangement::Random,
            ..small_opts()
        };
        let phi = derangement(&params, &opts);
        assert!(phi.iter().enumerate().all(|(i, &d)| i != d as usize));
        let mut sorted = phi.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..params.n as u16).collect::<Vec<_>>());
        // And the run still behaves.
        let r = run(&params, &opts).unwrap();
        assert!(r.conservation_holds());
    }
}
