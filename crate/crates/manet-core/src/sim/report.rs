//! Simulation counters and their aggregation across replications.

use serde::{Deserialize, Serialize};

use crate::params::NetworkParams;

/// z-score of the two-sided 95% normal interval.
const Z_95: f64 = 1.959_963_984_540_054;

/// Raw counters from a single replication.
#[derive(Debug, Clone, PartialEq)]
pub(super) struct RepOutcome {
    // Whole-run accounting (exact).
    pub generated: u64,
    pub delivered: u64,
    pub dropped_source: u64,
    pub dropped_relay: u64,
    pub in_flight: u64,
    // Measurement-window statistics.
    pub window_slots: u64,
    pub delivered_per_flow: Vec<u64>,
    pub delay_sum: f64,
    pub delay_count: u64,
    pub dropped_source_window: u64,
    pub dropped_relay_window: u64,
    pub source_hist: Vec<u64>,
    pub relay_hist: Vec<u64>,
    pub sd_chances: u64,
    pub sr_chances: u64,
    pub rd_chances: u64,
    /// `substate_counts[i][l]`: sampled slots with relay occupancy `i` spread
    /// over `l` nonempty queues.
    pub substate_counts: Vec<Vec<u64>>,
}

impl RepOutcome {
    pub(super) fn new(params: &NetworkParams) -> Self {
        let n = params.n as usize;
        let side = params.br as usize + 1;
        RepOutcome {
            generated: 0,
            delivered: 0,
            dropped_source: 0,
            dropped_relay: 0,
            in_flight: 0,
            window_slots: 0,
            delivered_per_flow: vec![0; n],
            delay_sum: 0.0,
            delay_count: 0,
            dropped_source_window: 0,
            dropped_relay_window: 0,
            source_hist: vec![0; params.bs as usize + 1],
            relay_hist: vec![0; side],
            sd_chances: 0,
            sr_chances: 0,
            rd_chances: 0,
            substate_counts: vec![vec![0; side]; side],
        }
    }

    fn throughput_mean(&self, n: u32) -> f64 {
        let total: u64 = self.delivered_per_flow.iter().sum();
        total as f64 / (f64::from(n) * self.window_slots as f64)
    }

    fn mean_delay(&self) -> Option<f64> {
        (self.delay_count > 0).then(|| self.delay_sum / self.delay_count as f64)
    }
}

/// Empirical per-node, per-slot operation-chance frequencies; comparable with
/// the MAC closed forms. Chances are counted, not transmissions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpportunityEstimates {
    pub psd: f64,
    pub psr: f64,
    pub prd: f64,
}

/// 95% normal-approximation half-widths over replications; zero when only one
/// replication ran.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiHalfwidths {
    pub throughput: f64,
    pub mean_delay: f64,
}

/// Per-replication summary kept in the merged report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub throughput_mean: f64,
    pub mean_delay: Option<f64>,
    pub opportunities: OpportunityEstimates,
    pub generated: u64,
    pub delivered: u64,
    pub dropped_source: u64,
    pub dropped_relay: u64,
    pub in_flight: u64,
}

/// Merged outcome of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub slots_run: u64,
    pub warmup_slots: u64,
    pub replications: u32,

    // Exact whole-run accounting, summed over replications. These satisfy
    // generated = delivered + dropped_source + dropped_relay + in_flight.
    pub generated: u64,
    pub delivered: u64,
    pub dropped_source: u64,
    pub dropped_relay: u64,
    pub in_flight: u64,

    // Measurement-window results.
    pub delivered_per_flow: Vec<u64>,
    pub throughput_per_flow: Vec<f64>,
    pub throughput_mean: f64,
    /// Mean delay over delivered packets that were generated after warm-up;
    /// absent when nothing qualifying was delivered.
    pub mean_delay: Option<f64>,
    pub delay_samples: u64,
    pub empirical_pi_s: Vec<f64>,
    pub empirical_pi_r: Vec<f64>,
    pub opportunity_counts: OpportunityEstimates,
    pub ci_halfwidth: CiHalfwidths,
    /// Sampled relay sub-state counts, indexed `[occupancy][nonempty queues]`.
    pub substate_counts: Vec<Vec<u64>>,
    pub per_replication: Vec<ReplicationSummary>,
}

impl SimReport {
    /// Exact accounting identity over the whole run.
    pub fn conservation_holds(&self) -> bool {
        self.generated == self.delivered + self.dropped_source + self.dropped_relay + self.in_flight
    }

    pub(super) fn merge(
        params: &NetworkParams,
        slots: u64,
        warmup_slots: u64,
        outcomes: Vec<RepOutcome>,
    ) -> SimReport {
        let n = params.n as usize;
        let reps = outcomes.len() as u32;
        let window = slots - warmup_slots;

        let per_replication: Vec<ReplicationSummary> = outcomes
            .iter()
            .map(|o| {
                let node_slots = f64::from(params.n) * o.window_slots as f64;
                ReplicationSummary {
                    throughput_mean: o.throughput_mean(params.n),
                    mean_delay: o.mean_delay(),
                    opportunities: OpportunityEstimates {
                        psd: o.sd_chances as f64 / node_slots,
                        psr: o.sr_chances as f64 / node_slots,
                        prd: o.rd_chances as f64 / node_slots,
                    },
                    generated: o.generated,
                    delivered: o.delivered,
                    dropped_source: o.dropped_source,
                    dropped_relay: o.dropped_relay,
                    in_flight: o.in_flight,
                }
            })
            .collect();

        let mut delivered_per_flow = vec![0u64; n];
        let mut source_hist = vec![0u64; params.bs as usize + 1];
        let mut relay_hist = vec![0u64; params.br as usize + 1];
        let mut substate_counts = vec![vec![0u64; params.br as usize + 1]; params.br as usize + 1];
        let (mut delay_sum, mut delay_count) = (0.0f64, 0u64);
        let (mut sd, mut sr, mut rd) = (0u64, 0u64, 0u64);
        for o in &outcomes {
            for (acc, v) in delivered_per_flow.iter_mut().zip(&o.delivered_per_flow) {
                *acc += v;
            }
            for (acc, v) in source_hist.iter_mut().zip(&o.source_hist) {
                *acc += v;
            }
            for (acc, v) in relay_hist.iter_mut().zip(&o.relay_hist) {
                *acc += v;
            }
            for (accrow, row) in substate_counts.iter_mut().zip(&o.substate_counts) {
                for (acc, v) in accrow.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            delay_sum += o.delay_sum;
            delay_count += o.delay_count;
            sd += o.sd_chances;
            sr += o.sr_chances;
            rd += o.rd_chances;
        }

        let node_slots = (window * reps as u64) as f64 * n as f64;
        let throughput_per_flow: Vec<f64> = delivered_per_flow
            .iter()
            .map(|&d| d as f64 / (window * reps as u64) as f64)
            .collect();
        let throughput_mean =
            delivered_per_flow.iter().sum::<u64>() as f64 / node_slots;

        let hist_total: u64 = source_hist.iter().sum();
        let empirical_pi_s = normalize(&source_hist, hist_total);
        let empirical_pi_r = normalize(&relay_hist, relay_hist.iter().sum());

        let t_ci = halfwidth(per_replication.iter().map(|r| r.throughput_mean));
        let d_ci = halfwidth(
            per_replication
                .iter()
                .filter_map(|r| r.mean_delay),
        );

        SimReport {
            slots_run: slots,
            warmup_slots,
            replications: reps,
            generated: outcomes.iter().map(|o| o.generated).sum(),
            delivered: outcomes.iter().map(|o| o.delivered).sum(),
            dropped_source: outcomes.iter().map(|o| o.dropped_source).sum(),
            dropped_relay: outcomes.iter().map(|o| o.dropped_relay).sum(),
            in_flight: outcomes.iter().map(|o| o.in_flight).sum(),
            delivered_per_flow,
            throughput_per_flow,
            throughput_mean,
            mean_delay: (delay_count > 0).then(|| delay_sum / delay_count as f64),
            delay_samples: delay_count,
            empirical_pi_s,
            empirical_pi_r,
            opportunity_counts: OpportunityEstimates {
                psd: sd as f64 / node_slots,
                psr: sr as f64 / node_slots,
                prd: rd as f64 / node_slots,
            },
            ci_halfwidth: CiHalfwidths {
                throughput: t_ci,
                mean_delay: d_ci,
            },
            substate_counts,
            per_replication,
        }
    }
}

fn normalize(hist: &[u64], total: u64) -> Vec<f64> {
    if total == 0 {
        return vec![0.0; hist.len()];
    }
    hist.iter().map(|&c| c as f64 / total as f64).collect()
}

/// 1.96 s / sqrt(k) over the replication-level values; zero for k < 2.
fn halfwidth(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    let k = values.len();
    if k < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k as f64 - 1.0);
    Z_95 * (var / k as f64).sqrt()
}
