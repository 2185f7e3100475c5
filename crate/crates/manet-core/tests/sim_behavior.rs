//! Simulator behavior beyond the acceptance criteria: scheduler chance
//! frequencies against the closed forms, and derangement insensitivity.

use manet_core::mac::{ec_probs, ls_probs, SchedProbs};
use manet_core::sim::{run, Derangement, RunOptions, SimReport};
use manet_core::{MacKind, NetworkParams};

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

fn opts(seed: u64) -> RunOptions {
    RunOptions {
        slots: 300_000,
        replications: 8,
        seed,
        ..Default::default()
    }
}

/// Mean and standard error over replications.
fn rep_stats(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn assert_chances_match(report: &SimReport, expected: &SchedProbs, label: &str) {
    let reps = &report.per_replication;
    let checks = [
        ("psd", reps.iter().map(|r| r.opportunities.psd).collect::<Vec<_>>(), expected.psd),
        ("psr", reps.iter().map(|r| r.opportunities.psr).collect::<Vec<_>>(), expected.psr),
        ("prd", reps.iter().map(|r| r.opportunities.prd).collect::<Vec<_>>(), expected.prd),
    ];
    for (name, values, want) in checks {
        let (mean, se) = rep_stats(values.into_iter());
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "{label} {name}: empirical {mean:.6} vs closed {want:.6} (3 sigma {:.6})",
            3.0 * se
        );
    }
}

#[test]
fn ls_scheduler_chance_frequencies_match_closed_forms() {
    let params = desk_params();
    let report = run(&params, &opts(31)).unwrap();
    let expected = ls_probs(params.n, params.m).unwrap();
    assert_chances_match(&report, &expected, "LS desk");
}

#[test]
fn ec_scheduler_chance_frequencies_match_closed_forms() {
    let params = NetworkParams {
        mac: MacKind::Ec,
        ..desk_params()
    };
    let report = run(&params, &opts(32)).unwrap();
    let (expected, _) = ec_probs(params.n, params.m, params.nu, params.delta).unwrap();
    assert_chances_match(&report, &expected, "EC desk");
}

/// The model is symmetric across derangements; the two pairings must agree
/// within their joint confidence interval.
#[test]
fn throughput_is_derangement_insensitive_at_ci_level() {
    let params = desk_params();
    let shift = run(&params, &opts(33)).unwrap();
    let random = run(
        &params,
        &RunOptions {
            derangement: Derangement::Random,
            ..opts(34)
        },
    )
    .unwrap();
    let gap = (shift.throughput_mean - random.throughput_mean).abs();
    let joint = (shift.ci_halfwidth.throughput.powi(2) + random.ci_halfwidth.throughput.powi(2))
        .sqrt();
    assert!(
        gap <= 1.5 * joint,
        "throughput gap {gap} vs joint CI {joint} (shift {}, random {})",
        shift.throughput_mean,
        random.throughput_mean
    );
}

/// The feedback mechanism exists precisely to avoid relay overflow drops:
/// a feedback run must never count one, while the plain run at the same
/// load must.
#[test]
fn feedback_eliminates_relay_drops() {
    let base = NetworkParams {
        lambda_s: 0.08,
        ..desk_params()
    };
    let o = RunOptions {
        slots: 100_000,
        replications: 3,
        seed: 36,
        ..Default::default()
    };
    let plain = run(&base, &o).unwrap();
    assert!(plain.dropped_relay > 0, "plain run should overflow relays");
    let with_fb = run(
        &NetworkParams {
            feedback: true,
            ..base
        },
        &o,
    )
    .unwrap();
    assert_eq!(with_fb.dropped_relay, 0, "feedback still dropped packets");
    assert!(with_fb.conservation_holds());
}

/// Relay histograms freeze when nothing can be relayed.
#[test]
fn zero_relay_capacity_never_populates_relays() {
    let params = NetworkParams {
        br: 0,
        lambda_s: 0.1,
        ..desk_params()
    };
    let report = run(
        &params,
        &RunOptions {
            slots: 50_000,
            replications: 2,
            seed: 35,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(report.empirical_pi_r, vec![1.0]);
    assert!(report.dropped_relay > 0, "overflowing relays must drop");
    assert!(report.conservation_holds());
}
