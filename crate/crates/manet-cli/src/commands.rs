//! The four subcommands.

use std::process::ExitCode;

use serde_json::json;

use manet_core::analytic::{analyze_with_probs, TheoryReport};
use manet_core::mac::sched_probs;
use manet_core::sim::{run, Derangement, RunOptions, SimReport};
use manet_core::NetworkParams;

use crate::cli::OutputFormat;
use crate::config::ExperimentConfig;
use crate::output::{to_csv, ComparisonRow, Output, RowStatus, SweepRow};
use crate::HarnessError;

fn run_options(cfg: &ExperimentConfig) -> RunOptions {
    RunOptions {
        slots: cfg.slots,
        warmup_fraction: cfg.warmup_fraction,
        seed: cfg.seed,
        replications: cfg.replications,
        derangement: Derangement::Shift,
    }
}

/// Closed-form evaluation of one scenario.
pub fn theory(cfg: &ExperimentConfig, out: &Output) -> Result<ExitCode, HarnessError> {
    let probs = sched_probs(&cfg.params)?;
    let report = analyze_with_probs(&cfg.params, &probs)?;
    match out.format_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let doc = json!({
                "params": cfg.params,
                "sched_probs": probs,
                "report": report,
            });
            out.write(&serde_json::to_string_pretty(&doc).expect("report serializes"))?;
        }
        OutputFormat::Csv => {
            let header = [
                "throughput",
                "expected_delay",
                "capacity",
                "source_len",
                "relay_len",
                "source_empty",
                "relay_overflow",
                "service_rate",
                "psd",
                "psr",
                "prd",
            ];
            let rec = vec![
                format!("{}", report.throughput),
                format!("{}", report.expected_delay),
                format!("{}", report.capacity),
                format!("{}", report.source_len),
                format!("{}", report.relay_len),
                format!("{}", report.source_empty),
                format!("{}", report.relay_overflow),
                format!("{}", report.service_rate),
                format!("{}", probs.psd),
                format!("{}", probs.psr),
                format!("{}", probs.prd),
            ];
            out.write(&to_csv(&header, std::iter::once(rec)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// One simulation run (all replications) for one scenario.
pub fn simulate(cfg: &ExperimentConfig, out: &Output) -> Result<ExitCode, HarnessError> {
    let opts = run_options(cfg);
    let report = run(&cfg.params, &opts)?;
    match out.format_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let doc = json!({
                "params": cfg.params,
                "options": opts,
                "report": report,
            });
            out.write(&serde_json::to_string_pretty(&doc).expect("report serializes"))?;
        }
        OutputFormat::Csv => {
            let header = [
                "throughput_mean",
                "mean_delay",
                "t_ci",
                "ed_ci",
                "generated",
                "delivered",
                "dropped_source",
                "dropped_relay",
                "in_flight",
            ];
            let rec = vec![
                format!("{}", report.throughput_mean),
                report
                    .mean_delay
                    .map(|d| format!("{d}"))
                    .unwrap_or_default(),
                format!("{}", report.ci_halfwidth.throughput),
                format!("{}", report.ci_halfwidth.mean_delay),
                report.generated.to_string(),
                report.delivered.to_string(),
                report.dropped_source.to_string(),
                report.dropped_relay.to_string(),
                report.in_flight.to_string(),
            ];
            out.write(&to_csv(&header, std::iter::once(rec)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// The scenarios validate/sweep iterate over: the sweep grid when present,
/// otherwise the configured point labeled by its own generating rate.
fn sweep_points(
    cfg: &ExperimentConfig,
) -> Result<Vec<(String, f64, NetworkParams)>, HarnessError> {
    match &cfg.sweep {
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| {
                sweep
                    .apply(&cfg.params, v)
                    .map(|p| (sweep.param.to_string(), v, p))
            })
            .collect(),
        None => Ok(vec![(
            "lambda_s".to_string(),
            cfg.params.lambda_s,
            cfg.params.clone(),
        )]),
    }
}

fn relative_error(theory: f64, sim: f64) -> f64 {
    if theory == 0.0 {
        if sim == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (sim - theory).abs() / theory.abs()
    }
}

/// A metric passes on relative error within tolerance or on the theory value
/// landing inside the simulation confidence interval; a CI wider than the
/// tolerance band makes the verdict inconclusive rather than a failure.
fn metric_status(theory: f64, sim: f64, ci: f64, tolerance: f64) -> RowStatus {
    let rel = relative_error(theory, sim);
    if rel <= tolerance || (theory - sim).abs() <= ci {
        RowStatus::Pass
    } else if ci > tolerance * theory.abs() {
        RowStatus::Inconclusive
    } else {
        RowStatus::Fail
    }
}

/// Runs theory and simulation on identical scenarios; exit 1 when any row
/// fails its gate.
pub fn validate(
    cfg: &ExperimentConfig,
    both_modes: bool,
    theory_scale: f64,
    out: &Output,
) -> Result<ExitCode, HarnessError> {
    let points = sweep_points(cfg)?;
    let modes: &[bool] = if both_modes {
        &[false, true]
    } else if cfg.params.feedback {
        &[true]
    } else {
        &[false]
    };

    let mut rows = Vec::new();
    for (name, value, params) in &points {
        for &feedback in modes {
            let params = NetworkParams {
                feedback,
                ..params.clone()
            };
            let probs = sched_probs(&params)?;
            let th: TheoryReport = analyze_with_probs(&params, &probs)?;
            let t_theory = th.throughput * theory_scale;
            let ed_theory = th.expected_delay * theory_scale;
            let sim: SimReport = run(&params, &run_options(cfg))?;
            let t_sim = sim.throughput_mean;
            let t_ci = sim.ci_halfwidth.throughput;
            let ed_ci = sim.ci_halfwidth.mean_delay;
            let t_status = metric_status(t_theory, t_sim, t_ci, cfg.tolerance);
            let ed_status = match sim.mean_delay {
                Some(ed_sim) => metric_status(ed_theory, ed_sim, ed_ci, cfg.tolerance),
                None => RowStatus::Inconclusive,
            };
            rows.push(ComparisonRow {
                param: name.clone(),
                value: *value,
                feedback,
                t_theory,
                t_sim,
                t_rel_err: relative_error(t_theory, t_sim),
                t_ci,
                ed_theory,
                ed_sim: sim.mean_delay,
                ed_rel_err: sim.mean_delay.map(|d| relative_error(ed_theory, d)),
                ed_ci,
                status: t_status.max(ed_status),
            });
        }
    }

    match out.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => out.write(&to_csv(
            &ComparisonRow::HEADER,
            rows.iter().map(|r| r.to_record()),
        ))?,
        OutputFormat::Json => {
            out.write(&serde_json::to_string_pretty(&rows).expect("rows serialize"))?
        }
    }

    if rows.iter().any(|r| r.status == RowStatus::Fail) {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

/// Theory (and optionally simulation) across the sweep grid.
pub fn sweep(cfg: &ExperimentConfig, with_sim: bool, out: &Output) -> Result<ExitCode, HarnessError> {
    if cfg.sweep.is_none() {
        return Err(HarnessError::Config(
            "sweep requires a sweep specification (--sweep/--values or a config `sweep` object)"
                .into(),
        ));
    }
    let points = sweep_points(cfg)?;
    let mut rows = Vec::with_capacity(points.len());
    for (name, value, params) in &points {
        let probs = sched_probs(params)?;
        let th = analyze_with_probs(params, &probs)?;
        let sim = if with_sim {
            Some(run(params, &run_options(cfg))?)
        } else {
            None
        };
        rows.push(SweepRow {
            param: name.clone(),
            value: *value,
            feedback: params.feedback,
            t_theory: th.throughput,
            ed_theory: th.expected_delay,
            capacity: th.capacity,
            source_empty: th.source_empty,
            relay_overflow: th.relay_overflow,
            service_rate: th.service_rate,
            t_sim: sim.as_ref().map(|s| s.throughput_mean),
            ed_sim: sim.as_ref().and_then(|s| s.mean_delay),
            t_ci: sim.as_ref().map(|s| s.ci_halfwidth.throughput),
            ed_ci: sim.as_ref().map(|s| s.ci_halfwidth.mean_delay),
        });
    }

    match out.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => out.write(&to_csv(
            &SweepRow::HEADER,
            rows.iter().map(|r| r.to_record()),
        ))?,
        OutputFormat::Json => {
            out.write(&serde_json::to_string_pretty(&rows).expect("rows serialize"))?
        }
    }
    Ok(ExitCode::SUCCESS)
}
