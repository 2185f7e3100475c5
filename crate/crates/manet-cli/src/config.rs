//! Experiment configuration: defaults, JSON config files, flag overrides.

use std::fmt;
use std::fs;

use serde::Deserialize;

use manet_core::{MacKind, Mobility, NetworkParams};

use crate::cli::{MacArg, MobilityArg, RunArgs};
use crate::HarnessError;

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: NetworkParams,
    pub slots: u64,
    pub replications: u32,
    pub warmup_fraction: f64,
    pub seed: u64,
    /// Relative-error gate used by `validate`.
    pub tolerance: f64,
    pub sweep: Option<Sweep>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: NetworkParams::default(),
            slots: 2_000_000,
            replications: 10,
            warmup_fraction: 0.2,
            seed: 1,
            tolerance: 0.05,
            sweep: None,
        }
    }
}

/// One swept NetworkParams field and its value list.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Only meaningful when sweeping `n`: cells are kept at `n / density`.
    pub density: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    N,
    M,
    Bs,
    Br,
    LambdaS,
    Nu,
    Delta,
}

impl SweepParam {
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        Ok(match name {
            "n" => SweepParam::N,
            "m" => SweepParam::M,
            "bs" => SweepParam::Bs,
            "br" => SweepParam::Br,
            "lambda_s" => SweepParam::LambdaS,
            "nu" => SweepParam::Nu,
            "delta" => SweepParam::Delta,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown sweep parameter `{other}` \
                     (expected one of n, m, bs, br, lambda_s, nu, delta)"
                )))
            }
        })
    }

    fn is_integer(self) -> bool {
        !matches!(self, SweepParam::LambdaS | SweepParam::Delta)
    }

    /// Renders a swept value the way the parameter is typed.
    pub fn render(self, value: f64) -> String {
        if self.is_integer() {
            format!("{}", value as u64)
        } else {
            format!("{value}")
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SweepParam::N => "n",
            SweepParam::M => "m",
            SweepParam::Bs => "bs",
            SweepParam::Br => "br",
            SweepParam::LambdaS => "lambda_s",
            SweepParam::Nu => "nu",
            SweepParam::Delta => "delta",
        };
        f.write_str(name)
    }
}

impl Sweep {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Config(
                "sweep value list must not be empty".into(),
            ));
        }
        if self.param.is_integer() {
            for &v in &self.values {
                if v.fract() != 0.0 || v < 0.0 {
                    return Err(HarnessError::Config(format!(
                        "sweep parameter `{}` takes nonnegative integers, got {v}",
                        self.param
                    )));
                }
            }
        }
        if self.density.is_some() && self.param != SweepParam::N {
            return Err(HarnessError::Config(
                "density only applies when sweeping n".into(),
            ));
        }
        Ok(())
    }

    /// Applies one swept value to a base scenario.
    pub fn apply(&self, base: &NetworkParams, value: f64) -> Result<NetworkParams, HarnessError> {
        let mut p = base.clone();
        match self.param {
            SweepParam::N => {
                p.n = value as u32;
                if let Some(d) = self.density {
                    let cells = value / d;
                    let m = cells.sqrt().round();
                    if (m * m - cells).abs() > 1e-9 || m < 1.0 {
                        return Err(HarnessError::Config(format!(
                            "n = {value} with density {d} needs n/density to be a perfect \
                             square of cells"
                        )));
                    }
                    p.m = m as u32;
                }
            }
            SweepParam::M => p.m = value as u32,
            SweepParam::Bs => p.bs = value as u32,
            SweepParam::Br => p.br = value as u32,
            SweepParam::LambdaS => p.lambda_s = value,
            SweepParam::Nu => p.nu = value as u32,
            SweepParam::Delta => p.delta = value,
        }
        p.validate().map_err(HarnessError::from)?;
        Ok(p)
    }
}

/// On-disk config: one flat JSON object. Every key matches a NetworkParams or
/// experiment field name; unknown keys are errors so a misspelled sweep can
/// never silently no-op.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: Option<u32>,
    m: Option<u32>,
    bs: Option<u32>,
    br: Option<u32>,
    lambda_s: Option<f64>,
    feedback: Option<bool>,
    mac: Option<MacKind>,
    nu: Option<u32>,
    delta: Option<f64>,
    mobility: Option<Mobility>,
    slots: Option<u64>,
    replications: Option<u32>,
    warmup_fraction: Option<f64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    sweep: Option<SweepFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    param: String,
    values: Vec<f64>,
    density: Option<f64>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
}

/// Builds the experiment description: defaults, then the config file, then
/// explicit flags.
pub fn resolve(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::default();

    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("bad config {}: {e}", path.display())))?;
        overlay!(cfg.params.n, file.n);
        overlay!(cfg.params.m, file.m);
        overlay!(cfg.params.bs, file.bs);
        overlay!(cfg.params.br, file.br);
        overlay!(cfg.params.lambda_s, file.lambda_s);
        overlay!(cfg.params.feedback, file.feedback);
        overlay!(cfg.params.mac, file.mac);
        overlay!(cfg.params.nu, file.nu);
        overlay!(cfg.params.delta, file.delta);
        overlay!(cfg.params.mobility, file.mobility);
        overlay!(cfg.slots, file.slots);
        overlay!(cfg.replications, file.replications);
        overlay!(cfg.warmup_fraction, file.warmup_fraction);
        overlay!(cfg.seed, file.seed);
        overlay!(cfg.tolerance, file.tolerance);
        if let Some(s) = file.sweep {
            cfg.sweep = Some(Sweep {
                param: SweepParam::parse(&s.param)?,
                values: s.values,
                density: s.density,
            });
        }
    }

    overlay!(cfg.params.n, args.n);
    overlay!(cfg.params.m, args.m);
    overlay!(cfg.params.bs, args.bs);
    overlay!(cfg.params.br, args.br);
    overlay!(cfg.params.lambda_s, args.lambda_s);
    overlay!(cfg.params.feedback, args.feedback);
    if let Some(mac) = args.mac {
        cfg.params.mac = match mac {
            MacArg::Ls => MacKind::Ls,
            MacArg::Ec => MacKind::Ec,
        };
    }
    overlay!(cfg.params.nu, args.nu);
    overlay!(cfg.params.delta, args.delta);
    if let Some(mob) = args.mobility {
        cfg.params.mobility = match mob {
            MobilityArg::Iid => Mobility::Iid,
            MobilityArg::Rw => Mobility::Rw,
        };
    }
    overlay!(cfg.slots, args.slots);
    overlay!(cfg.replications, args.reps);
    overlay!(cfg.warmup_fraction, args.warmup_fraction);
    overlay!(cfg.seed, args.seed);
    overlay!(cfg.tolerance, args.tolerance);

    match (&args.sweep, &args.values) {
        (Some(param), Some(values)) => {
            let values = values
                .split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        HarnessError::Config(format!("bad sweep value `{v}`"))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            cfg.sweep = Some(Sweep {
                param: SweepParam::parse(param)?,
                values,
                density: args.density,
            });
        }
        (Some(_), None) | (None, Some(_)) => {
            return Err(HarnessError::Config(
                "--sweep and --values must be given together".into(),
            ));
        }
        (None, None) => {
            if let (Some(sweep), Some(d)) = (&mut cfg.sweep, args.density) {
                sweep.density = Some(d);
            }
        }
    }

    if let Some(sweep) = &cfg.sweep {
        sweep.validate()?;
    }
    cfg.params.validate().map_err(HarnessError::from)?;
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        return Err(HarnessError::Config(format!(
            "tolerance must be positive, got {}",
            cfg.tolerance
        )));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare_args() -> RunArgs {
        RunArgs {
            config: None,
            out: None,
            format: None,
            seed: None,
            slots: None,
            reps: None,
            tolerance: None,
            warmup_fraction: None,
            n: None,
            m: None,
            bs: None,
            br: None,
            lambda_s: None,
            feedback: None,
            mac: None,
            nu: None,
            delta: None,
            mobility: None,
            sweep: None,
            values: None,
            density: None,
        }
    }

    #[test]
    fn defaults_mirror_the_reference_settings() {
        let cfg = resolve(&bare_args()).unwrap();
        assert_eq!(cfg.params.n, 72);
        assert_eq!(cfg.params.m, 6);
        assert_eq!(cfg.params.bs, 5);
        assert_eq!(cfg.params.br, 5);
        assert_eq!(cfg.slots, 2_000_000);
        assert_eq!(cfg.replications, 10);
    }

    #[test]
    fn flags_override_defaults() {
        let mut args = bare_args();
        args.n = Some(20);
        args.lambda_s = Some(0.02);
        let cfg = resolve(&args).unwrap();
        assert_eq!(cfg.params.n, 20);
        assert_eq!(cfg.params.lambda_s, 0.02);
    }

    #[test]
    fn sweep_values_must_be_type_correct() {
        let mut args = bare_args();
        args.sweep = Some("bs".into());
        args.values = Some("1,2.5,3".into());
        assert!(matches!(resolve(&args), Err(HarnessError::Config(_))));
        args.values = Some("1,2,3".into());
        assert!(resolve(&args).is_ok());
    }

    #[test]
    fn empty_value_list_is_a_config_error() {
        let sweep = Sweep {
            param: SweepParam::LambdaS,
            values: vec![],
            density: None,
        };
        assert!(sweep.validate().is_err());
    }

    #[test]
    fn density_requires_square_cell_counts() {
        let sweep = Sweep {
            param: SweepParam::N,
            values: vec![72.0],
            density: Some(2.0),
        };
        let p = sweep.apply(&NetworkParams::default(), 72.0).unwrap();
        assert_eq!(p.m, 6);
        assert!(sweep.apply(&NetworkParams::default(), 40.0).is_err());
    }
}
