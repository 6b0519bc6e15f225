//! TOML run configuration.
//!
//! ```toml
//! seed = 7                      # master seed, default 1
//!
//! [system]
//! K = 16
//! N = 32
//! M = 64
//!
//! [sweep]
//! axis = "snr_db"               # snr_db | loading | iterations
//! values = [15, 20, 25]
//! snr_db = 25                   # fixed SNR for the loading and iterations axes
//!
//! [stopping]
//! min_bit_errors = 200
//! max_trials = 1000000
//!
//! [[detector]]
//! preset = "dsmgs-default"      # or kind = "ml" | "mmse" | "mgs" | "amgs" | "dsmgs"
//! d = 1
//!
//! [[detector]]
//! kind = "amgs"
//! L_e = 2
//! q = "1/4K"                    # a number or "1/cK"
//! max_iterations = 3000         # a number or "aK√M" (also "aK*sqrt(M)")
//! max_restarts = 5
//!
//! [output]
//! dir = "results"
//! plot = true
//! ```
//!
//! Every detector key other than `kind`/`preset` is optional and defaults to the
//! preset (or the `dsmgs-default` tunables when only `kind` is given).

use std::path::{Path, PathBuf};

use mgs_detect::detectors::ML_BIT_BUDGET;
use mgs_detect::harness::{ExperimentSpec, StopRule};
use mgs_detect::presets::{DetectorFamily, DetectorSpec, IterationLimit, MixingRatio};
use mgs_detect::{PamAlphabet, SweepAxis, Temperature};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT_DIR: &str = "results";

/// A validated run: what to simulate and where to write it.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: ExperimentSpec,
    pub out_dir: PathBuf,
    pub plot: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    system: RawSystem,
    sweep: RawSweep,
    #[serde(default)]
    stopping: RawStopping,
    #[serde(default, rename = "detector")]
    detectors: Vec<RawDetector>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default = "default_axis")]
    axis: String,
    values: Vec<f64>,
    snr_db: Option<f64>,
}

fn default_axis() -> String {
    "snr_db".into()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStopping {
    min_bit_errors: Option<u64>,
    max_trials: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    plot: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    kind: Option<String>,
    preset: Option<String>,
    name: Option<String>,
    d: Option<usize>,
    #[serde(rename = "L_e")]
    l_e: Option<usize>,
    q: Option<NumberOrText>,
    max_iterations: Option<NumberOrText>,
    max_restarts: Option<u32>,
    c1: Option<f64>,
    c2: Option<f64>,
    c_min: Option<u32>,
    alpha1: Option<f64>,
    alpha2: Option<NumberOrText>,
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;

    let axis = match raw.sweep.axis.as_str() {
        "snr_db" => SweepAxis::SnrDb,
        "loading" => SweepAxis::Loading,
        "iterations" => SweepAxis::IterationScale,
        other => {
            return Err(CliError::Config(format!(
                "sweep.axis: unknown axis \"{other}\" (expected snr_db, loading or iterations)"
            )))
        }
    };
    if raw.sweep.values.is_empty() {
        return Err(CliError::Config("sweep.values: at least one value is required".into()));
    }
    let snr_db = match (axis, raw.sweep.snr_db) {
        (SweepAxis::SnrDb, None) => f64::NAN,
        (SweepAxis::SnrDb, Some(_)) => {
            return Err(CliError::Config(
                "sweep.snr_db: not allowed when the axis is snr_db".into(),
            ))
        }
        (_, Some(s)) => s,
        (_, None) => {
            return Err(CliError::Config(format!(
                "sweep.snr_db: required when the axis is {}",
                axis.as_str()
            )))
        }
    };
    if raw.detectors.is_empty() {
        return Err(CliError::Config(
            "detector: at least one [[detector]] table is required".into(),
        ));
    }

    let mut detectors = Vec::with_capacity(raw.detectors.len());
    for (i, d) in raw.detectors.iter().enumerate() {
        let spec = detector_spec(d, raw.system.n).map_err(|e| CliError::Config(format!("detector #{}: {e}", i + 1)))?;
        if detectors.iter().any(|o: &DetectorSpec| o.name == spec.name) {
            return Err(CliError::Config(format!(
                "detector #{}: duplicate name \"{}\"; set `name` to tell them apart",
                i + 1,
                spec.name
            )));
        }
        detectors.push(spec);
    }

    let alphabet = PamAlphabet::new(raw.system.m).map_err(|e| CliError::Config(format!("system.M: {e}")))?;
    if detectors.iter().any(|d| d.family == DetectorFamily::Ml) {
        let max_k = match axis {
            SweepAxis::Loading => raw
                .sweep
                .values
                .iter()
                .map(|b| (b * raw.system.n as f64).round() as usize)
                .max()
                .unwrap_or(0),
            _ => raw.system.k,
        };
        let bits = (2 * max_k as u64 * alphabet.bits_per_pam_symbol() as u64).min(u32::MAX as u64) as u32;
        if bits > ML_BIT_BUDGET {
            return Err(CliError::Config(format!(
                "ML search over {bits} bits exceeds the budget of {ML_BIT_BUDGET} bits; reduce K or M"
            )));
        }
    }

    let default_stop = StopRule::default();
    let experiment = ExperimentSpec {
        k: raw.system.k,
        n: raw.system.n,
        m: raw.system.m,
        detectors,
        axis,
        axis_values: raw.sweep.values,
        snr_db,
        stop: StopRule {
            min_bit_errors: raw.stopping.min_bit_errors.unwrap_or(default_stop.min_bit_errors),
            max_trials: raw.stopping.max_trials.unwrap_or(default_stop.max_trials),
        },
        master_seed: raw.seed.unwrap_or(DEFAULT_SEED),
    };
    experiment.validate().map_err(|e| CliError::Config(e.to_string()))?;

    Ok(RunConfig {
        experiment,
        out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        plot: raw.output.plot.unwrap_or(false),
    })
}

fn detector_spec(raw: &RawDetector, n: usize) -> Result<DetectorSpec, String> {
    let kind = match (raw.preset.as_deref(), raw.kind.as_deref()) {
        (None, None) => return Err("either \"kind\" or \"preset\" is required".into()),
        (Some(p), k) => {
            let implied = match p {
                "mgs-mr-baseline" => "mgs",
                "dsmgs-default" => "dsmgs",
                "amgs-best" => "amgs",
                other => {
                    return Err(format!(
                        "unknown preset \"{other}\" (expected mgs-mr-baseline, dsmgs-default or amgs-best)"
                    ))
                }
            };
            if let Some(k) = k {
                if k != implied {
                    return Err(format!("kind \"{k}\" conflicts with preset \"{p}\""));
                }
            }
            implied
        }
        (None, Some(k)) => k,
    };

    let family = match kind {
        "ml" => DetectorFamily::Ml,
        "mmse" => DetectorFamily::Mmse,
        "mgs" => DetectorFamily::Mgs,
        "amgs" => DetectorFamily::Amgs {
            samples: raw.l_e.ok_or("missing required key \"L_e\" for aMGS")?,
        },
        "dsmgs" => DetectorFamily::Dsmgs {
            d: raw.d.ok_or("missing required key \"d\" for d-sMGS")?,
        },
        other => {
            return Err(format!(
                "unknown kind \"{other}\" (expected ml, mmse, mgs, amgs or dsmgs)"
            ))
        }
    };
    if raw.d.is_some() && !matches!(family, DetectorFamily::Dsmgs { .. }) {
        return Err("key \"d\" only applies to d-sMGS".into());
    }
    if raw.l_e.is_some() && !matches!(family, DetectorFamily::Amgs { .. }) {
        return Err("key \"L_e\" only applies to aMGS".into());
    }
    let tunables = raw.q.is_some()
        || raw.max_iterations.is_some()
        || raw.max_restarts.is_some()
        || raw.c1.is_some()
        || raw.c2.is_some()
        || raw.c_min.is_some()
        || raw.alpha1.is_some()
        || raw.alpha2.is_some();
    if tunables && matches!(family, DetectorFamily::Ml | DetectorFamily::Mmse) {
        return Err(format!("{kind} takes no sampler settings"));
    }

    let mut spec = match (raw.preset.as_deref(), family) {
        (Some("mgs-mr-baseline"), _) => DetectorSpec::mgs_mr_baseline(),
        (Some("amgs-best"), DetectorFamily::Amgs { samples }) => {
            DetectorSpec::amgs_best(samples, n).map_err(|e| e.to_string())?
        }
        _ => DetectorSpec::new(family),
    };
    if let Some(name) = &raw.name {
        if name.is_empty() || name.contains([',', '"', '\n', '\r']) {
            return Err(format!(
                "name {name:?} must be non-empty and free of commas, quotes and newlines"
            ));
        }
        spec.name.clone_from(name);
    }
    if let Some(q) = &raw.q {
        spec.q = parse_mixing(q).map_err(|e| format!("q: {e}"))?;
    }
    if let Some(i) = &raw.max_iterations {
        spec.iterations = parse_iterations(i).map_err(|e| format!("max_iterations: {e}"))?;
    }
    if let Some(r) = raw.max_restarts {
        spec.max_restarts = r;
    }
    if let Some(c) = raw.c1 {
        spec.c1 = c;
    }
    if let Some(c) = raw.c2 {
        spec.c2 = c;
    }
    if let Some(c) = raw.c_min {
        spec.c_min = c;
    }
    if let Some(a) = raw.alpha1 {
        spec.alpha1 = Temperature::Finite(a);
    }
    if let Some(a) = &raw.alpha2 {
        spec.alpha2 = parse_temperature(a).map_err(|e| format!("alpha2: {e}"))?;
    }
    Ok(spec)
}

/// `0.03`, `"1/2K"` or `"1/(2K)"`.
fn parse_mixing(v: &NumberOrText) -> Result<MixingRatio, String> {
    match v {
        NumberOrText::Number(q) => Ok(MixingRatio::Fixed(*q)),
        NumberOrText::Text(t) => {
            let compact: String = t
                .chars()
                .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
                .collect();
            compact
                .strip_prefix("1/")
                .and_then(|r| r.strip_suffix('K'))
                .map(|c| if c.is_empty() { Ok(1.0) } else { c.parse::<f64>() })
                .and_then(|c| c.ok())
                .filter(|c| c.is_finite() && *c > 0.0)
                .map(MixingRatio::InverseUsers)
                .ok_or_else(|| format!("cannot read \"{t}\"; expected a number or \"1/cK\""))
        }
    }
}

/// `3000`, `"8K√M"` or `"8K*sqrt(M)"`.
fn parse_iterations(v: &NumberOrText) -> Result<IterationLimit, String> {
    match v {
        NumberOrText::Number(i) => {
            if i.fract() != 0.0 || *i < 1.0 || *i > u32::MAX as f64 {
                return Err(format!("{i} is not a positive integer"));
            }
            Ok(IterationLimit::Fixed(*i as u32))
        }
        NumberOrText::Text(t) => {
            let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
            ["K√M", "K*√M", "K*sqrt(M)", "Ksqrt(M)"]
                .iter()
                .find_map(|s| compact.strip_suffix(s))
                .map(|a| if a.is_empty() { Ok(1.0) } else { a.parse::<f64>() })
                .and_then(|a| a.ok())
                .filter(|a| a.is_finite() && *a > 0.0)
                .map(IterationLimit::PerUser)
                .ok_or_else(|| format!("cannot read \"{t}\"; expected an integer or \"aK√M\""))
        }
    }
}

fn parse_temperature(v: &NumberOrText) -> Result<Temperature, String> {
    match v {
        NumberOrText::Number(a) => Ok(Temperature::Finite(*a)),
        NumberOrText::Text(t) if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinite" | "infinity") => {
            Ok(Temperature::Infinite)
        }
        NumberOrText::Text(t) => Err(format!("cannot read \"{t}\"; expected a number or \"inf\"")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [system]
        K = 4
        N = 8
        M = 16
        [sweep]
        values = [10, 20]
        [[detector]]
        kind = "dsmgs"
        d = 1
    "#;

    fn err(text: &str) -> String {
        match parse_config_str(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        let det = &cfg.experiment.detectors[0];
        assert_eq!(det.q, MixingRatio::InverseUsers(2.0));
        assert_eq!(det.iterations, IterationLimit::PerUser(8.0));
        assert_eq!((det.c1, det.c2, det.c_min, det.max_restarts), (10.0, 1.0, 10, 20));
        assert_eq!(cfg.experiment.axis, SweepAxis::SnrDb);
        assert_eq!(cfg.experiment.stop, StopRule::default());
        assert_eq!(cfg.experiment.master_seed, DEFAULT_SEED);
        assert_eq!(cfg.out_dir, PathBuf::from(DEFAULT_OUT_DIR));
        assert!(!cfg.plot);
    }

    #[test]
    fn missing_d_is_named() {
        let m = err(&MINIMAL.replace("d = 1", ""));
        assert!(m.contains("\"d\""), "{m}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let m = err(&MINIMAL.replace("d = 1", "d = 1\nwarmup = 3"));
        assert!(m.contains("warmup"), "{m}");
        let m = err(&format!("colour = 1\n{MINIMAL}"));
        assert!(m.contains("colour"), "{m}");
    }

    #[test]
    fn overloaded_system_is_rejected() {
        let m = err(&MINIMAL.replace("N = 8", "N = 3"));
        assert!(m.contains("K=4"), "{m}");
    }

    #[test]
    fn amgs_best_follows_antenna_threshold() {
        let text = MINIMAL.replace("N = 8", "N = 128").replace(
            "kind = \"dsmgs\"\n        d = 1",
            "preset = \"amgs-best\"\n        L_e = 2",
        );
        let cfg = parse_config_str(&text).unwrap();
        let det = &cfg.experiment.detectors[0];
        assert_eq!(det.q, MixingRatio::InverseUsers(4.0));
        assert_eq!(det.iterations, IterationLimit::Fixed(3000));
        assert_eq!(det.max_restarts, 5);

        let text = text.replace("L_e = 2", "L_e = 8").replace("N = 128", "N = 16");
        assert_eq!(
            parse_config_str(&text).unwrap().experiment.detectors[0].q,
            MixingRatio::InverseUsers(2.0)
        );
    }

    #[test]
    fn symbolic_values() {
        let n = |s: &str| NumberOrText::Text(s.into());
        assert_eq!(parse_mixing(&n("1/2K")).unwrap(), MixingRatio::InverseUsers(2.0));
        assert_eq!(parse_mixing(&n("1/(3K)")).unwrap(), MixingRatio::InverseUsers(3.0));
        assert_eq!(
            parse_mixing(&NumberOrText::Number(0.05)).unwrap(),
            MixingRatio::Fixed(0.05)
        );
        assert!(parse_mixing(&n("2K")).is_err());
        assert_eq!(parse_iterations(&n("8K√M")).unwrap(), IterationLimit::PerUser(8.0));
        assert_eq!(
            parse_iterations(&n("0.5K*sqrt(M)")).unwrap(),
            IterationLimit::PerUser(0.5)
        );
        assert_eq!(
            parse_iterations(&NumberOrText::Number(3000.0)).unwrap(),
            IterationLimit::Fixed(3000)
        );
        assert!(parse_iterations(&NumberOrText::Number(2.5)).is_err());
        assert_eq!(parse_temperature(&n("inf")).unwrap(), Temperature::Infinite);
        assert!(parse_temperature(&n("hot")).is_err());
    }

    #[test]
    fn ml_budget_checked_up_front() {
        let text = MINIMAL
            .replace("M = 16", "M = 256")
            .replace("kind = \"dsmgs\"\n        d = 1", "kind = \"ml\"");
        let m = err(&text);
        assert!(m.contains("budget"), "{m}");
    }

    #[test]
    fn secondary_axes_need_a_fixed_snr() {
        let text = MINIMAL.replace("values = [10, 20]", "axis = \"iterations\"\n        values = [1, 2]");
        assert!(err(&text).contains("snr_db"));
        let text = text.replace("values = [1, 2]", "values = [1, 2]\n        snr_db = 20");
        assert_eq!(parse_config_str(&text).unwrap().experiment.snr_db, 20.0);
    }

    #[test]
    fn conflicting_and_duplicate_detectors() {
        let text = MINIMAL.replace("kind = \"dsmgs\"", "kind = \"mgs\"\n        preset = \"dsmgs-default\"");
        assert!(err(&text).contains("conflicts"));
        let text = format!("{MINIMAL}\n[[detector]]\nkind = \"dsmgs\"\nd = 1\n");
        assert!(err(&text).contains("duplicate"));
    }
}
