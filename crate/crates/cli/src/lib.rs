//! Front end for Monte-Carlo detector sweeps: TOML config in, `results.csv` out.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use mgs_detect::harness::{sweep_with, Execution};
use mgs_detect::presets::{amgs_best_mixing, DetectorSpec, AMGS_SAMPLES, DSMGS_DISTANCES};
use mgs_detect::SweepPoint;
use thiserror::Error;

pub use config::{parse_config, parse_config_str, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub plot: bool,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.experiment.master_seed = seed;
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir.clone_from(dir);
        }
        self.plot |= o.plot;
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub points: Vec<SweepPoint>,
    pub csv_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

impl RunReport {
    /// Diagnostic lines for points that stopped short of their error target.
    pub fn warnings(&self) -> Vec<String> {
        self.points
            .iter()
            .filter(|p| p.under_resolved())
            .map(|p| {
                format!(
                    "warning: {} at {}={}: only {} bit errors in {} trials (target {}); BER is coarse",
                    p.detector,
                    p.axis.as_str(),
                    output::format_float(p.axis_value),
                    p.bit_errors,
                    p.trials,
                    p.target_bit_errors
                )
            })
            .collect()
    }
}

/// Runs the sweep and returns its points without touching the file system.
pub fn simulate(config: &RunConfig, threads: Option<usize>) -> Result<Vec<SweepPoint>, CliError> {
    let run = || sweep_with(&config.experiment, Execution::default()).map_err(|e| CliError::Config(e.to_string()));
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(run),
        #[cfg(not(feature = "parallel"))]
        Some(_) => run(),
        None => run(),
    }
}

/// Runs the sweep and writes `results.csv` (and `plot.py` when requested).
pub fn run(config: &RunConfig, threads: Option<usize>) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", config.out_dir.display())))?;
    let points = simulate(config, threads)?;
    let csv_path = config.out_dir.join(output::RESULTS_FILE);
    write(&csv_path, &output::render_csv(&points))?;
    let plot_path = if config.plot {
        let path = config.out_dir.join(output::PLOT_FILE);
        write(&path, &output::render_plot_script(output::RESULTS_FILE))?;
        Some(path)
    } else {
        None
    };
    Ok(RunReport {
        points,
        csv_path,
        plot_path,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Human-readable listing of the named presets.
pub fn presets_text() -> String {
    let mut out = String::new();
    let line = |s: &DetectorSpec| {
        format!(
            "q={}  I={}  R_max={}  c1={}  c2={}  c_min={}",
            s.q, s.iterations, s.max_restarts, s.c1, s.c2, s.c_min
        )
    };

    let mgs = DetectorSpec::mgs_mr_baseline();
    out.push_str("mgs-mr-baseline\n");
    out.push_str(&format!("  {}\n", line(&mgs)));

    out.push_str("dsmgs-default  (set d)\n");
    for d in DSMGS_DISTANCES {
        let s = DetectorSpec::dsmgs_default(d);
        out.push_str(&format!("  d={d}  {}\n", line(&s)));
    }

    out.push_str("amgs-best  (set L_e; q depends on N)\n");
    for l_e in AMGS_SAMPLES {
        let small = amgs_best_mixing(l_e, 64).expect("tuned sample count");
        let large = amgs_best_mixing(l_e, 65).expect("tuned sample count");
        let s = DetectorSpec::amgs_best(l_e, 64).expect("tuned sample count");
        out.push_str(&format!(
            "  L_e={l_e}  q={small} (N<=64), q={large} (N>64)  I={}  R_max={}  c1={}  c2={}  c_min={}\n",
            s.iterations, s.max_restarts, s.c1, s.c2, s.c_min
        ));
    }
    out
}
