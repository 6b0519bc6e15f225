//! Symbol detectors for the real-valued uplink model.
//!
//! * [`ml_detect`]: exhaustive search, usable as an oracle on small systems.
//! * [`mmse_detect`]: regularised linear detector, also the first initial
//!   solution of every iterative detector.
//! * [`mgs_detect`]: mixed Gibbs sampling between two tempered conditionals.
//! * [`amgs_detect`]: averaged MGS over the minimum-cost target.
//! * [`dsmgs_detect`]: MGS over the minimum-cost target whose noisy branch
//!   is limited to a neighborhood of the current symbol.
//!
//! [`Detector`] bundles each with its configuration and wraps the iterative
//! ones in [`with_restarts`].

mod chain;
mod linear;
mod stopping;
mod target;

use rand::Rng;

use crate::error::{Error, Result};
use crate::metrics::{rops_per_symbol, ComplexityModel, DetectorKind};
use crate::system::RealSystem;

use chain::{run_chain, AmgsRule, ChainOutcome, CoordinateRule, DsmgsRule, MgsRule};

pub use linear::{ml_detect, mmse_detect, mmse_estimate, ML_BIT_BUDGET};
pub use stopping::{stalling_check, theta_r, theta_s, with_restarts, RunOutcome};
pub use target::{candidate_costs, mgs_target_log_probs, simplified_target};

/// Sampling temperature `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Finite(f64),
    /// Uniform sampling over the alphabet.
    Infinite,
}

/// Tunables shared by all iterative detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MgsConfig {
    /// Probability of the noisy branch per coordinate update.
    pub q: f64,
    pub alpha1: Temperature,
    pub alpha2: Temperature,
    /// Iteration cap `I` per run.
    pub max_iterations: u32,
    /// Cap on the number of runs `R_max`.
    pub max_restarts: u32,
    pub c1: f64,
    pub c2: f64,
    pub c_min: u32,
}

impl MgsConfig {
    /// Default tunables for `K` users and M-QAM: `q = 1/2K`, `I = 8K√M`,
    /// `R_max = 20`, `c1 = 10`, `c2 = 1`, `c_min = 10`, `α = (1, ∞)`.
    pub fn table2(k: usize, m: u32) -> Self {
        Self {
            q: 1.0 / (2.0 * k as f64),
            alpha1: Temperature::Finite(1.0),
            alpha2: Temperature::Infinite,
            max_iterations: iteration_cap(8.0, k, m),
            max_restarts: 20,
            c1: 10.0,
            c2: 1.0,
            c_min: 10,
        }
    }

    /// The MGS-MR reference setting: as [`MgsConfig::table2`] with `R_max = 50`, `c2 = 0.5`.
    pub fn mgs_mr_baseline(k: usize, m: u32) -> Self {
        Self {
            max_restarts: 50,
            c2: 0.5,
            ..Self::table2(k, m)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.q) {
            return Err(Error::Config(format!(
                "mixing ratio q must lie in [0, 1), got {}",
                self.q
            )));
        }
        for (name, t) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if let Temperature::Finite(a) = t {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::Config(format!("{name} must be positive, got {a}")));
                }
            }
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.max_restarts < 1 {
            return Err(Error::Config("max_restarts must be at least 1".into()));
        }
        if self.c_min < 1 {
            return Err(Error::Config("c_min must be at least 1".into()));
        }
        if !(self.c1 > 0.0) || !(self.c2 > 0.0) {
            return Err(Error::Config(format!(
                "c1 and c2 must be positive, got {} and {}",
                self.c1, self.c2
            )));
        }
        Ok(())
    }
}

/// `I = a K √M`, rounded to the nearest integer.
pub fn iteration_cap(a: f64, k: usize, m: u32) -> u32 {
    (a * k as f64 * (m as f64).sqrt()).round().max(1.0) as u32
}

/// Averaged MGS.
#[derive(Debug, Clone, PartialEq)]
pub struct AmgsConfig {
    pub base: MgsConfig,
    /// Samples averaged per coordinate, `L_e`.
    pub samples: usize,
}

impl AmgsConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.samples < 1 {
            return Err(Error::Config("L_e must be at least 1".into()));
        }
        Ok(())
    }
}

/// Neighborhood-limited simplified MGS.
#[derive(Debug, Clone, PartialEq)]
pub struct DsmgsConfig {
    pub base: MgsConfig,
    /// Neighborhood distance `d`.
    pub d: usize,
}

impl DsmgsConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.d < 1 {
            return Err(Error::Config("neighborhood distance d must be at least 1".into()));
        }
        Ok(())
    }
}

/// Output of a detector on one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Estimated PAM vector, always inside the alphabet.
    pub s_hat: Vec<f64>,
    /// `‖y - H s_hat‖`.
    pub best_cost: f64,
    /// Iterations summed over all runs.
    pub iterations_used: u64,
    /// Runs performed; zero for non-iterative detectors.
    pub restarts_used: u32,
    /// Per-symbol rops charged; `NaN` for the exhaustive oracle.
    pub rops_charged: f64,
}

/// Uniform random vector in `A^{2K}`.
pub fn random_init<R: Rng + ?Sized>(sys: &RealSystem, rng: &mut R) -> Vec<f64> {
    let a = sys.alphabet();
    (0..sys.dims()).map(|_| a.level(rng.random_range(0..a.len()))).collect()
}

/// MMSE estimate as the first initial vector, uniform random if the linear
/// solve fails.
fn first_init<R: Rng + ?Sized>(sys: &RealSystem, rng: &mut R) -> Vec<f64> {
    match mmse_detect(sys) {
        Ok(res) => res.s_hat,
        Err(_) => random_init(sys, rng),
    }
}

fn check_init(sys: &RealSystem, s_init: &[f64]) -> Result<()> {
    if s_init.len() != sys.dims() {
        return Err(Error::Domain(format!(
            "initial vector has {} entries, system has {} real dimensions",
            s_init.len(),
            sys.dims()
        )));
    }
    for &v in s_init {
        sys.alphabet().index_of(v)?;
    }
    Ok(())
}

fn single_run_result(sys: &RealSystem, run: RunOutcome, kind: DetectorKind) -> DetectionResult {
    DetectionResult {
        best_cost: run.cost2.sqrt(),
        s_hat: run.s_hat,
        iterations_used: run.iterations,
        restarts_used: 1,
        rops_charged: 0.0,
    }
    .charged(sys, Some(kind))
}

impl DetectionResult {
    fn charged(mut self, sys: &RealSystem, kind: Option<DetectorKind>) -> Self {
        if let Some(kind) = kind {
            let model = ComplexityModel::with_mmse_init(kind, sys.k, sys.n, sys.alphabet().len());
            self.rops_charged = rops_per_symbol(&model, self.iterations_used as f64).unwrap_or(f64::NAN);
        }
        self
    }
}

/// Slices a chain's best vector and re-evaluates its cost from scratch.
fn finish(sys: &RealSystem, out: ChainOutcome) -> RunOutcome {
    let alphabet = sys.alphabet();
    let s_hat: Vec<f64> = out
        .best
        .iter()
        .map(|&v| alphabet.level(alphabet.slice_index(v)))
        .collect();
    RunOutcome {
        cost2: sys.cost2(&s_hat),
        s_hat,
        iterations: out.iterations,
    }
}

fn run_rule<R, U>(sys: &RealSystem, cfg: &MgsConfig, init: &[f64], rng: &mut R, rule: &mut U) -> Result<RunOutcome>
where
    R: Rng + ?Sized,
    U: CoordinateRule,
{
    Ok(finish(sys, run_chain(sys, cfg, init, rng, rule)?))
}

fn mgs_rule(cfg: &MgsConfig) -> MgsRule {
    MgsRule {
        q: cfg.q,
        alpha1: cfg.alpha1,
        alpha2: cfg.alpha2,
    }
}

/// One MGS run from `s_init`, without restarts.
pub fn mgs_detect<R: Rng + ?Sized>(
    sys: &RealSystem,
    cfg: &MgsConfig,
    s_init: &[f64],
    rng: &mut R,
) -> Result<DetectionResult> {
    cfg.validate()?;
    check_init(sys, s_init)?;
    let run = run_rule(sys, cfg, s_init, rng, &mut mgs_rule(cfg))?;
    Ok(single_run_result(sys, run, DetectorKind::Mgs))
}

/// One aMGS run from `s_init`. Coordinates average `L_e` mixture draws and
/// may leave the alphabet; the reported estimate is the sliced best vector.
pub fn amgs_detect<R: Rng + ?Sized>(
    sys: &RealSystem,
    cfg: &AmgsConfig,
    s_init: &[f64],
    rng: &mut R,
) -> Result<DetectionResult> {
    cfg.validate()?;
    check_init(sys, s_init)?;
    let mut rule = AmgsRule {
        q: cfg.base.q,
        samples: cfg.samples,
    };
    let run = run_rule(sys, &cfg.base, s_init, rng, &mut rule)?;
    Ok(single_run_result(sys, run, DetectorKind::Amgs { samples: cfg.samples }))
}

/// One d-sMGS run from `s_init`.
pub fn dsmgs_detect<R: Rng + ?Sized>(
    sys: &RealSystem,
    cfg: &DsmgsConfig,
    s_init: &[f64],
    rng: &mut R,
) -> Result<DetectionResult> {
    cfg.validate()?;
    check_init(sys, s_init)?;
    let mut rule = DsmgsRule {
        q: cfg.base.q,
        d: cfg.d,
    };
    let run = run_rule(sys, &cfg.base, s_init, rng, &mut rule)?;
    Ok(single_run_result(sys, run, DetectorKind::Dsmgs))
}

/// A detector with its configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Detector {
    Ml,
    Mmse,
    Mgs(MgsConfig),
    Amgs(AmgsConfig),
    Dsmgs(DsmgsConfig),
}

impl Detector {
    pub fn kind(&self) -> DetectorKind {
        match self {
            Detector::Ml => DetectorKind::Ml,
            Detector::Mmse => DetectorKind::Mmse,
            Detector::Mgs(_) => DetectorKind::Mgs,
            Detector::Amgs(c) => DetectorKind::Amgs { samples: c.samples },
            Detector::Dsmgs(_) => DetectorKind::Dsmgs,
        }
    }

    /// Iterative-detector tunables, if any.
    pub fn base_config(&self) -> Option<&MgsConfig> {
        match self {
            Detector::Ml | Detector::Mmse => None,
            Detector::Mgs(c) => Some(c),
            Detector::Amgs(c) => Some(&c.base),
            Detector::Dsmgs(c) => Some(&c.base),
        }
    }

    pub fn base_config_mut(&mut self) -> Option<&mut MgsConfig> {
        match self {
            Detector::Ml | Detector::Mmse => None,
            Detector::Mgs(c) => Some(c),
            Detector::Amgs(c) => Some(&mut c.base),
            Detector::Dsmgs(c) => Some(&mut c.base),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Detector::Ml | Detector::Mmse => Ok(()),
            Detector::Mgs(c) => c.validate(),
            Detector::Amgs(c) => c.validate(),
            Detector::Dsmgs(c) => c.validate(),
        }
    }

    /// Detects one channel use. Iterative detectors start from the sliced
    /// MMSE estimate and restart from uniform random vectors.
    pub fn detect<R: Rng + ?Sized>(&self, sys: &RealSystem, rng: &mut R) -> Result<DetectionResult> {
        self.validate()?;
        let kind = Some(self.kind());
        match self {
            Detector::Ml => ml_detect(sys),
            Detector::Mmse => mmse_detect(sys),
            Detector::Mgs(cfg) => {
                let init = first_init(sys, rng);
                let mut rule = mgs_rule(cfg);
                let res = with_restarts(sys, cfg, init, rng, |s0, rng| run_rule(sys, cfg, s0, rng, &mut rule))?;
                Ok(res.charged(sys, kind))
            }
            Detector::Amgs(cfg) => {
                let init = first_init(sys, rng);
                let mut rule = AmgsRule {
                    q: cfg.base.q,
                    samples: cfg.samples,
                };
                let res = with_restarts(sys, &cfg.base, init, rng, |s0, rng| {
                    run_rule(sys, &cfg.base, s0, rng, &mut rule)
                })?;
                Ok(res.charged(sys, kind))
            }
            Detector::Dsmgs(cfg) => {
                let init = first_init(sys, rng);
                let mut rule = DsmgsRule {
                    q: cfg.base.q,
                    d: cfg.d,
                };
                let res = with_restarts(sys, &cfg.base, init, rng, |s0, rng| {
                    run_rule(sys, &cfg.base, s0, rng, &mut rule)
                })?;
                Ok(res.charged(sys, kind))
            }
        }
    }
}
