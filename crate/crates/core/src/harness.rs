//! Seeded Monte-Carlo engine.
//!
//! Each trial draws its channel use from the stream addressed by
//! `(master seed, axis index, trial)` and runs the detector on a second
//! stream keyed by the detector as well. All detectors at one axis value
//! therefore see the same channel uses. Trials are evaluated in chunks,
//! possibly in parallel, and folded in trial order; a point stops at the
//! first trial where the bit-error target is met, so results do not depend
//! on the chunk size or the number of workers.

use std::ops::Range;

use crate::constellation::PamAlphabet;
use crate::detectors::{DetectionResult, Detector};
use crate::error::{Error, Result};
use crate::metrics::{self, chi_tradeoff, rops_per_symbol, ComplexityModel, SweepAxis, SweepPoint};
use crate::presets::{DetectorFamily, DetectorSpec, IterationLimit};
use crate::rng::derive_stream;
use crate::system::{draw_trial, RealSystem};

/// When a point has collected enough trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    /// Stop once this many bit errors are seen.
    pub min_bit_errors: u64,
    /// Hard cap on trials.
    pub max_trials: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 200,
            max_trials: 1_000_000,
        }
    }
}

/// A full experiment: one system family, several detectors, one swept axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub k: usize,
    pub n: usize,
    pub m: u32,
    pub detectors: Vec<DetectorSpec>,
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    /// SNR used when the axis is not the SNR.
    pub snr_db: f64,
    pub stop: StopRule,
    pub master_seed: u64,
}

/// Sequential or rayon-backed trial evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    fn chunk_size(self) -> u64 {
        match self {
            Execution::Sequential => 16,
            #[cfg(feature = "parallel")]
            Execution::Parallel => (4 * rayon::current_num_threads() as u64).max(16),
        }
    }
}

/// Evaluates `f` on every trial index in `range`, results in index order.
pub fn map_trials<T, F>(range: Range<u64>, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        Execution::Sequential => range.map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().map(f).collect()
        }
    }
}

/// System and detector for one axis value.
#[derive(Debug, Clone)]
pub struct PointSetup {
    pub k: usize,
    pub n: usize,
    pub snr_db: f64,
    pub detector: Detector,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        PamAlphabet::new(self.m)?;
        if self.k == 0 || self.n == 0 {
            return Err(Error::Config(format!(
                "antenna counts must be positive, got K={}, N={}",
                self.k, self.n
            )));
        }
        if self.k > self.n {
            return Err(Error::Config(format!(
                "K={} exceeds N={}: loading above 1 is unsupported",
                self.k, self.n
            )));
        }
        if self.stop.max_trials == 0 {
            return Err(Error::Config("max_trials must be positive".into()));
        }
        for (a, &v) in self.axis_values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Config(format!("axis value {v} is not finite")));
            }
            for d in 0..self.detectors.len() {
                self.setup(d, a)?;
            }
        }
        if self.axis != SweepAxis::SnrDb && !self.snr_db.is_finite() {
            return Err(Error::Config(format!("SNR must be finite, got {}", self.snr_db)));
        }
        Ok(())
    }

    /// Resolves detector `detector_index` at axis value `axis_index`.
    pub fn setup(&self, detector_index: usize, axis_index: usize) -> Result<PointSetup> {
        let value = *self
            .axis_values
            .get(axis_index)
            .ok_or_else(|| Error::Config(format!("axis index {axis_index} out of range")))?;
        let spec = self
            .detectors
            .get(detector_index)
            .ok_or_else(|| Error::Config(format!("detector index {detector_index} out of range")))?;
        let (k, snr_db, mut spec) = match self.axis {
            SweepAxis::SnrDb => (self.k, value, spec.clone()),
            SweepAxis::Loading => {
                if !(value > 0.0 && value <= 1.0) {
                    return Err(Error::Config(format!("loading {value} must lie in (0, 1]")));
                }
                let k = (value * self.n as f64).round() as usize;
                if k == 0 {
                    return Err(Error::Config(format!(
                        "loading {value} leaves no users at N={}",
                        self.n
                    )));
                }
                (k, self.snr_db, spec.clone())
            }
            SweepAxis::IterationScale => {
                if !(value > 0.0) {
                    return Err(Error::Config(format!("iteration scale {value} must be positive")));
                }
                let mut spec = spec.clone();
                spec.iterations = IterationLimit::PerUser(value);
                (self.k, self.snr_db, spec)
            }
        };
        spec.name.clone_from(&self.detectors[detector_index].name);
        let detector = spec.resolve(k, self.m)?;
        Ok(PointSetup {
            k,
            n: self.n,
            snr_db,
            detector,
        })
    }
}

/// Stream index of detector randomness, disjoint from the channel streams.
fn detector_stream_index(detector_index: usize, axis_index: usize) -> u64 {
    ((detector_index as u64 + 1) << 32) | axis_index as u64
}

/// Channel use of trial `trial` at axis value `axis_index`.
pub fn trial_system(
    spec: &ExperimentSpec,
    setup: &PointSetup,
    alphabet: &PamAlphabet,
    axis_index: usize,
    trial: u64,
) -> Result<RealSystem> {
    let mut rng = derive_stream(spec.master_seed, axis_index as u64, trial);
    draw_trial(setup.k, setup.n, alphabet, setup.snr_db, &mut rng)
}

/// Detection on trial `trial` of a point.
pub fn trial_detection(
    spec: &ExperimentSpec,
    setup: &PointSetup,
    sys: &RealSystem,
    detector_index: usize,
    axis_index: usize,
    trial: u64,
) -> Result<DetectionResult> {
    let mut rng = derive_stream(
        spec.master_seed,
        detector_stream_index(detector_index, axis_index),
        trial,
    );
    setup.detector.detect(sys, &mut rng)
}

/// Bit errors between the transmitted vector and an estimate.
pub fn count_bit_errors(sys: &RealSystem, s_hat: &[f64]) -> u64 {
    let alphabet = sys.alphabet();
    sys.symbol_indices()
        .iter()
        .zip(s_hat)
        .map(|(&t, &v)| alphabet.bit_errors(t, alphabet.slice_index(v)) as u64)
        .sum()
}

#[derive(Debug, Clone, Copy)]
struct TrialStats {
    bit_errors: u64,
    iterations: u64,
}

/// Monte-Carlo statistics of one detector at one axis value.
pub fn run_point(spec: &ExperimentSpec, detector_index: usize, axis_index: usize) -> Result<SweepPoint> {
    run_point_with(spec, detector_index, axis_index, Execution::default())
}

pub fn run_point_with(
    spec: &ExperimentSpec,
    detector_index: usize,
    axis_index: usize,
    execution: Execution,
) -> Result<SweepPoint> {
    let setup = spec.setup(detector_index, axis_index)?;
    let alphabet = PamAlphabet::new(spec.m)?;
    let bits_per_trial = setup.k as u64 * alphabet.bits_per_qam_symbol() as u64;

    let one_trial = |t: u64| -> Result<TrialStats> {
        let sys = trial_system(spec, &setup, &alphabet, axis_index, t)?;
        let res = trial_detection(spec, &setup, &sys, detector_index, axis_index, t)?;
        Ok(TrialStats {
            bit_errors: count_bit_errors(&sys, &res.s_hat),
            iterations: res.iterations_used,
        })
    };

    let chunk = execution.chunk_size();
    let mut trials = 0u64;
    let mut bit_errors = 0u64;
    let mut iterations = Vec::new();
    'outer: while trials < spec.stop.max_trials && bit_errors < spec.stop.min_bit_errors {
        let end = (trials + chunk).min(spec.stop.max_trials);
        for stats in map_trials(trials..end, execution, one_trial) {
            let stats = stats?;
            trials += 1;
            bit_errors += stats.bit_errors;
            iterations.push(stats.iterations);
            if bit_errors >= spec.stop.min_bit_errors {
                break 'outer;
            }
        }
    }

    let total_bits = trials * bits_per_trial;
    let ber = bit_errors as f64 / total_bits as f64;
    let eni = metrics::eni(&iterations)?;
    let model = ComplexityModel::with_mmse_init(setup.detector.kind(), setup.k, setup.n, alphabet.len());
    let rops = rops_per_symbol(&model, eni).unwrap_or(f64::NAN);
    let chi = if rops.is_nan() {
        f64::NAN
    } else {
        chi_tradeoff(ber, rops)?
    };
    let dspec = &spec.detectors[detector_index];
    Ok(SweepPoint {
        detector: dspec.name.clone(),
        k: setup.k,
        n: setup.n,
        m: spec.m,
        d: match dspec.family {
            DetectorFamily::Dsmgs { d } => Some(d),
            _ => None,
        },
        l_e: match dspec.family {
            DetectorFamily::Amgs { samples } => Some(samples),
            _ => None,
        },
        q: setup.detector.base_config().map(|c| c.q),
        axis: spec.axis,
        axis_value: spec.axis_values[axis_index],
        trials,
        total_bits,
        bit_errors,
        ber,
        ber_ci95: metrics::wilson_half_width(bit_errors, total_bits),
        eni,
        rops_per_symbol: rops,
        chi,
        seed: spec.master_seed,
        target_bit_errors: spec.stop.min_bit_errors,
    })
}

/// Every `(detector, axis value)` point, detector-major.
pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<SweepPoint>> {
    sweep_with(spec, Execution::default())
}

pub fn sweep_with(spec: &ExperimentSpec, execution: Execution) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.detectors.len() * spec.axis_values.len());
    for d in 0..spec.detectors.len() {
        for a in 0..spec.axis_values.len() {
            points.push(run_point_with(spec, d, a, execution)?);
        }
    }
    Ok(points)
}
