//! Per-symbol complexity in real operations (rops), effective iteration
//! counts, the BER-versus-complexity tradeoff metric, and sweep statistics.

use crate::error::{Error, Result};

/// Detector family, as far as the complexity model is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Ml,
    Mmse,
    Mgs,
    Amgs { samples: usize },
    Dsmgs,
}

/// Inputs of the per-symbol complexity formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityModel {
    pub kind: DetectorKind,
    /// Users.
    pub k: usize,
    /// Receive antennas.
    pub n: usize,
    /// PAM alphabet size `√M`.
    pub alphabet_size: usize,
    /// Per-symbol cost of producing the initial solution.
    pub c_init: f64,
}

/// Per-symbol rops of the MMSE detector.
pub fn mmse_rops(k: usize, n: usize) -> f64 {
    let (k, n) = (k as f64, n as f64);
    k * k / 6.0 + 1.5 * n * k + 1.5 * n + 5.0 / 6.0
}

impl ComplexityModel {
    /// Model for an MCMC detector initialised from the MMSE estimate.
    pub fn with_mmse_init(kind: DetectorKind, k: usize, n: usize, alphabet_size: usize) -> Self {
        Self {
            kind,
            k,
            n,
            alphabet_size,
            c_init: mmse_rops(k, n),
        }
    }

    /// Cost of one iteration, per symbol. Zero for the linear detector.
    pub fn per_iteration(&self) -> Result<f64> {
        let (k, n, a) = (self.k as f64, self.n as f64, self.alphabet_size as f64);
        match self.kind {
            DetectorKind::Dsmgs => Ok(16.0 * k * n + 16.0 * n + a * (16.0 * n + 2.0) + 24.0 / k),
            DetectorKind::Amgs { samples } => {
                Ok(16.0 * k * n + 16.0 * n + a * (16.0 * n + 2.0) + (2.0 * samples as f64 + 2.0) + 24.0 / k)
            }
            DetectorKind::Mgs => Ok(16.0 * k * n - 4.0 * n + a * (16.0 * n + 1450.0) + (10.0 * n + 24.0) / k),
            DetectorKind::Mmse => Ok(0.0),
            DetectorKind::Ml => Err(Error::Config("no per-symbol complexity model for exhaustive ML".into())),
        }
    }
}

/// Total per-symbol rops `C_T` at a measured effective number of iterations.
pub fn rops_per_symbol(model: &ComplexityModel, eni: f64) -> Result<f64> {
    if !(eni >= 0.0) {
        return Err(Error::Domain(format!(
            "effective number of iterations must be nonnegative, got {eni}"
        )));
    }
    match model.kind {
        DetectorKind::Mmse => Ok(mmse_rops(model.k, model.n)),
        _ => Ok(model.c_init + eni * model.per_iteration()?),
    }
}

/// Mean of the per-trial iteration counts.
pub fn eni(iteration_counts: &[u64]) -> Result<f64> {
    if iteration_counts.is_empty() {
        return Err(Error::Domain("ENI of an empty trial set".into()));
    }
    Ok(iteration_counts.iter().map(|&c| c as f64).sum::<f64>() / iteration_counts.len() as f64)
}

/// `-10 log10(BER) / (1e-8 C_T)`; higher is better.
///
/// A BER of zero has no finite value and saturates to `f64::INFINITY`.
pub fn chi_tradeoff(ber: f64, c_t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ber) {
        return Err(Error::Domain(format!("BER must lie in [0, 1], got {ber}")));
    }
    if !(c_t > 0.0) {
        return Err(Error::Domain(format!("complexity must be positive, got {c_t}")));
    }
    if ber == 0.0 {
        return Ok(f64::INFINITY);
    }
    // -0.0 at ber = 1
    Ok((-10.0 * ber.log10() / (1e-8 * c_t)).max(0.0))
}

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `errors` out of `total`.
pub fn wilson_interval(errors: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors >= total { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Half-width of the Wilson 95% interval.
pub fn wilson_half_width(errors: u64, total: u64) -> f64 {
    let (lo, hi) = wilson_interval(errors, total);
    (hi - lo) / 2.0
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Average received SNR in dB.
    SnrDb,
    /// System loading `K/N` at fixed `N`.
    Loading,
    /// Iteration-cap multiplier `a` in `I = a K √M`.
    IterationScale,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Loading => "loading",
            SweepAxis::IterationScale => "iterations",
        }
    }
}

/// Aggregated Monte-Carlo statistics of one detector at one axis value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub detector: String,
    pub k: usize,
    pub n: usize,
    pub m: u32,
    pub d: Option<usize>,
    pub l_e: Option<usize>,
    pub q: Option<f64>,
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub trials: u64,
    pub total_bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci95: f64,
    pub eni: f64,
    /// `NaN` for detectors without a complexity model.
    pub rops_per_symbol: f64,
    /// `NaN` when rops are unavailable, `+inf` at zero BER.
    pub chi: f64,
    pub seed: u64,
    /// Bit-error count the point aimed for.
    pub target_bit_errors: u64,
}

impl SweepPoint {
    /// Wilson 95% bounds on the BER.
    pub fn ber_interval(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.total_bits)
    }

    /// Fewer errors than targeted: the BER estimate is coarser than requested.
    pub fn under_resolved(&self) -> bool {
        self.bit_errors < self.target_bit_errors
    }

    /// True when the two BER intervals intersect.
    pub fn overlaps(&self, other: &SweepPoint) -> bool {
        let (a_lo, a_hi) = self.ber_interval();
        let (b_lo, b_hi) = other.ber_interval();
        a_lo <= b_hi && b_lo <= a_hi
    }
}
