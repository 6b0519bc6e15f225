//! Per-coordinate target functions: the tempered Gibbs conditional and the
//! minimum-cost simplification used by the averaged and neighborhood-limited
//! samplers.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::system::RealSystem;

use super::Temperature;

/// Squared residual norms `‖y - H s_(i,j)‖²` for every level `a_j` placed at
/// coordinate `i`, all other coordinates taken from `s_partial`.
pub fn candidate_costs(sys: &RealSystem, s_partial: &[f64], i: usize) -> Result<Vec<f64>> {
    check_coordinate(sys, s_partial, i)?;
    let mut base = s_partial.to_vec();
    base[i] = 0.0;
    let mut r: DVector<f64> = sys.y.clone();
    for (j, &v) in base.iter().enumerate() {
        if v != 0.0 {
            r.axpy(-v, &sys.h.column(j), 1.0);
        }
    }
    let col = sys.h.column(i);
    Ok(sys
        .alphabet()
        .levels()
        .iter()
        .map(|&a| (&r - col * a).norm_squared())
        .collect())
}

fn check_coordinate(sys: &RealSystem, s_partial: &[f64], i: usize) -> Result<()> {
    if s_partial.len() != sys.dims() {
        return Err(Error::Domain(format!(
            "estimate has {} entries, system has {} real dimensions",
            s_partial.len(),
            sys.dims()
        )));
    }
    if i >= sys.dims() {
        return Err(Error::Domain(format!("coordinate {i} out of range 0..{}", sys.dims())));
    }
    Ok(())
}

/// Writes `log p_j` for `p_j ∝ exp(-cost_j / (α² σ²))` into `out`.
///
/// The normaliser is a max-shifted log-sum-exp, so costs far beyond the
/// exponent range still give probabilities that sum to one.
pub(crate) fn log_probs_from_costs(costs: &[f64], alpha: f64, sigma2: f64, out: &mut [f64]) {
    let scale = 1.0 / (alpha * alpha * sigma2);
    let mut max = f64::NEG_INFINITY;
    for (o, &c) in out.iter_mut().zip(costs) {
        *o = -c * scale;
        max = max.max(*o);
    }
    let tail: f64 = out.iter().map(|&f| (f - max).exp()).sum();
    let log_tail = tail.ln();
    for o in out.iter_mut() {
        *o = (*o - max) - log_tail;
    }
}

/// Log-probabilities of each alphabet level at coordinate `i` under the
/// tempered Gibbs conditional. An infinite temperature gives the uniform law.
pub fn mgs_target_log_probs(
    sys: &RealSystem,
    s_partial: &[f64],
    i: usize,
    alpha: Temperature,
    sigma2: f64,
) -> Result<Vec<f64>> {
    check_coordinate(sys, s_partial, i)?;
    let size = sys.alphabet().len();
    match alpha {
        Temperature::Infinite => Ok(vec![-(size as f64).ln(); size]),
        Temperature::Finite(a) => {
            if !(a > 0.0) {
                return Err(Error::Config(format!("temperature must be positive, got {a}")));
            }
            if !(sigma2 > 0.0) {
                return Err(Error::DegenerateTemperature);
            }
            let costs = candidate_costs(sys, s_partial, i)?;
            let mut out = vec![0.0; size];
            log_probs_from_costs(&costs, a, sigma2, &mut out);
            Ok(out)
        }
    }
}

/// Index of the smallest entry; ties go to the lowest index.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = j;
        }
    }
    best
}

/// The level minimising the residual at coordinate `i`, lowest index on ties.
pub fn simplified_target(sys: &RealSystem, s_partial: &[f64], i: usize) -> Result<f64> {
    let costs = candidate_costs(sys, s_partial, i)?;
    Ok(sys.alphabet().level(argmin(&costs)))
}
