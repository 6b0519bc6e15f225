//! Exhaustive maximum-likelihood search and the MMSE linear detector.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::metrics::mmse_rops;
use crate::system::RealSystem;

use super::DetectionResult;

/// Largest search space, in bits, the exhaustive oracle will enumerate.
pub const ML_BIT_BUDGET: u32 = 24;

/// Exhaustive search over `A^{2K}`. Candidates are visited in lexicographic
/// index order and only strict improvements replace the incumbent, so ties
/// resolve to the lexicographically smallest vector.
pub fn ml_detect(sys: &RealSystem) -> Result<DetectionResult> {
    let alphabet = sys.alphabet();
    let dims = sys.dims();
    let size = alphabet.len();
    let bits = dims as u32 * alphabet.bits_per_pam_symbol();
    if bits > ML_BIT_BUDGET {
        return Err(Error::OracleTooLarge {
            bits,
            budget: ML_BIT_BUDGET,
        });
    }
    let last = dims - 1;
    let mut idx = vec![0usize; dims];
    let mut s: Vec<f64> = vec![alphabet.level(0); dims];
    let fresh = |s: &[f64]| -> DVector<f64> { &sys.y - &sys.h * DVector::from_column_slice(s) };
    let mut r = fresh(&s);
    let mut best_cost2 = r.norm_squared();
    let mut best = s.clone();
    loop {
        // odometer step, last coordinate fastest
        let mut pos = last;
        loop {
            if idx[pos] + 1 < size {
                break;
            }
            if pos == 0 {
                let best_cost = sys.cost2(&best).sqrt();
                return Ok(DetectionResult {
                    s_hat: best,
                    best_cost,
                    iterations_used: 0,
                    restarts_used: 0,
                    rops_charged: f64::NAN,
                });
            }
            pos -= 1;
        }
        idx[pos] += 1;
        s[pos] = alphabet.level(idx[pos]);
        for j in pos + 1..dims {
            idx[j] = 0;
            s[j] = alphabet.level(0);
        }
        if pos == last {
            r.axpy(-2.0, &sys.h.column(last), 1.0);
        } else {
            r = fresh(&s);
        }
        let c = r.norm_squared();
        if c < best_cost2 {
            best_cost2 = c;
            best.copy_from_slice(&s);
        }
    }
}

/// Unsliced MMSE estimate `(HᵀH + (σ²/2)/E_dim · I)⁻¹ Hᵀ y`.
pub fn mmse_estimate(sys: &RealSystem) -> Result<DVector<f64>> {
    let dims = sys.dims();
    let reg = (sys.sigma2 / 2.0) / sys.alphabet().per_dimension_energy();
    let ht = sys.h.transpose();
    let gram = &ht * &sys.h + DMatrix::<f64>::identity(dims, dims) * reg;
    let rhs = &ht * &sys.y;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Numeric("regularised Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&rhs))
}

/// MMSE estimate sliced onto the alphabet.
pub fn mmse_detect(sys: &RealSystem) -> Result<DetectionResult> {
    let alphabet = sys.alphabet();
    let s_hat = mmse_estimate(sys)?
        .iter()
        .map(|&v| alphabet.slice(v))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::Numeric("MMSE estimate is not finite".into()))?;
    Ok(DetectionResult {
        best_cost: sys.cost2(&s_hat).sqrt(),
        s_hat,
        iterations_used: 0,
        restarts_used: 0,
        rops_charged: mmse_rops(sys.k, sys.n),
    })
}
