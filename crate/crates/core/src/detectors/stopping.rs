//! Stalling and restart limits driven by the quality metric
//! `φ = (‖y - H s‖² - Nσ²) / (√N σ²)`, and the multiple-restarts driver.

use rand::Rng;

use crate::error::Result;
use crate::system::{phi_from_cost2, RealSystem};

use super::{random_init, DetectionResult, MgsConfig};

/// Stalling window `⌈max(c_min, c1 log2(M) e^φ)⌉`, saturating.
pub fn theta_s(phi: f64, modulation_order: u32, c1: f64, c_min: u32) -> u64 {
    let stall = c1 * (modulation_order as f64).log2() * phi.exp();
    let v = (c_min as f64).max(stall).ceil();
    // `as` saturates, and NaN maps to 0
    (v as u64).max(c_min as u64)
}

/// Allowed number of runs `⌈max(0, c2 log2(M) φ)⌉ + 1`, saturating.
pub fn theta_r(phi: f64, modulation_order: u32, c2: f64) -> u64 {
    let v = (c2 * (modulation_order as f64).log2() * phi).max(0.0).ceil();
    (v as u64).saturating_add(1)
}

/// Whether iteration `t` ends the run: the best cost `b_t` repeats `b_{t-1}`,
/// the window `m` fits (`m < t`), and `b_t` equals `b_{t-m}`.
///
/// `cost_history[t]` is the best cost after iteration `t`; index 0 holds the
/// cost of the initial vector.
pub fn stalling_check(cost_history: &[f64], t: usize, theta_s_value: u64) -> bool {
    if t == 0 || t >= cost_history.len() {
        return false;
    }
    let m = theta_s_value;
    cost_history[t] == cost_history[t - 1] && m < t as u64 && cost_history[t] == cost_history[t - m as usize]
}

/// One run of an iterative detector.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Best estimate of the run, inside the alphabet.
    pub s_hat: Vec<f64>,
    /// `‖y - H s_hat‖²`.
    pub cost2: f64,
    /// Iterations spent.
    pub iterations: u64,
}

/// Runs `run` from `first_init`, then from fresh uniform random vectors while
/// the run count is below both `Θ_r(φ(best))` and `R_max`. Returns the
/// lowest-cost estimate over all runs with iterations summed across runs.
///
/// `rops_charged` of the result is left at zero for the caller to fill in.
pub fn with_restarts<R, F>(
    sys: &RealSystem,
    cfg: &MgsConfig,
    first_init: Vec<f64>,
    rng: &mut R,
    mut run: F,
) -> Result<DetectionResult>
where
    R: Rng + ?Sized,
    F: FnMut(&[f64], &mut R) -> Result<RunOutcome>,
{
    let m = sys.alphabet().modulation_order();
    let mut best = run(&first_init, rng)?;
    let mut iterations = best.iterations;
    let mut runs = 1u32;
    loop {
        let phi = phi_from_cost2(best.cost2, sys.n, sys.sigma2)?;
        if runs as u64 >= theta_r(phi, m, cfg.c2) || runs >= cfg.max_restarts {
            break;
        }
        let init = random_init(sys, rng);
        let out = run(&init, rng)?;
        runs += 1;
        iterations += out.iterations;
        if out.cost2 < best.cost2 {
            best = out;
        }
    }
    Ok(DetectionResult {
        best_cost: sys.cost2(&best.s_hat).sqrt(),
        s_hat: best.s_hat,
        iterations_used: iterations,
        restarts_used: runs,
        rops_charged: 0.0,
    })
}
