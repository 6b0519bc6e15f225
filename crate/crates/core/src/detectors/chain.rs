//! Coordinate-wise sampling chains shared by MGS, aMGS and d-sMGS.
//!
//! The chain keeps the residual `r = y - H s` alongside the estimate.
//! Changing coordinate `i` by `δ` moves the residual by `-δ h_i`, so all
//! candidate costs for one coordinate follow from a single inner product:
//! `‖r - δ h_i‖² = ‖r‖² - 2δ h_iᵀr + δ²‖h_i‖²`.

use nalgebra::DVector;
use rand::Rng;

use crate::constellation::PamAlphabet;
use crate::error::Result;
use crate::system::{phi_from_cost2, RealSystem};

use super::stopping::{stalling_check, theta_s};
use super::target::{argmin, log_probs_from_costs};
use super::{MgsConfig, Temperature};

/// Sweeps between full residual recomputations.
const REFRESH_EVERY: u64 = 64;

/// Relative margin a cost must beat the incumbent by. Revisiting the best
/// vector through a different update path reproduces its cost only up to
/// rounding, which must not count as an improvement.
const IMPROVEMENT_MARGIN: f64 = 1e-12;

pub(crate) struct Chain<'a> {
    sys: &'a RealSystem,
    col_norm2: Vec<f64>,
    s: Vec<f64>,
    r: DVector<f64>,
    cost2: f64,
    costs: Vec<f64>,
    scratch: Vec<f64>,
    noisy: u64,
}

impl<'a> Chain<'a> {
    fn new(sys: &'a RealSystem, init: &[f64]) -> Self {
        let col_norm2 = sys.h.column_iter().map(|c| c.norm_squared()).collect();
        let size = sys.alphabet().len();
        let mut chain = Self {
            sys,
            col_norm2,
            s: init.to_vec(),
            r: sys.y.clone(),
            cost2: 0.0,
            costs: vec![0.0; size],
            scratch: vec![0.0; size],
            noisy: 0,
        };
        chain.refresh();
        chain
    }

    fn refresh(&mut self) {
        self.r.copy_from(&self.sys.y);
        for (j, &v) in self.s.iter().enumerate() {
            if v != 0.0 {
                self.r.axpy(-v, &self.sys.h.column(j), 1.0);
            }
        }
        self.cost2 = self.r.norm_squared();
    }

    fn alphabet(&self) -> &'a PamAlphabet {
        self.sys.alphabet()
    }

    /// Fills `self.costs` with the squared residual for each level at `i`.
    fn candidate_costs(&mut self, i: usize) {
        let g = self.sys.h.column(i).dot(&self.r);
        let n2 = self.col_norm2[i];
        let current = self.s[i];
        let base = self.cost2;
        let levels = self.sys.alphabet().levels();
        for (c, &a) in self.costs.iter_mut().zip(levels) {
            let delta = a - current;
            *c = base - 2.0 * delta * g + delta * delta * n2;
        }
    }

    /// Minimum-cost level index at `i`.
    fn xi(&mut self, i: usize) -> usize {
        self.candidate_costs(i);
        argmin(&self.costs)
    }

    fn assign(&mut self, i: usize, value: f64) {
        let delta = value - self.s[i];
        if delta != 0.0 {
            self.r.axpy(-delta, &self.sys.h.column(i), 1.0);
            self.s[i] = value;
            self.cost2 = self.r.norm_squared();
        }
    }
}

/// How a chain updates one coordinate.
pub(crate) trait CoordinateRule {
    fn update<R: Rng + ?Sized>(&mut self, chain: &mut Chain<'_>, i: usize, rng: &mut R);
}

fn sample_index(log_probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, &l) in log_probs.iter().enumerate() {
        acc += l.exp();
        if u < acc {
            return j;
        }
    }
    log_probs.len() - 1
}

/// Mixture of two tempered Gibbs conditionals.
pub(crate) struct MgsRule {
    pub q: f64,
    pub alpha1: Temperature,
    pub alpha2: Temperature,
}

impl MgsRule {
    fn draw<R: Rng + ?Sized>(chain: &mut Chain<'_>, i: usize, alpha: Temperature, rng: &mut R) -> usize {
        match alpha {
            Temperature::Infinite => rng.random_range(0..chain.alphabet().len()),
            Temperature::Finite(a) => {
                chain.candidate_costs(i);
                log_probs_from_costs(&chain.costs, a, chain.sys.sigma2, &mut chain.scratch);
                sample_index(&chain.scratch, rng.random::<f64>())
            }
        }
    }
}

impl CoordinateRule for MgsRule {
    fn update<R: Rng + ?Sized>(&mut self, chain: &mut Chain<'_>, i: usize, rng: &mut R) {
        let u: f64 = rng.random();
        let j = if u > self.q {
            Self::draw(chain, i, self.alpha1, rng)
        } else {
            chain.noisy += 1;
            Self::draw(chain, i, self.alpha2, rng)
        };
        let v = chain.alphabet().level(j);
        chain.assign(i, v);
    }
}

/// Mean of `samples` draws from the mixture of the minimum-cost level and a
/// uniform level.
pub(crate) struct AmgsRule {
    pub q: f64,
    pub samples: usize,
}

impl CoordinateRule for AmgsRule {
    fn update<R: Rng + ?Sized>(&mut self, chain: &mut Chain<'_>, i: usize, rng: &mut R) {
        let alphabet = chain.alphabet();
        let xi = alphabet.level(chain.xi(i));
        let mut sum = 0.0;
        for _ in 0..self.samples {
            let u: f64 = rng.random();
            sum += if u > self.q {
                xi
            } else {
                chain.noisy += 1;
                alphabet.level(rng.random_range(0..alphabet.len()))
            };
        }
        chain.assign(i, sum / self.samples as f64);
    }
}

/// Minimum-cost level, or with probability `q` a uniform level within index
/// distance `d` of the current one.
pub(crate) struct DsmgsRule {
    pub q: f64,
    pub d: usize,
}

impl CoordinateRule for DsmgsRule {
    fn update<R: Rng + ?Sized>(&mut self, chain: &mut Chain<'_>, i: usize, rng: &mut R) {
        let alphabet = chain.alphabet();
        let u: f64 = rng.random();
        let j = if u > self.q {
            chain.xi(i)
        } else {
            chain.noisy += 1;
            let current = alphabet.slice_index(chain.s[i]);
            let hood = alphabet
                .neighborhood_range(current, self.d)
                .expect("d validated by the config");
            rng.random_range(hood)
        };
        chain.assign(i, alphabet.level(j));
    }
}

/// Result of one chain run before slicing.
#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct ChainOutcome {
    /// Lowest-cost vector seen; may sit off the alphabet for averaged updates.
    pub best: Vec<f64>,
    pub iterations: u64,
    /// Best cost after each iteration, index 0 being the initial vector.
    pub history: Vec<f64>,
    /// Coordinate updates that took the noisy branch.
    pub noisy_updates: u64,
}

/// Runs sweeps until the stalling rule fires or the iteration cap is hit.
/// The best cost is tracked after every coordinate update.
pub(crate) fn run_chain<R, U>(
    sys: &RealSystem,
    cfg: &MgsConfig,
    init: &[f64],
    rng: &mut R,
    rule: &mut U,
) -> Result<ChainOutcome>
where
    R: Rng + ?Sized,
    U: CoordinateRule,
{
    let m = sys.alphabet().modulation_order();
    let mut chain = Chain::new(sys, init);
    let mut best = chain.s.clone();
    let mut best_cost2 = chain.cost2;
    let mut history = Vec::with_capacity(64);
    history.push(best_cost2);
    let mut t: u64 = 0;
    while t < cfg.max_iterations as u64 {
        if t > 0 && t.is_multiple_of(REFRESH_EVERY) {
            chain.refresh();
        }
        for i in 0..sys.dims() {
            rule.update(&mut chain, i, rng);
            if chain.cost2 < best_cost2 * (1.0 - IMPROVEMENT_MARGIN) {
                best_cost2 = chain.cost2;
                best.copy_from_slice(&chain.s);
            }
        }
        t += 1;
        history.push(best_cost2);
        let tu = t as usize;
        if history[tu] == history[tu - 1] {
            let phi = phi_from_cost2(best_cost2, sys.n, sys.sigma2)?;
            if stalling_check(&history, tu, theta_s(phi, m, cfg.c1, cfg.c_min)) {
                break;
            }
        }
    }
    Ok(ChainOutcome {
        best,
        iterations: t,
        history,
        noisy_updates: chain.noisy,
    })
}
