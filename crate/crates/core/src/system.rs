//! Flat Rayleigh uplink channel uses and their real-valued decomposition.
//!
//! Noise convention: `σ²` is the complex noise variance per receive antenna,
//! split as `σ²/2` per real dimension, so `‖η‖²` over the `2N` real entries
//! has mean `Nσ²`. The SNR is `γ = K·E_s/σ²` with `E_s = 2(M-1)/3` the mean
//! energy of the integer-level QAM constellation.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::constellation::PamAlphabet;
use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// One complex channel use before decomposition.
#[derive(Debug, Clone)]
pub struct ComplexSystemDraw {
    /// `N x K` channel matrix.
    pub h_c: DMatrix<Complex64>,
    /// `K` transmitted QAM symbols.
    pub s_c: DVector<Complex64>,
    /// `N` noise samples.
    pub eta_c: DVector<Complex64>,
    pub sigma2: f64,
    pub snr_db: f64,
}

impl ComplexSystemDraw {
    /// `H_c s_c + η_c` evaluated in complex arithmetic.
    pub fn received(&self) -> DVector<Complex64> {
        &self.h_c * &self.s_c + &self.eta_c
    }
}

/// Real-valued system `y = H s + η` with `H` of size `2N x 2K`.
#[derive(Debug, Clone)]
pub struct RealSystem {
    pub y: DVector<f64>,
    pub h: DMatrix<f64>,
    /// Transmitted PAM vector.
    pub s: DVector<f64>,
    /// Complex noise variance per receive antenna.
    pub sigma2: f64,
    pub k: usize,
    pub n: usize,
    alphabet: PamAlphabet,
    s_index: Vec<usize>,
}

impl RealSystem {
    /// Assembles a system from real-valued parts, checking dimensions and
    /// that `s` lies in the alphabet.
    pub fn from_parts(
        y: DVector<f64>,
        h: DMatrix<f64>,
        s: DVector<f64>,
        sigma2: f64,
        alphabet: PamAlphabet,
    ) -> Result<Self> {
        if !h.nrows().is_multiple_of(2) || !h.ncols().is_multiple_of(2) || h.nrows() == 0 || h.ncols() == 0 {
            return Err(Error::Domain(format!(
                "real channel must be 2N x 2K with N, K >= 1, got {} x {}",
                h.nrows(),
                h.ncols()
            )));
        }
        if y.len() != h.nrows() || s.len() != h.ncols() {
            return Err(Error::Domain(format!(
                "dimension mismatch: H is {} x {}, y has {}, s has {}",
                h.nrows(),
                h.ncols(),
                y.len(),
                s.len()
            )));
        }
        if !(sigma2 >= 0.0) {
            return Err(Error::Domain(format!(
                "noise variance must be nonnegative, got {sigma2}"
            )));
        }
        let s_index = s.iter().map(|&v| alphabet.index_of(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k: h.ncols() / 2,
            n: h.nrows() / 2,
            y,
            h,
            s,
            sigma2,
            alphabet,
            s_index,
        })
    }

    pub fn alphabet(&self) -> &PamAlphabet {
        &self.alphabet
    }

    /// Alphabet indices of the transmitted vector.
    pub fn symbol_indices(&self) -> &[usize] {
        &self.s_index
    }

    /// Number of real dimensions, `2K`.
    pub fn dims(&self) -> usize {
        2 * self.k
    }

    /// `‖y - H s_hat‖²`.
    pub fn cost2(&self, s_hat: &[f64]) -> f64 {
        let mut r = self.y.clone();
        for (j, &v) in s_hat.iter().enumerate() {
            if v != 0.0 {
                r.axpy(-v, &self.h.column(j), 1.0);
            }
        }
        r.norm_squared()
    }

    /// Quality metric `(‖y - H s_hat‖² - Nσ²) / (√N σ²)`.
    pub fn phi(&self, s_hat: &[f64]) -> Result<f64> {
        phi_from_cost2(self.cost2(s_hat), self.n, self.sigma2)
    }
}

/// Quality metric from a precomputed squared residual norm.
pub fn phi_from_cost2(cost2: f64, n: usize, sigma2: f64) -> Result<f64> {
    if sigma2 <= 0.0 {
        return Err(Error::DegenerateTemperature);
    }
    let n = n as f64;
    Ok((cost2 - n * sigma2) / (n.sqrt() * sigma2))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// `N x K` matrix of i.i.d. `CN(0, 1)` entries.
pub fn draw_channel<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<DMatrix<Complex64>> {
    if k == 0 || n == 0 {
        return Err(Error::Config(format!(
            "antenna counts must be positive, got K={k}, N={n}"
        )));
    }
    Ok(DMatrix::from_fn(n, k, |_, _| complex_gaussian(rng, 1.0)))
}

/// Complex noise variance per receive antenna for a target SNR in dB.
pub fn noise_variance_for_snr(snr_db: f64, k: usize, alphabet: &PamAlphabet) -> f64 {
    let gamma = 10f64.powf(snr_db / 10.0);
    k as f64 * alphabet.symbol_energy() / gamma
}

/// Real-valued decomposition of a complex channel use.
pub fn realify(draw: &ComplexSystemDraw, alphabet: &PamAlphabet) -> Result<RealSystem> {
    let (n, k) = draw.h_c.shape();
    if draw.s_c.len() != k || draw.eta_c.len() != n {
        return Err(Error::Domain(format!(
            "dimension mismatch: H_c is {n} x {k}, s_c has {}, eta_c has {}",
            draw.s_c.len(),
            draw.eta_c.len()
        )));
    }
    let h = DMatrix::from_fn(2 * n, 2 * k, |i, j| {
        let z = draw.h_c[(i % n, j % k)];
        match (i < n, j < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let s = DVector::from_fn(2 * k, |j, _| if j < k { draw.s_c[j].re } else { draw.s_c[j - k].im });
    let eta = DVector::from_fn(
        2 * n,
        |i, _| if i < n { draw.eta_c[i].re } else { draw.eta_c[i - n].im },
    );
    let y = &h * &s + eta;
    RealSystem::from_parts(y, h, s, draw.sigma2, alphabet.clone())
}

/// Draws symbols, channel, and noise for one channel use.
pub fn draw_complex<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    alphabet: &PamAlphabet,
    snr_db: f64,
    rng: &mut R,
) -> Result<ComplexSystemDraw> {
    if !snr_db.is_finite() {
        return Err(Error::Config(format!("SNR must be finite, got {snr_db}")));
    }
    let h_c = draw_channel(k, n, rng)?;
    let size = alphabet.len();
    let s_c = DVector::from_fn(k, |_, _| {
        let re = alphabet.level(rng.random_range(0..size));
        let im = alphabet.level(rng.random_range(0..size));
        Complex64::new(re, im)
    });
    let sigma2 = noise_variance_for_snr(snr_db, k, alphabet);
    let eta_c = DVector::from_fn(n, |_, _| complex_gaussian(rng, sigma2));
    Ok(ComplexSystemDraw {
        h_c,
        s_c,
        eta_c,
        sigma2,
        snr_db,
    })
}

/// One realified channel use at the target SNR.
pub fn draw_trial<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    alphabet: &PamAlphabet,
    snr_db: f64,
    rng: &mut R,
) -> Result<RealSystem> {
    realify(&draw_complex(k, n, alphabet, snr_db, rng)?, alphabet)
}
