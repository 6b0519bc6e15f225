//! Square M-QAM constellations seen through their real PAM alphabet.
//!
//! A square M-QAM symbol is a pair of PAM symbols drawn from the odd
//! integers `{-(L-1), ..., -1, +1, ..., L-1}` with `L = √M`. All detectors
//! work on this real alphabet after the real-valued decomposition of the
//! channel model. Bits are attached per real dimension with a binary
//! reflected Gray code over the ascending level order, so adjacent levels
//! differ in exactly one bit.

use crate::error::{Error, Result};

/// Supported square QAM orders.
pub const SUPPORTED_ORDERS: [u32; 4] = [4, 16, 64, 256];

/// The real PAM alphabet underlying a square M-QAM constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct PamAlphabet {
    modulation_order: u32,
    levels: Vec<f64>,
    per_dimension_energy: f64,
}

impl PamAlphabet {
    /// Builds the alphabet for an M-QAM constellation, levels in ascending order.
    pub fn new(modulation_order: u32) -> Result<Self> {
        if !SUPPORTED_ORDERS.contains(&modulation_order) {
            return Err(Error::Config(format!(
                "modulation order M={modulation_order} is not a supported square QAM order (4, 16, 64, 256)"
            )));
        }
        let size = (modulation_order as f64).sqrt().round() as usize;
        let levels: Vec<f64> = (0..size).map(|k| 2.0 * k as f64 - (size as f64 - 1.0)).collect();
        let per_dimension_energy = levels.iter().map(|a| a * a).sum::<f64>() / size as f64;
        Ok(Self {
            modulation_order,
            levels,
            per_dimension_energy,
        })
    }

    pub fn modulation_order(&self) -> u32 {
        self.modulation_order
    }

    /// Levels in ascending order.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of PAM levels, `|A| = √M`.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, index: usize) -> f64 {
        self.levels[index]
    }

    pub fn max_level(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    /// Mean squared level per real dimension, `(M-1)/3`.
    pub fn per_dimension_energy(&self) -> f64 {
        self.per_dimension_energy
    }

    /// Mean complex QAM symbol energy, `2(M-1)/3`.
    pub fn symbol_energy(&self) -> f64 {
        2.0 * self.per_dimension_energy
    }

    /// `log2(M)`.
    pub fn bits_per_qam_symbol(&self) -> u32 {
        self.modulation_order.trailing_zeros()
    }

    /// `log2(√M)`.
    pub fn bits_per_pam_symbol(&self) -> u32 {
        self.bits_per_qam_symbol() / 2
    }

    /// Position of `level` in the ascending level list.
    pub fn index_of(&self, level: f64) -> Result<usize> {
        let pos = (level + self.max_level()) / 2.0;
        let idx = pos.round();
        if !level.is_finite() || idx < 0.0 || idx >= self.len() as f64 || self.levels[idx as usize] != level {
            return Err(Error::Domain(format!(
                "{level} is not a level of the {}-QAM alphabet",
                self.modulation_order
            )));
        }
        Ok(idx as usize)
    }

    /// Symbol distance: index difference between two levels.
    pub fn kappa_d(&self, a: f64, b: f64) -> Result<usize> {
        Ok(self.index_of(a)?.abs_diff(self.index_of(b)?))
    }

    /// Levels within index distance `d` of `center`, the center included, ascending.
    pub fn neighborhood(&self, center: f64, d: usize) -> Result<Vec<f64>> {
        let range = self.neighborhood_range(self.index_of(center)?, d)?;
        Ok(self.levels[range].to_vec())
    }

    /// Index range of the neighborhood around the level at `center_index`.
    pub fn neighborhood_range(&self, center_index: usize, d: usize) -> Result<std::ops::Range<usize>> {
        if d < 1 {
            return Err(Error::Config("neighborhood distance d must be at least 1".into()));
        }
        let lo = center_index.saturating_sub(d);
        let hi = (center_index + d).min(self.len() - 1);
        Ok(lo..hi + 1)
    }

    /// Nearest level to `value`; exact midpoints resolve toward zero, and
    /// zero itself resolves to `+1`.
    pub fn slice(&self, value: f64) -> Result<f64> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("cannot slice non-finite value {value}")));
        }
        Ok(self.level(self.slice_index(value)))
    }

    /// Index of the nearest level. `value` must be finite.
    pub(crate) fn slice_index(&self, value: f64) -> usize {
        let max_index = self.len() - 1;
        // position on the index grid; levels sit at integer positions
        let pos = (value + self.max_level()) / 2.0;
        if pos <= 0.0 {
            return 0;
        }
        if pos >= max_index as f64 {
            return max_index;
        }
        let below = pos.floor();
        let frac = pos - below;
        let below = below as usize;
        // exact midpoints go toward zero
        if frac < 0.5 || (frac == 0.5 && value > 0.0) {
            below
        } else {
            below + 1
        }
    }

    /// Gray label of the level at `index`.
    pub fn gray_label(&self, index: usize) -> u32 {
        let k = index as u32;
        k ^ (k >> 1)
    }

    /// Bits of `level`, most significant first.
    pub fn pam_to_bits(&self, level: f64) -> Result<Vec<bool>> {
        let label = self.gray_label(self.index_of(level)?);
        let width = self.bits_per_pam_symbol();
        Ok((0..width).rev().map(|b| (label >> b) & 1 == 1).collect())
    }

    /// Level carrying `bits`, most significant first.
    pub fn bits_to_pam(&self, bits: &[bool]) -> Result<f64> {
        let width = self.bits_per_pam_symbol() as usize;
        if bits.len() != width {
            return Err(Error::Domain(format!(
                "expected {width} bits per PAM symbol for {}-QAM, got {}",
                self.modulation_order,
                bits.len()
            )));
        }
        let mut label = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        // inverse Gray
        let mut shift = label >> 1;
        while shift != 0 {
            label ^= shift;
            shift >>= 1;
        }
        Ok(self.level(label as usize))
    }

    /// Number of differing bits between the labels of two level indices.
    pub fn bit_errors(&self, a: usize, b: usize) -> u32 {
        (self.gray_label(a) ^ self.gray_label(b)).count_ones()
    }
}
