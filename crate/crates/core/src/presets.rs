//! Named detector settings, resolved against a concrete `(K, N, M)`.
//!
//! | preset            | q              | I      | R_max | c1 | c2  | c_min |
//! |-------------------|----------------|--------|-------|----|-----|-------|
//! | `dsmgs-default`   | 1/2K           | 8K√M   | 20    | 10 | 1   | 10    |
//! | `mgs-mr-baseline` | 1/2K           | 8K√M   | 50    | 10 | 0.5 | 10    |
//! | `amgs-best`       | by `L_e` and N | 3000   | 5     | 10 | 1   | 10    |
//!
//! `amgs-best` mixing ratios:
//!
//! | N        | L_e = 1 | 2    | 4    | 8    |
//! |----------|---------|------|------|------|
//! | N <= 64  | 1/4K    | 1/4K | 1/3K | 1/2K |
//! | N > 64   | 1/4K    | 1/4K | 1/2K | 1/2K |

use crate::detectors::{AmgsConfig, Detector, DsmgsConfig, MgsConfig, Temperature};
use crate::error::{Error, Result};

/// Mixing ratio, either fixed or scaled with the number of users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingRatio {
    Fixed(f64),
    /// `q = 1 / (c K)`.
    InverseUsers(f64),
}

impl MixingRatio {
    pub fn resolve(self, k: usize) -> f64 {
        match self {
            MixingRatio::Fixed(q) => q,
            MixingRatio::InverseUsers(c) => 1.0 / (c * k as f64),
        }
    }
}

impl std::fmt::Display for MixingRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MixingRatio::Fixed(q) => write!(f, "{q}"),
            MixingRatio::InverseUsers(c) => write!(f, "1/{c}K"),
        }
    }
}

/// Iteration cap per run, either fixed or `a K √M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IterationLimit {
    Fixed(u32),
    PerUser(f64),
}

impl IterationLimit {
    pub fn resolve(self, k: usize, m: u32) -> u32 {
        match self {
            IterationLimit::Fixed(i) => i,
            IterationLimit::PerUser(a) => crate::detectors::iteration_cap(a, k, m),
        }
    }
}

impl std::fmt::Display for IterationLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IterationLimit::Fixed(i) => write!(f, "{i}"),
            IterationLimit::PerUser(a) => write!(f, "{a}K√M"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorFamily {
    Ml,
    Mmse,
    Mgs,
    Amgs { samples: usize },
    Dsmgs { d: usize },
}

/// A detector setting that still depends on the system size.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    /// Label used in reports.
    pub name: String,
    pub family: DetectorFamily,
    pub q: MixingRatio,
    pub alpha1: Temperature,
    pub alpha2: Temperature,
    pub iterations: IterationLimit,
    pub max_restarts: u32,
    pub c1: f64,
    pub c2: f64,
    pub c_min: u32,
}

impl DetectorSpec {
    /// Default tunables for `family` under its usual report label.
    pub fn new(family: DetectorFamily) -> Self {
        let name = match family {
            DetectorFamily::Ml => "ML".to_string(),
            DetectorFamily::Mmse => "MMSE".to_string(),
            DetectorFamily::Mgs => "MGS-MR".to_string(),
            DetectorFamily::Amgs { samples } => format!("aMGS-MR(L_e={samples})"),
            DetectorFamily::Dsmgs { d } => format!("{d}-sMGS-MR"),
        };
        Self {
            name,
            family,
            q: MixingRatio::InverseUsers(2.0),
            alpha1: Temperature::Finite(1.0),
            alpha2: Temperature::Infinite,
            iterations: IterationLimit::PerUser(8.0),
            max_restarts: 20,
            c1: 10.0,
            c2: 1.0,
            c_min: 10,
        }
    }

    pub fn ml() -> Self {
        Self::new(DetectorFamily::Ml)
    }

    pub fn mmse() -> Self {
        Self::new(DetectorFamily::Mmse)
    }

    /// `d`-sMGS-MR with the default tunables.
    pub fn dsmgs_default(d: usize) -> Self {
        Self::new(DetectorFamily::Dsmgs { d })
    }

    /// MGS-MR reference: `R_max = 50`, `c2 = 0.5`.
    pub fn mgs_mr_baseline() -> Self {
        Self {
            max_restarts: 50,
            c2: 0.5,
            ..Self::new(DetectorFamily::Mgs)
        }
    }

    /// aMGS-MR with the best mixing ratio for `L_e` samples and `N` antennas.
    pub fn amgs_best(samples: usize, n: usize) -> Result<Self> {
        Ok(Self {
            q: amgs_best_mixing(samples, n)?,
            iterations: IterationLimit::Fixed(3000),
            max_restarts: 5,
            ..Self::new(DetectorFamily::Amgs { samples })
        })
    }

    /// Concrete detector for `K` users and M-QAM.
    pub fn resolve(&self, k: usize, m: u32) -> Result<Detector> {
        let base = MgsConfig {
            q: self.q.resolve(k),
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            max_iterations: self.iterations.resolve(k, m),
            max_restarts: self.max_restarts,
            c1: self.c1,
            c2: self.c2,
            c_min: self.c_min,
        };
        let det = match self.family {
            DetectorFamily::Ml => Detector::Ml,
            DetectorFamily::Mmse => Detector::Mmse,
            DetectorFamily::Mgs => Detector::Mgs(base),
            DetectorFamily::Amgs { samples } => Detector::Amgs(AmgsConfig { base, samples }),
            DetectorFamily::Dsmgs { d } => Detector::Dsmgs(DsmgsConfig { base, d }),
        };
        det.validate()?;
        Ok(det)
    }

    pub fn is_iterative(&self) -> bool {
        !matches!(self.family, DetectorFamily::Ml | DetectorFamily::Mmse)
    }
}

/// Best aMGS mixing ratio for `L_e ∈ {1, 2, 4, 8}`.
pub fn amgs_best_mixing(samples: usize, n: usize) -> Result<MixingRatio> {
    let c = match (samples, n <= 64) {
        (1 | 2, _) => 4.0,
        (4, true) => 3.0,
        (4, false) | (8, _) => 2.0,
        _ => {
            return Err(Error::Config(format!(
                "no tuned aMGS mixing ratio for L_e={samples}; choose 1, 2, 4 or 8 or set q explicitly"
            )))
        }
    };
    Ok(MixingRatio::InverseUsers(c))
}

/// Neighborhood distances explored by the default d-sMGS preset.
pub const DSMGS_DISTANCES: [usize; 3] = [1, 2, 3];

/// Sample counts with a tuned aMGS mixing ratio.
pub const AMGS_SAMPLES: [usize; 4] = [1, 2, 4, 8];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amgs_table() {
        assert_eq!(amgs_best_mixing(2, 128).unwrap(), MixingRatio::InverseUsers(4.0));
        assert_eq!(amgs_best_mixing(4, 64).unwrap(), MixingRatio::InverseUsers(3.0));
        assert_eq!(amgs_best_mixing(4, 65).unwrap(), MixingRatio::InverseUsers(2.0));
        for n in [16, 64, 128] {
            assert_eq!(amgs_best_mixing(8, n).unwrap(), MixingRatio::InverseUsers(2.0));
            assert_eq!(amgs_best_mixing(1, n).unwrap(), MixingRatio::InverseUsers(4.0));
        }
        assert!(amgs_best_mixing(3, 64).is_err());
    }

    #[test]
    fn resolved_presets() {
        let Detector::Dsmgs(c) = DetectorSpec::dsmgs_default(2).resolve(16, 64).unwrap() else {
            panic!()
        };
        assert_eq!(c.d, 2);
        assert_eq!(c.base, MgsConfig::table2(16, 64));
        let Detector::Mgs(c) = DetectorSpec::mgs_mr_baseline().resolve(16, 64).unwrap() else {
            panic!()
        };
        assert_eq!(c, MgsConfig::mgs_mr_baseline(16, 64));
        let Detector::Amgs(c) = DetectorSpec::amgs_best(2, 128).unwrap().resolve(96, 64).unwrap() else {
            panic!()
        };
        assert_eq!(
            (c.samples, c.base.q, c.base.max_iterations, c.base.max_restarts),
            (2, 1.0 / 384.0, 3000, 5)
        );
        assert!(DetectorSpec::dsmgs_default(0).resolve(4, 16).is_err());
    }
}
