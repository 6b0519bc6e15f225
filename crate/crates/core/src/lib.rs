//! Mixed Gibbs sampling detectors for large-scale MIMO uplink.
//!
//! The crate covers the whole simulation chain: square QAM alphabets
//! ([`constellation`]), Rayleigh channel uses in real-valued form
//! ([`system`]), the detectors themselves ([`detectors`]), complexity and
//! tradeoff accounting ([`metrics`]), and a seeded Monte-Carlo engine
//! ([`harness`]) that is bit-reproducible across thread counts.
//!
//! The `parallel` feature (on by default) runs trials on the rayon pool;
//! without it the harness runs sequentially and gives identical results.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constellation;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod presets;
pub mod rng;
pub mod system;

pub use constellation::PamAlphabet;
pub use detectors::{AmgsConfig, DetectionResult, Detector, DsmgsConfig, MgsConfig, Temperature};
pub use error::{Error, Result};
pub use metrics::{SweepAxis, SweepPoint};
pub use system::RealSystem;
