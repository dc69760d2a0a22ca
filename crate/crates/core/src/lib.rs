//! Constructive-interference precoding for massive-MIMO downlink with 1-bit
//! DACs.
//!
//! The crate covers the full transmit chain of a multi-user downlink whose
//! base station drives every antenna through a pair of 1-bit DACs:
//!
//! - [`modulation`]: M-PSK constellations, sector detection and the
//!   threshold-basis decomposition of each point.
//! - [`channel`]: Rayleigh channels and the imperfect-CSI model.
//! - [`quantizer`]: the 1-bit quantizer and alphabet checks.
//! - [`linear_precoders`]: ZF, quantized ZF and the closed-form CI-linear
//!   beamformer.
//! - [`lp`]: a dense interior-point LP solver.
//! - [`ci_mapping`]: the relaxed constructive-interference LP followed by
//!   per-component normalization.
//! - [`symbol_scaling`]: the low-complexity three-stage sign allocation.
//! - [`complexity`]: analytical flop counts.
//! - [`sim`]: Monte Carlo BER sweeps, the relaxation-tightness experiment
//!   and an exhaustive-search oracle.
//! - [`cli`]: configuration and the command-line front end.

pub mod channel;
pub mod ci_mapping;
pub mod cli;
pub mod complexity;
pub mod error;
pub mod linear_precoders;
pub mod lp;
pub mod modulation;
pub mod quantizer;
pub mod sim;
pub mod symbol_scaling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
