//! Zero-forcing and the closed-form constructive-interference linear
//! beamformer, with and without 1-bit quantization.
//!
//! In the large-array regime the CI-optimal linear beamformer is a strict
//! phase rotation, `W* = sqrt(Nt p0 / K^3) H^H (H H^H)^-1 s s^H`. Because
//! `W* s` is a positive multiple of the ZF-precoded vector and the 1-bit
//! quantizer only keeps signs, `Q(W* s)` coincides with quantized ZF.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::quantizer::{quantize, OneBitVector};

/// Gram matrices with a larger condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

fn check_symbols(h: &ChannelMatrix, s: &[Complex64]) -> Result<()> {
    if s.len() != h.users() {
        return Err(Error::Dimension(format!("{} symbols for {} users", s.len(), h.users())));
    }
    Ok(())
}

/// Solves `(H H^H) u = s` and returns `H^H u`.
pub fn zf_direction(h: &ChannelMatrix, s: &[Complex64]) -> Result<DVector<Complex64>> {
    check_symbols(h, s)?;
    let gram = h.matrix() * h.adjoint();
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(Error::SingularChannel(cond));
    }
    let chol = gram.cholesky().ok_or(Error::SingularChannel(cond))?;
    let u = chol.solve(&DVector::from_column_slice(s));
    Ok(h.adjoint() * u)
}

/// Unquantized ZF, scaled to unit Frobenius norm.
pub fn zf_precode_fd(h: &ChannelMatrix, s: &[Complex64]) -> Result<Vec<Complex64>> {
    let x = zf_direction(h, s)?;
    let norm = x.norm();
    Ok(x.iter().map(|v| v / norm).collect())
}

/// `W* = sqrt(Nt p0 / K^3) H^H (H H^H)^-1 s s^H`, an `Nt x K` matrix.
pub fn ci_linear_matrix(h: &ChannelMatrix, s: &[Complex64], p0: f64) -> Result<DMatrix<Complex64>> {
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(Error::InvalidParameter(format!("p0 must be positive, got {p0}")));
    }
    let k = h.users() as f64;
    let nt = h.antennas() as f64;
    let scale = (nt * p0 / (k * k * k)).sqrt();
    let dir = zf_direction(h, s)?;
    let s_row = DVector::from_column_slice(s).adjoint();
    Ok(dir * s_row * Complex64::new(scale, 0.0))
}

/// `Q(W* s)`: the quantized CI-linear transmit vector.
pub fn ci_linear_transmit(h: &ChannelMatrix, s: &[Complex64], p0: f64) -> Result<OneBitVector> {
    let w = ci_linear_matrix(h, s, p0)?;
    let x = w * DVector::from_column_slice(s);
    Ok(quantize(x.as_slice()))
}

/// `Q(H^H (H H^H)^-1 s)`.
pub fn quantized_zf(h: &ChannelMatrix, s: &[Complex64]) -> Result<OneBitVector> {
    let x = zf_direction(h, s)?;
    Ok(quantize(x.as_slice()))
}
