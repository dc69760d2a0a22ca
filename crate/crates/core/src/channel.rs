//! Rayleigh flat-fading channels and the imperfect-CSI error model.

use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A `K x Nt` complex channel, one row per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix(DMatrix<Complex64>);

impl ChannelMatrix {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() > m.ncols() {
            return Err(Error::Dimension(format!(
                "channel must satisfy 1 <= K <= Nt, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    /// Row-major entries.
    pub fn from_rows(k: usize, nt: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != k * nt {
            return Err(Error::Dimension(format!(
                "{} entries for a {k}x{nt} channel",
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(k, nt, entries))
    }

    pub fn users(&self) -> usize {
        self.0.nrows()
    }

    pub fn antennas(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }
}

impl Deref for ChannelMatrix {
    type Target = DMatrix<Complex64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

/// CSI error coefficient `beta` at transmit SNR `rho` (linear); the
/// per-entry error variance is `beta / rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiError {
    beta: f64,
    rho: f64,
}

impl CsiError {
    pub fn new(beta: f64, rho: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be > 0, got {rho}")));
        }
        Ok(Self { beta, rho })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn delta(&self) -> f64 {
        self.beta / self.rho
    }
}

/// Draws one `CN(0, variance)` sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// `rows x cols` matrix of i.i.d. `CN(0, variance)` entries, filled row-major.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> DMatrix<Complex64> {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng, variance)).collect();
    DMatrix::from_row_slice(rows, cols, &entries)
}

pub fn sample_channel_with<R: Rng + ?Sized>(rng: &mut R, k: usize, nt: usize) -> Result<ChannelMatrix> {
    if k == 0 || k > nt {
        return Err(Error::Dimension(format!("need 1 <= K <= Nt, got K={k}, Nt={nt}")));
    }
    Ok(ChannelMatrix(complex_gaussian_matrix(rng, k, nt, 1.0)))
}

/// i.i.d. `CN(0, 1)` channel, reproducible from `seed`.
pub fn sample_channel(k: usize, nt: usize, seed: u64) -> Result<ChannelMatrix> {
    sample_channel_with(&mut ChaCha8Rng::seed_from_u64(seed), k, nt)
}

/// `H + Q` with `Q ~ CN(0, delta I)`.
pub fn perturb_csi(h: &ChannelMatrix, err: CsiError, seed: u64) -> ChannelMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = complex_gaussian_matrix(&mut rng, h.users(), h.antennas(), 1.0);
    perturb_with(h, err.delta(), &unit)
}

/// `H + sqrt(delta) * unit` for a pre-drawn unit-variance error matrix.
pub fn perturb_with(h: &ChannelMatrix, delta: f64, unit: &DMatrix<Complex64>) -> ChannelMatrix {
    if delta == 0.0 {
        return h.clone();
    }
    ChannelMatrix(&h.0 + unit * Complex64::new(delta.sqrt(), 0.0))
}
