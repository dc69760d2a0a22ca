//! The 1-bit DAC: independent sign quantization of the real and imaginary
//! part of every antenna signal onto `{±1 ± j} / sqrt(2 Nt)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether a component sits on the
/// 1-bit amplitude.
pub const INTERIOR_TOLERANCE: f64 = 1e-6;

/// Amplitude of each real or imaginary component, `1/sqrt(2 Nt)`.
pub fn amplitude(nt: usize) -> f64 {
    (0.5 / nt as f64).sqrt()
}

/// Sign with `sign(0) = +1` (negative zero included).
#[inline]
pub fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// A transmit vector whose entries all lie in the quaternary 1-bit alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBitVector {
    entries: Vec<Complex64>,
}

impl OneBitVector {
    /// Builds the vector from the stacked real signal `[x_re; x_im]`, using
    /// only the sign of each component.
    pub fn from_stacked_signs(stacked: &[f64]) -> Result<Self> {
        if stacked.is_empty() || !stacked.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "stacked signal must have even, nonzero length, got {}",
                stacked.len()
            )));
        }
        let nt = stacked.len() / 2;
        let amp = amplitude(nt);
        let entries = (0..nt)
            .map(|n| Complex64::new(amp * sign(stacked[n]), amp * sign(stacked[nt + n])))
            .collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn nt(&self) -> usize {
        self.entries.len()
    }

    /// `[x_re; x_im]`.
    pub fn stacked(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|z| z.re)
            .chain(self.entries.iter().map(|z| z.im))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `Q(v)`: per-component sign, scaled to `1/sqrt(2 Nt)`.
pub fn quantize(v: &[Complex64]) -> OneBitVector {
    let amp = amplitude(v.len());
    OneBitVector {
        entries: v
            .iter()
            .map(|z| Complex64::new(amp * sign(z.re), amp * sign(z.im)))
            .collect(),
    }
}

/// Result of checking a (relaxed) transmit vector against the 1-bit alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputCheck {
    /// Real components strictly inside the amplitude box.
    pub interior_re: usize,
    /// Imaginary components strictly inside the amplitude box.
    pub interior_im: usize,
    /// Components whose magnitude exceeds the amplitude.
    pub violations: usize,
    pub nt: usize,
}

impl OutputCheck {
    pub fn is_valid(&self) -> bool {
        self.interior_re == 0 && self.interior_im == 0 && self.violations == 0
    }

    /// Fraction of components that do not meet the 1-bit amplitude.
    pub fn eta(&self) -> f64 {
        (self.interior_re + self.interior_im) as f64 / (2 * self.nt) as f64
    }
}

pub fn is_valid_output(x: &[Complex64]) -> OutputCheck {
    let nt = x.len();
    let amp = amplitude(nt);
    let lo = (1.0 - INTERIOR_TOLERANCE) * amp;
    let hi = (1.0 + INTERIOR_TOLERANCE) * amp;
    let mut check = OutputCheck {
        interior_re: 0,
        interior_im: 0,
        violations: 0,
        nt,
    };
    for z in x {
        for (v, count) in [
            (z.re.abs(), &mut check.interior_re),
            (z.im.abs(), &mut check.interior_im),
        ] {
            if v < lo {
                *count += 1;
            } else if v > hi {
                check.violations += 1;
            }
        }
    }
    check
}
