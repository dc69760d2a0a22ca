//! M-PSK constellations, sector detection, Gray labelling and the
//! decomposition of each point along its two detection thresholds.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Phase of the first constellation point.
pub const PHASE_OFFSET: f64 = FRAC_PI_4;

/// Normalized M-PSK constellation with points at `pi/4 + 2*pi*m/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PskConstellation {
    order: usize,
    points: Vec<Complex64>,
    threshold_angle: f64,
}

/// Coordinates of the two threshold-parallel bases of one constellation
/// point: `s_re = a + b*j` and `s_im = c + d*j`, with `s_re + s_im = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdBases {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ThresholdBases {
    pub fn re_basis(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    pub fn im_basis(&self) -> Complex64 {
        Complex64::new(self.c, self.d)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Coordinates `(alpha_re, alpha_im)` of `z` in the threshold frame.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let det = self.determinant();
        (
            (self.d * z.re - self.c * z.im) / det,
            (self.a * z.im - self.b * z.re) / det,
        )
    }
}

/// Outcome of a hard decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub index: usize,
    /// Set when the observation carried no phase information (`y == 0`).
    pub ambiguous: bool,
}

impl PskConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() {
            return Err(Error::InvalidOrder(order));
        }
        let step = 2.0 * PI / order as f64;
        let points = (0..order)
            .map(|m| Complex64::from_polar(1.0, PHASE_OFFSET + step * m as f64))
            .collect();
        Ok(Self {
            order,
            points,
            threshold_angle: PI / order as f64,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Result<Complex64> {
        self.points.get(index).copied().ok_or(Error::IndexOutOfRange {
            index,
            order: self.order,
        })
    }

    /// Half-width of a decision sector, `pi/M`.
    pub fn threshold_angle(&self) -> f64 {
        self.threshold_angle
    }

    pub fn point_angle(&self, index: usize) -> f64 {
        PHASE_OFFSET + 2.0 * PI * index as f64 / self.order as f64
    }

    pub fn bases_for(&self, index: usize) -> Result<ThresholdBases> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange {
                index,
                order: self.order,
            });
        }
        let phi = self.point_angle(index);
        let lo = Complex64::from_polar(1.0, phi - self.threshold_angle);
        let hi = Complex64::from_polar(1.0, phi + self.threshold_angle);
        let norm = (lo + hi).norm();
        let (re, im) = (lo / norm, hi / norm);
        Ok(ThresholdBases {
            a: re.re,
            b: re.im,
            c: im.re,
            d: im.im,
        })
    }

    /// Sector decision with half-open sectors `[phi_m - pi/M, phi_m + pi/M)`.
    pub fn detect(&self, y: Complex64) -> Detection {
        if y.re == 0.0 && y.im == 0.0 {
            return Detection {
                index: 0,
                ambiguous: true,
            };
        }
        let width = 2.0 * self.threshold_angle;
        let shifted = (y.arg() - PHASE_OFFSET + self.threshold_angle).rem_euclid(2.0 * PI);
        let index = ((shifted / width).floor() as usize).min(self.order - 1);
        Detection {
            index,
            ambiguous: false,
        }
    }

    /// Gray label of a point index.
    pub fn gray_label(&self, index: usize) -> usize {
        index ^ (index >> 1)
    }

    /// Point index carrying a Gray label.
    pub fn index_for_label(&self, label: usize) -> usize {
        let mut index = label;
        let mut shift = label >> 1;
        while shift != 0 {
            index ^= shift;
            shift >>= 1;
        }
        index & (self.order - 1)
    }

    /// Bits of the Gray label of `index`, most significant first.
    pub fn gray_bits(&self, index: usize) -> Vec<u8> {
        let label = self.gray_label(index);
        let n = self.bits_per_symbol();
        (0..n).rev().map(|b| ((label >> b) & 1) as u8).collect()
    }

    pub fn index_from_bits(&self, bits: &[u8]) -> Result<usize> {
        if bits.len() != self.bits_per_symbol() {
            return Err(Error::Dimension(format!(
                "expected {} bits, got {}",
                self.bits_per_symbol(),
                bits.len()
            )));
        }
        let label = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Ok(self.index_for_label(label))
    }

    /// Number of differing bits between the Gray labels of two indices.
    pub fn bit_errors(&self, sent: usize, detected: usize) -> u32 {
        (self.gray_label(sent) ^ self.gray_label(detected)).count_ones()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn qpsk_geometry() {
        let c = PskConstellation::new(4).unwrap();
        assert!((c.threshold_angle() - FRAC_PI_4).abs() < 1e-15);
        let expected = [1.0, 3.0, 5.0, 7.0].map(|k| Complex64::from_polar(1.0, k * PI / 4.0));
        for (p, e) in c.points().iter().zip(expected) {
            assert!((p - e).norm() < 1e-12);
        }
    }

    #[test]
    fn eight_psk_contains_pi_over_four() {
        let c = PskConstellation::new(8).unwrap();
        assert!((c.threshold_angle() - PI / 8.0).abs() < 1e-15);
        let target = Complex64::from_polar(1.0, FRAC_PI_4);
        assert!(c.points().iter().any(|p| (p - target).norm() < 1e-12));
    }

    #[test]
    fn rejects_bad_orders() {
        for order in [0, 1, 2, 3, 6, 12] {
            assert!(matches!(PskConstellation::new(order), Err(Error::InvalidOrder(_))));
        }
    }

    #[test]
    fn qpsk_bases_align_with_axes() {
        let c = PskConstellation::new(4).unwrap();
        let b = c.bases_for(0).unwrap();
        assert!((b.a - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(b.b.abs() < 1e-12);
        assert!(b.c.abs() < 1e-12);
        assert!((b.d - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn eight_psk_bases() {
        // 2cos(pi/8) normalizes e^{j pi/8} and e^{j 3pi/8}
        let c = PskConstellation::new(8).unwrap();
        let b = c.bases_for(0).unwrap();
        let den = 2.0 * (PI / 8.0).cos();
        assert!((b.a - 0.5).abs() < 1e-12);
        assert!((b.b - (PI / 8.0).sin() / den).abs() < 1e-12);
        assert!((b.b - 0.207_106_781_186_547_5).abs() < 1e-12);
        assert!((b.c - 0.207_106_781_186_547_5).abs() < 1e-12);
        assert!((b.d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bases_out_of_range() {
        let c = PskConstellation::new(4).unwrap();
        assert!(c.bases_for(4).is_err());
    }

    #[test]
    fn detect_sector_edges() {
        let c = PskConstellation::new(4).unwrap();
        assert_eq!(c.detect(Complex64::new(0.9, 0.1)).index, 0);
        // arg = 0 opens the first sector, arg = pi/2 opens the second
        assert_eq!(c.detect(Complex64::new(1.0, 0.0)).index, 0);
        assert_eq!(c.detect(Complex64::new(0.0, 1.0)).index, 1);
        assert_eq!(c.detect(Complex64::new(0.3, -0.1)).index, 3);
        let c8 = PskConstellation::new(8).unwrap();
        let y = Complex64::from_polar(1.0, FRAC_PI_4 + PI / 16.0);
        assert_eq!(c8.detect(y).index, 0);
    }

    #[test]
    fn detect_zero_is_flagged() {
        let c = PskConstellation::new(8).unwrap();
        let d = c.detect(Complex64::new(0.0, 0.0));
        assert_eq!(
            d,
            Detection {
                index: 0,
                ambiguous: true
            }
        );
    }

    #[test]
    fn qpsk_gray_sequence() {
        let c = PskConstellation::new(4).unwrap();
        let bits: Vec<Vec<u8>> = (0..4).map(|i| c.gray_bits(i)).collect();
        assert_eq!(bits, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for order in [4, 8, 16, 32] {
            let c = PskConstellation::new(order).unwrap();
            for i in 0..order {
                let j = (i + 1) % order;
                assert_eq!(c.bit_errors(i, j), 1);
                assert_eq!(c.index_from_bits(&c.gray_bits(i)).unwrap(), i);
            }
        }
    }
}
