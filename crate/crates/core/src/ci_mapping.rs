//! Optimization-based non-linear mapping: maximize the constructive
//! interference margin over the box-relaxed 1-bit alphabet, then snap every
//! component to the alphabet by its sign.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::lp::{solve_lp_with, LinearProgram, LpOptions};
use crate::modulation::PskConstellation;
use crate::quantizer::{amplitude, is_valid_output, OneBitVector, OutputCheck};

pub(crate) fn check_inputs(h: &ChannelMatrix, s: &[Complex64]) -> Result<()> {
    if s.len() != h.users() {
        return Err(Error::Dimension(format!("{} symbols for {} users", s.len(), h.users())));
    }
    if let Some(bad) = s.iter().find(|v| (v.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "symbols must have unit modulus, got |s| = {}",
            bad.norm()
        )));
    }
    Ok(())
}

/// Real coefficient rows of `Re(lambda_k)` and `Im(lambda_k)` over the
/// stacked signal `[x_re; x_im]`, where `lambda_k = h_k x s_k^*`.
pub fn lambda_rows(h: &ChannelMatrix, s: &[Complex64]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let nt = h.antennas();
    (0..h.users())
        .map(|k| {
            let mut re = vec![0.0; 2 * nt];
            let mut im = vec![0.0; 2 * nt];
            for n in 0..nt {
                let g = h[(k, n)] * s[k].conj();
                re[n] = g.re;
                re[nt + n] = -g.im;
                im[n] = g.im;
                im[nt + n] = g.re;
            }
            (re, im)
        })
        .collect()
}

/// The relaxed problem over `z = [x_re; x_im; t]`:
/// maximize `t` subject to `±Im(lambda_k) <= (Re(lambda_k) - t) tan(theta_t)`,
/// `|z_i| <= 1/sqrt(2 Nt)` on the signal entries and `t >= 0`.
pub fn build_relaxed_lp(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> Result<LinearProgram> {
    check_inputs(h, s)?;
    let nt = h.antennas();
    let n = 2 * nt + 1;
    let tan_t = c.threshold_angle().tan();
    let mut objective = vec![0.0; n];
    objective[2 * nt] = 1.0;
    let mut lp = LinearProgram::new(n).maximize(objective);
    for (re, im) in lambda_rows(h, s) {
        for sign in [1.0, -1.0] {
            let mut row: Vec<f64> = re.iter().zip(&im).map(|(r, i)| sign * i - tan_t * r).collect();
            row.push(tan_t);
            lp.add_inequality(row, 0.0);
        }
    }
    let amp = amplitude(nt);
    for j in 0..2 * nt {
        lp.set_bounds(j, -amp, amp);
    }
    lp.set_bounds(2 * nt, 0.0, f64::INFINITY);
    Ok(lp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingOutcome {
    pub transmit: OneBitVector,
    /// Relaxed transmit vector returned by the LP.
    pub relaxed: Vec<Complex64>,
    /// Fraction of relaxed components strictly inside the box.
    pub eta: f64,
    pub check: OutputCheck,
    /// Optimal margin of the relaxed problem.
    pub t_relaxed: f64,
    pub lp_iterations: usize,
}

pub fn ci_map_transmit(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> Result<MappingOutcome> {
    ci_map_transmit_with(h, s, c, &LpOptions::default())
}

pub fn ci_map_transmit_with(
    h: &ChannelMatrix,
    s: &[Complex64],
    c: &PskConstellation,
    opts: &LpOptions,
) -> Result<MappingOutcome> {
    let lp = build_relaxed_lp(h, s, c)?;
    let sol = solve_lp_with(&lp, opts);
    if !sol.is_optimal() {
        return Err(Error::Lp(sol.status));
    }
    let nt = h.antennas();
    let relaxed: Vec<Complex64> = (0..nt).map(|n| Complex64::new(sol.z[n], sol.z[nt + n])).collect();
    let check = is_valid_output(&relaxed);
    let transmit = OneBitVector::from_stacked_signs(&sol.z[..2 * nt])?;
    Ok(MappingOutcome {
        transmit,
        relaxed,
        eta: check.eta(),
        check,
        t_relaxed: sol.z[2 * nt],
        lp_iterations: sol.iterations,
    })
}

/// Margin `min_k (Re(lambda_k) - |Im(lambda_k)| / tan(theta_t))` of a
/// transmit vector; nonnegative iff every user sits in its constructive region.
pub fn ci_margin(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation, x: &[Complex64]) -> f64 {
    let tan_t = c.threshold_angle().tan();
    (0..h.users())
        .map(|k| {
            let lambda: Complex64 = (0..h.antennas()).map(|n| h[(k, n)] * x[n]).sum::<Complex64>() * s[k].conj();
            lambda.re - lambda.im.abs() / tan_t
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channel;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn unit() -> (ChannelMatrix, Vec<Complex64>, PskConstellation) {
        (
            ChannelMatrix::from_rows(1, 1, &[Complex64::new(1.0, 0.0)]).unwrap(),
            vec![Complex64::from_polar(1.0, FRAC_PI_4)],
            PskConstellation::new(4).unwrap(),
        )
    }

    #[test]
    fn lp_shape_and_trivial_feasibility() {
        let h = sample_channel(3, 10, 4).unwrap();
        let c = PskConstellation::new(8).unwrap();
        let s: Vec<Complex64> = [0, 3, 5].iter().map(|&i| c.points()[i]).collect();
        let lp = build_relaxed_lp(&h, &s, &c).unwrap();
        assert_eq!(lp.num_variables(), 21);
        assert_eq!(lp.num_inequalities(), 6);
        assert_eq!(lp.max_violation(&[0.0; 21]), 0.0);
    }

    #[test]
    fn scalar_instance() {
        let (h, s, c) = unit();
        let out = ci_map_transmit(&h, &s, &c).unwrap();
        assert!((out.t_relaxed - 1.0).abs() < 1e-7);
        assert!((out.relaxed[0] - Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-7);
        assert_eq!(out.eta, 0.0);
        assert_eq!(out.transmit.entries()[0], Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    }

    #[test]
    fn margin_of_scalar_instance() {
        let (h, s, c) = unit();
        let x = [Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)];
        assert!((ci_margin(&h, &s, &c, &x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_symbols() {
        let (h, _, c) = unit();
        assert!(build_relaxed_lp(&h, &[Complex64::new(2.0, 0.0)], &c).is_err());
        assert!(build_relaxed_lp(&h, &[], &c).is_err());
    }
}
