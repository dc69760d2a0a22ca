//! Low-complexity symbol scaling.
//!
//! Each received symbol is written in the frame spanned by the two
//! threshold-parallel bases of its constellation point,
//! `h_k x = alpha_re s_re + alpha_im s_im`. Stacking the coordinates of all
//! users gives `Lambda = M x` with `M` a real `2K x 2Nt` matrix and `x` the
//! stacked real signal `[x_re; x_im]`. Every user decodes correctly in the
//! noiseless case iff `min(Lambda) >= 0`, so the 1-bit design problem is to
//! pick each `x_i in {±1/sqrt(2Nt)}` to maximize `min(Lambda)`.
//!
//! The heuristic runs three stages:
//!
//! 1. initialization fixes the columns of `M` whose entries share one sign;
//! 2. allocation fills the rest, either maximizing `sum(Lambda)` (sum-max) or
//!    greedily lifting the current worst row (max-min);
//! 3. refinement makes one pass of single sign flips that raise `min(Lambda)`.
//!
//! [`symbol_scale`] runs both allocations and keeps the better candidate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::ci_mapping::check_inputs;
use crate::error::{Error, Result};
use crate::modulation::{PskConstellation, ThresholdBases};
use crate::quantizer::{amplitude, sign, OneBitVector};

/// The coordinate-transformed system `Lambda = M x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSystem {
    /// Rows `alpha_re` of users `1..K`, then rows `alpha_im` of users `1..K`.
    pub m: DMatrix<f64>,
    users: usize,
    nt: usize,
}

impl AlphaSystem {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || !m.nrows().is_multiple_of(2) || m.ncols() == 0 || !m.ncols().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "alpha matrix must be 2K x 2Nt, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self {
            users: m.nrows() / 2,
            nt: m.ncols() / 2,
            m,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Length of the stacked signal, `2 Nt`.
    pub fn width(&self) -> usize {
        2 * self.nt
    }

    /// 1-bit amplitude `1/sqrt(2 Nt)`.
    pub fn amplitude(&self) -> f64 {
        amplitude(self.nt)
    }

    pub fn lambda(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m.nrows())
            .map(|l| self.m.row(l).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn min_lambda(&self, x: &[f64]) -> f64 {
        min_of(&self.lambda(x))
    }

    fn add_column(&self, t: &mut [f64], i: usize, value: f64) {
        for (l, tl) in t.iter_mut().enumerate() {
            *tl += self.m[(l, i)] * value;
        }
    }
}

pub(crate) fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Index of the smallest entry, lowest index on ties.
fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// Bases of every symbol, looked up in the constellation.
pub fn symbol_bases(s: &[Complex64], c: &PskConstellation) -> Result<Vec<ThresholdBases>> {
    s.iter()
        .map(|&sym| {
            let idx = c.detect(sym).index;
            if (c.points()[idx] - sym).norm() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "symbol {sym} is not a point of {}-PSK",
                    c.order()
                )));
            }
            c.bases_for(idx)
        })
        .collect()
}

pub fn build_alpha_matrix(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> Result<AlphaSystem> {
    check_inputs(h, s)?;
    let bases = symbol_bases(s, c)?;
    let (k, nt) = (h.users(), h.antennas());
    let mut m = DMatrix::zeros(2 * k, 2 * nt);
    for (user, b) in bases.iter().enumerate() {
        let det = b.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::InvalidParameter("degenerate threshold bases".into()));
        }
        for n in 0..nt {
            let (hr, hi) = (h[(user, n)].re, h[(user, n)].im);
            m[(user, n)] = (b.d * hr - b.c * hi) / det;
            m[(user, nt + n)] = -(b.d * hi + b.c * hr) / det;
            m[(k + user, n)] = (b.a * hi - b.b * hr) / det;
            m[(k + user, nt + n)] = (b.a * hr + b.b * hi) / det;
        }
    }
    AlphaSystem::from_matrix(m)
}

/// Sign given to the single column chosen when no column is sign-uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitSign {
    /// `sgn(||M_i||_1)`, which is always `+`.
    #[default]
    Literal,
    /// Sign of the column sum `m(i)`.
    ColumnSum,
}

/// Partial assignment carried between the stages.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationState {
    /// Stacked signal; unallocated entries hold `0`.
    pub x: Vec<f64>,
    pub allocated: Vec<bool>,
    /// Running `sum_{i allocated} M_i x_i`.
    pub t: Vec<f64>,
}

impl AllocationState {
    pub fn residual(&self) -> impl Iterator<Item = usize> + '_ {
        self.allocated.iter().enumerate().filter(|(_, a)| !**a).map(|(i, _)| i)
    }

    pub fn allocated_count(&self) -> usize {
        self.allocated.iter().filter(|a| **a).count()
    }
}

/// Relative magnitude below which an entry of `M` is treated as zero.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Sign shared by all nonzero entries of column `i`, if any. Zeros do not
/// break uniformity, but an all-zero column has no sign.
pub fn uniform_sign(sys: &AlphaSystem, i: usize) -> Option<f64> {
    // entries at rounding-noise level count as zeros
    let floor = ZERO_TOLERANCE * sys.m.amax();
    let mut found = None;
    for &v in sys.m.column(i).iter() {
        if v.abs() <= floor {
            continue;
        }
        let sg = sign(v);
        match found {
            None => found = Some(sg),
            Some(prev) if prev != sg => return None,
            _ => {}
        }
    }
    found
}

fn column_sum(sys: &AlphaSystem, i: usize) -> f64 {
    sys.m.column(i).sum()
}

pub fn init_stage(sys: &AlphaSystem, rule: InitSign) -> AllocationState {
    let width = sys.width();
    let amp = sys.amplitude();
    let mut state = AllocationState {
        x: vec![0.0; width],
        allocated: vec![false; width],
        t: vec![0.0; sys.m.nrows()],
    };
    for i in 0..width {
        if let Some(sg) = uniform_sign(sys, i) {
            state.x[i] = sg * amp;
            state.allocated[i] = true;
        }
    }
    if state.allocated_count() == 0 {
        let mut best = 0;
        let mut best_norm = f64::NEG_INFINITY;
        for i in 0..width {
            let norm = sys.m.column(i).iter().map(|v| v.abs()).sum::<f64>();
            if norm > best_norm {
                best = i;
                best_norm = norm;
            }
        }
        let sg = match rule {
            InitSign::Literal => 1.0,
            InitSign::ColumnSum => sign(column_sum(sys, best)),
        };
        state.x[best] = sg * amp;
        state.allocated[best] = true;
    }
    for i in 0..width {
        if state.allocated[i] {
            sys.add_column(&mut state.t, i, state.x[i]);
        }
    }
    state
}

/// Fills every residual entry with the sign of its column sum.
pub fn allocate_summax(state: &AllocationState, sys: &AlphaSystem) -> Vec<f64> {
    let amp = sys.amplitude();
    let mut x = state.x.clone();
    for i in state.residual() {
        x[i] = sign(column_sum(sys, i)) * amp;
    }
    x
}

/// Repeatedly lifts the smallest entry of `t` with the residual column of
/// largest magnitude in that row. Returns the signal and the order in which
/// entries were allocated.
pub fn allocate_maxmin_traced(state: &AllocationState, sys: &AlphaSystem) -> (Vec<f64>, Vec<usize>) {
    let amp = sys.amplitude();
    let mut x = state.x.clone();
    let mut t = state.t.clone();
    let mut residual: Vec<usize> = state.residual().collect();
    let mut order = Vec::with_capacity(residual.len());
    while !residual.is_empty() {
        let q = argmin(&t);
        let mut pick = 0;
        for (pos, &i) in residual.iter().enumerate() {
            if sys.m[(q, i)].abs() > sys.m[(q, residual[pick])].abs() {
                pick = pos;
            }
        }
        let i = residual.remove(pick);
        x[i] = sign(sys.m[(q, i)]) * amp;
        sys.add_column(&mut t, i, x[i]);
        order.push(i);
    }
    (x, order)
}

pub fn allocate_maxmin(state: &AllocationState, sys: &AlphaSystem) -> Vec<f64> {
    allocate_maxmin_traced(state, sys).0
}

/// One sequential pass of single-entry sign flips, each kept only if it
/// strictly raises `min(Lambda)`. Returns the refined signal together with
/// `min(Lambda)` after every step of the pass.
pub fn refine_traced(x: &[f64], sys: &AlphaSystem) -> (Vec<f64>, Vec<f64>) {
    let mut x = x.to_vec();
    let mut lambda = sys.lambda(&x);
    let mut current = min_of(&lambda);
    let mut history = Vec::with_capacity(x.len());
    let mut trial = lambda.clone();
    for (i, xi) in x.iter_mut().enumerate() {
        for (l, v) in trial.iter_mut().enumerate() {
            *v = lambda[l] - 2.0 * sys.m[(l, i)] * *xi;
        }
        let flipped = min_of(&trial);
        if flipped > current {
            *xi = -*xi;
            std::mem::swap(&mut lambda, &mut trial);
            current = flipped;
        }
        history.push(current);
    }
    (x, history)
}

pub fn refine(x: &[f64], sys: &AlphaSystem) -> Vec<f64> {
    refine_traced(x, sys).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    SumMax,
    MaxMin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingOutcome {
    pub transmit: OneBitVector,
    /// Stacked signal of the chosen candidate.
    pub x: Vec<f64>,
    pub min_lambda: f64,
    pub chosen: Criterion,
    pub summax_min: f64,
    pub maxmin_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScalingOptions {
    pub init_sign: InitSign,
}

/// Initialization, both allocations, refinement of each, best of the two.
pub fn symbol_scale_system(sys: &AlphaSystem, opts: ScalingOptions) -> Result<ScalingOutcome> {
    let state = init_stage(sys, opts.init_sign);
    let sm = refine(&allocate_summax(&state, sys), sys);
    let mm = refine(&allocate_maxmin(&state, sys), sys);
    let (summax_min, maxmin_min) = (sys.min_lambda(&sm), sys.min_lambda(&mm));
    let (x, chosen) = if summax_min >= maxmin_min {
        (sm, Criterion::SumMax)
    } else {
        (mm, Criterion::MaxMin)
    };
    Ok(ScalingOutcome {
        transmit: OneBitVector::from_stacked_signs(&x)?,
        min_lambda: summax_min.max(maxmin_min),
        x,
        chosen,
        summax_min,
        maxmin_min,
    })
}

pub fn symbol_scale_detailed(
    h: &ChannelMatrix,
    s: &[Complex64],
    c: &PskConstellation,
    opts: ScalingOptions,
) -> Result<ScalingOutcome> {
    symbol_scale_system(&build_alpha_matrix(h, s, c)?, opts)
}

/// The full symbol scaling scheme.
pub fn symbol_scale(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> Result<OneBitVector> {
    Ok(symbol_scale_detailed(h, s, c, ScalingOptions::default())?.transmit)
}

/// Initialization, one allocation criterion, then refinement.
pub fn single_criterion(
    h: &ChannelMatrix,
    s: &[Complex64],
    c: &PskConstellation,
    criterion: Criterion,
    opts: ScalingOptions,
) -> Result<OneBitVector> {
    let sys = build_alpha_matrix(h, s, c)?;
    let state = init_stage(&sys, opts.init_sign);
    let x = match criterion {
        Criterion::SumMax => allocate_summax(&state, &sys),
        Criterion::MaxMin => allocate_maxmin(&state, &sys),
    };
    OneBitVector::from_stacked_signs(&refine(&x, &sys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channel;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn system(rows: &[&[f64]]) -> AlphaSystem {
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        AlphaSystem::from_matrix(DMatrix::from_row_slice(rows.len(), rows[0].len(), &flat)).unwrap()
    }

    fn unit_system() -> AlphaSystem {
        let h = ChannelMatrix::from_rows(1, 1, &[Complex64::new(1.0, 0.0)]).unwrap();
        let c = PskConstellation::new(4).unwrap();
        build_alpha_matrix(&h, &[Complex64::from_polar(1.0, FRAC_PI_4)], &c).unwrap()
    }

    #[test]
    fn qpsk_rows() {
        let h = sample_channel(2, 5, 8).unwrap();
        let c = PskConstellation::new(4).unwrap();
        let s = [c.points()[0], c.points()[0]];
        let sys = build_alpha_matrix(&h, &s, &c).unwrap();
        for k in 0..2 {
            for n in 0..5 {
                let (hr, hi) = (h[(k, n)].re, h[(k, n)].im);
                assert!((sys.m[(k, n)] - SQRT_2 * hr).abs() < 1e-12);
                assert!((sys.m[(k, 5 + n)] + SQRT_2 * hi).abs() < 1e-12);
                assert!((sys.m[(2 + k, n)] - SQRT_2 * hi).abs() < 1e-12);
                assert!((sys.m[(2 + k, 5 + n)] - SQRT_2 * hr).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_instance_matrix_and_init() {
        let sys = unit_system();
        let expect = DMatrix::from_row_slice(2, 2, &[SQRT_2, 0.0, 0.0, SQRT_2]);
        assert!((&sys.m - expect).norm() < 1e-12);
        let state = init_stage(&sys, InitSign::Literal);
        assert_eq!(state.allocated, vec![true, true]);
        assert_eq!(state.x, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!(state.t.iter().all(|v| (v - 1.0).abs() < 1e-12));
        // nothing left to allocate
        assert_eq!(allocate_summax(&state, &sys), state.x);
        assert_eq!(allocate_maxmin(&state, &sys), state.x);
        assert_eq!(refine(&state.x, &sys), state.x);
    }

    #[test]
    fn symbol_scale_unit_instance() {
        let sys = unit_system();
        let out = symbol_scale_system(&sys, ScalingOptions::default()).unwrap();
        assert!((out.min_lambda - 1.0).abs() < 1e-12);
        assert_eq!(out.transmit.entries()[0], Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    }

    #[test]
    fn mixed_columns_force_single_pick() {
        let sys = system(&[&[1.0, -2.0, -0.5, 1.0], &[-1.0, 1.0, 1.0, -3.0]]);
        let state = init_stage(&sys, InitSign::Literal);
        assert_eq!(state.allocated, vec![false, false, false, true]);
        assert_eq!(state.x[3], 0.5);
        let flipped = init_stage(&sys, InitSign::ColumnSum);
        assert_eq!(flipped.x[3], -0.5);
    }

    #[test]
    fn maxmin_hand_trace() {
        // Nt = 2, amplitude 1/2. Init takes column 3 (1-norm 4) with +.
        // t = (0.5, -1.5) -> row 1, columns 0,1,2 tie at |1| -> column 0, sign -
        // t = (0, -1)     -> row 1, columns 1,2 tie -> column 1, sign +
        // t = (-1, -0.5)  -> row 0, column 2, sign -
        let sys = system(&[&[1.0, -2.0, -0.5, 1.0], &[-1.0, 1.0, 1.0, -3.0]]);
        let state = init_stage(&sys, InitSign::Literal);
        assert_eq!(state.t, vec![0.5, -1.5]);
        let (x, order) = allocate_maxmin_traced(&state, &sys);
        assert_eq!(order, vec![0, 1, 2]);
        assert_eq!(x, vec![-0.5, 0.5, -0.5, 0.5]);
        assert_eq!(sys.lambda(&x), vec![-0.75, -1.0]);
    }

    #[test]
    fn summax_follows_column_sums() {
        let sys = system(&[&[1.0, -2.0, -0.5, 1.0], &[-1.0, 1.0, 1.0, -3.0]]);
        let state = init_stage(&sys, InitSign::Literal);
        // column sums 0, -1, 0.5, -2: zero ties to +
        assert_eq!(allocate_summax(&state, &sys), vec![0.5, -0.5, 0.5, 0.5]);
    }

    #[test]
    fn refine_keeps_positive_unit_solution() {
        let sys = unit_system();
        let (x, hist) = refine_traced(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &sys);
        assert_eq!(x, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!(hist.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn refine_flips_a_bad_sign() {
        let sys = unit_system();
        let x = refine(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2], &sys);
        assert_eq!(x, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    }

    #[test]
    fn zero_columns_have_no_sign() {
        let sys = system(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(uniform_sign(&sys, 0), None);
        assert_eq!(uniform_sign(&sys, 1), Some(1.0));
    }

    #[test]
    fn rejects_off_constellation_symbols() {
        let h = sample_channel(1, 2, 0).unwrap();
        let c = PskConstellation::new(4).unwrap();
        assert!(build_alpha_matrix(&h, &[Complex64::new(1.0, 0.0)], &c).is_err());
    }
}
