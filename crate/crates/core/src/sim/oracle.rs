use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stream_rng, stream_seed, thread_pool, Stream};
use crate::channel::{sample_channel_with, ChannelMatrix};
use crate::ci_mapping::{check_inputs, ci_map_transmit, ci_margin};
use crate::error::{Error, Result};
use crate::modulation::PskConstellation;
use crate::quantizer::{amplitude, OneBitVector};
use crate::symbol_scaling::{
    allocate_maxmin, allocate_summax, build_alpha_matrix, init_stage, refine_traced, symbol_scale_system,
    ScalingOptions,
};
use crate::Complex64;

/// Largest antenna count accepted by the oracle (`4^8` candidates).
pub const MAX_ORACLE_ANTENNAS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Candidate with the largest `min(Lambda)`.
    pub best_lambda_x: OneBitVector,
    pub best_min_lambda: f64,
    /// Candidate with the largest CI margin `t`.
    pub best_t_x: OneBitVector,
    pub best_t: f64,
    pub candidates: u64,
}

/// Enumerates every 1-bit transmit vector in Gray-code order, one sign flip
/// per step. Ties keep the earliest candidate.
pub fn exhaustive_oracle(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> Result<OracleResult> {
    let nt = h.antennas();
    if nt > MAX_ORACLE_ANTENNAS {
        return Err(Error::OracleTooLarge(nt));
    }
    check_inputs(h, s)?;
    let sys = build_alpha_matrix(h, s, c)?;
    let k = h.users();
    let amp = amplitude(nt);
    let tan_t = c.threshold_angle().tan();
    let width = 2 * nt;

    let mut z = vec![amp; width];
    let mut lam = sys.lambda(&z);
    let mut rx: Vec<Complex64> = (0..k)
        .map(|u| (0..nt).map(|n| h[(u, n)]).sum::<Complex64>() * Complex64::new(amp, amp) * s[u].conj())
        .collect();
    let margin = |rx: &[Complex64]| {
        rx.iter()
            .map(|l| l.re - l.im.abs() / tan_t)
            .fold(f64::INFINITY, f64::min)
    };
    let min_of = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);

    let (mut best_l, mut best_lx) = (min_of(&lam), z.clone());
    let (mut best_t, mut best_tx) = (margin(&rx), z.clone());
    let total = 1u64 << width;
    for g in 1..total {
        let i = g.trailing_zeros() as usize;
        let delta = -2.0 * z[i];
        z[i] = -z[i];
        for (l, v) in lam.iter_mut().enumerate() {
            *v += sys.m[(l, i)] * delta;
        }
        let (n, step) = if i < nt {
            (i, Complex64::new(delta, 0.0))
        } else {
            (i - nt, Complex64::new(0.0, delta))
        };
        for (u, v) in rx.iter_mut().enumerate() {
            *v += h[(u, n)] * step * s[u].conj();
        }
        let l = min_of(&lam);
        if l > best_l {
            best_l = l;
            best_lx.copy_from_slice(&z);
        }
        let t = margin(&rx);
        if t > best_t {
            best_t = t;
            best_tx.copy_from_slice(&z);
        }
    }
    let best_lambda_x = OneBitVector::from_stacked_signs(&best_lx)?;
    let best_t_x = OneBitVector::from_stacked_signs(&best_tx)?;
    // report values recomputed from scratch rather than the running sums
    Ok(OracleResult {
        best_min_lambda: sys.min_lambda(&best_lx),
        best_t: ci_margin(h, s, c, best_t_x.entries()),
        best_lambda_x,
        best_t_x,
        candidates: total,
    })
}

/// Oracle bounds checked on one random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleInstance {
    pub nt: usize,
    pub oracle: OracleResult,
    /// Optimal value of the relaxed LP.
    pub t_relaxed: f64,
    pub scaling_min_lambda: f64,
    /// Refinement never lowered `min(Lambda)` for either allocation.
    pub refine_monotone: bool,
}

impl OracleInstance {
    pub const TOLERANCE: f64 = 1e-7;

    /// The relaxed optimum upper-bounds every 1-bit margin.
    pub fn relaxation_bound_holds(&self) -> bool {
        self.t_relaxed >= self.oracle.best_t - Self::TOLERANCE * (1.0 + self.t_relaxed.abs())
    }

    /// Symbol scaling cannot beat exhaustive search.
    pub fn scaling_bound_holds(&self) -> bool {
        self.scaling_min_lambda <= self.oracle.best_min_lambda + 1e-9 * (1.0 + self.oracle.best_min_lambda.abs())
    }

    pub fn all_hold(&self) -> bool {
        self.relaxation_bound_holds() && self.scaling_bound_holds() && self.refine_monotone
    }

    /// Draws instance `index` at `nt` antennas and runs every scheme on it.
    pub fn generate(nt: usize, k: usize, c: &PskConstellation, seed: u64, index: u64) -> Result<Self> {
        let master = stream_seed(seed, nt as u64, Stream::Channel);
        let h = sample_channel_with(&mut stream_rng(master, index, Stream::Channel), k, nt)?;
        let mut rng = stream_rng(master, index, Stream::Symbols);
        let s: Vec<_> = (0..k).map(|_| c.points()[rng.random_range(0..c.order())]).collect();
        Self::evaluate(&h, &s, c)
    }

    pub fn evaluate(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> Result<Self> {
        let oracle = exhaustive_oracle(h, s, c)?;
        let mapped = ci_map_transmit(h, s, c)?;
        let sys = build_alpha_matrix(h, s, c)?;
        let scaled = symbol_scale_system(&sys, ScalingOptions::default())?;
        let state = init_stage(&sys, ScalingOptions::default().init_sign);
        let refine_monotone = [allocate_summax(&state, &sys), allocate_maxmin(&state, &sys)]
            .iter()
            .all(|x| {
                let start = sys.min_lambda(x);
                let (out, history) = refine_traced(x, &sys);
                let end = sys.min_lambda(&out);
                let mut prev = start;
                let steps_ok = history.iter().all(|&v| {
                    let ok = v >= prev;
                    prev = v;
                    ok
                });
                steps_ok && end >= start - 1e-12 * (1.0 + start.abs())
            });
        Ok(Self {
            nt: h.antennas(),
            oracle,
            t_relaxed: mapped.t_relaxed,
            scaling_min_lambda: scaled.min_lambda,
            refine_monotone,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleCompareConfig {
    pub nt_list: Vec<usize>,
    pub k: usize,
    pub mod_order: usize,
    /// Instances per antenna count.
    pub instances: usize,
    #[serde(skip)]
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for OracleCompareConfig {
    fn default() -> Self {
        Self {
            nt_list: vec![2, 3, 4, 5, 6],
            k: 2,
            mod_order: 4,
            instances: 40,
            seed: 1,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCompareRow {
    pub nt: usize,
    pub k: usize,
    pub instances: usize,
    pub relaxation_bound_ok: usize,
    pub scaling_bound_ok: usize,
    pub refine_ok: usize,
    /// Instances where symbol scaling matched the oracle's `min(Lambda)`.
    pub scaling_optimal: usize,
    pub mean_oracle_min_lambda: f64,
    pub mean_scaling_min_lambda: f64,
}

impl OracleCompareRow {
    pub const CSV_HEADER: &'static str = "nt,k,instances,relaxation_bound_ok,scaling_bound_ok,refine_ok,scaling_optimal,mean_oracle_min_lambda,mean_scaling_min_lambda";

    pub fn all_hold(&self) -> bool {
        self.relaxation_bound_ok == self.instances
            && self.scaling_bound_ok == self.instances
            && self.refine_ok == self.instances
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}\n",
            self.nt,
            self.k,
            self.instances,
            self.relaxation_bound_ok,
            self.scaling_bound_ok,
            self.refine_ok,
            self.scaling_optimal,
            self.mean_oracle_min_lambda,
            self.mean_scaling_min_lambda
        )
    }
}

pub fn compare_with_oracle(cfg: &OracleCompareConfig) -> Result<Vec<OracleCompareRow>> {
    if cfg.instances == 0 || cfg.nt_list.is_empty() {
        return Err(Error::InvalidParameter("need at least one nt and one instance".into()));
    }
    if let Some(&nt) = cfg.nt_list.iter().find(|&&nt| nt > MAX_ORACLE_ANTENNAS) {
        return Err(Error::OracleTooLarge(nt));
    }
    let c = PskConstellation::new(cfg.mod_order)?;
    let pool = thread_pool(cfg.workers)?;
    cfg.nt_list
        .iter()
        .map(|&nt| {
            let all: Vec<OracleInstance> = pool.install(|| {
                (0..cfg.instances as u64)
                    .into_par_iter()
                    .map(|i| OracleInstance::generate(nt, cfg.k, &c, cfg.seed, i))
                    .collect::<Result<_>>()
            })?;
            let n = all.len() as f64;
            let count = |f: &dyn Fn(&OracleInstance) -> bool| all.iter().filter(|x| f(x)).count();
            Ok(OracleCompareRow {
                nt,
                k: cfg.k,
                instances: all.len(),
                relaxation_bound_ok: count(&|x| x.relaxation_bound_holds()),
                scaling_bound_ok: count(&|x| x.scaling_bound_holds()),
                refine_ok: count(&|x| x.refine_monotone),
                scaling_optimal: count(&|x| {
                    (x.scaling_min_lambda - x.oracle.best_min_lambda).abs() <= 1e-9 * (1.0 + x.scaling_min_lambda.abs())
                }),
                mean_oracle_min_lambda: all.iter().map(|x| x.oracle.best_min_lambda).sum::<f64>() / n,
                mean_scaling_min_lambda: all.iter().map(|x| x.scaling_min_lambda).sum::<f64>() / n,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channel;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    #[test]
    fn scalar_instance() {
        let h = ChannelMatrix::from_rows(1, 1, &[Complex64::new(1.0, 0.0)]).unwrap();
        let c = PskConstellation::new(4).unwrap();
        let s = [Complex64::from_polar(1.0, FRAC_PI_4)];
        let out = exhaustive_oracle(&h, &s, &c).unwrap();
        assert_eq!(out.candidates, 4);
        let want = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!((out.best_lambda_x.entries()[0] - want).norm() < 1e-15);
        assert!((out.best_min_lambda - 1.0).abs() < 1e-12);
        assert!((out.best_t_x.entries()[0] - want).norm() < 1e-15);
        assert!((out.best_t - 1.0).abs() < 1e-12);
    }

    /// Direct evaluation of every candidate, no incremental updates.
    fn brute(h: &ChannelMatrix, s: &[Complex64], c: &PskConstellation) -> (f64, f64) {
        let nt = h.antennas();
        let sys = build_alpha_matrix(h, s, c).unwrap();
        let amp = amplitude(nt);
        let (mut bl, mut bt) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for bits in 0..(1u32 << (2 * nt)) {
            let z: Vec<f64> = (0..2 * nt)
                .map(|i| if bits >> i & 1 == 1 { -amp } else { amp })
                .collect();
            bl = bl.max(sys.min_lambda(&z));
            let x = OneBitVector::from_stacked_signs(&z).unwrap();
            bt = bt.max(ci_margin(h, s, c, x.entries()));
        }
        (bl, bt)
    }

    #[test]
    fn matches_direct_enumeration() {
        let c = PskConstellation::new(8).unwrap();
        for seed in 0..5 {
            let h = sample_channel(2, 4, seed).unwrap();
            let s = [c.points()[1], c.points()[6]];
            let out = exhaustive_oracle(&h, &s, &c).unwrap();
            let (bl, bt) = brute(&h, &s, &c);
            assert!((out.best_min_lambda - bl).abs() < 1e-12);
            assert!((out.best_t - bt).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_large_arrays() {
        let h = sample_channel(2, 9, 0).unwrap();
        let c = PskConstellation::new(4).unwrap();
        let s = [c.points()[0]; 2];
        assert!(matches!(exhaustive_oracle(&h, &s, &c), Err(Error::OracleTooLarge(9))));
    }

    #[test]
    fn bounds_hold_on_a_few_instances() {
        let c = PskConstellation::new(4).unwrap();
        for i in 0..10 {
            let inst = OracleInstance::generate(4, 2, &c, 3, i).unwrap();
            assert!(inst.all_hold(), "{inst:?}");
        }
    }
}
