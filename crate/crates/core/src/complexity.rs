//! Analytical floating-point operation counts of the transmit schemes.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Enumeration of all `4^Nt` 1-bit vectors.
    Exhaustive,
    /// Interior-point solution of the relaxed LP plus normalization.
    CiMapping,
    /// Three-stage symbol scaling.
    SymbolScaling,
    /// The biconvex-relaxation baseline with `n_max` iterations.
    Pokemon,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Exhaustive,
        Scheme::CiMapping,
        Scheme::SymbolScaling,
        Scheme::Pokemon,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Exhaustive => "exhaustive",
            Scheme::CiMapping => "ci_mapping",
            Scheme::SymbolScaling => "symbol_scaling",
            Scheme::Pokemon => "pokemon",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown complexity scheme '{s}'")))
    }
}

fn validate(nt: usize, k: usize, n_max: usize) -> Result<()> {
    if k == 0 || nt < k {
        return Err(Error::InvalidParameter(format!(
            "need Nt >= K >= 1, got Nt={nt}, K={k}"
        )));
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    Ok(())
}

/// `log10` of the operation count; finite for every scheme and size.
pub fn log10_flops(scheme: Scheme, nt: usize, k: usize, n_max: usize) -> Result<f64> {
    validate(nt, k, n_max)?;
    let (ntf, kf) = (nt as f64, k as f64);
    Ok(match scheme {
        // 8 K Nt 2^(2 Nt)
        Scheme::Exhaustive => (8.0 * kf * ntf).log10() + 2.0 * ntf * 2f64.log10(),
        _ => flops(scheme, nt, k, n_max)?.log10(),
    })
}

/// Operation count of `scheme`. The exhaustive count is evaluated in the
/// log domain above 50 antennas and overflows to infinity past ~500.
pub fn flops(scheme: Scheme, nt: usize, k: usize, n_max: usize) -> Result<f64> {
    validate(nt, k, n_max)?;
    let (ntf, kf) = (nt as f64, k as f64);
    Ok(match scheme {
        Scheme::Exhaustive if nt > 50 => 10f64.powf(log10_flops(scheme, nt, k, n_max)?),
        Scheme::Exhaustive => 8.0 * kf * ntf * 2f64.powi(2 * nt as i32),
        Scheme::CiMapping => 8.0 * SQRT_2 * (kf + ntf).powf(1.5) * ntf * ntf + 2.0 * ntf,
        Scheme::SymbolScaling => symbol_scaling_stages(nt, k).total(),
        Scheme::Pokemon => n_max as f64 * (8.0 * ntf * ntf + 4.0 * ntf),
    })
}

/// Per-stage counts of the symbol scaling scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolScalingStages {
    /// Accumulating `t`: `8 K Nt`.
    pub accumulate: f64,
    /// Max-min search, worst case of one initialized column:
    /// `(2Nt - 1)(2K + 2Nt)`.
    pub maxmin: f64,
    /// One refinement pass: `8 Nt^2`, run for both candidates.
    pub refine: f64,
}

impl SymbolScalingStages {
    pub fn total(&self) -> f64 {
        self.accumulate + self.maxmin + 2.0 * self.refine
    }
}

pub fn symbol_scaling_stages(nt: usize, k: usize) -> SymbolScalingStages {
    let (ntf, kf) = (nt as f64, k as f64);
    SymbolScalingStages {
        accumulate: 8.0 * kf * ntf,
        maxmin: (2.0 * ntf - 1.0) * (2.0 * kf + 2.0 * ntf),
        refine: 8.0 * ntf * ntf,
    }
}

/// Large-array form of the symbol scaling count, `20 Nt^2 + 12 K Nt`.
pub fn symbol_scaling_flops_approx(nt: usize, k: usize) -> f64 {
    let (ntf, kf) = (nt as f64, k as f64);
    20.0 * ntf * ntf + 12.0 * kf * ntf
}

/// Symbol scaling cost over the Pokemon cost; tends to `2.5 / n_max`.
pub fn ratio_to_pokemon(nt: usize, k: usize, n_max: usize) -> Result<f64> {
    Ok(flops(Scheme::SymbolScaling, nt, k, n_max)? / flops(Scheme::Pokemon, nt, k, n_max)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub nt: usize,
    pub k: usize,
    pub n_max: usize,
    pub log10_exhaustive: f64,
    pub ci_mapping: f64,
    pub symbol_scaling: f64,
    pub symbol_scaling_approx: f64,
    pub pokemon: f64,
    pub ratio_to_pokemon: f64,
}

impl ComplexityRow {
    pub fn exhaustive(&self) -> f64 {
        10f64.powf(self.log10_exhaustive)
    }
}

pub fn complexity_table(nts: &[usize], k: usize, n_max: usize) -> Result<Vec<ComplexityRow>> {
    nts.iter()
        .map(|&nt| {
            Ok(ComplexityRow {
                nt,
                k,
                n_max,
                log10_exhaustive: log10_flops(Scheme::Exhaustive, nt, k, n_max)?,
                ci_mapping: flops(Scheme::CiMapping, nt, k, n_max)?,
                symbol_scaling: flops(Scheme::SymbolScaling, nt, k, n_max)?,
                symbol_scaling_approx: symbol_scaling_flops_approx(nt, k),
                pokemon: flops(Scheme::Pokemon, nt, k, n_max)?,
                ratio_to_pokemon: ratio_to_pokemon(nt, k, n_max)?,
            })
        })
        .collect()
}

/// Formats `10^log10` as a mantissa with `decimals` digits and an exponent,
/// e.g. `1.39e42`, without leaving the log domain.
pub fn format_log10(log10: f64, decimals: usize) -> String {
    let mut exp = log10.floor();
    let mut mant = 10f64.powf(log10 - exp);
    let scale = 10f64.powi(decimals as i32);
    if (mant * scale).round() >= 10.0 * scale {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{mant:.decimals$}e{}", exp as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exhaustive_is_exact() {
        // Nt = 2, K = 1: 8 * 2 * 16
        assert_eq!(flops(Scheme::Exhaustive, 2, 1, 1).unwrap(), 256.0);
        let direct = flops(Scheme::Exhaustive, 50, 4, 1).unwrap();
        let via_log = 10f64.powf(log10_flops(Scheme::Exhaustive, 50, 4, 1).unwrap());
        assert!((direct - via_log).abs() / direct < 1e-12);
    }

    #[test]
    fn stage_sum_matches_closed_form() {
        let s = symbol_scaling_stages(128, 8);
        assert_eq!(s.total(), 8192.0 + 255.0 * 272.0 + 2.0 * 131072.0);
        assert_eq!(symbol_scaling_flops_approx(128, 8), 339_968.0);
    }

    #[test]
    fn ratio_is_consistent() {
        let r = ratio_to_pokemon(128, 8, 20).unwrap();
        let direct = flops(Scheme::SymbolScaling, 128, 8, 20).unwrap() / flops(Scheme::Pokemon, 128, 8, 20).unwrap();
        assert!((r - direct).abs() < 1e-12);
    }

    #[test]
    fn invalid_sizes() {
        assert!(flops(Scheme::CiMapping, 4, 8, 1).is_err());
        assert!(flops(Scheme::Pokemon, 8, 4, 0).is_err());
        assert!("nope".parse::<Scheme>().is_err());
        assert_eq!("pokemon".parse::<Scheme>().unwrap(), Scheme::Pokemon);
    }

    #[test]
    fn log_formatting() {
        assert_eq!(format_log10(42.0_f64 + 1.39f64.log10(), 2), "1.39e42");
        assert_eq!(format_log10(3.0, 2), "1.00e3");
        assert_eq!(format_log10(0.9999999f64.log10() + 5.0, 2), "1.00e5");
        assert_eq!(format_log10(2.5f64.log10(), 4), "2.5000e0");
    }
}
