use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stream_rng, stream_seed, thread_pool, Stream};
use crate::channel::sample_channel_with;
use crate::error::{Error, Result};
use crate::linear_precoders::{ci_linear_transmit, quantized_zf, zf_direction};
use crate::modulation::PskConstellation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropositionConfig {
    /// `(nt, k)` pairs for the sign-equivalence check.
    pub pairs: Vec<[usize; 2]>,
    pub trials: usize,
    pub p0: f64,
    pub mod_order: usize,
    /// Array size of the large-system scaling check.
    pub massive_nt: usize,
    pub massive_k: usize,
    pub massive_trials: usize,
    /// Allowed relative deviation of the achieved scaling.
    pub scaling_tolerance: f64,
    #[serde(skip)]
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for PropositionConfig {
    fn default() -> Self {
        Self {
            pairs: vec![[8, 2], [64, 8]],
            trials: 1000,
            p0: 1.0,
            mod_order: 4,
            massive_nt: 512,
            massive_k: 4,
            massive_trials: 200,
            scaling_tolerance: 0.1,
            seed: 1,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropositionRow {
    /// `sign_equivalence` or `scaling_convergence`.
    pub check: &'static str,
    pub nt: usize,
    pub k: usize,
    pub trials: usize,
    pub passes: usize,
    /// Match rate, or the mean achieved-to-predicted scaling ratio.
    pub value: f64,
    pub passed: bool,
}

impl PropositionRow {
    pub const CSV_HEADER: &'static str = "check,nt,k,trials,passes,value,passed";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}\n",
            self.check, self.nt, self.k, self.trials, self.passes, self.value, self.passed
        )
    }
}

/// Runs the closed-form checks:
///
/// - `Q(W* s)` equals quantized ZF entrywise on every trial;
/// - with the transmit power fixed to `p0`, the common received scaling
///   `sqrt(p0) / ||H^+ s||` approaches `sqrt(Nt p0 / K)` for large arrays.
pub fn run_proposition_check(cfg: &PropositionConfig) -> Result<Vec<PropositionRow>> {
    if cfg.trials == 0 || cfg.massive_trials == 0 {
        return Err(Error::InvalidParameter("trial counts must be at least 1".into()));
    }
    if !(cfg.p0 > 0.0 && cfg.p0.is_finite()) {
        return Err(Error::InvalidParameter(format!("p0 must be > 0, got {}", cfg.p0)));
    }
    let c = PskConstellation::new(cfg.mod_order)?;
    let pool = thread_pool(cfg.workers)?;
    let draw = |nt: usize, k: usize, i: u64| {
        let master = stream_seed(cfg.seed, (nt as u64) << 32 | k as u64, Stream::Channel);
        let h = sample_channel_with(&mut stream_rng(master, i, Stream::Channel), k, nt)?;
        let mut rng = stream_rng(master, i, Stream::Symbols);
        let s: Vec<_> = (0..k).map(|_| c.points()[rng.random_range(0..c.order())]).collect();
        Ok::<_, Error>((h, s))
    };
    let mut rows = Vec::new();
    for &[nt, k] in &cfg.pairs {
        let matches: usize = pool.install(|| {
            (0..cfg.trials as u64)
                .into_par_iter()
                .map(|i| {
                    let (h, s) = draw(nt, k, i)?;
                    Ok(usize::from(
                        ci_linear_transmit(&h, &s, cfg.p0)? == quantized_zf(&h, &s)?,
                    ))
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))
        })?;
        rows.push(PropositionRow {
            check: "sign_equivalence",
            nt,
            k,
            trials: cfg.trials,
            passes: matches,
            value: matches as f64 / cfg.trials as f64,
            passed: matches == cfg.trials,
        });
    }
    let (nt, k) = (cfg.massive_nt, cfg.massive_k);
    let predicted = (nt as f64 * cfg.p0 / k as f64).sqrt();
    let ratios: Vec<f64> = pool.install(|| {
        (0..cfg.massive_trials as u64)
            .into_par_iter()
            .map(|i| {
                let (h, s) = draw(nt, k, i)?;
                Ok(cfg.p0.sqrt() / zf_direction(&h, &s)?.norm() / predicted)
            })
            .collect::<Result<_>>()
    })?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    rows.push(PropositionRow {
        check: "scaling_convergence",
        nt,
        k,
        trials: ratios.len(),
        passes: ratios
            .iter()
            .filter(|r| (*r - 1.0).abs() <= cfg.scaling_tolerance)
            .count(),
        value: mean,
        passed: (mean - 1.0).abs() <= cfg.scaling_tolerance,
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_check_passes() {
        let cfg = PropositionConfig {
            pairs: vec![[4, 2]],
            trials: 50,
            massive_nt: 256,
            massive_trials: 20,
            ..PropositionConfig::default()
        };
        let rows = run_proposition_check(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.passed), "{rows:?}");
    }
}
