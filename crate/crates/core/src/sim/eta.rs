use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stream_rng, stream_seed, thread_pool, Stream};
use crate::channel::sample_channel_with;
use crate::ci_mapping::ci_map_transmit;
use crate::error::{Error, Result};
use crate::modulation::PskConstellation;

/// Relaxation-tightness study: mean fraction of LP components left inside
/// the box, per antenna count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EtaConfig {
    pub nt_list: Vec<usize>,
    pub k: usize,
    pub mod_order: usize,
    pub realizations: usize,
    #[serde(skip)]
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for EtaConfig {
    fn default() -> Self {
        Self {
            nt_list: vec![16, 32, 48, 64, 80, 96, 112, 128],
            k: 4,
            mod_order: 4,
            realizations: 500,
            seed: 1,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaRow {
    pub nt: usize,
    pub k: usize,
    /// Realizations whose LP solved.
    pub realizations: usize,
    /// LP failures, excluded from the mean.
    pub failures: usize,
    pub mean_eta: f64,
    pub mean_iterations: f64,
}

impl EtaRow {
    pub const CSV_HEADER: &'static str = "nt,k,realizations,failures,eta,eta_percent,mean_lp_iterations";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.2}\n",
            self.nt,
            self.k,
            self.realizations,
            self.failures,
            self.mean_eta,
            100.0 * self.mean_eta,
            self.mean_iterations
        )
    }
}

/// `(interior components, LP iterations, solved, failed)`
type Counts = (u64, u64, u64, u64);

pub fn run_eta_experiment(cfg: &EtaConfig) -> Result<Vec<EtaRow>> {
    if cfg.nt_list.is_empty() || cfg.realizations == 0 {
        return Err(Error::InvalidParameter(
            "need at least one nt and one realization".into(),
        ));
    }
    if let Some(nt) = cfg.nt_list.iter().find(|&&nt| cfg.k == 0 || nt < cfg.k) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= nt, got k={}, nt={nt}",
            cfg.k
        )));
    }
    let c = PskConstellation::new(cfg.mod_order)?;
    let pool = thread_pool(cfg.workers)?;
    cfg.nt_list
        .iter()
        .map(|&nt| {
            let master = stream_seed(cfg.seed, nt as u64, Stream::Channel);
            let one = |r: u64| -> Result<Counts> {
                let h = sample_channel_with(&mut stream_rng(master, r, Stream::Channel), cfg.k, nt)?;
                let mut rng = stream_rng(master, r, Stream::Symbols);
                let s: Vec<_> = (0..cfg.k).map(|_| c.points()[rng.random_range(0..c.order())]).collect();
                Ok(match ci_map_transmit(&h, &s, &c) {
                    Ok(out) => (
                        (out.check.interior_re + out.check.interior_im) as u64,
                        out.lp_iterations as u64,
                        1,
                        0,
                    ),
                    Err(_) => (0, 0, 0, 1),
                })
            };
            let (interior, iters, ok, failed) = pool.install(|| {
                (0..cfg.realizations as u64)
                    .into_par_iter()
                    .map(one)
                    .try_reduce(|| (0, 0, 0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3)))
            })?;
            let denom = ok.max(1) as f64;
            Ok(EtaRow {
                nt,
                k: cfg.k,
                realizations: ok as usize,
                failures: failed as usize,
                mean_eta: interior as f64 / (denom * 2.0 * nt as f64),
                mean_iterations: iters as f64 / denom,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_deterministic() {
        let cfg = EtaConfig {
            nt_list: vec![8, 16],
            realizations: 20,
            workers: 1,
            ..EtaConfig::default()
        };
        let a = run_eta_experiment(&cfg).unwrap();
        let b = run_eta_experiment(&EtaConfig { workers: 2, ..cfg }).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.failures == 0 && r.realizations == 20));
        assert!(a[0].mean_eta > a[1].mean_eta);
    }

    #[test]
    fn rejects_bad_sizes() {
        let cfg = EtaConfig {
            nt_list: vec![2],
            ..EtaConfig::default()
        };
        assert!(run_eta_experiment(&cfg).is_err());
    }
}
