use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stream_rng, thread_pool, Scheme, Stream};
use crate::channel::{complex_gaussian, complex_gaussian_matrix, perturb_with, sample_channel_with, ChannelMatrix};
use crate::error::{Error, Result};
use crate::modulation::PskConstellation;
use crate::Complex64;

/// Parameters of a BER-versus-SNR sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerConfig {
    pub nt: usize,
    pub k: usize,
    pub mod_order: usize,
    /// Transmit SNR points `rho` in dB.
    pub snr_db: Vec<f64>,
    /// Symbol frames per SNR point.
    pub frames: usize,
    #[serde(skip)]
    pub seed: u64,
    #[serde(with = "scheme_names")]
    pub schemes: Vec<Scheme>,
    /// CSI error coefficient; `0` means perfect CSI.
    pub beta: f64,
    /// Power budget of the closed-form CI beamformer.
    pub p0: f64,
    /// Drop the receiver noise entirely.
    pub noiseless: bool,
    /// Consecutive frames sharing one channel draw.
    pub channel_block: usize,
    /// Worker threads; `0` uses every available core.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for BerConfig {
    fn default() -> Self {
        Self {
            nt: 128,
            k: 16,
            mod_order: 4,
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            frames: 1000,
            seed: 1,
            schemes: vec![
                Scheme::ZfFd,
                Scheme::QuantizedZf,
                Scheme::CiMapping,
                Scheme::SymbolScaling,
                Scheme::SumMax,
                Scheme::MaxMin,
            ],
            beta: 0.0,
            p0: 1.0,
            noiseless: false,
            channel_block: 1,
            workers: 0,
        }
    }
}

impl BerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.k == 0 || self.k > self.nt {
            return bad(format!("need 1 <= k <= nt, got k={}, nt={}", self.k, self.nt));
        }
        PskConstellation::new(self.mod_order)?;
        if self.snr_db.is_empty() {
            return bad("snr_db must not be empty".into());
        }
        if let Some(v) = self.snr_db.iter().find(|v| !v.is_finite()) {
            return bad(format!("snr_db entries must be finite, got {v}"));
        }
        if self.frames == 0 {
            return bad("frames must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return bad("schemes must not be empty".into());
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(self.p0 > 0.0 && self.p0.is_finite()) {
            return bad(format!("p0 must be > 0, got {}", self.p0));
        }
        if self.channel_block == 0 {
            return bad("channel_block must be at least 1".into());
        }
        Ok(())
    }
}

mod scheme_names {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::Scheme;

    pub fn serialize<S: Serializer>(v: &[Scheme], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.name()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scheme>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|n| n.parse().map_err(D::Error::custom))
            .collect()
    }
}

/// Counts for one `(scheme, SNR)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    /// Frames that contributed bits.
    pub frames: u64,
    /// Frames skipped because some scheme failed on them.
    pub failures: u64,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    /// Binomial standard error of [`ber`](Self::ber).
    pub fn std_error(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        let p = self.ber();
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }
}

/// Sweep result, ordered by configured scheme then ascending SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub const CSV_HEADER: &'static str = "scheme,snr_db,bits,bit_errors,ber,frames,failures";

    pub fn get(&self, scheme: Scheme, snr_db: f64) -> Option<&BerPoint> {
        self.points.iter().find(|p| p.scheme == scheme && p.snr_db == snr_db)
    }

    pub fn scheme(&self, scheme: Scheme) -> impl Iterator<Item = &BerPoint> {
        self.points.iter().filter(move |p| p.scheme == scheme)
    }

    /// Header plus one line per point, LF-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.scheme,
                p.snr_db,
                p.bits,
                p.bit_errors,
                p.ber(),
                p.frames,
                p.failures
            ));
        }
        out
    }
}

/// Integer counters of a batch of frames; merging is order-independent.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    /// Indexed `scheme * n_snr + snr`.
    errors: Vec<u64>,
    frames: Vec<u64>,
    failures: Vec<u64>,
}

impl Tally {
    fn zero(n_schemes: usize, n_snr: usize) -> Self {
        Self {
            errors: vec![0; n_schemes * n_snr],
            frames: vec![0; n_snr],
            failures: vec![0; n_snr],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.errors.iter_mut().zip(other.errors) {
            *a += b;
        }
        for (a, b) in self.frames.iter_mut().zip(other.frames) {
            *a += b;
        }
        for (a, b) in self.failures.iter_mut().zip(other.failures) {
            *a += b;
        }
        self
    }
}

struct Frame {
    indices: Vec<usize>,
    symbols: Vec<Complex64>,
    h: ChannelMatrix,
    csi_unit: Option<nalgebra::DMatrix<Complex64>>,
    noise: Vec<Complex64>,
}

fn draw_frame(cfg: &BerConfig, c: &PskConstellation, f: u64) -> Result<Frame> {
    let mut rng = stream_rng(cfg.seed, f, Stream::Symbols);
    let bits = c.bits_per_symbol();
    let indices: Vec<usize> = (0..cfg.k)
        .map(|_| {
            let label = (0..bits).fold(0usize, |l, _| (l << 1) | usize::from(rng.random::<bool>()));
            c.index_for_label(label)
        })
        .collect();
    let symbols = indices.iter().map(|&i| c.points()[i]).collect();
    let block = f / cfg.channel_block as u64;
    let h = sample_channel_with(&mut stream_rng(cfg.seed, block, Stream::Channel), cfg.k, cfg.nt)?;
    let csi_unit = (cfg.beta > 0.0)
        .then(|| complex_gaussian_matrix(&mut stream_rng(cfg.seed, f, Stream::Csi), cfg.k, cfg.nt, 1.0));
    let mut rng = stream_rng(cfg.seed, f, Stream::Noise);
    let noise = (0..cfg.k).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    Ok(Frame {
        indices,
        symbols,
        h,
        csi_unit,
        noise,
    })
}

fn simulate_frame(cfg: &BerConfig, c: &PskConstellation, snr_db: &[f64], f: u64) -> Result<Tally> {
    let ns = cfg.schemes.len();
    let nr = snr_db.len();
    let mut tally = Tally::zero(ns, nr);
    let frame = draw_frame(cfg, c, f)?;
    let precode_all = |h_est: &ChannelMatrix| -> Option<Vec<Vec<Complex64>>> {
        cfg.schemes
            .iter()
            .map(|s| s.precode(h_est, &frame.symbols, c, cfg.p0).ok())
            .collect()
    };
    // with perfect CSI the transmit vectors do not depend on the SNR
    let shared = if frame.csi_unit.is_none() {
        Some(precode_all(&frame.h))
    } else {
        None
    };
    for (r, &snr) in snr_db.iter().enumerate() {
        let rho = 10f64.powf(snr / 10.0);
        let own;
        let transmit = match (&shared, &frame.csi_unit) {
            (Some(t), _) => t,
            (None, Some(unit)) => {
                own = precode_all(&perturb_with(&frame.h, cfg.beta / rho, unit));
                &own
            }
            (None, None) => unreachable!(),
        };
        let Some(transmit) = transmit else {
            tally.failures[r] += 1;
            continue;
        };
        tally.frames[r] += 1;
        let amp = rho.sqrt();
        for (si, x) in transmit.iter().enumerate() {
            let mut errors = 0u64;
            for user in 0..cfg.k {
                let rx: Complex64 = frame.h.row(user).iter().zip(x).map(|(h, x)| h * x).sum();
                let mut y = rx * amp;
                if !cfg.noiseless {
                    y += frame.noise[user];
                }
                let det = c.detect(y);
                errors += u64::from(c.bit_errors(frame.indices[user], det.index));
            }
            tally.errors[si * nr + r] += errors;
        }
    }
    Ok(tally)
}

/// Runs the sweep. Identical configurations give identical counts whatever
/// the number of workers.
pub fn run_ber_sweep(cfg: &BerConfig) -> Result<BerCurve> {
    cfg.validate()?;
    let c = PskConstellation::new(cfg.mod_order)?;
    let mut snr_db = cfg.snr_db.clone();
    snr_db.sort_by(f64::total_cmp);
    snr_db.dedup();
    let ns = cfg.schemes.len();
    let nr = snr_db.len();
    let pool = thread_pool(cfg.workers)?;
    let tally = pool.install(|| {
        (0..cfg.frames as u64)
            .into_par_iter()
            .map(|f| simulate_frame(cfg, &c, &snr_db, f))
            .try_reduce(|| Tally::zero(ns, nr), |a, b| Ok(a.merge(b)))
    })?;
    let bits_per_frame = (cfg.k * c.bits_per_symbol()) as u64;
    let mut points = Vec::with_capacity(ns * nr);
    for (si, &scheme) in cfg.schemes.iter().enumerate() {
        for (r, &snr) in snr_db.iter().enumerate() {
            points.push(BerPoint {
                scheme,
                snr_db: snr,
                bits: tally.frames[r] * bits_per_frame,
                bit_errors: tally.errors[si * nr + r],
                frames: tally.frames[r],
                failures: tally.failures[r],
            });
        }
    }
    Ok(BerCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BerConfig {
        BerConfig {
            nt: 8,
            k: 2,
            snr_db: vec![10.0, 0.0],
            frames: 40,
            seed: 5,
            schemes: vec![Scheme::QuantizedZf, Scheme::ZfFd, Scheme::SymbolScaling],
            workers: 1,
            ..BerConfig::default()
        }
    }

    #[test]
    fn noiseless_zf_is_error_free() {
        let cfg = BerConfig {
            noiseless: true,
            schemes: vec![Scheme::ZfFd],
            mod_order: 8,
            ..small()
        };
        let curve = run_ber_sweep(&cfg).unwrap();
        assert!(curve.points.iter().all(|p| p.bit_errors == 0 && p.bits == 40 * 2 * 3));
    }

    #[test]
    fn rows_follow_scheme_order_then_snr() {
        let curve = run_ber_sweep(&small()).unwrap();
        let keys: Vec<(Scheme, f64)> = curve.points.iter().map(|p| (p.scheme, p.snr_db)).collect();
        assert_eq!(
            keys,
            vec![
                (Scheme::QuantizedZf, 0.0),
                (Scheme::QuantizedZf, 10.0),
                (Scheme::ZfFd, 0.0),
                (Scheme::ZfFd, 10.0),
                (Scheme::SymbolScaling, 0.0),
                (Scheme::SymbolScaling, 10.0),
            ]
        );
        let csv = curve.to_csv();
        assert!(csv.starts_with("scheme,snr_db,bits,bit_errors,ber,frames,failures\nquantized_zf,0,"));
        assert_eq!(csv.lines().count(), 7);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let a = run_ber_sweep(&small()).unwrap();
        let b = run_ber_sweep(&BerConfig { workers: 3, ..small() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn channel_blocks_reuse_draws() {
        let cfg = BerConfig {
            channel_block: 4,
            ..small()
        };
        let c = PskConstellation::new(4).unwrap();
        let f0 = draw_frame(&cfg, &c, 0).unwrap();
        let f3 = draw_frame(&cfg, &c, 3).unwrap();
        let f4 = draw_frame(&cfg, &c, 4).unwrap();
        assert_eq!(f0.h, f3.h);
        assert_ne!(f0.h, f4.h);
        assert_ne!(f0.noise, f3.noise);
    }

    #[test]
    fn imperfect_csi_runs() {
        let cfg = BerConfig { beta: 2.5, ..small() };
        let curve = run_ber_sweep(&cfg).unwrap();
        assert!(curve.points.iter().all(|p| (0.0..=1.0).contains(&p.ber())));
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            BerConfig { k: 9, ..small() },
            BerConfig { frames: 0, ..small() },
            BerConfig {
                snr_db: vec![],
                ..small()
            },
            BerConfig {
                mod_order: 3,
                ..small()
            },
            BerConfig { beta: -1.0, ..small() },
            BerConfig {
                channel_block: 0,
                ..small()
            },
            BerConfig {
                schemes: vec![],
                ..small()
            },
        ] {
            assert!(run_ber_sweep(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn standard_error() {
        let p = BerPoint {
            scheme: Scheme::ZfFd,
            snr_db: 0.0,
            bits: 100,
            bit_errors: 25,
            frames: 50,
            failures: 0,
        };
        assert_eq!(p.ber(), 0.25);
        assert!((p.std_error() - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }
}
