//! A short BER sweep at a small array size, printed as CSV.

use onebit_ci::sim::{run_ber_sweep, BerConfig, Scheme};

fn main() -> onebit_ci::Result<()> {
    let cfg = BerConfig {
        nt: 16,
        k: 4,
        snr_db: vec![0.0, 5.0, 10.0, 15.0],
        frames: 500,
        seed: 11,
        schemes: vec![
            Scheme::ZfFd,
            Scheme::QuantizedZf,
            Scheme::CiMapping,
            Scheme::SymbolScaling,
        ],
        ..BerConfig::default()
    };
    print!("{}", run_ber_sweep(&cfg)?.to_csv());
    Ok(())
}
