//! Fraction of relaxed LP components left strictly inside the box.

use onebit_ci::sim::{run_eta_experiment, EtaConfig};

fn main() -> onebit_ci::Result<()> {
    let cfg = EtaConfig {
        nt_list: vec![16, 32, 64, 128],
        realizations: 100,
        ..EtaConfig::default()
    };
    for row in run_eta_experiment(&cfg)? {
        println!(
            "Nt={:>3} K={}: eta = {:5.2}%  (reference (2K-1)/(2Nt) = {:5.2}%)",
            row.nt,
            row.k,
            100.0 * row.mean_eta,
            100.0 * (2 * row.k - 1) as f64 / (2 * row.nt) as f64
        );
    }
    Ok(())
}
