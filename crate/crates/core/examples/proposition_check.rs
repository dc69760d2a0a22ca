//! The closed-form CI beamformer against quantized ZF.

use onebit_ci::sim::{run_proposition_check, PropositionConfig};

fn main() -> onebit_ci::Result<()> {
    let cfg = PropositionConfig {
        trials: 200,
        massive_trials: 50,
        ..PropositionConfig::default()
    };
    for r in run_proposition_check(&cfg)? {
        println!(
            "{:<20} Nt={:>3} K={}: {}/{} value {:.4}",
            r.check, r.nt, r.k, r.passes, r.trials, r.value
        );
    }
    Ok(())
}
