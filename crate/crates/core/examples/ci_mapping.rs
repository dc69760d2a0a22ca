//! Relaxed constructive-interference LP followed by normalization.

use onebit_ci::channel::sample_channel;
use onebit_ci::ci_mapping::{ci_map_transmit, ci_margin};
use onebit_ci::modulation::PskConstellation;
use onebit_ci::Complex64;

fn main() -> onebit_ci::Result<()> {
    let c = PskConstellation::new(8)?;
    for nt in [16, 64, 128] {
        let h = sample_channel(4, nt, nt as u64)?;
        let s: Vec<Complex64> = [1, 4, 6, 7].iter().map(|&i| c.points()[i]).collect();
        let out = ci_map_transmit(&h, &s, &c)?;
        let t_final = ci_margin(&h, &s, &c, out.transmit.entries());
        println!(
            "Nt={nt:>3}: relaxed t = {:.4}, after normalization t = {:.4}, eta = {:.2}%, {} LP iterations",
            out.t_relaxed,
            t_final,
            100.0 * out.eta,
            out.lp_iterations
        );
    }
    Ok(())
}
