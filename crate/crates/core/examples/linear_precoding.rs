//! ZF, quantized ZF and the closed-form CI beamformer on one channel draw.

use onebit_ci::channel::sample_channel;
use onebit_ci::linear_precoders::{ci_linear_matrix, ci_linear_transmit, quantized_zf, zf_precode_fd};
use onebit_ci::modulation::PskConstellation;
use onebit_ci::Complex64;

fn main() -> onebit_ci::Result<()> {
    let c = PskConstellation::new(4)?;
    let h = sample_channel(4, 32, 3)?;
    let s: Vec<Complex64> = [0, 3, 1, 2].iter().map(|&i| c.points()[i]).collect();

    let x = zf_precode_fd(&h, &s)?;
    for k in 0..h.users() {
        let rx: Complex64 = (0..h.antennas()).map(|n| h[(k, n)] * x[n]).sum();
        println!("user {k}: H x / s = {:.4}", rx / s[k]);
    }

    let w = ci_linear_matrix(&h, &s, 1.0)?;
    println!("W* is {}x{}", w.nrows(), w.ncols());
    let same = ci_linear_transmit(&h, &s, 1.0)? == quantized_zf(&h, &s)?;
    println!("Q(W* s) == quantized ZF: {same}");
    Ok(())
}
