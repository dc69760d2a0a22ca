//! Rayleigh channel draws, favourable propagation and the CSI error model.

use onebit_ci::channel::{perturb_csi, sample_channel, CsiError};
use onebit_ci::Complex64;

fn main() -> onebit_ci::Result<()> {
    let (k, nt) = (4, 512);
    let h = sample_channel(k, nt, 7)?;
    let g = h.matrix() * h.adjoint() / Complex64::new(nt as f64, 0.0);
    println!("(1/Nt) H H^H for K={k}, Nt={nt}:");
    for r in 0..k {
        let row: Vec<String> = (0..k).map(|c| format!("{:6.3}", g[(r, c)].norm())).collect();
        println!("  {}", row.join(" "));
    }

    let rho = 10f64.powf(15.0 / 10.0);
    let err = CsiError::new(2.5, rho)?;
    let h_est = perturb_csi(&h, err, 8);
    let mse = (h_est.matrix() - h.matrix()).norm_squared() / (k * nt) as f64;
    println!(
        "beta=2.5 at 15 dB: delta = {:.4}, measured error variance {:.4}",
        err.delta(),
        mse
    );
    Ok(())
}
