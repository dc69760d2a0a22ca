//! The 1-bit quantizer and the alphabet check used for the relaxation ratio.

use onebit_ci::quantizer::{amplitude, is_valid_output, quantize};
use onebit_ci::Complex64;

fn main() {
    let v = [
        Complex64::new(0.3, -2.0),
        Complex64::new(-0.0, 0.1),
        Complex64::new(-5.0, 0.0),
        Complex64::new(1e-9, -1e-9),
    ];
    let q = quantize(&v);
    println!("amplitude 1/sqrt(2Nt) = {:.4}", amplitude(v.len()));
    for (a, b) in v.iter().zip(q.entries()) {
        println!("{a:>12.3e} -> {:+.4}{:+.4}j", b.re, b.im);
    }
    println!("||Q(v)||^2 = {}", q.norm_sqr());

    let amp = amplitude(2);
    let relaxed = [Complex64::new(amp, -amp * 0.5), Complex64::new(-amp, amp)];
    let check = is_valid_output(&relaxed);
    println!("relaxed vector: {check:?}, eta = {}", check.eta());
}
