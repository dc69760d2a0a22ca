//! 8-PSK constellation: points, threshold bases, Gray labels and detection.

use onebit_ci::modulation::PskConstellation;
use onebit_ci::Complex64;

fn main() -> onebit_ci::Result<()> {
    let c = PskConstellation::new(8)?;
    println!("threshold angle = {:.4} rad", c.threshold_angle());
    for i in 0..c.order() {
        let s = c.point(i)?;
        let b = c.bases_for(i)?;
        println!(
            "s{i} = {:+.4}{:+.4}j  gray {:?}  s_re = {:+.4}{:+.4}j  s_im = {:+.4}{:+.4}j",
            s.re,
            s.im,
            c.gray_bits(i),
            b.a,
            b.b,
            b.c,
            b.d
        );
    }

    // a point pushed outward along both bases stays in its sector
    let b = c.bases_for(2)?;
    let y = b.re_basis() * 1.7 + b.im_basis() * 1.2;
    let (ar, ai) = b.coordinates(y);
    println!("alpha = ({ar:.2}, {ai:.2}) -> detected {}", c.detect(y).index);
    println!("y = 0 -> {:?}", c.detect(Complex64::new(0.0, 0.0)));
    Ok(())
}
