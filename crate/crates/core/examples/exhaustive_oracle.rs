//! Exhaustive search against the relaxed LP and symbol scaling.

use onebit_ci::modulation::PskConstellation;
use onebit_ci::sim::OracleInstance;

fn main() -> onebit_ci::Result<()> {
    let c = PskConstellation::new(4)?;
    for i in 0..5 {
        let inst = OracleInstance::generate(6, 2, &c, 1, i)?;
        println!(
            "instance {i}: {} candidates, best t {:.4} <= relaxed {:.4}; scaling min(Lambda) {:.4} <= best {:.4}",
            inst.oracle.candidates,
            inst.oracle.best_t,
            inst.t_relaxed,
            inst.scaling_min_lambda,
            inst.oracle.best_min_lambda
        );
    }
    Ok(())
}
