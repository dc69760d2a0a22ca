//! The three stages of symbol scaling on one instance.

use onebit_ci::channel::sample_channel;
use onebit_ci::modulation::PskConstellation;
use onebit_ci::symbol_scaling::{
    allocate_maxmin, allocate_summax, build_alpha_matrix, init_stage, refine_traced, symbol_scale_system, InitSign,
    ScalingOptions,
};
use onebit_ci::Complex64;

fn main() -> onebit_ci::Result<()> {
    let c = PskConstellation::new(4)?;
    let h = sample_channel(2, 8, 12)?;
    let s: Vec<Complex64> = vec![c.points()[0], c.points()[3]];
    let sys = build_alpha_matrix(&h, &s, &c)?;

    let state = init_stage(&sys, InitSign::Literal);
    println!("initialized {} of {} entries", state.allocated_count(), sys.width());
    for (name, x) in [
        ("sum-max", allocate_summax(&state, &sys)),
        ("max-min", allocate_maxmin(&state, &sys)),
    ] {
        let (refined, history) = refine_traced(&x, &sys);
        println!(
            "{name}: min(Lambda) {:.4} -> {:.4} after refinement ({} flips kept)",
            sys.min_lambda(&x),
            sys.min_lambda(&refined),
            x.iter().zip(&refined).filter(|(a, b)| a != b).count()
        );
        assert!(history.windows(2).all(|w| w[1] >= w[0]));
    }

    let out = symbol_scale_system(&sys, ScalingOptions::default())?;
    println!("chosen {:?} with min(Lambda) = {:.4}", out.chosen, out.min_lambda);
    Ok(())
}
