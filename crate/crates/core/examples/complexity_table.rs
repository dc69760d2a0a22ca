//! Analytical flop counts for the four transmit schemes.

use onebit_ci::complexity::{complexity_table, format_log10, ratio_to_pokemon};

fn main() -> onebit_ci::Result<()> {
    println!(
        "{:>4} {:>12} {:>10} {:>10} {:>10}",
        "Nt", "exhaustive", "ci_map", "scaling", "pokemon"
    );
    for r in complexity_table(&[64, 96, 128, 256], 8, 20)? {
        println!(
            "{:>4} {:>12} {:>10.3e} {:>10.3e} {:>10.3e}",
            r.nt,
            format_log10(r.log10_exhaustive, 2),
            r.ci_mapping,
            r.symbol_scaling,
            r.pokemon
        );
    }
    println!(
        "symbol scaling / pokemon at (128, 8, 20): {:.3}",
        ratio_to_pokemon(128, 8, 20)?
    );
    Ok(())
}
