//! The interior-point LP solver on a small bounded problem.

use onebit_ci::lp::{solve_lp, LinearProgram};

fn main() {
    // maximize 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6,  0 <= x <= 3,  y >= 0
    let mut p = LinearProgram::new(2).maximize(vec![3.0, 2.0]);
    p.add_inequality(vec![1.0, 1.0], 4.0);
    p.add_inequality(vec![1.0, 3.0], 6.0);
    p.set_bounds(0, 0.0, 3.0);
    p.set_bounds(1, 0.0, f64::INFINITY);
    let sol = solve_lp(&p);
    println!(
        "{:?} after {} iterations: z = ({:.6}, {:.6}), objective {:.6}, gap {:.1e}",
        sol.status, sol.iterations, sol.z[0], sol.z[1], sol.objective, sol.relative_gap
    );

    let mut q = LinearProgram::new(1).maximize(vec![1.0]);
    q.add_inequality(vec![-1.0], -2.0);
    q.set_bounds(0, 0.0, 1.0);
    println!("x >= 2 with x <= 1: {:?}", solve_lp(&q).status);
}
