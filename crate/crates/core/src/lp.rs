//! Dense primal-dual interior-point solver for small linear programs.
//!
//! Problems are stated as
//!
//! ```text
//! maximize    c^T z
//! subject to  A z <= b
//!             lo <= z <= hi      (infinite bounds allowed)
//! ```
//!
//! Internally the problem is shifted to nonnegative variables with optional
//! upper bounds, slack variables turn the rows into equalities, and the
//! homogeneous self-dual embedding is solved with Mehrotra's
//! predictor-corrector. Upper bounds are kept out of the constraint matrix,
//! so every Newton step factors an `m x m` normal matrix where `m` is the
//! number of inequality rows. The embedding yields infeasibility and
//! unboundedness certificates without a separate phase one.

use nalgebra::{DMatrix, DVector};

/// Termination state of [`solve_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Relative primal, dual and gap tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the boundary taken per step.
    pub step_damping: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 200,
            step_damping: 0.99,
        }
    }
}

/// A dense linear program in maximization form.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// `n` free variables, zero objective and no rows.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            rows: Vec::new(),
            rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn num_inequalities(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Sets the objective to maximize.
    pub fn maximize(mut self, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), self.objective.len(), "objective length");
        self.objective = c;
        self
    }

    /// Adds `row . z <= rhs`.
    pub fn add_inequality(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.objective.len(), "row length");
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lower[j] = lo;
        self.upper[j] = hi;
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        dot(&self.objective, z)
    }

    /// Largest violation of any row or bound at `z`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let rows = self.rows.iter().zip(&self.rhs).map(|(r, b)| dot(r, z) - b);
        let bounds = z
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .flat_map(|(v, (lo, hi))| [lo - v, v - hi]);
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point in the original variables (meaningful when optimal).
    pub z: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Largest constraint violation relative to `1 + |b|_inf`.
    pub primal_residual: f64,
    /// `|primal - dual| / (1 + |primal|)`.
    pub relative_gap: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How an original variable is expressed through standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `z = offset + scale * x[col]`
    Shift {
        col: usize,
        offset: f64,
        scale: f64,
    },
    /// `z = x[pos] - x[neg]`
    Split {
        pos: usize,
        neg: usize,
    },
    Fixed(f64),
}

/// `min c^T x  s.t.  A x = b,  x >= 0,  x_j <= 1 for j in bounded`.
struct StandardForm {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    /// Indicator of the unit upper bound per column.
    bounded: Vec<bool>,
    map: Vec<VarMap>,
}

impl StandardForm {
    fn build(p: &LinearProgram) -> Option<Self> {
        let n = p.num_variables();
        let m = p.num_inequalities();
        let mut map = Vec::with_capacity(n);
        let mut cols: Vec<(usize, f64)> = Vec::new(); // (original var, coefficient)
        let mut bounded = Vec::new();
        let mut c = Vec::new();
        for j in 0..n {
            let (lo, hi) = (p.lower[j], p.upper[j]);
            if lo > hi {
                return None;
            }
            let cj = -p.objective[j];
            if lo == hi {
                map.push(VarMap::Fixed(lo));
            } else if lo.is_finite() {
                let scale = if hi.is_finite() { hi - lo } else { 1.0 };
                map.push(VarMap::Shift {
                    col: cols.len(),
                    offset: lo,
                    scale,
                });
                cols.push((j, scale));
                bounded.push(hi.is_finite());
                c.push(cj * scale);
            } else if hi.is_finite() {
                map.push(VarMap::Shift {
                    col: cols.len(),
                    offset: hi,
                    scale: -1.0,
                });
                cols.push((j, -1.0));
                bounded.push(false);
                c.push(-cj);
            } else {
                map.push(VarMap::Split {
                    pos: cols.len(),
                    neg: cols.len() + 1,
                });
                cols.push((j, 1.0));
                cols.push((j, -1.0));
                bounded.extend([false, false]);
                c.extend([cj, -cj]);
            }
        }
        let nvar = cols.len();
        let ncol = nvar + m;
        let mut a = DMatrix::zeros(m, ncol);
        let mut b = DVector::zeros(m);
        for i in 0..m {
            let row = &p.rows[i];
            let mut rhs = p.rhs[i];
            for (j, map) in map.iter().enumerate() {
                match *map {
                    VarMap::Shift { offset, .. } | VarMap::Fixed(offset) => rhs -= row[j] * offset,
                    VarMap::Split { .. } => {}
                }
            }
            for (col, &(j, coef)) in cols.iter().enumerate() {
                a[(i, col)] = row[j] * coef;
            }
            a[(i, nvar + i)] = 1.0;
            let scale = (0..nvar).map(|col| a[(i, col)].abs()).fold(1e-300, f64::max).max(1e-12);
            for col in 0..ncol {
                a[(i, col)] /= scale;
            }
            b[i] = rhs / scale;
        }
        bounded.extend(std::iter::repeat_n(false, m));
        c.extend(std::iter::repeat_n(0.0, m));
        Some(Self {
            a,
            b,
            c: DVector::from_vec(c),
            bounded,
            map,
        })
    }

    fn recover(&self, x: &DVector<f64>) -> Vec<f64> {
        self.map
            .iter()
            .map(|m| match *m {
                VarMap::Shift { col, offset, scale } => offset + scale * x[col],
                VarMap::Split { pos, neg } => x[pos] - x[neg],
                VarMap::Fixed(v) => v,
            })
            .collect()
    }
}

/// Iterate of the homogeneous embedding. `s` and `w` are stored densely with
/// zeros (and unused) at unbounded columns.
#[derive(Clone)]
struct Iterate {
    x: DVector<f64>,
    s: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
    w: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Residuals {
    primal: DVector<f64>,
    upper: DVector<f64>,
    dual: DVector<f64>,
    gap: f64,
    mu: f64,
}

struct Direction {
    x: DVector<f64>,
    s: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
    w: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Solver<'a> {
    sf: &'a StandardForm,
    ub: DVector<f64>,
    n_comp: f64,
}

impl<'a> Solver<'a> {
    fn new(sf: &'a StandardForm) -> Self {
        let ub = DVector::from_iterator(sf.bounded.len(), sf.bounded.iter().map(|&b| if b { 1.0 } else { 0.0 }));
        let n_bounded = sf.bounded.iter().filter(|&&b| b).count();
        Self {
            sf,
            ub,
            n_comp: (sf.c.len() + n_bounded + 1) as f64,
        }
    }

    fn start(&self) -> Iterate {
        let n = self.sf.c.len();
        let m = self.sf.b.len();
        let half = |b: bool| if b { 0.5 } else { 1.0 };
        Iterate {
            x: DVector::from_iterator(n, self.sf.bounded.iter().map(|&b| half(b))),
            s: DVector::from_iterator(n, self.sf.bounded.iter().map(|&b| if b { 0.5 } else { 0.0 })),
            y: DVector::zeros(m),
            z: DVector::from_element(n, 1.0),
            w: self.ub.clone(),
            tau: 1.0,
            kappa: 1.0,
        }
    }

    fn residuals(&self, it: &Iterate) -> Residuals {
        let sf = self.sf;
        let primal = &sf.b * it.tau - &sf.a * &it.x;
        let upper = self
            .ub
            .component_mul(&(DVector::from_element(it.x.len(), it.tau) - &it.x - &it.s));
        let dual = &sf.c * it.tau - sf.a.tr_mul(&it.y) + &it.w - &it.z;
        let gap = sf.c.dot(&it.x) - sf.b.dot(&it.y) + self.ub.dot(&it.w) + it.kappa;
        let comp = it.x.dot(&it.z) + it.s.dot(&it.w) + it.tau * it.kappa;
        Residuals {
            primal,
            upper,
            dual,
            gap,
            mu: comp / self.n_comp,
        }
    }

    /// Solves `-D dx + A^T dy = r1, A dx = r2` through the normal matrix.
    fn solve_reduced(
        &self,
        chol: &Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
        dinv: &DVector<f64>,
        r1: &DVector<f64>,
        r2: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>) {
        let a = &self.sf.a;
        let dy = match chol {
            Some(ch) => ch.solve(&(r2 + a * dinv.component_mul(r1))),
            None => DVector::zeros(0),
        };
        let dx = dinv.component_mul(&(a.tr_mul(&dy) - r1));
        (dx, dy)
    }

    fn normal_factor(&self, dinv: &DVector<f64>) -> Option<Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>> {
        let a = &self.sf.a;
        if a.nrows() == 0 {
            return Some(None);
        }
        let mut scaled = a.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= dinv[j].sqrt();
        }
        let normal = &scaled * scaled.transpose();
        let diag_max = normal.diagonal().max().max(1.0);
        let mut reg = 0.0;
        for _ in 0..8 {
            let mut mat = normal.clone();
            if reg > 0.0 {
                for i in 0..mat.nrows() {
                    mat[(i, i)] += reg;
                }
            }
            if let Some(ch) = mat.cholesky() {
                return Some(Some(ch));
            }
            reg = if reg == 0.0 { diag_max * 1e-14 } else { reg * 100.0 };
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        it: &Iterate,
        res: &Residuals,
        chol: &Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
        dinv: &DVector<f64>,
        pq: &(DVector<f64>, DVector<f64>),
        eta: f64,
        r_xz: &DVector<f64>,
        r_sw: &DVector<f64>,
        r_tk: f64,
    ) -> Direction {
        let sf = self.sf;
        let n = it.x.len();
        // S^{-1} restricted to bounded columns
        let sinv = DVector::from_iterator(n, (0..n).map(|j| if sf.bounded[j] { 1.0 / it.s[j] } else { 0.0 }));
        let t_sw = sinv.component_mul(&(r_sw - it.w.component_mul(&res.upper) * eta));
        let f = &res.dual * eta + &t_sw - r_xz.component_div(&it.x);
        let (u, v) = self.solve_reduced(chol, dinv, &f, &(&res.primal * eta));
        let (p, q) = pq;
        let g = sinv.component_mul(&it.w).component_mul(&self.ub);
        let cg = &sf.c + &g;
        let denom = cg.dot(p) - sf.b.dot(q) - self.ub.dot(&g) - it.kappa / it.tau;
        let numer = -eta * res.gap - cg.dot(&u) + sf.b.dot(&v) - self.ub.dot(&t_sw) - r_tk / it.tau;
        let dtau = numer / denom;
        let dx = u + p * dtau;
        let dy = v + q * dtau;
        let dz = (r_xz - it.z.component_mul(&dx)).component_div(&it.x);
        let ds = self
            .ub
            .component_mul(&(&res.upper * eta - &dx + DVector::from_element(n, dtau)));
        let dw = sinv.component_mul(&(r_sw - it.w.component_mul(&ds)));
        let dkappa = (r_tk - it.kappa * dtau) / it.tau;
        Direction {
            x: dx,
            s: ds,
            y: dy,
            z: dz,
            w: dw,
            tau: dtau,
            kappa: dkappa,
        }
    }

    fn max_step(&self, it: &Iterate, d: &Direction) -> f64 {
        let mut alpha = f64::INFINITY;
        let mut ratio = |v: f64, dv: f64| {
            if dv < 0.0 {
                alpha = alpha.min(-v / dv);
            }
        };
        for j in 0..it.x.len() {
            ratio(it.x[j], d.x[j]);
            ratio(it.z[j], d.z[j]);
            if self.sf.bounded[j] {
                ratio(it.s[j], d.s[j]);
                ratio(it.w[j], d.w[j]);
            }
        }
        ratio(it.tau, d.tau);
        ratio(it.kappa, d.kappa);
        alpha
    }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `p` with default options.
pub fn solve_lp(p: &LinearProgram) -> LpSolution {
    solve_lp_with(p, &LpOptions::default())
}

pub fn solve_lp_with(p: &LinearProgram, opts: &LpOptions) -> LpSolution {
    let failed = |status, iterations| LpSolution {
        status,
        z: vec![f64::NAN; p.num_variables()],
        objective: f64::NAN,
        iterations,
        primal_residual: f64::NAN,
        relative_gap: f64::NAN,
    };
    let Some(sf) = StandardForm::build(p) else {
        return failed(LpStatus::Infeasible, 0);
    };
    let solver = Solver::new(&sf);
    let n = sf.c.len();
    let tol = opts.tolerance;
    let mut it = solver.start();
    let r0 = solver.residuals(&it);
    let scale_p = inf_norm(&r0.primal).max(inf_norm(&r0.upper)).max(1.0);
    let scale_d = inf_norm(&r0.dual).max(1.0);
    let scale_g = r0.gap.abs().max(1.0);
    let b_norm = inf_norm(&sf.b);
    let c_norm = inf_norm(&sf.c);

    for iteration in 0..=opts.max_iterations {
        let res = solver.residuals(&it);
        let x = &it.x / it.tau;
        let primal_obj = sf.c.dot(&x);
        let dual_obj = (sf.b.dot(&it.y) - solver.ub.dot(&it.w)) / it.tau;
        let rel_p = inf_norm(&res.primal).max(inf_norm(&res.upper)) / it.tau / (1.0 + b_norm);
        let rel_d = inf_norm(&res.dual) / it.tau / (1.0 + c_norm);
        let rel_gap = (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs());
        if rel_p < tol && rel_d < tol && rel_gap < tol {
            let z = sf.recover(&x);
            let primal_residual = p.max_violation(&z) / (1.0 + p.rhs.iter().fold(0.0_f64, |m, b| m.max(b.abs())));
            return LpSolution {
                status: LpStatus::Optimal,
                objective: p.objective_value(&z),
                z,
                iterations: iteration,
                primal_residual,
                relative_gap: rel_gap,
            };
        }
        // certificate checks on the embedding
        let tau_small = it.tau < tol * it.kappa.max(1.0);
        let stalled = inf_norm(&res.primal).max(inf_norm(&res.upper)) / scale_p < tol
            && inf_norm(&res.dual) / scale_d < tol
            && res.gap.abs() / scale_g < tol;
        if tau_small && (stalled || res.mu < tol * r0.mu) {
            let dual_ray = sf.b.dot(&it.y) - solver.ub.dot(&it.w);
            let primal_ray = -sf.c.dot(&it.x);
            let status = if dual_ray >= primal_ray {
                LpStatus::Infeasible
            } else {
                LpStatus::Unbounded
            };
            return failed(status, iteration);
        }
        if iteration == opts.max_iterations {
            break;
        }

        let mut dinv = DVector::zeros(n);
        for j in 0..n {
            let mut d = it.z[j] / it.x[j];
            if sf.bounded[j] {
                d += it.w[j] / it.s[j];
            }
            dinv[j] = 1.0 / d;
        }
        let Some(chol) = solver.normal_factor(&dinv) else {
            return failed(LpStatus::NumericalFailure, iteration);
        };
        let sinv_w_u = DVector::from_iterator(n, (0..n).map(|j| if sf.bounded[j] { it.w[j] / it.s[j] } else { 0.0 }));
        let c_hat = &sf.c - &sinv_w_u;
        let pq = solver.solve_reduced(&chol, &dinv, &c_hat, &sf.b);

        // predictor
        let r_xz = -it.x.component_mul(&it.z);
        let r_sw = -it.s.component_mul(&it.w);
        let r_tk = -it.tau * it.kappa;
        let aff = solver.direction(&it, &res, &chol, &dinv, &pq, 1.0, &r_xz, &r_sw, r_tk);
        let alpha_aff = solver.max_step(&it, &aff).min(1.0);
        let mu_aff = ((&it.x + &aff.x * alpha_aff).dot(&(&it.z + &aff.z * alpha_aff))
            + (&it.s + &aff.s * alpha_aff).dot(&(&it.w + &aff.w * alpha_aff))
            + (it.tau + alpha_aff * aff.tau) * (it.kappa + alpha_aff * aff.kappa))
            / solver.n_comp;
        let sigma = (mu_aff / res.mu).powi(3).clamp(0.0, 1.0);

        // corrector
        let target = DVector::from_element(n, sigma * res.mu);
        let r_xz = &target - it.x.component_mul(&it.z) - aff.x.component_mul(&aff.z);
        let r_sw = solver
            .ub
            .component_mul(&(&target - it.s.component_mul(&it.w) - aff.s.component_mul(&aff.w)));
        let r_tk = sigma * res.mu - it.tau * it.kappa - aff.tau * aff.kappa;
        let d = solver.direction(&it, &res, &chol, &dinv, &pq, 1.0 - sigma, &r_xz, &r_sw, r_tk);
        let alpha = (opts.step_damping * solver.max_step(&it, &d)).min(1.0);
        if !alpha.is_finite() || alpha <= 0.0 || d.x.iter().any(|v| !v.is_finite()) {
            return failed(LpStatus::NumericalFailure, iteration);
        }
        it.x += &d.x * alpha;
        it.z += &d.z * alpha;
        it.y += &d.y * alpha;
        it.s += &d.s * alpha;
        it.w += &d.w * alpha;
        it.tau += d.tau * alpha;
        it.kappa += d.kappa * alpha;
    }
    failed(LpStatus::NumericalFailure, opts.max_iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bounded_variable() {
        let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
        lp.add_inequality(vec![1.0], 1.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.z[0] - 1.0).abs() < 1e-7);
        assert!(sol.primal_residual < 1e-8);
        assert!(sol.relative_gap < 1e-8);
    }

    #[test]
    fn two_variable_vertex() {
        // z = [x, t]
        let mut lp = LinearProgram::new(2).maximize(vec![0.0, 1.0]);
        lp.add_inequality(vec![1.0, 1.0], 1.0);
        lp.add_inequality(vec![-1.0, 1.0], 1.0);
        lp.set_bounds(0, -0.5, 0.5);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        assert!(sol.z[0].abs() < 1e-6);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
        lp.add_inequality(vec![1.0], -1.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);

        let mut crossed = LinearProgram::new(1);
        crossed.set_bounds(0, 1.0, 0.0);
        assert_eq!(solve_lp(&crossed).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 1.0]);
        lp.add_inequality(vec![1.0, -1.0], 1.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        assert_eq!(solve_lp(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_fixed_variables() {
        // max -|x - 2| with x <= y and y fixed at 3
        let mut lp = LinearProgram::new(3).maximize(vec![0.0, -1.0, 0.0]);
        lp.add_inequality(vec![1.0, -1.0, 0.0], 2.0);
        lp.add_inequality(vec![-1.0, -1.0, 0.0], -2.0);
        lp.add_inequality(vec![1.0, 0.0, -1.0], 0.0);
        lp.set_bounds(2, 3.0, 3.0);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() < 1e-7, "{sol:?}");
        assert_eq!(sol.z[2], 3.0);
    }

    #[test]
    fn upper_bounded_only() {
        // max x + y, x <= 2, y <= 3, x + y <= 4
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 1.0]);
        lp.add_inequality(vec![1.0, 1.0], 4.0);
        lp.set_bounds(0, f64::NEG_INFINITY, 2.0);
        lp.set_bounds(1, f64::NEG_INFINITY, 3.0);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 4.0).abs() < 1e-7);
    }

    #[test]
    fn no_rows() {
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, -2.0]);
        lp.set_bounds(0, -1.0, 1.0);
        lp.set_bounds(1, -1.0, 1.0);
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-7);
    }
}
