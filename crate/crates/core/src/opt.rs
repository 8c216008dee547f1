//! Augmented-Lagrangian method over a box.
//!
//! Maximizes `f(x)` subject to `c_k(x) >= 0` and `lo <= x <= hi`. Inequality
//! constraints enter the merit function through the Rockafellar term
//!
//! ```text
//! phi(x) = f(x) - 1/(2 mu) * sum_k ( max(0, lambda_k - mu c_k(x))^2 - lambda_k^2 )
//! ```
//!
//! which is maximized by projected gradient ascent with Barzilai-Borwein
//! steps and an Armijo backtracking safeguard. Multipliers follow
//! `lambda_k <- max(0, lambda_k - mu c_k)`; the penalty grows whenever the
//! violation does not shrink fast enough.

/// A smooth maximization problem over a box with inequality constraints.
pub trait BoxProblem {
    fn dim(&self) -> usize;

    fn bounds(&self, i: usize) -> (f64, f64);

    /// Objective value; writes its gradient into `grad`.
    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64;

    fn num_constraints(&self) -> usize {
        0
    }

    /// Writes `c_k(x)` into `values[k]` and its gradient into `jac[k]`.
    fn constraints(&self, _x: &[f64], _values: &mut [f64], _jac: &mut [Vec<f64>]) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlOptions {
    pub max_outer: usize,
    pub max_inner: usize,
    pub initial_step: f64,
    /// Target constraint violation.
    pub feasibility_tol: f64,
    /// Projected-gradient stationarity tolerance.
    pub optimality_tol: f64,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
}

impl Default for AlOptions {
    fn default() -> Self {
        AlOptions {
            max_outer: 40,
            max_inner: 400,
            initial_step: 0.1,
            feasibility_tol: 1e-6,
            optimality_tol: 1e-9,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    /// `max_k max(0, -c_k(x))`.
    pub max_violation: f64,
    pub outer_iterations: usize,
}

pub fn project<P: BoxProblem + ?Sized>(p: &P, x: &mut [f64]) {
    for (i, v) in x.iter_mut().enumerate() {
        let (lo, hi) = p.bounds(i);
        *v = v.clamp(lo, hi);
    }
}

/// `max_k max(0, -c_k(x))`, zero for unconstrained problems.
pub fn max_violation<P: BoxProblem + ?Sized>(p: &P, x: &[f64]) -> f64 {
    let m = p.num_constraints();
    if m == 0 {
        return 0.0;
    }
    let mut values = vec![0.0; m];
    let mut jac = vec![vec![0.0; p.dim()]; m];
    p.constraints(x, &mut values, &mut jac);
    values.iter().fold(0.0f64, |acc, &c| acc.max(-c))
}

struct Merit<'a, P: ?Sized> {
    problem: &'a P,
    lambda: Vec<f64>,
    mu: f64,
    values: Vec<f64>,
    jac: Vec<Vec<f64>>,
}

impl<P: BoxProblem + ?Sized> Merit<'_, P> {
    fn eval(&mut self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut phi = self.problem.objective(x, grad);
        if self.lambda.is_empty() {
            return phi;
        }
        self.problem.constraints(x, &mut self.values, &mut self.jac);
        for k in 0..self.lambda.len() {
            let shifted = (self.lambda[k] - self.mu * self.values[k]).max(0.0);
            phi -= (shifted * shifted - self.lambda[k] * self.lambda[k]) / (2.0 * self.mu);
            if shifted > 0.0 {
                for (g, j) in grad.iter_mut().zip(&self.jac[k]) {
                    *g += shifted * j;
                }
            }
        }
        phi
    }
}

fn projected_step<P: BoxProblem + ?Sized>(p: &P, x: &[f64], g: &[f64], t: f64, out: &mut [f64]) {
    for i in 0..x.len() {
        let (lo, hi) = p.bounds(i);
        out[i] = (x[i] + t * g[i]).clamp(lo, hi);
    }
}

fn inner_ascent<P: BoxProblem + ?Sized>(merit: &mut Merit<'_, P>, x: &mut Vec<f64>, opts: &AlOptions) {
    let n = x.len();
    let p = merit.problem;
    let mut g = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut probe = vec![0.0; n];
    let mut phi = merit.eval(x, &mut g);
    let mut t = opts.initial_step;
    for _ in 0..opts.max_inner {
        projected_step(p, x, &g, 1.0, &mut probe);
        let stationarity = x.iter().zip(&probe).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if stationarity < opts.optimality_tol {
            break;
        }
        let mut accepted = false;
        while t > 1e-16 {
            projected_step(p, x, &g, t, &mut x_new);
            let phi_new = merit.eval(&x_new, &mut g_new);
            let predicted: f64 = g.iter().zip(x_new.iter().zip(x.iter())).map(|(gi, (a, b))| gi * (a - b)).sum();
            if phi_new >= phi + 1e-4 * predicted {
                phi = phi_new;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        let (mut ss, mut sy) = (0.0, 0.0);
        let mut moved = 0.0f64;
        for i in 0..n {
            let s = x_new[i] - x[i];
            let y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
            moved = moved.max(s.abs());
        }
        std::mem::swap(x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        if moved < 1e-15 {
            break;
        }
        // ascent on a locally concave merit has s.y < 0
        t = if sy < 0.0 { (ss / -sy).clamp(1e-10, 1e6) } else { (t * 4.0).min(1e6) };
    }
}

/// Runs the augmented-Lagrangian loop from `x0` (projected onto the box).
pub fn maximize<P: BoxProblem + ?Sized>(problem: &P, x0: &[f64], opts: &AlOptions) -> AlOutcome {
    let n = problem.dim();
    let m = problem.num_constraints();
    assert_eq!(x0.len(), n, "start point dimension");
    let mut x = x0.to_vec();
    project(problem, &mut x);
    let mut merit = Merit {
        problem,
        lambda: vec![0.0; m],
        mu: opts.initial_penalty,
        values: vec![0.0; m],
        jac: vec![vec![0.0; n]; m],
    };
    let mut prev_violation = f64::INFINITY;
    let mut outer = 0;
    while outer < opts.max_outer {
        outer += 1;
        inner_ascent(&mut merit, &mut x, opts);
        if m == 0 {
            break;
        }
        problem.constraints(&x, &mut merit.values, &mut merit.jac);
        let violation = merit.values.iter().fold(0.0f64, |acc, &c| acc.max(-c));
        let mut multiplier_shift = 0.0f64;
        for k in 0..m {
            let next = (merit.lambda[k] - merit.mu * merit.values[k]).max(0.0);
            multiplier_shift = multiplier_shift.max((next - merit.lambda[k]).abs() / (1.0 + merit.lambda[k]));
            merit.lambda[k] = next;
        }
        if violation <= opts.feasibility_tol && multiplier_shift < 1e-7 {
            break;
        }
        if violation > 0.25 * prev_violation {
            merit.mu = (merit.mu * opts.penalty_growth).min(opts.max_penalty);
        }
        prev_violation = violation;
    }
    let mut grad = vec![0.0; n];
    let objective = problem.objective(&x, &mut grad);
    let max_violation = max_violation(problem, &x);
    AlOutcome { x, objective, max_violation, outer_iterations: outer }
}
