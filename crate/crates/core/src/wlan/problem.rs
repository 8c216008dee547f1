//! Flat-vector formulation of the attempt-probability problems.
//!
//! Only `(user, ap)` pairs with a positive PHY rate carry a decision
//! variable; every other attempt probability is pinned to zero, since a user
//! out of coverage can only cause collisions.

use super::throughput::weighted_success;
use super::{AirtimeScope, TauMatrix, WlanInstance};
use crate::opt::BoxProblem;

pub(crate) struct ApBlock {
    pub users: Vec<usize>,
    pub vars: Vec<usize>,
    /// Rates divided by the instance's largest rate.
    pub rate: Vec<f64>,
    pub slice: Vec<Option<usize>>,
}

pub(crate) struct Layout {
    pub blocks: Vec<ApBlock>,
    pub n_vars: usize,
    pub var_pos: Vec<(usize, usize)>,
    pub users: usize,
    pub aps: usize,
    pub rate_scale: f64,
}

impl Layout {
    pub fn new(inst: &WlanInstance) -> Layout {
        let (users, aps) = (inst.users(), inst.aps());
        let rate_scale = inst.rates.iter().flatten().fold(0.0f64, |m, &r| m.max(r));
        let mut slice_of = vec![None; users];
        for (k, s) in inst.slices.iter().enumerate() {
            for &u in &s.user_ids {
                slice_of[u] = Some(k);
            }
        }
        let mut blocks = Vec::with_capacity(aps);
        let mut var_pos = Vec::new();
        for a in 0..aps {
            let mut b = ApBlock { users: vec![], vars: vec![], rate: vec![], slice: vec![] };
            for (i, (row, &slice)) in inst.rates.iter().zip(&slice_of).enumerate() {
                if row[a] > 0.0 {
                    b.users.push(i);
                    b.vars.push(var_pos.len());
                    b.rate.push(row[a] / rate_scale);
                    b.slice.push(slice);
                    var_pos.push((i, a));
                }
            }
            blocks.push(b);
        }
        Layout { blocks, n_vars: var_pos.len(), var_pos, users, aps, rate_scale }
    }

    pub fn to_tau(&self, x: &[f64]) -> TauMatrix {
        let mut tau = TauMatrix::zeros(self.users, self.aps);
        for (v, &(i, a)) in self.var_pos.iter().enumerate() {
            tau.set(i, a, x[v].clamp(0.0, 1.0));
        }
        tau
    }

    pub fn vars_of(&self, tau: &TauMatrix) -> Vec<f64> {
        self.var_pos.iter().map(|&(i, a)| tau.get(i, a)).collect()
    }

    /// Network throughput in the instance's rate units.
    pub fn throughput(&self, x: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let t: Vec<f64> = b.vars.iter().map(|&v| x[v]).collect();
                weighted_success(&t, &b.rate, None)
            })
            .sum::<f64>()
            * self.rate_scale
    }
}

/// One airtime reservation row: `airtime(slice, ap | average) >= beta`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reservation {
    pub slice: usize,
    pub ap: Option<usize>,
    pub beta: f64,
}

pub(crate) fn reservations(inst: &WlanInstance) -> Vec<Reservation> {
    let mut rows = Vec::new();
    for (k, s) in inst.slices.iter().enumerate() {
        if s.reservation <= 0.0 {
            continue;
        }
        match inst.scope {
            AirtimeScope::NetworkAverage => rows.push(Reservation { slice: k, ap: None, beta: s.reservation }),
            AirtimeScope::PerAp => {
                rows.extend((0..inst.aps()).map(|a| Reservation { slice: k, ap: Some(a), beta: s.reservation }))
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Goal {
    /// Maximize normalized throughput.
    Throughput,
    /// Normalized throughput plus `mu` times the log of every reservation
    /// slack; unconstrained, and minus infinity outside the strict
    /// interior of the feasible set.
    Barrier(f64),
    /// Maximize `t` with every reservation slack `>= t`; `t` is the last
    /// coordinate.
    MinSlack,
}

pub(crate) struct TauProblem<'a> {
    pub layout: &'a Layout,
    pub rows: Vec<Reservation>,
    pub goal: Goal,
}

impl TauProblem<'_> {
    /// Per-row airtime values and gradients with respect to the attempt
    /// variables only.
    fn airtimes(&self, x: &[f64], values: &mut [f64], jac: &mut [Vec<f64>]) {
        let l = self.layout;
        values.iter_mut().for_each(|v| *v = 0.0);
        jac.iter_mut().for_each(|j| j.iter_mut().for_each(|g| *g = 0.0));
        let inv_aps = 1.0 / l.aps as f64;
        let mut grad = Vec::new();
        for (a, b) in l.blocks.iter().enumerate() {
            if b.vars.is_empty() {
                continue;
            }
            let t: Vec<f64> = b.vars.iter().map(|&v| x[v]).collect();
            for (r, row) in self.rows.iter().enumerate() {
                let factor = match row.ap {
                    None => inv_aps,
                    Some(ap) if ap == a => 1.0,
                    Some(_) => continue,
                };
                let w: Vec<f64> = b.slice.iter().map(|&s| if s == Some(row.slice) { 1.0 } else { 0.0 }).collect();
                if w.iter().all(|&v| v == 0.0) {
                    continue;
                }
                grad.resize(t.len(), 0.0);
                let val = weighted_success(&t, &w, Some(&mut grad));
                values[r] += factor * val;
                for (k, &v) in b.vars.iter().enumerate() {
                    jac[r][v] += factor * grad[k];
                }
            }
        }
    }

    /// Normalized throughput and its gradient.
    fn throughput(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut total = 0.0;
        let mut g = Vec::new();
        for b in &self.layout.blocks {
            if b.vars.is_empty() {
                continue;
            }
            let t: Vec<f64> = b.vars.iter().map(|&v| x[v]).collect();
            g.resize(t.len(), 0.0);
            total += weighted_success(&t, &b.rate, Some(&mut g));
            for (k, &v) in b.vars.iter().enumerate() {
                grad[v] = g[k];
            }
        }
        total
    }

    /// Smallest reservation slack at `x` (only attempt variables are read).
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        let m = self.rows.len();
        let mut values = vec![0.0; m];
        let mut jac = vec![vec![0.0; self.dim()]; m];
        self.airtimes(x, &mut values, &mut jac);
        values.iter().zip(&self.rows).map(|(v, r)| v - r.beta).fold(f64::INFINITY, f64::min)
    }
}

impl BoxProblem for TauProblem<'_> {
    fn dim(&self) -> usize {
        self.layout.n_vars + usize::from(self.goal == Goal::MinSlack)
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        if i < self.layout.n_vars {
            (0.0, 1.0)
        } else {
            (-1.0, 1.0)
        }
    }

    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        match self.goal {
            Goal::Throughput => self.throughput(x, grad),
            Goal::Barrier(mu) => {
                let mut total = self.throughput(x, grad);
                let m = self.rows.len();
                let mut values = vec![0.0; m];
                let mut jac = vec![vec![0.0; self.layout.n_vars]; m];
                self.airtimes(x, &mut values, &mut jac);
                for (r, row) in self.rows.iter().enumerate() {
                    let slack = values[r] - row.beta;
                    if !(slack > 0.0) {
                        return f64::NEG_INFINITY;
                    }
                    total += mu * slack.ln();
                    for (g, j) in grad.iter_mut().zip(&jac[r]) {
                        *g += mu * j / slack;
                    }
                }
                total
            }
            Goal::MinSlack => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let n = self.layout.n_vars;
                grad[n] = 1.0;
                x[n]
            }
        }
    }

    fn num_constraints(&self) -> usize {
        match self.goal {
            Goal::Barrier(_) => 0,
            _ => self.rows.len(),
        }
    }

    fn constraints(&self, x: &[f64], values: &mut [f64], jac: &mut [Vec<f64>]) {
        self.airtimes(x, values, jac);
        let n = self.layout.n_vars;
        for (r, row) in self.rows.iter().enumerate() {
            values[r] -= row.beta;
            if self.goal == Goal::MinSlack {
                values[r] -= x[n];
                jac[r][n] = -1.0;
            }
        }
    }
}
