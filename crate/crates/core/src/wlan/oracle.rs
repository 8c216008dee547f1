//! Grid-search oracles for tiny WLAN instances.
//!
//! These share no code with the solver: decision variables, throughput and
//! airtime are evaluated here straight from the product formula. Throughput
//! and every airtime are multilinear in the attempt probabilities, hence
//! affine in the last grid coordinate once the others are fixed, so
//! [`brute_force_tau_oracle`] scans the first `n - 1` coordinates and solves
//! the last one exactly over its grid values. [`exhaustive_tau_oracle`]
//! enumerates every grid point and exists to cross-check the reduction.

use rayon::prelude::*;

use super::{AirtimeScope, TauMatrix, WlanInstance};
use crate::error::{Error, Result};

pub const MAX_ORACLE_VARIABLES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub tau: TauMatrix,
    pub objective: f64,
}

struct Tiny {
    vars: Vec<(usize, usize)>,
    users: usize,
    aps: usize,
    rates: Vec<Vec<f64>>,
    slice_of: Vec<Option<usize>>,
    /// `(slice, ap or None for the average, beta)` for positive reservations.
    rows: Vec<(usize, Option<usize>, f64)>,
    eps: f64,
}

impl Tiny {
    fn new(inst: &WlanInstance, eps: f64) -> Result<Tiny> {
        inst.validate()?;
        let (users, aps) = (inst.users(), inst.aps());
        let mut vars = Vec::new();
        for i in 0..users {
            for a in 0..aps {
                if inst.rates[i][a] > 0.0 {
                    vars.push((i, a));
                }
            }
        }
        if vars.len() > MAX_ORACLE_VARIABLES {
            return Err(Error::OracleSize(format!("{} decision variables (limit {MAX_ORACLE_VARIABLES})", vars.len())));
        }
        let mut slice_of = vec![None; users];
        let mut rows = Vec::new();
        for (k, s) in inst.slices.iter().enumerate() {
            s.user_ids.iter().for_each(|&u| slice_of[u] = Some(k));
            if s.reservation > 0.0 {
                match inst.scope {
                    AirtimeScope::NetworkAverage => rows.push((k, None, s.reservation)),
                    AirtimeScope::PerAp => rows.extend((0..aps).map(|a| (k, Some(a), s.reservation))),
                }
            }
        }
        Ok(Tiny { vars, users, aps, rates: inst.rates.clone(), slice_of, rows, eps })
    }

    /// Throughput and per-row airtime at the point `x` (one value per variable).
    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut tau = vec![vec![0.0; self.aps]; self.users];
        for (v, &(i, a)) in self.vars.iter().enumerate() {
            tau[i][a] = x[v];
        }
        let mut throughput = 0.0;
        let mut airtime = vec![0.0; self.rows.len()];
        for a in 0..self.aps {
            for i in 0..self.users {
                let mut success = tau[i][a];
                for (j, row) in tau.iter().enumerate() {
                    if j != i {
                        success *= 1.0 - row[a];
                    }
                }
                throughput += self.rates[i][a] * success;
                for (r, &(k, ap, _)) in self.rows.iter().enumerate() {
                    if self.slice_of[i] == Some(k) {
                        match ap {
                            None => airtime[r] += success / self.aps as f64,
                            Some(b) if b == a => airtime[r] += success,
                            Some(_) => {}
                        }
                    }
                }
            }
        }
        (throughput, airtime)
    }

    fn feasible(&self, airtime: &[f64]) -> bool {
        airtime.iter().zip(&self.rows).all(|(v, &(_, _, beta))| *v >= beta - self.eps)
    }

    fn to_tau(&self, x: &[f64]) -> TauMatrix {
        let mut t = TauMatrix::zeros(self.users, self.aps);
        for (v, &(i, a)) in self.vars.iter().enumerate() {
            t.set(i, a, x[v]);
        }
        t
    }

    /// `min_r airtime_r / beta_r`.
    fn coverage_ratio(&self, airtime: &[f64]) -> f64 {
        airtime.iter().zip(&self.rows).map(|(v, &(_, _, b))| v / b).fold(f64::INFINITY, f64::min)
    }
}

fn grid_size(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::config("grid step must lie in (0, 1]"));
    }
    let g = (1.0 / step).round();
    if ((g * step) - 1.0).abs() > 1e-9 {
        return Err(Error::config("grid step must divide 1"));
    }
    Ok(g as usize)
}

fn grid_value(j: usize, g: usize) -> f64 {
    if j == g {
        1.0
    } else {
        j as f64 / g as f64
    }
}

fn decode(mut index: usize, dims: usize, g: usize) -> Vec<f64> {
    let mut x = vec![0.0; dims];
    for d in (0..dims).rev() {
        x[d] = grid_value(index % (g + 1), g);
        index /= g + 1;
    }
    x
}

/// `(objective, flat grid index)` with larger objective first and smaller
/// index on exact ties, so the reduction is order independent.
fn pick(a: Option<(f64, usize)>, b: Option<(f64, usize)>) -> Option<(f64, usize)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(p), Some(q)) => Some(if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p }),
    }
}

/// Best feasible grid point over all attempt variables, grid step
/// `grid_step`. Ties go to the lexicographically smallest grid point.
pub fn brute_force_tau_oracle(inst: &WlanInstance, grid_step: f64, eps: f64) -> Result<OracleResult> {
    let tiny = Tiny::new(inst, eps)?;
    let g = grid_size(grid_step)?;
    let n = tiny.vars.len();
    if n == 0 {
        let (f, air) = tiny.eval(&[]);
        if !tiny.feasible(&air) {
            return Err(Error::Infeasible { scale: 0.0 });
        }
        return Ok(OracleResult { tau: tiny.to_tau(&[]), objective: f });
    }
    let prefixes = (g + 1).pow((n - 1) as u32);
    let best = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut x = decode(p, n - 1, g);
            x.push(0.0);
            let (_, c0) = tiny.eval(&x);
            x[n - 1] = 1.0;
            let (_, c1) = tiny.eval(&x);
            // feasible grid range for the last coordinate
            let (mut lo, mut hi) = (0i64, g as i64);
            for r in 0..tiny.rows.len() {
                let need = tiny.rows[r].2 - tiny.eps;
                let slope = c1[r] - c0[r];
                if slope > 0.0 {
                    lo = lo.max(((need - c0[r]) / slope * g as f64).ceil() as i64 - 1);
                } else if slope < 0.0 {
                    hi = hi.min(((need - c0[r]) / slope * g as f64).floor() as i64 + 1);
                } else if c0[r] < need {
                    return None;
                }
            }
            let (lo, hi) = (lo.max(0), hi.min(g as i64));
            // ends widened by one above; walk them inwards until feasible
            let probe = |j: i64, x: &mut Vec<f64>| {
                x[n - 1] = grid_value(j as usize, g);
                let (f, air) = tiny.eval(x);
                tiny.feasible(&air).then_some(f)
            };
            let mut first = None;
            let mut j = lo;
            while j <= hi {
                if let Some(f) = probe(j, &mut x) {
                    first = Some((f, j));
                    break;
                }
                j += 1;
                if j > lo + 2 {
                    break;
                }
            }
            let (f_lo, j_lo) = first?;
            let mut last = (f_lo, j_lo);
            let mut j = hi;
            while j > j_lo {
                if let Some(f) = probe(j, &mut x) {
                    last = (f, j);
                    break;
                }
                j -= 1;
                if j < hi - 2 {
                    break;
                }
            }
            // affine objective: an end of the feasible run is optimal
            let (f, j) = if last.0 > f_lo { last } else { (f_lo, j_lo) };
            Some((f, p * (g + 1) + j as usize))
        })
        .reduce(|| None, pick);
    match best {
        Some((objective, idx)) => Ok(OracleResult { tau: tiny.to_tau(&decode(idx, n, g)), objective }),
        None => Err(Error::Infeasible { scale: oracle_scaling_scan(inst, grid_step)? }),
    }
}

/// Plain enumeration of every grid point; exponential, for cross-checks.
pub fn exhaustive_tau_oracle(inst: &WlanInstance, grid_step: f64, eps: f64) -> Result<OracleResult> {
    let tiny = Tiny::new(inst, eps)?;
    let g = grid_size(grid_step)?;
    let n = tiny.vars.len();
    let total = (g + 1).pow(n as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (f, air) = tiny.eval(&decode(idx, n, g));
            tiny.feasible(&air).then_some((f, idx))
        })
        .reduce(|| None, pick);
    match best {
        Some((objective, idx)) => Ok(OracleResult { tau: tiny.to_tau(&decode(idx, n, g)), objective }),
        None => Err(Error::Infeasible { scale: oracle_scaling_scan(inst, grid_step)? }),
    }
}

/// Largest `min_k airtime_k / beta_k` over the grid, capped at 1: the
/// uniform reservation scaling the grid can support.
pub fn oracle_scaling_scan(inst: &WlanInstance, grid_step: f64) -> Result<f64> {
    let tiny = Tiny::new(inst, 0.0)?;
    let g = grid_size(grid_step)?;
    let n = tiny.vars.len();
    if tiny.rows.is_empty() {
        return Ok(1.0);
    }
    if n == 0 {
        return Ok(0.0);
    }
    let prefixes = (g + 1).pow((n - 1) as u32);
    let best = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut x = decode(p, n - 1, g);
            x.push(0.0);
            let (_, c0) = tiny.eval(&x);
            x[n - 1] = 1.0;
            let (_, c1) = tiny.eval(&x);
            // ratio_r(t) = (c0 + (c1 - c0) t) / beta is affine; the minimum over
            // rows is concave, peaking at an end or a pairwise crossing
            let lines: Vec<(f64, f64)> =
                (0..tiny.rows.len()).map(|r| (c0[r] / tiny.rows[r].2, (c1[r] - c0[r]) / tiny.rows[r].2)).collect();
            let mut cands = vec![0.0, 1.0];
            for a in 0..lines.len() {
                for b in a + 1..lines.len() {
                    let ds = lines[a].1 - lines[b].1;
                    if ds != 0.0 {
                        let t = (lines[b].0 - lines[a].0) / ds;
                        if (0.0..=1.0).contains(&t) {
                            cands.push(t);
                        }
                    }
                }
            }
            let mut best = f64::NEG_INFINITY;
            for t in cands {
                let lo = (t * g as f64).floor() as usize;
                for j in [lo, (lo + 1).min(g)] {
                    x[n - 1] = grid_value(j, g);
                    let (_, air) = tiny.eval(&x);
                    best = best.max(tiny.coverage_ratio(&air));
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best.clamp(0.0, 1.0))
}
