use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::problem::{reservations, Goal, Layout, Reservation, TauProblem};
use super::{AirtimeScope, TauMatrix, WlanInstance, WlanSolverOptions};
use crate::error::{Error, Result};
use crate::model::seed::{self, InstanceHasher};
use crate::opt::{self, AlOptions, BoxProblem};

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// Carries an attempt matrix meeting every reservation within epsilon.
    Feasible(TauMatrix),
    Infeasible {
        scale: f64,
    },
}

const BARRIER_WEIGHTS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
const BARRIER_PULLS: [f64; 3] = [0.0, 0.1, 0.3];

/// Whether the reservations leave any airtime unclaimed, which a strictly
/// feasible point needs.
fn has_room(inst: &WlanInstance, rows: &[Reservation]) -> bool {
    let demand: f64 = inst.slices.iter().map(|s| s.reservation).sum();
    match inst.scope {
        AirtimeScope::NetworkAverage => demand < inst.max_total_airtime(),
        AirtimeScope::PerAp => !rows.is_empty() && demand < 1.0,
    }
}

fn al_options(opts: &WlanSolverOptions) -> AlOptions {
    AlOptions {
        max_inner: opts.max_iterations,
        initial_step: opts.step_size,
        feasibility_tol: opts.feasibility_tolerance / 10.0,
        optimality_tol: opts.convergence_tolerance,
        // a weak penalty lets ascent settle on monopoly corners, where the
        // starved slice's airtime has zero gradient
        initial_penalty: 1e3,
        ..AlOptions::default()
    }
}

fn instance_seed(inst: &WlanInstance, layout: &Layout, opts: &WlanSolverOptions) -> u64 {
    let mut h = InstanceHasher::default();
    h.write_u64(inst.users() as u64);
    h.write_u64(inst.aps() as u64);
    for row in &inst.rates {
        for &r in row {
            h.write_f64(if layout.rate_scale > 0.0 { r / layout.rate_scale } else { 0.0 });
        }
    }
    for s in &inst.slices {
        h.write_f64(s.reservation);
        s.user_ids.iter().for_each(|&u| h.write_u64(u as u64));
        h.write_u64(u64::MAX);
    }
    h.write_u64(inst.scope as u64);
    h.write_u64(opts.multistart_count as u64);
    seed::derive(h.finish(), seed::STREAM_SOLVER)
}

fn argmax_first(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Deterministic structured starting points.
fn structured_starts(inst: &WlanInstance, layout: &Layout, rows: &[Reservation]) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    let n = layout.n_vars;

    // each user on its best-rate AP, symmetric split
    let mut x = vec![0.0; n];
    let mut chosen: Vec<Option<usize>> = vec![None; layout.users];
    for (i, slot) in chosen.iter_mut().enumerate() {
        let best = argmax_first(inst.rates[i].iter().copied());
        *slot = best.filter(|&a| inst.rates[i][a] > 0.0);
    }
    for (a, b) in layout.blocks.iter().enumerate() {
        let members: Vec<usize> = (0..b.users.len()).filter(|&k| chosen[b.users[k]] == Some(a)).collect();
        for &k in &members {
            x[b.vars[k]] = 1.0 / members.len() as f64;
        }
    }
    starts.push(x);

    // best-rate user monopolizes each AP
    let mut x = vec![0.0; n];
    for b in &layout.blocks {
        if let Some(k) = argmax_first(b.rate.iter().copied()) {
            x[b.vars[k]] = 1.0;
        }
    }
    starts.push(x);

    // best user of every present slice, shared equally
    let mut x = vec![0.0; n];
    for b in &layout.blocks {
        let mut reps: Vec<(Option<usize>, usize)> = Vec::new();
        for k in 0..b.users.len() {
            match reps.iter_mut().find(|(s, _)| *s == b.slice[k]) {
                Some(rep) if b.rate[k] > b.rate[rep.1] => rep.1 = k,
                Some(_) => {}
                None => reps.push((b.slice[k], k)),
            }
        }
        for &(_, k) in &reps {
            x[b.vars[k]] = 1.0 / reps.len() as f64;
        }
    }
    starts.push(x);

    // hand whole APs to the slices with the largest outstanding reservation
    if !rows.is_empty() && inst.scope == AirtimeScope::NetworkAverage {
        let mut need: Vec<f64> = inst.slices.iter().map(|s| s.reservation * layout.aps as f64).collect();
        let mut x = vec![0.0; n];
        for b in &layout.blocks {
            let present = |s: usize| b.slice.contains(&Some(s));
            let target = argmax_first((0..need.len()).map(|s| {
                if present(s) && need[s] > 0.0 {
                    need[s]
                } else {
                    f64::NEG_INFINITY
                }
            }))
            .filter(|&s| present(s) && need[s] > 0.0);
            let pick = match target {
                Some(s) => {
                    need[s] -= 1.0;
                    argmax_first((0..b.users.len()).map(|k| {
                        if b.slice[k] == Some(s) {
                            b.rate[k]
                        } else {
                            f64::NEG_INFINITY
                        }
                    }))
                }
                None => argmax_first(b.rate.iter().copied()),
            };
            if let Some(k) = pick {
                x[b.vars[k]] = 1.0;
            }
        }
        starts.push(x);
    }
    starts
}

fn random_start(layout: &Layout, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; layout.n_vars];
    for b in &layout.blocks {
        let cap = (2.0 / b.vars.len().max(1) as f64).min(1.0);
        for &v in &b.vars {
            x[v] = rng.random::<f64>() * cap;
        }
    }
    x
}

fn start_points(
    inst: &WlanInstance,
    layout: &Layout,
    rows: &[Reservation],
    opts: &WlanSolverOptions,
    warm: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let mut starts: Vec<Vec<f64>> = warm.to_vec();
    starts.extend(structured_starts(inst, layout, rows));
    let mut rng = seed::rng(instance_seed(inst, layout, opts));
    let random = opts.multistart_count.saturating_sub(starts.len()).max(2);
    for _ in 0..random {
        starts.push(random_start(layout, &mut rng));
    }
    starts
}

struct Candidate {
    x: Vec<f64>,
    throughput: f64,
    violation: f64,
}

fn evaluate(layout: &Layout, rows: &[Reservation], x: Vec<f64>) -> Candidate {
    let check = TauProblem { layout, rows: rows.to_vec(), goal: Goal::Throughput };
    let violation = if rows.is_empty() { 0.0 } else { (-check.min_slack(&x)).max(0.0) };
    Candidate { throughput: layout.throughput(&x), x, violation }
}

/// Rounds coordinates within 1e-7 of a bound onto it when that costs no
/// throughput beyond rounding noise and keeps the reservations.
fn snap(layout: &Layout, rows: &[Reservation], c: Candidate, eps: f64) -> Candidate {
    let snapped: Vec<f64> =
        c.x.iter()
            .map(|&v| {
                if v < 1e-7 {
                    0.0
                } else if v > 1.0 - 1e-7 {
                    1.0
                } else {
                    v
                }
            })
            .collect();
    if snapped == c.x {
        return c;
    }
    let s = evaluate(layout, rows, snapped);
    let keeps_feasibility = s.violation <= c.violation.max(eps / 2.0);
    if s.throughput >= c.throughput - 1e-6 * layout.rate_scale.max(1.0) && keeps_feasibility {
        s
    } else {
        c
    }
}

/// Larger objective wins; near-ties go to the lexicographically larger
/// attempt matrix (user-major), which favours lower user ids.
fn better(layout: &Layout, a: &Candidate, b: &Candidate) -> bool {
    let tol = 1e-9 * layout.rate_scale.max(1.0);
    if a.throughput > b.throughput + tol {
        return true;
    }
    if a.throughput < b.throughput - tol {
        return false;
    }
    let (ta, tb) = (layout.to_tau(&a.x), layout.to_tau(&b.x));
    for (u, v) in ta.as_slice().iter().zip(tb.as_slice()) {
        if (u - v).abs() > 1e-9 {
            return u > v;
        }
    }
    false
}

/// Largest achievable minimum reservation slack, with its maximizer.
fn max_min_slack(
    inst: &WlanInstance,
    layout: &Layout,
    rows: &[Reservation],
    opts: &WlanSolverOptions,
    warm: &[Vec<f64>],
) -> (f64, Vec<f64>) {
    let problem = TauProblem { layout, rows: rows.to_vec(), goal: Goal::MinSlack };
    let al = al_options(opts);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in start_points(inst, layout, rows, opts, warm) {
        let t0 = problem.min_slack(&start).clamp(-1.0, 1.0);
        let mut x0 = start.clone();
        x0.push(t0);
        let out = opt::maximize(&problem, &x0, &al);
        for x in [start, out.x[..layout.n_vars].to_vec()] {
            let slack = problem.min_slack(&x);
            if best.as_ref().is_none_or(|(b, _)| slack > *b) {
                best = Some((slack, x));
            }
        }
    }
    best.unwrap_or((f64::NEG_INFINITY, vec![0.0; layout.n_vars]))
}

fn prepare(inst: &WlanInstance, opts: &WlanSolverOptions) -> Result<(Layout, Vec<Reservation>)> {
    inst.validate()?;
    opts.validate()?;
    Ok((Layout::new(inst), reservations(inst)))
}

/// Largest `s` in `[0, 1]` such that `s` times every reservation is
/// feasible, found by bisection on the max-min-slack test.
pub fn reservation_scaling(inst: &WlanInstance, opts: &WlanSolverOptions) -> Result<f64> {
    let (layout, rows) = prepare(inst, opts)?;
    if rows.is_empty() {
        return Ok(1.0);
    }
    Ok(scaling_bisection(inst, &layout, &rows, opts, &[]))
}

fn scaled_rows(rows: &[Reservation], s: f64) -> Vec<Reservation> {
    rows.iter().map(|r| Reservation { beta: r.beta * s, ..*r }).collect()
}

fn scaling_bisection(
    inst: &WlanInstance,
    layout: &Layout,
    rows: &[Reservation],
    opts: &WlanSolverOptions,
    warm: &[Vec<f64>],
) -> f64 {
    let eps = opts.feasibility_tolerance;
    let mut warm: Vec<Vec<f64>> = warm.to_vec();
    let feasible_at = |s: f64, warm: &mut Vec<Vec<f64>>| {
        let (slack, x) = max_min_slack(&inst.scaled(s), layout, &scaled_rows(rows, s), opts, warm);
        if slack >= -eps {
            *warm = vec![x];
            true
        } else {
            false
        }
    };
    let mut lo = 0.0;
    let mut hi = 1.0f64;
    if inst.scope == AirtimeScope::NetworkAverage {
        // total successful airtime can never exceed the covered-AP fraction
        let demand: f64 = rows.iter().map(|r| r.beta).sum();
        if demand > 0.0 {
            hi = hi.min((inst.max_total_airtime() + eps) / demand);
        }
    }
    if feasible_at(hi, &mut warm) {
        return hi;
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if feasible_at(mid, &mut warm) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Decides whether every airtime reservation can be met within epsilon by
/// maximizing the smallest reservation slack.
pub fn feasibility_check(inst: &WlanInstance, opts: &WlanSolverOptions) -> Result<Feasibility> {
    let (layout, rows) = prepare(inst, opts)?;
    feasibility_with(inst, &layout, &rows, opts, &[])
}

fn feasibility_with(
    inst: &WlanInstance,
    layout: &Layout,
    rows: &[Reservation],
    opts: &WlanSolverOptions,
    warm: &[Vec<f64>],
) -> Result<Feasibility> {
    if rows.is_empty() {
        return Ok(Feasibility::Feasible(TauMatrix::zeros(inst.users(), inst.aps())));
    }
    let (slack, x) = max_min_slack(inst, layout, rows, opts, warm);
    if slack >= -opts.feasibility_tolerance {
        return Ok(Feasibility::Feasible(layout.to_tau(&x)));
    }
    Ok(Feasibility::Infeasible { scale: scaling_bisection(inst, layout, rows, opts, &[x]) })
}

/// Maximizes total throughput subject to the slice airtime reservations.
///
/// `warm_starts` (for example the Max-SNR point) are used both as starting
/// points and as candidates in their own right, so the result is never worse
/// than a feasible warm start.
pub fn optimize_tau(inst: &WlanInstance, opts: &WlanSolverOptions, warm_starts: &[TauMatrix]) -> Result<TauMatrix> {
    let (layout, rows) = prepare(inst, opts)?;
    for w in warm_starts {
        if w.users() != inst.users() || w.aps() != inst.aps() {
            return Err(Error::config("warm start dimensions do not match the instance"));
        }
    }
    let eps = opts.feasibility_tolerance;
    let problem = TauProblem { layout: &layout, rows: rows.clone(), goal: Goal::Throughput };
    let al = al_options(opts);
    let warm: Vec<Vec<f64>> = warm_starts.iter().map(|t| layout.vars_of(t)).collect();

    let mut best: Option<Candidate> = None;
    let consider = |c: Candidate, best: &mut Option<Candidate>| {
        if c.violation <= eps && best.as_ref().is_none_or(|b| better(&layout, &c, b)) {
            *best = Some(c);
        }
    };
    let run = |x0: Vec<f64>, best: &mut Option<Candidate>| {
        consider(evaluate(&layout, &rows, x0.clone()), best);
        if problem.dim() > 0 {
            let out = opt::maximize(&problem, &x0, &al);
            consider(snap(&layout, &rows, evaluate(&layout, &rows, out.x), eps), best);
        }
    };
    let starts = start_points(inst, &layout, &rows, opts, &warm);
    for x0 in &starts {
        run(x0.clone(), &mut best);
    }
    if !rows.is_empty() {
        // augmented-Lagrangian runs can stall on infeasible monopoly
        // corners; a barrier path from strictly feasible points cannot
        let mut seeds = starts;
        seeds.extend(best.iter().map(|c| c.x.clone()));
        // corners are stationary for the barrier too, so seeds are also
        // pulled towards the centre of the box
        let pulled = |seeds: &[Vec<f64>]| -> Vec<Vec<f64>> {
            seeds
                .iter()
                .flat_map(|x| BARRIER_PULLS.iter().map(move |&d| x.iter().map(|&v| (1.0 - d) * v + d * 0.5).collect()))
                .filter(|x: &Vec<f64>| problem.min_slack(x) > 0.0)
                .collect()
        };
        let mut interior = pulled(&seeds);
        if interior.is_empty() && has_room(inst, &rows) {
            interior = pulled(&[max_min_slack(inst, &layout, &rows, opts, &warm).1]);
        }
        for mut x in interior {
            for mu in BARRIER_WEIGHTS {
                let barrier = TauProblem { layout: &layout, rows: rows.clone(), goal: Goal::Barrier(mu) };
                x = opt::maximize(&barrier, &x, &al).x;
                consider(snap(&layout, &rows, evaluate(&layout, &rows, x.clone()), eps), &mut best);
            }
        }
    }
    if best.is_none() {
        match feasibility_with(inst, &layout, &rows, opts, &warm)? {
            Feasibility::Infeasible { scale } => return Err(Error::Infeasible { scale }),
            Feasibility::Feasible(witness) => run(layout.vars_of(&witness), &mut best),
        }
    }
    match best {
        Some(c) => Ok(layout.to_tau(&c.x)),
        None => Err(Error::Infeasible { scale: scaling_bisection(inst, &layout, &rows, opts, &warm) }),
    }
}
