use super::rates::{slice_rates, user_rates_unchecked};
use super::{
    max_snr_cellular, water_fill, weighted_water_fill, CellularAllocation, CellularInstance, CellularSolverOptions,
};
use crate::error::{Error, Result};

const PENALTY_WEIGHTS: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];
const SCALE_TOLERANCE: f64 = 1e-4;
const BOOST_WEIGHTS: [f64; 8] = [2.0, 4.0, 10.0, 30.0, 100.0, 300.0, 1e3, 1e4];
const BOOST_BISECTIONS: usize = 30;
const BUDGET_FRACTIONS: [f64; 6] = [1.0, 0.7, 0.5, 0.3, 0.1, 0.03];

#[derive(Debug, Clone, Copy)]
enum Goal {
    /// Total rate minus weighted slice shortfall.
    Penalized(f64),
    /// Smallest slice slack, with a faint total-rate tie-breaker.
    MinSlack,
}

struct Search<'a> {
    inst: &'a CellularInstance,
    opts: &'a CellularSolverOptions,
    goal: Goal,
}

impl Search<'_> {
    fn score(&self, a: &CellularAllocation) -> f64 {
        let rates = user_rates_unchecked(a, self.inst);
        let total: f64 = rates.iter().sum();
        let slices = slice_rates(self.inst, &rates);
        let reserved = self.inst.slices.iter().zip(&slices).filter(|(s, _)| s.reservation > 0.0);
        match self.goal {
            Goal::Penalized(w) => total - w * reserved.map(|(s, r)| (s.reservation - r).max(0.0)).sum::<f64>(),
            Goal::MinSlack => {
                let slack = reserved.map(|(s, r)| r - s.reservation).fold(f64::INFINITY, f64::min);
                if slack.is_finite() {
                    slack + 1e-6 * total
                } else {
                    total
                }
            }
        }
    }

    fn improves(&self, new: f64, old: f64) -> bool {
        new > old + self.opts.convergence_tolerance * old.abs().max(1.0)
    }

    /// Water-fills BS `b` over its assigned subcarriers with interference
    /// from the other BSs frozen.
    fn refill(&self, a: &mut CellularAllocation, b: usize) {
        let inst = self.inst;
        let effective: Vec<f64> = a.subcarriers[b]
            .iter()
            .enumerate()
            .map(|(n, holder)| match *holder {
                Some(u) => {
                    let g = &inst.gains[u];
                    let interference: f64 =
                        (0..inst.stations()).filter(|&o| o != b).map(|o| a.power[o][n] * g[o][n]).sum();
                    g[b][n] / (inst.noise_power + interference)
                }
                None => 0.0,
            })
            .collect();
        // under reservations a station may hold back power to spare a
        // neighbour's slice
        let reserved = inst.slices.iter().any(|s| s.reservation > 0.0);
        let fractions: &[f64] = if reserved && inst.stations() > 1 { &BUDGET_FRACTIONS } else { &[1.0] };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &f in fractions {
            self.fill_within(a, b, &effective, f * inst.budgets[b], &mut best);
        }
        a.power[b] = best.expect("at least one budget fraction").1;
    }

    /// Water-fills `budget` at `b`; if some slice misses its reservation,
    /// also tries weighting the subcarriers that serve it. Keeps the
    /// best-scoring split in `best`.
    fn fill_within(
        &self,
        a: &mut CellularAllocation,
        b: usize,
        effective: &[f64],
        budget: f64,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        let inst = self.inst;
        let mut consider = |a: &CellularAllocation| {
            let s = self.score(a);
            if best.as_ref().is_none_or(|(v, _)| s > *v) {
                *best = Some((s, a.power[b].clone()));
            }
        };
        a.power[b] = water_fill(effective, budget);
        consider(a);
        let short = self.short_slices(a);
        let boosted: Vec<bool> = a.subcarriers[b]
            .iter()
            .map(|h| h.is_some_and(|u| short.iter().any(|&k| inst.slices[k].user_ids.contains(&u))))
            .collect();
        if !boosted.contains(&true) {
            return;
        }
        let mut try_weight = |a: &mut CellularAllocation, nu: f64| -> bool {
            let weight: Vec<f64> = boosted.iter().map(|&x| if x { nu } else { 1.0 }).collect();
            a.power[b] = weighted_water_fill(effective, &weight, budget);
            consider(a);
            self.short_slices(a).iter().all(|k| !short.contains(k))
        };
        let mut lo = 1.0;
        let mut hi = None;
        for nu in BOOST_WEIGHTS {
            if try_weight(a, nu) {
                hi = Some(nu);
                break;
            }
            lo = nu;
        }
        // smallest weight that lifts the short slices, in log space
        if let Some(mut hi) = hi {
            for _ in 0..BOOST_BISECTIONS {
                let mid = f64::sqrt(lo * hi);
                if try_weight(a, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
    }

    /// Indices of slices with a positive reservation they do not meet.
    fn short_slices(&self, a: &CellularAllocation) -> Vec<usize> {
        let rates = user_rates_unchecked(a, self.inst);
        let slices = slice_rates(self.inst, &rates);
        self.inst
            .slices
            .iter()
            .zip(&slices)
            .enumerate()
            .filter(|(_, (s, r))| s.reservation > 0.0 && **r < s.reservation)
            .map(|(k, _)| k)
            .collect()
    }

    /// Refills `b`, then lets every other station react to the new
    /// interference.
    fn settle(&self, a: &mut CellularAllocation, b: usize) {
        self.refill(a, b);
        for o in (0..self.inst.stations()).filter(|&o| o != b) {
            self.refill(a, o);
        }
    }

    /// Coordinate ascent over the holder of each subcarrier at `b`.
    fn improve_station(&self, a: &mut CellularAllocation, b: usize, mut score: f64) -> f64 {
        let mut refilled = a.clone();
        self.refill(&mut refilled, b);
        let s = self.score(&refilled);
        if self.improves(s, score) {
            *a = refilled;
            score = s;
        }
        let members: Vec<usize> = (0..self.inst.users()).filter(|&u| a.association[u] == Some(b)).collect();
        for _ in 0..self.opts.max_outer_iterations {
            let mut changed = false;
            for n in 0..self.inst.subcarriers() {
                let current = a.subcarriers[b][n];
                let mut best: Option<(f64, CellularAllocation)> = None;
                for option in std::iter::once(None).chain(members.iter().copied().map(Some)) {
                    if option == current {
                        continue;
                    }
                    let mut trial = a.clone();
                    trial.subcarriers[b][n] = option;
                    trial.power[b][n] = 0.0;
                    self.settle(&mut trial, b);
                    let s = self.score(&trial);
                    if self.improves(s, best.as_ref().map_or(score, |(v, _)| *v)) {
                        best = Some((s, trial));
                    }
                }
                if let Some((s, trial)) = best {
                    *a = trial;
                    score = s;
                    changed = true;
                }
            }
            for n in 0..self.inst.subcarriers() {
                for m in n + 1..self.inst.subcarriers() {
                    if a.subcarriers[b][n] == a.subcarriers[b][m] {
                        continue;
                    }
                    let mut trial = a.clone();
                    trial.subcarriers[b].swap(n, m);
                    self.settle(&mut trial, b);
                    let s = self.score(&trial);
                    if self.improves(s, score) {
                        *a = trial;
                        score = s;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        score
    }

    fn sweep(&self, a: &mut CellularAllocation, mut score: f64) -> f64 {
        for _ in 0..self.opts.max_outer_iterations {
            let before = score;
            for b in 0..self.inst.stations() {
                score = self.improve_station(a, b, score);
            }
            if !self.improves(score, before) {
                break;
            }
        }
        score
    }

    /// Moves users one at a time, in id order, to the BS that most improves
    /// the objective after re-optimizing both affected BSs.
    fn reassociate(&self, a: &mut CellularAllocation, mut score: f64) -> f64 {
        for u in 0..self.inst.users() {
            let current = a.association[u];
            let mut best: Option<(f64, CellularAllocation)> = None;
            for b in (0..self.inst.stations()).filter(|&b| Some(b) != current) {
                let mut trial = a.clone();
                if let Some(c) = current {
                    for n in 0..self.inst.subcarriers() {
                        if trial.subcarriers[c][n] == Some(u) {
                            trial.subcarriers[c][n] = None;
                            trial.power[c][n] = 0.0;
                        }
                    }
                    self.refill(&mut trial, c);
                }
                trial.association[u] = Some(b);
                let mut s = self.score(&trial);
                s = self.improve_station(&mut trial, b, s);
                if let Some(c) = current {
                    s = self.improve_station(&mut trial, c, s);
                }
                if self.improves(s, best.as_ref().map_or(score, |(v, _)| *v)) {
                    best = Some((s, trial));
                }
            }
            if let Some((s, trial)) = best {
                *a = trial;
                score = s;
            }
        }
        score
    }

    /// Alternates resource sweeps and reassociation from one start. The
    /// score never decreases, so the final iterate is the best seen.
    fn run(&self, start: &CellularAllocation) -> (f64, CellularAllocation) {
        let mut a = start.clone();
        let initial = self.score(&a);
        let mut score = self.sweep(&mut a, initial);
        for _ in 0..self.opts.max_outer_iterations {
            let before = score;
            score = self.reassociate(&mut a, score);
            score = self.sweep(&mut a, score);
            if !self.improves(score, before) {
                break;
            }
        }
        (score, canonical(a))
    }

    fn best_of(&self, starts: &[CellularAllocation]) -> (f64, CellularAllocation) {
        let mut best: Option<(f64, CellularAllocation)> = None;
        for start in starts {
            let raw = (self.score(start), start.clone());
            for (s, a) in [raw, self.run(start)] {
                if best.as_ref().is_none_or(|(v, _)| s > *v) {
                    best = Some((s, a));
                }
            }
        }
        best.expect("at least one start")
    }
}

/// Drops holders that ended up with zero power.
fn canonical(mut a: CellularAllocation) -> CellularAllocation {
    for (holders, power) in a.subcarriers.iter_mut().zip(&a.power) {
        for (h, p) in holders.iter_mut().zip(power) {
            if *p <= 0.0 {
                *h = None;
            }
        }
    }
    a
}

fn structured_starts(inst: &CellularInstance) -> Vec<CellularAllocation> {
    let (u, b, n) = (inst.users(), inst.stations(), inst.subcarriers());
    let baseline = max_snr_cellular(inst);
    let mut bare = CellularAllocation::empty(u, b, n);
    bare.association = baseline.association.clone();
    let mut starts = vec![baseline, bare];
    for station in 0..b {
        let mut all = CellularAllocation::empty(u, b, n);
        all.association = vec![Some(station); u];
        starts.push(all);
    }
    starts
}

fn min_slack(inst: &CellularInstance, a: &CellularAllocation) -> f64 {
    let slices = slice_rates(inst, &user_rates_unchecked(a, inst));
    inst.slices
        .iter()
        .zip(slices)
        .filter(|(s, _)| s.reservation > 0.0)
        .map(|(s, r)| r - s.reservation)
        .fold(f64::INFINITY, f64::min)
}

fn total_rate(inst: &CellularInstance, a: &CellularAllocation) -> f64 {
    user_rates_unchecked(a, inst).iter().sum()
}

fn max_min_slack(
    inst: &CellularInstance,
    opts: &CellularSolverOptions,
    starts: &[CellularAllocation],
) -> CellularAllocation {
    Search { inst, opts, goal: Goal::MinSlack }.best_of(starts).1
}

fn scaling_bisection(inst: &CellularInstance, opts: &CellularSolverOptions, starts: &[CellularAllocation]) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut warm = starts.to_vec();
    while hi - lo > SCALE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let scaled = inst.scaled(mid);
        let witness = max_min_slack(&scaled, opts, &warm);
        if min_slack(&scaled, &witness) >= -opts.reservation_tolerance {
            lo = mid;
            warm.push(witness);
        } else {
            hi = mid;
        }
    }
    lo
}

/// Whether the slice reservations can be met, and if not the largest
/// uniform scaling of them that can.
pub fn cellular_feasibility(inst: &CellularInstance, opts: &CellularSolverOptions) -> Result<Option<f64>> {
    inst.validate()?;
    opts.validate()?;
    let starts = structured_starts(inst);
    let witness = max_min_slack(inst, opts, &starts);
    if min_slack(inst, &witness) >= -opts.reservation_tolerance {
        return Ok(None);
    }
    Ok(Some(scaling_bisection(inst, opts, &starts)))
}

/// Heuristic sum-rate maximization over association, subcarriers and
/// power, subject to per-slice minimum rates.
///
/// The Max-SNR allocation is always among the candidates. Infeasible
/// reservations yield [`Error::Infeasible`] carrying the largest uniform
/// scaling found feasible.
pub fn solve_joint_allocation(inst: &CellularInstance, opts: &CellularSolverOptions) -> Result<CellularAllocation> {
    inst.validate()?;
    opts.validate()?;
    let mut starts = structured_starts(inst);
    let out = if inst.slices.iter().all(|s| s.reservation <= 0.0) {
        Search { inst, opts, goal: Goal::Penalized(0.0) }.best_of(&starts).1
    } else {
        let witness = max_min_slack(inst, opts, &starts);
        if min_slack(inst, &witness) < -opts.reservation_tolerance {
            return Err(Error::Infeasible { scale: scaling_bisection(inst, opts, &starts) });
        }
        let feasible = |a: &CellularAllocation| min_slack(inst, a) >= -opts.reservation_tolerance;
        let mut best = (total_rate(inst, &witness), witness.clone());
        starts.push(witness);
        for w in PENALTY_WEIGHTS {
            let (_, a) = Search { inst, opts, goal: Goal::Penalized(w) }.best_of(&starts);
            if feasible(&a) {
                let t = total_rate(inst, &a);
                if t > best.0 {
                    best = (t, a);
                }
                break;
            }
            starts.push(a);
        }
        best.1
    };
    out.validate(inst)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SliceSpec;

    fn inst(gains: Vec<Vec<Vec<f64>>>, budgets: Vec<f64>, slices: Vec<SliceSpec>) -> CellularInstance {
        CellularInstance { gains, budgets, noise_power: 1e-3, slices }
    }

    fn open(users: usize) -> Vec<SliceSpec> {
        vec![SliceSpec::new(0, 0.0, (0..users).collect())]
    }

    #[test]
    fn collocated_users_stay_home() {
        let gains = vec![vec![vec![1.0; 2], vec![1e-3; 2]], vec![vec![1e-3; 2], vec![1.0; 2]]];
        let i = inst(gains, vec![1.0, 1.0], open(2));
        let a = solve_joint_allocation(&i, &CellularSolverOptions::default()).unwrap();
        assert_eq!(a.association, vec![Some(0), Some(1)]);
        assert_eq!(a.subcarriers, vec![vec![Some(0); 2], vec![Some(1); 2]]);
        for row in &a.power {
            for p in row {
                assert!((p - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn equal_gains_split_power() {
        let i = inst(vec![vec![vec![1.0, 1.0]]], vec![2.0], open(1));
        let a = solve_joint_allocation(&i, &CellularSolverOptions::default()).unwrap();
        assert_eq!(a.power, vec![vec![1.0, 1.0]]);
    }

    #[test]
    fn reservation_is_met() {
        // user 1 is weak; slice 1 asks for a rate the sum-rate optimum would not give it
        let gains = vec![vec![vec![1.0; 2]], vec![vec![0.01; 2]]];
        let slices = vec![SliceSpec::new(0, 0.0, vec![0]), SliceSpec::new(1, 2.0, vec![1])];
        let i = inst(gains, vec![1.0], slices);
        let a = solve_joint_allocation(&i, &CellularSolverOptions::default()).unwrap();
        let rates = user_rates_unchecked(&a, &i);
        assert!(rates[1] >= 2.0 - 1e-3, "{rates:?}");
        assert!(rates[0] > 0.0);
    }

    #[test]
    fn unreachable_reservation_is_scaled() {
        // lone user, full power on both subcarriers: 2 log2(1 + 500) = 17.94 bit/s/Hz
        let slices = vec![SliceSpec::new(0, 40.0, vec![0])];
        let i = inst(vec![vec![vec![1.0, 1.0]]], vec![1.0], slices);
        match solve_joint_allocation(&i, &CellularSolverOptions::default()) {
            Err(Error::Infeasible { scale }) => {
                let best = 2.0 * 501f64.log2();
                assert!((scale - best / 40.0).abs() < 1e-3, "{scale}");
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let gains = vec![
            vec![vec![1.0, 0.5, 0.2], vec![0.3, 0.3, 0.9]],
            vec![vec![0.2, 0.8, 0.4], vec![0.6, 0.1, 0.5]],
            vec![vec![0.05, 0.05, 0.05], vec![0.04, 0.06, 0.05]],
        ];
        let i = inst(gains, vec![1.0, 1.0], open(3));
        let o = CellularSolverOptions::default();
        assert_eq!(solve_joint_allocation(&i, &o).unwrap(), solve_joint_allocation(&i, &o).unwrap());
    }
}
