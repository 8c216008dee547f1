use rayon::prelude::*;

use super::rates::{slice_rates, user_rates_unchecked};
use super::{CellularAllocation, CellularInstance, CellularSolverOptions};
use crate::error::{Error, Result};

pub const MAX_ORACLE_USERS: usize = 4;
pub const MAX_ORACLE_STATIONS: usize = 2;
pub const MAX_ORACLE_SUBCARRIERS: usize = 4;
pub const MAX_ORACLE_POWER_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CellularOracleResult {
    pub allocation: CellularAllocation,
    pub objective: f64,
}

/// Per-subcarrier choice: holder and power level in units of `P_b / (L - 1)`.
type Config = Vec<Option<(usize, usize)>>;

fn check_size(inst: &CellularInstance, opts: &CellularSolverOptions) -> Result<()> {
    inst.validate()?;
    opts.validate()?;
    if inst.users() > MAX_ORACLE_USERS
        || inst.stations() > MAX_ORACLE_STATIONS
        || inst.subcarriers() > MAX_ORACLE_SUBCARRIERS
        || opts.power_levels > MAX_ORACLE_POWER_LEVELS
    {
        return Err(Error::OracleSize(format!(
            "{} users, {} BSs, {} subcarriers, {} power levels exceeds {MAX_ORACLE_USERS}/{MAX_ORACLE_STATIONS}/{MAX_ORACLE_SUBCARRIERS}/{MAX_ORACLE_POWER_LEVELS}",
            inst.users(),
            inst.stations(),
            inst.subcarriers(),
            opts.power_levels
        )));
    }
    Ok(())
}

/// All configurations of one BS in lexicographic order of option index,
/// where option 0 is "unassigned" followed by (member, level) pairs.
fn configs(members: &[usize], subcarriers: usize, units: usize) -> Vec<Config> {
    fn rec(members: &[usize], left: usize, units: usize, prefix: &mut Config, out: &mut Vec<Config>) {
        if prefix.len() == left {
            out.push(prefix.clone());
            return;
        }
        prefix.push(None);
        rec(members, left, units, prefix, out);
        prefix.pop();
        let used: usize = prefix.iter().flatten().map(|(_, l)| l).sum();
        for &m in members {
            for level in 1..=units.saturating_sub(used) {
                prefix.push(Some((m, level)));
                rec(members, left, units, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(members, subcarriers, units, &mut Vec::with_capacity(subcarriers), &mut out);
    out
}

fn decode_association(mut index: usize, users: usize, stations: usize) -> Vec<usize> {
    let mut assoc = vec![0; users];
    for u in (0..users).rev() {
        assoc[u] = index % stations;
        index /= stations;
    }
    assoc
}

fn build(inst: &CellularInstance, assoc: &[usize], chosen: &[&Config], units: usize) -> CellularAllocation {
    let mut a = CellularAllocation::empty(inst.users(), inst.stations(), inst.subcarriers());
    a.association = assoc.iter().map(|&b| Some(b)).collect();
    for (b, config) in chosen.iter().enumerate() {
        for (n, choice) in config.iter().enumerate() {
            if let Some((u, level)) = *choice {
                a.subcarriers[b][n] = Some(u);
                a.power[b][n] = inst.budgets[b] * level as f64 / units as f64;
            }
        }
    }
    a
}

/// Visits every enumerated allocation with its lexicographic key
/// `(association index, config index per BS)`.
fn for_each_allocation<T: Send>(
    inst: &CellularInstance,
    opts: &CellularSolverOptions,
    init: impl Fn() -> T + Sync + Send,
    visit: impl Fn(&mut T, Vec<usize>, &CellularAllocation) + Sync + Send,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let (users, stations) = (inst.users(), inst.stations());
    let units = opts.power_levels - 1;
    let associations = stations.pow(users as u32);
    (0..associations)
        .into_par_iter()
        .fold(&init, |mut acc, index| {
            let assoc = decode_association(index, users, stations);
            let lists: Vec<Vec<Config>> = (0..stations)
                .map(|b| {
                    let members: Vec<usize> = (0..users).filter(|&u| assoc[u] == b).collect();
                    configs(&members, inst.subcarriers(), units)
                })
                .collect();
            let mut digits = vec![0usize; stations];
            'outer: loop {
                let chosen: Vec<&Config> = digits.iter().enumerate().map(|(b, &d)| &lists[b][d]).collect();
                let alloc = build(inst, &assoc, &chosen, units);
                let mut key = vec![index];
                key.extend_from_slice(&digits);
                visit(&mut acc, key, &alloc);
                for b in (0..stations).rev() {
                    digits[b] += 1;
                    if digits[b] < lists[b].len() {
                        continue 'outer;
                    }
                    digits[b] = 0;
                }
                break;
            }
            acc
        })
        .reduce(&init, &merge)
}

type Best = Option<(f64, Vec<usize>, CellularAllocation)>;

fn pick(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Exhaustive search over associations, subcarrier holders and power
/// levels `{0, P/(L-1), ..., P}` per subcarrier with per-BS budgets.
/// Returns the feasible allocation of largest total rate; ties go to the
/// lexicographically smallest encoding.
pub fn brute_force_cellular_oracle(
    inst: &CellularInstance,
    opts: &CellularSolverOptions,
) -> Result<CellularOracleResult> {
    check_size(inst, opts)?;
    let tol = opts.reservation_tolerance;
    let best = for_each_allocation(
        inst,
        opts,
        || None,
        |acc: &mut Best, key, alloc| {
            let rates = user_rates_unchecked(alloc, inst);
            let slices = slice_rates(inst, &rates);
            if inst.slices.iter().zip(&slices).all(|(s, r)| *r >= s.reservation - tol) {
                let total: f64 = rates.iter().sum();
                let current = acc.take();
                *acc = pick(current, Some((total, key, alloc.clone())));
            }
        },
        pick,
    );
    match best {
        Some((objective, _, allocation)) => Ok(CellularOracleResult { allocation, objective }),
        None => Err(Error::Infeasible { scale: cellular_oracle_scaling(inst, opts)? }),
    }
}

/// Largest `min_k rate_k / R_k` over the enumeration, capped at 1.
pub fn cellular_oracle_scaling(inst: &CellularInstance, opts: &CellularSolverOptions) -> Result<f64> {
    check_size(inst, opts)?;
    let best = for_each_allocation(
        inst,
        opts,
        || 0.0f64,
        |acc: &mut f64, _, alloc| {
            let slices = slice_rates(inst, &user_rates_unchecked(alloc, inst));
            let ratio = inst
                .slices
                .iter()
                .zip(&slices)
                .filter(|(s, _)| s.reservation > 0.0)
                .map(|(s, r)| r / s.reservation)
                .fold(f64::INFINITY, f64::min);
            *acc = acc.max(ratio);
        },
        f64::max,
    );
    Ok(best.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SliceSpec;

    fn inst(gains: Vec<Vec<Vec<f64>>>, budgets: Vec<f64>, slices: Vec<SliceSpec>) -> CellularInstance {
        CellularInstance { gains, budgets, noise_power: 1e-3, slices }
    }

    #[test]
    fn config_count_matches_closed_form() {
        // 5 options per subcarrier; 12 pairs would spend more than 2 units
        assert_eq!(configs(&[0, 1], 2, 2).len(), 25 - 12);
        assert_eq!(configs(&[], 4, 2), vec![vec![None; 4]]);
    }

    #[test]
    fn collocated_pair_associates_to_nearest() {
        let gains = vec![vec![vec![1.0; 2], vec![1e-3; 2]], vec![vec![1e-3; 2], vec![1.0; 2]]];
        let i = inst(gains, vec![1.0, 1.0], vec![SliceSpec::new(0, 0.0, vec![0, 1])]);
        let r = brute_force_cellular_oracle(&i, &CellularSolverOptions::default()).unwrap();
        assert_eq!(r.allocation.association, vec![Some(0), Some(1)]);
        r.allocation.validate(&i).unwrap();
    }

    #[test]
    fn lone_user_spends_full_budget() {
        let i = inst(vec![vec![vec![0.5, 2.0]]], vec![1.0], vec![SliceSpec::new(0, 0.0, vec![0])]);
        let r = brute_force_cellular_oracle(&i, &CellularSolverOptions::default()).unwrap();
        assert!((r.allocation.used_power()[0] - 1.0).abs() < 1e-12);
        // with 1000x SNR both subcarriers at half power beat one at full
        assert_eq!(r.allocation.power, vec![vec![0.5, 0.5]]);
    }

    #[test]
    fn impossible_reservation() {
        let i = inst(vec![vec![vec![1.0]]], vec![1.0], vec![SliceSpec::new(0, 100.0, vec![0])]);
        match brute_force_cellular_oracle(&i, &CellularSolverOptions::default()) {
            Err(Error::Infeasible { scale }) => assert!((scale - 1001f64.log2() / 100.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_large_instances() {
        let i = inst(vec![vec![vec![1.0; 5]]], vec![1.0], vec![]);
        assert!(matches!(
            brute_force_cellular_oracle(&i, &CellularSolverOptions::default()),
            Err(Error::OracleSize(_))
        ));
        let small = inst(vec![vec![vec![1.0]]], vec![1.0], vec![]);
        let o = CellularSolverOptions { power_levels: 4, ..Default::default() };
        assert!(matches!(brute_force_cellular_oracle(&small, &o), Err(Error::OracleSize(_))));
    }
}
