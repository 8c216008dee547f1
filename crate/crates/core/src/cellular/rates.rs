use super::{CellularAllocation, CellularInstance};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CellularReport {
    /// bit/s/Hz, summed over held subcarriers.
    pub per_user_rate: Vec<f64>,
    pub per_slice_rate: Vec<f64>,
    /// Filled by the caller from the topology; all false by default.
    pub cell_edge_flags: Vec<bool>,
}

impl CellularReport {
    pub fn total(&self) -> f64 {
        self.per_user_rate.iter().sum()
    }
}

/// Per-user rate without validation; `alloc` must already satisfy its
/// invariants for `inst`.
pub(crate) fn user_rates_unchecked(alloc: &CellularAllocation, inst: &CellularInstance) -> Vec<f64> {
    let mut rates = vec![0.0; inst.users()];
    let stations = inst.stations();
    for b in 0..stations {
        for (n, holder) in alloc.subcarriers[b].iter().enumerate() {
            let Some(u) = *holder else { continue };
            let p = alloc.power[b][n];
            if p <= 0.0 {
                continue;
            }
            let g = &inst.gains[u];
            let interference: f64 = (0..stations).filter(|&o| o != b).map(|o| alloc.power[o][n] * g[o][n]).sum();
            rates[u] += (1.0 + p * g[b][n] / (inst.noise_power + interference)).log2();
        }
    }
    rates
}

pub(crate) fn slice_rates(inst: &CellularInstance, per_user: &[f64]) -> Vec<f64> {
    inst.slices.iter().map(|s| s.user_ids.iter().map(|&u| per_user[u]).sum()).collect()
}

/// Validates `alloc` and evaluates SINR-based Shannon rates with
/// inter-cell interference on shared subcarriers.
pub fn cellular_rates(alloc: &CellularAllocation, inst: &CellularInstance) -> Result<CellularReport> {
    inst.validate()?;
    alloc.validate(inst)?;
    let per_user_rate = user_rates_unchecked(alloc, inst);
    Ok(CellularReport {
        per_slice_rate: slice_rates(inst, &per_user_rate),
        cell_edge_flags: vec![false; per_user_rate.len()],
        per_user_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::SliceSpec;
    use proptest::prelude::*;

    fn inst(gains: Vec<Vec<Vec<f64>>>, budgets: Vec<f64>, noise: f64) -> CellularInstance {
        let users = gains.len();
        CellularInstance {
            gains,
            budgets,
            noise_power: noise,
            slices: vec![SliceSpec::new(0, 0.0, (0..users).collect())],
        }
    }

    #[test]
    fn unit_snr_gives_one_bit() {
        let i = inst(vec![vec![vec![1e-13, 5.0]]], vec![1.0], 1e-13);
        let mut a = CellularAllocation::empty(1, 1, 2);
        a.association[0] = Some(0);
        a.subcarriers[0][0] = Some(0);
        a.power[0][0] = 1.0;
        let r = cellular_rates(&a, &i).unwrap();
        assert!((r.per_user_rate[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.per_slice_rate, r.per_user_rate);
    }

    fn two_cell() -> (CellularInstance, CellularAllocation) {
        // user 0 on BS 0, user 1 on BS 1, both on subcarrier 0
        let i = inst(vec![vec![vec![1.0], vec![1.0]], vec![vec![1.0], vec![1.0]]], vec![1.0, 1.0], 1e-12);
        let mut a = CellularAllocation::empty(2, 2, 1);
        a.association = vec![Some(0), Some(1)];
        a.subcarriers = vec![vec![Some(0)], vec![Some(1)]];
        a.power = vec![vec![1.0], vec![1.0]];
        (i, a)
    }

    #[test]
    fn equal_signal_and_interference_is_unit_sinr() {
        let (i, a) = two_cell();
        let r = cellular_rates(&a, &i).unwrap();
        for v in r.per_user_rate {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn silent_interferer_gives_isolated_rate() {
        let (i, mut a) = two_cell();
        a.subcarriers[1][0] = None;
        a.power[1][0] = 0.0;
        let r = cellular_rates(&a, &i).unwrap();
        assert!((r.per_user_rate[0] - (1.0f64 + 1e12).log2()).abs() < 1e-9);
        assert_eq!(r.per_user_rate[1], 0.0);
    }

    #[test]
    fn invariant_violations_are_rejected() {
        let (i, a) = two_cell();
        let mut wrong_bs = a.clone();
        wrong_bs.association[1] = Some(0);
        let mut over = a.clone();
        over.power[0][0] = 1.5;
        let mut stray = a.clone();
        stray.subcarriers[0][0] = None;
        let mut negative = a;
        negative.power[1][0] = -0.1;
        for bad in [wrong_bs, over, stray, negative] {
            assert!(matches!(cellular_rates(&bad, &i), Err(Error::InvalidAllocation(_))));
        }
    }

    prop_compose! {
        fn random_case()(seed in any::<u64>()) -> (CellularInstance, CellularAllocation) {
            use rand::Rng;
            let mut rng = crate::model::seed::rng(seed);
            let (u, b, n) = (4, 3, 3);
            let gains = (0..u).map(|_| (0..b).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect()).collect();
            let i = inst(gains, vec![1.0; b], 0.01);
            let mut a = CellularAllocation::empty(u, b, n);
            for user in 0..u {
                a.association[user] = Some(rng.random_range(0..b));
            }
            for bs in 0..b {
                let members: Vec<usize> = (0..u).filter(|&x| a.association[x] == Some(bs)).collect();
                for sc in 0..n {
                    if !members.is_empty() && rng.random::<f64>() < 0.8 {
                        a.subcarriers[bs][sc] = Some(members[rng.random_range(0..members.len())]);
                        a.power[bs][sc] = rng.random::<f64>() / n as f64;
                    }
                }
            }
            (i, a)
        }
    }

    proptest! {
        #[test]
        fn silencing_interference_never_hurts((i, a) in random_case(), pick in 0usize..9) {
            let base = cellular_rates(&a, &i).unwrap().per_user_rate;
            let (bs, sc) = (pick / 3, pick % 3);
            let mut quiet = a.clone();
            quiet.power[bs][sc] = 0.0;
            quiet.subcarriers[bs][sc] = None;
            let after = cellular_rates(&quiet, &i).unwrap().per_user_rate;
            let holder = a.subcarriers[bs][sc];
            for u in 0..i.users() {
                if Some(u) != holder {
                    prop_assert!(after[u] >= base[u] - 1e-12);
                }
            }
        }

        #[test]
        fn rates_are_non_negative((i, a) in random_case()) {
            let r = cellular_rates(&a, &i).unwrap();
            prop_assert!(r.per_user_rate.iter().all(|v| *v >= 0.0));
            let s: f64 = r.per_user_rate.iter().sum();
            prop_assert!((r.per_slice_rate.iter().sum::<f64>() - s).abs() < 1e-9);
        }
    }
}
