use super::{CellularAllocation, CellularInstance};

/// Max-SNR association on the subcarrier-averaged reference SNR at power
/// `P_b / N`, equal power on every subcarrier and round-robin subcarrier
/// assignment over associated users in id order.
pub fn max_snr_cellular(inst: &CellularInstance) -> CellularAllocation {
    let (users, stations, subcarriers) = (inst.users(), inst.stations(), inst.subcarriers());
    let mut alloc = CellularAllocation::empty(users, stations, subcarriers);
    if subcarriers == 0 {
        return alloc;
    }
    for u in 0..users {
        let mut best: Option<(usize, f64)> = None;
        for b in 0..stations {
            let mean_gain = inst.gains[u][b].iter().sum::<f64>() / subcarriers as f64;
            let snr = inst.budgets[b] / subcarriers as f64 * mean_gain / inst.noise_power;
            if best.is_none_or(|(_, s)| snr > s) {
                best = Some((b, snr));
            }
        }
        alloc.association[u] = best.map(|(b, _)| b);
    }
    for b in 0..stations {
        let members: Vec<usize> = (0..users).filter(|&u| alloc.association[u] == Some(b)).collect();
        if members.is_empty() {
            continue;
        }
        for n in 0..subcarriers {
            alloc.subcarriers[b][n] = Some(members[n % members.len()]);
            alloc.power[b][n] = inst.budgets[b] / subcarriers as f64;
        }
    }
    alloc
}
