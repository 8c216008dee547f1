//! Virtualized multi-cell OFDMA scenario.
//!
//! Every BS reuses the same subcarrier set, so a subcarrier active at two
//! BSs interferes. Within a BS each subcarrier carries at most one user.

mod baseline;
mod edge;
mod oracle;
mod rates;
mod solver;
mod waterfill;

pub use baseline::max_snr_cellular;
pub use edge::classify_cell_edge;
pub use oracle::{brute_force_cellular_oracle, cellular_oracle_scaling, CellularOracleResult};
pub use rates::{cellular_rates, CellularReport};
pub use solver::{cellular_feasibility, solve_joint_allocation};
pub use waterfill::{water_fill, weighted_water_fill};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SliceSpec;

/// Channel power gains indexed `[user][bs][subcarrier]`.
pub type GainTensor = Vec<Vec<Vec<f64>>>;

/// A tiny or full cellular problem: gains, per-BS power budgets in watts,
/// per-subcarrier noise power and slices whose reservation is a minimum
/// aggregate rate in bit/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct CellularInstance {
    pub gains: GainTensor,
    pub budgets: Vec<f64>,
    pub noise_power: f64,
    pub slices: Vec<SliceSpec>,
}

impl CellularInstance {
    pub fn users(&self) -> usize {
        self.gains.len()
    }

    pub fn stations(&self) -> usize {
        self.budgets.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.gains.first().and_then(|u| u.first()).map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let (b, n) = (self.stations(), self.subcarriers());
        if self.gains.iter().any(|u| u.len() != b || u.iter().any(|s| s.len() != n)) {
            return Err(Error::config("gain tensor dimensions are inconsistent"));
        }
        if self.gains.iter().flatten().flatten().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::config("gains must be finite and non-negative"));
        }
        if self.budgets.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::config("power budgets must be positive"));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::config("noise power must be positive"));
        }
        crate::model::geometry::validate_slices(&self.slices, self.users(), false)
    }

    pub fn scaled(&self, s: f64) -> CellularInstance {
        let mut out = self.clone();
        out.slices.iter_mut().for_each(|sl| sl.reservation *= s);
        out
    }
}

/// Association, subcarrier ownership and power.
#[derive(Debug, Clone, PartialEq)]
pub struct CellularAllocation {
    /// Serving BS per user.
    pub association: Vec<Option<usize>>,
    /// `[bs][subcarrier]` holder.
    pub subcarriers: Vec<Vec<Option<usize>>>,
    /// `[bs][subcarrier]` transmit power in watts.
    pub power: Vec<Vec<f64>>,
}

impl CellularAllocation {
    pub fn empty(users: usize, stations: usize, subcarriers: usize) -> Self {
        CellularAllocation {
            association: vec![None; users],
            subcarriers: vec![vec![None; subcarriers]; stations],
            power: vec![vec![0.0; subcarriers]; stations],
        }
    }

    /// Checks every structural invariant against `inst`.
    pub fn validate(&self, inst: &CellularInstance) -> Result<()> {
        let (u, b, n) = (inst.users(), inst.stations(), inst.subcarriers());
        let bad = |m: String| Err(Error::InvalidAllocation(m));
        if self.association.len() != u
            || self.subcarriers.len() != b
            || self.power.len() != b
            || self.subcarriers.iter().any(|r| r.len() != n)
            || self.power.iter().any(|r| r.len() != n)
        {
            return bad(format!("dimensions differ from {u} users x {b} BSs x {n} subcarriers"));
        }
        if let Some(&Some(s)) = self.association.iter().find(|a| matches!(a, Some(s) if *s >= b)) {
            return bad(format!("association to unknown BS {s}"));
        }
        for bs in 0..b {
            let mut total = 0.0;
            for sc in 0..n {
                let p = self.power[bs][sc];
                if !(p.is_finite() && p >= 0.0) {
                    return bad(format!("power at BS {bs} subcarrier {sc} is {p}"));
                }
                match self.subcarriers[bs][sc] {
                    None if p > 0.0 => return bad(format!("unassigned subcarrier {sc} at BS {bs} carries power")),
                    Some(user) if user >= u => return bad(format!("unknown user {user}")),
                    Some(user) if self.association[user] != Some(bs) => {
                        return bad(format!("user {user} holds subcarrier {sc} at BS {bs} but is not associated there"))
                    }
                    _ => {}
                }
                total += p;
            }
            if total > inst.budgets[bs] * (1.0 + 1e-9) {
                return bad(format!("BS {bs} power {total} exceeds budget {}", inst.budgets[bs]));
            }
        }
        Ok(())
    }

    /// Power actually radiated by each BS.
    pub fn used_power(&self) -> Vec<f64> {
        self.power.iter().map(|r| r.iter().sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellularSolverOptions {
    /// Power levels per subcarrier used by the enumeration oracle, spaced
    /// evenly over `[0, budget]`.
    pub power_levels: usize,
    pub max_outer_iterations: usize,
    pub convergence_tolerance: f64,
    /// Allowed slice-rate shortfall in bit/s/Hz.
    pub reservation_tolerance: f64,
}

impl Default for CellularSolverOptions {
    fn default() -> Self {
        CellularSolverOptions {
            power_levels: 3,
            max_outer_iterations: 20,
            convergence_tolerance: 1e-9,
            reservation_tolerance: 1e-3,
        }
    }
}

impl CellularSolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.power_levels == 0
            || self.max_outer_iterations == 0
            || !(self.convergence_tolerance > 0.0)
            || !(self.reservation_tolerance > 0.0)
        {
            return Err(Error::config("cellular solver options must be strictly positive"));
        }
        Ok(())
    }
}
