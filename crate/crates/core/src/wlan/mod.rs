//! Virtualized 802.11 scenario.
//!
//! Each user `i` attempts to transmit at AP `a` with probability `tau[i][a]`
//! in a generic slot. APs sit on non-overlapping channels, so contention is
//! per AP: an attempt succeeds when no other user attempts at the same AP.

mod baseline;
mod cw;
mod oracle;
mod problem;
mod solver;
mod throughput;

pub use baseline::{max_snr_wlan, rate_matrix, snr_matrix};
pub use cw::{tau_to_cwmin, CwTable};
pub use oracle::{brute_force_tau_oracle, exhaustive_tau_oracle, oracle_scaling_scan, OracleResult};
pub use solver::{feasibility_check, optimize_tau, reservation_scaling, Feasibility};
pub use throughput::{success_probabilities, weighted_success, wlan_throughput, WlanThroughputReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SliceSpec;

/// Attempt probabilities indexed `(user, ap)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    users: usize,
    aps: usize,
    data: Vec<f64>,
}

impl TauMatrix {
    pub fn zeros(users: usize, aps: usize) -> Self {
        TauMatrix { users, aps, data: vec![0.0; users * aps] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let aps = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != aps) {
            return Err(Error::config("ragged tau matrix"));
        }
        let m = TauMatrix { users: rows.len(), aps, data: rows.concat() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::config(format!("attempt probability {v} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn aps(&self) -> usize {
        self.aps
    }

    pub fn get(&self, user: usize, ap: usize) -> f64 {
        self.data[user * self.aps + ap]
    }

    pub fn set(&mut self, user: usize, ap: usize, v: f64) {
        self.data[user * self.aps + ap] = v;
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.data[user * self.aps..(user + 1) * self.aps]
    }

    /// Attempt probabilities of all users at `ap`.
    pub fn column(&self, ap: usize) -> Vec<f64> {
        (0..self.users).map(|i| self.get(i, ap)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &TauMatrix) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// How slice airtime reservations are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AirtimeScope {
    /// Average over all APs of the slice's per-AP successful airtime.
    #[default]
    NetworkAverage,
    /// The reservation must hold at every AP separately.
    PerAp,
}

/// Everything the WLAN solvers need: PHY rates `[user][ap]` in Mbit/s,
/// slices with airtime reservations, and the reservation scope.
#[derive(Debug, Clone, PartialEq)]
pub struct WlanInstance {
    pub rates: Vec<Vec<f64>>,
    pub slices: Vec<SliceSpec>,
    pub scope: AirtimeScope,
}

impl WlanInstance {
    pub fn new(rates: Vec<Vec<f64>>, slices: Vec<SliceSpec>) -> Self {
        WlanInstance { rates, slices, scope: AirtimeScope::NetworkAverage }
    }

    pub fn users(&self) -> usize {
        self.rates.len()
    }

    pub fn aps(&self) -> usize {
        self.rates.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let aps = self.aps();
        if self.rates.iter().any(|r| r.len() != aps) {
            return Err(Error::config("rate matrix rows differ in length"));
        }
        if self.rates.iter().flatten().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::config("rates must be finite and non-negative"));
        }
        crate::model::geometry::validate_slices(&self.slices, self.users(), true)
    }

    /// Same instance with every reservation multiplied by `s`.
    pub fn scaled(&self, s: f64) -> WlanInstance {
        let mut out = self.clone();
        for sl in &mut out.slices {
            sl.reservation *= s;
        }
        out
    }

    /// Largest total airtime any attempt matrix can achieve: the fraction of
    /// APs with at least one user in coverage (each such AP can be fully
    /// used by a single monopolizing user).
    pub fn max_total_airtime(&self) -> f64 {
        let aps = self.aps();
        if aps == 0 {
            return 0.0;
        }
        let covered = (0..aps).filter(|&a| self.rates.iter().any(|r| r[a] > 0.0)).count();
        covered as f64 / aps as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WlanSolverOptions {
    /// Inner projected-gradient iterations per augmented-Lagrangian round.
    pub max_iterations: usize,
    pub step_size: f64,
    /// Allowed airtime shortfall epsilon.
    pub feasibility_tolerance: f64,
    pub convergence_tolerance: f64,
    pub multistart_count: usize,
    pub oracle_grid_step: f64,
}

impl Default for WlanSolverOptions {
    fn default() -> Self {
        WlanSolverOptions {
            max_iterations: 400,
            step_size: 0.1,
            feasibility_tolerance: 1e-4,
            convergence_tolerance: 1e-9,
            multistart_count: 8,
            oracle_grid_step: 0.001,
        }
    }
}

impl WlanSolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iterations > 0
            && self.step_size > 0.0
            && self.feasibility_tolerance > 0.0
            && self.convergence_tolerance > 0.0
            && self.multistart_count > 0
            && self.oracle_grid_step > 0.0;
        if !positive {
            return Err(Error::config("WLAN solver options must be strictly positive"));
        }
        if self.feasibility_tolerance > 1e-4 {
            return Err(Error::config("feasibility tolerance must not exceed 1e-4"));
        }
        Ok(())
    }
}
