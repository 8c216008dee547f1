use std::fmt;

use super::config::ScenarioConfig;
use super::run::{crm_options, ran_state, slas, trial_seed};
use crate::cellular::{brute_force_cellular_oracle, cellular_rates, solve_joint_allocation, CellularInstance};
use crate::control::{lrm_report, slice_specs, vrm_translate_all, Lrm, Policy, RanKind, Snapshot};
use crate::error::{Error, Result};
use crate::wlan::{brute_force_tau_oracle, max_snr_wlan, optimize_tau, wlan_throughput, WlanInstance};

/// WLAN gap tolerance, in units of the largest PHY rate.
const WLAN_TOLERANCE: f64 = 1e-2;
/// Cellular relative gap tolerance.
const CELLULAR_TOLERANCE: f64 = 0.05;
/// Allowed disagreement between the two scaling factors.
const SCALE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Feasible { objective: f64 },
    Infeasible { scale: f64 },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Feasible { objective } => write!(f, "feasible, objective {objective:.6}"),
            Outcome::Infeasible { scale } => write!(f, "infeasible, scaling {scale:.4}"),
        }
    }
}

fn outcome<T>(r: Result<T>, objective: impl FnOnce(T) -> Result<f64>) -> Result<Outcome> {
    match r {
        Ok(x) => Ok(Outcome::Feasible { objective: objective(x)? }),
        Err(Error::Infeasible { scale }) => Ok(Outcome::Infeasible { scale }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub kind: RanKind,
    pub solver: Outcome,
    pub oracle: Outcome,
    /// Objective shortfall of the solver (normalized as `tolerance`), or
    /// the scaling-factor difference when both sides are infeasible.
    pub gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {:?}", self.kind)?;
        writeln!(f, "solver:   {}", self.solver)?;
        writeln!(f, "oracle:   {}", self.oracle)?;
        write!(
            f,
            "gap:      {:.6} (tolerance {}) {}",
            self.gap,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

fn compare(kind: RanKind, solver: Outcome, oracle: Outcome, normalizer: f64) -> VerificationReport {
    let (gap, tolerance) = match (solver, oracle) {
        (Outcome::Feasible { objective: s }, Outcome::Feasible { objective: o }) => match kind {
            RanKind::Wlan => ((o - s) / normalizer, WLAN_TOLERANCE),
            RanKind::Cellular => ((o - s) / o.abs().max(f64::MIN_POSITIVE), CELLULAR_TOLERANCE),
        },
        (Outcome::Infeasible { scale: a }, Outcome::Infeasible { scale: b }) => ((a - b).abs(), SCALE_TOLERANCE),
        _ => (f64::INFINITY, 0.0),
    };
    VerificationReport { kind, solver, oracle, gap, tolerance, passed: gap <= tolerance }
}

/// Solves trial 0 of `cfg` with both the solver and the brute-force oracle.
///
/// WLAN gaps are measured in units of the largest PHY rate, cellular gaps
/// relative to the oracle objective.
pub fn verify_oracle(cfg: &ScenarioConfig, grid_step: Option<f64>) -> Result<VerificationReport> {
    cfg.validate()?;
    let tseed = trial_seed(cfg.master_seed, 0);
    let users = super::run::deploy(cfg, tseed)?;
    let lrm = Lrm::new(0, ran_state(cfg, users, tseed));
    let report = lrm_report(&lrm);
    let constraints = vrm_translate_all(&slas(cfg, &report.snapshot), 0, cfg.scenario_kind)?;
    let slices = slice_specs(&constraints, &report);
    let opts = crm_options(cfg, Policy::Sdwn);
    match &report.snapshot {
        Snapshot::Wlan { snr, rates } => {
            let inst = WlanInstance { rates: rates.clone(), slices, scope: opts.scope };
            let step = grid_step.unwrap_or(opts.wlan.oracle_grid_step);
            let eps = opts.wlan.feasibility_tolerance;
            let oracle = outcome(brute_force_tau_oracle(&inst, step, eps), |r| Ok(r.objective))?;
            let solver = outcome(optimize_tau(&inst, &opts.wlan, &[max_snr_wlan(snr, rates)]), |tau| {
                Ok(wlan_throughput(&tau, &inst.rates, &inst.slices)?.total())
            })?;
            let scale = inst.rates.iter().flatten().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            Ok(compare(RanKind::Wlan, solver, oracle, scale))
        }
        Snapshot::Cellular { gains, noise_power } => {
            let inst = CellularInstance {
                gains: gains.clone(),
                budgets: report.budgets.clone(),
                noise_power: *noise_power,
                slices,
            };
            let oracle = outcome(brute_force_cellular_oracle(&inst, &opts.cellular), |r| Ok(r.objective))?;
            let solver =
                outcome(solve_joint_allocation(&inst, &opts.cellular), |a| Ok(cellular_rates(&a, &inst)?.total()))?;
            Ok(compare(RanKind::Cellular, solver, oracle, 1.0))
        }
    }
}
