use std::time::Instant;

use rayon::prelude::*;

use super::config::{ReservationMode, ScenarioConfig};
use super::record::{ResultRecord, SolverStatus};
use crate::cellular::{cellular_rates, classify_cell_edge, CellularInstance};
use crate::control::{
    crm_schedule, lrm_apply, lrm_report, vrm_translate_all, Allocation, CrmOptions, Lrm, Policy, RanConstraints,
    RanKind, RanState, ScheduleStatus, SlaSpec, Snapshot,
};
use crate::error::{Error, Result};
use crate::metrics::{aggregate_trial, TrialMetrics};
use crate::model::seed::{self, STREAM_DEPLOY, STREAM_FADING, STREAM_SLICE};
use crate::model::{assign_slices, generate_edge_users, generate_ppp_users, Point, SliceSpec, User};
use crate::wlan::{wlan_throughput, WlanInstance};

/// Execution knobs that never change results.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses `SDWN_SIM_THREADS` or every core.
    pub threads: Option<usize>,
    /// Record wall-clock time per trial (makes output non-reproducible).
    pub timing: bool,
}

/// Seed of replication `trial`. Seeds depend only on the master seed and
/// the trial index, so adding replications never disturbs earlier ones.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    seed::derive(master, trial as u64)
}

/// One trial in full detail.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub record: ResultRecord,
    pub users: Vec<User>,
    pub per_user_rate: Vec<f64>,
    /// Empty with fewer than two stations.
    pub edge_flags: Vec<bool>,
    /// Airtime per slice in slice-id order (WLAN only).
    pub slice_airtime: Vec<f64>,
}

pub(crate) fn deploy(cfg: &ScenarioConfig, trial_seed: u64) -> Result<Vec<User>> {
    let stations = cfg.stations();
    let mut users = match (&cfg.users, cfg.edge_placement()) {
        (Some(explicit), _) => {
            return Ok(explicit
                .iter()
                .enumerate()
                .map(|(id, u)| User { id, position: Point::new(u.x, u.y), slice_id: u.slice_id })
                .collect())
        }
        (None, Some(edge)) => generate_edge_users(
            &cfg.region,
            &stations,
            &cfg.deployment_params(),
            &edge,
            seed::derive(trial_seed, STREAM_DEPLOY),
        )?,
        (None, None) => generate_ppp_users(
            &cfg.region,
            &cfg.deployment_params(),
            stations.len(),
            seed::derive(trial_seed, STREAM_DEPLOY),
        ),
    };
    let slices = assign_slices(&users, &cfg.load_split, seed::derive(trial_seed, STREAM_SLICE));
    users.iter_mut().zip(slices).for_each(|(u, s)| u.slice_id = s);
    Ok(users)
}

pub(crate) fn ran_state(cfg: &ScenarioConfig, users: Vec<User>, trial_seed: u64) -> RanState {
    let channel = cfg.channel.params(seed::derive(trial_seed, STREAM_FADING));
    match cfg.scenario_kind {
        RanKind::Wlan => RanState::Wlan { users, aps: cfg.stations(), channel, rate_table: cfg.rate_table.clone() },
        RanKind::Cellular => {
            RanState::Cellular { users, stations: cfg.stations(), channel, subcarriers: cfg.subcarriers }
        }
    }
}

/// Slice ids present in the configuration or among the users.
fn slice_ids(cfg: &ScenarioConfig, users: &[User]) -> Vec<usize> {
    let mut ids: Vec<usize> = cfg.slices.iter().map(|s| s.slice_id).chain(users.iter().map(|u| u.slice_id)).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// SLA values for this trial; shares of the feasible airtime become
/// absolute airtime fractions.
pub(crate) fn slas(cfg: &ScenarioConfig, snapshot: &Snapshot) -> Vec<SlaSpec> {
    let feasible = match (cfg.reservation_mode, snapshot) {
        (ReservationMode::FractionOfFeasible, Snapshot::Wlan { rates, .. }) => {
            WlanInstance::new(rates.clone(), Vec::new()).max_total_airtime()
        }
        _ => 1.0,
    };
    cfg.slices
        .iter()
        .map(|s| SlaSpec {
            slice_id: s.slice_id,
            guarantee_kind: s.guarantee_kind,
            guarantee_value: s.guarantee_value * feasible,
            isolation_level: s.isolation_level,
        })
        .collect()
}

pub(crate) fn crm_options(cfg: &ScenarioConfig, policy: Policy) -> CrmOptions {
    CrmOptions {
        policy,
        wlan: cfg.solver.wlan.clone(),
        cellular: cfg.solver.cellular.clone(),
        scope: cfg.airtime_scope,
    }
}

fn slice_specs(ids: &[usize], users: &[User]) -> Vec<SliceSpec> {
    ids.iter()
        .map(|&id| SliceSpec::new(id, 0.0, users.iter().filter(|u| u.slice_id == id).map(|u| u.id).collect()))
        .collect()
}

/// Runs one replication of `policy` through the control plane.
pub fn run_trial(cfg: &ScenarioConfig, policy: Policy, trial: usize, timing: bool) -> Result<TrialOutcome> {
    let started = Instant::now();
    let tseed = trial_seed(cfg.master_seed, trial);
    let users = deploy(cfg, tseed)?;
    let stations = cfg.stations();
    let edge_flags =
        if stations.len() >= 2 { classify_cell_edge(&users, &stations, cfg.edge_gamma)? } else { Vec::new() };
    let mut lrm = Lrm::new(0, ran_state(cfg, users.clone(), tseed));
    let report = lrm_report(&lrm);
    let ids = slice_ids(cfg, &users);
    let slices = slice_specs(&ids, &users);

    let schedule = vrm_translate_all(&slas(cfg, &report.snapshot), 0, cfg.scenario_kind)
        .and_then(|c: RanConstraints| crm_schedule(&[c], std::slice::from_ref(&report), &crm_options(cfg, policy)));
    let schedule = match schedule {
        Ok(mut s) => s.remove(0),
        Err(Error::Infeasible { scale }) => {
            // strict reservations could not be met: nothing is scheduled
            let metrics = TrialMetrics {
                total_throughput: 0.0,
                per_sp_throughput: vec![0.0; ids.len()],
                jain_index: 0.0,
                edge_median_rate: 0.0,
                center_median_rate: 0.0,
            };
            let record =
                record(cfg, policy, trial, &ids, &metrics, SolverStatus::ScaledInfeasible, scale, started, timing);
            return Ok(TrialOutcome {
                record,
                per_user_rate: vec![0.0; users.len()],
                users,
                edge_flags,
                slice_airtime: vec![0.0; ids.len()],
            });
        }
        Err(e) => return Err(e),
    };
    lrm_apply(&mut lrm, &schedule)?;

    let (per_user, slice_airtime) = match (&schedule.allocation, &report.snapshot) {
        (Allocation::Wlan(tau), Snapshot::Wlan { rates, .. }) => {
            let rep = wlan_throughput(tau, rates, &slices)?;
            (rep.per_user(), rep.per_sp_airtime.clone())
        }
        (Allocation::Cellular(alloc), Snapshot::Cellular { gains, noise_power }) => {
            let inst = CellularInstance {
                gains: gains.clone(),
                budgets: report.budgets.clone(),
                noise_power: *noise_power,
                slices: slices.clone(),
            };
            (cellular_rates(alloc, &inst)?.per_user_rate, Vec::new())
        }
        _ => unreachable!("schedules are kind-checked by the local manager"),
    };
    let metrics = aggregate_trial(&per_user, &slices, (!edge_flags.is_empty()).then_some(&edge_flags[..]))?;
    let (status, scale) = match schedule.status {
        ScheduleStatus::Optimal => (SolverStatus::Optimal, 1.0),
        ScheduleStatus::Scaled(s) => (SolverStatus::ScaledInfeasible, s),
        ScheduleStatus::Baseline => (SolverStatus::Baseline, 1.0),
    };
    Ok(TrialOutcome {
        record: record(cfg, policy, trial, &ids, &metrics, status, scale, started, timing),
        users,
        per_user_rate: per_user,
        edge_flags,
        slice_airtime,
    })
}

#[allow(clippy::too_many_arguments)]
fn record(
    cfg: &ScenarioConfig,
    policy: Policy,
    trial: usize,
    ids: &[usize],
    m: &TrialMetrics,
    status: SolverStatus,
    scale: f64,
    started: Instant,
    timing: bool,
) -> ResultRecord {
    let sp = |id: usize| ids.iter().position(|&x| x == id).map_or(0.0, |k| m.per_sp_throughput[k]);
    ResultRecord {
        scenario_id: cfg.scenario_id.clone(),
        trial,
        policy,
        lambda_mean: cfg.deployment.lambda_mean,
        rho1: cfg.load_split.rho1,
        total_throughput: m.total_throughput,
        sp1_throughput: sp(0),
        sp2_throughput: sp(1),
        jain_index: m.jain_index,
        edge_median_rate: m.edge_median_rate,
        center_median_rate: m.center_median_rate,
        solver_status: status,
        scaling_factor: scale,
        wall_time: if timing { started.elapsed().as_secs_f64() } else { 0.0 },
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let from_env = std::env::var("SDWN_SIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    let n = threads.or(from_env).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::config(e.to_string()))
}

/// Runs `jobs` in parallel and returns outcomes in job order.
pub(crate) fn run_jobs(jobs: &[(ScenarioConfig, Policy, usize)], opts: RunOptions) -> Result<Vec<TrialOutcome>> {
    pool(opts.threads)?
        .install(|| jobs.par_iter().map(|(cfg, policy, trial)| run_trial(cfg, *policy, *trial, opts.timing)).collect())
}

/// Every replication of the configured policy, ordered by trial.
pub fn run_scenario(cfg: &ScenarioConfig, opts: RunOptions) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let jobs: Vec<_> = (0..cfg.replications).map(|t| (cfg.clone(), cfg.policy, t)).collect();
    Ok(run_jobs(&jobs, opts)?.into_iter().map(|o| o.record).collect())
}

/// Same as [`run_scenario`] but keeps per-user detail.
pub fn run_scenario_detailed(cfg: &ScenarioConfig, policy: Policy, opts: RunOptions) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let jobs: Vec<_> = (0..cfg.replications).map(|t| (cfg.clone(), policy, t)).collect();
    run_jobs(&jobs, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    LambdaMean,
    Rho1,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda_mean" => Ok(SweepParam::LambdaMean),
            "rho1" => Ok(SweepParam::Rho1),
            other => Err(Error::config(format!("unknown sweep parameter {other:?}; expected lambda_mean or rho1"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::config("sweep grid values must be strictly increasing"));
        }
        Ok(GridAxis { param, values })
    }

    /// Parses `NAME=START:END:STEP`, END inclusive.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::config(format!("malformed sweep parameter {spec:?}; expected NAME=START:END:STEP"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let nums: Vec<f64> = range
            .split(':')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, end, step] = nums[..] else { return Err(bad()) };
        if !(step > 0.0 && start.is_finite() && end.is_finite() && end >= start) {
            return Err(bad());
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect();
        GridAxis::new(name.trim().parse()?, values)
    }
}

fn apply(cfg: &mut ScenarioConfig, param: SweepParam, value: f64) {
    match param {
        SweepParam::LambdaMean => cfg.deployment.lambda_mean = value,
        SweepParam::Rho1 => cfg.load_split.rho1 = value,
    }
}

/// Grid points in lexicographic order, first axis outermost.
pub fn grid_points(cfg: &ScenarioConfig, axes: &[GridAxis]) -> Result<Vec<ScenarioConfig>> {
    let mut points = vec![cfg.clone()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    apply(&mut q, axis.param, v);
                    q
                })
            })
            .collect();
    }
    for p in &points {
        p.validate()?;
    }
    Ok(points)
}

/// Both policies at every grid point; rows ordered by (grid point, policy,
/// trial) whatever the execution order.
pub fn sweep(cfg: &ScenarioConfig, axes: &[GridAxis], opts: RunOptions) -> Result<Vec<ResultRecord>> {
    Ok(sweep_detailed(cfg, axes, opts)?.into_iter().map(|o| o.record).collect())
}

pub fn sweep_detailed(cfg: &ScenarioConfig, axes: &[GridAxis], opts: RunOptions) -> Result<Vec<TrialOutcome>> {
    let mut jobs = Vec::new();
    for point in grid_points(cfg, axes)? {
        for policy in [Policy::MaxSnr, Policy::Sdwn] {
            for t in 0..point.replications {
                jobs.push((point.clone(), policy, t));
            }
        }
    }
    run_jobs(&jobs, opts)
}
