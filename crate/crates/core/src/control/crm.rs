use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Allocation, MeasurementReport, RanConstraints, ResourceBlockSchedule, ScheduleStatus, Snapshot};
use crate::cellular::{max_snr_cellular, solve_joint_allocation, CellularInstance, CellularSolverOptions};
use crate::error::{Error, Result};
use crate::model::SliceSpec;
use crate::wlan::{max_snr_wlan, optimize_tau, AirtimeScope, WlanInstance, WlanSolverOptions};

/// Association policy applied by the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Highest-SNR association with equal local sharing.
    MaxSnr,
    /// Network-wide optimization with slice reservations.
    Sdwn,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::MaxSnr => "max_snr",
            Policy::Sdwn => "sdwn",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrmOptions {
    pub policy: Policy,
    pub wlan: WlanSolverOptions,
    pub cellular: CellularSolverOptions,
    pub scope: AirtimeScope,
}

impl Default for CrmOptions {
    fn default() -> Self {
        CrmOptions {
            policy: Policy::Sdwn,
            wlan: WlanSolverOptions::default(),
            cellular: CellularSolverOptions::default(),
            scope: AirtimeScope::default(),
        }
    }
}

/// Slice specs for every slice that has a reservation or a member.
/// Reservations of slices without members at this RAN are void.
pub(crate) fn slice_specs(constraints: &RanConstraints, report: &MeasurementReport) -> Vec<SliceSpec> {
    let mut ids: BTreeSet<usize> = report.user_slices.iter().flatten().copied().collect();
    ids.extend(constraints.slices.iter().map(|c| c.slice_id));
    ids.into_iter()
        .map(|id| {
            let members: Vec<usize> = (0..report.users()).filter(|&u| report.user_slices[u] == Some(id)).collect();
            let reservation = if members.is_empty() { 0.0 } else { constraints.reservation(id) };
            SliceSpec::new(id, reservation, members)
        })
        .collect()
}

/// Solves at full reservations, then for scalable constraint sets at the
/// reported scaling. The scaling factor is the product of the reductions.
fn solve_scaled<T>(scalable: bool, mut solve: impl FnMut(f64) -> Result<T>) -> Result<(T, ScheduleStatus)> {
    let mut scale = 1.0;
    for _ in 0..4 {
        match solve(scale) {
            Ok(x) if scale == 1.0 => return Ok((x, ScheduleStatus::Optimal)),
            Ok(x) => return Ok((x, ScheduleStatus::Scaled(scale))),
            Err(Error::Infeasible { scale: s }) if scalable => scale *= s.min(0.999),
            Err(e) => return Err(e),
        }
    }
    solve(0.0).map(|x| (x, ScheduleStatus::Scaled(0.0)))
}

fn schedule_one(
    constraints: &RanConstraints,
    report: &MeasurementReport,
    opts: &CrmOptions,
) -> Result<(Allocation, ScheduleStatus)> {
    let slices = slice_specs(constraints, report);
    match &report.snapshot {
        Snapshot::Wlan { snr, rates } => {
            let baseline = max_snr_wlan(snr, rates);
            if opts.policy == Policy::MaxSnr {
                return Ok((Allocation::Wlan(baseline), ScheduleStatus::Baseline));
            }
            let inst = WlanInstance { rates: rates.clone(), slices, scope: opts.scope };
            let (tau, status) = solve_scaled(constraints.scalable(), |s| {
                optimize_tau(&inst.scaled(s), &opts.wlan, std::slice::from_ref(&baseline))
            })?;
            Ok((Allocation::Wlan(tau), status))
        }
        Snapshot::Cellular { gains, noise_power } => {
            let inst = CellularInstance {
                gains: gains.clone(),
                budgets: report.budgets.clone(),
                noise_power: *noise_power,
                slices,
            };
            if opts.policy == Policy::MaxSnr {
                inst.validate()?;
                return Ok((Allocation::Cellular(max_snr_cellular(&inst)), ScheduleStatus::Baseline));
            }
            let (alloc, status) =
                solve_scaled(constraints.scalable(), |s| solve_joint_allocation(&inst.scaled(s), &opts.cellular))?;
            Ok((Allocation::Cellular(alloc), status))
        }
    }
}

/// Schedules every RAN named by a constraint set or a report, in RAN id
/// order. Each schedule carries the reporting manager's epoch plus one.
///
/// Strict reservations that cannot be met yield [`Error::Infeasible`];
/// best-effort ones are scaled and flagged in the schedule status.
pub fn crm_schedule(
    constraints: &[RanConstraints],
    reports: &[MeasurementReport],
    opts: &CrmOptions,
) -> Result<Vec<ResourceBlockSchedule>> {
    let mut rans: BTreeSet<usize> = constraints.iter().map(|c| c.ran_id).collect();
    rans.extend(reports.iter().map(|r| r.ran_id));
    rans.into_iter()
        .map(|ran_id| {
            let report = reports.iter().find(|r| r.ran_id == ran_id).ok_or(Error::MissingReport { ran_id })?;
            let empty = RanConstraints { ran_id, kind: report.kind(), slices: Vec::new() };
            let cons = constraints.iter().find(|c| c.ran_id == ran_id).unwrap_or(&empty);
            if cons.kind != report.kind() {
                return Err(Error::KindMismatch {
                    ran_id,
                    detail: format!("{:?} constraints for a {:?} report", cons.kind, report.kind()),
                });
            }
            let (allocation, status) = schedule_one(cons, report, opts)?;
            debug_assert_eq!(allocation.kind(), report.kind());
            Ok(ResourceBlockSchedule { ran_id, epoch: report.epoch + 1, allocation, status })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{RanKind, SliceConstraint, Snapshot};

    fn wlan_report(ran_id: usize) -> MeasurementReport {
        MeasurementReport {
            ran_id,
            epoch: 0,
            snapshot: Snapshot::Wlan { snr: vec![vec![10.0], vec![10.0]], rates: vec![vec![1.0], vec![1.0]] },
            user_slices: vec![Some(0), Some(1)],
            users_per_node: vec![2],
            budgets: vec![],
        }
    }

    fn cellular_report(ran_id: usize) -> MeasurementReport {
        MeasurementReport {
            ran_id,
            epoch: 4,
            snapshot: Snapshot::Cellular { gains: vec![vec![vec![1.0, 1.0]]], noise_power: 1e-3 },
            user_slices: vec![Some(0)],
            users_per_node: vec![1],
            budgets: vec![1.0],
        }
    }

    fn airtime(ran_id: usize, beta: f64) -> RanConstraints {
        RanConstraints {
            ran_id,
            kind: RanKind::Wlan,
            slices: (0..2).map(|k| SliceConstraint { slice_id: k, reservation: beta, scalable: false }).collect(),
        }
    }

    #[test]
    fn two_user_reservation_schedule() {
        let s = crm_schedule(&[airtime(0, 0.2)], &[wlan_report(0)], &CrmOptions::default()).unwrap();
        let Allocation::Wlan(tau) = &s[0].allocation else { panic!("kind") };
        let mut t = [tau.get(0, 0), tau.get(1, 0)];
        t.sort_by(f64::total_cmp);
        assert!((t[0] - 0.4472).abs() < 2e-3 && (t[1] - 0.5528).abs() < 2e-3, "{t:?}");
        assert_eq!(s[0].epoch, 1);
        assert_eq!(s[0].status, ScheduleStatus::Optimal);
    }

    #[test]
    fn no_slices_maximizes_throughput() {
        let s = crm_schedule(&[], &[wlan_report(0)], &CrmOptions::default()).unwrap();
        let Allocation::Wlan(tau) = &s[0].allocation else { panic!("kind") };
        assert_eq!(tau.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn mixed_kinds_dispatch() {
        let s = crm_schedule(&[], &[cellular_report(1), wlan_report(0)], &CrmOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].ran_id, s[0].allocation.kind()), (0, RanKind::Wlan));
        assert_eq!((s[1].ran_id, s[1].allocation.kind(), s[1].epoch), (1, RanKind::Cellular, 5));
    }

    #[test]
    fn missing_report_names_ran() {
        let e = crm_schedule(&[airtime(3, 0.1)], &[wlan_report(0)], &CrmOptions::default());
        assert_eq!(e, Err(Error::MissingReport { ran_id: 3 }));
    }

    #[test]
    fn isolation_level_decides_infeasibility() {
        let strict = crm_schedule(&[airtime(0, 0.4)], &[wlan_report(0)], &CrmOptions::default());
        assert!(matches!(strict, Err(Error::Infeasible { .. })));
        let mut relaxed = airtime(0, 0.4);
        relaxed.slices.iter_mut().for_each(|c| c.scalable = true);
        let s = crm_schedule(&[relaxed], &[wlan_report(0)], &CrmOptions::default()).unwrap();
        match s[0].status {
            ScheduleStatus::Scaled(f) => assert!((f - 0.625).abs() < 3e-3, "{f}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let mut c = airtime(0, 0.1);
        c.kind = RanKind::Cellular;
        assert!(matches!(
            crm_schedule(&[c], &[wlan_report(0)], &CrmOptions::default()),
            Err(Error::KindMismatch { .. })
        ));
    }
}
