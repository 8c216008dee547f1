//! Three-role control plane: SLA translation, pooled scheduling and local
//! mapping onto physical parameters. Roles exchange plain values.

mod crm;
mod lrm;
mod vrm;

pub(crate) use crm::slice_specs;
pub use crm::{crm_schedule, CrmOptions, Policy};
pub use lrm::{lrm_apply, lrm_report, Lrm, RanState};
pub use vrm::{vrm_translate, vrm_translate_all, GuaranteeKind, Isolation, RanConstraints, SlaSpec, SliceConstraint};

use serde::{Deserialize, Serialize};

use crate::cellular::{CellularAllocation, GainTensor};
use crate::wlan::{CwTable, TauMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RanKind {
    Wlan,
    Cellular,
}

/// Channel state as seen by a local manager.
#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Wlan {
        /// `[user][ap]` linear SNR.
        snr: Vec<Vec<f64>>,
        /// `[user][ap]` PHY rate in Mbit/s.
        rates: Vec<Vec<f64>>,
    },
    Cellular {
        gains: GainTensor,
        noise_power: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementReport {
    pub ran_id: usize,
    /// Last epoch applied by the reporting manager, 0 before any.
    pub epoch: u64,
    pub snapshot: Snapshot,
    /// Slice of each user, if any.
    pub user_slices: Vec<Option<usize>>,
    /// Users whose strongest node is each AP/BS.
    pub users_per_node: Vec<usize>,
    /// Per-BS power budgets in watts; empty for WLAN.
    pub budgets: Vec<f64>,
}

impl MeasurementReport {
    pub fn kind(&self) -> RanKind {
        match self.snapshot {
            Snapshot::Wlan { .. } => RanKind::Wlan,
            Snapshot::Cellular { .. } => RanKind::Cellular,
        }
    }

    pub fn users(&self) -> usize {
        self.user_slices.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Allocation {
    Wlan(TauMatrix),
    Cellular(CellularAllocation),
}

impl Allocation {
    pub fn kind(&self) -> RanKind {
        match self {
            Allocation::Wlan(_) => RanKind::Wlan,
            Allocation::Cellular(_) => RanKind::Cellular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleStatus {
    Optimal,
    /// Reservations were scaled down by this factor to become feasible.
    Scaled(f64),
    Baseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceBlockSchedule {
    pub ran_id: usize,
    pub epoch: u64,
    pub allocation: Allocation,
    pub status: ScheduleStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhysicalParams {
    Wlan(CwTable),
    Cellular { subcarriers: Vec<Vec<Option<usize>>>, power: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    pub ran_id: usize,
    pub epoch: u64,
    pub params: PhysicalParams,
}
