use super::{Allocation, MeasurementReport, PhysicalConfig, PhysicalParams, RanKind, ResourceBlockSchedule, Snapshot};
use crate::error::{Error, Result};
use crate::model::{gain_tensor, AccessPoint, ChannelParams, RateTable, User};
use crate::wlan::{rate_matrix, snr_matrix, tau_to_cwmin};

/// Physical state owned by one local resource manager.
#[derive(Debug, Clone, PartialEq)]
pub enum RanState {
    Wlan { users: Vec<User>, aps: Vec<AccessPoint>, channel: ChannelParams, rate_table: RateTable },
    Cellular { users: Vec<User>, stations: Vec<AccessPoint>, channel: ChannelParams, subcarriers: usize },
}

impl RanState {
    pub fn kind(&self) -> RanKind {
        match self {
            RanState::Wlan { .. } => RanKind::Wlan,
            RanState::Cellular { .. } => RanKind::Cellular,
        }
    }

    pub fn users(&self) -> &[User] {
        match self {
            RanState::Wlan { users, .. } | RanState::Cellular { users, .. } => users,
        }
    }

    fn users_mut(&mut self) -> &mut Vec<User> {
        match self {
            RanState::Wlan { users, .. } | RanState::Cellular { users, .. } => users,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lrm {
    pub ran_id: usize,
    pub state: RanState,
    applied: Vec<u64>,
}

impl Lrm {
    pub fn new(ran_id: usize, state: RanState) -> Self {
        Lrm { ran_id, state, applied: Vec::new() }
    }

    /// Last applied epoch, 0 before any.
    pub fn epoch(&self) -> u64 {
        self.applied.last().copied().unwrap_or(0)
    }

    /// Every epoch applied so far, oldest first.
    pub fn applied_epochs(&self) -> &[u64] {
        &self.applied
    }

    pub fn add_user(&mut self, user: User) {
        self.state.users_mut().push(user);
    }
}

fn strongest(row: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in row.iter().enumerate() {
        if best.is_none_or(|b| v > row[b]) {
            best = Some(i);
        }
    }
    best
}

/// Snapshot of the current channel state and node loads.
pub fn lrm_report(lrm: &Lrm) -> MeasurementReport {
    let user_slices = lrm.state.users().iter().map(|u| Some(u.slice_id)).collect();
    let (snapshot, reference, nodes, budgets) = match &lrm.state {
        RanState::Wlan { users, aps, channel, rate_table } => {
            let snr = snr_matrix(users, aps, channel);
            let rates = rate_matrix(&snr, rate_table);
            (Snapshot::Wlan { snr: snr.clone(), rates }, snr, aps.len(), Vec::new())
        }
        RanState::Cellular { users, stations, channel, subcarriers } => {
            let gains = gain_tensor(users, stations, *subcarriers, channel);
            let reference = gains
                .iter()
                .map(|u| u.iter().zip(stations).map(|(g, b)| b.tx_power * g.iter().sum::<f64>()).collect())
                .collect::<Vec<Vec<f64>>>();
            let budgets = stations.iter().map(|b| b.tx_power).collect();
            (Snapshot::Cellular { gains, noise_power: channel.noise_power }, reference, stations.len(), budgets)
        }
    };
    let mut users_per_node = vec![0; nodes];
    reference.iter().filter_map(|row| strongest(row)).for_each(|n| users_per_node[n] += 1);
    MeasurementReport { ran_id: lrm.ran_id, epoch: lrm.epoch(), snapshot, user_slices, users_per_node, budgets }
}

/// Maps a schedule onto physical parameters: contention windows for WLAN,
/// subcarrier and power tables unchanged for cellular.
pub fn lrm_apply(lrm: &mut Lrm, schedule: &ResourceBlockSchedule) -> Result<PhysicalConfig> {
    if schedule.ran_id != lrm.ran_id {
        return Err(Error::KindMismatch {
            ran_id: lrm.ran_id,
            detail: format!("schedule addressed to RAN {}", schedule.ran_id),
        });
    }
    if schedule.allocation.kind() != lrm.state.kind() {
        return Err(Error::KindMismatch {
            ran_id: lrm.ran_id,
            detail: format!("{:?} allocation for a {:?} RAN", schedule.allocation.kind(), lrm.state.kind()),
        });
    }
    if schedule.epoch <= lrm.epoch() {
        return Err(Error::StaleEpoch { ran_id: lrm.ran_id, epoch: schedule.epoch, applied: lrm.epoch() });
    }
    let params = match &schedule.allocation {
        Allocation::Wlan(tau) => PhysicalParams::Wlan(tau_to_cwmin(tau)),
        Allocation::Cellular(a) => {
            PhysicalParams::Cellular { subcarriers: a.subcarriers.clone(), power: a.power.clone() }
        }
    };
    lrm.applied.push(schedule.epoch);
    Ok(PhysicalConfig { ran_id: lrm.ran_id, epoch: schedule.epoch, params })
}
