use serde::{Deserialize, Serialize};

use crate::cellular::CellularSolverOptions;
use crate::control::{GuaranteeKind, Isolation, Policy, RanKind};
use crate::error::{Error, Result};
use crate::model::{
    AccessPoint, ChannelParams, DeploymentParams, EdgePlacement, Fading, LoadSplit, Point, RateTable, Region,
};
use crate::wlan::{AirtimeScope, WlanSolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingKind {
    #[default]
    Off,
    /// Seeded per trial from the master seed.
    Rayleigh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub pathloss_exponent: f64,
    #[serde(default = "one")]
    pub reference_distance: f64,
    #[serde(default = "one")]
    pub reference_gain: f64,
    /// Watts per channel (WLAN) or per subcarrier (cellular).
    pub noise_power: f64,
    #[serde(default)]
    pub fading: FadingKind,
}

fn one() -> f64 {
    1.0
}

impl ChannelConfig {
    pub fn params(&self, fading_seed: u64) -> ChannelParams {
        ChannelParams {
            pathloss_exponent: self.pathloss_exponent,
            reference_distance: self.reference_distance,
            reference_gain: self.reference_gain,
            noise_power: self.noise_power,
            fading: match self.fading {
                FadingKind::Off => Fading::Off,
                FadingKind::Rayleigh => Fading::Rayleigh { seed: fading_seed },
            },
        }
    }
}

/// One AP or BS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationConfig {
    pub x: f64,
    pub y: f64,
    /// Defaults to the station index.
    #[serde(default)]
    pub channel_id: Option<usize>,
    /// Watts; the BS power budget in cellular scenarios.
    pub tx_power: f64,
}

/// An explicitly placed user, overriding random deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserConfig {
    pub x: f64,
    pub y: f64,
    pub slice_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentConfig {
    /// Mean users per AP/BS.
    pub lambda_mean: f64,
    /// Share of users in the cell-edge annulus; absent means a uniform
    /// deployment over the region.
    #[serde(default)]
    pub edge_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReservationMode {
    /// Guarantee values are used as given.
    #[default]
    Absolute,
    /// Airtime guarantees are shares of the largest total airtime the
    /// trial's deployment admits.
    FractionOfFeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub slice_id: usize,
    pub guarantee_kind: GuaranteeKind,
    pub guarantee_value: f64,
    #[serde(default)]
    pub isolation_level: Isolation,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub wlan: WlanSolverOptions,
    pub cellular: CellularSolverOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub scenario_kind: RanKind,
    pub region: Region,
    pub layout: Vec<StationConfig>,
    pub channel: ChannelConfig,
    pub deployment: DeploymentConfig,
    pub load_split: LoadSplit,
    #[serde(default)]
    pub slices: Vec<SliceConfig>,
    #[serde(default)]
    pub reservation_mode: ReservationMode,
    pub policy: Policy,
    #[serde(default)]
    pub solver: SolverConfig,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub airtime_scope: AirtimeScope,
    #[serde(default)]
    pub rate_table: RateTable,
    /// OFDMA subcarriers per BS.
    #[serde(default = "default_subcarriers")]
    pub subcarriers: usize,
    /// Cell-edge threshold as a fraction of half the inter-site distance.
    #[serde(default = "default_gamma")]
    pub edge_gamma: f64,
    #[serde(default)]
    pub users: Option<Vec<UserConfig>>,
}

fn default_subcarriers() -> usize {
    4
}

fn default_gamma() -> f64 {
    0.8
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn stations(&self) -> Vec<AccessPoint> {
        self.layout
            .iter()
            .enumerate()
            .map(|(id, s)| AccessPoint {
                id,
                position: Point::new(s.x, s.y),
                channel_id: s.channel_id.unwrap_or(id),
                tx_power: s.tx_power,
            })
            .collect()
    }

    pub fn deployment_params(&self) -> DeploymentParams {
        DeploymentParams { lambda_mean: self.deployment.lambda_mean }
    }

    pub fn edge_placement(&self) -> Option<EdgePlacement> {
        self.deployment.edge_fraction.map(|edge_fraction| EdgePlacement { edge_fraction, gamma: self.edge_gamma })
    }

    /// Collects every violated field rather than stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = Vec::new();
        let mut check = |field: &str, r: Result<()>| {
            if let Err(e) = r {
                problems.push(format!("{field}: {e}"));
            }
        };
        check("region", self.region.validate());
        check("channel", self.channel.params(0).validate());
        check("deployment.lambda_mean", self.deployment_params().validate());
        check("load_split", self.load_split.validate());
        check("solver.wlan", self.solver.wlan.validate());
        check("solver.cellular", self.solver.cellular.validate());
        check("rate_table", self.rate_table.validate());
        if self.layout.is_empty() {
            problems.push("layout: at least one station is required".into());
        }
        for (i, s) in self.layout.iter().enumerate() {
            if !self.region.contains(&Point::new(s.x, s.y)) {
                problems.push(format!("layout[{i}]: station lies outside the region"));
            }
            if !(s.tx_power.is_finite() && s.tx_power > 0.0) {
                problems.push(format!("layout[{i}].tx_power: must be positive"));
            }
        }
        if let Some(f) = self.deployment.edge_fraction {
            if !(0.0..=1.0).contains(&f) {
                problems.push("deployment.edge_fraction: must lie in [0, 1]".into());
            }
            if self.layout.len() < 2 {
                problems.push("deployment.edge_fraction: needs at least two stations".into());
            }
        }
        if !(self.edge_gamma > 0.0 && self.edge_gamma < 1.0) {
            problems.push("edge_gamma: must lie in (0, 1)".into());
        }
        if self.scenario_kind == RanKind::Cellular && self.subcarriers == 0 {
            problems.push("subcarriers: must be positive".into());
        }
        let mut ids: Vec<usize> = self.slices.iter().map(|s| s.slice_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            problems.push("slices: duplicate slice_id".into());
        }
        for (i, s) in self.slices.iter().enumerate() {
            let expected = match self.scenario_kind {
                RanKind::Wlan => GuaranteeKind::Airtime,
                RanKind::Cellular => GuaranteeKind::MinRate,
            };
            if s.guarantee_kind != expected {
                problems.push(format!("slices[{i}].guarantee_kind: {expected:?} expected for this scenario"));
            }
            if !(s.guarantee_value.is_finite() && s.guarantee_value >= 0.0) {
                problems.push(format!("slices[{i}].guarantee_value: must be finite and >= 0"));
            }
            if s.guarantee_kind == GuaranteeKind::Airtime && s.guarantee_value > 1.0 {
                problems.push(format!("slices[{i}].guarantee_value: airtime exceeds 1"));
            }
        }
        if self.reservation_mode == ReservationMode::FractionOfFeasible && self.scenario_kind == RanKind::Cellular {
            problems.push("reservation_mode: fraction_of_feasible applies to airtime guarantees only".into());
        }
        if let Some(users) = &self.users {
            for (i, u) in users.iter().enumerate() {
                if !self.region.contains(&Point::new(u.x, u.y)) {
                    problems.push(format!("users[{i}]: lies outside the region"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}
