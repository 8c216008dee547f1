use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step map from SNR to PHY rate. `thresholds_db[i]` is the minimum SNR
/// (closed lower bound) for `rates_mbps[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateTable {
    pub thresholds_db: Vec<f64>,
    pub rates_mbps: Vec<f64>,
}

impl Default for RateTable {
    /// 802.11a/g rate set on a 20 MHz channel.
    fn default() -> Self {
        RateTable {
            thresholds_db: vec![6.02, 7.78, 9.03, 10.79, 17.04, 18.80, 24.05, 24.56],
            rates_mbps: vec![6.0, 9.0, 12.0, 18.0, 24.0, 36.0, 48.0, 54.0],
        }
    }
}

impl RateTable {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds_db.is_empty() || self.thresholds_db.len() != self.rates_mbps.len() {
            return Err(Error::config("rate table needs matching, non-empty thresholds and rates"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.thresholds_db) || !increasing(&self.rates_mbps) {
            return Err(Error::config("rate table thresholds and rates must be strictly increasing"));
        }
        if self.rates_mbps[0] <= 0.0 {
            return Err(Error::config("rate table rates must be positive"));
        }
        Ok(())
    }

    /// Linear-scale threshold of entry `i`.
    pub fn threshold_linear(&self, i: usize) -> f64 {
        10f64.powf(self.thresholds_db[i] / 10.0)
    }

    /// Rate in Mbit/s; 0 below the lowest threshold.
    pub fn rate(&self, snr: f64) -> f64 {
        (0..self.rates_mbps.len()).rev().find(|&i| snr >= self.threshold_linear(i)).map_or(0.0, |i| self.rates_mbps[i])
    }
}

pub fn wlan_phy_rate(snr: f64, table: &RateTable) -> f64 {
    table.rate(snr)
}
