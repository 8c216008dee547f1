use super::TauMatrix;
use crate::error::{Error, Result};
use crate::model::SliceSpec;

/// `prod_{j != i} (1 - tau_j)` for every `i`, without division.
fn exclusion_products(tau: &[f64]) -> Vec<f64> {
    let n = tau.len();
    let mut out = vec![1.0; n];
    let mut acc = 1.0;
    for i in 0..n {
        out[i] = acc;
        acc *= 1.0 - tau[i];
    }
    acc = 1.0;
    for i in (0..n).rev() {
        out[i] *= acc;
        acc *= 1.0 - tau[i];
    }
    out
}

/// Per-user success probability `tau_i prod_{j != i}(1 - tau_j)` at one AP.
pub fn success_probabilities(tau: &[f64]) -> Vec<f64> {
    exclusion_products(tau).iter().zip(tau).map(|(e, t)| t * e).collect()
}

/// `V = sum_i w_i s_i` over one AP's attempt vector. With `grad`, also writes
/// `dV/dtau_m = w_m E_m - sum_{i != m} w_i tau_i E_{i,m}`, where `E` are the
/// exclusion products. The second term equals `(V - w_m s_m) / (1 - tau_m)`,
/// evaluated directly when `tau_m` is close to 1.
pub fn weighted_success(tau: &[f64], w: &[f64], grad: Option<&mut [f64]>) -> f64 {
    debug_assert_eq!(tau.len(), w.len());
    let excl = exclusion_products(tau);
    let value: f64 = (0..tau.len()).map(|i| w[i] * tau[i] * excl[i]).sum();
    if let Some(grad) = grad {
        for m in 0..tau.len() {
            let q = 1.0 - tau[m];
            let rest =
                if q > 1e-6 { (value - w[m] * tau[m] * excl[m]) / q } else { others_weighted_success(tau, w, m) };
            grad[m] = w[m] * excl[m] - rest;
        }
    }
    value
}

/// `sum_{i != m} w_i tau_i prod_{j not in {i, m}} (1 - tau_j)`.
fn others_weighted_success(tau: &[f64], w: &[f64], m: usize) -> f64 {
    let (t, v): (Vec<f64>, Vec<f64>) =
        tau.iter().zip(w).enumerate().filter(|&(i, _)| i != m).map(|(_, (&t, &w))| (t, w)).unzip();
    let excl = exclusion_products(&t);
    (0..t.len()).map(|i| v[i] * t[i] * excl[i]).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WlanThroughputReport {
    /// `T[i][a]` in Mbit/s.
    pub per_user_per_ap: Vec<Vec<f64>>,
    /// `T_k`: sum of member throughputs over all APs.
    pub per_sp: Vec<f64>,
    /// Network-average successful airtime per slice.
    pub per_sp_airtime: Vec<f64>,
    /// `[slice][ap]` successful airtime.
    pub per_sp_ap_airtime: Vec<Vec<f64>>,
}

impl WlanThroughputReport {
    pub fn total(&self) -> f64 {
        self.per_user_per_ap.iter().flatten().sum()
    }

    pub fn per_user(&self) -> Vec<f64> {
        self.per_user_per_ap.iter().map(|r| r.iter().sum()).collect()
    }
}

pub fn wlan_throughput(tau: &TauMatrix, rates: &[Vec<f64>], slices: &[SliceSpec]) -> Result<WlanThroughputReport> {
    let (users, aps) = (tau.users(), tau.aps());
    if rates.len() != users || rates.iter().any(|r| r.len() != aps) {
        return Err(Error::config(format!("rate matrix does not match {users} users x {aps} APs")));
    }
    tau.validate()?;
    let mut slice_of = vec![None; users];
    for (k, s) in slices.iter().enumerate() {
        for &u in &s.user_ids {
            if u >= users {
                return Err(Error::config(format!("slice {} references unknown user {u}", s.slice_id)));
            }
            slice_of[u] = Some(k);
        }
    }
    let mut per_user_per_ap = vec![vec![0.0; aps]; users];
    let mut per_sp_ap_airtime = vec![vec![0.0; aps]; slices.len()];
    for a in 0..aps {
        let s = success_probabilities(&tau.column(a));
        for i in 0..users {
            per_user_per_ap[i][a] = rates[i][a] * s[i];
            if let Some(k) = slice_of[i] {
                per_sp_ap_airtime[k][a] += s[i];
            }
        }
    }
    let per_sp =
        slices.iter().map(|sl| sl.user_ids.iter().map(|&u| per_user_per_ap[u].iter().sum::<f64>()).sum()).collect();
    let per_sp_airtime =
        per_sp_ap_airtime.iter().map(|row| if aps == 0 { 0.0 } else { row.iter().sum::<f64>() / aps as f64 }).collect();
    Ok(WlanThroughputReport { per_user_per_ap, per_sp, per_sp_airtime, per_sp_ap_airtime })
}
