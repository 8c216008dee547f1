use super::TauMatrix;
use crate::model::{gain_matrix, AccessPoint, ChannelParams, RateTable, User};

/// Received SNR `[user][ap]` at each AP's reference power.
pub fn snr_matrix(users: &[User], aps: &[AccessPoint], params: &ChannelParams) -> Vec<Vec<f64>> {
    let gains = gain_matrix(users, aps, params);
    gains.iter().map(|row| row.iter().zip(aps).map(|(g, ap)| ap.tx_power * g / params.noise_power).collect()).collect()
}

pub fn rate_matrix(snr: &[Vec<f64>], table: &RateTable) -> Vec<Vec<f64>> {
    snr.iter().map(|row| row.iter().map(|&s| table.rate(s)).collect()).collect()
}

/// Max-SNR association: every user joins its highest-SNR AP (lowest id on
/// ties) and the `n` users of an AP each attempt with probability `1/n`.
/// Users with zero rate at every AP stay unassociated.
pub fn max_snr_wlan(snr: &[Vec<f64>], rates: &[Vec<f64>]) -> TauMatrix {
    let users = snr.len();
    let aps = snr.first().map_or(0, Vec::len);
    let mut assoc = vec![None; users];
    for i in 0..users {
        if rates[i].iter().all(|&r| r <= 0.0) {
            continue;
        }
        let mut best = 0;
        for a in 1..aps {
            if snr[i][a] > snr[i][best] {
                best = a;
            }
        }
        assoc[i] = Some(best);
    }
    let mut load = vec![0usize; aps];
    assoc.iter().flatten().for_each(|&a| load[a] += 1);
    let mut tau = TauMatrix::zeros(users, aps);
    for (i, a) in assoc.iter().enumerate() {
        if let Some(a) = *a {
            tau.set(i, a, 1.0 / load[a] as f64);
        }
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_the_stronger_ap() {
        let tau = max_snr_wlan(&[vec![0.5, 0.9]], &[vec![6.0, 6.0]]);
        assert_eq!(tau.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let tau = max_snr_wlan(&[vec![0.7, 0.7]], &[vec![6.0, 6.0]]);
        assert_eq!(tau.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn symmetric_split_at_shared_ap() {
        let snr = vec![vec![9.0, 1.0]; 3];
        let rates = vec![vec![54.0, 6.0]; 3];
        let tau = max_snr_wlan(&snr, &rates);
        for i in 0..3 {
            assert!((tau.get(i, 0) - 1.0 / 3.0).abs() < 1e-15);
            assert_eq!(tau.get(i, 1), 0.0);
        }
    }

    #[test]
    fn uncovered_user_is_left_out() {
        let tau = max_snr_wlan(&[vec![0.1, 0.2], vec![50.0, 1.0]], &[vec![0.0, 0.0], vec![54.0, 0.0]]);
        assert_eq!(tau.row(0), &[0.0, 0.0]);
        assert_eq!(tau.row(1), &[1.0, 0.0]);
    }
}
