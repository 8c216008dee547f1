use rand::Rng;
use rand_distr::Exp1;

use super::geometry::{AccessPoint, User};
use super::seed;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    Off,
    /// Exponential(1) power fading, one independent draw per
    /// (user, AP, subcarrier), reproducible from `seed`.
    Rayleigh {
        seed: u64,
    },
}

/// Log-distance path loss `K (d / d0)^-alpha` with distance clamped at `d0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub pathloss_exponent: f64,
    pub reference_distance: f64,
    pub reference_gain: f64,
    pub noise_power: f64,
    pub fading: Fading,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            pathloss_exponent: 3.5,
            reference_distance: 1.0,
            reference_gain: 1.0,
            noise_power: 1e-13,
            fading: Fading::Off,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.pathloss_exponent > 2.0) {
            return Err(Error::config("path-loss exponent must exceed 2"));
        }
        if !(self.reference_distance > 0.0) {
            return Err(Error::config("reference distance must be positive"));
        }
        if !(self.reference_gain > 0.0) {
            return Err(Error::config("reference gain must be positive"));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::config("noise power must be positive"));
        }
        Ok(())
    }

    fn path_gain(&self, distance: f64) -> f64 {
        let d = distance.max(self.reference_distance);
        self.reference_gain * (d / self.reference_distance).powf(-self.pathloss_exponent)
    }

    fn fading_draw(&self, user: usize, ap: usize, subcarrier: usize) -> f64 {
        match self.fading {
            Fading::Off => 1.0,
            Fading::Rayleigh { seed: s } => {
                let key = seed::derive(seed::derive(seed::derive(s, user as u64), ap as u64), subcarrier as u64);
                seed::rng(key).sample(Exp1)
            }
        }
    }
}

/// Power gain between `user` and `ap` on subcarrier 0.
pub fn channel_gain(user: &User, ap: &AccessPoint, params: &ChannelParams) -> f64 {
    subcarrier_gain(user, ap, params, 0)
}

fn subcarrier_gain(user: &User, ap: &AccessPoint, params: &ChannelParams, subcarrier: usize) -> f64 {
    let d = user.position.distance(&ap.position);
    params.path_gain(d) * params.fading_draw(user.id, ap.id, subcarrier)
}

/// `[user][ap]` gain matrix.
pub fn gain_matrix(users: &[User], aps: &[AccessPoint], params: &ChannelParams) -> Vec<Vec<f64>> {
    users.iter().map(|u| aps.iter().map(|a| channel_gain(u, a, params)).collect()).collect()
}

/// `[user][bs][subcarrier]` gain tensor.
pub fn gain_tensor(
    users: &[User],
    stations: &[AccessPoint],
    subcarriers: usize,
    params: &ChannelParams,
) -> Vec<Vec<Vec<f64>>> {
    users
        .iter()
        .map(|u| {
            stations.iter().map(|b| (0..subcarriers).map(|n| subcarrier_gain(u, b, params, n)).collect()).collect()
        })
        .collect()
}
