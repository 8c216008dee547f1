use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::geometry::{AccessPoint, Point, Region, User};
use super::seed;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentParams {
    /// Expected number of users per AP.
    pub lambda_mean: f64,
}

impl DeploymentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_mean > 0.0) || !self.lambda_mean.is_finite() {
            return Err(Error::config("lambda_mean must be positive and finite"));
        }
        Ok(())
    }
}

/// Fraction of users belonging to slice 0 (the first service provider).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSplit {
    pub rho1: f64,
}

impl LoadSplit {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho1) {
            return Err(Error::config("rho1 must lie in [0, 1]"));
        }
        Ok(())
    }
}

fn poisson_count(mean: f64, rng: &mut impl Rng) -> usize {
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as usize
}

/// Homogeneous PPP over `region` with intensity `lambda_mean * ap_count / area`.
/// Users come back with ids `0..N` and slice 0.
pub fn generate_ppp_users(region: &Region, deployment: &DeploymentParams, ap_count: usize, seed: u64) -> Vec<User> {
    let mut rng = seed::rng(seed);
    let n = poisson_count(deployment.lambda_mean * ap_count as f64, &mut rng);
    (0..n)
        .map(|id| User {
            id,
            position: Point::new(rng.random_range(0.0..=region.width), rng.random_range(0.0..=region.height)),
            slice_id: 0,
        })
        .collect()
}

/// Independent Bernoulli(rho1) membership: slice 0 with probability `rho1`,
/// otherwise slice 1.
pub fn assign_slices(users: &[User], split: &LoadSplit, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    users.iter().map(|_| if rng.random::<f64>() < split.rho1 { 0 } else { 1 }).collect()
}

/// Placement that concentrates users near cell borders. Each user picks a
/// station uniformly; with probability `edge_fraction` it lands uniformly in
/// the annulus `[gamma * h, h]` around it, else in the disk of radius
/// `gamma * h`, where `h` is half the minimum inter-station distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePlacement {
    pub edge_fraction: f64,
    pub gamma: f64,
}

pub(crate) fn min_inter_site_distance(stations: &[AccessPoint]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in stations.iter().enumerate() {
        for b in &stations[i + 1..] {
            let d = a.position.distance(&b.position);
            best = Some(best.map_or(d, |m: f64| m.min(d)));
        }
    }
    best
}

pub fn generate_edge_users(
    region: &Region,
    stations: &[AccessPoint],
    deployment: &DeploymentParams,
    placement: &EdgePlacement,
    seed: u64,
) -> Result<Vec<User>> {
    let half = min_inter_site_distance(stations).ok_or(Error::SingleStation)? / 2.0;
    if !(0.0..=1.0).contains(&placement.edge_fraction) {
        return Err(Error::config("edge_fraction must lie in [0, 1]"));
    }
    if !(placement.gamma > 0.0 && placement.gamma < 1.0) {
        return Err(Error::config("gamma must lie in (0, 1)"));
    }
    let mut rng = seed::rng(seed);
    let n = poisson_count(deployment.lambda_mean * stations.len() as f64, &mut rng);
    let inner = placement.gamma * half;
    let mut users = Vec::with_capacity(n);
    for id in 0..n {
        let edge = rng.random::<f64>() < placement.edge_fraction;
        let (r_lo, r_hi) = if edge { (inner, half) } else { (0.0, inner) };
        // rejection keeps the area-uniform law while staying inside the region
        let position = loop {
            let centre = stations[rng.random_range(0..stations.len())].position;
            let u: f64 = rng.random();
            let r = (r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo)).sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let p = Point::new(centre.x + r * theta.cos(), centre.y + r * theta.sin());
            if region.contains(&p) {
                break p;
            }
        };
        users.push(User { id, position, slice_id: 0 });
    }
    Ok(users)
}
