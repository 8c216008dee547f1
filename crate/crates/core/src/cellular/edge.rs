use crate::error::{Error, Result};
use crate::model::{AccessPoint, User};

/// A user is at the cell edge iff its distance to the nearest BS is at least
/// `gamma` times half the minimum inter-BS distance.
pub fn classify_cell_edge(users: &[User], stations: &[AccessPoint], gamma: f64) -> Result<Vec<bool>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::config("gamma must lie in (0, 1)"));
    }
    let half = crate::model::deploy::min_inter_site_distance(stations).ok_or(Error::SingleStation)? / 2.0;
    Ok(users
        .iter()
        .map(|u| {
            let nearest = stations.iter().map(|b| b.position.distance(&u.position)).fold(f64::INFINITY, f64::min);
            nearest >= gamma * half
        })
        .collect())
}
