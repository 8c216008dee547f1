use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

/// Axis-aligned deployment area `[0, width] x [0, height]` in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub width: f64,
    pub height: f64,
}

impl Region {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        let r = Region { width, height };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0) || !self.width.is_finite() || !self.height.is_finite() {
            return Err(Error::config(format!(
                "region must have positive finite size, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

/// An AP (802.11) or BS (cellular). For WLAN `tx_power` is the common
/// reference power used for SNR; for cellular it is the per-BS budget.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint {
    pub id: usize,
    pub position: Point,
    pub channel_id: usize,
    pub tx_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub id: usize,
    pub position: Point,
    pub slice_id: usize,
}

/// A service provider's share: an airtime fraction (WLAN) or a minimum
/// aggregate rate in bit/s/Hz (cellular), plus its member users.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub slice_id: usize,
    pub reservation: f64,
    pub user_ids: Vec<usize>,
}

impl SliceSpec {
    pub fn new(slice_id: usize, reservation: f64, user_ids: Vec<usize>) -> Self {
        SliceSpec { slice_id, reservation, user_ids }
    }

    /// Builds one spec per reservation, collecting members from `users`.
    pub fn from_users(reservations: &[f64], users: &[User]) -> Vec<SliceSpec> {
        reservations
            .iter()
            .enumerate()
            .map(|(k, &r)| SliceSpec {
                slice_id: k,
                reservation: r,
                user_ids: users.iter().filter(|u| u.slice_id == k).map(|u| u.id).collect(),
            })
            .collect()
    }
}

/// Checks the slice-set invariants against a population of `n_users`.
pub(crate) fn validate_slices(slices: &[SliceSpec], n_users: usize, airtime: bool) -> Result<()> {
    let mut seen = vec![false; n_users];
    for s in slices {
        if !(s.reservation >= 0.0) || !s.reservation.is_finite() {
            return Err(Error::config(format!("slice {} reservation must be finite and >= 0", s.slice_id)));
        }
        if airtime && s.reservation > 1.0 {
            return Err(Error::config(format!("slice {} airtime exceeds 1", s.slice_id)));
        }
        for &u in &s.user_ids {
            if u >= n_users {
                return Err(Error::config(format!("slice {} references unknown user {u}", s.slice_id)));
            }
            if std::mem::replace(&mut seen[u], true) {
                return Err(Error::config(format!("user {u} belongs to more than one slice")));
            }
        }
    }
    Ok(())
}
