use serde::{Deserialize, Serialize};

use super::RanKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuaranteeKind {
    /// Fraction of channel time.
    Airtime,
    /// Aggregate slice rate in bit/s/Hz.
    MinRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isolation {
    /// Infeasibility is reported to the caller.
    Strict,
    /// Reservations may be scaled down uniformly.
    #[default]
    BestEffort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlaSpec {
    pub slice_id: usize,
    pub guarantee_kind: GuaranteeKind,
    pub guarantee_value: f64,
    #[serde(default)]
    pub isolation_level: Isolation,
}

impl SlaSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.guarantee_value.is_finite() && self.guarantee_value >= 0.0) {
            return Err(Error::config(format!("slice {}: guarantee must be finite and >= 0", self.slice_id)));
        }
        if self.guarantee_kind == GuaranteeKind::Airtime && self.guarantee_value > 1.0 {
            return Err(Error::config(format!("slice {}: airtime guarantee exceeds 1", self.slice_id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConstraint {
    pub slice_id: usize,
    /// Airtime fraction for WLAN, bit/s/Hz for cellular.
    pub reservation: f64,
    /// False for strict isolation: the reservation may not be scaled.
    pub scalable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RanConstraints {
    pub ran_id: usize,
    pub kind: RanKind,
    pub slices: Vec<SliceConstraint>,
}

impl RanConstraints {
    pub fn scalable(&self) -> bool {
        self.slices.iter().all(|c| c.scalable || c.reservation == 0.0)
    }

    pub fn reservation(&self, slice_id: usize) -> f64 {
        self.slices.iter().filter(|c| c.slice_id == slice_id).map(|c| c.reservation).sum()
    }
}

/// Maps one SLA onto a reservation for a RAN of the given kind.
pub fn vrm_translate(sla: &SlaSpec, ran_id: usize, kind: RanKind) -> Result<SliceConstraint> {
    sla.validate()?;
    match (sla.guarantee_kind, kind) {
        (GuaranteeKind::Airtime, RanKind::Wlan) | (GuaranteeKind::MinRate, RanKind::Cellular) => Ok(SliceConstraint {
            slice_id: sla.slice_id,
            reservation: sla.guarantee_value,
            scalable: sla.isolation_level == Isolation::BestEffort,
        }),
        (g, k) => Err(Error::KindMismatch { ran_id, detail: format!("{g:?} guarantee cannot apply to a {k:?} RAN") }),
    }
}

/// Translates every SLA for one RAN. Strict airtime guarantees summing
/// above one can never be met and are rejected here.
pub fn vrm_translate_all(slas: &[SlaSpec], ran_id: usize, kind: RanKind) -> Result<RanConstraints> {
    let slices = slas.iter().map(|s| vrm_translate(s, ran_id, kind)).collect::<Result<Vec<_>>>()?;
    let mut ids: Vec<usize> = slices.iter().map(|c| c.slice_id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::config(format!("RAN {ran_id}: duplicate slice SLA")));
    }
    if kind == RanKind::Wlan {
        let strict: f64 = slices.iter().filter(|c| !c.scalable).map(|c| c.reservation).sum();
        if strict > 1.0 {
            return Err(Error::Infeasible { scale: 1.0 / strict });
        }
    }
    Ok(RanConstraints { ran_id, kind, slices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sla(id: usize, kind: GuaranteeKind, v: f64, iso: Isolation) -> SlaSpec {
        SlaSpec { slice_id: id, guarantee_kind: kind, guarantee_value: v, isolation_level: iso }
    }

    #[test]
    fn airtime_is_identity() {
        let c = vrm_translate(&sla(0, GuaranteeKind::Airtime, 0.5, Isolation::Strict), 0, RanKind::Wlan).unwrap();
        assert_eq!(c.reservation, 0.5);
        assert!(!c.scalable);
    }

    #[test]
    fn zero_rate_is_unconstrained() {
        let c =
            vrm_translate(&sla(1, GuaranteeKind::MinRate, 0.0, Isolation::BestEffort), 3, RanKind::Cellular).unwrap();
        assert_eq!(c.reservation, 0.0);
    }

    #[test]
    fn strict_overbooking_is_surfaced() {
        let slas = [
            sla(0, GuaranteeKind::Airtime, 0.6, Isolation::Strict),
            sla(1, GuaranteeKind::Airtime, 0.6, Isolation::Strict),
        ];
        assert!(matches!(vrm_translate_all(&slas, 0, RanKind::Wlan), Err(Error::Infeasible { .. })));
        let relaxed = [slas[0].clone(), SlaSpec { isolation_level: Isolation::BestEffort, ..slas[1].clone() }];
        assert!(vrm_translate_all(&relaxed, 0, RanKind::Wlan).is_ok());
    }

    #[test]
    fn kind_mismatch() {
        let e = vrm_translate(&sla(0, GuaranteeKind::MinRate, 1.0, Isolation::Strict), 7, RanKind::Wlan);
        assert!(matches!(e, Err(Error::KindMismatch { ran_id: 7, .. })));
        let e = vrm_translate(&sla(0, GuaranteeKind::Airtime, 0.1, Isolation::Strict), 2, RanKind::Cellular);
        assert!(matches!(e, Err(Error::KindMismatch { ran_id: 2, .. })));
    }

    #[test]
    fn invalid_values() {
        assert!(vrm_translate(&sla(0, GuaranteeKind::Airtime, 1.2, Isolation::Strict), 0, RanKind::Wlan).is_err());
        assert!(vrm_translate(&sla(0, GuaranteeKind::MinRate, -1.0, Isolation::Strict), 0, RanKind::Cellular).is_err());
    }
}
