//! Network-wide user association and resource allocation for virtualized
//! wireless networks.
//!
//! Two scenarios are modelled on a common substrate:
//!
//! * [`wlan`]: virtualized 802.11 with per-(user, AP) transmission
//!   probabilities, network-wide airtime guarantees per service provider and
//!   a contention-window mapping of the optimized probabilities.
//! * [`cellular`]: multi-cell OFDMA with joint association, subcarrier and
//!   power allocation under per-slice minimum-rate reservations.
//!
//! Both are benchmarked against Max-SNR association and validated against
//! brute-force oracles on tiny instances. [`control`] wires the solvers into a
//! three-role control plane (SLA translation, pooled scheduling, local
//! mapping), [`metrics`] aggregates trials and [`harness`] drives seeded
//! experiments and emits CSV.
//!
//! The `examples/` directory of this crate has one runnable program per
//! capability; start with `cargo run --example wlan_airtime`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cellular;
pub mod control;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod opt;
pub mod wlan;

pub use error::{Error, Result};
