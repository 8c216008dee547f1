//! Topology, channel and deployment model shared by both scenarios.

mod channel;
pub(crate) mod deploy;
pub(crate) mod geometry;
mod rate;
pub mod seed;

pub use channel::{channel_gain, gain_matrix, gain_tensor, ChannelParams, Fading};
pub use deploy::{assign_slices, generate_edge_users, generate_ppp_users, DeploymentParams, EdgePlacement, LoadSplit};
pub use geometry::{AccessPoint, Point, Region, SliceSpec, User};
pub use rate::{wlan_phy_rate, RateTable};
