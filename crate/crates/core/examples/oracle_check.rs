//! Solver against brute-force search on tiny instances of both scenarios,
//! including one whose strict reservations cannot be met.
//!
//! Usage: `cargo run --release --example oracle_check`

use sdwn_sim::control::{GuaranteeKind, Isolation};
use sdwn_sim::harness::{verify_oracle, ReservationMode, ScenarioConfig, SliceConfig, UserConfig};

fn shipped(name: &str) -> Result<ScenarioConfig, sdwn_sim::Error> {
    ScenarioConfig::load(format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR")).as_ref())
}

fn user(x: f64, y: f64, slice_id: usize) -> UserConfig {
    UserConfig { x, y, slice_id }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut wlan = shipped("wlan-4ap.cfg")?;
    wlan.layout.truncate(1);
    wlan.users = Some(vec![user(20.0, 20.0, 0), user(40.0, 35.0, 1)]);
    wlan.reservation_mode = ReservationMode::Absolute;
    for s in &mut wlan.slices {
        s.guarantee_value = 0.2;
    }

    let mut strict = wlan.clone();
    for (s, value) in strict.slices.iter_mut().zip([0.5, 0.4]) {
        *s = SliceConfig { guarantee_value: value, isolation_level: Isolation::Strict, ..s.clone() };
    }

    let mut cellular = shipped("cellular-4bs.cfg")?;
    cellular.layout.truncate(2);
    cellular.subcarriers = 3;
    cellular.deployment.edge_fraction = None;
    cellular.users = Some(vec![user(200.0, 240.0, 0), user(500.0, 260.0, 1), user(800.0, 300.0, 0)]);
    cellular.slices[1].guarantee_kind = GuaranteeKind::MinRate;
    cellular.slices[1].guarantee_value = 1.5;

    for (name, cfg) in [("wlan", wlan), ("wlan strict", strict), ("cellular", cellular)] {
        println!("== {name}");
        println!("{}", verify_oracle(&cfg, None)?);
    }
    Ok(())
}
