//! Three scheduling rounds through the control plane: SLAs are translated
//! per RAN, the pooled scheduler allocates both RANs from their reports and
//! each local manager applies its schedule.
//!
//! Usage: `cargo run --release --example control_plane`

use sdwn_sim::control::{
    crm_schedule, lrm_apply, lrm_report, vrm_translate_all, CrmOptions, GuaranteeKind, Isolation, Lrm, RanKind,
    RanState, SlaSpec,
};
use sdwn_sim::model::{AccessPoint, ChannelParams, Point, RateTable, User};

fn stations(points: &[(f64, f64)], shared_channel: bool, tx_power: f64) -> Vec<AccessPoint> {
    points
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| AccessPoint {
            id,
            position: Point::new(x, y),
            channel_id: if shared_channel { 0 } else { id },
            tx_power,
        })
        .collect()
}

fn user(id: usize, x: f64, y: f64, slice_id: usize) -> User {
    User { id, position: Point::new(x, y), slice_id }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rans = [
        Lrm::new(
            0,
            RanState::Wlan {
                users: vec![user(0, 20.0, 30.0, 0), user(1, 70.0, 20.0, 1), user(2, 60.0, 80.0, 0)],
                aps: stations(&[(25.0, 25.0), (75.0, 25.0), (25.0, 75.0), (75.0, 75.0)], false, 1e-5),
                channel: ChannelParams::default(),
                rate_table: RateTable::default(),
            },
        ),
        Lrm::new(
            1,
            RanState::Cellular {
                users: vec![user(0, 300.0, 200.0, 0), user(1, 500.0, 250.0, 1), user(2, 700.0, 300.0, 1)],
                stations: stations(&[(250.0, 250.0), (750.0, 250.0)], true, 1.0),
                channel: ChannelParams { noise_power: 1e-9, ..ChannelParams::default() },
                subcarriers: 3,
            },
        ),
    ];
    let sla = |slice_id, guarantee_kind, guarantee_value, isolation_level| SlaSpec {
        slice_id,
        guarantee_kind,
        guarantee_value,
        isolation_level,
    };
    let constraints = vec![
        vrm_translate_all(
            &[
                sla(0, GuaranteeKind::Airtime, 0.3, Isolation::Strict),
                sla(1, GuaranteeKind::Airtime, 0.2, Isolation::BestEffort),
            ],
            0,
            RanKind::Wlan,
        )?,
        vrm_translate_all(&[sla(1, GuaranteeKind::MinRate, 1.0, Isolation::BestEffort)], 1, RanKind::Cellular)?,
    ];

    for round in 0..3 {
        let reports: Vec<_> = rans.iter().map(lrm_report).collect();
        let schedules = crm_schedule(&constraints, &reports, &CrmOptions::default())?;
        for (lrm, schedule) in rans.iter_mut().zip(&schedules) {
            let config = lrm_apply(lrm, schedule)?;
            println!("round {round}: RAN {} epoch {} status {:?}", config.ran_id, config.epoch, schedule.status);
            println!("  {config:?}");
        }
        // a newcomer joins the WLAN between rounds
        let n = lrm_report(&rans[0]).users();
        rans[0].add_user(user(n, 50.0 + 5.0 * round as f64, 50.0, 1));
    }

    let stale = crm_schedule(&constraints, &rans.iter().map(lrm_report).collect::<Vec<_>>(), &CrmOptions::default())?;
    lrm_apply(&mut rans[0], &stale[0])?;
    match lrm_apply(&mut rans[0], &stale[0]) {
        Err(e) => println!("replayed schedule refused: {e}"),
        Ok(_) => println!("replayed schedule accepted"),
    }
    Ok(())
}
