use sdwn_sim::control::{
    crm_schedule, lrm_apply, lrm_report, vrm_translate_all, Allocation, CrmOptions, GuaranteeKind, Isolation, Lrm,
    PhysicalConfig, Policy, RanKind, RanState, ScheduleStatus, SlaSpec,
};
use sdwn_sim::model::{AccessPoint, ChannelParams, Point, RateTable, SliceSpec, User};
use sdwn_sim::wlan::wlan_throughput;
use sdwn_sim::Error;

fn wlan_ran(users: &[(f64, f64, usize)]) -> Lrm {
    let aps = [(25.0, 25.0), (75.0, 25.0), (25.0, 75.0), (75.0, 75.0)]
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| AccessPoint { id, position: Point::new(x, y), channel_id: id, tx_power: 1e-5 })
        .collect();
    Lrm::new(
        0,
        RanState::Wlan {
            users: place(users),
            aps,
            channel: ChannelParams::default(),
            rate_table: RateTable::default(),
        },
    )
}

fn cellular_ran(users: &[(f64, f64, usize)]) -> Lrm {
    let stations = [(250.0, 250.0), (750.0, 250.0)]
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| AccessPoint { id, position: Point::new(x, y), channel_id: 0, tx_power: 1.0 })
        .collect();
    Lrm::new(
        1,
        RanState::Cellular {
            users: place(users),
            stations,
            channel: ChannelParams { noise_power: 1e-9, ..ChannelParams::default() },
            subcarriers: 3,
        },
    )
}

fn place(users: &[(f64, f64, usize)]) -> Vec<User> {
    users.iter().enumerate().map(|(id, &(x, y, slice_id))| User { id, position: Point::new(x, y), slice_id }).collect()
}

fn sla(slice_id: usize, kind: GuaranteeKind, value: f64, isolation: Isolation) -> SlaSpec {
    SlaSpec { slice_id, guarantee_kind: kind, guarantee_value: value, isolation_level: isolation }
}

/// One scheduling round over both RANs.
fn round(rans: &mut [Lrm], opts: &CrmOptions) -> Result<Vec<PhysicalConfig>, Error> {
    let constraints = vec![
        vrm_translate_all(
            &[
                sla(0, GuaranteeKind::Airtime, 0.2, Isolation::Strict),
                sla(1, GuaranteeKind::Airtime, 0.1, Isolation::BestEffort),
            ],
            0,
            RanKind::Wlan,
        )?,
        vrm_translate_all(&[sla(1, GuaranteeKind::MinRate, 1.0, Isolation::BestEffort)], 1, RanKind::Cellular)?,
    ];
    let reports: Vec<_> = rans.iter().map(lrm_report).collect();
    let schedules = crm_schedule(&constraints, &reports, opts)?;
    rans.iter_mut().zip(&schedules).map(|(lrm, s)| lrm_apply(lrm, s)).collect()
}

fn network() -> Vec<Lrm> {
    vec![
        wlan_ran(&[(20.0, 30.0, 0), (70.0, 20.0, 1), (60.0, 80.0, 0), (30.0, 70.0, 1)]),
        cellular_ran(&[(300.0, 200.0, 0), (500.0, 250.0, 1), (700.0, 300.0, 1)]),
    ]
}

#[test]
fn pipeline_is_deterministic() {
    let opts = CrmOptions::default();
    let a = round(&mut network(), &opts).unwrap();
    let b = round(&mut network(), &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|c| c.ran_id).collect::<Vec<_>>(), vec![0, 1]);
}

#[test]
fn epochs_increase_across_rounds() {
    let opts = CrmOptions::default();
    let mut rans = network();
    for expected in 1..=3u64 {
        let configs = round(&mut rans, &opts).unwrap();
        assert!(configs.iter().all(|c| c.epoch == expected));
        rans[0].add_user(User { id: 3 + expected as usize, position: Point::new(50.0, 50.0), slice_id: 1 });
    }
    for lrm in &rans {
        assert_eq!(lrm.applied_epochs(), &[1, 2, 3]);
    }
    assert_eq!(lrm_report(&rans[0]).users(), 7);
}

#[test]
fn schedules_reach_only_their_own_kind() {
    let mut rans = network();
    let constraints = vrm_translate_all(&[], 1, RanKind::Cellular).unwrap();
    let schedules = crm_schedule(&[constraints], &[lrm_report(&rans[1])], &CrmOptions::default()).unwrap();
    let mut misrouted = schedules[0].clone();
    misrouted.ran_id = 0;
    assert!(matches!(lrm_apply(&mut rans[0], &misrouted), Err(Error::KindMismatch { ran_id: 0, .. })));
    assert!(rans[0].applied_epochs().is_empty());
    lrm_apply(&mut rans[1], &schedules[0]).unwrap();
    assert!(matches!(
        lrm_apply(&mut rans[1], &schedules[0]),
        Err(Error::StaleEpoch { ran_id: 1, epoch: 1, applied: 1 })
    ));
}

#[test]
fn baseline_policy_is_flagged() {
    let rans = network();
    let opts = CrmOptions { policy: Policy::MaxSnr, ..CrmOptions::default() };
    let reports: Vec<_> = rans.iter().map(lrm_report).collect();
    let schedules = crm_schedule(&[], &reports, &opts).unwrap();
    assert!(schedules.iter().all(|s| s.status == ScheduleStatus::Baseline));
}

#[test]
fn strict_slice_keeps_its_airtime_as_the_other_slice_grows() {
    let tenants = [(20.0, 20.0, 0), (80.0, 30.0, 0)];
    let crowd = [
        (30.0, 30.0),
        (70.0, 20.0),
        (25.0, 80.0),
        (60.0, 70.0),
        (50.0, 50.0),
        (10.0, 90.0),
        (90.0, 90.0),
        (40.0, 10.0),
    ];
    let slas = [sla(0, GuaranteeKind::Airtime, 0.3, Isolation::Strict)];
    for n in 1..=crowd.len() {
        let users: Vec<_> = tenants.iter().copied().chain(crowd[..n].iter().map(|&(x, y)| (x, y, 1))).collect();
        let lrm = wlan_ran(&users);
        let report = lrm_report(&lrm);
        let constraints = vrm_translate_all(&slas, 0, RanKind::Wlan).unwrap();
        let schedule =
            crm_schedule(&[constraints], std::slice::from_ref(&report), &CrmOptions::default()).unwrap().remove(0);
        assert_eq!(schedule.status, ScheduleStatus::Optimal);
        let (Allocation::Wlan(tau), sdwn_sim::control::Snapshot::Wlan { rates, .. }) =
            (&schedule.allocation, &report.snapshot)
        else {
            panic!("WLAN RAN scheduled with a cellular allocation");
        };
        let slices = SliceSpec::from_users(&[0.3, 0.0], lrm.state.users());
        let airtime = wlan_throughput(tau, rates, &slices).unwrap().per_sp_airtime[0];
        assert!(airtime >= 0.3 - 1e-4, "slice-2 population {n}: airtime {airtime}");
    }
}

#[test]
fn strict_overbooking_is_rejected_at_admission() {
    let slas = [
        sla(0, GuaranteeKind::Airtime, 0.6, Isolation::Strict),
        sla(1, GuaranteeKind::Airtime, 0.6, Isolation::Strict),
    ];
    match vrm_translate_all(&slas, 0, RanKind::Wlan) {
        Err(Error::Infeasible { scale }) => assert!((scale - 1.0 / 1.2).abs() < 1e-12, "{scale}"),
        other => panic!("{other:?}"),
    }
}
