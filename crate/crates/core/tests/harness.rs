use std::path::PathBuf;

use sdwn_sim::control::{GuaranteeKind, Isolation, Policy};
use sdwn_sim::harness::{
    read_csv, report, run_scenario, run_trial, sweep, to_csv_string, verify_oracle, Filter, GridAxis, Outcome,
    ReservationMode, RunOptions, ScenarioConfig, SliceConfig, SolverStatus, Stat, StationConfig, SweepParam,
    UserConfig, HEADER,
};
use sdwn_sim::Error;

fn shipped(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    ScenarioConfig::load(&path).unwrap()
}

fn serial() -> RunOptions {
    RunOptions { threads: Some(1), timing: false }
}

fn single_ap(users: &[(f64, f64, usize)], slices: &[(f64, Isolation)]) -> ScenarioConfig {
    let mut cfg = shipped("wlan-4ap.cfg");
    cfg.layout = vec![StationConfig { x: 50.0, y: 50.0, channel_id: None, tx_power: 1e-5 }];
    cfg.users = Some(users.iter().map(|&(x, y, slice_id)| UserConfig { x, y, slice_id }).collect());
    cfg.reservation_mode = ReservationMode::Absolute;
    cfg.slices = slices
        .iter()
        .enumerate()
        .map(|(slice_id, &(value, isolation_level))| SliceConfig {
            slice_id,
            guarantee_kind: GuaranteeKind::Airtime,
            guarantee_value: value,
            isolation_level,
        })
        .collect();
    cfg.replications = 1;
    cfg
}

#[test]
fn shipped_configs_round_trip() {
    for name in ["wlan-4ap.cfg", "cellular-4bs.cfg"] {
        let cfg = shipped(name);
        assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml()).unwrap(), cfg, "{name}");
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let text = format!("{}\nfavourite_colour = \"blue\"\n", shipped("wlan-4ap.cfg").to_toml());
    assert!(matches!(ScenarioConfig::from_toml(&text), Err(Error::Config(_))));
}

#[test]
fn validation_reports_every_problem() {
    let mut cfg = shipped("wlan-4ap.cfg");
    cfg.edge_gamma = 1.5;
    cfg.layout[0].tx_power = -1.0;
    let Err(Error::Config(msg)) = cfg.validate() else { panic!("invalid config accepted") };
    assert!(msg.contains("edge_gamma") && msg.contains("layout[0].tx_power"), "{msg}");
}

#[test]
fn sweep_grid_parsing() {
    let axis = GridAxis::parse("lambda_mean=1:10:1").unwrap();
    assert_eq!(axis.param, SweepParam::LambdaMean);
    assert_eq!(axis.values, (1..=10).map(f64::from).collect::<Vec<_>>());
    assert_eq!(GridAxis::parse("rho1=0.1:0.9:0.4").unwrap().values, vec![0.1, 0.5, 0.9]);
    for bad in ["lambda_mean=1:10", "alpha=0:1:0.5", "rho1=0.5:0.1:0.1", "rho1=0:1:0"] {
        assert!(matches!(GridAxis::parse(bad), Err(Error::Config(_))), "{bad}");
    }
}

#[test]
fn sweep_has_one_row_per_point_policy_and_trial() {
    let mut cfg = shipped("wlan-4ap.cfg");
    cfg.replications = 20;
    let axes = [GridAxis::parse("lambda_mean=1:10:1").unwrap(), GridAxis::new(SweepParam::Rho1, vec![0.5]).unwrap()];
    let rows = sweep(&cfg, &axes, RunOptions::default()).unwrap();
    assert_eq!(rows.len(), 10 * 2 * 20);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.lambda_mean, (i / 40 + 1) as f64);
        assert_eq!(r.policy, if i % 40 < 20 { Policy::MaxSnr } else { Policy::Sdwn });
        assert_eq!(r.trial, i % 20);
    }
}

#[test]
fn single_point_sweep_matches_direct_runs() {
    for name in ["wlan-4ap.cfg", "cellular-4bs.cfg"] {
        let mut cfg = shipped(name);
        cfg.replications = 4;
        let axis = GridAxis::new(SweepParam::LambdaMean, vec![cfg.deployment.lambda_mean]).unwrap();
        let rows = sweep(&cfg, &[axis], serial()).unwrap();
        for (k, policy) in [Policy::MaxSnr, Policy::Sdwn].into_iter().enumerate() {
            cfg.policy = policy;
            assert_eq!(run_scenario(&cfg, serial()).unwrap(), rows[4 * k..4 * (k + 1)], "{name} {policy:?}");
        }
    }
}

#[test]
fn zero_replications_yield_no_rows() {
    let mut cfg = shipped("cellular-4bs.cfg");
    cfg.replications = 0;
    let rows = run_scenario(&cfg, serial()).unwrap();
    assert!(rows.is_empty());
    assert_eq!(to_csv_string(&rows).trim_end(), HEADER.join(","));
}

#[test]
fn lone_user_gets_its_full_rate_under_max_snr() {
    let mut cfg = single_ap(&[(55.0, 50.0, 0)], &[(0.0, Isolation::BestEffort)]);
    cfg.policy = Policy::MaxSnr;
    let out = run_trial(&cfg, Policy::MaxSnr, 0, false).unwrap();
    let top = cfg.rate_table.rates_mbps.iter().copied().fold(0.0, f64::max);
    assert_eq!(out.record.solver_status, SolverStatus::Baseline);
    assert!((out.record.total_throughput - top).abs() < 1e-12, "{}", out.record.total_throughput);
    assert_eq!(out.record.jain_index, 1.0);
}

#[test]
fn unmeetable_strict_reservations_are_recorded_as_scaled() {
    // two users on one AP cannot share 0.9 of the airtime between them
    let cfg = single_ap(&[(45.0, 50.0, 0), (55.0, 50.0, 1)], &[(0.5, Isolation::Strict), (0.4, Isolation::Strict)]);
    let out = run_trial(&cfg, Policy::Sdwn, 0, false).unwrap();
    assert_eq!(out.record.solver_status, SolverStatus::ScaledInfeasible);
    assert!(out.record.scaling_factor > 0.0 && out.record.scaling_factor < 1.0);
    assert_eq!(out.record.total_throughput, 0.0);
}

#[test]
fn oracle_agrees_on_small_wlan_instance() {
    let cfg =
        single_ap(&[(45.0, 50.0, 0), (55.0, 50.0, 1)], &[(0.2, Isolation::BestEffort), (0.2, Isolation::BestEffort)]);
    let rep = verify_oracle(&cfg, None).unwrap();
    assert!(rep.passed, "{rep}");
    assert!(rep.gap <= 1e-2);
}

#[test]
fn oracle_agrees_on_small_cellular_instance() {
    let mut cfg = shipped("cellular-4bs.cfg");
    cfg.region.height = 500.0;
    cfg.layout.truncate(2);
    cfg.subcarriers = 3;
    cfg.deployment.edge_fraction = None;
    cfg.users = Some(vec![
        UserConfig { x: 200.0, y: 240.0, slice_id: 0 },
        UserConfig { x: 500.0, y: 260.0, slice_id: 1 },
        UserConfig { x: 800.0, y: 300.0, slice_id: 0 },
    ]);
    let rep = verify_oracle(&cfg, None).unwrap();
    assert!(rep.passed, "{rep}");
}

#[test]
fn oracle_agrees_on_the_scaling_of_infeasible_instances() {
    let cfg = single_ap(&[(45.0, 50.0, 0), (55.0, 50.0, 1)], &[(0.5, Isolation::Strict), (0.4, Isolation::Strict)]);
    let rep = verify_oracle(&cfg, None).unwrap();
    let (Outcome::Infeasible { scale: s }, Outcome::Infeasible { scale: o }) = (rep.solver, rep.oracle) else {
        panic!("{rep}");
    };
    assert!((s - o).abs() <= 0.02, "{rep}");
    assert!(rep.passed);
}

#[test]
fn oversized_oracle_input_is_refused() {
    let mut cfg = shipped("wlan-4ap.cfg");
    cfg.users = Some((0..8).map(|i| UserConfig { x: 10.0 + 10.0 * i as f64, y: 50.0, slice_id: i % 2 }).collect());
    assert!(matches!(verify_oracle(&cfg, None), Err(Error::OracleSize(_))));
}

#[test]
fn reports_summarize_each_policy() {
    let mut cfg = shipped("cellular-4bs.cfg");
    cfg.replications = 5;
    let axis = GridAxis::new(SweepParam::LambdaMean, vec![1.0]).unwrap();
    let rows = sweep(&cfg, &[axis], serial()).unwrap();
    let text = to_csv_string(&rows);
    let parsed = read_csv(text.as_bytes()).unwrap();
    assert_eq!(to_csv_string(&parsed), text);
    for (a, b) in parsed.iter().zip(&rows) {
        assert!((a.total_throughput - b.total_throughput).abs() <= 1e-8 * b.total_throughput.abs().max(1.0));
    }

    let median = report(&rows, Stat::Median, Filter::Edge).unwrap();
    let lines: Vec<&str> = median.lines().collect();
    assert_eq!(lines[0], "policy,median,trials");
    assert!(lines[1].starts_with("max_snr,") && lines[1].ends_with(",5"));
    assert!(lines[2].starts_with("sdwn,") && lines[2].ends_with(",5"));

    let cdf = report(&rows, Stat::Cdf, Filter::All).unwrap();
    assert_eq!(cdf.lines().count(), 1 + 10);
    assert!(cdf.lines().last().unwrap().ends_with(",1.00000000e0"));

    assert!(matches!(report(&[], Stat::Jain, Filter::All), Err(Error::EmptySample)));
}
