use proptest::prelude::*;
use sdwn_sim::cellular::{
    brute_force_cellular_oracle, cellular_oracle_scaling, cellular_rates, max_snr_cellular, solve_joint_allocation,
    CellularAllocation, CellularInstance, CellularSolverOptions,
};
use sdwn_sim::model::{gain_tensor, AccessPoint, ChannelParams, Fading, Point, SliceSpec, User};

fn stations(points: &[(f64, f64)]) -> Vec<AccessPoint> {
    points
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| AccessPoint { id, position: Point::new(x, y), channel_id: 0, tx_power: 1.0 })
        .collect()
}

fn instance(bs: &[(f64, f64)], users: &[(f64, f64, usize)], subcarriers: usize, fading: Fading) -> CellularInstance {
    let stations = stations(bs);
    let users: Vec<User> = users
        .iter()
        .enumerate()
        .map(|(id, &(x, y, slice_id))| User { id, position: Point::new(x, y), slice_id })
        .collect();
    let channel = ChannelParams { noise_power: 1e-9, fading, ..ChannelParams::default() };
    CellularInstance {
        gains: gain_tensor(&users, &stations, subcarriers, &channel),
        budgets: stations.iter().map(|s| s.tx_power).collect(),
        noise_power: channel.noise_power,
        slices: SliceSpec::from_users(&[0.0, 0.0], &users),
    }
}

fn total(a: &CellularAllocation, inst: &CellularInstance) -> f64 {
    cellular_rates(a, inst).unwrap().total()
}

#[test]
fn midpoint_instance_is_within_five_percent_of_the_oracle() {
    let inst = instance(
        &[(0.0, 0.0), (500.0, 0.0)],
        &[(80.0, 20.0, 0), (250.0, 0.0, 1), (430.0, -40.0, 0)],
        4,
        Fading::Rayleigh { seed: 11 },
    );
    let opts = CellularSolverOptions::default();
    let oracle = brute_force_cellular_oracle(&inst, &opts).unwrap();
    let solver = solve_joint_allocation(&inst, &opts).unwrap();
    solver.validate(&inst).unwrap();
    oracle.allocation.validate(&inst).unwrap();
    let s = total(&solver, &inst);
    assert!(s >= 0.95 * oracle.objective, "solver {s}, oracle {}", oracle.objective);
}

#[test]
fn reservation_for_the_midpoint_user_is_met() {
    let mut inst =
        instance(&[(0.0, 0.0), (500.0, 0.0)], &[(60.0, 0.0, 0), (250.0, 0.0, 1), (440.0, 0.0, 0)], 4, Fading::Off);
    let opts = CellularSolverOptions::default();
    let open = solve_joint_allocation(&inst, &opts).unwrap();
    let before = cellular_rates(&open, &inst).unwrap().per_slice_rate[1];
    inst.slices[1].reservation = before + 1.0;
    assert!(cellular_oracle_scaling(&inst, &opts).unwrap() >= 1.0);
    let a = solve_joint_allocation(&inst, &opts).unwrap();
    let rep = cellular_rates(&a, &inst).unwrap();
    assert!(rep.per_slice_rate[1] >= inst.slices[1].reservation - opts.reservation_tolerance, "{rep:?}");
    assert!(rep.total() <= cellular_rates(&open, &inst).unwrap().total() + 1e-9);
}

fn arb_instance() -> impl Strategy<Value = CellularInstance> {
    (1usize..=2, prop::collection::vec((0.0f64..1000.0, 0.0f64..500.0, 0usize..2), 1..=4), 1usize..=4, any::<u64>())
        .prop_map(|(b, users, n, seed)| {
            instance(&[(250.0, 250.0), (750.0, 250.0)][..b], &users, n, Fading::Rayleigh { seed })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_is_never_far_below_the_oracle(inst in arb_instance()) {
        let opts = CellularSolverOptions::default();
        let oracle = brute_force_cellular_oracle(&inst, &opts).unwrap();
        let a = solve_joint_allocation(&inst, &opts).unwrap();
        a.validate(&inst).unwrap();
        prop_assert!(total(&a, &inst) >= 0.95 * oracle.objective);
    }

    #[test]
    fn solver_contains_the_baseline(inst in arb_instance()) {
        let opts = CellularSolverOptions::default();
        let base = max_snr_cellular(&inst);
        base.validate(&inst).unwrap();
        let a = solve_joint_allocation(&inst, &opts).unwrap();
        prop_assert!(total(&a, &inst) >= total(&base, &inst) - 1e-9);
    }

    #[test]
    fn serving_stations_spend_their_budget(inst in arb_instance()) {
        let a = solve_joint_allocation(&inst, &CellularSolverOptions::default()).unwrap();
        for (b, used) in a.used_power().iter().enumerate() {
            if a.subcarriers[b].iter().any(Option::is_some) {
                prop_assert!((used - inst.budgets[b]).abs() <= 1e-9 * inst.budgets[b], "{b}: {used}");
            }
        }
    }

    #[test]
    fn solver_is_deterministic(inst in arb_instance()) {
        let opts = CellularSolverOptions::default();
        prop_assert_eq!(solve_joint_allocation(&inst, &opts).unwrap(), solve_joint_allocation(&inst, &opts).unwrap());
    }
}
