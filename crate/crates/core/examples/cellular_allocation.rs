//! Joint association, subcarrier and power allocation on a two-cell OFDMA
//! deployment, with and without a minimum-rate reservation for the slice
//! holding the cell-edge user.
//!
//! Usage: `cargo run --release --example cellular_allocation`

use sdwn_sim::cellular::{
    cellular_rates, max_snr_cellular, solve_joint_allocation, CellularAllocation, CellularInstance,
    CellularSolverOptions,
};
use sdwn_sim::model::{gain_tensor, AccessPoint, ChannelParams, Fading, Point, SliceSpec, User};

fn show(name: &str, a: &CellularAllocation, inst: &CellularInstance) -> Result<(), sdwn_sim::Error> {
    let rep = cellular_rates(a, inst)?;
    println!("{name}: total {:.3} bit/s/Hz, per slice {:.3?}", rep.total(), rep.per_slice_rate);
    for (b, (holders, power)) in a.subcarriers.iter().zip(&a.power).enumerate() {
        let cells: Vec<String> =
            holders.iter().zip(power).map(|(h, p)| h.map_or("-".to_string(), |u| format!("u{u}@{p:.2}"))).collect();
        println!("  BS {b}: {}", cells.join(" "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stations: Vec<AccessPoint> = [(0.0, 0.0), (500.0, 0.0)]
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| AccessPoint { id, position: Point::new(x, y), channel_id: 0, tx_power: 1.0 })
        .collect();
    let users: Vec<User> = [(60.0, 10.0, 0), (250.0, 0.0, 1), (440.0, -20.0, 0), (120.0, -60.0, 0)]
        .iter()
        .enumerate()
        .map(|(id, &(x, y, slice_id))| User { id, position: Point::new(x, y), slice_id })
        .collect();
    let channel = ChannelParams { noise_power: 1e-9, fading: Fading::Rayleigh { seed: 7 }, ..ChannelParams::default() };
    let mut inst = CellularInstance {
        gains: gain_tensor(&users, &stations, 4, &channel),
        budgets: vec![1.0, 1.0],
        noise_power: channel.noise_power,
        slices: SliceSpec::from_users(&[0.0, 0.0], &users),
    };
    let opts = CellularSolverOptions::default();

    show("max_snr", &max_snr_cellular(&inst), &inst)?;
    let open = solve_joint_allocation(&inst, &opts)?;
    show("sdwn", &open, &inst)?;

    inst.slices[1].reservation = cellular_rates(&open, &inst)?.per_slice_rate[1] + 2.0;
    println!("slice 1 now reserves {:.3} bit/s/Hz", inst.slices[1].reservation);
    match solve_joint_allocation(&inst, &opts) {
        Ok(a) => show("sdwn reserved", &a, &inst)?,
        Err(e) => println!("sdwn reserved: {e}"),
    }
    Ok(())
}
