//! Network-wide airtime allocation for two service providers sharing four
//! APs, compared with Max-SNR association.
//!
//! Usage: `cargo run --release --example wlan_airtime`

use sdwn_sim::model::{AccessPoint, ChannelParams, Point, RateTable, SliceSpec, User};
use sdwn_sim::wlan::{
    max_snr_wlan, optimize_tau, rate_matrix, snr_matrix, wlan_throughput, WlanInstance, WlanSolverOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let aps: Vec<AccessPoint> = [(25.0, 25.0), (75.0, 25.0), (25.0, 75.0), (75.0, 75.0)]
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| AccessPoint { id, position: Point::new(x, y), channel_id: id, tx_power: 1e-5 })
        .collect();
    // five users crowd the first AP; provider 1 owns only two of them
    let users: Vec<User> = [(20.0, 20.0, 0), (30.0, 25.0, 0), (25.0, 30.0, 0), (28.0, 18.0, 1), (70.0, 70.0, 1)]
        .iter()
        .enumerate()
        .map(|(id, &(x, y, slice_id))| User { id, position: Point::new(x, y), slice_id })
        .collect();
    let channel = ChannelParams { pathloss_exponent: 3.5, noise_power: 1e-13, ..ChannelParams::default() };
    let snr = snr_matrix(&users, &aps, &channel);
    let rates = rate_matrix(&snr, &RateTable::default());
    let slices = SliceSpec::from_users(&[0.4, 0.4], &users);
    let inst = WlanInstance::new(rates.clone(), slices.clone());

    let baseline = max_snr_wlan(&snr, &rates);
    let tau = optimize_tau(&inst, &WlanSolverOptions::default(), std::slice::from_ref(&baseline))?;
    for (name, t) in [("max_snr", &baseline), ("sdwn", &tau)] {
        let rep = wlan_throughput(t, &rates, &slices)?;
        println!("{name}: total {:.2} Mbit/s", rep.total());
        for (k, (thr, air)) in rep.per_sp.iter().zip(&rep.per_sp_airtime).enumerate() {
            println!("  provider {k}: {thr:.2} Mbit/s, airtime {air:.3}");
        }
    }
    println!("attempt probabilities (user x AP):");
    for i in 0..tau.users() {
        let row: Vec<String> = tau.row(i).iter().map(|v| format!("{v:.3}")).collect();
        println!("  user {i}: [{}]", row.join(", "));
    }
    Ok(())
}
