//! Maps optimized attempt probabilities to integer minimum contention
//! windows and shows the probability each window actually realizes.
//!
//! Usage: `cargo run --release --example cw_mapping`

use sdwn_sim::model::SliceSpec;
use sdwn_sim::wlan::{optimize_tau, tau_to_cwmin, wlan_throughput, CwTable, WlanInstance, WlanSolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // one AP shared by four users; both providers reserve airtime there
    let rates = vec![vec![54.0], vec![36.0], vec![6.0], vec![24.0]];
    let slices = vec![SliceSpec::new(0, 0.2, vec![0, 1]), SliceSpec::new(1, 0.3, vec![2, 3])];
    let inst = WlanInstance::new(rates.clone(), slices.clone());
    let tau = optimize_tau(&inst, &WlanSolverOptions::default(), &[])?;
    let cw = tau_to_cwmin(&tau);

    let mut realized = tau.clone();
    println!("user ap      tau  CWmin  realized");
    for i in 0..tau.users() {
        for a in 0..tau.aps() {
            let (window, r) = match cw.get(i, a) {
                Some(w) => (w.to_string(), CwTable::realized_tau(w)),
                None => ("off".to_string(), 0.0),
            };
            realized.set(i, a, r);
            println!("{i:>4} {a:>2} {:>8.4} {window:>6} {r:>9.4}", tau.get(i, a));
        }
    }
    let ideal = wlan_throughput(&tau, &rates, &slices)?;
    let actual = wlan_throughput(&realized, &rates, &slices)?;
    println!("throughput: optimized {:.3} Mbit/s, with integer windows {:.3}", ideal.total(), actual.total());
    println!("provider airtime with integer windows: {:?}", actual.per_sp_airtime);
    Ok(())
}
