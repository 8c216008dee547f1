//! Inter-provider fairness as the load split between the two providers
//! varies, for both policies on the shipped WLAN scenario.
//!
//! Usage: `cargo run --release --example fairness_sweep [-- CONFIG]`

use sdwn_sim::control::Policy;
use sdwn_sim::harness::{sweep, GridAxis, RunOptions, ScenarioConfig, SweepParam};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path =
        std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/wlan-4ap.cfg").into());
    let mut cfg = ScenarioConfig::load(path.as_ref())?;
    cfg.replications = cfg.replications.min(20);
    let rho = GridAxis::new(SweepParam::Rho1, vec![0.1, 0.3, 0.5, 0.7, 0.9])?;
    let rows = sweep(&cfg, std::slice::from_ref(&rho), RunOptions::default())?;

    println!("{:>5} {:>14} {:>14}", "rho1", "max_snr Jain", "sdwn Jain");
    for &r in &rho.values {
        let mean = |policy| {
            let sel: Vec<f64> =
                rows.iter().filter(|x| x.rho1 == r && x.policy == policy).map(|x| x.jain_index).collect();
            sel.iter().sum::<f64>() / sel.len().max(1) as f64
        };
        println!("{r:>5.1} {:>14.4} {:>14.4}", mean(Policy::MaxSnr), mean(Policy::Sdwn));
    }
    Ok(())
}
