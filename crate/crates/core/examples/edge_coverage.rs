//! Cell-edge versus cell-centre per-user rates under both policies on the
//! shipped four-BS OFDMA scenario.
//!
//! Usage: `cargo run --release --example edge_coverage [-- CONFIG]`

use sdwn_sim::control::Policy;
use sdwn_sim::harness::{run_scenario_detailed, RunOptions, ScenarioConfig};
use sdwn_sim::metrics::empirical_cdf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/cellular-4bs.cfg").into());
    let cfg = ScenarioConfig::load(path.as_ref())?;
    println!("{} trials, lambda_mean {}", cfg.replications, cfg.deployment.lambda_mean);
    for policy in [Policy::MaxSnr, Policy::Sdwn] {
        let trials = run_scenario_detailed(&cfg, policy, RunOptions::default())?;
        let (mut edge, mut center) = (Vec::new(), Vec::new());
        let mut total = 0.0;
        for t in &trials {
            total += t.record.total_throughput;
            for (u, &rate) in t.per_user_rate.iter().enumerate() {
                if t.edge_flags[u] {
                    edge.push(rate)
                } else {
                    center.push(rate)
                }
            }
        }
        let median = |v: &[f64]| empirical_cdf(v).map(|c| c.median()).unwrap_or(0.0);
        let starved = edge.iter().filter(|&&r| r == 0.0).count();
        println!(
            "{:>8}: edge median {:.3} bit/s/Hz ({} users, {} without service), centre median {:.3} ({} users), mean total {:.3}",
            policy.name(),
            median(&edge),
            edge.len(),
            starved,
            median(&center),
            center.len(),
            total / trials.len().max(1) as f64
        );
    }
    Ok(())
}
