use std::fmt::Write;

use super::record::ResultRecord;
use crate::control::Policy;
use crate::error::{Error, Result};
use crate::metrics::empirical_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stat {
    Cdf,
    Median,
    Jain,
}

/// Which per-trial column a statistic reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    /// `edge_median_rate`.
    Edge,
    /// `center_median_rate`.
    Center,
    /// `total_throughput`.
    All,
}

impl std::str::FromStr for Stat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cdf" => Ok(Stat::Cdf),
            "median" => Ok(Stat::Median),
            "jain" => Ok(Stat::Jain),
            _ => Err(Error::config(format!("unknown statistic {s:?}"))),
        }
    }
}

impl std::str::FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(Filter::Edge),
            "center" => Ok(Filter::Center),
            "all" => Ok(Filter::All),
            _ => Err(Error::config(format!("unknown filter {s:?}"))),
        }
    }
}

fn column(r: &ResultRecord, filter: Filter) -> f64 {
    match filter {
        Filter::Edge => r.edge_median_rate,
        Filter::Center => r.center_median_rate,
        Filter::All => r.total_throughput,
    }
}

/// Summarizes records per policy as CSV text. `jain` averages the Jain
/// index and ignores the filter.
pub fn report(records: &[ResultRecord], stat: Stat, filter: Filter) -> Result<String> {
    let mut out = String::new();
    out.push_str(match stat {
        Stat::Cdf => "policy,value,probability\n",
        Stat::Median => "policy,median,trials\n",
        Stat::Jain => "policy,mean_jain,trials\n",
    });
    for policy in [Policy::MaxSnr, Policy::Sdwn] {
        let rows: Vec<&ResultRecord> = records.iter().filter(|r| r.policy == policy).collect();
        if rows.is_empty() {
            continue;
        }
        let name = policy.name();
        match stat {
            Stat::Cdf => {
                let cdf = empirical_cdf(&rows.iter().map(|r| column(r, filter)).collect::<Vec<_>>())?;
                for (v, p) in cdf.values.iter().zip(&cdf.probabilities) {
                    writeln!(out, "{name},{v:.8e},{p:.8e}").unwrap();
                }
            }
            Stat::Median => {
                let cdf = empirical_cdf(&rows.iter().map(|r| column(r, filter)).collect::<Vec<_>>())?;
                writeln!(out, "{name},{:.8e},{}", cdf.median(), rows.len()).unwrap();
            }
            Stat::Jain => {
                let mean = rows.iter().map(|r| r.jain_index).sum::<f64>() / rows.len() as f64;
                writeln!(out, "{name},{mean:.8e},{}", rows.len()).unwrap();
            }
        }
    }
    if out.lines().count() == 1 {
        return Err(Error::EmptySample);
    }
    Ok(out)
}
