use std::io::{Read, Write};

use serde::Deserialize;

use crate::control::Policy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    ScaledInfeasible,
    Baseline,
}

impl SolverStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::ScaledInfeasible => "scaled_infeasible",
            SolverStatus::Baseline => "baseline",
        }
    }
}

/// One CSV row: a single trial of a single policy.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResultRecord {
    pub scenario_id: String,
    pub trial: usize,
    pub policy: Policy,
    pub lambda_mean: f64,
    pub rho1: f64,
    pub total_throughput: f64,
    pub sp1_throughput: f64,
    pub sp2_throughput: f64,
    pub jain_index: f64,
    pub edge_median_rate: f64,
    pub center_median_rate: f64,
    pub solver_status: SolverStatus,
    /// Factor applied to the reservations; 1 unless scaled.
    pub scaling_factor: f64,
    /// Seconds; 0 unless timing was requested.
    pub wall_time: f64,
}

pub const HEADER: [&str; 14] = [
    "scenario_id",
    "trial",
    "policy",
    "lambda_mean",
    "rho1",
    "total_throughput",
    "sp1_throughput",
    "sp2_throughput",
    "jain_index",
    "edge_median_rate",
    "center_median_rate",
    "solver_status",
    "scaling_factor",
    "wall_time",
];

/// Nine significant digits.
fn float(v: f64) -> String {
    format!("{v:.8e}")
}

impl ResultRecord {
    fn fields(&self) -> [String; 14] {
        [
            self.scenario_id.clone(),
            self.trial.to_string(),
            self.policy.name().to_string(),
            float(self.lambda_mean),
            float(self.rho1),
            float(self.total_throughput),
            float(self.sp1_throughput),
            float(self.sp2_throughput),
            float(self.jain_index),
            float(self.edge_median_rate),
            float(self.center_median_rate),
            self.solver_status.name().to_string(),
            float(self.scaling_factor),
            float(self.wall_time),
        ]
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::config(format!("csv: {e}"))
}

pub fn write_csv<W: Write>(out: W, records: &[ResultRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(io)?;
    for r in records {
        w.write_record(r.fields()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn to_csv_string(records: &[ResultRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(io)?.clone();
    if headers.iter().ne(HEADER) {
        return Err(Error::config("csv header does not match the result record layout"));
    }
    r.deserialize().map(|row| row.map_err(io)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rec = ResultRecord {
            scenario_id: "demo".into(),
            trial: 3,
            policy: Policy::Sdwn,
            lambda_mean: 2.0,
            rho1: 0.1,
            total_throughput: 123.456789012,
            sp1_throughput: 1.0 / 3.0,
            sp2_throughput: 0.0,
            jain_index: 0.5,
            edge_median_rate: 0.0,
            center_median_rate: 0.0,
            solver_status: SolverStatus::ScaledInfeasible,
            scaling_factor: 0.625,
            wall_time: 0.0,
        };
        let text = to_csv_string(std::slice::from_ref(&rec));
        assert!(text.starts_with("scenario_id,trial,policy,lambda_mean"));
        assert!(text.contains("1.23456789e2"));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0].sp1_throughput, 3.33333333e-1);
        assert_eq!(back[0].solver_status, SolverStatus::ScaledInfeasible);
        assert_eq!(to_csv_string(&back), text);
    }
}
