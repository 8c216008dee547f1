//! Seeded experiment driver: configuration, trials, sweeps, oracle
//! verification and CSV output.

mod config;
mod oracle;
mod record;
mod report;
mod run;

pub use config::{
    ChannelConfig, DeploymentConfig, FadingKind, ReservationMode, ScenarioConfig, SliceConfig, SolverConfig,
    StationConfig, UserConfig,
};
pub use oracle::{verify_oracle, Outcome, VerificationReport};
pub use record::{read_csv, to_csv_string, write_csv, ResultRecord, SolverStatus, HEADER};
pub use report::{report, Filter, Stat};
pub use run::{
    grid_points, run_scenario, run_scenario_detailed, run_trial, sweep, sweep_detailed, trial_seed, GridAxis,
    RunOptions, SweepParam, TrialOutcome,
};
