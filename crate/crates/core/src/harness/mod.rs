//! Scenario configuration, runs and their files, the long-time probes, and
//! the command-line interface.

mod cli;
mod config;
mod probes;
mod profiles;
mod run;

pub use cli::{cli, EXIT_CONFIG, EXIT_FAIL, EXIT_OK};
pub use config::{
    DissipativitySettings, FluidSpec, ForcingSpec, InitialSpec, PeriodicSettings, ProbeSettings, Scenario,
    Setup, ShiftSettings, StaticConfig, SteadySettings, SCHEMA_VERSION,
};
pub use probes::{
    dissipativity_verdict, periodic_verdict, probe_dissipativity, probe_periodic, probe_shift_compactness,
    probe_steady_convergence, recheck, run_probe, shift_verdict, steady_verdict, DissipativityThresholds,
    DissipativityVerdict, PeriodicVerdict, ProbeKind, ProbeReport, ShiftThresholds, ShiftVerdict,
    SteadyVerdict, PERIODIC_HEADER, REPORT_FILE, SERIES_FILE, SHIFT_HEADER, STATIC_PROFILE_FILE,
    STEADY_HEADER,
};
pub use profiles::{forcing_period, DensitySpec, PotentialSpec, VectorProfile};
pub use run::{
    read_snapshots, read_table, read_timeseries, run_scenario, run_setup, write_table, write_timeseries,
    Recorder, RunRecord, RunSummary, Sample, Schedule, Snapshot, Trajectory, SNAPSHOT_FILE, SUMMARY_FILE,
    TIMESERIES_FILE, TIMESERIES_HEADER,
};

pub const TOOL_VERSION: &str = concat!("barolab ", env!("CARGO_PKG_VERSION"));
