//! Running scenarios and persisting what they produce.
//!
//! Time series are CSV with the header [`TIMESERIES_HEADER`]; floating point
//! values are written in Rust's shortest round-trip exponent form, so reading
//! a file back yields the exact values that were written. Snapshots are JSON
//! lines `{"t", "rho", "mom", "grid"}` holding interior values in storage
//! order, `mom` component-major.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::energy_record;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::solver::{next_multiple, simulate, Observer, StepStats, Stepper};
use crate::state::{total_mass, State};

use super::config::{Scenario, Setup};

pub const TIMESERIES_HEADER: [&str; 8] =
    ["t", "kinetic", "potential", "E", "dissipation", "power", "mass", "clamps"];

/// One row of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub kinetic: f64,
    pub potential: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub dissipation: f64,
    pub power: f64,
    pub mass: f64,
    pub clamps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub rho: Vec<f64>,
    pub mom: Vec<Vec<f64>>,
    pub grid: GridSpec,
}

impl Snapshot {
    pub fn of(state: &State) -> Self {
        Snapshot {
            t: state.time,
            rho: state.rho.interior_values(),
            mom: state.mom.interior_components(),
            grid: state.grid().spec(),
        }
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub(crate) fn create_file(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes any table of floats with the given header.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a table written by [`write_table`], checking the header.
pub fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Config(format!("{}: header {found:?}, expected {header:?}", path.display())));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{}: `{c}` is not a number", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_timeseries(path: &Path, samples: &[Sample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    w.write_record(TIMESERIES_HEADER)?;
    for s in samples {
        w.write_record([
            fmt_f64(s.t),
            fmt_f64(s.kinetic),
            fmt_f64(s.potential),
            fmt_f64(s.energy),
            fmt_f64(s.dissipation),
            fmt_f64(s.power),
            fmt_f64(s.mass),
            s.clamps.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_timeseries(path: &Path) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(TIMESERIES_HEADER) {
        let missing: Vec<&str> =
            TIMESERIES_HEADER.iter().copied().filter(|c| !header.iter().any(|h| h == *c)).collect();
        let extra: Vec<&str> = header.iter().filter(|h| !TIMESERIES_HEADER.contains(h)).collect();
        return Err(Error::Config(format!(
            "{}: unexpected time series header (missing: [{}], unexpected: [{}], expected {})",
            path.display(),
            missing.join(", "),
            extra.join(", "),
            TIMESERIES_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn read_snapshots(path: &Path) -> Result<Vec<Snapshot>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

fn sample(state: &State, setup: &Setup, clamps: u64) -> Sample {
    let rec = energy_record(
        state,
        &setup.params.law,
        &setup.params.viscosity,
        &setup.forcing,
        setup.scheme.vacuum_floor,
    );
    Sample {
        t: state.time,
        kinetic: rec.kinetic,
        potential: rec.potential,
        energy: rec.total,
        dissipation: rec.dissipation,
        power: rec.power,
        mass: total_mass(state),
        clamps,
    }
}

/// What a run should record besides the regular samples.
#[derive(Debug, Clone, Default)]
pub struct Schedule {
    pub sample_every: f64,
    pub snapshot_every: Option<f64>,
    /// Extra times at which the full state is kept in memory.
    pub captures: Vec<f64>,
}

/// Observer that samples the energy budget on a fixed cadence, streams
/// snapshots, keeps requested states, and hands every sampled state to a
/// caller hook.
pub struct Recorder<'a, H> {
    setup: &'a Setup,
    sample_every: f64,
    snapshot_every: Option<f64>,
    captures: Vec<f64>,
    next_sample: f64,
    next_snapshot: f64,
    next_capture: usize,
    pub samples: Vec<Sample>,
    pub captured: Vec<State>,
    snapshots: Option<BufWriter<File>>,
    snapshot_path: Option<PathBuf>,
    hook: H,
}

fn due(target: f64, t: f64) -> bool {
    (target - t).abs() <= 8.0 * f64::EPSILON * t.abs().max(1.0)
}

impl<'a, H: FnMut(&State) -> Result<()>> Recorder<'a, H> {
    pub fn new(
        setup: &'a Setup,
        schedule: Schedule,
        snapshot_path: Option<PathBuf>,
        hook: H,
    ) -> Result<Self> {
        let mut captures = schedule.captures;
        captures.sort_by(f64::total_cmp);
        captures.dedup();
        let t0 = setup.initial.time;
        let snapshots = match (&snapshot_path, schedule.snapshot_every) {
            (Some(p), Some(_)) => Some(create_file(p)?),
            _ => None,
        };
        Ok(Recorder {
            setup,
            sample_every: schedule.sample_every,
            snapshot_every: schedule.snapshot_every,
            next_capture: captures.partition_point(|c| *c < t0),
            captures,
            next_sample: t0,
            next_snapshot: if schedule.snapshot_every.is_some() { t0 } else { f64::INFINITY },
            samples: Vec::new(),
            captured: Vec::new(),
            snapshots,
            snapshot_path,
            hook,
        })
    }

    fn record(&mut self, state: &State, clamps: u64) -> Result<()> {
        let t = state.time;
        if due(self.next_sample, t) {
            self.samples.push(sample(state, self.setup, clamps));
            (self.hook)(state)?;
            self.next_sample = next_multiple(self.setup.initial.time, self.sample_every, t);
        }
        if due(self.next_snapshot, t) {
            if let (Some(w), Some(every)) = (self.snapshots.as_mut(), self.snapshot_every) {
                serde_json::to_writer(&mut *w, &Snapshot::of(state))?;
                let path = self.snapshot_path.as_deref().unwrap_or(Path::new("snapshots"));
                w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
                self.next_snapshot = next_multiple(self.setup.initial.time, every, t);
            }
        }
        while self.next_capture < self.captures.len() && due(self.captures[self.next_capture], t) {
            self.captured.push(state.clone());
            self.next_capture += 1;
        }
        Ok(())
    }

    /// Samples the final state if the cadence did not land on it, and
    /// flushes the snapshot stream.
    pub fn finish(&mut self, state: &State, stats: &StepStats) -> Result<()> {
        if self.samples.last().is_none_or(|s| s.t < state.time) {
            self.samples.push(sample(state, self.setup, stats.clamps));
            (self.hook)(state)?;
        }
        if let Some(w) = self.snapshots.as_mut() {
            let path = self.snapshot_path.as_deref().unwrap_or(Path::new("snapshots"));
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

impl<H: FnMut(&State) -> Result<()>> Observer for Recorder<'_, H> {
    fn next_deadline(&self, _t: f64) -> Option<f64> {
        let capture = self.captures.get(self.next_capture).copied().unwrap_or(f64::INFINITY);
        Some(self.next_sample.min(self.next_snapshot).min(capture))
    }

    fn observe(&mut self, state: &State, stepper: &Stepper) -> Result<()> {
        self.record(state, stepper.stats().clamps)
    }
}

/// Result of [`run_setup`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub captured: Vec<State>,
    pub final_state: State,
    pub stats: StepStats,
    pub wall_s: f64,
}

/// Integrates `setup` to `t_end`, recording per `schedule`. `hook` runs on
/// every sampled state.
pub fn run_setup(
    setup: &Setup,
    t_end: f64,
    schedule: Schedule,
    snapshot_path: Option<PathBuf>,
    hook: impl FnMut(&State) -> Result<()>,
) -> Result<Trajectory> {
    let start = Instant::now();
    let mut rec = Recorder::new(setup, schedule, snapshot_path, hook)?;
    let out = simulate(setup.initial.clone(), &setup.params, &setup.forcing, &setup.scheme, t_end, &mut rec)?;
    rec.finish(&out.state, &out.stats)?;
    Ok(Trajectory {
        samples: rec.samples,
        captured: rec.captured,
        final_state: out.state,
        stats: out.stats,
        wall_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub t_end: f64,
    pub steps: u64,
    pub final_energy: f64,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// `max_t |m(t) - m(0)| / m(0)` over the samples.
    pub max_mass_drift: f64,
    pub clamps: u64,
    pub negative_dp: u64,
    pub wall_s: f64,
    pub tool_version: String,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub summary: RunSummary,
    pub samples: Vec<Sample>,
    pub final_state: State,
}

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SNAPSHOT_FILE: &str = "snapshots.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";

pub(crate) fn max_mass_drift(samples: &[Sample]) -> f64 {
    let m0 = samples.first().map_or(0.0, |s| s.mass);
    samples.iter().map(|s| ((s.mass - m0) / m0).abs()).fold(0.0, f64::max)
}

pub(crate) fn with_scenario<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Scenario { scenario: name.to_owned(), source: Box::new(e) })
}

/// Runs a scenario, writing the time series, snapshots (if a snapshot cadence
/// is set) and a summary under `out_dir`.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunRecord> {
    let setup = with_scenario(&scenario.name, scenario.build())?;
    let schedule = Schedule {
        sample_every: scenario.sample_every,
        snapshot_every: scenario.snapshot_every,
        captures: Vec::new(),
    };
    let traj = with_scenario(
        &scenario.name,
        run_setup(&setup, scenario.t_end, schedule, Some(out_dir.join(SNAPSHOT_FILE)), |_| Ok(())),
    )?;
    write_timeseries(&out_dir.join(TIMESERIES_FILE), &traj.samples)?;
    let first = traj.samples.first().expect("initial state is always sampled");
    let last = traj.samples.last().expect("initial state is always sampled");
    let summary = RunSummary {
        scenario: scenario.name.clone(),
        t_end: scenario.t_end,
        steps: traj.stats.steps,
        final_energy: last.energy,
        initial_mass: first.mass,
        final_mass: last.mass,
        max_mass_drift: max_mass_drift(&traj.samples),
        clamps: traj.stats.clamps,
        negative_dp: traj.stats.negative_dp,
        wall_s: traj.wall_s,
        tool_version: super::TOOL_VERSION.into(),
    };
    let path = out_dir.join(SUMMARY_FILE);
    let mut w = create_file(&path)?;
    serde_json::to_writer_pretty(&mut w, &summary)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(RunRecord { summary, samples: traj.samples, final_state: traj.final_state })
}
