//! Command-line front end.
//!
//! Exit codes: 0 success or passing probe, 1 failing probe or failed
//! computation, 2 invalid input (config, grid, parameters, unreadable files,
//! bad usage).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::constitutive::{check_growth_bounds, PressureLaw, TabulatedLaw};
use crate::error::{Error, Result};
use crate::statics::{check_level_sets, solve_static, static_residual};

use super::config::{Scenario, StaticConfig};
use super::probes::{run_probe, ProbeKind};
use super::run::{create_file, run_scenario, write_table};
use super::TOOL_VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "barolab", version, about = "Barotropic compressible flow laboratory")]
struct Cli {
    /// Output directory for every file a command writes.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write its time series, snapshots and summary.
    Run { scenario: PathBuf },
    /// Solve the static problem described by a config.
    Static { config: PathBuf },
    /// Run a probe: steady_convergence, dissipativity, periodic or shift_compactness.
    Probe { name: String, config: PathBuf },
    /// Check that a scenario parses and builds.
    Validate { scenario: PathBuf },
    /// Pressure-law utilities.
    Laws {
        #[command(subcommand)]
        command: LawsCommand,
    },
}

#[derive(Debug, Subcommand)]
enum LawsCommand {
    /// Check the growth bounds of a tabulated law given as a `rho,p` CSV.
    Check {
        law: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        gamma: f64,
        /// Use monotone (limited) interpolation slopes.
        #[arg(long)]
        monotone: bool,
        #[arg(long, default_value_t = 1e-3)]
        rho_min: f64,
        /// Defaults to the last tabulated density.
        #[arg(long)]
        rho_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(parsed) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_FAIL
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let out = cli.out;
    match cli.command {
        Command::Run { scenario } => {
            let sc = Scenario::load(&scenario)?;
            let rec = run_scenario(&sc, &out)?;
            let s = &rec.summary;
            println!(
                "{}: {} steps to t = {}, E = {:.6e}, mass drift {:.3e}, clamps {}",
                s.scenario, s.steps, s.t_end, s.final_energy, s.max_mass_drift, s.clamps
            );
            Ok(EXIT_OK)
        }
        Command::Static { config } => run_static(&config, &out),
        Command::Probe { name, config } => {
            let kind: ProbeKind = name.parse()?;
            let sc = Scenario::load(&config)?;
            let report = run_probe(kind, &sc, &out)?;
            println!(
                "{}: {} ({:.1} s), report in {}",
                report.probe,
                if report.pass { "PASS" } else { "FAIL" },
                report.runtime_s,
                out.display()
            );
            Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Validate { scenario } => {
            let sc = Scenario::load(&scenario)?;
            let setup = sc.build()?;
            println!(
                "{}: valid ({}D, {} cells, mass {:.6e})",
                sc.name,
                setup.grid.dim(),
                setup.grid.interior_len(),
                crate::state::total_mass(&setup.initial)
            );
            Ok(EXIT_OK)
        }
        Command::Laws {
            command: LawsCommand::Check { law, a, b, gamma, monotone, rho_min, rho_max, samples },
        } => {
            let table = TabulatedLaw::from_csv(&law, monotone)?;
            let hi = rho_max.unwrap_or(table.rho_max());
            let report =
                check_growth_bounds(&PressureLaw::Tabulated(table), a, b, gamma, (rho_min, hi), samples)?;
            write_json(
                &out.join("laws_check.json"),
                &json!({
                    "law": law.display().to_string(),
                    "report": report,
                    "tool_version": TOOL_VERSION,
                }),
            )?;
            println!(
                "growth bounds {}: worst margin {:.3e} at rho = {:.4e}",
                if report.pass { "hold" } else { "violated" },
                report.worst_margin,
                report.worst_rho
            );
            Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = create_file(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn run_static(config: &Path, out: &Path) -> Result<i32> {
    let cfg = StaticConfig::load(config)?;
    let grid = cfg.grid.build()?;
    let (potential, _) = cfg.potential.build(grid, cfg.base_dir.as_deref())?;
    let sol = solve_static(&potential, cfg.mass, cfg.a, cfg.gamma, cfg.tol)?;
    let levels = check_level_sets(&potential, cfg.levels);
    let residual = static_residual(&sol, &potential, cfg.a, cfg.gamma);
    write_json(
        &out.join("static.json"),
        &json!({
            "c": sol.c,
            "mass": cfg.mass,
            "mass_error": sol.mass_error,
            "support_connected": sol.support_connected,
            "level_sets": levels,
            "residual": residual,
            "tool_version": TOOL_VERSION,
        }),
    )?;
    let rows: Vec<Vec<f64>> = grid
        .interior()
        .map(|i| {
            let mut row = grid.center(i)[..grid.dim()].to_vec();
            row.push(sol.rho.get(i));
            row
        })
        .collect();
    let header: &[&str] = if grid.dim() == 1 { &["x", "rho_s"] } else { &["x", "y", "rho_s"] };
    write_table(&out.join("static_profile.csv"), header, &rows)?;
    if !levels.connected_all {
        eprintln!("warning: superlevel sets of the potential are disconnected");
    }
    println!("static profile: c = {:.12e}, mass error {:.3e}", sol.c, sol.mass_error);
    Ok(EXIT_OK)
}
