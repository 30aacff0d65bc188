mod common;

use std::fs;
use std::path::Path;

use barolab::harness::{
    read_snapshots, read_table, read_timeseries, recheck, run_probe, run_scenario, write_timeseries,
    ProbeKind, ProbeReport, Scenario, PERIODIC_HEADER, REPORT_FILE, SNAPSHOT_FILE, SUMMARY_FILE,
    TIMESERIES_FILE, TIMESERIES_HEADER,
};
use serde_json::{json, Value};

use common::scenario;

fn from_value(v: Value) -> Scenario {
    Scenario::from_json(&v.to_string()).unwrap()
}

fn base(cells: usize, t_end: f64) -> Value {
    json!({
        "version": 1,
        "name": "custom",
        "grid": {"dim": 1, "extents": [1.0], "cells": [cells]},
        "initial": {"density": {"kind": "sine_perturbation", "mean": 1.0, "amplitude": 0.05, "modes": [1]}},
        "fluid": {"law": {"kind": "isentropic", "a": 1.0, "gamma": 2.0}, "viscosity": {"mu": 0.1, "lambda": 0.0}},
        "t_end": t_end,
        "sample_every": 0.25,
    })
}

fn small_decay() -> Scenario {
    let mut sc = scenario("decay1d.json");
    sc.grid.cells = vec![100];
    sc.t_end = 0.05;
    sc
}

#[test]
fn rest_scenario_keeps_energy_and_mass() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run_scenario(&scenario("rest1d.json"), dir.path()).unwrap();
    let e0 = rec.samples[0].energy;
    assert!(rec.samples.iter().all(|s| s.energy == e0));
    assert!(rec.summary.max_mass_drift <= 1e-13);
    assert_eq!(rec.summary.clamps, 0);
    let csv = fs::read_to_string(dir.path().join(TIMESERIES_FILE)).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,kinetic,potential,E,dissipation,power,mass,clamps");
    assert_eq!(TIMESERIES_HEADER.join(","), "t,kinetic,potential,E,dissipation,power,mass,clamps");
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(summary["clamps"], 0);
    assert!(summary["tool_version"].as_str().unwrap().starts_with("barolab "));
}

#[test]
fn identical_scenarios_write_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_scenario(&small_decay(), a.path()).unwrap();
    run_scenario(&small_decay(), b.path()).unwrap();
    for file in [TIMESERIES_FILE, SNAPSHOT_FILE] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn decay_scenario_energy_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run_scenario(&small_decay(), dir.path()).unwrap();
    assert!(rec.samples.len() > 3);
    assert!(rec.samples.windows(2).all(|w| w[1].energy < w[0].energy));
}

#[test]
fn files_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run_scenario(&small_decay(), dir.path()).unwrap();
    let back = read_timeseries(&dir.path().join(TIMESERIES_FILE)).unwrap();
    assert_eq!(back.len(), rec.samples.len());
    for (x, y) in back.iter().zip(&rec.samples) {
        assert_eq!(x.energy.to_bits(), y.energy.to_bits());
        assert_eq!(x.mass.to_bits(), y.mass.to_bits());
        assert_eq!(x, y);
    }
    let copy = dir.path().join("copy.csv");
    write_timeseries(&copy, &back).unwrap();
    assert_eq!(fs::read(&copy).unwrap(), fs::read(dir.path().join(TIMESERIES_FILE)).unwrap());

    let snaps = read_snapshots(&dir.path().join(SNAPSHOT_FILE)).unwrap();
    let last = snaps.last().unwrap();
    assert_eq!(last.t, rec.final_state.time);
    let rho: Vec<u64> = rec.final_state.rho.interior_values().iter().map(|v| v.to_bits()).collect();
    assert_eq!(last.rho.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), rho);
    assert_eq!(last.mom.len(), 1);
    assert_eq!(last.grid.cells, vec![100]);
    let line: Value = serde_json::from_str(
        fs::read_to_string(dir.path().join(SNAPSHOT_FILE)).unwrap().lines().next().unwrap(),
    )
    .unwrap();
    for key in ["t", "rho", "mom", "grid"] {
        assert!(line.get(key).is_some(), "{key}");
    }
}

#[test]
fn missing_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "t,kinetic,potential,E,dissipation,power,clamps\n0,0,1,1,0,0,0\n").unwrap();
    let err = read_timeseries(&path).unwrap_err();
    assert!(err.is_config());
    assert!(err.to_string().contains("mass"), "{err}");
}

fn tamper_threshold(dir: &Path, key: &str, value: Value) {
    let path = dir.join(REPORT_FILE);
    let mut report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    report["thresholds"][key] = value;
    fs::write(&path, report.to_string()).unwrap();
}

#[test]
fn well_prepared_start_stays_static() {
    let mut v = base(200, 2.0);
    v["initial"] = json!({"density": {"kind": "static", "mass": 1.0}});
    v["forcing"] =
        json!({"kind": "gradient", "potential": {"family": "cosine", "amplitude": 0.05, "modes": [1]}});
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::SteadyConvergence, &from_value(v), dir.path()).unwrap();
    let verdict = &report.measurements["verdict"];
    assert!(report.pass, "{verdict}");
    assert_eq!(verdict["well_prepared"], true);
    assert!(verdict["e_rho_max"].as_f64().unwrap() <= 1e-6);
    assert!(recheck(dir.path()).unwrap());
}

#[test]
fn report_has_the_documented_keys_and_rechecks() {
    let mut v = base(50, 1.0);
    v["forcing"] =
        json!({"kind": "gradient", "potential": {"family": "cosine", "amplitude": 0.2, "modes": [1]}});
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::SteadyConvergence, &from_value(v), dir.path()).unwrap();
    let raw: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap()).unwrap();
    let mut keys: Vec<&str> = raw.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        ["measurements", "probe", "runtime_s", "thresholds", "tool_version", "pass"]
            .iter()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect::<Vec<_>>()
    );
    assert_eq!(raw["probe"], "steady_convergence");
    assert_eq!(ProbeReport::load(dir.path().join(REPORT_FILE)).unwrap(), report);
    assert_eq!(recheck(dir.path()).unwrap(), report.pass);
    tamper_threshold(dir.path(), "decay_factor", json!(1e-30));
    assert!(!recheck(dir.path()).unwrap());
}

#[test]
fn disconnected_level_sets_attach_a_warning() {
    let mut v = base(64, 0.5);
    v["initial"] = json!({"density": {"kind": "uniform", "value": 0.3}});
    v["forcing"] =
        json!({"kind": "gradient", "potential": {"family": "cosine", "amplitude": 0.5, "modes": [2]}});
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::SteadyConvergence, &from_value(v), dir.path()).unwrap();
    assert_eq!(report.measurements["level_sets_connected"], false);
    let warnings = report.measurements["warnings"].as_array().unwrap();
    assert!(!warnings.is_empty());
}

#[test]
fn zero_margin_is_a_config_error() {
    let mut v = base(32, 1.0);
    v["probes"] = json!({"dissipativity": {"margin": 0.0}});
    let dir = tempfile::tempdir().unwrap();
    let err = run_probe(ProbeKind::Dissipativity, &from_value(v), dir.path()).unwrap_err();
    assert!(err.is_config(), "{err}");
}

#[test]
fn unforced_dissipativity_passes() {
    let mut v = base(32, 3.0);
    v["initial"]["velocity"] = json!({"shape": "sine", "amplitude": [0.5], "modes": [1]});
    v["fluid"]["viscosity"]["mu"] = json!(0.5);
    v["sample_every"] = json!(0.05);
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::Dissipativity, &from_value(v), dir.path()).unwrap();
    assert!(report.pass, "{}", report.measurements);
    assert!(recheck(dir.path()).unwrap());
}

#[test]
fn periodic_probe_needs_periodic_forcing() {
    let mut v = base(32, 60.0);
    v["forcing"] = json!({"kind": "constant", "field": {"shape": "uniform", "value": [0.1]}});
    let err =
        run_probe(ProbeKind::Periodic, &from_value(v), tempfile::tempdir().unwrap().path()).unwrap_err();
    assert!(err.is_config(), "{err}");
}

fn periodic_case(amplitude: f64, envelope: Value) -> Value {
    let mut v = base(50, 20.0);
    v["fluid"]["viscosity"]["mu"] = json!(0.2);
    v["sample_every"] = json!(0.5);
    v["forcing"] = json!({
        "kind": "periodic",
        "field": {"shape": "sine", "amplitude": [amplitude], "modes": [1]},
        "omega": 1.0,
        "envelope": envelope,
    });
    v["probes"] = json!({"periodic": {"transient": 15.0, "periods": 4}});
    v
}

#[test]
fn constant_forcing_is_trivially_periodic() {
    let v = periodic_case(0.1, json!({"offset": 1.0, "amplitude": 0.0}));
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::Periodic, &from_value(v), dir.path()).unwrap();
    assert!(report.pass, "{}", report.measurements);
    let rows = read_table(&dir.path().join("series.csv"), &PERIODIC_HEADER).unwrap();
    let last = rows.last().unwrap()[2];
    assert!(last <= 1e-8 * rows[0][5], "delta {last}");
}

#[test]
fn doubling_the_amplitude_is_recorded_against_the_same_thresholds() {
    let mut finals = Vec::new();
    for amp in [0.05, 0.1] {
        let v = periodic_case(amp, json!({"offset": 0.0, "amplitude": 1.0}));
        let dir = tempfile::tempdir().unwrap();
        let report = run_probe(ProbeKind::Periodic, &from_value(v), dir.path()).unwrap();
        assert_eq!(recheck(dir.path()).unwrap(), report.pass);
        assert_eq!(report.thresholds["rel_tol"], 1e-3);
        finals.push((report.pass, report.measurements["verdict"]["final_delta"].as_f64().unwrap()));
    }
    assert!(finals.iter().all(|(pass, _)| *pass), "{finals:?}");
}

#[test]
fn off_period_shifts_are_informative() {
    let mut v = periodic_case(0.1, json!({"offset": 0.0, "amplitude": 1.0}));
    v["t_end"] = json!(6.0);
    v["probes"] = json!({"shift_compactness": {"shift_times": [0.0, 1.5, 3.0, 4.5], "window": 1.0}});
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::ShiftCompactness, &from_value(v.clone()), dir.path()).unwrap();
    assert_eq!(report.thresholds["informative"], true);
    assert!(report.pass);

    v["probes"] = json!({"shift_compactness": {"shift_times": [0.0, 1.0, 2.0, 3.0, 4.0], "window": 1.0}});
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::ShiftCompactness, &from_value(v), dir.path()).unwrap();
    assert_eq!(report.thresholds["informative"], false);
}

#[test]
fn steady_forcing_shift_distances_decay() {
    let mut sc = scenario("shift1d.json");
    sc.grid.cells = vec![50];
    let dir = tempfile::tempdir().unwrap();
    let report = run_probe(ProbeKind::ShiftCompactness, &sc, dir.path()).unwrap();
    assert!(report.pass, "{}", report.measurements);
    assert!(recheck(dir.path()).unwrap());
}

#[test]
fn shipped_scenarios_all_build() {
    for entry in fs::read_dir(common::scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json")
            && !path.file_name().unwrap().to_str().unwrap().starts_with("static")
        {
            Scenario::load(&path).unwrap().build().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}
