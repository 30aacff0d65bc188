//! Structural invariants of every public type, as property checks that can
//! be driven by any `TestRunner`.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use barolab::constitutive::{check_growth_bounds, PressureLaw, TabulatedLaw, Viscosity};
use barolab::diagnostics::{energy_record, RenormFunction};
use barolab::harness::{read_table, steady_verdict, write_table, Scenario, SteadySettings, STEADY_HEADER};
use barolab::solver::{stable_dt, Envelope, FluidParams, Forcing, SchemeConfig, Stepper};
use barolab::statics::solve_static;
use barolab::{
    total_mass, validate_initial_data, Grid, InitialData, ScalarField, State, VectorField,
    DEFAULT_VACUUM_FLOOR,
};

pub type Property = fn(&mut TestRunner) -> Result<(), String>;

pub const ALL: &[(&str, Property)] = &[
    ("grid geometry", grid_geometry),
    ("field shape and finiteness", field_shape),
    ("state after solver steps", state_after_steps),
    ("initial data admissibility", initial_data),
    ("pressure law parameters", pressure_law),
    ("viscosity parameters", viscosity),
    ("growth report consistency", growth_report),
    ("scheme config", scheme_config),
    ("forcing bound and period", forcing),
    ("energy record", energy_parts),
    ("renormalization function", renorm_function),
    ("static solution", static_solution),
    ("scenario cadence", scenario_cadence),
    ("probe verdict purity", verdict_purity),
];

pub fn runner(cases: u32, deterministic: bool) -> TestRunner {
    if deterministic {
        TestRunner::new_with_rng(
            Config { cases, failure_persistence: None, ..Config::default() },
            proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
        )
    } else {
        TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
    }
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn grid_geometry(runner: &mut TestRunner) -> Result<(), String> {
    let strategy =
        (1usize..=2, prop::collection::vec(0.1f64..10.0, 2), prop::collection::vec(0usize..40, 2), 1usize..3);
    report(runner.run(&strategy, |(dim, extents, cells, ghost)| {
        let extents = &extents[..dim];
        let cells = &cells[..dim];
        match Grid::new(dim, extents, cells, ghost) {
            Ok(g) => {
                prop_assert!(cells.iter().all(|&n| n >= 4));
                prop_assert!(g.dx().iter().all(|&d| d > 0.0));
                prop_assert!(g.cell_volume() > 0.0);
                let vol: f64 = extents.iter().product();
                prop_assert!(rel_close(g.volume(), vol, 1e-14));
                let cell_sum = g.cell_volume() * g.interior_len() as f64;
                prop_assert!(rel_close(cell_sum, vol, 1e-12));
            }
            Err(e) => {
                prop_assert!(cells.iter().any(|&n| n < 4), "valid grid rejected: {e}");
                prop_assert!(e.is_config());
            }
        }
        Ok(())
    }))
}

pub fn field_shape(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (4usize..30, 4usize..30, -5.0f64..5.0, any::<bool>(), 0usize..1000);
    report(runner.run(&strategy, |(nx, ny, scale, poison, at)| {
        let g = Grid::new(2, &[1.0, 2.0], &[nx, ny], 1).unwrap();
        let s = ScalarField::from_fn(g, |x| scale * (x[0] + x[1]).sin()).unwrap();
        prop_assert_eq!(s.values().len(), g.len());
        prop_assert!(s.values().iter().all(|v| v.is_finite()));
        let v = VectorField::from_fn(g, |x| [scale * x[0], -x[1]]).unwrap();
        prop_assert_eq!(v.dim(), 2);
        prop_assert!(v.components().iter().all(|c| c.len() == g.len()));
        prop_assert!(ScalarField::from_values(g, vec![0.0; g.len() + 1]).is_err());
        let mut values = s.values().to_vec();
        if poison {
            let k = at % values.len();
            values[k] = f64::NAN;
            prop_assert!(ScalarField::from_values(g, values).is_err());
        } else {
            prop_assert!(ScalarField::from_values(g, values).is_ok());
        }
        Ok(())
    }))
}

/// Smooth data with optional vacuum patches, stepped a few times.
pub fn state_after_steps(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (0.0f64..0.95, 1usize..4, -1.0f64..1.0, any::<bool>(), 0.0f64..0.5);
    report(runner.run(&strategy, |(amp, mode, vel, vacuum, force)| {
        let g = Grid::new(1, &[1.0], &[32], 2).unwrap();
        let k = mode as f64 * PI;
        let rho = ScalarField::from_fn(g, |x| {
            let r = 1.0 + amp * (k * x[0]).cos();
            if vacuum && (0.4..0.5).contains(&x[0]) {
                0.0
            } else {
                r
            }
        })
        .unwrap();
        let mom = VectorField::from_fn(g, |x| {
            let r = 1.0 + amp * (k * x[0]).cos();
            if vacuum && (0.4..0.5).contains(&x[0]) {
                [0.0, 0.0]
            } else {
                [r * vel * (PI * x[0]).sin(), 0.0]
            }
        })
        .unwrap();
        let mut state = validate_initial_data(InitialData { rho, mom }, DEFAULT_VACUUM_FLOOR).unwrap();
        let params = FluidParams {
            viscosity: Viscosity::new(0.1, 0.0).unwrap(),
            law: PressureLaw::isentropic(1.0, 2.0).unwrap(),
        };
        let forcing =
            Forcing::constant(VectorField::from_fn(g, |x| [force * (PI * x[0]).sin(), 0.0]).unwrap());
        let scheme = SchemeConfig::default();
        let m0 = total_mass(&state);
        let mut stepper = Stepper::new(g);
        for _ in 0..20 {
            let dt = stable_dt(&state, &params, &scheme);
            prop_assert!(dt > 0.0);
            stepper.advance(&mut state, &params, &forcing, &scheme, dt).unwrap();
            prop_assert!(state.rho.values().iter().all(|v| v.is_finite()));
            prop_assert!(state.mom.components().iter().flatten().all(|v| v.is_finite()));
            prop_assert!(state.satisfies_invariants(scheme.vacuum_floor));
            let floor_ok = g.interior().all(|i| state.rho.get(i) >= scheme.vacuum_floor);
            prop_assert!(floor_ok || vacuum);
        }
        prop_assert!(((total_mass(&state) - m0) / m0).abs() <= 1e-12);
        Ok(())
    }))
}

pub fn initial_data(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..2.0], 8),
        prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], 8),
    );
    report(runner.run(&strategy, |(rho, q)| {
        let g = Grid::new(1, &[1.0], &[8], 1).unwrap();
        let data = InitialData {
            rho: ScalarField::from_interior(g, &rho).unwrap(),
            mom: VectorField::from_interior(g, std::slice::from_ref(&q)).unwrap(),
        };
        let mass: f64 = rho.iter().sum::<f64>() / 8.0;
        let admissible = rho.iter().all(|&r| r >= 0.0)
            && mass > 0.0
            && rho.iter().zip(&q).all(|(&r, &m)| r > DEFAULT_VACUUM_FLOOR || m == 0.0);
        let result = validate_initial_data(data, DEFAULT_VACUUM_FLOOR);
        prop_assert_eq!(result.is_ok(), admissible);
        if let Err(e) = result {
            prop_assert!(e.is_config());
        }
        Ok(())
    }))
}

pub fn pressure_law(runner: &mut TestRunner) -> Result<(), String> {
    let strategy =
        (-1.0f64..3.0, 0.0f64..3.0, prop::collection::vec((0.05f64..1.0, 0.0f64..2.0), 3..8), any::<bool>());
    report(runner.run(&strategy, |(a, gamma, steps, monotone)| {
        let iso = PressureLaw::isentropic(a, gamma);
        prop_assert_eq!(iso.is_ok(), a > 0.0 && gamma >= 1.0);
        if let Ok(law) = iso {
            prop_assert_eq!(law.p(0.0), 0.0);
        }
        let mut nodes = vec![(0.0, 0.0)];
        let (mut r, mut p) = (0.0, 0.0);
        for (dr, dp) in &steps {
            r += dr;
            p += dp;
            nodes.push((r, p));
        }
        let law = TabulatedLaw::new(nodes.clone(), monotone).unwrap();
        for &(rk, pk) in &nodes {
            prop_assert!(rel_close(law.pressure(rk), pk, 1e-12));
        }
        for &(rk, _) in &nodes[1..nodes.len() - 1] {
            let h = 1e-9 * rk;
            let left = law.dpressure(rk - h);
            let right = law.dpressure(rk + h);
            prop_assert!(
                (left - right).abs() <= 1e-4 * (1.0 + left.abs()),
                "slope jump at {rk}: {left} vs {right}"
            );
        }
        let mut unsorted = nodes.clone();
        unsorted.swap(1, 2);
        prop_assert!(TabulatedLaw::new(unsorted, monotone).is_err());
        let mut shifted = nodes;
        shifted[0] = (0.0, 0.1);
        prop_assert!(TabulatedLaw::new(shifted, monotone).is_err());
        Ok(())
    }))
}

pub fn viscosity(runner: &mut TestRunner) -> Result<(), String> {
    report(runner.run(&(-1.0f64..2.0, -2.0f64..2.0), |(mu, lambda)| {
        prop_assert_eq!(Viscosity::new(mu, lambda).is_ok(), mu > 0.0 && lambda + mu >= 0.0);
        Ok(())
    }))
}

pub fn growth_report(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (0.2f64..5.0, 0.0f64..2.0, 1.0f64..3.0, 0.5f64..4.0, 1.0f64..3.0);
    report(runner.run(&strategy, |(law_a, b, gamma, a, law_gamma)| {
        let law = PressureLaw::isentropic(law_a, law_gamma).unwrap();
        let r = check_growth_bounds(&law, a, b, gamma, (1e-3, 10.0), 200).unwrap();
        prop_assert_eq!(r.pass, r.worst_margin <= 0.0);
        prop_assert!(r.worst_margin.is_finite());
        Ok(())
    }))
}

pub fn scheme_config(runner: &mut TestRunner) -> Result<(), String> {
    report(runner.run(&(-0.5f64..1.5, -1e-6f64..1e-6), |(cfl, floor)| {
        let s = SchemeConfig { cfl, vacuum_floor: floor, ..SchemeConfig::default() };
        prop_assert_eq!(s.validate().is_ok(), cfl > 0.0 && cfl <= 1.0 && floor > 0.0);
        Ok(())
    }))
}

pub fn forcing(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (-2.0f64..2.0, 0.1f64..10.0, -1.0f64..1.0, 0.0f64..2.0, 0.0f64..100.0, 1usize..4);
    report(runner.run(&strategy, |(amp, omega, offset, env_amp, t, mode)| {
        let g = Grid::new(1, &[1.0], &[16], 1).unwrap();
        let k = mode as f64 * PI;
        let f0 = VectorField::from_fn(g, |x| [amp * (k * x[0]).sin(), 0.0]).unwrap();
        let envelope = Envelope { offset, amplitude: env_amp, phase: 0.3 };
        let f = Forcing::periodic(f0.clone(), omega, envelope).unwrap();
        let c = Forcing::constant(f0);
        for idx in g.interior() {
            let now = f.at(t, idx);
            let later = f.at(t + omega, idx);
            prop_assert!(now[0].abs() <= f.bound() * (1.0 + 1e-12));
            prop_assert!(c.at(t, idx)[0].abs() <= c.bound() * (1.0 + 1e-12));
            prop_assert!((now[0] - later[0]).abs() <= 1e-12 * f.bound().max(1e-300));
        }
        Ok(())
    }))
}

pub fn energy_parts(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (0.0f64..0.9, -3.0f64..3.0, 1.0f64..3.0, 0.01f64..1.0, -1.0f64..1.0);
    report(runner.run(&strategy, |(amp, vel, gamma, mu, lambda_frac)| {
        let g = Grid::new(2, &[1.0, 1.0], &[12, 10], 1).unwrap();
        let rho = ScalarField::from_fn(g, |x| 1.0 + amp * (PI * x[0]).cos() * (PI * x[1]).cos()).unwrap();
        let mom = VectorField::from_fn(g, |x| [vel * (PI * x[1]).sin(), vel * x[0]]).unwrap();
        let state = State { rho, mom, time: 0.0 };
        let law = PressureLaw::isentropic(1.0, gamma).unwrap();
        let visc = Viscosity::new(mu, lambda_frac.max(-mu)).unwrap();
        let forcing = Forcing::constant(VectorField::from_fn(g, |x| [x[1], 1.0]).unwrap());
        let rec = energy_record(&state, &law, &visc, &forcing, DEFAULT_VACUUM_FLOOR);
        prop_assert_eq!(rec.total, rec.kinetic + rec.potential);
        prop_assert!(rec.kinetic >= 0.0 && rec.dissipation >= 0.0);
        for v in [rec.kinetic, rec.potential, rec.total, rec.dissipation, rec.power] {
            prop_assert!(v.is_finite());
        }
        Ok(())
    }))
}

pub fn renorm_function(runner: &mut TestRunner) -> Result<(), String> {
    report(runner.run(&(1e-3f64..10.0, 0.0f64..5.0), |(m, s)| {
        let b = RenormFunction::new(m).unwrap();
        let rho = s * m;
        let db = b.db(rho);
        prop_assert!((0.0..=1.0).contains(&db));
        if rho >= 2.0 * m {
            prop_assert_eq!(db, 0.0);
        }
        for x in [m, 2.0 * m] {
            let h = 1e-6 * m;
            let left = (b.b(x) - b.b(x - h)) / h;
            let right = (b.b(x + h) - b.b(x)) / h;
            prop_assert!((left - right).abs() <= 1e-5, "kink at {x}");
            prop_assert!((b.db(x - h) - b.db(x + h)).abs() <= 1e-5);
        }
        prop_assert!(RenormFunction::new(-m).is_err());
        Ok(())
    }))
}

pub fn static_solution(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (prop::collection::vec(-1.0f64..1.0, 3), 0.05f64..5.0, 0.2f64..5.0, 1.1f64..3.0);
    report(runner.run(&strategy, |(coef, m, a, gamma)| {
        let g = Grid::new(1, &[1.0], &[64], 1).unwrap();
        let f = ScalarField::from_fn(g, |x| {
            coef.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * PI * x[0]).cos()).sum()
        })
        .unwrap();
        let tol = 1e-12;
        let sol = solve_static(&f, m, a, gamma, tol).unwrap();
        prop_assert!(g.interior().all(|i| sol.rho.get(i) >= 0.0));
        prop_assert!(sol.mass_error.abs() <= tol * m);
        let scale = a * gamma / (gamma - 1.0);
        for i in g.interior() {
            let r = sol.rho.get(i);
            if r > 0.0 {
                let lhs = scale * r.powf(gamma - 1.0);
                let rhs = f.get(i) - sol.c;
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
            }
        }
        Ok(())
    }))
}

pub fn scenario_cadence(runner: &mut TestRunner) -> Result<(), String> {
    report(runner.run(&(-1.0f64..1.0, -1.0f64..1.0), |(sample, snapshot)| {
        let text = format!(
            r#"{{"version": 1, "grid": {{"dim": 1, "extents": [1.0], "cells": [8]}},
                "initial": {{"density": {{"kind": "uniform", "value": 1.0}}}},
                "fluid": {{"law": {{"kind": "isentropic", "a": 1.0, "gamma": 2.0}},
                          "viscosity": {{"mu": 0.1, "lambda": 0.0}}}},
                "t_end": 1.0, "sample_every": {sample:e}, "snapshot_every": {snapshot:e}}}"#
        );
        let result = Scenario::from_json(&text).and_then(|s| s.build().map(|_| ()));
        prop_assert_eq!(result.is_ok(), sample > 0.0 && snapshot > 0.0);
        if let Err(e) = result {
            prop_assert!(e.is_config());
        }
        Ok(())
    }))
}

/// The verdict depends only on the recorded series and thresholds: the same
/// rows after a file round trip give the same verdict.
pub fn verdict_purity(runner: &mut TestRunner) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("series.csv");
    let strategy = (prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..20), 1e-4f64..0.5, 1e-6f64..1e-2);
    report(runner.run(&strategy, |(pts, decay, q_tol)| {
        let rows: Vec<Vec<f64>> =
            pts.iter().enumerate().map(|(k, (e_rho, e_q))| vec![k as f64, *e_rho, *e_q, 1.0]).collect();
        let thr = SteadySettings { decay_factor: decay, q_rel_tol: q_tol, ..SteadySettings::default() };
        write_table(&path, &STEADY_HEADER, &rows).unwrap();
        let back = read_table(&path, &STEADY_HEADER).unwrap();
        prop_assert_eq!(&back, &rows);
        prop_assert_eq!(steady_verdict(&rows, &thr), steady_verdict(&back, &thr));
        Ok(())
    }))
}
