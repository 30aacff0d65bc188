#![allow(dead_code)]

pub mod invariants;

use std::f64::consts::PI;
use std::path::PathBuf;

use barolab::constitutive::{PressureLaw, Viscosity};
use barolab::diagnostics::lp_distance;
use barolab::harness::Scenario;
use barolab::solver::{simulate, FluidParams, Forcing, NoObserver, SchemeConfig};
use barolab::{total_mass, Grid, ScalarField, State, VectorField};

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

pub fn scenario(file: &str) -> Scenario {
    Scenario::load(scenarios_dir().join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub fn grid1(n: usize) -> Grid {
    Grid::new(1, &[1.0], &[n], 2).unwrap()
}

pub fn isentropic_params(a: f64, gamma: f64, mu: f64) -> FluidParams {
    FluidParams {
        viscosity: Viscosity::new(mu, 0.0).unwrap(),
        law: PressureLaw::isentropic(a, gamma).unwrap(),
    }
}

/// Manufactured smooth solution on `[0, 1]` with walls, `p = rho^2`:
/// `rho = 1 + 0.1 cos(kx) e^-t`, `q = (0.1/k) sin(kx) e^-t`, `k = 2 pi`.
/// It satisfies continuity exactly; the momentum residual is returned as a
/// body force per unit mass.
pub mod mms {
    use super::*;

    const K: f64 = 2.0 * PI;
    pub const MU: f64 = 0.1;
    pub const T_END: f64 = 0.5;

    pub fn rho(t: f64, x: f64) -> f64 {
        1.0 + 0.1 * (K * x).cos() * (-t).exp()
    }

    pub fn q(t: f64, x: f64) -> f64 {
        0.1 / K * (K * x).sin() * (-t).exp()
    }

    pub fn force(mu: f64, lambda: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync {
        let nu = 2.0 * mu + lambda;
        move |t, x| {
            let x = x[0];
            let e = (-t).exp();
            let r = rho(t, x);
            let rx = -0.1 * K * (K * x).sin() * e;
            let rxx = -0.1 * K * K * (K * x).cos() * e;
            let q = q(t, x);
            let qt = -q;
            let qx = 0.1 * (K * x).cos() * e;
            let qxx = -0.1 * K * (K * x).sin() * e;
            let convection = 2.0 * q * qx / r - q * q * rx / (r * r);
            let pressure_x = 2.0 * r * rx;
            let uxx = (qxx * r - q * rxx) / (r * r) - 2.0 * rx * (qx * r - q * rx) / (r * r * r);
            let s = qt + convection + pressure_x - nu * uxx;
            [s / r, 0.0]
        }
    }

    pub struct MmsRun {
        pub cells: usize,
        pub rho_error: f64,
        pub mass_drift: f64,
        pub clamps: u64,
        pub steps: u64,
    }

    /// L2 density error at `T_END` on `cells` cells.
    pub fn run(cells: usize) -> MmsRun {
        let g = grid1(cells);
        let initial = State {
            rho: ScalarField::from_fn(g, |x| rho(0.0, x[0])).unwrap(),
            mom: VectorField::from_fn(g, |x| [q(0.0, x[0]), 0.0]).unwrap(),
            time: 0.0,
        };
        let m0 = total_mass(&initial);
        let forcing = Forcing::function(g, 1.0, force(MU, 0.0));
        let params = isentropic_params(1.0, 2.0, MU);
        let out = simulate(initial, &params, &forcing, &SchemeConfig::default(), T_END, &mut NoObserver)
            .expect("manufactured run");
        let exact = ScalarField::from_fn(g, |x| rho(T_END, x[0])).unwrap();
        MmsRun {
            cells,
            rho_error: lp_distance(&out.state.rho, &exact, 2.0).unwrap(),
            mass_drift: ((total_mass(&out.state) - m0) / m0).abs(),
            clamps: out.stats.clamps,
            steps: out.stats.steps,
        }
    }

    pub fn orders(runs: &[MmsRun]) -> Vec<f64> {
        runs.windows(2)
            .map(|w| (w[0].rho_error / w[1].rho_error).ln() / (w[1].cells as f64 / w[0].cells as f64).ln())
            .collect()
    }
}
