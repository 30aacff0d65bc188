//! Flow state `(rho, q = rho u)` and validation of initial data.

use crate::error::{Error, InitialDataReport, Result, Violation};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;

/// Densities at or below this value count as vacuum.
pub const DEFAULT_VACUUM_FLOOR: f64 = 1e-12;

/// Density and momentum density at one instant. Momentum, not velocity, is
/// the stored variable.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: ScalarField,
    pub mom: VectorField,
    pub time: f64,
}

/// Candidate initial density and momentum, not yet checked.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub rho: ScalarField,
    pub mom: VectorField,
}

impl State {
    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// `u = q / max(rho, floor)` for one cell.
    #[inline]
    pub fn velocity_at(&self, idx: usize, floor: f64) -> [f64; 2] {
        let r = self.rho.get(idx).max(floor);
        let q = self.mom.at(idx);
        [q[0] / r, q[1] / r]
    }

    pub fn velocity(&self, floor: f64) -> VectorField {
        let grid = *self.grid();
        let comps = (0..grid.dim())
            .map(|k| {
                self.mom.component(k).iter().zip(self.rho.values()).map(|(q, r)| q / r.max(floor)).collect()
            })
            .collect();
        VectorField::from_components(grid, comps).expect("velocity of a finite state is finite")
    }

    /// Checks both state invariants: non-negative density and no momentum on
    /// vacuum cells.
    pub fn satisfies_invariants(&self, floor: f64) -> bool {
        self.grid().interior().all(|i| {
            let r = self.rho.get(i);
            r >= 0.0 && (r > floor || self.mom.norm_sq_at(i) == 0.0)
        })
    }
}

/// Total mass `m = int rho dx` by the midpoint rule over interior cells.
pub fn total_mass(state: &State) -> f64 {
    state.rho.integral()
}

/// Accepts initial data satisfying `rho >= 0`, `m > 0` and `q = 0` wherever
/// `rho <= floor`, returning the state at `t = 0`. Otherwise every violation
/// is reported.
pub fn validate_initial_data(data: InitialData, floor: f64) -> Result<State> {
    let grid = *data.rho.grid();
    if !grid.compatible(data.mom.grid()) {
        return Err(Error::FieldShape("density and momentum live on different grids".into()));
    }
    let mut report = InitialDataReport::default();
    for (n, idx) in grid.interior().enumerate() {
        let r = data.rho.get(idx);
        if !r.is_finite() {
            report.violations.push(Violation::NonFinite { cell: n });
            continue;
        }
        if r < 0.0 {
            report.violations.push(Violation::NegativeDensity { cell: n, value: r });
        } else if r <= floor && data.mom.norm_sq_at(idx) != 0.0 {
            report.violations.push(Violation::MomentumOnVacuum { cell: n });
        }
    }
    let mass = data.rho.integral();
    if !(mass > 0.0) {
        report.violations.push(Violation::NonPositiveMass { mass });
    }
    if !report.violations.is_empty() {
        return Err(report.into());
    }
    Ok(State { rho: data.rho, mom: data.mom, time: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_line(n: usize) -> Grid {
        Grid::new(1, &[1.0], &[n], 2).unwrap()
    }

    #[test]
    fn uniform_data_is_valid() {
        let g = unit_line(50);
        let data = InitialData { rho: ScalarField::constant(g, 1.0), mom: VectorField::zeros(g) };
        let s = validate_initial_data(data, DEFAULT_VACUUM_FLOOR).unwrap();
        assert!((total_mass(&s) - 1.0).abs() < 1e-14);
        assert_eq!(s.time, 0.0);
        assert!(s.satisfies_invariants(DEFAULT_VACUUM_FLOOR));
    }

    #[test]
    fn momentum_on_vacuum_lists_left_half() {
        let g = unit_line(10);
        let rho = ScalarField::from_fn(g, |x| if x[0] < 0.5 { 0.0 } else { 1.0 }).unwrap();
        let mom = VectorField::constant(g, &[1.0]).unwrap();
        let err = validate_initial_data(InitialData { rho, mom }, DEFAULT_VACUUM_FLOOR).unwrap_err();
        match err {
            Error::InitialData(report) => {
                assert_eq!(report.vacuum_momentum_cells(), vec![0, 1, 2, 3, 4]);
                assert!(report.negative_cells().is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_density_rejected() {
        let g = unit_line(10);
        let mut vals = vec![1.0; 10];
        vals[3] = -1e-3;
        let rho = ScalarField::from_interior(g, &vals).unwrap();
        let err =
            validate_initial_data(InitialData { rho, mom: VectorField::zeros(g) }, DEFAULT_VACUUM_FLOOR)
                .unwrap_err();
        match err {
            Error::InitialData(report) => assert_eq!(report.negative_cells(), vec![3]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_mass_rejected() {
        let g = unit_line(10);
        let err = validate_initial_data(
            InitialData { rho: ScalarField::zeros(g), mom: VectorField::zeros(g) },
            DEFAULT_VACUUM_FLOOR,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InitialData(_)));
    }

    #[test]
    fn mass_examples() {
        let g = unit_line(10);
        let s = State { rho: ScalarField::constant(g, 2.0), mom: VectorField::zeros(g), time: 0.0 };
        assert!((total_mass(&s) - 2.0).abs() < 1e-14);

        let g2 = Grid::new(2, &[1.0, 2.0], &[8, 16], 1).unwrap();
        let s2 = State { rho: ScalarField::constant(g2, 1.0), mom: VectorField::zeros(g2), time: 0.0 };
        assert!((total_mass(&s2) - 2.0).abs() < 1e-13);

        // exact integral of x over [0, 1] is 1/2
        let g3 = unit_line(1000);
        let s3 = State {
            rho: ScalarField::from_fn(g3, |x| x[0]).unwrap(),
            mom: VectorField::zeros(g3),
            time: 0.0,
        };
        assert!((total_mass(&s3) - 0.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn mass_is_additive_over_disjoint_subsets(
            vals in prop::collection::vec(0.0f64..10.0, 32),
            split in 1usize..31,
        ) {
            let g = unit_line(32);
            let vol = g.cell_volume();
            let s = State {
                rho: ScalarField::from_interior(g, &vals).unwrap(),
                mom: VectorField::zeros(g),
                time: 0.0,
            };
            let left: f64 = vals[..split].iter().sum::<f64>() * vol;
            let right: f64 = vals[split..].iter().sum::<f64>() * vol;
            let total = total_mass(&s);
            prop_assert!((total - (left + right)).abs() <= 1e-12 * total.max(1.0));
        }

        #[test]
        fn accepted_data_satisfies_invariants(
            vals in prop::collection::vec(0.0f64..2.0, 16),
            moms in prop::collection::vec(-1.0f64..1.0, 16),
        ) {
            let g = unit_line(16);
            let floor = 0.1;
            let moms: Vec<f64> = moms.iter().zip(&vals).map(|(m, r)| if *r <= floor { 0.0 } else { *m }).collect();
            let data = InitialData {
                rho: ScalarField::from_interior(g, &vals).unwrap(),
                mom: VectorField::from_interior(g, &[moms]).unwrap(),
            };
            if let Ok(state) = validate_initial_data(data, floor) {
                prop_assert!(state.satisfies_invariants(floor));
                prop_assert!(total_mass(&state) > 0.0);
            }
        }
    }
}
