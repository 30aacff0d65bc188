//! Measured quantities: energy budget, energy-inequality and renormalized
//! continuity residuals, and the distances used to compare states.
//! All integrals are midpoint sums over interior cells.

mod energy;
mod norms;
mod renorm;

pub use energy::{
    dissipation_rate, energy_inequality_residual, energy_record, forcing_power, total_energy, EnergyRecord,
    ResidualSeries,
};
pub use norms::{
    l1_distance_vec, lp_distance, lp_distance_pow, max_weak_distance, trig_test_family, weak_pairing,
    TEST_FAMILY_VERSION,
};
pub use renorm::{renorm_residual, RenormFunction};
