//! Constitutive relations: barotropic pressure laws, the pressure potential,
//! Newtonian stress, and the growth-bound check on `p'`.

mod growth;
mod pressure;
mod tabulated;
mod viscosity;

pub use growth::{check_growth_bounds, GrowthBoundReport};
pub use pressure::{dpressure, pressure, pressure_potential, sound_speed, PressureLaw, PressureLawSpec};
pub use tabulated::{adaptive_simpson, TabulatedLaw};
pub use viscosity::{viscous_stress, Tensor, Viscosity};
