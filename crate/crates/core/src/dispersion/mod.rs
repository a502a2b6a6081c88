//! Refractive-index models, phase mismatch and poling design.

pub mod crystal;
pub mod sellmeier;
pub mod taylor;

use serde::{Deserialize, Serialize};

pub use crystal::{solve_poling_period, CrystalSpec, Dispersion, Poling, SellmeierCrystal};
pub use sellmeier::{
    inv_group_velocity, inv_group_velocity_numeric, wavenumber, IndexModel, SellmeierModel, FD_STEP_THZ,
};
pub use taylor::{PhaseIndices, TaylorDispersion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    Pump,
    Signal,
    Idler,
}
