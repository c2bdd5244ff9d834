//! Regularisation sweeps, the geometric-quantity probe and twin-run stability.

pub mod datum;
mod sweep;
mod twin;

pub use datum::{
    mollify, DatumRecipe, DensityProfile, InitialDatum, MollifiedDatum, MollifierScale,
    RecipeParams, VorticityProfile, RECIPE_NAMES,
};
pub use sweep::{regularization_sweep, ScaleResult, SweepReport, Trend};
pub use twin::{energy_functional, twin_run, Perturbation, StabilityTrace, ENVELOPE_POWERS};

use crate::dynamics::{FluidState, StepControl};
use crate::error::DynamicsError;
use crate::grid::Grid;
use crate::pressure::PressureSolver;

/// Everything a trajectory needs besides its initial datum.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub grid: Grid,
    pub t_final: f64,
    pub control: StepControl,
    pub solver: PressureSolver,
    pub p0: f64,
    /// Number of equally spaced comparison instants in `(0, T]`.
    pub checkpoints: usize,
}

impl RunSettings {
    pub fn new(grid: Grid, t_final: f64) -> Self {
        Self {
            grid,
            t_final,
            control: StepControl::default(),
            solver: PressureSolver::default(),
            p0: 4.0,
            checkpoints: 10,
        }
    }

    pub fn initial_state(&self, datum: &InitialDatum) -> Result<FluidState, DynamicsError> {
        FluidState::initial(datum.rho.clone(), datum.velocity(), &self.solver)
    }
}
