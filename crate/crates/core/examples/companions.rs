//! Momentum vorticity and the striated field evolved alongside the flow.

use ydvl::dynamics::{companion_residuals, FluidState, Simulation, StepControl};
use ydvl::experiments::{DatumRecipe, RecipeParams};
use ydvl::pressure::PressureSolver;
use ydvl::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let recipe = DatumRecipe::named("variable_density", &RecipeParams::default())?;
    for n in [32, 64, 128] {
        let d = recipe.sample(&Grid::new(n)?);
        let solver = PressureSolver::default();
        let s = FluidState::initial(d.rho.clone(), d.velocity(), &solver)?;
        let mut sim = Simulation::new(s, StepControl::default(), solver);
        sim.advance_to(1.0, |_| {})?;
        let (eta, x) = companion_residuals(&sim.state);
        println!("n = {n:3}: eta residual {eta:.2e}, X residual {x:.2e}");
    }
    Ok(())
}
