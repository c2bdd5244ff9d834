//! The steady cellular flow stays put.

use ydvl::dynamics::{FluidState, Simulation, StepControl};
use ydvl::norms::lp_norm;
use ydvl::pressure::PressureSolver;
use ydvl::{Grid, ScalarField, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::new(64)?;
    let u0 = VectorField::from_fn(&g, |x, y| x.cos() * y.sin(), |x, y| -x.sin() * y.cos());
    let solver = PressureSolver::default();
    let s = FluidState::initial(ScalarField::constant(&g, 1.0), u0.clone(), &solver)?;
    let mut sim = Simulation::new(s, StepControl::default(), solver);
    for k in 1..=4 {
        sim.advance_to(0.25 * k as f64, |_| {})?;
        println!("t = {:.2}: |u - u0|_inf = {:.2e}", sim.state.t, lp_norm(&(&sim.state.u - &u0), f64::INFINITY));
    }
    Ok(())
}
