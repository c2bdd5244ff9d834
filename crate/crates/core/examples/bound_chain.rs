//! Transport bounds for the density gradient and the momentum vorticity.

use ydvl::diagnostics::{
    check_eta_transport_bound, check_gronwall_gradrho, check_velocity_linfty_bound, fit_velocity_constant,
    Diagnostics,
};
use ydvl::dynamics::{FluidState, Simulation, StepControl};
use ydvl::experiments::{DatumRecipe, RecipeParams};
use ydvl::pressure::PressureSolver;
use ydvl::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::new(64)?;
    let d = DatumRecipe::named("variable_density", &RecipeParams::default())?.sample(&g);
    let solver = PressureSolver::default();
    let s = FluidState::initial(d.rho.clone(), d.velocity(), &solver)?;
    let diag = Diagnostics::new(4.0)?;
    let mut series = vec![diag.measure(&s, None)];
    let mut sim = Simulation::new(s, StepControl::default(), solver);
    sim.advance_to(1.0, |st| {
        let rec = diag.measure(st, series.last());
        series.push(rec);
    })?;

    let first = &series[0];
    let calibration = fit_velocity_constant(&series[..series.len() / 2], &diag.exponents);
    let checks = [
        check_gronwall_gradrho(&series, first.sup_grad_rho, 1e-3),
        check_eta_transport_bound(&series, first.lp_eta.get(4.0).unwrap(), 4.0, 1e-2),
        check_velocity_linfty_bound(series.last().unwrap(), &diag.exponents, calibration, 1e-2),
    ];
    for c in &checks {
        println!("{:20} lhs {:.5} rhs {:.5} at t = {:.3}: {}", c.name, c.lhs, c.rhs, c.t, c.satisfied);
    }
    println!("M(1) = {:.5}", series.last().unwrap().m_accum);
    Ok(())
}
