//! Energy, density range and companion residuals for a 3:1 density contrast.

use std::time::Instant;

use ydvl::diagnostics::Diagnostics;
use ydvl::dynamics::{companion_residuals, FluidState, Simulation, StepControl};
use ydvl::norms::range_refined;
use ydvl::pressure::PressureSolver;
use ydvl::{Grid, ScalarField, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(128), |s| s.parse())?;
    let g = Grid::new(n)?;
    let rho = ScalarField::from_fn(&g, |x, y| 2.0 + x.sin() * y.sin());
    let u = VectorField::from_fn(&g, |x, y| x.cos() * y.sin() + 0.3 * (2.0 * y).sin(), |x, y| {
        -x.sin() * y.cos()
    });
    let solver = PressureSolver::default();
    let start = Instant::now();
    let s0 = FluidState::initial(rho, u, &solver)?;
    let e0 = s0.kinetic_energy();
    let (lo0, hi0) = range_refined(&s0.rho);
    let diag = Diagnostics::new(4.0)?;
    let mut sim = Simulation::new(s0, StepControl::default(), solver);
    for k in 1..=4 {
        let t = 0.25 * k as f64;
        sim.advance_to(t, |_| {})?;
        let s = &sim.state;
        let (lo, hi) = range_refined(&s.rho);
        let (re, rx) = companion_residuals(s);
        let rec = diag.measure(s, None);
        println!(
            "t={t:.2} energy_drift={:.3e} range_drift={:.3e} eta_res={re:.3e} x_res={rx:.3e} div={:.3e}",
            (s.kinetic_energy() - e0).abs() / e0,
            (lo - lo0).abs().max((hi - hi0).abs()),
            rec.div_u_sup
        );
    }
    println!("steps={} dt={:.4e} elapsed={:.2?}", sim.steps(), sim.dt(), start.elapsed());
    Ok(())
}
