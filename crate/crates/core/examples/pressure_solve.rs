//! Variable-coefficient pressure solve against a manufactured solution.

use ydvl::pressure::PressureSolver;
use ydvl::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::new(64)?;
    let rho = ScalarField::from_fn(&g, |x, _| 2.0 + x.sin());
    let rhs = ScalarField::from_fn(&g, |x, y| y.sin() / (2.0 + x.sin()));
    let exact = ScalarField::from_fn(&g, |_, y| y.sin());
    for tol in [1e-6, 1e-10, 1e-12] {
        let rep = PressureSolver::new(tol).solve_with_rhs(&rho, &rhs, None)?;
        println!(
            "tol {tol:.0e}: {:3} iterations, residual {:.2e}, error {:.2e}",
            rep.iterations,
            rep.relative_residual,
            (&rep.pi - &exact).max_abs()
        );
    }
    Ok(())
}
