//! Spectral operators on closed-form fields.

use ydvl::spectral::{biot_savart, curl2d, divergence, inverse_laplacian, laplacian, leray_project, perp_gradient};
use ydvl::{Grid, ScalarField, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::new(64)?;
    let w = ScalarField::from_fn(&g, |x, _| x.cos());
    let u = biot_savart(&w)?;
    let sin1 = ScalarField::from_fn(&g, |x, _| x.sin());
    println!("biot_savart(cos x1) - (0, sin x1): {:.2e}", u.x.max_abs().max((&u.y - &sin1).max_abs()));

    let f = ScalarField::from_fn(&g, |x, y| (2.0 * x).sin() * (3.0 * y).cos());
    let back = laplacian(&inverse_laplacian(&f)?).scale(-1.0);
    println!("-lap(inv_lap f) - f: {:.2e}", (&back - &f).max_abs());

    let curl = curl2d(&perp_gradient(&f));
    println!("curl(perp_grad f) - lap f: {:.2e}", (&curl - &laplacian(&f)).max_abs());

    let v = VectorField::from_fn(&g, |x, y| x.sin() + y.cos(), |x, y| (x + y).cos());
    let p = leray_project(&v);
    println!("div of projected field: {:.2e}", divergence(&p).max_abs());
    Ok(())
}
