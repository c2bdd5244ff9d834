//! Sampled log-Lipschitz and Zygmund moduli of a smooth and a rough field.

use ydvl::experiments::{DatumRecipe, RecipeParams};
use ydvl::norms::{ll_modulus_with, zygmund_modulus_with, Interpolation};
use ydvl::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::new(128)?;
    let smooth = ScalarField::from_fn(&g, |x, _| x.sin());
    let rough = DatumRecipe::named("power_law", &RecipeParams { spectral_slope: 1.5, ..Default::default() })?
        .sample(&g)
        .omega;
    for (name, f) in [("sin x1", &smooth), ("power law", &rough)] {
        for mode in [Interpolation::Bilinear, Interpolation::Spectral] {
            let ll = ll_modulus_with(f, mode);
            let z = zygmund_modulus_with(f, mode);
            println!(
                "{name:10} {mode:?}: LL {:.4} at |y| = {}, Z {:.4} at |y| = {}",
                ll.seminorm, ll.arg_offset, z.seminorm, z.arg_offset
            );
        }
    }
    Ok(())
}
