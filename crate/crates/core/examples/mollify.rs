//! Frequency-cutoff regularisation of a sharp density layer.

use ydvl::experiments::{mollify, DatumRecipe, MollifierScale, RecipeParams};
use ydvl::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = RecipeParams { rho_amp: 0.5, layer_width: 0.1, ..Default::default() };
    let d = DatumRecipe::named("tanh_layer", &params)?.sample(&Grid::new(512)?);
    for k in [8, 16, 32, 64, 128] {
        let m = mollify(&d, MollifierScale::new(k));
        println!(
            "n_cut {k:3}: |rho0 - rho0n|_inf {:.3e}, |u0 - u0n|_2 {:.3e}, range [{:.4}, {:.4}]",
            m.rho_error,
            m.velocity_l2_error,
            m.datum.rho.min(),
            m.datum.rho.max()
        );
    }
    Ok(())
}
