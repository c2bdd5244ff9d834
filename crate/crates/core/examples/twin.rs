//! Twin-run stability: perturbation energy against its amplitude.

use ydvl::experiments::{twin_run, DatumRecipe, Perturbation, RecipeParams, RunSettings};
use ydvl::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::new(64)?;
    let d = DatumRecipe::named("multimode_homogeneous", &RecipeParams::default())?.sample(&g);
    let settings = RunSettings::new(g, 0.5);
    for delta in [0.0, 1e-3, 1e-4, 1e-5] {
        let tr = twin_run(&d, Perturbation::velocity(delta), &settings)?;
        println!(
            "delta {delta:.0e}: E(0) {:.4e}, sup E {:.4e}, K {:.4}, envelopes {:?}",
            tr.energy[0],
            tr.sup_energy(),
            tr.fitted_k,
            tr.envelope
        );
    }
    Ok(())
}
