//! Regularisation sweep: does the geometric quantity stay bounded as the cutoff grows?

use ydvl::experiments::{regularization_sweep, DatumRecipe, MollifierScale, RecipeParams, RunSettings};
use ydvl::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(64), |s| s.parse())?;
    let g = Grid::new(n)?;
    let params = RecipeParams { rho_amp: 0.5, layer_width: 0.2, ..Default::default() };
    let d = DatumRecipe::named("tanh_layer", &params)?.sample(&g);
    let scales: Vec<MollifierScale> = [4, 8, 16].into_iter().map(MollifierScale::new).collect();
    let report = regularization_sweep(&d, &scales, &RunSettings::new(g, 0.5));
    for (i, r) in report.scales.iter().enumerate() {
        println!(
            "n_cut {:2}: M = {:.5}, sup|grad rho| = {:.4}, sup|u| = {:.4}, cauchy = {:?}",
            r.scale.n_cut.unwrap(),
            r.m_final,
            r.sup_grad_rho,
            r.sup_u,
            report.cauchy.get(i)
        );
    }
    println!("M_n trend: {}", report.m_trend.as_str());
    Ok(())
}
