//! Flat `key = value` run configuration.

use std::path::PathBuf;

use crate::dynamics::StepControl;
use crate::error::HarnessError;
use crate::experiments::{DatumRecipe, MollifierScale, RecipeParams, RunSettings, RECIPE_NAMES};
use crate::grid::Grid;
use crate::norms::make_exponents;
use crate::pressure::{PressureSolver, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    pub t_final: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub p0: f64,
    pub rho_star: f64,
    pub rho_upper: f64,
    pub recipe: String,
    pub params: RecipeParams,
    pub n_cut: Option<usize>,
    pub filter_strength: f64,
    pub pressure_tol: f64,
    pub output_dir: PathBuf,
    pub snapshot_cadence: usize,
    pub diagnostics_cadence: usize,
    pub seed: u64,
    /// Cutoffs visited by `sweep`.
    pub sweep_scales: Vec<usize>,
    pub checkpoints: usize,
    pub twin_mode: u32,
    pub twin_density_delta: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ctl = StepControl::default();
        Self {
            grid_n: 64,
            t_final: 1.0,
            cfl: ctl.cfl,
            dt_max: ctl.dt_max,
            p0: 4.0,
            rho_star: 1.0,
            rho_upper: 3.0,
            recipe: "taylor_green_homogeneous".into(),
            params: RecipeParams::default(),
            n_cut: None,
            filter_strength: ctl.filter_strength,
            pressure_tol: DEFAULT_TOLERANCE,
            output_dir: PathBuf::from("out"),
            snapshot_cadence: 10,
            diagnostics_cadence: 10,
            seed: 0,
            sweep_scales: vec![16, 32, 64],
            checkpoints: 10,
            twin_mode: 1,
            twin_density_delta: 0.0,
        }
    }
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse().map_err(|_| HarnessError::Parse {
        line,
        message: format!("invalid value '{v}' for '{key}'"),
    })
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<usize>, HarnessError> {
    v.split(',').map(|s| parse_value(line, key, s.trim())).collect()
}

/// Parses and validates a configuration; omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, HarnessError> {
    let mut c = RunConfig::default();
    let mut seed_for_recipe = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(HarnessError::Parse { line, message: format!("expected key = value, got '{body}'") });
        };
        let (key, v) = (key.trim(), value.trim());
        if v.is_empty() {
            return Err(HarnessError::Parse { line, message: format!("missing value for '{key}'") });
        }
        match key {
            "grid_n" => c.grid_n = parse_value(line, key, v)?,
            "T_final" => c.t_final = parse_value(line, key, v)?,
            "cfl" => c.cfl = parse_value(line, key, v)?,
            "dt_max" => c.dt_max = parse_value(line, key, v)?,
            "p0" => c.p0 = parse_value(line, key, v)?,
            "rho_star" => c.rho_star = parse_value(line, key, v)?,
            "rho_upper" => c.rho_upper = parse_value(line, key, v)?,
            "recipe" => c.recipe = v.to_string(),
            "rho_mean" => c.params.rho_mean = parse_value(line, key, v)?,
            "rho_amp" => c.params.rho_amp = parse_value(line, key, v)?,
            "omega_amp" => c.params.omega_amp = parse_value(line, key, v)?,
            "layer_width" => c.params.layer_width = parse_value(line, key, v)?,
            "spectral_slope" => c.params.spectral_slope = parse_value(line, key, v)?,
            "recipe_seed" => seed_for_recipe = Some(parse_value(line, key, v)?),
            "n_cut" => {
                c.n_cut = if v == "none" { None } else { Some(parse_value(line, key, v)?) }
            }
            "filter_strength" => c.filter_strength = parse_value(line, key, v)?,
            "pressure_tol" => c.pressure_tol = parse_value(line, key, v)?,
            "output_dir" => c.output_dir = PathBuf::from(v),
            "snapshot_cadence" => c.snapshot_cadence = parse_value(line, key, v)?,
            "diagnostics_cadence" => c.diagnostics_cadence = parse_value(line, key, v)?,
            "seed" => c.seed = parse_value(line, key, v)?,
            "sweep_scales" => c.sweep_scales = parse_list(line, key, v)?,
            "checkpoints" => c.checkpoints = parse_value(line, key, v)?,
            "twin_mode" => c.twin_mode = parse_value(line, key, v)?,
            "twin_density_delta" => c.twin_density_delta = parse_value(line, key, v)?,
            _ => return Err(HarnessError::Parse { line, message: format!("unknown key '{key}'") }),
        }
    }
    c.params.seed = seed_for_recipe.unwrap_or(c.seed);
    c.validate()?;
    Ok(c)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: String| Err(HarnessError::Validation(m));
        if Grid::new(self.grid_n).is_err() {
            return fail(format!("grid_n = {} must be a power of two >= 8", self.grid_n));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return fail(format!("T_final = {} must be positive", self.t_final));
        }
        if !(self.cfl > 0.0) || !(self.dt_max > 0.0) {
            return fail("cfl and dt_max must be positive".into());
        }
        if make_exponents(self.p0).is_err() {
            return fail(format!("p0 = {} must lie in (2, 4]", self.p0));
        }
        if !(self.rho_star > 0.0 && self.rho_star <= self.rho_upper) {
            return fail(format!(
                "need 0 < rho_star <= rho_upper, got rho_star = {}, rho_upper = {}",
                self.rho_star, self.rho_upper
            ));
        }
        if !RECIPE_NAMES.contains(&self.recipe.as_str()) {
            return fail(format!("unknown recipe '{}', expected one of {RECIPE_NAMES:?}", self.recipe));
        }
        if !(self.pressure_tol > 0.0) {
            return fail("pressure_tol must be positive".into());
        }
        if !(self.filter_strength >= 0.0) {
            return fail("filter_strength must be non-negative".into());
        }
        if self.snapshot_cadence == 0 || self.diagnostics_cadence == 0 || self.checkpoints == 0 {
            return fail("cadences and checkpoints must be at least 1".into());
        }
        if self.n_cut == Some(0) || self.sweep_scales.contains(&0) {
            return fail("cutoffs must be at least 1".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.grid_n).expect("validated grid size")
    }

    pub fn recipe(&self) -> DatumRecipe {
        DatumRecipe::named(&self.recipe, &self.params).expect("validated recipe name")
    }

    pub fn scale(&self) -> MollifierScale {
        MollifierScale { n_cut: self.n_cut }
    }

    pub fn settings(&self) -> RunSettings {
        let mut s = RunSettings::new(self.grid(), self.t_final);
        s.control = StepControl { cfl: self.cfl, dt_max: self.dt_max, filter_strength: self.filter_strength };
        s.solver = PressureSolver { tol: self.pressure_tol, max_iterations: DEFAULT_MAX_ITERATIONS };
        s.p0 = self.p0;
        s.checkpoints = self.checkpoints;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("grid_n = 64\nT_final = 0.5\nrecipe = taylor_green_homogeneous\n").unwrap();
        assert_eq!(c.grid_n, 64);
        assert_eq!(c.t_final, 0.5);
        assert_eq!(c.cfl, 0.5);
        assert_eq!(c.pressure_tol, 1e-10);
        assert_eq!(c.filter_strength, 0.0);
        assert_eq!(c.snapshot_cadence, 10);
        assert_eq!(c.diagnostics_cadence, 10);
    }

    #[test]
    fn p0_out_of_range() {
        let err = parse_config("p0 = 5").unwrap_err();
        assert!(matches!(err, HarnessError::Validation(ref m) if m.contains("(2, 4]")), "{err}");
    }

    #[test]
    fn parse_errors_carry_line() {
        match parse_config("# c\ngrid_n = 64\ncfl 0.3\n").unwrap_err() {
            HarnessError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
        assert!(matches!(parse_config("nope = 1"), Err(HarnessError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("cfl = abc"), Err(HarnessError::Parse { line: 1, .. })));
    }

    #[test]
    fn density_bounds_validated() {
        assert!(matches!(parse_config("rho_star = 0"), Err(HarnessError::Validation(_))));
        assert!(matches!(
            parse_config("rho_star = 2\nrho_upper = 1"),
            Err(HarnessError::Validation(_))
        ));
    }

    #[test]
    fn comments_lists_and_scientific() {
        let c = parse_config("pressure_tol = 1e-12 # tight\nsweep_scales = 8, 16\nn_cut = none\n").unwrap();
        assert_eq!(c.pressure_tol, 1e-12);
        assert_eq!(c.sweep_scales, vec![8, 16]);
        assert_eq!(c.n_cut, None);
    }
}
