//! Initial data recipes and the frequency-cutoff regularisation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::DatumError;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::norms::lp_norm;
use crate::spectral::{biot_savart, spectral_cutoff};

#[derive(Clone, Debug, PartialEq)]
pub enum DensityProfile {
    Uniform { value: f64 },
    /// `ρ̄ + A sin x₁`.
    SineX1 { mean: f64, amp: f64 },
    /// `ρ̄ + A sin x₁ sin x₂`.
    SineProduct { mean: f64, amp: f64 },
    /// Sharp layers `ρ̄ + A tanh(sin(x₂)/w)`.
    TanhLayer { mean: f64, amp: f64, width: f64 },
    /// `ρ̄ + A φ/‖φ‖∞` with `φ̂(k) ∝ |k|^{−s}` and seeded random phases.
    PowerLaw { mean: f64, amp: f64, slope: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum VorticityProfile {
    Zero,
    /// `A cos x₁`, the stationary shear `u = (0, A sin x₁)`.
    Shear { amp: f64 },
    /// `−2A cos x₁ cos x₂`, the steady cellular flow `u = A(cos x₁ sin x₂, −sin x₁ cos x₂)`.
    TaylorGreen { amp: f64 },
    /// A fixed smooth combination of low modes.
    Multimode { amp: f64 },
    PowerLaw { amp: f64, slope: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatumRecipe {
    pub rho: DensityProfile,
    pub omega: VorticityProfile,
}

/// Sampled `(ρ₀, ω₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialDatum {
    pub rho: ScalarField,
    pub omega: ScalarField,
}

/// Recipe parameters with their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RecipeParams {
    pub rho_mean: f64,
    pub rho_amp: f64,
    pub omega_amp: f64,
    pub layer_width: f64,
    pub spectral_slope: f64,
    pub seed: u64,
}

impl Default for RecipeParams {
    fn default() -> Self {
        Self {
            rho_mean: 2.0,
            rho_amp: 1.0,
            omega_amp: 1.0,
            layer_width: 0.2,
            spectral_slope: 2.0,
            seed: 0,
        }
    }
}

pub const RECIPE_NAMES: &[&str] = &[
    "rest",
    "shear",
    "taylor_green_homogeneous",
    "multimode_homogeneous",
    "variable_density",
    "variable_shear",
    "tanh_layer",
    "power_law",
];

impl DatumRecipe {
    pub fn named(name: &str, p: &RecipeParams) -> Result<Self, DatumError> {
        use DensityProfile as D;
        use VorticityProfile as V;
        let (rho, omega) = match name {
            "rest" => (D::SineX1 { mean: p.rho_mean, amp: p.rho_amp }, V::Zero),
            "shear" => (D::Uniform { value: 1.0 }, V::Shear { amp: p.omega_amp }),
            "taylor_green_homogeneous" => {
                (D::Uniform { value: 1.0 }, V::TaylorGreen { amp: p.omega_amp })
            }
            "multimode_homogeneous" => {
                (D::Uniform { value: 1.0 }, V::Multimode { amp: p.omega_amp })
            }
            "variable_density" => (
                D::SineProduct { mean: p.rho_mean, amp: p.rho_amp },
                V::Multimode { amp: p.omega_amp },
            ),
            "variable_shear" => {
                (D::SineX1 { mean: p.rho_mean, amp: p.rho_amp }, V::Shear { amp: p.omega_amp })
            }
            "tanh_layer" => (
                D::TanhLayer { mean: p.rho_mean, amp: p.rho_amp, width: p.layer_width },
                V::TaylorGreen { amp: p.omega_amp },
            ),
            "power_law" => (
                D::PowerLaw {
                    mean: p.rho_mean,
                    amp: p.rho_amp,
                    slope: p.spectral_slope,
                    seed: p.seed,
                },
                V::PowerLaw { amp: p.omega_amp, slope: p.spectral_slope, seed: p.seed ^ 0x9e37 },
            ),
            other => return Err(DatumError::UnknownRecipe(other.to_string())),
        };
        Ok(Self { rho, omega })
    }

    pub fn sample(&self, grid: &Grid) -> InitialDatum {
        InitialDatum { rho: self.sample_rho(grid), omega: self.sample_omega(grid) }
    }

    fn sample_rho(&self, g: &Grid) -> ScalarField {
        match self.rho {
            DensityProfile::Uniform { value } => ScalarField::constant(g, value),
            DensityProfile::SineX1 { mean, amp } => {
                ScalarField::from_fn(g, |x, _| mean + amp * x.sin())
            }
            DensityProfile::SineProduct { mean, amp } => {
                ScalarField::from_fn(g, |x, y| mean + amp * x.sin() * y.sin())
            }
            DensityProfile::TanhLayer { mean, amp, width } => {
                ScalarField::from_fn(g, |_, y| mean + amp * (y.sin() / width).tanh())
            }
            DensityProfile::PowerLaw { mean, amp, slope, seed } => {
                let phi = power_law_field(g, slope, seed);
                let scale = amp / phi.max_abs();
                phi.map(|v| mean + scale * v)
            }
        }
    }

    fn sample_omega(&self, g: &Grid) -> ScalarField {
        match self.omega {
            VorticityProfile::Zero => ScalarField::zeros(g),
            VorticityProfile::Shear { amp } => ScalarField::from_fn(g, |x, _| amp * x.cos()),
            VorticityProfile::TaylorGreen { amp } => {
                ScalarField::from_fn(g, |x, y| -2.0 * amp * x.cos() * y.cos())
            }
            VorticityProfile::Multimode { amp } => ScalarField::from_fn(g, |x, y| {
                amp * (x.cos()
                    + 0.6 * (2.0 * y + 0.3).cos()
                    + 0.4 * (x + y).sin()
                    + 0.3 * (3.0 * x - 2.0 * y + 1.0).cos())
            }),
            VorticityProfile::PowerLaw { amp, slope, seed } => {
                let phi = power_law_field(g, slope, seed);
                let scale = amp / phi.max_abs();
                let m = phi.mean();
                phi.map(|v| scale * (v - m))
            }
        }
    }
}

/// Mean-zero field with `|φ̂(k)| = |k|^{−s}` on `1 ≤ |k|∞ < n/2` and random phases.
fn power_law_field(g: &Grid, slope: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let half = (n / 2) as i64;
    let mut spec = vec![Complex64::new(0.0, 0.0); g.spectral_len()];
    for (idx, c) in spec.iter_mut().enumerate() {
        let k1 = (idx / n) as i64;
        let k2 = g.k2_of(idx % n);
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        if k1.abs().max(k2.abs()) >= half || (k1 == 0 && k2 == 0) {
            continue;
        }
        let k = ((k1 * k1 + k2 * k2) as f64).sqrt();
        *c = Complex64::from_polar(k.powf(-slope), phase);
    }
    // The k₁ = 0 column is not forced Hermitian; keep the real part of the
    // synthesis and drop the cache so it is recomputed from the samples.
    ScalarField::new(g, ScalarField::from_spectrum(g, spec).into_values())
}

impl InitialDatum {
    /// Mean-zero velocity from the vorticity.
    pub fn velocity(&self) -> VectorField {
        biot_savart(&self.omega).expect("datum vorticity is mean-zero")
    }

    /// Checks `ρ★ − slack ≤ ρ₀ ≤ ρ* + slack`.
    pub fn check_admissible(
        &self,
        rho_star: f64,
        rho_upper: f64,
        slack: f64,
    ) -> Result<(), DatumError> {
        let (min, max) = (self.rho.min(), self.rho.max());
        if min < rho_star - slack || max > rho_upper + slack {
            return Err(DatumError::Inadmissible { min, max, rho_star, rho_upper });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierScale {
    /// `None` means no cutoff.
    pub n_cut: Option<usize>,
}

impl MollifierScale {
    pub fn new(n_cut: usize) -> Self {
        Self { n_cut: Some(n_cut) }
    }

    pub fn identity() -> Self {
        Self { n_cut: None }
    }

    /// `ε = 1/n_cut`.
    pub fn epsilon(&self) -> f64 {
        self.n_cut.map_or(0.0, |k| 1.0 / k as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MollifiedDatum {
    pub datum: InitialDatum,
    /// `‖ρ₀ − ρ₀ₙ‖∞`, the slack on the density bounds.
    pub rho_error: f64,
    /// `‖u₀ₙ − u₀‖₂`.
    pub velocity_l2_error: f64,
}

/// Sharp cutoff `|k|∞ ≤ n_cut` on `ρ₀ − mean` and `ω₀`; the density mean is kept.
pub fn mollify(datum: &InitialDatum, scale: MollifierScale) -> MollifiedDatum {
    let Some(n_cut) = scale.n_cut else {
        return MollifiedDatum { datum: datum.clone(), rho_error: 0.0, velocity_l2_error: 0.0 };
    };
    // Cutting the full field leaves the zero mode (the mean) untouched.
    let rho = spectral_cutoff(&datum.rho, n_cut);
    let omega = spectral_cutoff(&datum.omega, n_cut)
        .map_spectrum(|k1, k2, c| if k1 == 0 && k2 == 0 { c * 0.0 } else { c });
    let out = InitialDatum { rho, omega };
    let rho_error = (&datum.rho - &out.rho).max_abs();
    let velocity_l2_error = lp_norm(&(&datum.velocity() - &out.velocity()), 2.0);
    MollifiedDatum { datum: out, rho_error, velocity_l2_error }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RecipeParams {
        RecipeParams { rho_mean: 2.0, rho_amp: 0.5, ..Default::default() }
    }

    #[test]
    fn named_recipes_are_admissible() {
        let g = Grid::new(32).unwrap();
        for name in RECIPE_NAMES {
            let d = DatumRecipe::named(name, &params()).unwrap().sample(&g);
            d.check_admissible(1.0, 3.0, 0.0).unwrap();
            assert!(d.omega.mean().abs() < 1e-14, "{name}");
        }
        assert!(DatumRecipe::named("nope", &params()).is_err());
    }

    #[test]
    fn inadmissible_density_is_rejected() {
        let g = Grid::new(16).unwrap();
        let d = DatumRecipe::named("variable_density", &params()).unwrap().sample(&g);
        assert!(d.check_admissible(1.8, 2.2, 0.0).is_err());
    }

    #[test]
    fn mollify_identity_cases() {
        let g = Grid::new(32).unwrap();
        let d = DatumRecipe::named("variable_density", &params()).unwrap().sample(&g);
        let same = mollify(&d, MollifierScale::identity());
        assert_eq!(same.datum, d);
        let band = mollify(&d, MollifierScale::new(4));
        assert!((&band.datum.rho - &d.rho).max_abs() < 1e-14);
        assert!((&band.datum.omega - &d.omega).max_abs() < 1e-14);
    }

    #[test]
    fn mollify_is_a_bitwise_projection_preserving_means() {
        let g = Grid::new(64).unwrap();
        let d = DatumRecipe::named("tanh_layer", &params()).unwrap().sample(&g);
        let once = mollify(&d, MollifierScale::new(8));
        let twice = mollify(&once.datum, MollifierScale::new(8));
        assert_eq!(once.datum, twice.datum);
        assert!((once.datum.rho.mean() - d.rho.mean()).abs() < 1e-14);
        assert!(once.datum.omega.mean().abs() < 1e-15);
        assert!(once.rho_error > 0.0 && once.velocity_l2_error > 0.0);
    }

    #[test]
    fn power_law_is_seeded() {
        let g = Grid::new(32).unwrap();
        let p = RecipeParams { seed: 7, ..params() };
        let a = DatumRecipe::named("power_law", &p).unwrap().sample(&g);
        let b = DatumRecipe::named("power_law", &p).unwrap().sample(&g);
        assert_eq!(a, b);
        let c = DatumRecipe::named("power_law", &RecipeParams { seed: 8, ..p }).unwrap().sample(&g);
        assert_ne!(a, c);
    }
}
