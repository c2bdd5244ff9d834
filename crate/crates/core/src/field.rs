//! Sampled scalar and vector fields with a lazily computed spectral representation.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use crate::grid::Grid;

/// Real field sampled on a [`Grid`], immutable once built.
///
/// The half spectrum is computed on first use and cached; fields built from a
/// spectrum keep those exact coefficients as their cache.
#[derive(Clone)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    spectral: OnceLock<Vec<Complex64>>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "sample count does not match grid");
        debug_assert!(values.iter().all(|v| v.is_finite()), "non-finite sample");
        Self { grid: grid.clone(), values, spectral: OnceLock::new() }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        Self::new(grid, grid.sample(f))
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn from_spectrum(grid: &Grid, spectrum: Vec<Complex64>) -> Self {
        assert_eq!(spectrum.len(), grid.spectral_len());
        let values = grid.inverse(&spectrum);
        let spectral = OnceLock::new();
        let _ = spectral.set(spectrum);
        Self { grid: grid.clone(), values, spectral }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Unnormalized half spectrum (see [`crate::grid`] for the layout).
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| self.grid.forward(&self.values))
    }

    pub fn has_cached_spectrum(&self) -> bool {
        self.spectral.get().is_some()
    }

    /// Builds a new field by rewriting every coefficient; the closure sees `(k₁, k₂, c)`.
    pub fn map_spectrum(&self, f: impl Fn(i64, i64, Complex64) -> Complex64) -> Self {
        let g = &self.grid;
        let n = g.n();
        let out = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(idx, &c)| f((idx / n) as i64, g.k2_of(idx % n), c))
            .collect();
        Self::from_spectrum(g, out)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid quadrature `∫ f` over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.grid == other.grid, "fields on different grids");
        Self::new(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self + s·other`, the RK stage update.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("n", &self.grid.n())
            .field("min", &self.min())
            .field("max", &self.max())
            .finish()
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a * b)
    }
}

/// Two-component field, both components on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Self {
        assert!(x.grid() == y.grid(), "vector components on different grids");
        Self { x, y }
    }

    pub fn from_fn(
        grid: &Grid,
        fx: impl Fn(f64, f64) -> f64 + Sync,
        fy: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Self {
        Self::new(ScalarField::from_fn(grid, fx), ScalarField::from_fn(grid, fy))
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn constant(grid: &Grid, c: [f64; 2]) -> Self {
        Self::new(ScalarField::constant(grid, c[0]), ScalarField::constant(grid, c[1]))
    }

    pub fn grid(&self) -> &Grid {
        self.x.grid()
    }

    pub fn mean(&self) -> [f64; 2] {
        [self.x.mean(), self.y.mean()]
    }

    /// Pointwise Euclidean length.
    pub fn magnitude(&self) -> ScalarField {
        self.x.zip_map(&self.y, |a, b| a.hypot(b))
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn dot(&self, other: &Self) -> ScalarField {
        let xx = &self.x * &other.x;
        xx.zip_map(&(&self.y * &other.y), |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x.scale(s), self.y.scale(s))
    }

    /// Multiplies both components by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Self {
        Self::new(&self.x * s, &self.y * s)
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self::new(self.x.axpy(s, &other.x), self.y.axpy(s, &other.y))
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new(f(&self.x), f(&self.y))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}
