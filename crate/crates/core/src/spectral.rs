//! Differential operators as Fourier multipliers on the periodic grid.
//!
//! Odd-order derivatives drop the Nyquist rows (`k₁ = n/2`, `k₂ = −n/2`), which keeps
//! every result real and makes gradient, divergence and the Leray projector
//! mutually consistent: the discrete `div ∘ ∇⊥` vanishes mode by mode.

use rustfft::num_complex::Complex64;

use crate::error::SpectralError;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative mean tolerance for torus Poisson solvability.
pub const MEAN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Wavenumbers as seen by first derivatives (Nyquist folded to zero).
#[inline]
fn effective(grid: &Grid, k1: i64, k2: i64) -> (f64, f64) {
    let half = (grid.n() / 2) as i64;
    let e1 = if k1 == half { 0.0 } else { k1 as f64 };
    let e2 = if k2 == -half { 0.0 } else { k2 as f64 };
    (e1, e2)
}

fn combine(
    a: &ScalarField,
    b: &ScalarField,
    f: impl Fn(f64, f64, Complex64, Complex64) -> Complex64,
) -> ScalarField {
    let g = a.grid();
    assert!(g == b.grid(), "fields on different grids");
    let n = g.n();
    let out = a
        .spectrum()
        .iter()
        .zip(b.spectrum())
        .enumerate()
        .map(|(idx, (&ca, &cb))| {
            let (e1, e2) = effective(g, (idx / n) as i64, g.k2_of(idx % n));
            f(e1, e2, ca, cb)
        })
        .collect();
    ScalarField::from_spectrum(g, out)
}

pub fn derivative(f: &ScalarField, axis: Axis) -> ScalarField {
    let g = f.grid().clone();
    f.map_spectrum(|k1, k2, c| {
        let (e1, e2) = effective(&g, k1, k2);
        match axis {
            Axis::X1 => I * e1 * c,
            Axis::X2 => I * e2 * c,
        }
    })
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::new(derivative(f, Axis::X1), derivative(f, Axis::X2))
}

/// `∇⊥f = (−∂₂f, ∂₁f)`.
pub fn perp_gradient(f: &ScalarField) -> VectorField {
    VectorField::new(derivative(f, Axis::X2).scale(-1.0), derivative(f, Axis::X1))
}

pub fn divergence(v: &VectorField) -> ScalarField {
    combine(&v.x, &v.y, |e1, e2, a, b| I * (e1 * a + e2 * b))
}

/// `∂₁v² − ∂₂v¹`.
pub fn curl2d(v: &VectorField) -> ScalarField {
    combine(&v.x, &v.y, |e1, e2, a, b| I * (e1 * b - e2 * a))
}

/// Spectral Laplacian `−|k|² f̂`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.map_spectrum(|k1, k2, c| -((k1 * k1 + k2 * k2) as f64) * c)
}

fn check_mean(f: &ScalarField) -> Result<(), SpectralError> {
    let mean = f.mean();
    let tol = MEAN_TOLERANCE * f.max_abs();
    if mean.abs() > tol {
        return Err(SpectralError::MeanNotZero { mean, tol });
    }
    Ok(())
}

/// Returns the mean-zero `ψ` with `−Δψ = f − mean(f)`.
pub fn inverse_laplacian(f: &ScalarField) -> Result<ScalarField, SpectralError> {
    check_mean(f)?;
    Ok(f.map_spectrum(|k1, k2, c| {
        let k2sum = (k1 * k1 + k2 * k2) as f64;
        if k2sum == 0.0 {
            ZERO
        } else {
            c / k2sum
        }
    }))
}

/// Mean-zero velocity `u = −∇⊥(−Δ)⁻¹ω`, applied as the multiplier `(i k₂, −i k₁)/|k|²`.
pub fn biot_savart(omega: &ScalarField) -> Result<VectorField, SpectralError> {
    let psi = inverse_laplacian(omega)?;
    Ok(perp_gradient(&psi).scale(-1.0))
}

/// Divergence-free part of `v`; the mean of `v` passes through unchanged.
pub fn leray_project(v: &VectorField) -> VectorField {
    let g = v.grid();
    let n = g.n();
    let len = g.spectral_len();
    let (sx, sy) = (v.x.spectrum(), v.y.spectrum());
    let mut px = Vec::with_capacity(len);
    let mut py = Vec::with_capacity(len);
    for idx in 0..len {
        let (e1, e2) = effective(g, (idx / n) as i64, g.k2_of(idx % n));
        let kk = e1 * e1 + e2 * e2;
        let (a, b) = (sx[idx], sy[idx]);
        if kk == 0.0 {
            px.push(a);
            py.push(b);
        } else {
            let proj = (e1 * a + e2 * b) / kk;
            px.push(a - e1 * proj);
            py.push(b - e2 * proj);
        }
    }
    VectorField::new(ScalarField::from_spectrum(g, px), ScalarField::from_spectrum(g, py))
}

/// Two-thirds rule: zeroes every coefficient with `max(|k₁|,|k₂|) > n/3`.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let n = f.grid().n() as i64;
    f.map_spectrum(|k1, k2, c| if 3 * k1.abs().max(k2.abs()) > n { ZERO } else { c })
}

pub fn dealias_vector(v: &VectorField) -> VectorField {
    v.map_components(dealias)
}

/// Order-36 exponential filter `exp(−α (|k|∞ / (n/2))³⁶)`; `α = 0` returns the input.
pub fn exponential_filter(f: &ScalarField, strength: f64) -> ScalarField {
    if strength == 0.0 {
        return f.clone();
    }
    let half = (f.grid().n() / 2) as f64;
    f.map_spectrum(|k1, k2, c| {
        let r = k1.abs().max(k2.abs()) as f64 / half;
        c * (-strength * r.powi(36)).exp()
    })
}

/// Sharp cutoff keeping `|k|∞ ≤ n_cut`.
pub fn spectral_cutoff(f: &ScalarField, n_cut: usize) -> ScalarField {
    let cut = n_cut as i64;
    f.map_spectrum(|k1, k2, c| if k1.abs().max(k2.abs()) > cut { ZERO } else { c })
}

/// `Σ_k |f̂_k|²` over the full spectrum with coefficients normalized by `n²`,
/// times the torus area: equals `∫ f²` by Parseval.
pub fn spectral_square_integral(f: &ScalarField) -> f64 {
    let g = f.grid();
    let n = g.n();
    let m = g.half_len();
    let norm = 1.0 / (n * n) as f64;
    let area = (2.0 * std::f64::consts::PI).powi(2);
    let mut total = 0.0;
    for (idx, c) in f.spectrum().iter().enumerate() {
        let a = idx / n;
        let w = if a == 0 || a == m - 1 { 1.0 } else { 2.0 };
        total += w * (c * norm).norm_sqr();
    }
    total * area
}

/// Trigonometric interpolant of a field, evaluable off the grid.
pub struct SpectralInterpolant {
    n: usize,
    coeffs: Vec<(f64, f64, Complex64)>,
}

impl SpectralInterpolant {
    pub fn new(f: &ScalarField) -> Self {
        let g = f.grid();
        let n = g.n();
        let m = g.half_len();
        let norm = 1.0 / (n * n) as f64;
        let mut coeffs = Vec::new();
        for (idx, &c) in f.spectrum().iter().enumerate() {
            let a = idx / n;
            let (k1, k2) = (a as i64, g.k2_of(idx % n));
            // Nyquist rows carry cos-only content; the implicit conjugates on the
            // k₁ = 0 and k₁ = n/2 columns are already stored explicitly.
            let w = if a == 0 || a == m - 1 { 1.0 } else { 2.0 };
            if c.norm() > 0.0 {
                coeffs.push((k1 as f64, k2 as f64, c * norm * w));
            }
        }
        Self { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Returns the value, gradient and Hessian `(f, [f₁, f₂], [f₁₁, f₁₂, f₂₂])` at a point.
    pub fn eval_with_derivatives(&self, x1: f64, x2: f64) -> (f64, [f64; 2], [f64; 3]) {
        let (mut v, mut g1, mut g2, mut h11, mut h12, mut h22) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &(k1, k2, c) in &self.coeffs {
            let phase = Complex64::from_polar(1.0, k1 * x1 + k2 * x2);
            let z = c * phase;
            // Re(c e^{iθ}) and its derivatives: θ-derivative is Re(i z) = −Im z.
            v += z.re;
            g1 -= k1 * z.im;
            g2 -= k2 * z.im;
            h11 -= k1 * k1 * z.re;
            h12 -= k1 * k2 * z.re;
            h22 -= k2 * k2 * z.re;
        }
        (v, [g1, g2], [h11, h12, h22])
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.eval_with_derivatives(x1, x2).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn derivative_single_mode() {
        let g = grid(64);
        let f = ScalarField::from_fn(&g, |x, _| x.sin());
        let d = derivative(&f, Axis::X1);
        assert!(max_diff(&d, &ScalarField::from_fn(&g, |x, _| x.cos())) < 1e-12);
    }

    #[test]
    fn derivative_of_constant_is_exactly_zero() {
        let g = grid(32);
        let d = derivative(&ScalarField::constant(&g, 3.7), Axis::X1);
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_mixed_mode() {
        let g = grid(64);
        let f = ScalarField::from_fn(&g, |x, y| x.sin() * y.cos());
        let d = derivative(&f, Axis::X2);
        let want = ScalarField::from_fn(&g, |x, y| -x.sin() * y.sin());
        assert!(max_diff(&d, &want) < 1e-12);
        assert!(d.mean().abs() < 1e-15);
    }

    #[test]
    fn perp_gradient_examples() {
        let g = grid(64);
        let v = perp_gradient(&ScalarField::from_fn(&g, |x, _| x.sin()));
        assert!(v.x.max_abs() < 1e-12);
        assert!(max_diff(&v.y, &ScalarField::from_fn(&g, |x, _| x.cos())) < 1e-12);

        let c = perp_gradient(&ScalarField::constant(&g, 2.0));
        assert_eq!(c.max_abs(), 0.0);

        let v = perp_gradient(&ScalarField::from_fn(&g, |x, y| x.sin() * y.sin()));
        assert!(max_diff(&v.x, &ScalarField::from_fn(&g, |x, y| -x.sin() * y.cos())) < 1e-12);
        assert!(max_diff(&v.y, &ScalarField::from_fn(&g, |x, y| x.cos() * y.sin())) < 1e-12);
        assert!(divergence(&v).max_abs() < 1e-12);
    }

    #[test]
    fn curl_examples() {
        let g = grid(64);
        let v = VectorField::from_fn(&g, |_, _| 0.0, |x, _| x.sin());
        assert!(max_diff(&curl2d(&v), &ScalarField::from_fn(&g, |x, _| x.cos())) < 1e-12);

        let grad = gradient(&ScalarField::from_fn(&g, |x, y| (x + 2.0 * y).sin() * y.cos()));
        assert!(curl2d(&grad).max_abs() < 1e-12);

        // curl ∇⊥ f = Δf with ∇⊥ = (−∂₂, ∂₁).
        let f = ScalarField::from_fn(&g, |x, y| x.sin() * y.sin());
        let c = curl2d(&perp_gradient(&f));
        assert!(max_diff(&c, &ScalarField::from_fn(&g, |x, y| -2.0 * x.sin() * y.sin())) < 1e-12);
    }

    #[test]
    fn inverse_laplacian_eigenfunctions() {
        let g = grid(64);
        let cases: [(fn(f64, f64) -> f64, fn(f64, f64) -> f64); 3] = [
            (|x, _| x.cos(), |x, _| x.cos()),
            (|x, y| 2.0 * x.sin() * y.sin(), |x, y| x.sin() * y.sin()),
            (|_, y| 4.0 * (2.0 * y).cos(), |_, y| (2.0 * y).cos()),
        ];
        for (f, want) in cases {
            let psi = inverse_laplacian(&ScalarField::from_fn(&g, f)).unwrap();
            assert!(max_diff(&psi, &ScalarField::from_fn(&g, want)) < 1e-12);
            assert!(psi.mean().abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_laplacian_rejects_mean() {
        let g = grid(16);
        let f = ScalarField::from_fn(&g, |x, _| 1.0 + x.cos());
        assert!(matches!(inverse_laplacian(&f), Err(SpectralError::MeanNotZero { .. })));
    }

    #[test]
    fn biot_savart_examples() {
        let g = grid(64);
        let u = biot_savart(&ScalarField::from_fn(&g, |x, _| x.cos())).unwrap();
        assert!(u.x.max_abs() < 1e-12);
        assert!(max_diff(&u.y, &ScalarField::from_fn(&g, |x, _| x.sin())) < 1e-12);

        assert_eq!(biot_savart(&ScalarField::zeros(&g)).unwrap().max_abs(), 0.0);

        // ψ = sin x₁ sin x₂, u = −∇⊥ψ = (sin x₁ cos x₂, −cos x₁ sin x₂).
        let omega = ScalarField::from_fn(&g, |x, y| 2.0 * x.sin() * y.sin());
        let u = biot_savart(&omega).unwrap();
        assert!(max_diff(&u.x, &ScalarField::from_fn(&g, |x, y| x.sin() * y.cos())) < 1e-12);
        assert!(max_diff(&u.y, &ScalarField::from_fn(&g, |x, y| -x.cos() * y.sin())) < 1e-12);
        assert!(max_diff(&curl2d(&u), &omega) < 1e-10);
        assert!(divergence(&u).max_abs() < 1e-12);
    }

    #[test]
    fn leray_examples() {
        let g = grid(32);
        let grad = VectorField::from_fn(&g, |x, _| x.cos(), |_, _| 0.0);
        let shifted = &grad + &VectorField::constant(&g, [0.25, -0.5]);
        let p = leray_project(&shifted);
        assert!((p.x.values()[0] - 0.25).abs() < 1e-14);
        assert!((&p - &VectorField::constant(&g, [0.25, -0.5])).max_abs() < 1e-13);

        let sol = VectorField::from_fn(&g, |_, _| 0.0, |x, _| x.sin());
        assert!((&leray_project(&sol) - &sol).max_abs() < 1e-12);

        let mixed = VectorField::from_fn(&g, |x, _| x.sin(), |x, _| x.sin());
        assert!((&leray_project(&mixed) - &sol).max_abs() < 1e-12);
    }

    #[test]
    fn dealias_examples() {
        let g = grid(32);
        let low = ScalarField::from_fn(&g, |x, y| (8.0 * x).cos() + (3.0 * x - 8.0 * y).sin());
        assert!(max_diff(&dealias(&low), &low) < 1e-14);

        let high = ScalarField::from_fn(&g, |x, _| (15.0 * x).cos());
        assert!(dealias(&high).max_abs() < 1e-14);

        let both = ScalarField::from_fn(&g, |x, _| x.cos() + (15.0 * x).sin());
        assert!(max_diff(&dealias(&both), &ScalarField::from_fn(&g, |x, _| x.cos())) < 1e-14);
    }

    #[test]
    fn parseval_single_mode() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x, y| (3.0 * x + y).cos() + 0.5);
        let quad = (&f * &f).integral();
        // ∫cos² + ∫0.25 = (2π)²(1/2 + 1/4).
        assert!((quad - 0.75 * (2.0 * PI).powi(2)).abs() < 1e-10);
        assert!((spectral_square_integral(&f) - quad).abs() < 1e-10 * quad);
    }

    #[test]
    fn filter_zero_strength_is_identity_and_damps_top_modes() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x, y| x.cos() + (15.0 * y).cos());
        assert_eq!(exponential_filter(&f, 0.0), f);
        let damped = exponential_filter(&f, 36.0);
        let low = ScalarField::from_fn(&g, |x, _| x.cos());
        assert!(max_diff(&damped, &low) < 0.2);
        assert!(max_diff(&damped, &low) > 1e-3);
    }

    #[test]
    fn interpolant_reproduces_grid_and_off_grid_values() {
        let g = grid(16);
        let exact = |x: f64, y: f64| (2.0 * x - y).sin() + 0.5 * (x + 3.0 * y).cos() + (8.0 * x).cos();
        let f = ScalarField::from_fn(&g, exact);
        let it = SpectralInterpolant::new(&f);
        for &(x, y) in &[(0.0, 0.0), (0.3, 1.7), (5.1, 2.2)] {
            // The Nyquist mode cos(8x₁) is only represented at grid points.
            let lowpart = exact(x, y) - (8.0 * x).cos();
            let (v, grad, _) = it.eval_with_derivatives(x, y);
            let interp_low = v - (8.0 * x).cos();
            assert!((interp_low - lowpart).abs() < 1e-12, "{v} vs {}", exact(x, y));
            let dx = 2.0 * (2.0 * x - y).cos() - 0.5 * (x + 3.0 * y).sin() - 8.0 * (8.0 * x).sin();
            assert!((grad[0] - dx).abs() < 1e-11);
        }
    }
}
