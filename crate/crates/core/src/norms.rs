//! Lebesgue norms, sampled log-Lipschitz and Zygmund moduli, directional derivatives
//! and the exponent bookkeeping of the integrability chain.

use std::f64::consts::FRAC_1_SQRT_2;

use rustfft::num_complex::Complex64;

use crate::error::NormsError;
use crate::field::{ScalarField, VectorField};
use crate::spectral::{derivative, divergence, Axis, SpectralInterpolant};

/// Anything made of scalar components on one grid; norms use the pointwise
/// Euclidean length of the components.
pub trait Sampled {
    fn components(&self) -> Vec<&ScalarField>;
}

impl Sampled for ScalarField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl Sampled for VectorField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![&self.x, &self.y]
    }
}

fn pointwise_magnitude(f: &impl Sampled) -> Vec<f64> {
    let comps = f.components();
    let len = comps[0].values().len();
    (0..len)
        .map(|i| comps.iter().map(|c| c.values()[i].powi(2)).sum::<f64>().sqrt())
        .collect()
}

/// `(∫|f|ᵖ)^{1/p}` by grid quadrature; `p = ∞` is the grid maximum of `|f|`.
pub fn lp_norm(f: &impl Sampled, p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm needs p >= 1");
    let area = f.components()[0].grid().cell_area();
    let mags = pointwise_magnitude(f);
    if p.is_infinite() {
        return mags.iter().fold(0.0, |m, &v| m.max(v));
    }
    if p == 2.0 {
        return (mags.iter().map(|v| v * v).sum::<f64>() * area).sqrt();
    }
    (mags.iter().map(|v| v.powf(p)).sum::<f64>() * area).powf(1.0 / p)
}

/// Largest value of the trigonometric interpolant of `sign·f`, refined from the best
/// grid candidates by Newton iteration.
fn refined_extremum(f: &ScalarField, sign: f64) -> f64 {
    let g = f.grid();
    let n = g.n();
    let h = g.spacing();
    let vals = f.values();
    let at = |i: usize, j: usize| sign * vals[(j % n) * n + (i % n)];
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v = at(i, j);
            let is_peak = (0..3).all(|dj| (0..3).all(|di| at(i + n - 1 + di, j + n - 1 + dj) <= v));
            if is_peak {
                candidates.push((v, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(8);
    let grid_best = candidates.first().map_or(f64::NEG_INFINITY, |c| c.0);
    let interp = SpectralInterpolant::new(f);
    let mut best = grid_best;
    for &(v0, i, j) in &candidates {
        let (mut x1, mut x2) = (i as f64 * h, j as f64 * h);
        let (ox1, ox2) = (x1, x2);
        let mut value = v0;
        for _ in 0..30 {
            let (v, gr, he) = interp.eval_with_derivatives(x1, x2);
            let (v, g1, g2) = (sign * v, sign * gr[0], sign * gr[1]);
            let (a, b, c) = (sign * he[0], sign * he[1], sign * he[2]);
            value = v;
            let det = a * c - b * b;
            // Only trust Newton inside a concave neighbourhood of the candidate.
            if !(a < 0.0 && det > 0.0) {
                break;
            }
            let d1 = -(c * g1 - b * g2) / det;
            let d2 = -(a * g2 - b * g1) / det;
            x1 += d1;
            x2 += d2;
            if (x1 - ox1).abs() > 2.0 * h || (x2 - ox2).abs() > 2.0 * h {
                break;
            }
            if d1.abs().max(d2.abs()) < 1e-14 {
                value = sign * interp.eval(x1, x2);
                break;
            }
        }
        if (x1 - ox1).abs() <= 2.0 * h && (x2 - ox2).abs() <= 2.0 * h {
            best = best.max(value);
        }
    }
    best
}

/// `sup |f|` of the trigonometric interpolant: grid maximum refined to sub-grid accuracy.
pub fn sup_norm_refined(f: &ScalarField) -> f64 {
    refined_extremum(f, 1.0).max(refined_extremum(f, -1.0))
}

/// `(min f, max f)` of the trigonometric interpolant.
pub fn range_refined(f: &ScalarField) -> (f64, f64) {
    (-refined_extremum(f, -1.0), refined_extremum(f, 1.0))
}

/// How off-grid probe values `f(z + y)` are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Periodic bilinear interpolation of the samples.
    #[default]
    Bilinear,
    /// Exact shift of the trigonometric interpolant (one transform per offset).
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusReport {
    /// Supremum over the probe set (offsets, directions, grid points).
    pub seminorm: f64,
    /// `|y|` at which the supremum was attained.
    pub arg_offset: f64,
    /// Number of `(z, y)` probes evaluated.
    pub samples: usize,
}

const DIRECTIONS: [[f64; 2]; 4] = [
    [1.0, 0.0],
    [0.0, 1.0],
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
];

/// Dyadic offsets `2^{-j}`, `j = 1..J`, with `2^{-J} ≥ 2h` (at least one level).
pub fn dyadic_offsets(spacing: f64) -> Vec<f64> {
    let mut out = vec![0.5];
    let mut r = 0.25;
    while r >= 2.0 * spacing {
        out.push(r);
        r *= 0.5;
    }
    out
}

/// Values of `c(z + y)` at every grid point `z`.
fn shifted(c: &ScalarField, y: [f64; 2], mode: Interpolation) -> Vec<f64> {
    let g = c.grid();
    let n = g.n();
    let h = g.spacing();
    match mode {
        Interpolation::Bilinear => {
            let (s1, s2) = (y[0] / h, y[1] / h);
            let (f1, f2) = (s1.floor(), s2.floor());
            let (a, b) = (s1 - f1, s2 - f2);
            let n_i = n as i64;
            let o1 = (f1 as i64).rem_euclid(n_i) as usize;
            let o2 = (f2 as i64).rem_euclid(n_i) as usize;
            let v = c.values();
            let mut out = vec![0.0; n * n];
            for j in 0..n {
                let j0 = (j + o2) % n;
                let j1 = (j0 + 1) % n;
                for i in 0..n {
                    let i0 = (i + o1) % n;
                    let i1 = (i0 + 1) % n;
                    out[j * n + i] = (1.0 - a) * (1.0 - b) * v[j0 * n + i0]
                        + a * (1.0 - b) * v[j0 * n + i1]
                        + (1.0 - a) * b * v[j1 * n + i0]
                        + a * b * v[j1 * n + i1];
                }
            }
            out
        }
        Interpolation::Spectral => {
            let half = (n / 2) as i64;
            let shifted = c.map_spectrum(|k1, k2, z| {
                if k1 == half || k2 == -half {
                    Complex64::new(0.0, 0.0)
                } else {
                    z * Complex64::from_polar(1.0, k1 as f64 * y[0] + k2 as f64 * y[1])
                }
            });
            let nyq = c.map_spectrum(|k1, k2, z| {
                if k1 == half || k2 == -half {
                    z
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            // Nyquist content cannot be shifted in a real basis; keep it in place.
            shifted.values().iter().zip(nyq.values()).map(|(a, b)| a + b).collect()
        }
    }
}

fn modulus(
    f: &impl Sampled,
    mode: Interpolation,
    weight: impl Fn(f64) -> f64,
    second: bool,
) -> ModulusReport {
    let comps = f.components();
    let grid = comps[0].grid().clone();
    let base: Vec<&[f64]> = comps.iter().map(|c| c.values()).collect();
    let len = grid.len();
    let mut report = ModulusReport { seminorm: 0.0, arg_offset: 0.0, samples: 0 };
    for r in dyadic_offsets(grid.spacing()) {
        let w = weight(r);
        for d in DIRECTIONS {
            let y = [r * d[0], r * d[1]];
            let plus: Vec<Vec<f64>> = comps.iter().map(|c| shifted(c, y, mode)).collect();
            let minus: Vec<Vec<f64>> = if second {
                comps.iter().map(|c| shifted(c, [-y[0], -y[1]], mode)).collect()
            } else {
                Vec::new()
            };
            for z in 0..len {
                let mut acc = 0.0;
                for (k, b) in base.iter().enumerate() {
                    let diff = if second {
                        plus[k][z] + minus[k][z] - 2.0 * b[z]
                    } else {
                        plus[k][z] - b[z]
                    };
                    acc += diff * diff;
                }
                let q = acc.sqrt() / w;
                if q > report.seminorm {
                    report.seminorm = q;
                    report.arg_offset = r;
                }
            }
            report.samples += len;
        }
    }
    report
}

/// Sampled `sup |f(z+y) − f(z)| / (|y| log(1 + 1/|y|))` over `0 < |y| < 1`.
pub fn ll_modulus(f: &impl Sampled) -> ModulusReport {
    ll_modulus_with(f, Interpolation::Bilinear)
}

pub fn ll_modulus_with(f: &impl Sampled, mode: Interpolation) -> ModulusReport {
    modulus(f, mode, |r| r * (1.0 + 1.0 / r).ln(), false)
}

/// Sampled `sup |f(z+y) + f(z−y) − 2f(z)| / |y|` over `0 < |y| < 1`.
pub fn zygmund_modulus(f: &impl Sampled) -> ModulusReport {
    zygmund_modulus_with(f, Interpolation::Bilinear)
}

pub fn zygmund_modulus_with(f: &impl Sampled, mode: Interpolation) -> ModulusReport {
    modulus(f, mode, |r| r, true)
}

/// Fields that can be differentiated along a vector field, `∂ₓf = X·∇f`.
pub trait Directional: Sized {
    fn along(&self, x: &VectorField) -> Self;
    /// Weak form `div(X ⊗ f)`, equal to [`Directional::along`] when `div X = 0`.
    fn along_weak(&self, x: &VectorField) -> Self;
}

impl Directional for ScalarField {
    fn along(&self, x: &VectorField) -> Self {
        let d1 = derivative(self, Axis::X1);
        let d2 = derivative(self, Axis::X2);
        let a = &x.x * &d1;
        a.zip_map(&(&x.y * &d2), |p, q| p + q)
    }

    fn along_weak(&self, x: &VectorField) -> Self {
        divergence(&x.mul_scalar(self))
    }
}

impl Directional for VectorField {
    fn along(&self, x: &VectorField) -> Self {
        self.map_components(|c| c.along(x))
    }

    fn along_weak(&self, x: &VectorField) -> Self {
        self.map_components(|c| c.along_weak(x))
    }
}

pub fn directional_derivative<F: Directional>(x: &VectorField, u: &F) -> F {
    u.along(x)
}

/// Exponents tied to the integrability index `p₀ ∈ (2, 4]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentSet {
    pub p0: f64,
    /// `θ = 2/p₀`.
    pub theta: f64,
    /// `1/q₀ = 1/2 + 1/p₀`.
    pub q0: f64,
    /// `1/p₀ + 1/p₁ = 1/2`.
    pub p1: f64,
}

pub fn make_exponents(p0: f64) -> Result<ExponentSet, NormsError> {
    if !(p0 > 2.0 && p0 <= 4.0) {
        return Err(NormsError::OutOfRange(p0));
    }
    Ok(ExponentSet {
        p0,
        theta: 2.0 / p0,
        q0: 1.0 / (0.5 + 1.0 / p0),
        p1: 1.0 / (0.5 - 1.0 / p0),
    })
}
