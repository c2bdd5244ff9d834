//! Variable-coefficient pressure problem `−div((1/ρ)∇Π) = div((u·∇)u)`.
//!
//! Solved by preconditioned conjugate gradients on mean-zero fields. The operator is
//! `DᵀaD` with the spectral gradient `D`, hence symmetric positive definite on the
//! complement of its four-mode kernel (constants and the Nyquist corners); the
//! preconditioner is the constant-coefficient inverse Laplacian on that complement.

use crate::error::PressureError;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::norms::lp_norm;
use crate::spectral::{dealias, derivative, divergence, gradient, laplacian, Axis};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// Right-hand sides must be mean-zero to this relative level.
const COMPATIBILITY_TOLERANCE: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct EllipticSolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    /// Mean-zero pressure.
    pub pi: ScalarField,
    /// Relative residual after each iteration.
    pub residual_history: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureSolver {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PressureSolver {
    fn default() -> Self {
        Self { tol: DEFAULT_TOLERANCE, max_iterations: DEFAULT_MAX_ITERATIONS }
    }
}

/// Dealiased `(u·∇)u`.
pub fn advective_acceleration(u: &VectorField) -> VectorField {
    let d1x = derivative(&u.x, Axis::X1);
    let d2x = derivative(&u.x, Axis::X2);
    let d1y = derivative(&u.y, Axis::X1);
    let d2y = derivative(&u.y, Axis::X2);
    let ax = (&u.x * &d1x).zip_map(&(&u.y * &d2x), |a, b| a + b);
    let ay = (&u.x * &d1y).zip_map(&(&u.y * &d2y), |a, b| a + b);
    VectorField::new(dealias(&ax), dealias(&ay))
}

/// `(1/ρ)∇Π`.
pub fn pressure_acceleration(rho: &ScalarField, pi: &ScalarField) -> VectorField {
    let inv = rho.map(|r| 1.0 / r);
    gradient(pi).mul_scalar(&inv)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Operator<'a> {
    grid: &'a Grid,
    coeff: ScalarField,
    precond_scale: f64,
}

impl Operator<'_> {
    fn apply(&self, p: &[f64]) -> Vec<f64> {
        let f = ScalarField::new(self.grid, p.to_vec());
        let flux = gradient(&f).mul_scalar(&self.coeff);
        divergence(&flux).scale(-1.0).into_values()
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let half = (self.grid.n() / 2) as i64;
        let f = ScalarField::new(self.grid, r.to_vec());
        let s = self.precond_scale;
        f.map_spectrum(|k1, k2, c| {
            let e1 = if k1 == half { 0.0 } else { k1 as f64 };
            let e2 = if k2 == -half { 0.0 } else { k2 as f64 };
            let kk = e1 * e1 + e2 * e2;
            if kk == 0.0 {
                c * 0.0
            } else {
                c * (s / kk)
            }
        })
        .into_values()
    }
}

impl PressureSolver {
    pub fn new(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    /// Solves for the pressure of velocity `u` in density `rho`.
    pub fn solve_pressure(
        &self,
        rho: &ScalarField,
        u: &VectorField,
        guess: Option<&ScalarField>,
    ) -> Result<EllipticSolveReport, PressureError> {
        let rhs = divergence(&advective_acceleration(u));
        self.solve_with_rhs(rho, &rhs, guess)
    }

    /// Solves `−div((1/ρ)∇Π) = rhs` for mean-zero `Π`.
    pub fn solve_with_rhs(
        &self,
        rho: &ScalarField,
        rhs: &ScalarField,
        guess: Option<&ScalarField>,
    ) -> Result<EllipticSolveReport, PressureError> {
        let grid = rho.grid();
        let min = rho.min();
        if !(min > 0.0) {
            return Err(PressureError::VacuumViolated { min });
        }
        let mean = rhs.mean();
        if mean.abs() > COMPATIBILITY_TOLERANCE * rhs.max_abs().max(1.0) {
            return Err(PressureError::Incompatible { mean });
        }
        let f: Vec<f64> = rhs.values().iter().map(|v| v - mean).collect();
        let f_norm = dot(&f, &f).sqrt();
        if f_norm == 0.0 {
            return Ok(EllipticSolveReport {
                iterations: 0,
                relative_residual: 0.0,
                pi: ScalarField::zeros(grid),
                residual_history: Vec::new(),
            });
        }
        // Harmonic mean of 1/ρ is 1/mean(ρ).
        let op = Operator { grid, coeff: rho.map(|r| 1.0 / r), precond_scale: rho.mean() };

        let mut x = match guess {
            Some(g) => {
                let m = g.mean();
                g.values().iter().map(|v| v - m).collect()
            }
            None => vec![0.0; grid.len()],
        };
        let mut history = Vec::new();
        let mut iterations = 0;
        let mut rel;
        loop {
            let ax = op.apply(&x);
            let mut r: Vec<f64> = f.iter().zip(&ax).map(|(a, b)| a - b).collect();
            rel = dot(&r, &r).sqrt() / f_norm;
            if rel <= self.tol || iterations >= self.max_iterations {
                break;
            }
            let mut z = op.precondition(&r);
            let mut p = z.clone();
            let mut rz = dot(&r, &z);
            while iterations < self.max_iterations {
                let ap = op.apply(&p);
                let alpha = rz / dot(&p, &ap);
                for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
                    *xi += alpha * pi;
                    *ri -= alpha * api;
                }
                iterations += 1;
                let rr = dot(&r, &r).sqrt() / f_norm;
                history.push(rr);
                if rr <= self.tol {
                    break;
                }
                z = op.precondition(&r);
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for (pi, zi) in p.iter_mut().zip(&z) {
                    *pi = zi + beta * *pi;
                }
            }
            // Loop back to confirm against the true residual (restart if drifted).
        }
        if rel > self.tol {
            return Err(PressureError::NoConvergence { iterations, residual: rel });
        }
        let m = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= m);
        Ok(EllipticSolveReport {
            iterations,
            relative_residual: rel,
            pi: ScalarField::new(grid, x),
            residual_history: history,
        })
    }
}

/// `solve_pressure` with the default iteration budget.
pub fn solve_pressure(
    rho: &ScalarField,
    u: &VectorField,
    tol: f64,
) -> Result<EllipticSolveReport, PressureError> {
    PressureSolver::new(tol).solve_pressure(rho, u, None)
}

/// `∇u:∇u = Σᵢⱼ ∂ᵢuʲ ∂ⱼuⁱ`.
pub fn velocity_gradient_contraction(u: &VectorField) -> ScalarField {
    let d1x = derivative(&u.x, Axis::X1);
    let d2x = derivative(&u.x, Axis::X2);
    let d1y = derivative(&u.y, Axis::X1);
    let d2y = derivative(&u.y, Axis::X2);
    let diag = (&d1x * &d1x).zip_map(&(&d2y * &d2y), |a, b| a + b);
    diag.zip_map(&(&d2x * &d1y), |a, b| a + 2.0 * b)
}

/// L² norm of the residual of `−ΔΠ = −(1/ρ)∇ρ·∇Π + ρ ∇u:∇u`.
pub fn laplacian_pressure_identity(rho: &ScalarField, u: &VectorField, pi: &ScalarField) -> f64 {
    let lhs = laplacian(pi).scale(-1.0);
    let grad_rho = gradient(rho);
    let grad_pi = gradient(pi);
    let coupling = grad_rho.dot(&grad_pi).zip_map(rho, |a, r| -a / r);
    let source = rho * &velocity_gradient_contraction(u);
    let residual = lhs.zip_map(&coupling, |a, b| a - b).zip_map(&source, |a, b| a - b);
    lp_norm(&residual, 2.0)
}

/// `C` in `‖∇Π‖₂ ≤ ρ*·C·‖(u·∇)u‖₂`, the empirical solve constant.
pub fn solve_constant(rho_upper: f64, u: &VectorField, pi: &ScalarField) -> f64 {
    let accel = lp_norm(&advective_acceleration(u), 2.0);
    if accel == 0.0 {
        return 0.0;
    }
    lp_norm(&gradient(pi), 2.0) / (rho_upper * accel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::inverse_laplacian;

    fn taylor_green(g: &Grid) -> VectorField {
        VectorField::from_fn(g, |x, y| x.cos() * y.sin(), |x, y| -x.sin() * y.cos())
    }

    #[test]
    fn zero_velocity_gives_zero_pressure() {
        let g = Grid::new(32).unwrap();
        let rho = ScalarField::from_fn(&g, |x, y| 2.0 + x.sin() * y.cos());
        let rep = solve_pressure(&rho, &VectorField::zeros(&g), 1e-10).unwrap();
        assert_eq!(rep.pi.max_abs(), 0.0);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn taylor_green_pressure() {
        // −ΔΠ = div((u·∇)u) = −(cos 2x₁ + cos 2x₂) ⇒ Π = −(cos 2x₁ + cos 2x₂)/4.
        let g = Grid::new(64).unwrap();
        let rho = ScalarField::constant(&g, 1.0);
        let u = taylor_green(&g);
        let rep = solve_pressure(&rho, &u, 1e-10).unwrap();
        let want = ScalarField::from_fn(&g, |x, y| -((2.0 * x).cos() + (2.0 * y).cos()) / 4.0);
        assert!((&rep.pi - &want).max_abs() < 1e-10);
        assert!(rep.pi.mean().abs() < 1e-12);
        assert!(laplacian_pressure_identity(&rho, &u, &want) <= 1e-8);
    }

    #[test]
    fn manufactured_variable_density() {
        // Π* = sin x₂, ρ = 2 + sin x₁ ⇒ −div((1/ρ)∇Π*) = sin x₂ / (2 + sin x₁).
        let g = Grid::new(64).unwrap();
        let rho = ScalarField::from_fn(&g, |x, _| 2.0 + x.sin());
        let rhs = ScalarField::from_fn(&g, |x, y| y.sin() / (2.0 + x.sin()));
        let rep = PressureSolver::new(1e-13).solve_with_rhs(&rho, &rhs, None).unwrap();
        let want = ScalarField::from_fn(&g, |_, y| y.sin());
        assert!((&rep.pi - &want).max_abs() < 1e-10, "{}", (&rep.pi - &want).max_abs());
        assert!(rep.iterations <= 100);
    }

    #[test]
    fn vacuum_and_budget_errors() {
        let g = Grid::new(16).unwrap();
        let rho = ScalarField::from_fn(&g, |x, _| x.sin());
        let u = taylor_green(&g);
        assert!(matches!(
            solve_pressure(&rho, &u, 1e-10),
            Err(PressureError::VacuumViolated { .. })
        ));
        let rho = ScalarField::from_fn(&g, |x, y| 1.0 + 0.9 * (x + y).sin());
        let tight = PressureSolver { tol: 1e-14, max_iterations: 2 };
        assert!(matches!(
            tight.solve_pressure(&rho, &u, None),
            Err(PressureError::NoConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn constant_density_matches_inverse_laplacian() {
        let g = Grid::new(32).unwrap();
        let c = 2.5;
        let rho = ScalarField::constant(&g, c);
        let u = VectorField::from_fn(
            &g,
            |x, y| (x + y).sin() + 0.3 * (2.0 * y).cos(),
            |x, y| -(x + y).sin() + 0.2 * x.cos(),
        );
        let u = crate::spectral::leray_project(&u);
        let rep = solve_pressure(&rho, &u, 1e-12).unwrap();
        let direct = inverse_laplacian(&divergence(&advective_acceleration(&u))).unwrap().scale(c);
        assert!((&rep.pi - &direct).max_abs() < 1e-11);
    }
}
