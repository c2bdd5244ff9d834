use super::{InitialDatum, RunSettings};
use crate::dynamics::Simulation;
use crate::error::DynamicsError;
use crate::field::{ScalarField, VectorField};

/// Powers `p` whose envelopes `(K t)^p + E(0)` are reported.
pub const ENVELOPE_POWERS: [u32; 3] = [4, 8, 16];

/// `∫ ρ₁|u₁ − u₂|² + ∫ |ρ₁ − ρ₂|²`, weighted by the first trajectory's density.
pub fn energy_functional(
    rho1: &ScalarField,
    u1: &VectorField,
    rho2: &ScalarField,
    u2: &VectorField,
) -> f64 {
    let du = u1 - u2;
    let dr = rho1 - rho2;
    let kinetic = rho1.zip_map(&du.dot(&du), |r, w| r * w).integral();
    kinetic + dr.zip_map(&dr, |a, b| a * b).integral()
}

/// Perturbation of the second trajectory: `u + δ (0, sin(k x₁))` and
/// `ρ + δ_ρ sin(k x₂)`. Both velocity increments are divergence free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub delta: f64,
    pub mode: u32,
    pub density_delta: f64,
}

impl Perturbation {
    pub fn velocity(delta: f64) -> Self {
        Self { delta, mode: 1, density_delta: 0.0 }
    }

    pub fn apply(&self, datum: &InitialDatum) -> (ScalarField, VectorField) {
        let g = datum.rho.grid();
        let k = self.mode as f64;
        let mut u = datum.velocity();
        if self.delta != 0.0 {
            let d = self.delta;
            u.y = u.y.zip_map(&ScalarField::from_fn(g, |x, _| (k * x).sin()), |a, b| a + d * b);
        }
        let mut rho = datum.rho.clone();
        if self.density_delta != 0.0 {
            let d = self.density_delta;
            rho = rho.zip_map(&ScalarField::from_fn(g, |_, y| (k * y).sin()), |a, b| a + d * b);
        }
        (rho, u)
    }
}

#[derive(Clone, Debug)]
pub struct StabilityTrace {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Growth rate from a log-linear fit of `E` over the envelope window.
    pub fitted_k: f64,
    /// Upper end of the fitting window, `min(T, 1/(2K))`.
    pub window_end: f64,
    /// Whether `E(t) ≤ (K t)^p + E(0)` holds on the window, per [`ENVELOPE_POWERS`].
    pub envelope: [bool; 3],
}

impl StabilityTrace {
    pub fn sup_energy(&self) -> f64 {
        self.energy.iter().copied().fold(0.0, f64::max)
    }
}

// Least-squares slope of log E against t, using samples with 0 < t <= t_max.
fn log_slope(times: &[f64], energy: &[f64], t_max: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(energy)
        .filter(|(&t, &e)| t > 0.0 && t <= t_max && e > 0.0)
        .map(|(&t, &e)| (t, e.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (st, sl) = pts.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + t, b + l));
    let (mt, ml) = (st / n, sl / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, l) in &pts {
        num += (t - mt) * (l - ml);
        den += (t - mt) * (t - mt);
    }
    (den > 0.0).then(|| num / den)
}

fn fit_growth(times: &[f64], energy: &[f64], t_final: f64) -> (f64, f64) {
    let mut k = log_slope(times, energy, t_final).unwrap_or(0.0).max(0.0);
    let mut window = t_final;
    for _ in 0..4 {
        let w = if k > 0.0 { t_final.min(0.5 / k) } else { t_final };
        match log_slope(times, energy, w) {
            Some(s) => {
                k = s.max(0.0);
                window = w;
            }
            None => break,
        }
    }
    (k, window)
}

/// Runs the reference and perturbed trajectories in lockstep.
///
/// Both advance with the step sizes chosen for the reference, so `δ = 0`
/// reproduces the reference exactly.
pub fn twin_run(
    datum: &InitialDatum,
    perturbation: Perturbation,
    settings: &RunSettings,
) -> Result<StabilityTrace, DynamicsError> {
    let s1 = settings.initial_state(datum)?;
    let (rho2, u2) = perturbation.apply(datum);
    let s2 = crate::dynamics::FluidState::initial(rho2, u2, &settings.solver)?;
    let mut a = Simulation::new(s1, settings.control, settings.solver);
    let mut b = Simulation::new(s2, settings.control, settings.solver);
    let e = |a: &Simulation, b: &Simulation| {
        energy_functional(&a.state.rho, &a.state.u, &b.state.rho, &b.state.u)
    };
    let mut times = vec![0.0];
    let mut energy = vec![e(&a, &b)];
    let t_end = settings.t_final;
    while let Some(dt) = a.next_dt(t_end) {
        let last = dt == t_end - a.state.t;
        let (ra, rb) = rayon::join(|| a.step_with(dt), || b.step_with(dt));
        ra?;
        rb?;
        if last {
            a.state.t = t_end;
            b.state.t = t_end;
        }
        times.push(a.state.t);
        energy.push(e(&a, &b));
    }
    let (fitted_k, window_end) = fit_growth(&times, &energy, t_end);
    let e0 = energy[0];
    let mut envelope = [true; 3];
    for (flag, &p) in envelope.iter_mut().zip(&ENVELOPE_POWERS) {
        *flag = times
            .iter()
            .zip(&energy)
            .filter(|(&t, _)| t <= window_end)
            .all(|(&t, &en)| en <= (fitted_k * t).powi(p as i32) + e0 + 1e-14 * e0.max(1e-300));
    }
    Ok(StabilityTrace { times, energy, fitted_k, window_end, envelope })
}
