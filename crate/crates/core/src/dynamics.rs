//! Coupled right-hand sides and classical RK4 time stepping.
//!
//! The primary unknowns are `(ρ, u)`, advanced as
//! `∂tρ = −u·∇ρ` and `∂tu = P[−(u·∇)u − (1/ρ)∇Π]`. The momentum vorticity `η` and the
//! striation field `X = ∇⊥ρ` are advanced by their own transport laws,
//! `∂tη = −u·∇η + ∂ₓu·u` and `∂tX = −(u·∇)X + ∂ₓu`, so the identities linking them to
//! `(ρ, u)` become a measure of discretization error.

use crate::error::DynamicsError;
use crate::field::{ScalarField, VectorField};
use crate::norms::Directional;
use crate::pressure::{advective_acceleration, pressure_acceleration, PressureSolver};
use crate::spectral::{
    curl2d, dealias, dealias_vector, exponential_filter, gradient, leray_project, perp_gradient,
};

/// Velocity floor in the CFL denominator.
pub const VELOCITY_FLOOR: f64 = 1e-8;
pub const BLOWUP_THRESHOLD: f64 = 1e6;
/// The step size is re-evaluated (shrink only) every this many steps.
pub const DT_REEVALUATION_PERIOD: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct FluidState {
    pub t: f64,
    pub rho: ScalarField,
    /// Full velocity; its mean is the separately evolving mean flow.
    pub u: VectorField,
    pub eta: ScalarField,
    pub x_field: VectorField,
    /// Pressure solved at time `t`.
    pub pi: ScalarField,
    /// `curl u`, refreshed after every step.
    pub omega: ScalarField,
}

/// `ρω + u·∇⊥ρ`, the momentum vorticity expressed through `(ρ, u)`.
pub fn momentum_vorticity(rho: &ScalarField, u: &VectorField) -> ScalarField {
    let omega = curl2d(u);
    let coupling = u.dot(&perp_gradient(rho));
    (rho * &omega).zip_map(&coupling, |a, b| a + b)
}

impl FluidState {
    /// Builds the state at `t = 0` with companions consistent by construction.
    pub fn initial(
        rho: ScalarField,
        u: VectorField,
        solver: &PressureSolver,
    ) -> Result<Self, DynamicsError> {
        let eta = momentum_vorticity(&rho, &u);
        let x_field = perp_gradient(&rho);
        let omega = curl2d(&u);
        let pi = solver.solve_pressure(&rho, &u, None)?.pi;
        Ok(Self { t: 0.0, rho, u, eta, x_field, pi, omega })
    }

    pub fn grid(&self) -> &crate::grid::Grid {
        self.rho.grid()
    }

    /// Momentum `m = ρu`.
    pub fn momentum(&self) -> VectorField {
        self.u.mul_scalar(&self.rho)
    }

    pub fn mean_velocity(&self) -> [f64; 2] {
        self.u.mean()
    }

    /// `∫ρ|u|²`.
    pub fn kinetic_energy(&self) -> f64 {
        (&self.rho * &self.u.dot(&self.u)).integral()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub dt_max: f64,
    /// Exponential filter strength; `0` disables filtering.
    pub filter_strength: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { cfl: 0.5, dt_max: 0.1, filter_strength: 0.0 }
    }
}

pub fn cfl_dt(s: &FluidState, ctl: &StepControl) -> f64 {
    let umax = s.u.max_abs().max(VELOCITY_FLOOR);
    ctl.dt_max.min(ctl.cfl * s.grid().spacing() / umax)
}

/// Time derivatives of every evolved field, plus the pressure solved on the way.
#[derive(Clone, Debug)]
pub struct Tendencies {
    pub rho: ScalarField,
    pub u: VectorField,
    pub eta: ScalarField,
    pub x_field: VectorField,
    pub pi: ScalarField,
}

pub fn tendencies(s: &FluidState, solver: &PressureSolver) -> Result<Tendencies, DynamicsError> {
    let u = &s.u;
    let rho_t = dealias(&u.dot(&gradient(&s.rho))).scale(-1.0);

    let accel = advective_acceleration(u);
    let rhs = crate::spectral::divergence(&accel);
    let pi = solver.solve_with_rhs(&s.rho, &rhs, Some(&s.pi))?.pi;
    let force = pressure_acceleration(&s.rho, &pi);
    let u_t = leray_project(&(&accel + &force).scale(-1.0));

    let dxu = u.along(&s.x_field);
    let eta_adv = dealias(&u.dot(&gradient(&s.eta)));
    let eta_src = dealias(&dxu.dot(u));
    let eta_t = &eta_src - &eta_adv;

    let x_adv = dealias_vector(&s.x_field.map_components(|c| u.dot(&gradient(c))));
    let x_t = &dealias_vector(&dxu) - &x_adv;

    Ok(Tendencies { rho: rho_t, u: u_t, eta: eta_t, x_field: x_t, pi })
}

fn stage(s: &FluidState, k: &Tendencies, a: f64) -> FluidState {
    FluidState {
        t: s.t + a,
        rho: s.rho.axpy(a, &k.rho),
        u: s.u.axpy(a, &k.u),
        eta: s.eta.axpy(a, &k.eta),
        x_field: s.x_field.axpy(a, &k.x_field),
        pi: k.pi.clone(),
        omega: s.omega.clone(),
    }
}

fn combine(a: &ScalarField, ks: [&ScalarField; 4], dt: f64) -> ScalarField {
    let w = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
    let mut out = a.values().to_vec();
    for (k, wk) in ks.iter().zip(w) {
        for (o, v) in out.iter_mut().zip(k.values()) {
            *o += wk * v;
        }
    }
    ScalarField::new(a.grid(), out)
}

fn combine_vec(a: &VectorField, ks: [&VectorField; 4], dt: f64) -> VectorField {
    VectorField::new(
        combine(&a.x, [&ks[0].x, &ks[1].x, &ks[2].x, &ks[3].x], dt),
        combine(&a.y, [&ks[0].y, &ks[1].y, &ks[2].y, &ks[3].y], dt),
    )
}

/// One classical RK4 step of length `dt`.
pub fn step_rk4_with_dt(
    s: &FluidState,
    dt: f64,
    filter_strength: f64,
    solver: &PressureSolver,
) -> Result<FluidState, DynamicsError> {
    let k1 = tendencies(s, solver)?;
    let k2 = tendencies(&stage(s, &k1, 0.5 * dt), solver)?;
    let k3 = tendencies(&stage(s, &k2, 0.5 * dt), solver)?;
    let k4 = tendencies(&stage(s, &k3, dt), solver)?;

    let filter = |f: ScalarField| exponential_filter(&f, filter_strength);
    let rho = filter(combine(&s.rho, [&k1.rho, &k2.rho, &k3.rho, &k4.rho], dt));
    let u = combine_vec(&s.u, [&k1.u, &k2.u, &k3.u, &k4.u], dt);
    let u = leray_project(&u.map_components(|c| filter(c.clone())));
    let eta = filter(combine(&s.eta, [&k1.eta, &k2.eta, &k3.eta, &k4.eta], dt));
    let x_field = combine_vec(&s.x_field, [&k1.x_field, &k2.x_field, &k3.x_field, &k4.x_field], dt)
        .map_components(|c| filter(c.clone()));

    let t = s.t + dt;
    let sup_u = u.max_abs();
    if !(sup_u <= BLOWUP_THRESHOLD) || !rho.is_finite() {
        return Err(DynamicsError::BlowupDetected { t, sup_u });
    }
    let pi = solver.solve_pressure(&rho, &u, Some(&k4.pi))?.pi;
    let omega = curl2d(&u);
    Ok(FluidState { t, rho, u, eta, x_field, pi, omega })
}

/// One RK4 step at the CFL-limited step size.
pub fn step_rk4(
    s: &FluidState,
    ctl: &StepControl,
    solver: &PressureSolver,
) -> Result<FluidState, DynamicsError> {
    step_rk4_with_dt(s, cfl_dt(s, ctl), ctl.filter_strength, solver)
}

/// `(‖η − ρω − u·∇⊥ρ‖∞, ‖X − ∇⊥ρ‖∞)`.
pub fn companion_residuals(s: &FluidState) -> (f64, f64) {
    let eta = (&s.eta - &momentum_vorticity(&s.rho, &s.u)).max_abs();
    let x = (&s.x_field - &perp_gradient(&s.rho)).max_abs();
    (eta, x)
}

/// A trajectory with the fixed-step schedule: `dt` is chosen at the start and
/// re-evaluated every [`DT_REEVALUATION_PERIOD`] steps, never growing.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub state: FluidState,
    pub control: StepControl,
    pub solver: PressureSolver,
    dt: f64,
    steps: usize,
}

impl Simulation {
    pub fn new(state: FluidState, control: StepControl, solver: PressureSolver) -> Self {
        let dt = cfl_dt(&state, &control);
        Self { state, control, solver, dt, steps: 0 }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size the schedule would use for the next step.
    pub fn scheduled_dt(&mut self) -> f64 {
        if self.steps > 0 && self.steps % DT_REEVALUATION_PERIOD == 0 {
            self.dt = self.dt.min(cfl_dt(&self.state, &self.control));
        }
        self.dt
    }

    /// Advances by exactly `dt`, bypassing the schedule (used for shared schedules).
    pub fn step_with(&mut self, dt: f64) -> Result<(), DynamicsError> {
        self.state =
            step_rk4_with_dt(&self.state, dt, self.control.filter_strength, &self.solver)?;
        self.steps += 1;
        Ok(())
    }

    /// Next step length toward `t_end`, or `None` once there.
    pub fn next_dt(&mut self, t_end: f64) -> Option<f64> {
        let remaining = t_end - self.state.t;
        if remaining <= 1e-12 * t_end.abs().max(1.0) {
            return None;
        }
        let dt = self.scheduled_dt();
        // Absorb a sliver into the last step rather than taking a tiny one.
        Some(if remaining <= dt * (1.0 + 1e-9) { remaining } else { dt })
    }

    /// Steps until `t_end`, landing on it exactly; `observe` sees every accepted state.
    pub fn advance_to(
        &mut self,
        t_end: f64,
        mut observe: impl FnMut(&FluidState),
    ) -> Result<(), DynamicsError> {
        while let Some(dt) = self.next_dt(t_end) {
            let last = dt == t_end - self.state.t;
            self.step_with(dt)?;
            if last {
                self.state.t = t_end;
            }
            observe(&self.state);
        }
        Ok(())
    }
}
