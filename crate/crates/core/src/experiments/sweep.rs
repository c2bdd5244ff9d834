use rayon::prelude::*;

use super::{mollify, InitialDatum, MollifierScale, RunSettings};
use crate::diagnostics::{dxu_time_norm, Diagnostics, DiagnosticsRecord};
use crate::dynamics::Simulation;
use crate::field::VectorField;
use crate::norms::lp_norm;

/// Outcome of one regularisation scale.
#[derive(Clone, Debug)]
pub struct ScaleResult {
    pub scale: MollifierScale,
    pub rho_error: f64,
    pub velocity_l2_error: f64,
    pub series: Vec<DiagnosticsRecord>,
    /// `M_n(T)`.
    pub m_final: f64,
    pub sup_grad_rho: f64,
    pub sup_eta_p0: f64,
    pub sup_u: f64,
    /// `‖∂ₓu‖_{L²(0,T; L∞)}` and `‖∂ₓu‖_{L∞(0,T; L∞)}`.
    pub dxu_time_l2: f64,
    pub dxu_time_linf: f64,
    /// Velocity at `t = 0` and at each checkpoint.
    pub checkpoints: Vec<(f64, VectorField)>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

impl Trend {
    /// Classifies a sequence, treating relative changes below `rel_tol` as flat.
    pub fn classify(values: &[f64], rel_tol: f64) -> Self {
        let mut up = false;
        let mut down = false;
        for w in values.windows(2) {
            let scale = w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE);
            let d = (w[1] - w[0]) / scale;
            if d > rel_tol {
                up = true;
            } else if d < -rel_tol {
                down = true;
            }
        }
        match (up, down) {
            (false, false) => Trend::Constant,
            (true, false) => Trend::Increasing,
            (false, true) => Trend::Decreasing,
            (true, true) => Trend::Mixed,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Trend::Constant => "constant",
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub scales: Vec<ScaleResult>,
    /// `sup_t ‖uₙ(t) − uₙ₊₁(t)‖₂` over the checkpoints, between consecutive scales.
    pub cauchy: Vec<f64>,
    pub m_trend: Trend,
}

fn run_scale(datum: &InitialDatum, scale: MollifierScale, settings: &RunSettings) -> ScaleResult {
    let moll = mollify(datum, scale);
    let diag = Diagnostics::new(settings.p0).expect("p0 validated by caller");
    let mut series = Vec::new();
    let mut checkpoints = Vec::new();
    let mut error = None;
    match settings.initial_state(&moll.datum) {
        Ok(state) => {
            series.push(diag.measure(&state, None));
            checkpoints.push((0.0, state.u.clone()));
            let mut sim = Simulation::new(state, settings.control, settings.solver);
            for k in 1..=settings.checkpoints {
                let t_k = settings.t_final * k as f64 / settings.checkpoints as f64;
                let res = sim.advance_to(t_k, |s| {
                    let rec = diag.measure(s, series.last());
                    series.push(rec);
                });
                if let Err(e) = res {
                    error = Some(e.to_string());
                    break;
                }
                checkpoints.push((t_k, sim.state.u.clone()));
            }
        }
        Err(e) => error = Some(e.to_string()),
    }
    let fold = |f: fn(&DiagnosticsRecord) -> f64| series.iter().map(f).fold(0.0, f64::max);
    let p0 = settings.p0;
    ScaleResult {
        scale,
        rho_error: moll.rho_error,
        velocity_l2_error: moll.velocity_l2_error,
        m_final: series.last().map_or(0.0, |r| r.m_accum),
        sup_grad_rho: fold(|r| r.sup_grad_rho),
        sup_eta_p0: series
            .iter()
            .map(|r| r.lp_eta.get(p0).unwrap_or(f64::NAN))
            .fold(0.0, f64::max),
        sup_u: fold(|r| r.sup_u),
        dxu_time_l2: dxu_time_norm(&series, 2.0),
        dxu_time_linf: dxu_time_norm(&series, f64::INFINITY),
        checkpoints,
        series,
        error,
    }
}

/// Runs the solver from every regularised datum on the common grid.
///
/// A failing scale keeps its partial series and error; the sweep continues.
pub fn regularization_sweep(
    datum: &InitialDatum,
    scales: &[MollifierScale],
    settings: &RunSettings,
) -> SweepReport {
    let results: Vec<ScaleResult> =
        scales.par_iter().map(|&s| run_scale(datum, s, settings)).collect();
    let cauchy = results
        .windows(2)
        .map(|w| {
            w[0].checkpoints
                .iter()
                .zip(&w[1].checkpoints)
                .map(|((_, a), (_, b))| lp_norm(&(a - b), 2.0))
                .fold(0.0, f64::max)
        })
        .collect();
    let ms: Vec<f64> = results.iter().map(|r| r.m_final).collect();
    SweepReport { m_trend: Trend::classify(&ms, 1e-9), scales: results, cauchy }
}
