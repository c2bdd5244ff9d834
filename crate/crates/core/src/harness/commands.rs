//! The operations behind each CLI subcommand.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::RunConfig;
use super::csv::{emit_diagnostics_csv, format_diagnostics_csv};
use super::snapshot::{read_snapshot, write_snapshot};
use crate::diagnostics::{Diagnostics, DiagnosticsRecord};
use crate::dynamics::{FluidState, Simulation};
use crate::error::HarnessError;
use crate::experiments::{
    mollify, regularization_sweep, twin_run, MollifiedDatum, MollifierScale, Perturbation,
    StabilityTrace,
};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

#[derive(Debug)]
pub struct RunOutcome {
    /// Emitted rows: the initial state, every `diagnostics_cadence` steps, and the end.
    pub series: Vec<DiagnosticsRecord>,
    pub final_state: FluidState,
    pub steps: usize,
    pub csv_path: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

/// Samples the configured recipe and applies `scale`, checking the density
/// bounds before and after (the latter with the cutoff's slack).
pub fn prepare_datum(cfg: &RunConfig, scale: MollifierScale) -> Result<MollifiedDatum, HarnessError> {
    let datum = cfg.recipe().sample(&cfg.grid());
    datum.check_admissible(cfg.rho_star, cfg.rho_upper, 0.0)?;
    let moll = mollify(&datum, scale);
    moll.datum.check_admissible(cfg.rho_star, cfg.rho_upper, moll.rho_error * (1.0 + 1e-12))?;
    Ok(moll)
}

fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("snapshot_{step:06}.ydvl"))
}

/// `run <config>`: one trajectory, with diagnostics and snapshots at the configured cadences.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    let moll = prepare_datum(cfg, cfg.scale())?;
    let settings = cfg.settings();
    let diag = Diagnostics::new(cfg.p0)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;

    let state = settings.initial_state(&moll.datum)?;
    let mut snapshots = vec![snapshot_path(dir, 0)];
    write_snapshot(&state, &snapshots[0])?;
    let mut last = diag.measure(&state, None);
    let mut series = vec![last.clone()];
    let mut sim = Simulation::new(state, settings.control, settings.solver);
    let t_end = cfg.t_final;
    while let Some(dt) = sim.next_dt(t_end) {
        let finishing = dt == t_end - sim.state.t;
        sim.step_with(dt)?;
        if finishing {
            sim.state.t = t_end;
        }
        // M(t) accumulates over every step; only cadence rows are kept.
        last = diag.measure(&sim.state, Some(&last));
        let step = sim.steps();
        if step % cfg.diagnostics_cadence == 0 || finishing {
            series.push(last.clone());
        }
        if step % cfg.snapshot_cadence == 0 || finishing {
            let p = snapshot_path(dir, step);
            write_snapshot(&sim.state, &p)?;
            snapshots.push(p);
        }
    }
    let csv_path = dir.join(DIAGNOSTICS_FILE);
    emit_diagnostics_csv(&series, cfg.p0, &csv_path)?;
    Ok(RunOutcome { series, steps: sim.steps(), final_state: sim.state, csv_path, snapshots })
}

/// `diagnose <snapshot...>`: diagnostics CSV text for snapshots taken in time order.
pub fn diagnose(paths: &[PathBuf], p0: f64) -> Result<String, HarnessError> {
    let mut states = Vec::with_capacity(paths.len());
    for p in paths {
        let expected = states.first().map(|s: &FluidState| s.grid().clone());
        states.push(read_snapshot(p, expected.as_ref())?);
    }
    let series = Diagnostics::new(p0)?.measure_series(&states);
    format_diagnostics_csv(&series, p0)
}

fn fmt_e(v: f64) -> String {
    format!("{v:.16e}")
}

/// `sweep <config>`: the regularisation sweep over `sweep_scales`. Returns the summary text.
pub fn sweep(cfg: &RunConfig) -> Result<String, HarnessError> {
    let datum = cfg.recipe().sample(&cfg.grid());
    datum.check_admissible(cfg.rho_star, cfg.rho_upper, 0.0)?;
    let scales: Vec<MollifierScale> = cfg.sweep_scales.iter().map(|&k| MollifierScale::new(k)).collect();
    for &s in &scales {
        let m = mollify(&datum, s);
        m.datum.check_admissible(cfg.rho_star, cfg.rho_upper, m.rho_error * (1.0 + 1e-12))?;
    }
    let report = regularization_sweep(&datum, &scales, &cfg.settings());
    fs::create_dir_all(&cfg.output_dir)?;

    let mut out = String::from(
        "n_cut,epsilon,rho_error,velocity_l2_error,m_final,growth_factor,sup_grad_rho,sup_eta_p0,sup_u,dxu_time_l2,dxu_time_linf,cauchy_next,error\n",
    );
    for (i, r) in report.scales.iter().enumerate() {
        let k = r.scale.n_cut.unwrap_or(0);
        if !r.series.is_empty() {
            emit_diagnostics_csv(&r.series, cfg.p0, &cfg.output_dir.join(format!("sweep_ncut{k}.csv")))?;
        }
        let cauchy = report.cauchy.get(i).map_or(String::new(), |&c| fmt_e(c));
        let cells = [
            r.scale.epsilon(),
            r.rho_error,
            r.velocity_l2_error,
            r.m_final,
            r.m_final.exp(),
            r.sup_grad_rho,
            r.sup_eta_p0,
            r.sup_u,
            r.dxu_time_l2,
            r.dxu_time_linf,
        ]
        .map(fmt_e)
        .join(",");
        let err = r.error.as_deref().unwrap_or("").replace(',', ";");
        writeln!(out, "{k},{cells},{cauchy},{err}").unwrap();
    }
    fs::write(cfg.output_dir.join("sweep.csv"), &out)?;
    writeln!(out, "# m_trend = {}", report.m_trend.as_str()).unwrap();
    Ok(out)
}

/// `twin <config> --delta <list>`: one stability trace per amplitude. Returns the summary text.
pub fn twin(cfg: &RunConfig, deltas: &[f64]) -> Result<(String, Vec<StabilityTrace>), HarnessError> {
    let moll = prepare_datum(cfg, cfg.scale())?;
    let settings = cfg.settings();
    let traces: Vec<StabilityTrace> = deltas
        .par_iter()
        .map(|&delta| {
            let p = Perturbation { delta, mode: cfg.twin_mode, density_delta: cfg.twin_density_delta };
            twin_run(&moll.datum, p, &settings)
        })
        .collect::<Result<_, _>>()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let mut out = String::from("delta,e0,sup_e,fitted_k,window_end,envelope_4,envelope_8,envelope_16\n");
    for (i, (d, tr)) in deltas.iter().zip(&traces).enumerate() {
        let mut rows = String::from("t,energy\n");
        for (t, e) in tr.times.iter().zip(&tr.energy) {
            writeln!(rows, "{},{}", fmt_e(*t), fmt_e(*e)).unwrap();
        }
        fs::write(cfg.output_dir.join(format!("twin_{i}.csv")), rows)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_e(*d),
            fmt_e(tr.energy[0]),
            fmt_e(tr.sup_energy()),
            fmt_e(tr.fitted_k),
            fmt_e(tr.window_end),
            tr.envelope[0],
            tr.envelope[1],
            tr.envelope[2]
        )
        .unwrap();
    }
    fs::write(cfg.output_dir.join("twin.csv"), &out)?;
    Ok((out, traces))
}

/// `mollify <config> --ncut <k>`: writes the regularised initial state and reports the errors.
pub fn mollify_datum(cfg: &RunConfig, n_cut: usize) -> Result<String, HarnessError> {
    if n_cut == 0 {
        return Err(HarnessError::Validation("n_cut must be at least 1".into()));
    }
    let scale = MollifierScale::new(n_cut);
    let moll = prepare_datum(cfg, scale)?;
    let state = cfg.settings().initial_state(&moll.datum)?;
    fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(format!("mollified_ncut{n_cut}.ydvl"));
    write_snapshot(&state, &path)?;
    Ok(format!(
        "n_cut = {n_cut}\nepsilon = {}\nrho_error = {}\nvelocity_l2_error = {}\nrho_range = [{}, {}]\nsnapshot = {}\n",
        fmt_e(scale.epsilon()),
        fmt_e(moll.rho_error),
        fmt_e(moll.velocity_l2_error),
        fmt_e(moll.datum.rho.min()),
        fmt_e(moll.datum.rho.max()),
        path.display()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    fn cfg(dir: &Path, extra: &str) -> RunConfig {
        parse_config(&format!(
            "grid_n = 16\nT_final = 0.05\nrecipe = variable_density\noutput_dir = {}\ndiagnostics_cadence = 2\nsnapshot_cadence = 3\n{extra}",
            dir.display()
        ))
        .unwrap()
    }

    #[test]
    fn run_writes_csv_and_snapshots() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path(), "");
        let out = run(&c).unwrap();
        assert!(out.csv_path.exists());
        assert!(out.series.len() >= 2);
        assert_eq!(out.series.last().unwrap().t, 0.05);
        assert!(out.series.windows(2).all(|w| w[1].m_accum >= w[0].m_accum));
        let text = diagnose(&out.snapshots, 4.0).unwrap();
        assert_eq!(text.lines().count(), out.snapshots.len() + 1);
    }

    #[test]
    fn mollify_and_twin_commands() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path(), "");
        let text = mollify_datum(&c, 4).unwrap();
        assert!(text.contains("rho_error"));
        let (summary, traces) = twin(&c, &[0.0, 1e-3]).unwrap();
        assert_eq!(summary.lines().count(), 3);
        assert!(traces[0].energy.iter().all(|&e| e == 0.0));
    }
}
