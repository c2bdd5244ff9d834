//! Diagnostics time series as CSV, 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::HarnessError;

pub const COLUMNS: [&str; 14] = [
    "t",
    "energy",
    "lp_omega_2",
    "lp_omega_p0",
    "lp_omega_inf",
    "lp_eta_p0",
    "sup_u",
    "sup_grad_rho",
    "dxu_sup",
    "m_accum",
    "eta_identity_resid",
    "x_identity_resid",
    "pressure_l2",
    "div_u_sup",
];

pub fn format_row(r: &DiagnosticsRecord, p0: f64) -> String {
    let lp = |prof: &crate::diagnostics::LpProfile, p| prof.get(p).unwrap_or(f64::NAN);
    let vals = [
        r.t,
        r.energy,
        lp(&r.lp_omega, 2.0),
        lp(&r.lp_omega, p0),
        lp(&r.lp_omega, f64::INFINITY),
        lp(&r.lp_eta, p0),
        r.sup_u,
        r.sup_grad_rho,
        r.dxu_sup,
        r.m_accum,
        r.eta_identity_resid,
        r.x_identity_resid,
        r.pressure_l2,
        r.div_u_sup,
    ];
    let mut line = String::new();
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        write!(line, "{v:.16e}").unwrap();
    }
    line
}

pub fn format_diagnostics_csv(series: &[DiagnosticsRecord], p0: f64) -> Result<String, HarnessError> {
    if series.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in series {
        out.push_str(&format_row(r, p0));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_diagnostics_csv(
    series: &[DiagnosticsRecord],
    p0: f64,
    path: &Path,
) -> Result<(), HarnessError> {
    std::fs::write(path, format_diagnostics_csv(series, p0)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Diagnostics;
    use crate::dynamics::FluidState;
    use crate::pressure::PressureSolver;
    use crate::{Grid, ScalarField, VectorField};

    #[test]
    fn rest_state_row() {
        let g = Grid::new(16).unwrap();
        let s = FluidState::initial(
            ScalarField::constant(&g, 1.5),
            VectorField::zeros(&g),
            &PressureSolver::default(),
        )
        .unwrap();
        let rec = Diagnostics::new(4.0).unwrap().measure(&s, None);
        let text = format_diagnostics_csv(&[rec], 4.0).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), COLUMNS.len());
        let cells: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1], 0.0);
        assert_eq!(cells[9], 0.0);
        assert!(lines[1].contains("0.0000000000000000e0"));
    }

    #[test]
    fn empty_series_rejected() {
        assert!(matches!(format_diagnostics_csv(&[], 4.0), Err(HarnessError::EmptySeries)));
    }
}
