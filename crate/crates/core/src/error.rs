use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGrid(usize),
    #[error("inverse_laplacian: field mean {mean:e} exceeds solvability tolerance {tol:e}")]
    MeanNotZero { mean: f64, tol: f64 },
    #[error("fields live on different grids ({0} vs {1})")]
    GridMismatch(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormsError {
    #[error("make_exponents: p0 = {0} outside (2, 4]; the restriction p0 <= 4 is required")]
    OutOfRange(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PressureError {
    #[error("solve_pressure: no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("solve_pressure: vacuum, min(rho) = {min:e}")]
    VacuumViolated { min: f64 },
    #[error("solve_pressure: right-hand side has nonzero mean {mean:e}")]
    Incompatible { mean: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("tendencies: {0}")]
    Pressure(#[from] PressureError),
    #[error("step_rk4: blow-up detected at t = {t}: sup|u| = {sup_u:e}")]
    BlowupDetected { t: f64, sup_u: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatumError {
    #[error("datum: rho0 range [{min}, {max}] escapes admissible [{rho_star}, {rho_upper}]")]
    Inadmissible {
        min: f64,
        max: f64,
        rho_star: f64,
        rho_upper: f64,
    },
    #[error("datum: unknown recipe '{0}'")]
    UnknownRecipe(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse_config: line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("parse_config: invalid config: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("read_snapshot: format error: {0}")]
    Format(String),
    #[error("read_snapshot: grid mismatch, expected n = {expected}, file has n = {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error("emit_diagnostics_csv: empty series")]
    EmptySeries,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Norms(#[from] NormsError),
}
