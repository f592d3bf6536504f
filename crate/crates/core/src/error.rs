use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure carries a stable, machine-parseable reason code (see [`Error::code`]).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is singular (det = {0:e})")]
    Degenerate(f64),
    #[error("monodromy has an eigenvalue on the unit circle (|lambda| = {0})")]
    EigenvalueOnUnitCircle(f64),
    #[error("monodromy is parabolic (repeated eigenvalue, trace = {0})")]
    Parabolic(String),
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("curve parameter is not strictly increasing at sample {0}")]
    NonmonotoneParam(usize),
    #[error("curve is not admissible: {0}")]
    Inadmissible(String),
    #[error("winding number is not integral (residual {residual:.3e}, raw {raw})")]
    NonIntegral { raw: f64, residual: f64 },
    #[error("integration step too large: det drift {0:e} in one step")]
    StepTooLarge(f64),
    #[error("sample {0} projects to infinity")]
    ProjectionAtInfinity(usize),
    #[error("field under-resolved: {0:.3}% of spectral energy above 2/3 Nyquist")]
    Resolution(f64),
    #[error("time step underflow: dt = {dt:e} below dt_min at t = {t}")]
    DtUnderflow { t: f64, dt: f64 },
    #[error("invariant length density lost positivity at t = {t} (min rho = {min_rho:e})")]
    RhoNonpositive { t: f64, min_rho: f64 },
    #[error("non-finite values in state at t = {0}")]
    NonFinite(f64),
    #[error("values must be positive on the fit window: {0}")]
    NonpositiveValues(String),
    #[error("no loxodrome found in the monodromy class: {0}")]
    NoMatch(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Degenerate(_) => "DEGENERATE",
            Error::EigenvalueOnUnitCircle(_) => "EIGENVALUE_ON_UNIT_CIRCLE",
            Error::Parabolic(_) => "PARABOLIC",
            Error::TooFewSamples(_) => "TOO_FEW_SAMPLES",
            Error::NonmonotoneParam(_) => "NONMONOTONE_PARAM",
            Error::Inadmissible(_) => "INADMISSIBLE",
            Error::NonIntegral { .. } => "NONINTEGRAL",
            Error::StepTooLarge(_) => "STEP_TOO_LARGE",
            Error::ProjectionAtInfinity(_) => "PROJECTION_AT_INFINITY",
            Error::Resolution(_) => "RESOLUTION",
            Error::DtUnderflow { .. } => "DT_UNDERFLOW",
            Error::RhoNonpositive { .. } => "RHO_NONPOSITIVE",
            Error::NonFinite(_) => "NON_FINITE",
            Error::NonpositiveValues(_) => "NONPOSITIVE_VALUES",
            Error::NoMatch(_) => "NO_MATCH",
            Error::Inconsistent(_) => "INCONSISTENT",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::Config(_) => "CONFIG",
            Error::Io(_) => "IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
