use thiserror::Error;

/// Errors raised by the orbit determination pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line of sight too close to a celestial pole (|cos δ| = {cos_delta:e})")]
    PolarSingularity { cos_delta: f64 },

    #[error("orbit is not bound (specific energy {energy} km²/s²)")]
    HyperbolicOrbit { energy: f64 },

    #[error("angular momentum vanishes; orbit plane undefined")]
    DegenerateAngularMomentum,

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("object below the horizon at MJD {mjd}")]
    BelowHorizon { mjd: f64 },

    #[error("track has {n} observations, at least {min} required")]
    TooFewObservations { n: usize, min: usize },

    #[error("radial equation gives η² = {eta_sq:e} < 0")]
    NegativeEtaSquared { eta_sq: f64 },

    #[error("infeasible Lambert geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("chord passes within tolerance of a focus; Lambert branch is ambiguous")]
    AmbiguousRegion,

    #[error("singular geometry: |det| = {det:e} below threshold {threshold:e}")]
    SingularGeometry { det: f64, threshold: f64 },

    #[error("energy equation has no real root (discriminant {discriminant:e})")]
    NoRealRoot { discriminant: f64 },

    #[error("Newton iteration did not converge in {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, trace: Vec<f64> },

    #[error("Newton Jacobian is singular")]
    JacobianSingular,

    #[error("angle corrections left the small-angle guard band (|Δ| = {max_abs:e} rad)")]
    DeltaOutOfRange { max_abs: f64 },

    #[error("no candidate (revolutions, branch) pair for the Lambert equation")]
    NoBranch,

    #[error("observation epochs coincide")]
    DegenerateTimes,

    #[error("positions are collinear; the orbit plane is not unique")]
    CollinearPositions,

    #[error("line of sight cannot be rotated onto the plane (ρ = {rho}, |q cos θ| = {q_cos_theta})")]
    InfeasibleCorrection { rho: f64, q_cos_theta: f64 },

    #[error("line of sight is parallel to the plane normal")]
    ParallelToNormal,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable identifier used in reports to group failures.
    pub fn class(&self) -> &'static str {
        match self {
            Error::PolarSingularity { .. } => "polar_singularity",
            Error::HyperbolicOrbit { .. } => "hyperbolic_orbit",
            Error::DegenerateAngularMomentum => "degenerate_angular_momentum",
            Error::NonConvergence { .. } => "non_convergence",
            Error::BelowHorizon { .. } => "below_horizon",
            Error::TooFewObservations { .. } => "too_few_observations",
            Error::NegativeEtaSquared { .. } => "negative_eta_squared",
            Error::InfeasibleGeometry(_) => "infeasible_geometry",
            Error::AmbiguousRegion => "ambiguous_region",
            Error::SingularGeometry { .. } => "singular_geometry",
            Error::NoRealRoot { .. } => "no_real_root",
            Error::NoConvergence { .. } => "no_convergence",
            Error::JacobianSingular => "jacobian_singular",
            Error::DeltaOutOfRange { .. } => "delta_out_of_range",
            Error::NoBranch => "no_branch",
            Error::DegenerateTimes => "degenerate_times",
            Error::CollinearPositions => "collinear_positions",
            Error::InfeasibleCorrection { .. } => "infeasible_correction",
            Error::ParallelToNormal => "parallel_to_normal",
            Error::InvalidInput(_) => "invalid_input",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
