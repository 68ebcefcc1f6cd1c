//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is singular or not positive definite at {point}")]
    SingularMetric { point: String },

    #[error("point {point} is outside the chart domain")]
    OutOfChart { point: String },

    #[error("curve grid too coarse: {got} samples, need at least {need}")]
    GridTooCoarse { got: usize, need: usize },

    #[error("point is not on the unit cotangent bundle: |r^2 - 1| = {deviation:.3e}")]
    NotOnUnitBundle { deviation: f64 },

    #[error("fiber argument is not tangential: g^-1(omega, p) = {inner:.3e}")]
    NonTangentialArgument { inner: f64 },

    #[error("missing derivative data for a horizontal differentiation direction")]
    MissingDerivative,

    #[error("adaptive step underflow at t = {t}: step {step:.3e} below minimum {min_step:.3e}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },

    #[error("integration left the chart at t = {t}; last valid state {state}")]
    LeftChart { t: f64, state: String },

    #[error("projected curve speed is degenerate: 1 - K = {value:.3e}")]
    DegenerateSpeed { value: f64 },

    #[error("unknown manifold id `{0}`")]
    UnknownManifold(String),

    #[error("manifold `{id}` failed registration checks: {detail}")]
    RegistrationFailed { id: String, detail: String },

    #[error("invalid configuration: {}", .0.join("; "))]
    ConfigInvalid(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn singular_metric(x: &nalgebra::DVector<f64>) -> Self {
        Error::SingularMetric {
            point: format_point(x),
        }
    }

    pub(crate) fn out_of_chart(x: &nalgebra::DVector<f64>) -> Self {
        Error::OutOfChart {
            point: format_point(x),
        }
    }
}

pub(crate) fn format_point(x: &nalgebra::DVector<f64>) -> String {
    let coords: Vec<String> = x.iter().map(|c| format!("{c:.6}")).collect();
    format!("({})", coords.join(", "))
}
