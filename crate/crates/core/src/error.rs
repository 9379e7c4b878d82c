use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unstable model: largest eigenvalue real part is {max_real:e}")]
    UnstableModel { max_real: f64 },

    #[error("A + i*omega*I is numerically singular at omega = {omega} (condition estimate {condition:e})")]
    SingularAtFrequency { omega: f64, condition: f64 },

    #[error("parametric divergence 1 - g^2 chi_a chi_delta = 0 at omega = {omega}")]
    ParametricDivergence { omega: f64 },

    #[error(
        "force is invisible in the readout quadrature at omega = {omega} (|d^T v| = {norm:e})"
    )]
    ZeroResponse { omega: f64, norm: f64 },

    #[error("mechanical susceptibility is singular at omega = {omega}")]
    MechanicalResonanceSingularity { omega: f64 },

    #[error("|chi_qx| vanishes at omega = {omega}")]
    ZeroResponseSusceptibility { omega: f64 },

    #[error("coupling strength g is zero")]
    ZeroCoupling,

    #[error("degenerate readout: C = g sqrt(gamma) (r + xi Delta) vanishes at omega = {omega}")]
    DegenerateReadout { omega: f64 },

    #[error("feedback transform is singular at omega = 0")]
    ZeroFrequencyFeedback,
}

impl Error {
    /// The analysis frequency the failure is attached to, when there is one.
    pub fn omega(&self) -> Option<f64> {
        match *self {
            Error::SingularAtFrequency { omega, .. }
            | Error::ParametricDivergence { omega }
            | Error::ZeroResponse { omega, .. }
            | Error::MechanicalResonanceSingularity { omega }
            | Error::ZeroResponseSusceptibility { omega }
            | Error::DegenerateReadout { omega } => Some(omega),
            Error::ZeroFrequencyFeedback => Some(0.0),
            _ => None,
        }
    }
}
