use alloc::string::String;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("barrier is not symmetric about its midpoint: sample {index} deviates by {deviation:e}")]
    AsymmetricBarrier { index: usize, deviation: f64 },

    #[error("ODE integration failed at x = {position}: {reason}")]
    OdeFailure { position: f64, reason: &'static str },

    #[error("singular boundary matching: |Q| = {q_abs:e}, |P| = {p_abs:e}")]
    SingularMatching { q_abs: f64, p_abs: f64 },

    #[error("decomposition failed: |psi_ref(x_c)| = {residual:e} exceeds tolerance {tolerance:e}")]
    DecompositionFailure { residual: f64, tolerance: f64 },

    #[error("transmission probability {transmission:e} is too small for a finite transmission time")]
    TransmissionUnderflow { transmission: f64 },

    #[error("reflection probability {reflection:e} vanishes (resonance); reflection time undefined")]
    ReflectionFree { reflection: f64 },

    #[error("quadrature did not converge to {tolerance:e} (last change {change:e})")]
    QuadratureDiverged { tolerance: f64, change: f64 },

    #[error("momentum support is empty")]
    EmptySupport,

    #[error("spectral weight of the {channel} subensemble is degenerate ({weight:e})")]
    DegenerateWeight { channel: &'static str, weight: f64 },

    #[error("stationary solution missing for k = {k} (precompute the k-grid before evolving)")]
    CacheMiss { k: f64 },

    #[error("barrier occupancy still {occupancy:e} after extending the time window to [{start}, {end}]")]
    WindowFailure { start: f64, end: f64, occupancy: f64 },

    #[error("Larmor frequency list must contain at least two distinct non-zero values")]
    InvalidOmegaList,

    #[error("precession extrapolation did not converge: estimates {first} and {second} differ by more than 1%")]
    ExtrapolationDiverged { first: f64, second: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: String::from(reason),
    }
}
