use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {value} ({reason})")]
    Invariant {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dispersive regime violated: |delta_ca| = {delta_ca:.4e} rad/s < {guard} x gamma = {limit:.4e} rad/s")]
    DispersiveGuard {
        delta_ca: f64,
        guard: f64,
        limit: f64,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("fixed-point grid too coarse: {coarse} sign changes on the base grid, {fine} after refinement")]
    GridTooCoarse { coarse: usize, fine: usize },

    #[error("mechanical confinement lost (omega_eff^2 = {omega_eff_sq:.4e} rad^2/s^2)")]
    Unconfined { omega_eff_sq: f64 },

    #[error("no stationary point of the full potential inside the central well")]
    NoInteriorMinimum,

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(field: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Invariant {
            field,
            value,
            reason,
        }
    }
}
