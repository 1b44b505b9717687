use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra violation: {identity} residual {residual:e} exceeds {tolerance:e}")]
    AlgebraViolation {
        identity: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("dispersion violated: (k0 - V)^2 - k^2 - m^2 = {residual:e}")]
    DispersionViolation { residual: f64 },

    #[error("dimension mismatch: spinor has {got} components, representation needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("incident flux {flux:e} is zero")]
    ZeroIncidentFlux { flux: f64 },

    #[error("degenerate barrier: matching system is singular ({0})")]
    DegenerateBarrier(String),

    #[error("refractive index must be positive, got {0}")]
    InvalidIndex(f64),

    #[error("incident wave is off shell: k0 = {k0} must exceed mass = {mass}")]
    OffShell { k0: f64, mass: f64 },

    #[error("invalid barrier for {particle}: {reason}")]
    InvalidBarrier {
        particle: &'static str,
        reason: String,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("packet out of bounds: {0}")]
    PacketOutOfBounds(String),

    #[error("under-resolved grid: {points_per_wavelength:.2} points per carrier wavelength (need >= 16)")]
    UnderResolved { points_per_wavelength: f64 },

    #[error("Courant condition violated: {0}")]
    CourantViolation(String),

    #[error("packet not separated: {0}")]
    NotSeparated(String),

    #[error("constraint violated: residual {residual:e} exceeds {tolerance:e}")]
    ConstraintViolated { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
