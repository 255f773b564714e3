use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A quantity that must be non-negative was negative.
    Negative { what: &'static str, value: f64 },
    /// A quantity that must be strictly positive was not.
    NonPositive { what: &'static str, value: f64 },
    /// Generic argument validation failure.
    InvalidArgument(&'static str),
    /// The Fock space is too small for the requested displacement.
    TruncationGuard { alpha: f64, dim: usize, required: usize },
    /// Population leaked into the top of the truncated space.
    TruncationOverflow { tail: f64, threshold: f64 },
    /// The propagator lost norm beyond the configured limit.
    NormDrift { drift: f64, limit: f64 },
    /// Adaptive step size collapsed below the representable minimum.
    StepSizeUnderflow { t: f64 },
    /// Cat generation stopped growing before reaching its target.
    StalledGeneration { alpha: f64, target: f64 },
    /// Requested displacement is beyond the all-orders cap.
    InfeasibleAlpha { alpha: f64, max: f64 },
    /// Drive strength above the configured hardware cap.
    RabiAboveCap { rabi: f64, cap: f64 },
    /// Catalog lookup failed.
    NotFound { kind: &'static str },
    /// States in different spin bases were combined.
    BasisMismatch,
    /// Operands have incompatible dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// A generation result carries no state vector.
    MissingState,
}

impl Error {
    /// Whether the error comes from a numerical failure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::TruncationOverflow { .. } | Error::NormDrift { .. } | Error::StepSizeUnderflow { .. })
    }

    /// Whether the error is a solver infeasibility.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::StalledGeneration { .. } | Error::InfeasibleAlpha { .. } | Error::RabiAboveCap { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Negative { what, value } => write!(f, "{what} must be non-negative, got {value}"),
            Error::NonPositive { what, value } => write!(f, "{what} must be positive, got {value}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::TruncationGuard { alpha, dim, required } => {
                write!(f, "Fock space of dimension {dim} too small for |alpha| = {alpha} (need at least {required})")
            }
            Error::TruncationOverflow { tail, threshold } => {
                write!(f, "tail population {tail:e} exceeds truncation threshold {threshold:e}")
            }
            Error::NormDrift { drift, limit } => write!(f, "norm drift {drift:e} exceeds limit {limit:e}"),
            Error::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t:e} s"),
            Error::StalledGeneration { alpha, target } => {
                write!(f, "cat generation stalled at alpha = {alpha} before reaching {target}")
            }
            Error::InfeasibleAlpha { alpha, max } => {
                write!(f, "alpha = {alpha} exceeds the reachable maximum {max}")
            }
            Error::RabiAboveCap { rabi, cap } => write!(f, "Rabi frequency {rabi} rad/s exceeds cap {cap} rad/s"),
            Error::NotFound { kind } => write!(f, "{kind} not found"),
            Error::BasisMismatch => f.write_str("spin basis mismatch"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::MissingState => f.write_str("generation result carries no state vector"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn require_non_negative(what: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Negative { what, value })
    }
}

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { what, value })
    }
}
