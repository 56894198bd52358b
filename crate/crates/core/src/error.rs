use core::fmt;

/// Errors raised by state construction, channel evaluation and the QFI engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// Mode counts or vector/matrix sizes do not line up.
    DimensionMismatch { expected: usize, found: usize },
    /// Covariance violates symmetry, the uncertainty relation or `det Σ ≥ 4^-n`.
    NonPhysical { margin: f64 },
    /// Channel parameters outside `0 ≤ η ≤ 1`, `N_B ≥ 0`.
    NonPhysicalParams,
    /// Normalized bath `N_B / (1 - η²)` diverges at `η = 1`.
    DivergentNoise,
    /// `η` closer to 1 than the engine guard allows.
    EtaTooClose { eta: f64 },
    /// SLD linear system has no consistent solution.
    SingularSystem { residual: f64 },
    /// Closed-form denominator is not positive.
    DegenerateDenominator,
    /// A probe parameter is outside its allowed range.
    Range { name: &'static str, value: f64 },
    /// Two-mode canonicalization needs a pure state.
    NotPure { purity: f64 },
    /// Two-mode canonicalization received a single-mode state.
    NotTwoMode,
    /// Ratio with a vanishing denominator.
    DivisionByZero,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonPhysical { margin } => {
                write!(f, "covariance matrix is not physical (margin {margin:e})")
            }
            Error::NonPhysicalParams => f.write_str("channel parameters out of range"),
            Error::DivergentNoise => f.write_str("normalized bath diverges at eta = 1"),
            Error::EtaTooClose { eta } => write!(f, "eta = {eta} is too close to 1"),
            Error::SingularSystem { residual } => {
                write!(f, "SLD system is singular (residual {residual:e})")
            }
            Error::DegenerateDenominator => f.write_str("closed-form denominator is not positive"),
            Error::Range { name, value } => write!(f, "{name} = {value} is out of range"),
            Error::NotPure { purity } => write!(f, "state is not pure (purity {purity})"),
            Error::NotTwoMode => f.write_str("expected a two-mode state"),
            Error::DivisionByZero => f.write_str("denominator QFI is zero"),
        }
    }
}

impl core::error::Error for Error {}
