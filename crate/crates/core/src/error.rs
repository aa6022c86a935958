use alloc::string::String;
use core::fmt;

/// Errors surfaced by the numerical routines.
///
/// Domain violations (coefficients outside the disk, zero spectral
/// parameter) are rejected eagerly; iterative failures (eigensolver,
/// power iteration, quadrature) carry enough context to identify the
/// failing input.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A Verblunsky coefficient must satisfy `|alpha| < 1`.
    CoefficientOutsideDisk { modulus: f64 },
    /// NaN or infinity where a finite value is required.
    NonFinite,
    /// Sequence index outside the stored window.
    OutOfSupport { index: i64 },
    /// Requested window is not covered by the sequence (including padding).
    WindowOutsideSupport,
    /// Boundary decoupling coefficients must have modulus one.
    BoundaryNotUnimodular { modulus: f64 },
    /// The spectral parameter `z` must be nonzero.
    ZeroSpectralParameter,
    /// Argument must lie in the open unit disk.
    OutsideUnitDisk { modulus: f64 },
    /// Schur iterate escaped the disk; the coefficient data is invalid.
    SchurNonContraction { level: usize, modulus: f64 },
    /// Denominator collapsed below the double-precision noise floor.
    SmallDenominator { context: &'static str },
    /// Sampling function incompatible with the base system.
    SamplingIncompatible,
    /// Sampled coefficient had modulus `>= 1`.
    SamplingOutsideDisk { index: i64, modulus: f64 },
    /// Eigensolver failed to certify a window (residual above tolerance,
    /// or root count mismatch).
    Eigensolver { detail: String },
    /// Power iteration failed to stabilize within the iteration cap.
    PowerIterationStagnation,
    /// Operation requires a nonempty set.
    EmptySet,
    /// Quadrature failed to reach the requested tolerance.
    QuadratureNonConvergence,
    /// Evaluation point too close to the logarithmic singularity.
    SingularityGuard,
    /// Endpoint grid too coarse to isolate the measure's atoms.
    GridTooCoarse,
    /// Accumulated quantity became non-finite (signals bad inputs).
    NonFiniteAccumulation,
    /// Generic parameter validation failure.
    InvalidParameter(&'static str),
    /// CSV parse failure with 1-based line number.
    Csv { line: usize, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CoefficientOutsideDisk { modulus } => {
                write!(f, "Verblunsky coefficient has modulus {modulus} >= 1")
            }
            Error::NonFinite => write!(f, "non-finite value"),
            Error::OutOfSupport { index } => {
                write!(f, "index {index} outside sequence support")
            }
            Error::WindowOutsideSupport => {
                write!(f, "window (with padding) exceeds sequence support")
            }
            Error::BoundaryNotUnimodular { modulus } => {
                write!(f, "boundary coefficient has modulus {modulus}, expected 1")
            }
            Error::ZeroSpectralParameter => write!(f, "spectral parameter z = 0"),
            Error::OutsideUnitDisk { modulus } => {
                write!(f, "argument has modulus {modulus} >= 1")
            }
            Error::SchurNonContraction { level, modulus } => {
                write!(f, "Schur iterate at level {level} has modulus {modulus} >= 1")
            }
            Error::SmallDenominator { context } => {
                write!(f, "denominator below 1e-14 in {context}")
            }
            Error::SamplingIncompatible => {
                write!(f, "sampling function incompatible with base system")
            }
            Error::SamplingOutsideDisk { index, modulus } => {
                write!(f, "sampled coefficient at n = {index} has modulus {modulus} >= 1")
            }
            Error::Eigensolver { detail } => write!(f, "eigensolver: {detail}"),
            Error::PowerIterationStagnation => write!(f, "power iteration stagnated"),
            Error::EmptySet => write!(f, "operation requires a nonempty set"),
            Error::QuadratureNonConvergence => write!(f, "quadrature did not converge"),
            Error::SingularityGuard => {
                write!(f, "evaluation point within the singularity guard band")
            }
            Error::GridTooCoarse => write!(f, "endpoint grid too coarse to isolate atoms"),
            Error::NonFiniteAccumulation => write!(f, "non-finite accumulation"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::Csv { line, message } => write!(f, "CSV line {line}: {message}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
