use alloc::string::String;
use core::fmt;

/// Errors reported by the engine.
///
/// Operations distinguish *mathematical verdicts* (which are ordinary return
/// values, e.g. a violated relation or a stalled descent) from these errors,
/// which signal that a precondition of an operation does not hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Division of scalars by zero.
    DivisionByZero,
    /// Evaluation of a rational function at a point where its (reduced)
    /// denominator vanishes.
    PoleAtPoint { at: String },
    /// Two operands live over generator sets `z0..` of different sizes.
    ArityMismatch { left: u32, right: u32 },
    /// Two operands carry incompatible `q`-modes (symbolic vs. fixed, or two
    /// different fixed values).
    ModeMismatch { left: String, right: String },
    /// Malformed input text; `pos` is a byte offset into the input.
    Syntax { pos: usize, msg: String },
    /// A generator index outside `0..=n` appeared in the input.
    UnknownGenerator { pos: usize, index: u32, arity: u32 },
    /// A generator word was raised to a negative power.
    NegativeWordPower { pos: usize },
    /// The imaginary unit appeared in input while Gaussian mode is disabled.
    GaussianDisabled { pos: usize },
    /// A fixed deformation parameter outside the admissible interval [0, 1).
    InvalidQ { value: String },
    /// The requested operation is undefined at q = 0.
    QZeroUnsupported,
    /// A rewrite rule failed the termination-measure check at construction.
    TerminationMeasure { rule: String },
    /// A word is not of the canonical normal-form shape expected here.
    InvalidNormalWord { word: String },
    /// No commutator-ideal certificate could be produced for the target.
    NotCertifiable { detail: String },
    /// A scalar that must satisfy λ·conj(λ) = 1 (and be constant) does not.
    NotUnit { value: String },
    /// An element violates a filtration-degree precondition.
    FiltrationViolation { required: u64, found: String },
    /// An argument of `is_power`/descent lies outside its admissible range.
    InvalidRange { what: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::PoleAtPoint { at } => write!(f, "pole at q = {at}"),
            Error::ArityMismatch { left, right } => {
                write!(f, "arity mismatch: n = {left} vs n = {right}")
            }
            Error::ModeMismatch { left, right } => {
                write!(f, "q-mode mismatch: {left} vs {right}")
            }
            Error::Syntax { pos, msg } => write!(f, "syntax error at byte {pos}: {msg}"),
            Error::UnknownGenerator { pos, index, arity } => write!(
                f,
                "unknown generator z{index} at byte {pos}: arity is n = {arity}"
            ),
            Error::NegativeWordPower { pos } => {
                write!(f, "negative power of a generator word at byte {pos}")
            }
            Error::GaussianDisabled { pos } => write!(
                f,
                "imaginary unit at byte {pos}, but Gaussian mode is disabled"
            ),
            Error::InvalidQ { value } => {
                write!(f, "invalid deformation parameter q = {value}: need 0 <= q < 1")
            }
            Error::QZeroUnsupported => write!(f, "operation undefined at q = 0"),
            Error::TerminationMeasure { rule } => {
                write!(f, "rule {rule} violates the termination measure")
            }
            Error::InvalidNormalWord { word } => {
                write!(f, "word `{word}` is not in canonical normal-form shape")
            }
            Error::NotCertifiable { detail } => {
                write!(f, "no commutator-ideal certificate: {detail}")
            }
            Error::NotUnit { value } => {
                write!(f, "scalar {value} is not a constant unit (λ·conj(λ) = 1)")
            }
            Error::FiltrationViolation { required, found } => {
                write!(f, "filtration degree {found} below required {required}")
            }
            Error::InvalidRange { what } => write!(f, "argument out of range: {what}"),
        }
    }
}

impl core::error::Error for Error {}
