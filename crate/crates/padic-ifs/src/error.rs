//! Error type shared by every module of the crate.

use crate::Rational;

/// Everything that can go wrong while validating a system, building its
/// automata, or evaluating dimensions and measures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The rational has a denominator divisible by p, so it has no p-adic
    /// digit expansion.
    #[error("{value} is not a p-adic integer for p = {p}")]
    NotPadicInteger { value: Rational, p: u32 },

    /// A map offset lies outside the p-adic integers.
    #[error("offset {offset} of map {index} is not a p-adic integer for p = {p}")]
    OffsetNotPadicInteger {
        index: usize,
        offset: Rational,
        p: u32,
    },

    /// The system has no maps at all.
    #[error("system has no maps")]
    EmptySystem,

    /// The probability vector is malformed (wrong length, entry outside
    /// (0, 1), or the entries do not sum to 1).
    #[error("bad probability vector: {reason}")]
    BadProbabilities { reason: String },

    /// The modulus is not a prime >= 2.
    #[error("modulus {p} is not a prime >= 2")]
    InvalidModulus { p: u32 },

    /// A map has scale exponent zero, so it is not a contraction.
    #[error("map {index} has scale exponent 0")]
    ScaleExponentZero { index: usize },

    /// Two maps of the system are identical.
    #[error("maps {first} and {second} are identical")]
    DuplicateMaps { first: usize, second: usize },

    /// A map's sign bit is neither 0 nor 1.
    #[error("map {index} has sign bit {b}, expected 0 or 1")]
    BadSignBit { index: usize, b: u8 },

    /// A word refers to a map index the system does not have.
    #[error("word position {position} names map {map}, but the system has {count} maps")]
    BadMapIndex {
        position: usize,
        map: usize,
        count: usize,
    },

    /// Carry-state construction produced a carry outside the a-priori bound.
    /// This indicates a bug rather than a property of the input. Boxed to
    /// keep the error enum small next to `Result<T, Error>` payloads.
    #[error("carry {carry} exceeds the bound {bound}; construction diverged")]
    CarryBoundExceeded {
        carry: Box<Rational>,
        bound: Box<Rational>,
    },

    /// The operation needs a state in the positive orientation.
    #[error("state {state} has negative orientation")]
    NotPositiveOrientation { state: usize },

    /// The supplied witness word does not lead to the state it claims to.
    #[error("word reaches state {reached}, not the claimed state {state}")]
    WordDoesNotReachState { state: usize, reached: usize },

    /// An automaton that must have exactly one essential class has several.
    #[error("expected a unique essential class, found {essential_count}")]
    UniquenessViolated { essential_count: usize },

    /// Power iteration failed to bracket the spectral radius.
    #[error("spectral radius estimate did not converge within {iterations} iterations")]
    NonConvergence { iterations: u64 },

    /// Every state was pruned, so the automaton accepts no infinite word.
    #[error("automaton accepts no infinite word")]
    EmptyLanguage,

    /// A measure needs every map to be x -> p*x + d.
    #[error("map {index} is not of the form x -> p*x + d")]
    NotEquicontractive { index: usize },

    /// A measure needs a probability vector, and the system has none.
    #[error("system carries no probability vector")]
    MissingProbabilities,

    /// The point lies outside the attractor.
    #[error("point leaves the digit language after {consumed} digits")]
    NotInSupport { consumed: usize },

    /// A carry has no outgoing weighted transition, so the spectrum machinery
    /// does not apply.
    #[error("carry {carry_index} of state {state} has no outgoing weighted transition")]
    PositiveRowViolated { state: usize, carry_index: usize },

    /// The brute-force enumeration would be too large to run.
    #[error("enumeration of {words} words exceeds the cap of {cap}")]
    DepthTooLarge { words: u128, cap: u64 },

    /// A digit is outside {0, ..., p-1}.
    #[error("digit {digit} is not a base-{p} digit")]
    BadDigit { digit: u32, p: u32 },

    /// An automaton description is structurally invalid.
    #[error("bad automaton: {reason}")]
    BadAutomaton { reason: String },

    /// A point description is structurally invalid.
    #[error("bad point: {reason}")]
    BadPoint { reason: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
