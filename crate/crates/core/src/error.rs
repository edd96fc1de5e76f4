use thiserror::Error;

/// Errors raised by the library.
///
/// Resource exhaustion is kept separate from logical errors so callers can
/// fall back to a bounded search instead of reporting a wrong verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),

    #[error("state budget exceeded after discovering {reached} states (budget {budget})")]
    BudgetExceeded { reached: usize, budget: usize },

    #[error("matrix is not p-triangular (cycle through indices {cycle:?})")]
    NotPTriangular { cycle: Vec<usize> },

    #[error("diagonal entry {0} is not a natural number")]
    NonNaturalDiagonal(String),

    #[error("rank precondition violated: rank(ABA) = {rank_aba} but rank(A) = {rank_a}")]
    RankPrecondition { rank_a: usize, rank_aba: usize },

    #[error("automaton has negative transition weights; structures are not path-faithful")]
    NegativeTransitions,

    #[error("separator symbol `$` already occurs in the alphabet")]
    SeparatorCollision,

    #[error("state index {index} out of range for {size} states")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("empty factor at position {0}")]
    EmptyFactor(usize),

    #[error("automaton is not deterministic")]
    NotDeterministic,

    #[error("automaton is not unambiguous (class {0})")]
    NotUnambiguous(String),

    #[error("automaton is exponentially ambiguous; the decision procedures do not apply")]
    ExponentiallyAmbiguous,

    #[error("automaton is not integer weighted")]
    NotInteger,

    #[error("depumping failed on buffer `{buffer}`: window too small or automaton not blindly pumpable")]
    DepumpFailed { buffer: String },

    #[error("malformed automaton file at {location}: {message}")]
    Format { location: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
