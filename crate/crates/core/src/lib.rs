pub mod algebra;
pub mod analysis;
pub mod automaton;
pub mod determinisability;
pub mod equivalence;
pub mod error;
pub mod format;
pub mod lazy;
pub mod pumpability;

pub use automaton::{difference, hadamard, negate, sum, AutomatonSize, WeightedAutomaton, Word};
pub use error::{Error, Result};
pub use format::{parse_automaton, serialize_automaton};
pub use lazy::{evaluate_lazy, materialize, LazyAutomaton};
