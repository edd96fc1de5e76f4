pub mod boolean;
pub mod exp_poly;
pub mod linalg;
pub mod matrix;
pub mod rational;
pub mod triangular;

pub use boolean::{bool_mul, BoolMatrix};
pub use exp_poly::{exp_poly_decompose, ExpPolyDecomposition, ExpPolyTerm};
pub use linalg::{determinant, inverse, invertible_completion, rank, solve};
pub use matrix::{mat_mul, mat_pow, RatMatrix, RatVector};
pub use rational::{parse_rational, rat_arith, ArithOp, Rational};
pub use triangular::{p_triangular, Triangularity};
