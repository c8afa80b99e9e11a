//! Exact rational linear algebra, linear feasibility, and polyhedral cones.

pub mod cone;
pub mod matrix;
pub mod rational;
pub mod simplex;
pub mod vector;

pub use cone::{cone_membership, conic_combination, dual_cone, ConeV, Membership};
pub use matrix::{rank_of, RationalMatrix};
pub use rational::{
    format_rational, int, parse_canonical_rational, parse_rational, rat, Rational,
    RationalParseError,
};
pub use simplex::{minimize, solve_feasibility, Feasibility, LinearConstraint, LpOutcome};
pub use vector::RationalVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MathError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone generator {0} is the zero vector")]
    ZeroGenerator(usize),
    #[error("cone has no generators")]
    EmptyCone,
}
