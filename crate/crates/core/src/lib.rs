//! Model checking of quantitative linear-time fixpoint formulas over finite
//! weighted systems, parametric in the semiring of weights.
//!
//! - [`semiring`]: the boolean, probabilistic, tropical and bounded tropical
//!   instances, with the offsetting operator `⊘`.
//! - [`model`]: signatures, weighted transition systems and their text format.
//! - [`logic`]: formula syntax, parsing, substitution and unrolling.
//! - [`eval`]: Kleene iteration and the fixpoint evaluator.
//! - [`traces`]: trace fragments, `lt`, `tr` and bounded equivalence.
//! - [`oracle`]: an independent path-based semantics for cross-checking.
//! - [`cli`]: the `linmu` command line.

pub mod cli;
pub mod eval;
pub mod lexer;
pub mod logic;
pub mod model;
pub mod oracle;
pub mod semiring;
pub mod traces;

pub use eval::{eval, mu_extent, nu_extent, EvalConfig, EvalError, Evaluation, Predicate};
pub use logic::{parse_formula, Formula};
pub use model::{parse_model, Model, ModelBuilder, Signature};
pub use semiring::{Cost, Semiring, Value};
