//! Core algorithms for CTL* with constraints over the integers and related
//! concrete domains.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! the terminal or threads lives in the companion `ctlz` crate.
//!
//! Main entry points:
//!
//! * [`formula`]: syntax trees, the textual parser and printer, negation
//!   normal forms and the constraint abstraction.
//! * [`domain`]: concrete domains (ℤ, ℕ, ℤ∖ℕ, ℚ, Allen intervals,
//!   lexicographic tuples) and positive-existential interpretations.
//! * [`structure`] and [`kripke`]: finite relational structures, constraint
//!   Kripke models and trees, model abstraction and constraint-graph
//!   extraction.
//! * [`homcheck`]: decides whether a finite structure maps homomorphically
//!   into ℤ, ℕ, ℤ∖ℕ or ℚ and produces witnesses.
//! * [`mso`]: MSO / WMSO+B sentences describing homomorphism existence,
//!   plus a finite-structure evaluator.
//! * [`modelcheck`] and [`satsearch`]: CTL* model checking of finite
//!   constraint models and bounded model search.
//! * [`gen`]: seedable generators of random structures, models and
//!   formulas for differential testing.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod domain;
pub mod error;
pub mod formula;
pub mod gen;
pub mod homcheck;
pub mod kripke;
pub mod modelcheck;
pub mod mso;
pub mod satsearch;
pub mod structure;
mod util;

pub use util::Tri;

pub use error::{Error, Result};

/// Exact rational numbers used for ℚ constants and values.
pub type Rational = num_rational::Ratio<i64>;
