//! Bayesian merging diagnostics, expert tests and manipulation games for
//! probability processes on finite-alphabet outcome trees.

pub mod error;
pub mod game;
pub mod history;
pub mod manipulation;
pub mod measures;
pub mod merging;
pub mod number;
pub mod opinion_spec;
pub mod testing;

pub use error::{Error, Result};
pub use history::{Alphabet, History, PathPattern};
pub use measures::{Example1Surrogate, Opinion, OpinionKind, TailRule};
pub use number::{Exact, Number, NumberMode};
