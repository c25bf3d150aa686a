//! Weighted multiset automata over commutative semirings.
//!
//! The crate compiles weighted multiset regular expressions into automata
//! whose transition matrices commute, evaluates multiset weights, learns
//! weights from data, and stores inside weights in compressed form.

pub mod automaton;
pub mod construct;
pub mod error;
pub mod inside;
pub mod io;
pub mod matrix;
pub mod multiset;
pub mod regex;
pub mod semiring;
pub mod train;

pub use automaton::{CommutativityReport, MultisetAutomaton};
pub use error::{Error, ErrorClass, Result};
pub use matrix::Matrix;
pub use multiset::{Alphabet, Multiset, Symbol};
pub use regex::Regex;
pub use semiring::{Boolean, Literal, LogWeight, Rational, Ring, Semiring, Viterbi, Weight};
