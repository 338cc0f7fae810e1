//! Register automata over rational data: concrete and symbolic semantics,
//! Myhill–Nerode style extraction from symbolic samples, regularity checking,
//! synthesis, and bounded equivalence.

pub mod automaton;
pub mod catalog;
pub mod equiv;
pub mod guards;
pub mod nerode;
pub mod symbolic;
pub mod value;
