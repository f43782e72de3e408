//! Model checking for first-order team logic with dependence, independence
//! and inclusion atoms.
//!
//! The crate is organised bottom-up:
//!
//! - [`formula`]: syntax tree, parser, printer, fragment classification.
//! - [`model`]: structures, teams and the instance file format.
//! - [`eval`]: reference semantics and exact search-based checking.
//! - [`satcore`]: CNF, DIMACS, and dual-Horn / 2-SAT / DPLL solvers.
//! - [`compile`]: reductions from model checking to propositional satisfiability.
//! - [`gadgets`]: hardness constructions from 3-SAT, clique cover and coloring.
//! - [`pipeline`]: strategy selection used by the command-line tool.

pub mod compile;
pub mod eval;
pub mod formula;
pub mod gadgets;
pub mod gen;
pub mod model;
pub mod pipeline;
pub mod satcore;

pub use formula::{Formula, Var};
pub use model::{Elem, Structure, Team};
