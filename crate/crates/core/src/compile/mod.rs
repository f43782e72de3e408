//! Reductions from team-semantics model checking to propositional
//! satisfiability.
//!
//! - [`compile_dualhorn`]: inclusion logic to dual-Horn CNF.
//! - [`compile_cnf_general`]: the same construction extended with clauses for
//!   dependence and independence atoms (general CNF).
//! - [`compile_split_2sat`]: `φ1 ∨ φ2` with both disjuncts in the Boolean
//!   closure of one independence atom, to 2-CNF.
//! - [`check_width2_D`]: quantifier-free dependence formulas of
//!   disjunction-width at most 2.

mod bc;
mod width2;
mod worklist;

use thiserror::Error;

use crate::eval::EvalError;
use crate::satcore::SatError;

pub use bc::{
    compatible, compile_split_2sat, normalize_bc, per_assignment_admissible, split_2sat_verdict,
    witness_of, AdmissibleKind, BcLayer, NormalizedBc, SplitOptions,
};
pub use width2::check_width2_D;
pub use worklist::{
    compile_cnf_general, compile_dualhorn, compile_dualhorn_with, dualhorn_clause_count,
    DualHornOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Sat(#[from] SatError),
    #[error("unsupported in this compiler: {0}")]
    Unsupported(String),
    #[error("formula is outside the fragment: {0}")]
    Fragment(String),
    #[error("not in the Boolean closure of one independence atom: {0}")]
    NotBcMember(String),
    #[error("encoding would need {0} propositional variables")]
    TooLarge(u128),
}
