//! Propositional CNF, clause-class recognisers, DIMACS I/O and solvers.

mod dimacs;
mod dpll;
mod dualhorn;
mod twosat;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

pub use dimacs::{emit_dimacs, emit_manifest, parse_dimacs, parse_dimacs_raw, parse_manifest};
pub use dpll::solve_dpll;
pub use dualhorn::solve_dual_horn;
pub use twosat::solve_2sat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("formula is not dual-Horn (clause {0} has two negative literals)")]
    NotDualHorn(usize),
    #[error("formula is not 2-CNF (clause {0} has more than two literals)")]
    NotTwoCnf(usize),
    #[error("line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
}

/// A literal in DIMACS convention: variable `|l|`, negated when `l < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        assert!(var >= 1, "variables are numbered from 1");
        Lit(var as i32)
    }

    pub fn neg(var: u32) -> Lit {
        assert!(var >= 1, "variables are numbered from 1");
        Lit(-(var as i32))
    }

    pub fn from_dimacs(l: i32) -> Lit {
        assert!(l != 0);
        Lit(l)
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_pos(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Dense index `2(v-1) + [negative]`, for per-literal tables.
    pub(crate) fn code(self) -> usize {
        2 * (self.var() as usize - 1) + usize::from(!self.is_pos())
    }

    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var() as usize - 1] == self.is_pos()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A clause without repeated literals and without complementary pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Build a clause, dropping repeats. Returns `None` for a tautology.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Option<Clause> {
        let lits: Vec<Lit> = lits.into_iter().collect();
        let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
        if lits.len() <= 16 {
            for l in lits {
                if out.contains(&!l) {
                    return None;
                }
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        } else {
            let mut seen = HashSet::with_capacity(lits.len());
            for l in lits {
                if seen.contains(&!l) {
                    return None;
                }
                if seen.insert(l) {
                    out.push(l);
                }
            }
        }
        Some(Clause(out))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negatives(&self) -> usize {
        self.0.iter().filter(|l| !l.is_pos()).count()
    }

    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(model))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Cnf {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Raise the variable count (never lowers it).
    pub fn reserve_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    /// Add a clause; tautologies are dropped. Returns whether it was kept.
    pub fn add(&mut self, lits: impl IntoIterator<Item = Lit>) -> bool {
        match Clause::new(lits) {
            Some(c) => {
                if let Some(m) = c.0.iter().map(|l| l.var()).max() {
                    self.num_vars = self.num_vars.max(m);
                }
                self.clauses.push(c);
                true
            }
            None => false,
        }
    }

    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        model.len() >= self.num_vars as usize && self.clauses.iter().all(|c| c.satisfied_by(model))
    }

    /// Clauses sorted, for order-insensitive comparison.
    pub fn sorted_clauses(&self) -> Vec<Vec<i32>> {
        let mut out: Vec<Vec<i32>> = self
            .clauses
            .iter()
            .map(|c| {
                let mut v: Vec<i32> = c.0.iter().map(|l| l.0).collect();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort();
        out
    }
}

/// Every clause has at most one negative literal.
pub fn is_dual_horn(f: &Cnf) -> bool {
    f.clauses.iter().all(|c| c.negatives() <= 1)
}

/// Every clause has at most two literals.
pub fn is_2cnf(f: &Cnf) -> bool {
    f.clauses.iter().all(|c| c.len() <= 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// A model; entry `v - 1` is the value of variable `v`.
    Sat(Vec<bool>),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&[bool]> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat => None,
        }
    }
}

/// Names for propositional variables: variable `i` stands for the team
/// membership atom `label[tuple]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    entries: Vec<(String, Vec<String>)>,
    index: HashMap<(String, Vec<String>), u32>,
}

impl VarMap {
    pub fn new() -> VarMap {
        VarMap::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The variable for `label[tuple]`, allocating the next index if new.
    pub fn intern(&mut self, label: &str, tuple: Vec<String>) -> u32 {
        let key = (label.to_string(), tuple);
        if let Some(&v) = self.index.get(&key) {
            return v;
        }
        self.entries.push(key.clone());
        let v = self.entries.len() as u32;
        self.index.insert(key, v);
        v
    }

    pub fn get(&self, label: &str, tuple: &[String]) -> Option<u32> {
        self.index.get(&(label.to_string(), tuple.to_vec())).copied()
    }

    pub fn entry(&self, var: u32) -> Option<(&str, &[String])> {
        self.entries
            .get((var as usize).checked_sub(1)?)
            .map(|(l, t)| (l.as_str(), t.as_slice()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, &[String])> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, (l, t))| (i as u32 + 1, l.as_str(), t.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tautologies_and_repeats() {
        assert!(Clause::new([Lit::pos(1), Lit::neg(1)]).is_none());
        let c = Clause::new([Lit::pos(1), Lit::pos(1), Lit::neg(2)]).unwrap();
        assert_eq!(c.len(), 2);
        let mut f = Cnf::new(0);
        assert!(!f.add([Lit::pos(3), Lit::neg(3)]));
        assert!(f.is_empty());
        assert!(f.add([Lit::pos(3)]));
        assert_eq!(f.num_vars(), 3);
    }

    #[test]
    fn recognisers() {
        let mut f = Cnf::new(3);
        f.add([Lit::pos(1), Lit::pos(2), Lit::neg(3)]);
        assert!(is_dual_horn(&f));
        assert!(!is_2cnf(&f));
        let mut g = Cnf::new(2);
        g.add([Lit::neg(1), Lit::neg(2)]);
        assert!(!is_dual_horn(&g));
        assert!(is_2cnf(&g));
    }

    #[test]
    fn varmap_is_bijective() {
        let mut m = VarMap::new();
        let a = m.intern("X", vec!["0".into()]);
        let b = m.intern("Y", vec!["0".into()]);
        assert_eq!(m.intern("X", vec!["0".into()]), a);
        assert_ne!(a, b);
        assert_eq!(m.entry(b), Some(("Y", &["0".to_string()][..])));
        assert_eq!(m.entry(0), None);
        assert_eq!(m.get("X", &["0".to_string()]), Some(a));
    }
}
