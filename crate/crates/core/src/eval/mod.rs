//! Team semantics: literal and atom checks, exact model checking, the
//! `∀`/`∧` fast path and the k-coherence tester.

mod atoms;
mod search;
mod tab;
mod universal;

use std::time::Duration;

use thiserror::Error;

use crate::formula::{Formula, Var};
use crate::model::{Elem, Structure, Team};

pub use search::Evaluator;
pub use universal::{check_universal_conj, UniversalStats};

pub(crate) use atoms::atom_holds;
pub(crate) use tab::Tab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound by the team or a quantifier")]
    UnknownVariable(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{name}` has arity {expected}, used with {found} arguments")]
    RelationArity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("expected a first-order formula")]
    NotFirstOrder,
    #[error("expected a dependence, independence or inclusion atom")]
    NotAnAtom,
    #[error("formula is outside the supported fragment: {0}")]
    Fragment(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

/// Limits for the exponential search in [`check_brute`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_team_size: usize,
    /// Search nodes (splits, choices, witness branches) before giving up.
    pub max_branch: u64,
    pub time_limit: Duration,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            max_team_size: 256,
            max_branch: 50_000_000,
            time_limit: Duration::from_secs(60),
        }
    }
}

/// Reject unknown relations, wrong arities and variables that are neither
/// team columns nor bound on the way down.
pub(crate) fn validate(
    structure: &Structure,
    vars: &[Var],
    phi: &Formula,
) -> Result<(), EvalError> {
    fn go<'a>(
        structure: &Structure,
        scope: &mut Vec<&'a str>,
        phi: &'a Formula,
    ) -> Result<(), EvalError> {
        match phi {
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                scope.push(x);
                let out = go(structure, scope, body);
                scope.pop();
                out
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                go(structure, scope, a)?;
                go(structure, scope, b)
            }
            _ => {
                if let Formula::Rel { name, args, .. } = phi {
                    let rel = structure
                        .relation(name)
                        .ok_or_else(|| EvalError::UnknownRelation(name.clone()))?;
                    if rel.arity() != args.len() {
                        return Err(EvalError::RelationArity {
                            name: name.clone(),
                            expected: rel.arity(),
                            found: args.len(),
                        });
                    }
                }
                for v in phi.atom_vars() {
                    if !scope.contains(&v.as_str()) {
                        return Err(EvalError::UnknownVariable(v.clone()));
                    }
                }
                Ok(())
            }
        }
    }
    let mut scope: Vec<&str> = vars.iter().map(String::as_str).collect();
    go(structure, &mut scope, phi)
}

/// Variable lookup for first-order evaluation: quantifier bindings shadow
/// team columns.
pub(crate) struct Env<'a> {
    vars: &'a [Var],
    row: &'a [Elem],
    bound: Vec<(&'a str, Elem)>,
}

impl<'a> Env<'a> {
    pub fn new(vars: &'a [Var], row: &'a [Elem]) -> Env<'a> {
        Env {
            vars,
            row,
            bound: Vec::new(),
        }
    }

    fn get(&self, v: &str) -> Elem {
        if let Some((_, e)) = self.bound.iter().rev().find(|(n, _)| *n == v) {
            return *e;
        }
        let i = self
            .vars
            .iter()
            .position(|w| w == v)
            .unwrap_or_else(|| panic!("unbound variable `{v}` (validated earlier)"));
        self.row[i]
    }
}

/// Tarski semantics of an atom-free formula on one assignment. Assumes the
/// formula was validated.
pub(crate) fn eval_fo<'a>(structure: &Structure, env: &mut Env<'a>, phi: &'a Formula) -> bool {
    match phi {
        Formula::Rel {
            name,
            args,
            positive,
        } => {
            let tuple: Vec<Elem> = args.iter().map(|a| env.get(a)).collect();
            let rel = structure.relation(name).expect("validated relation");
            rel.contains(&tuple) == *positive
        }
        Formula::Eq {
            left,
            right,
            positive,
        } => (env.get(left) == env.get(right)) == *positive,
        Formula::And(a, b) => eval_fo(structure, env, a) && eval_fo(structure, env, b),
        Formula::Or(a, b) => eval_fo(structure, env, a) || eval_fo(structure, env, b),
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            let want = matches!(phi, Formula::Exists(..));
            let mut found = !want;
            for e in structure.elements() {
                env.bound.push((x, e));
                let v = eval_fo(structure, env, body);
                env.bound.pop();
                if v == want {
                    found = want;
                    break;
                }
            }
            found
        }
        Formula::Dep { .. } | Formula::Indep { .. } | Formula::Inc { .. } => {
            panic!("dependency atom in first-order evaluation")
        }
    }
}

pub(crate) fn fo_row(structure: &Structure, tab: &Tab, r: usize, phi: &Formula) -> bool {
    let mut env = Env::new(&tab.vars, &tab.rows[r]);
    eval_fo(structure, &mut env, phi)
}

/// `𝔄 ⊨_s φ` for a single assignment `s` over `vars` and an atom-free `φ`.
pub fn holds_fo(
    structure: &Structure,
    vars: &[Var],
    s: &[Elem],
    phi: &Formula,
) -> Result<bool, EvalError> {
    if !phi.is_first_order() {
        return Err(EvalError::NotFirstOrder);
    }
    validate(structure, vars, phi)?;
    let mut env = Env::new(vars, s);
    Ok(eval_fo(structure, &mut env, phi))
}

/// Check a dependence, independence or inclusion atom on a team.
pub fn check_atom(structure: &Structure, team: &Team, atom: &Formula) -> Result<bool, EvalError> {
    if !atom.is_atom() {
        return Err(EvalError::NotAnAtom);
    }
    validate(structure, team.vars(), atom)?;
    let tab = Tab::from_team(team);
    let all: Vec<usize> = (0..tab.len()).collect();
    Ok(atom_holds(&tab, &all, atom))
}

/// Exact lax team semantics: `𝔄 ⊨_X φ`.
///
/// Budget exhaustion is reported as [`EvalError::BudgetExceeded`], never as
/// `false`.
pub fn check_brute(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
    budget: EvalBudget,
) -> Result<bool, EvalError> {
    Evaluator::new(structure, budget).check(team, phi)
}

/// Whether `𝔄 ⊨_X φ` coincides with `φ` holding on every non-empty subteam
/// of at most `k` rows.
pub fn is_k_coherent_on(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
    k: usize,
    budget: EvalBudget,
) -> Result<bool, EvalError> {
    if !phi.is_quantifier_free() {
        return Err(EvalError::Fragment(
            "coherence is tested on quantifier-free formulas".into(),
        ));
    }
    let mut ev = Evaluator::new(structure, budget);
    let whole = ev.check(team, phi)?;
    let rows: Vec<&Vec<Elem>> = team.rows().collect();
    let mut all_small = true;
    let mut chosen: Vec<usize> = Vec::new();
    // Depth-first over index subsets of size 1..=k.
    fn rec(
        ev: &mut Evaluator<'_>,
        team: &Team,
        rows: &[&Vec<Elem>],
        phi: &Formula,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
    ) -> Result<bool, EvalError> {
        if !chosen.is_empty() {
            let sub = team.with_rows(chosen.iter().map(|&i| rows[i]));
            if !ev.check(&sub, phi)? {
                return Ok(false);
            }
        }
        if chosen.len() == k {
            return Ok(true);
        }
        for i in start..rows.len() {
            chosen.push(i);
            let ok = rec(ev, team, rows, phi, k, i + 1, chosen)?;
            chosen.pop();
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
    if k > 0 {
        all_small = rec(&mut ev, team, &rows, phi, k, 0, &mut chosen)?;
    }
    Ok(whole == all_small)
}
