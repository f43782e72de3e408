//! Strategy selection and reporting for one model-checking query.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::compile::{
    check_width2_D, compile_cnf_general, compile_dualhorn, split_2sat_verdict, CompileError,
    SplitOptions,
};
use crate::eval::{check_universal_conj, EvalBudget, EvalError, Evaluator};
use crate::formula::{classify, Formula, FragmentTag};
use crate::model::{Structure, Team};
use crate::satcore::{solve_dpll, solve_dual_horn, SatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Auto,
    Brute,
    Universal,
    Width2,
    Twosat,
    Dualhorn,
    Cnf,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Auto,
        Strategy::Brute,
        Strategy::Universal,
        Strategy::Width2,
        Strategy::Twosat,
        Strategy::Dualhorn,
        Strategy::Cnf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Brute => "brute",
            Strategy::Universal => "universal",
            Strategy::Width2 => "width2",
            Strategy::Twosat => "twosat",
            Strategy::Dualhorn => "dualhorn",
            Strategy::Cnf => "cnf",
        }
    }

    /// The strategy `auto` picks for a fragment, before any size fallback.
    pub fn for_fragment(tag: FragmentTag) -> Strategy {
        match tag {
            FragmentTag::UniversalConj => Strategy::Universal,
            FragmentTag::WidthOneQF | FragmentTag::WidthTwoQF_D => Strategy::Width2,
            FragmentTag::BcSplitIndep => Strategy::Twosat,
            FragmentTag::InclusionOnly => Strategy::Dualhorn,
            FragmentTag::General => Strategy::Cnf,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Strategy, String> {
        Strategy::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    /// The formula or instance is ill-formed (unknown variable, arity, ..).
    #[error("{0}")]
    Invalid(String),
    /// The requested strategy does not cover the formula.
    #[error("{0}")]
    Fragment(String),
    #[error("{0}")]
    Budget(String),
}

impl From<EvalError> for PipelineError {
    fn from(e: EvalError) -> PipelineError {
        match e {
            EvalError::BudgetExceeded(_) => PipelineError::Budget(e.to_string()),
            EvalError::NotFirstOrder | EvalError::NotAnAtom | EvalError::Fragment(_) => {
                PipelineError::Fragment(e.to_string())
            }
            _ => PipelineError::Invalid(e.to_string()),
        }
    }
}

impl From<CompileError> for PipelineError {
    fn from(e: CompileError) -> PipelineError {
        match e {
            CompileError::Eval(e) => e.into(),
            CompileError::TooLarge(_) => PipelineError::Budget(e.to_string()),
            CompileError::Sat(SatError::Dimacs { .. }) => PipelineError::Invalid(e.to_string()),
            _ => PipelineError::Fragment(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub verdict: bool,
    /// The strategy that produced the verdict (never `auto`).
    pub strategy: Strategy,
    pub requested: Strategy,
    pub fragment: FragmentTag,
    pub team_size: usize,
    pub cnf_vars: Option<u32>,
    pub cnf_clauses: Option<usize>,
    pub search_nodes: Option<u64>,
    pub elapsed_ms: f64,
}

/// Above this many tuples per label, `auto` does not try the general CNF
/// encoding of a formula with dependence or independence atoms, whose pair
/// clauses grow with the square of it.
const CNF_PAIR_LIMIT: u128 = 1 << 11;
const CNF_LIMIT: u128 = 1 << 18;

fn cnf_feasible(structure: &Structure, team: &Team, phi: &Formula) -> bool {
    let r = (team.vars().len() + phi.quantifier_depth()) as u32;
    let per_label = (structure.size() as u128).saturating_pow(r);
    if phi.is_union_closed() {
        per_label <= CNF_LIMIT
    } else {
        per_label <= CNF_PAIR_LIMIT
    }
}

/// Decide `𝔄 ⊨_X φ` with the given strategy. Explicit strategies fail with
/// [`PipelineError::Fragment`] when they do not apply; `auto` routes by
/// [`classify`] and replaces the general CNF encoding by search when the
/// encoding would be too large.
pub fn run_check(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
    strategy: Strategy,
    budget: EvalBudget,
) -> Result<CheckReport, PipelineError> {
    let fragment = classify(phi);
    let start = Instant::now();
    let mut chosen = strategy;
    if strategy == Strategy::Auto {
        chosen = Strategy::for_fragment(fragment);
        if chosen == Strategy::Cnf && !cnf_feasible(structure, team, phi) {
            chosen = Strategy::Brute;
        }
    }
    let mut report = CheckReport {
        verdict: false,
        strategy: chosen,
        requested: strategy,
        fragment,
        team_size: team.len(),
        cnf_vars: None,
        cnf_clauses: None,
        search_nodes: None,
        elapsed_ms: 0.0,
    };
    report.verdict = match chosen {
        Strategy::Brute | Strategy::Auto => {
            let mut ev = Evaluator::new(structure, budget);
            let v = ev.check(team, phi);
            report.search_nodes = Some(ev.nodes());
            v?
        }
        Strategy::Universal => {
            let (v, stats) = check_universal_conj(structure, team, phi)?;
            report.search_nodes = Some(stats.branch_nodes);
            v
        }
        Strategy::Width2 => check_width2_D(structure, team, phi)?,
        Strategy::Twosat => {
            if fragment != FragmentTag::BcSplitIndep {
                return Err(PipelineError::Fragment(format!(
                    "twosat needs a disjunction of two independence closure members, formula is {fragment}"
                )));
            }
            split_2sat_verdict(structure, team, phi, SplitOptions::default())?
        }
        Strategy::Dualhorn => {
            let (cnf, _) = compile_dualhorn(structure, team, phi)?;
            report.cnf_vars = Some(cnf.num_vars());
            report.cnf_clauses = Some(cnf.len());
            solve_dual_horn(&cnf).map_err(CompileError::from)?.is_sat()
        }
        Strategy::Cnf => {
            let (cnf, _) = compile_cnf_general(structure, team, phi)?;
            report.cnf_vars = Some(cnf.num_vars());
            report.cnf_clauses = Some(cnf.len());
            solve_dpll(&cnf).is_sat()
        }
    };
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Every explicit strategy whose fragment covers `φ`, in [`Strategy::ALL`]
/// order. Brute force always applies.
pub fn applicable_strategies(phi: &Formula) -> Vec<Strategy> {
    let tag = classify(phi);
    let mut out = vec![Strategy::Brute];
    let mut universal = true;
    phi.walk(&mut |f| universal &= !matches!(f, Formula::Or(..) | Formula::Exists(..)));
    if universal {
        out.push(Strategy::Universal);
    }
    if matches!(tag, FragmentTag::WidthOneQF | FragmentTag::WidthTwoQF_D) {
        out.push(Strategy::Width2);
    }
    if tag == FragmentTag::BcSplitIndep {
        out.push(Strategy::Twosat);
    }
    if phi.is_union_closed() {
        out.push(Strategy::Dualhorn);
    }
    out.push(Strategy::Cnf);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn instance() -> (Structure, Team) {
        let mut a = Structure::with_size(2);
        a.add_named_relation("R", 1, &[&["0"], &["1"]]).unwrap();
        let x = Team::from_indices(["x", "y"], &[&[0, 1], &[1, 0]]).unwrap();
        (a, x)
    }

    #[test]
    fn auto_routes_by_fragment() {
        let (a, x) = instance();
        let b = EvalBudget::default();
        let r = run_check(&a, &x, &parse("A x . (=(x;y) & R(x))").unwrap(), Strategy::Auto, b).unwrap();
        assert_eq!(r.strategy, Strategy::Universal);
        assert!(!r.verdict);
        let r = run_check(&a, &x, &parse("=(x;y) | x = y").unwrap(), Strategy::Auto, b).unwrap();
        assert_eq!(r.strategy, Strategy::Width2);
        let r = run_check(&a, &x, &parse("inc(x;y) | inc(y;x)").unwrap(), Strategy::Auto, b).unwrap();
        assert_eq!((r.strategy, r.verdict), (Strategy::Dualhorn, true));
    }

    #[test]
    fn mismatched_strategies() {
        let (a, x) = instance();
        let b = EvalBudget::default();
        let wide = parse("=(x;y) | =(x;y) | =(x;y)").unwrap();
        assert!(matches!(run_check(&a, &x, &wide, Strategy::Width2, b), Err(PipelineError::Fragment(_))));
        let dep = parse("=(x;y)").unwrap();
        assert!(matches!(run_check(&a, &x, &dep, Strategy::Dualhorn, b), Err(PipelineError::Fragment(_))));
        assert!(matches!(run_check(&a, &x, &dep, Strategy::Twosat, b), Err(PipelineError::Fragment(_))));
        let unknown = parse("=(x;q)").unwrap();
        assert!(matches!(run_check(&a, &x, &unknown, Strategy::Brute, b), Err(PipelineError::Invalid(_))));
    }

    #[test]
    fn applicable_strategies_agree() {
        let (a, x) = instance();
        for text in ["inc(x;y)", "perp(x;;y) | perp(x;;y)", "A z . inc(z;x)", "=(x;y) | x = y"] {
            let phi = parse(text).unwrap();
            let verdicts: Vec<bool> = applicable_strategies(&phi)
                .into_iter()
                .map(|s| run_check(&a, &x, &phi, s, EvalBudget::default()).unwrap().verdict)
                .collect();
            assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{text}: {verdicts:?}");
        }
    }
}
