use serde::Serialize;

use super::{atom_holds, fo_row, validate, EvalError, Tab};
use crate::formula::Formula;
use crate::model::{Structure, Team};

/// Work done by [`check_universal_conj`]. There is no search, so
/// `branch_nodes` stays zero; it is reported so callers can confirm that.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct UniversalStats {
    pub expanded_rows: usize,
    pub atom_checks: usize,
    pub branch_nodes: u64,
}

/// Deterministic check for formulas built from `∀` and `∧`: expand every
/// universal quantifier and test each literal and atom on the resulting team.
pub fn check_universal_conj(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
) -> Result<(bool, UniversalStats), EvalError> {
    validate(structure, team.vars(), phi)?;
    let mut stats = UniversalStats::default();
    let tab = Tab::from_team(team);
    let ok = go(structure, &tab, phi, &mut stats)?;
    Ok((ok, stats))
}

fn go(
    structure: &Structure,
    tab: &Tab,
    phi: &Formula,
    stats: &mut UniversalStats,
) -> Result<bool, EvalError> {
    match phi {
        Formula::And(a, b) => Ok(go(structure, tab, a, stats)? && go(structure, tab, b, stats)?),
        Formula::Forall(x, body) => {
            let all: Vec<usize> = (0..tab.len()).collect();
            let (ext, _) = tab.expand(&all, x, structure.size());
            stats.expanded_rows += ext.len();
            go(structure, &ext, body, stats)
        }
        Formula::Or(..) | Formula::Exists(..) => Err(EvalError::Fragment(
            "only universal quantifiers and conjunctions are allowed".into(),
        )),
        Formula::Dep { .. } | Formula::Indep { .. } | Formula::Inc { .. } => {
            stats.atom_checks += 1;
            let all: Vec<usize> = (0..tab.len()).collect();
            Ok(atom_holds(tab, &all, phi))
        }
        Formula::Rel { .. } | Formula::Eq { .. } => {
            stats.atom_checks += 1;
            Ok((0..tab.len()).all(|r| fo_row(structure, tab, r, phi)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn examples() {
        let a = Structure::with_size(2);
        let x = Team::from_indices(["y"], &[&[0]]).unwrap();
        let (ok, stats) = check_universal_conj(&a, &x, &parse("A x . =(x;y)").unwrap()).unwrap();
        assert!(ok);
        assert_eq!(stats.expanded_rows, 2);
        assert_eq!(stats.branch_nodes, 0);

        let a = Structure::with_size(3);
        let x = Team::from_indices(["y"], &[&[0], &[2]]).unwrap();
        assert!(check_universal_conj(&a, &x, &parse("A x . inc(y;x)").unwrap()).unwrap().0);

        let empty = Team::new(["y"]).unwrap();
        assert!(check_universal_conj(&a, &empty, &parse("A x . x = y").unwrap()).unwrap().0);
    }

    #[test]
    fn rejects_other_connectives() {
        let a = Structure::with_size(2);
        let x = Team::from_indices(["y"], &[&[0]]).unwrap();
        assert!(matches!(
            check_universal_conj(&a, &x, &parse("A x . (x = y | =(x;y))").unwrap()),
            Err(EvalError::Fragment(_))
        ));
    }
}
