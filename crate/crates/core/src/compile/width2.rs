use super::CompileError;
use crate::eval::{check_brute, eval_fo, validate, EvalBudget, Env, Evaluator};
use crate::formula::{classify, disjunction_width, Formula, FragmentTag};
use crate::model::{Elem, Structure, Team};
use crate::satcore::{solve_2sat, Cnf, Lit};

/// Decide a quantifier-free dependence formula of disjunction-width at most 2.
///
/// First-order disjuncts absorb the rows satisfying them; conjunctions are
/// checked side by side; a disjunction of two width-1 formulas becomes a
/// 2-CNF over "row goes left" / "row goes right", built from the verdicts on
/// all teams of one or two rows.
#[allow(non_snake_case)]
pub fn check_width2_D(structure: &Structure, team: &Team, phi: &Formula) -> Result<bool, CompileError> {
    match classify(phi) {
        FragmentTag::WidthOneQF | FragmentTag::WidthTwoQF_D => {}
        tag => {
            return Err(CompileError::Fragment(format!(
                "expected a quantifier-free dependence formula of width at most 2, found {tag}"
            )))
        }
    }
    validate(structure, team.vars(), phi)?;
    let rows: Vec<Vec<Elem>> = team.rows().cloned().collect();
    let mut ev = Evaluator::new(structure, EvalBudget::default());
    Width2 {
        structure,
        team,
        ev: &mut ev,
    }
    .check(&rows, phi)
}

struct Width2<'a, 'e> {
    structure: &'a Structure,
    team: &'a Team,
    ev: &'e mut Evaluator<'a>,
}

impl Width2<'_, '_> {
    fn fo(&self, row: &[Elem], phi: &Formula) -> bool {
        eval_fo(self.structure, &mut Env::new(self.team.vars(), row), phi)
    }

    fn sub(&mut self, rows: &[&Vec<Elem>], phi: &Formula) -> Result<bool, CompileError> {
        let t = self.team.with_rows(rows.iter().copied());
        Ok(self.ev.check(&t, phi)?)
    }

    fn check(&mut self, rows: &[Vec<Elem>], phi: &Formula) -> Result<bool, CompileError> {
        if rows.is_empty() {
            return Ok(true);
        }
        if phi.is_first_order() {
            return Ok(rows.iter().all(|r| self.fo(r, phi)));
        }
        match phi {
            Formula::And(a, b) => Ok(self.check(rows, a)? && self.check(rows, b)?),
            Formula::Or(a, b) if b.is_first_order() || a.is_first_order() => {
                let (rest, fo) = if b.is_first_order() { (a, b) } else { (b, a) };
                let left: Vec<Vec<Elem>> = rows.iter().filter(|r| !self.fo(r, fo)).cloned().collect();
                self.check(&left, rest)
            }
            Formula::Or(a, b) => {
                debug_assert!(disjunction_width(a) <= 1 && disjunction_width(b) <= 1);
                self.split(rows, a, b)
            }
            atom => {
                let t = self.team.with_rows(rows.iter());
                Ok(check_brute(self.structure, &t, atom, EvalBudget::default())?)
            }
        }
    }

    /// `Y[i]` is variable `i+1`, `Z[i]` is `n+i+1`.
    fn split(&mut self, rows: &[Vec<Elem>], a: &Formula, b: &Formula) -> Result<bool, CompileError> {
        let n = rows.len() as u32;
        let mut cnf = Cnf::new(2 * n);
        for (offset, side) in [(0, a), (n, b)] {
            for i in 0..rows.len() {
                let v = offset + i as u32 + 1;
                if !self.sub(&[&rows[i]], side)? {
                    cnf.add([Lit::neg(v)]);
                    continue;
                }
                for j in i + 1..rows.len() {
                    if !self.sub(&[&rows[i], &rows[j]], side)? {
                        cnf.add([Lit::neg(v), Lit::neg(offset + j as u32 + 1)]);
                    }
                }
            }
        }
        for i in 1..=n {
            cnf.add([Lit::pos(i), Lit::pos(n + i)]);
        }
        Ok(solve_2sat(&cnf)?.is_sat())
    }
}
