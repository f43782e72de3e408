//! Boolean closures of one independence atom, and the 2-CNF reduction for
//! disjunctions of two of them.
//!
//! In normal form such a formula is
//! `((..((x̄ ⊥_z̄ ȳ ∧ φ1) ∨ ψ1) ∧ ..) ∧ φk) ∨ ψk` with first-order `φi`, `ψi`.
//! A row can leave the atom's subteam at layer `i` when it satisfies `ψi`
//! and every later `φj` (it *escapes*), and can stay in it only when it
//! satisfies every `φi` (it lies in `C+`). Rows in `C+` that cannot escape
//! are forced into the atom's subteam, so every ordered pair of them that
//! agrees on `z̄` needs a witness row, and that witness must itself be able
//! to stay, i.e. come from `X ∩ C+`.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::CompileError;
use crate::eval::{eval_fo, validate, Env};
use crate::formula::{is_bc_member, Formula, Var};
use crate::model::{Elem, Structure, Team};
use crate::satcore::{solve_2sat, Cnf, Lit, VarMap};

/// One `∧ φi` step followed by one `∨ ψi` step. A missing side stands for
/// `⊤` (conjunction) or `⊥` (disjunction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcLayer {
    pub conj: Option<Formula>,
    pub disj: Option<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedBc {
    /// The independence atom.
    pub atom: Formula,
    /// Layers from the atom outwards.
    pub layers: Vec<BcLayer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AdmissibleKind {
    /// Escapes, and is not in `C+`: must be covered by a first-order part.
    ByFoPart,
    /// In `C+` and cannot escape: forced into the atom's subteam.
    ByAtomPart,
    /// In `C+` and can escape: may go either way.
    Both,
    /// Neither escapes nor lies in `C+`: the formula fails on any team
    /// containing it.
    Neither,
}

impl AdmissibleKind {
    pub fn atom_eligible(self) -> bool {
        matches!(self, AdmissibleKind::ByAtomPart | AdmissibleKind::Both)
    }
}

/// Bring a member of the Boolean closure into normal form. Consecutive
/// conjunction (disjunction) steps are merged into one `φi` (`ψi`).
pub fn normalize_bc(phi: &Formula) -> Result<NormalizedBc, CompileError> {
    let mut steps: Vec<(bool, &Formula)> = Vec::new();
    let mut cur = phi;
    let atom = loop {
        match cur {
            Formula::Indep { .. } => break cur.clone(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let is_and = matches!(cur, Formula::And(..));
                if is_bc_member(a) && b.is_first_order() {
                    steps.push((is_and, b));
                    cur = a;
                } else if a.is_first_order() && is_bc_member(b) {
                    steps.push((is_and, a));
                    cur = b;
                } else {
                    return Err(CompileError::NotBcMember(format!(
                        "`{cur}` does not combine one closure member with a first-order formula"
                    )));
                }
            }
            _ => {
                return Err(CompileError::NotBcMember(format!(
                    "`{cur}` is not built from an independence atom by conjunction and disjunction"
                )))
            }
        }
    };
    let mut layers = Vec::new();
    let mut layer = BcLayer {
        conj: None,
        disj: None,
    };
    for (is_and, fo) in steps.into_iter().rev() {
        if is_and {
            if layer.disj.is_some() {
                layers.push(std::mem::replace(
                    &mut layer,
                    BcLayer {
                        conj: None,
                        disj: None,
                    },
                ));
            }
            layer.conj = Some(match layer.conj.take() {
                Some(c) => Formula::and(c, fo.clone()),
                None => fo.clone(),
            });
        } else {
            layer.disj = Some(match layer.disj.take() {
                Some(d) => Formula::or(d, fo.clone()),
                None => fo.clone(),
            });
        }
    }
    if layer.conj.is_some() || layer.disj.is_some() {
        layers.push(layer);
    }
    Ok(NormalizedBc { atom, layers })
}

impl NormalizedBc {
    pub fn k(&self) -> usize {
        self.layers.len()
    }

    /// The nested formula this normal form denotes.
    pub fn to_formula(&self) -> Formula {
        let mut f = self.atom.clone();
        for l in &self.layers {
            if let Some(c) = &l.conj {
                f = Formula::and(f, c.clone());
            }
            if let Some(d) = &l.disj {
                f = Formula::or(f, d.clone());
            }
        }
        f
    }

    fn parts(&self) -> (&[Var], &[Var], &[Var]) {
        match &self.atom {
            Formula::Indep { left, cond, right } => (left, cond, right),
            _ => unreachable!("normal form holds an independence atom"),
        }
    }

    fn kind(&self, structure: &Structure, vars: &[Var], s: &[Elem]) -> AdmissibleKind {
        let holds = |f: &Formula| eval_fo(structure, &mut Env::new(vars, s), f);
        let conj: Vec<bool> = self
            .layers
            .iter()
            .map(|l| l.conj.as_ref().is_none_or(&holds))
            .collect();
        let in_plus = conj.iter().all(|&b| b);
        let escapes = self.layers.iter().enumerate().any(|(i, l)| {
            l.disj.as_ref().is_some_and(&holds) && conj[i + 1..].iter().all(|&b| b)
        });
        match (escapes, in_plus) {
            (true, true) => AdmissibleKind::Both,
            (true, false) => AdmissibleKind::ByFoPart,
            (false, true) => AdmissibleKind::ByAtomPart,
            (false, false) => AdmissibleKind::Neither,
        }
    }
}

/// How `s` can be accommodated by the normalised formula.
pub fn per_assignment_admissible(
    structure: &Structure,
    team: &Team,
    s: &[Elem],
    nbc: &NormalizedBc,
) -> AdmissibleKind {
    nbc.kind(structure, team.vars(), s)
}

fn key(team: &Team, s: &[Elem], vs: &[Var]) -> Vec<Elem> {
    vs.iter()
        .map(|v| s[team.column(v).expect("validated variable")])
        .collect()
}

/// A row of `X ∩ C+` carrying `s1`'s values on `x̄ z̄` and `s2`'s on `ȳ`.
pub fn witness_of(
    structure: &Structure,
    team: &Team,
    s1: &[Elem],
    s2: &[Elem],
    nbc: &NormalizedBc,
) -> Option<Vec<Elem>> {
    let (x, z, y) = nbc.parts();
    let want = (key(team, s1, x), key(team, s1, z), key(team, s2, y));
    team.rows()
        .find(|t| {
            (key(team, t, x), key(team, t, z), key(team, t, y)) == want
                && nbc.kind(structure, team.vars(), t).atom_eligible()
        })
        .cloned()
}

/// Pairs that do not both sit forced in the atom's subteam, or that differ
/// on `z̄`, are compatible vacuously; otherwise a witness must exist.
pub fn compatible(
    structure: &Structure,
    team: &Team,
    s1: &[Elem],
    s2: &[Elem],
    nbc: &NormalizedBc,
) -> bool {
    let forced = |s: &[Elem]| nbc.kind(structure, team.vars(), s) == AdmissibleKind::ByAtomPart;
    let (_, z, _) = nbc.parts();
    if !forced(s1) || !forced(s2) || key(team, s1, z) != key(team, s2, z) {
        return true;
    }
    witness_of(structure, team, s1, s2, nbc).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitOptions {
    /// Emit `¬Y[s]` (`¬Z[s]`) for rows that cannot be placed on that side at
    /// all. Turning this off reproduces the bare pair-and-cover encoding,
    /// which accepts some false instances.
    pub unit_clauses: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { unit_clauses: true }
    }
}

/// Clauses restricting one side (`offset` 0 for `Y`, `n` for `Z`).
fn side_clauses(
    structure: &Structure,
    team: &Team,
    rows: &[&Vec<Elem>],
    nbc: &NormalizedBc,
    offset: u32,
    opts: SplitOptions,
    cnf: &mut Cnf,
) {
    let kinds: Vec<AdmissibleKind> = rows
        .iter()
        .map(|s| nbc.kind(structure, team.vars(), s))
        .collect();
    let (x, z, y) = nbc.parts();
    let pool: HashSet<(Vec<Elem>, Vec<Elem>, Vec<Elem>)> = rows
        .iter()
        .zip(&kinds)
        .filter(|(_, k)| k.atom_eligible())
        .map(|(s, _)| (key(team, s, x), key(team, s, z), key(team, s, y)))
        .collect();
    let mut by_z: BTreeMap<Vec<Elem>, Vec<usize>> = BTreeMap::new();
    for (i, s) in rows.iter().enumerate() {
        match kinds[i] {
            AdmissibleKind::ByAtomPart => by_z.entry(key(team, s, z)).or_default().push(i),
            AdmissibleKind::Neither if opts.unit_clauses => {
                cnf.add([Lit::neg(offset + i as u32 + 1)]);
            }
            _ => {}
        }
    }
    let has_witness = |a: &Vec<Elem>, b: &Vec<Elem>| {
        pool.contains(&(key(team, a, x), key(team, a, z), key(team, b, y)))
    };
    for group in by_z.values() {
        for (gi, &i) in group.iter().enumerate() {
            for &j in &group[gi + 1..] {
                if !has_witness(rows[i], rows[j]) || !has_witness(rows[j], rows[i]) {
                    cnf.add([
                        Lit::neg(offset + i as u32 + 1),
                        Lit::neg(offset + j as u32 + 1),
                    ]);
                }
            }
        }
    }
}

/// 2-CNF over `Y[s]`, `Z[s]` (`s ∈ X`) satisfiable iff `𝔄 ⊨_X φ1 ∨ φ2`.
/// Variables `1..=n` are `Y`, `n+1..=2n` are `Z`, rows in team order.
pub fn compile_split_2sat(
    structure: &Structure,
    team: &Team,
    phi1: &Formula,
    phi2: &Formula,
    opts: SplitOptions,
) -> Result<(Cnf, VarMap), CompileError> {
    validate(structure, team.vars(), phi1)?;
    validate(structure, team.vars(), phi2)?;
    let n1 = normalize_bc(phi1)?;
    let n2 = normalize_bc(phi2)?;
    let rows: Vec<&Vec<Elem>> = team.rows().collect();
    let n = rows.len() as u32;
    let mut map = VarMap::new();
    for label in ["Y", "Z"] {
        for s in &rows {
            let names = s.iter().map(|&e| structure.name(e).to_string()).collect();
            map.intern(label, names);
        }
    }
    let mut cnf = Cnf::new(2 * n);
    for i in 1..=n {
        cnf.add([Lit::pos(i), Lit::pos(n + i)]);
    }
    side_clauses(structure, team, &rows, &n1, 0, opts, &mut cnf);
    side_clauses(structure, team, &rows, &n2, n, opts, &mut cnf);
    Ok((cnf, map))
}

/// Decide `𝔄 ⊨_X φ` for `φ = φ1 ∨ φ2` through [`compile_split_2sat`].
pub fn split_2sat_verdict(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
    opts: SplitOptions,
) -> Result<bool, CompileError> {
    let Formula::Or(a, b) = phi else {
        return Err(CompileError::Fragment(
            "expected a disjunction of two closure members".into(),
        ));
    };
    let (cnf, _) = compile_split_2sat(structure, team, a, b, opts)?;
    Ok(solve_2sat(&cnf)?.is_sat())
}
