use std::fmt::Write as _;

use super::{GadgetError, GadgetInstance, Provenance};
use crate::formula::Formula;
use crate::model::{Elem, Structure, Team};
use crate::satcore::{parse_dimacs_raw, Cnf, Lit};

/// A CNF with exactly three literals per clause. Repeated literals are
/// allowed, so shorter clauses can be padded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3Instance {
    num_vars: u32,
    clauses: Vec<[Lit; 3]>,
}

impl Cnf3Instance {
    pub fn new(num_vars: u32, clauses: Vec<[Lit; 3]>) -> Result<Cnf3Instance, GadgetError> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var() > num_vars) {
                return Err(GadgetError::MalformedClause(
                    i + 1,
                    format!("literal {l} exceeds {num_vars} variables"),
                ));
            }
        }
        Ok(Cnf3Instance { num_vars, clauses })
    }

    /// Read DIMACS; clauses with one or two literals are padded by repeating
    /// their last literal.
    pub fn from_dimacs(text: &str) -> Result<Cnf3Instance, GadgetError> {
        let (num_vars, raw) = parse_dimacs_raw(text)?;
        let mut clauses = Vec::with_capacity(raw.len());
        for (i, c) in raw.iter().enumerate() {
            if c.is_empty() || c.len() > 3 {
                return Err(GadgetError::MalformedClause(
                    i + 1,
                    format!("has {} literals, expected 1 to 3", c.len()),
                ));
            }
            let last = *c.last().unwrap();
            let pick = |k: usize| Lit::from_dimacs(*c.get(k).unwrap_or(&last));
            clauses.push([pick(0), pick(1), pick(2)]);
        }
        Cnf3Instance::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    /// DIMACS text, keeping repeated literals.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            writeln!(out, "{} {} {} 0", c[0], c[1], c[2]).unwrap();
        }
        out
    }

    pub fn to_cnf(&self) -> Cnf {
        let mut f = Cnf::new(self.num_vars);
        for c in &self.clauses {
            f.add(c.iter().copied());
        }
        f
    }
}

fn lit_name(l: Lit) -> String {
    if l.is_pos() {
        format!("v{}", l.var())
    } else {
        format!("neg_v{}", l.var())
    }
}

/// Team over `w c c1 c2 z x y t` with six rows per clause and two per
/// variable, checked against
/// `(w ≠ 1 ∧ x ⊥_t y) ∨ (c1 ⊥_c c2 ∧ x ⊥_z y)`.
///
/// `w ≠ 1` is written `!One(w)` with `One = {1}`. A literal row's `z` is the
/// element `var{j}` of its variable `v_j`, shared with the two rows of `v_j`,
/// so that a literal placed on the right must agree with the truth value
/// chosen for its variable there.
pub fn gadget_3sat(inst: &Cnf3Instance) -> Result<GadgetInstance, GadgetError> {
    let m = inst.num_vars as usize;
    let n = inst.clauses.len();
    let mut names: Vec<String> = vec!["0".into(), "1".into()];
    for j in 1..=m {
        names.extend([format!("v{j}"), format!("neg_v{j}"), format!("var{j}")]);
    }
    for i in 1..=n {
        names.push(format!("cl{i}"));
        names.extend((1..=4).map(|k| format!("a{}", 6 * i + k)));
    }
    names.extend((1..=m).map(|j| format!("a{}", 6 * (n + 1) + j)));
    let mut structure = Structure::new(names)?;
    structure.add_named_relation("One", 1, &[&["1"]])?;

    let mut team = Team::new(["w", "c", "c1", "c2", "z", "x", "y", "t"])?;
    let mut push = |row: [&str; 8]| -> Result<(), GadgetError> {
        let row: Vec<Elem> = structure.elems(&row)?;
        team.insert(row)?;
        Ok(())
    };
    for (i0, clause) in inst.clauses.iter().enumerate() {
        let i = i0 + 1;
        let c = format!("cl{i}");
        for (k, &l) in clause.iter().enumerate() {
            let (z, x, t) = (format!("var{}", l.var()), lit_name(l), format!("a{}", 6 * i + k + 1));
            push(["0", &c, "1", "1", &z, &x, &x, &t])?;
        }
        let t = format!("a{}", 6 * i + 4);
        for (c1, c2) in [("0", "0"), ("1", "0"), ("0", "1")] {
            push(["1", &c, c1, c2, "0", "0", "0", &t])?;
        }
    }
    for j in 1..=m {
        let (z, t) = (format!("var{j}"), format!("a{}", 6 * (n + 1) + j));
        for x in [format!("v{j}"), format!("neg_v{j}")] {
            push(["0", "0", "0", "0", &z, &x, &x, &t])?;
        }
    }

    let formula = Formula::or(
        Formula::and(
            Formula::not_rel("One", &["w"]),
            Formula::indep(&["x"], &["t"], &["y"]),
        ),
        Formula::and(
            Formula::indep(&["c1"], &["c"], &["c2"]),
            Formula::indep(&["x"], &["z"], &["y"]),
        ),
    );
    Ok(GadgetInstance {
        structure,
        team,
        formula,
        provenance: Provenance {
            generator: "3sat",
            source: inst.to_dimacs(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{classify, parse, FragmentTag};

    #[test]
    fn row_counts() {
        let one = Cnf3Instance::from_dimacs("p cnf 1 1\n1 1 1 0\n").unwrap();
        assert_eq!(gadget_3sat(&one).unwrap().team.len(), 8);
        let two = Cnf3Instance::from_dimacs("p cnf 3 2\n1 -2 3 0\n-1 2 0\n").unwrap();
        assert_eq!(two.clauses()[1], [Lit::neg(1), Lit::pos(2), Lit::pos(2)]);
        assert_eq!(gadget_3sat(&two).unwrap().team.len(), 6 * 2 + 2 * 3);
    }

    #[test]
    fn formula_shape() {
        let g = gadget_3sat(&Cnf3Instance::new(1, vec![[Lit::pos(1); 3]]).unwrap()).unwrap();
        let text = "(!One(w) & perp(x;t;y)) | (perp(c1;c;c2) & perp(x;z;y))";
        assert_eq!(g.formula, parse(text).unwrap());
        // The right disjunct holds two atoms, so this is not a split of two
        // closure members.
        assert_eq!(classify(&g.formula), FragmentTag::General);
    }

    #[test]
    fn rejects_bad_clauses() {
        assert!(Cnf3Instance::from_dimacs("p cnf 4 1\n1 2 3 4 0\n").is_err());
        assert!(Cnf3Instance::new(1, vec![[Lit::pos(2); 3]]).is_err());
    }
}
