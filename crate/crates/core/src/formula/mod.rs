//! Formulas of first-order logic extended with dependence, independence and
//! inclusion atoms, kept in negation normal form.
//!
//! Negation only ever appears as the polarity of a relational or equality
//! literal. The concrete syntax is documented on [`parse`].

mod classify;
mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;

pub use classify::{classify, is_bc_member, FragmentTag};
pub use parse::{parse, FormulaError};
pub use render::render;

/// A variable name.
pub type Var = String;

/// A formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `R(x1,...,xn)` or `!R(x1,...,xn)`.
    Rel {
        name: String,
        args: Vec<Var>,
        positive: bool,
    },
    /// `x = y` or `x != y`.
    Eq {
        left: Var,
        right: Var,
        positive: bool,
    },
    /// `=(cond; target)`: the values of `cond` functionally determine `target`.
    Dep { cond: Vec<Var>, target: Var },
    /// `perp(left; cond; right)`: `left` is independent of `right` given `cond`.
    ///
    /// The argument order follows the usual reading `left ⊥_cond right`; an
    /// empty `cond` gives the pure independence atom.
    Indep {
        left: Vec<Var>,
        cond: Vec<Var>,
        right: Vec<Var>,
    },
    /// `inc(left; right)`: every value of `left` also occurs as a value of `right`.
    Inc { left: Vec<Var>, right: Vec<Var> },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

/// Which kind of dependency atom a formula node is, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Dep,
    Indep,
    Inc,
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Formula {
        Formula::Rel {
            name: name.to_string(),
            args: vars(args),
            positive: true,
        }
    }

    pub fn not_rel(name: &str, args: &[&str]) -> Formula {
        Formula::Rel {
            name: name.to_string(),
            args: vars(args),
            positive: false,
        }
    }

    pub fn eq(left: &str, right: &str) -> Formula {
        Formula::Eq {
            left: left.to_string(),
            right: right.to_string(),
            positive: true,
        }
    }

    pub fn neq(left: &str, right: &str) -> Formula {
        Formula::Eq {
            left: left.to_string(),
            right: right.to_string(),
            positive: false,
        }
    }

    pub fn dep(cond: &[&str], target: &str) -> Formula {
        Formula::Dep {
            cond: vars(cond),
            target: target.to_string(),
        }
    }

    pub fn indep(left: &[&str], cond: &[&str], right: &[&str]) -> Formula {
        Formula::Indep {
            left: vars(left),
            cond: vars(cond),
            right: vars(right),
        }
    }

    /// Panics if the tuples differ in length; use [`parse`] for checked input.
    pub fn inc(left: &[&str], right: &[&str]) -> Formula {
        assert_eq!(left.len(), right.len(), "inclusion tuples must have equal length");
        Formula::Inc {
            left: vars(left),
            right: vars(right),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    /// Left-nested disjunction of a non-empty list.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    /// Left-nested conjunction of a non-empty list.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Rel { .. } | Formula::Eq { .. })
    }

    pub fn atom_kind(&self) -> Option<AtomKind> {
        match self {
            Formula::Dep { .. } => Some(AtomKind::Dep),
            Formula::Indep { .. } => Some(AtomKind::Indep),
            Formula::Inc { .. } => Some(AtomKind::Inc),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        self.atom_kind().is_some()
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Exists(_, body) | Formula::Forall(_, body) => vec![body],
            _ => Vec::new(),
        }
    }

    /// All dependency atoms, in left-to-right order.
    pub fn atoms(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if f.is_atom() {
                out.push(f);
            }
        });
        out
    }

    /// Kinds of dependency atoms occurring in the formula.
    pub fn atom_kinds(&self) -> BTreeSet<AtomKind> {
        self.atoms().iter().filter_map(|f| f.atom_kind()).collect()
    }

    /// True when no dependency atom occurs, i.e. the formula is first-order.
    pub fn is_first_order(&self) -> bool {
        match self {
            Formula::Rel { .. } | Formula::Eq { .. } => true,
            Formula::Dep { .. } | Formula::Indep { .. } | Formula::Inc { .. } => false,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_first_order() && b.is_first_order(),
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.is_first_order(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            _ => true,
        }
    }

    /// No independence or inclusion atoms: satisfaction is closed under subteams.
    pub fn is_downward_closed(&self) -> bool {
        self.atom_kinds().iter().all(|k| *k == AtomKind::Dep)
    }

    /// No dependence or independence atoms: a formula of inclusion logic,
    /// whose satisfaction is closed under unions of teams.
    pub fn is_union_closed(&self) -> bool {
        self.atom_kinds().iter().all(|k| *k == AtomKind::Inc)
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Depth of the syntax tree; literals and atoms have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Maximum number of nested quantifiers on any branch.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Exists(_, body) | Formula::Forall(_, body) => 1 + body.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            _ => 0,
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }

    /// Variables occurring in a literal or atom, in argument order.
    pub fn atom_vars(&self) -> Vec<&Var> {
        match self {
            Formula::Rel { args, .. } => args.iter().collect(),
            Formula::Eq { left, right, .. } => vec![left, right],
            Formula::Dep { cond, target } => cond.iter().chain(std::iter::once(target)).collect(),
            Formula::Indep { left, cond, right } => {
                left.iter().chain(cond.iter()).chain(right.iter()).collect()
            }
            Formula::Inc { left, right } => left.iter().chain(right.iter()).collect(),
            _ => Vec::new(),
        }
    }

    /// The free variables, `Fr(φ)`.
    pub fn free_variables(&self) -> BTreeSet<Var> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => {
                let mut out = a.free_variables();
                out.extend(b.free_variables());
                out
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let mut out = body.free_variables();
                out.remove(x);
                out
            }
            leaf => leaf.atom_vars().into_iter().cloned().collect(),
        }
    }
}

/// The disjunction-width: atoms count 1, literals 0, `∧` takes the maximum,
/// `∨` adds, quantifiers pass the width of their body through.
pub fn disjunction_width(phi: &Formula) -> usize {
    match phi {
        Formula::Rel { .. } | Formula::Eq { .. } => 0,
        Formula::Dep { .. } | Formula::Indep { .. } | Formula::Inc { .. } => 1,
        Formula::And(a, b) => disjunction_width(a).max(disjunction_width(b)),
        Formula::Or(a, b) => disjunction_width(a) + disjunction_width(b),
        Formula::Exists(_, body) | Formula::Forall(_, body) => disjunction_width(body),
    }
}

/// Free variables of `phi`.
pub fn free_variables(phi: &Formula) -> BTreeSet<Var> {
    phi.free_variables()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|s| s.to_string()).collect()
}
