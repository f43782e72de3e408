use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{disjunction_width, AtomKind, Formula};

/// Syntactic fragment of a formula, used to pick a checking pipeline.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FragmentTag {
    /// Only `∀` quantifiers (at least one) and `∧`.
    UniversalConj,
    /// Quantifier-free, dependence atoms only, disjunction-width ≤ 1.
    WidthOneQF,
    /// Quantifier-free, dependence atoms only, disjunction-width 2.
    WidthTwoQF_D,
    /// A disjunction of two Boolean closures of a single independence atom.
    BcSplitIndep,
    /// Only inclusion atoms.
    InclusionOnly,
    General,
}

impl FragmentTag {
    pub fn name(self) -> &'static str {
        match self {
            FragmentTag::UniversalConj => "UniversalConj",
            FragmentTag::WidthOneQF => "WidthOneQF",
            FragmentTag::WidthTwoQF_D => "WidthTwoQF_D",
            FragmentTag::BcSplitIndep => "BcSplitIndep",
            FragmentTag::InclusionOnly => "InclusionOnly",
            FragmentTag::General => "General",
        }
    }
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FragmentTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            FragmentTag::UniversalConj,
            FragmentTag::WidthOneQF,
            FragmentTag::WidthTwoQF_D,
            FragmentTag::BcSplitIndep,
            FragmentTag::InclusionOnly,
            FragmentTag::General,
        ]
        .into_iter()
        .find(|t| t.name() == s)
        .ok_or_else(|| format!("unknown fragment `{s}`"))
    }
}

/// Classify a formula. When several fragments match, the first one in the
/// order of [`FragmentTag`]'s variants wins.
pub fn classify(phi: &Formula) -> FragmentTag {
    if is_universal_conj(phi) {
        return FragmentTag::UniversalConj;
    }
    let dep_only = phi.atom_kinds().iter().all(|k| *k == AtomKind::Dep);
    if phi.is_quantifier_free() && dep_only {
        match disjunction_width(phi) {
            0 | 1 => return FragmentTag::WidthOneQF,
            2 => return FragmentTag::WidthTwoQF_D,
            _ => {}
        }
    }
    if let Formula::Or(a, b) = phi {
        if is_bc_member(a) && is_bc_member(b) {
            return FragmentTag::BcSplitIndep;
        }
    }
    if phi.is_union_closed() {
        return FragmentTag::InclusionOnly;
    }
    FragmentTag::General
}

/// Built from `∀` and `∧` only, with at least one `∀`.
fn is_universal_conj(phi: &Formula) -> bool {
    fn shape(phi: &Formula, seen_forall: &mut bool) -> bool {
        match phi {
            Formula::Exists(..) | Formula::Or(..) => false,
            Formula::Forall(_, body) => {
                *seen_forall = true;
                shape(body, seen_forall)
            }
            Formula::And(a, b) => shape(a, seen_forall) && shape(b, seen_forall),
            _ => true,
        }
    }
    let mut seen = false;
    shape(phi, &mut seen) && seen
}

/// Membership in the Boolean closure of one independence atom by first-order
/// formulas: exactly one dependency atom, it is an independence atom, and the
/// path from the root down to it passes through `∧` and `∨` only.
pub fn is_bc_member(phi: &Formula) -> bool {
    match phi {
        Formula::Indep { .. } => true,
        Formula::And(a, b) | Formula::Or(a, b) => {
            (is_bc_member(a) && b.is_first_order()) || (a.is_first_order() && is_bc_member(b))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn tag(text: &str) -> FragmentTag {
        classify(&parse(text).unwrap())
    }

    #[test]
    fn universal_conjunction() {
        assert_eq!(tag("A x . (=(x;y) & R(x))"), FragmentTag::UniversalConj);
        assert_eq!(tag("A x . A y . inc(x;y)"), FragmentTag::UniversalConj);
        assert_eq!(tag("A x . (=(x;y) | R(x))"), FragmentTag::General);
    }

    #[test]
    fn bc_split() {
        assert_eq!(
            tag("(perp(x;t;y) & w != v) | perp(c1;c;c2)"),
            FragmentTag::BcSplitIndep
        );
        assert_eq!(
            tag("(perp(x;z;y) & R(x)) | y = z | perp(x;;y)"),
            FragmentTag::BcSplitIndep
        );
        // Two atoms on one side leaves the fragment.
        assert_eq!(
            tag("(perp(x;t;y) & !One(w)) | (perp(c1;c;c2) & perp(x;z;y))"),
            FragmentTag::General
        );
    }

    #[test]
    fn inclusion_only() {
        assert_eq!(tag("inc(x;y)"), FragmentTag::InclusionOnly);
        assert_eq!(tag("E z . (inc(x;z) & inc(z;y))"), FragmentTag::InclusionOnly);
    }

    #[test]
    fn dependence_widths() {
        assert_eq!(tag("=(x;y)"), FragmentTag::WidthOneQF);
        assert_eq!(tag("R(x) & x = y"), FragmentTag::WidthOneQF);
        assert_eq!(tag("=(x;y) | =(u;v)"), FragmentTag::WidthTwoQF_D);
        assert_eq!(tag("=(x;y) | =(z;v) | =(z;v)"), FragmentTag::General);
        assert_eq!(tag("E x . =(x;y)"), FragmentTag::General);
    }

    #[test]
    fn bc_membership() {
        assert!(is_bc_member(&parse("perp(x;z;y)").unwrap()));
        assert!(is_bc_member(&parse("R(x) | (perp(x;z;y) & E u . S(u,x))").unwrap()));
        assert!(!is_bc_member(&parse("=(x;y)").unwrap()));
        assert!(!is_bc_member(&parse("E u . perp(x;z;y)").unwrap()));
        assert!(!is_bc_member(&parse("R(x)").unwrap()));
    }

    #[test]
    fn tag_names_round_trip() {
        for t in [
            FragmentTag::UniversalConj,
            FragmentTag::WidthOneQF,
            FragmentTag::WidthTwoQF_D,
            FragmentTag::BcSplitIndep,
            FragmentTag::InclusionOnly,
            FragmentTag::General,
        ] {
            assert_eq!(t.name().parse::<FragmentTag>().unwrap(), t);
        }
    }
}
