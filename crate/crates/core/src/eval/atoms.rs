use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::Tab;
use crate::formula::Formula;
use crate::model::Elem;

/// Whether the rows `sel` of `tab` satisfy a dependency atom.
pub(crate) fn atom_holds(tab: &Tab, sel: &[usize], atom: &Formula) -> bool {
    match atom {
        Formula::Dep { cond, target } => {
            let cc = tab.cols(cond);
            let t = tab.col(target);
            let mut seen: HashMap<Vec<Elem>, Elem> = HashMap::new();
            sel.iter().all(|&r| {
                let v = tab.rows[r][t];
                *seen.entry(tab.key(r, &cc)).or_insert(v) == v
            })
        }
        Formula::Inc { left, right } => {
            let lc = tab.cols(left);
            let rc = tab.cols(right);
            let have: HashSet<Vec<Elem>> = sel.iter().map(|&r| tab.key(r, &rc)).collect();
            sel.iter().all(|&r| have.contains(&tab.key(r, &lc)))
        }
        Formula::Indep { .. } => indep_missing(tab, sel, atom, 1).is_empty(),
        _ => panic!("not a dependency atom"),
    }
}

/// Column layout of an independence atom `x̄ ⊥_z̄ ȳ`.
pub(crate) struct IndepCols {
    pub left: Vec<usize>,
    pub cond: Vec<usize>,
    pub right: Vec<usize>,
}

impl IndepCols {
    pub fn new(tab: &Tab, atom: &Formula) -> IndepCols {
        let Formula::Indep { left, cond, right } = atom else {
            panic!("not an independence atom")
        };
        IndepCols {
            left: tab.cols(left),
            cond: tab.cols(cond),
            right: tab.cols(right),
        }
    }

    /// The `x̄ z̄ ȳ` values a witness row must carry.
    pub fn witness_key(&self, tab: &Tab, r: usize) -> Vec<Elem> {
        let mut k = tab.key(r, &self.left);
        k.extend(tab.key(r, &self.cond));
        k.extend(tab.key(r, &self.right));
        k
    }
}

/// Up to `limit` witness keys `(x̄, z̄, ȳ)` that `sel` requires but lacks.
pub(crate) fn indep_missing(
    tab: &Tab,
    sel: &[usize],
    atom: &Formula,
    limit: usize,
) -> Vec<Vec<Elem>> {
    let cols = IndepCols::new(tab, atom);
    let present: HashSet<Vec<Elem>> = sel.iter().map(|&r| cols.witness_key(tab, r)).collect();
    let mut groups: BTreeMap<Vec<Elem>, (BTreeSet<Vec<Elem>>, BTreeSet<Vec<Elem>>)> =
        BTreeMap::new();
    for &r in sel {
        let g = groups.entry(tab.key(r, &cols.cond)).or_default();
        g.0.insert(tab.key(r, &cols.left));
        g.1.insert(tab.key(r, &cols.right));
    }
    let mut out = Vec::new();
    for (z, (ls, rs)) in &groups {
        for l in ls {
            for rv in rs {
                let mut k = l.clone();
                k.extend(z);
                k.extend(rv);
                if !present.contains(&k) {
                    out.push(k);
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
    }
    out
}

/// Value tuples `x̄` occurring in `sel` with no row carrying them as `ȳ`.
pub(crate) fn inc_missing(tab: &Tab, sel: &[usize], atom: &Formula) -> Vec<Vec<Elem>> {
    let Formula::Inc { left, right } = atom else {
        panic!("not an inclusion atom")
    };
    let lc = tab.cols(left);
    let rc = tab.cols(right);
    let have: HashSet<Vec<Elem>> = sel.iter().map(|&r| tab.key(r, &rc)).collect();
    let need: BTreeSet<Vec<Elem>> = sel
        .iter()
        .map(|&r| tab.key(r, &lc))
        .filter(|k| !have.contains(k))
        .collect();
    need.into_iter().collect()
}
