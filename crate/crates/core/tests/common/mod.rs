//! Literal-definition oracles shared by the integration tests. Nothing here
//! calls into the crate's evaluators or solvers.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use teamsem::formula::Formula;
use teamsem::gadgets::Graph;
use teamsem::model::{Elem, Structure, Team};
use teamsem::satcore::Cnf;

type Rows = BTreeSet<Vec<Elem>>;

/// Lax team semantics by direct enumeration: every cover for `∨`, every
/// non-empty-set choice function for `∃`. Exponential; keep inputs tiny.
pub struct Naive<'a> {
    a: &'a Structure,
    memo: HashMap<(usize, Vec<String>, Rows), bool>,
}

impl<'a> Naive<'a> {
    pub fn new(a: &'a Structure) -> Naive<'a> {
        Naive {
            a,
            memo: HashMap::new(),
        }
    }

    pub fn check(&mut self, team: &Team, phi: &Formula) -> bool {
        // Keys hold subformula addresses, which are only stable per query.
        self.memo.clear();
        let rows: Rows = team.rows().cloned().collect();
        self.sat(team.vars(), &rows, phi)
    }

    fn col(vars: &[String], v: &str) -> usize {
        vars.iter().rposition(|w| w == v).expect("bound variable")
    }

    fn key(vars: &[String], s: &[Elem], vs: &[String]) -> Vec<Elem> {
        vs.iter().map(|v| s[Self::col(vars, v)]).collect()
    }

    fn literal(&self, vars: &[String], s: &[Elem], phi: &Formula) -> bool {
        match phi {
            Formula::Rel {
                name,
                args,
                positive,
            } => {
                let t = Self::key(vars, s, args);
                self.a.relation(name).expect("declared").contains(&t) == *positive
            }
            Formula::Eq {
                left,
                right,
                positive,
            } => (s[Self::col(vars, left)] == s[Self::col(vars, right)]) == *positive,
            _ => unreachable!(),
        }
    }

    fn sat(&mut self, vars: &[String], x: &Rows, phi: &Formula) -> bool {
        let id = (phi as *const Formula as usize, vars.to_vec(), x.clone());
        if let Some(&v) = self.memo.get(&id) {
            return v;
        }
        let v = self.sat_uncached(vars, x, phi);
        self.memo.insert(id, v);
        v
    }

    fn sat_uncached(&mut self, vars: &[String], x: &Rows, phi: &Formula) -> bool {
        match phi {
            Formula::Rel { .. } | Formula::Eq { .. } => x.iter().all(|s| self.literal(vars, s, phi)),
            Formula::Dep { cond, target } => x.iter().all(|s| {
                x.iter().all(|t| {
                    Self::key(vars, s, cond) != Self::key(vars, t, cond)
                        || s[Self::col(vars, target)] == t[Self::col(vars, target)]
                })
            }),
            Formula::Indep { left, cond, right } => x.iter().all(|s| {
                x.iter().all(|t| {
                    Self::key(vars, s, cond) != Self::key(vars, t, cond)
                        || x.iter().any(|u| {
                            Self::key(vars, u, left) == Self::key(vars, s, left)
                                && Self::key(vars, u, cond) == Self::key(vars, s, cond)
                                && Self::key(vars, u, right) == Self::key(vars, t, right)
                        })
                })
            }),
            Formula::Inc { left, right } => x.iter().all(|s| {
                x.iter()
                    .any(|t| Self::key(vars, t, right) == Self::key(vars, s, left))
            }),
            Formula::And(a, b) => self.sat(vars, x, a) && self.sat(vars, x, b),
            Formula::Or(a, b) => {
                let rows: Vec<&Vec<Elem>> = x.iter().collect();
                let n = rows.len();
                // Each row goes left (0), right (1) or both (2).
                let mut code = vec![0u8; n];
                loop {
                    let y: Rows = (0..n).filter(|&i| code[i] != 1).map(|i| rows[i].clone()).collect();
                    let z: Rows = (0..n).filter(|&i| code[i] != 0).map(|i| rows[i].clone()).collect();
                    if self.sat(vars, &y, a) && self.sat(vars, &z, b) {
                        return true;
                    }
                    let mut i = 0;
                    while i < n && code[i] == 2 {
                        code[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        return false;
                    }
                    code[i] += 1;
                }
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = vars.to_vec();
                let shadow = inner.iter().position(|w| w == v);
                if shadow.is_none() {
                    inner.push(v.clone());
                }
                let put = |s: &Vec<Elem>, a: Elem| {
                    let mut t = s.clone();
                    match shadow {
                        Some(c) => t[c] = a,
                        None => t.push(a),
                    }
                    t
                };
                let p = self.a.size();
                let all: Vec<Elem> = (0..p as u32).map(Elem).collect();
                if matches!(phi, Formula::Forall(..)) {
                    let ext: Rows = x.iter().flat_map(|s| all.iter().map(|&a| put(s, a)).collect::<Vec<_>>()).collect();
                    return self.sat(&inner, &ext, body);
                }
                let rows: Vec<&Vec<Elem>> = x.iter().collect();
                let n = rows.len();
                let full = (1u32 << p) - 1;
                let mut mask = vec![1u32; n];
                loop {
                    let ext: Rows = (0..n)
                        .flat_map(|i| {
                            all.iter()
                                .filter(|a| mask[i] >> a.0 & 1 == 1)
                                .map(|&a| put(rows[i], a))
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    if self.sat(&inner, &ext, body) {
                        return true;
                    }
                    let mut i = 0;
                    while i < n && mask[i] == full {
                        mask[i] = 1;
                        i += 1;
                    }
                    if i == n {
                        return false;
                    }
                    mask[i] += 1;
                }
            }
        }
    }
}

/// Satisfiability by trying every assignment.
pub fn cnf_sat(f: &Cnf) -> bool {
    let n = f.num_vars();
    assert!(n <= 20, "too many variables to enumerate");
    (0u32..1 << n).any(|bits| {
        let model: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        f.satisfied_by(&model)
    })
}

fn is_clique(g: &Graph, vs: &[usize]) -> bool {
    vs.iter()
        .enumerate()
        .all(|(i, &u)| vs[i + 1..].iter().all(|&v| g.has_edge(u, v)))
}

/// Vertices can be split into at most three cliques.
pub fn has_3_clique_cover(g: &Graph) -> bool {
    let n = g.num_vertices();
    let mut part = vec![0usize; n];
    loop {
        if (0..3).all(|c| {
            let vs: Vec<usize> = (0..n).filter(|&v| part[v] == c).collect();
            is_clique(g, &vs)
        }) {
            return true;
        }
        let mut i = 0;
        while i < n && part[i] == 2 {
            part[i] = 0;
            i += 1;
        }
        if i == n {
            return false;
        }
        part[i] += 1;
    }
}

/// A proper coloring with `k` colors exists.
pub fn is_colorable(g: &Graph, k: usize) -> bool {
    let n = g.num_vertices();
    let mut color = vec![0usize; n];
    loop {
        if g.edges().all(|(u, v)| color[u] != color[v]) {
            return true;
        }
        let mut i = 0;
        while i < n && color[i] == k - 1 {
            color[i] = 0;
            i += 1;
        }
        if i == n {
            return false;
        }
        color[i] += 1;
    }
}
