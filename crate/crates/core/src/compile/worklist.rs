//! Worklist compiler from team semantics to CNF.
//!
//! Each team label `L` over `r` variables gets one propositional variable
//! `L[s]` per tuple `s ∈ A^r`, meaning "`s` belongs to the team `L`". Every
//! worklist entry `(φ, L)` contributes clauses saying that `L` satisfies `φ`.
//! Labels are laid out in blocks; within a block tuples are numbered in
//! lexicographic order over the domain order, so `(s, a)` has rank
//! `rank(s)·|A| + a`.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::CompileError;
use crate::eval::validate;
use crate::formula::{AtomKind, Formula, Var};
use crate::model::{Elem, Structure, Team};
use crate::satcore::{Cnf, Lit, VarMap};

/// Refuse encodings beyond this many propositional variables.
const MAX_VARS: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualHornOptions {
    /// Add `Y[(s,a)] → X[s]` for quantifier labels, so the new team contains
    /// nothing but extensions of the old one. Without these clauses the
    /// encoding is unsound; the switch exists to demonstrate that.
    pub quantifier_backlinks: bool,
    /// Drop clauses whose negative variable is unreachable from the positive
    /// seeds in the implication graph. Verdict-preserving.
    pub prune_unreachable: bool,
}

impl Default for DualHornOptions {
    fn default() -> Self {
        DualHornOptions {
            quantifier_backlinks: true,
            prune_unreachable: false,
        }
    }
}

struct Block {
    base: u32,
    vars: Vec<Var>,
    size: usize,
}

impl Block {
    fn var(&self, rank: usize) -> u32 {
        self.base + rank as u32 + 1
    }
}

/// The column of `v`; later columns shadow earlier ones.
fn col(vars: &[Var], v: &str) -> usize {
    vars.iter()
        .rposition(|w| w == v)
        .unwrap_or_else(|| panic!("variable `{v}` not in scope (validated earlier)"))
}

fn cols(vars: &[Var], vs: &[Var]) -> Vec<usize> {
    vs.iter().map(|v| col(vars, v)).collect()
}

fn decode(mut rank: usize, r: usize, p: usize) -> Vec<Elem> {
    let mut t = vec![Elem(0); r];
    for slot in t.iter_mut().rev() {
        *slot = Elem((rank % p) as u32);
        rank /= p;
    }
    t
}

#[cfg(test)]
fn encode(t: &[Elem], p: usize) -> usize {
    t.iter().fold(0, |acc, e| acc * p + e.index())
}

fn pow(p: usize, r: usize) -> u128 {
    (p as u128).saturating_pow(r as u32)
}

struct Compiler<'a> {
    structure: &'a Structure,
    p: usize,
    cnf: Cnf,
    map: VarMap,
    labels: usize,
    opts: DualHornOptions,
    general: bool,
}

impl<'a> Compiler<'a> {
    fn block(&mut self, label: &str, vars: Vec<Var>) -> Result<Rc<Block>, CompileError> {
        let total = self.map.len() as u128 + pow(self.p, vars.len());
        if total > MAX_VARS {
            return Err(CompileError::TooLarge(total));
        }
        let size = pow(self.p, vars.len()) as usize;
        let base = self.map.len() as u32;
        for rank in 0..size {
            let names = decode(rank, vars.len(), self.p)
                .into_iter()
                .map(|e| self.structure.name(e).to_string())
                .collect();
            self.map.intern(label, names);
        }
        self.cnf.reserve_vars(base + size as u32);
        Ok(Rc::new(Block { base, vars, size }))
    }

    fn fresh(&mut self) -> String {
        self.labels += 1;
        format!("T{}", self.labels)
    }

    fn run(&mut self, team: &Team, phi: &'a Formula) -> Result<(), CompileError> {
        let root = self.block("X", team.vars().to_vec())?;
        for rank in 0..root.size {
            let t = decode(rank, root.vars.len(), self.p);
            let v = root.var(rank);
            if team.contains(&t) {
                self.cnf.add([Lit::pos(v)]);
            } else {
                self.cnf.add([Lit::neg(v)]);
            }
        }
        let mut work: VecDeque<(&'a Formula, Rc<Block>)> = VecDeque::new();
        work.push_back((phi, root));
        while let Some((f, b)) = work.pop_front() {
            match f {
                Formula::Rel { .. } | Formula::Eq { .. } => self.literal(f, &b),
                Formula::Inc { left, right } => self.inclusion(left, right, &b),
                Formula::Dep { cond, target } if self.general => self.dependence(cond, target, &b),
                Formula::Indep { left, cond, right } if self.general => {
                    self.independence(left, cond, right, &b)
                }
                Formula::Dep { .. } | Formula::Indep { .. } => {
                    return Err(CompileError::Unsupported(
                        "dependence and independence atoms need the general CNF compiler".into(),
                    ))
                }
                Formula::And(a, c) => {
                    work.push_back((a, b.clone()));
                    work.push_back((c, b));
                }
                Formula::Or(a, c) => {
                    let yl = self.fresh();
                    let zl = self.fresh();
                    let y = self.block(&yl, b.vars.clone())?;
                    let z = self.block(&zl, b.vars.clone())?;
                    for s in 0..b.size {
                        let (x, yv, zv) = (b.var(s), y.var(s), z.var(s));
                        self.cnf.add([Lit::neg(x), Lit::pos(yv), Lit::pos(zv)]);
                        self.cnf.add([Lit::neg(yv), Lit::pos(x)]);
                        self.cnf.add([Lit::neg(zv), Lit::pos(x)]);
                    }
                    work.push_back((a, y));
                    work.push_back((c, z));
                }
                Formula::Exists(x, body) | Formula::Forall(x, body) => {
                    let label = self.fresh();
                    let mut vars = b.vars.clone();
                    vars.push(x.clone());
                    let y = self.block(&label, vars)?;
                    let p = self.p;
                    let universal = matches!(f, Formula::Forall(..));
                    for s in 0..b.size {
                        let xv = b.var(s);
                        if universal {
                            for a in 0..p {
                                self.cnf.add([Lit::neg(xv), Lit::pos(y.var(s * p + a))]);
                            }
                        } else {
                            let mut c = vec![Lit::neg(xv)];
                            c.extend((0..p).map(|a| Lit::pos(y.var(s * p + a))));
                            self.cnf.add(c);
                        }
                        if self.opts.quantifier_backlinks {
                            for a in 0..p {
                                self.cnf.add([Lit::neg(y.var(s * p + a)), Lit::pos(xv)]);
                            }
                        }
                    }
                    work.push_back((body, y));
                }
            }
        }
        Ok(())
    }

    fn literal(&mut self, lit: &Formula, b: &Block) {
        let r = b.vars.len();
        for s in 0..b.size {
            let t = decode(s, r, self.p);
            let holds = match lit {
                Formula::Rel {
                    name,
                    args,
                    positive,
                } => {
                    let tuple: Vec<Elem> = cols(&b.vars, args).iter().map(|&c| t[c]).collect();
                    let rel = self.structure.relation(name).expect("validated relation");
                    rel.contains(&tuple) == *positive
                }
                Formula::Eq {
                    left,
                    right,
                    positive,
                } => (t[col(&b.vars, left)] == t[col(&b.vars, right)]) == *positive,
                _ => unreachable!(),
            };
            if !holds {
                self.cnf.add([Lit::neg(b.var(s))]);
            }
        }
    }

    /// Ranks of all tuples grouped by their values on `cs`.
    fn index_by(&self, b: &Block, cs: &[usize]) -> HashMap<Vec<Elem>, Vec<usize>> {
        let r = b.vars.len();
        let mut m: HashMap<Vec<Elem>, Vec<usize>> = HashMap::new();
        for s in 0..b.size {
            let t = decode(s, r, self.p);
            m.entry(cs.iter().map(|&c| t[c]).collect()).or_default().push(s);
        }
        m
    }

    fn inclusion(&mut self, left: &[Var], right: &[Var], b: &Block) {
        let lc = cols(&b.vars, left);
        let rc = cols(&b.vars, right);
        let by_right = self.index_by(b, &rc);
        let empty = Vec::new();
        for s in 0..b.size {
            let t = decode(s, b.vars.len(), self.p);
            let key: Vec<Elem> = lc.iter().map(|&c| t[c]).collect();
            let cands = by_right.get(&key).unwrap_or(&empty);
            let mut c = Vec::with_capacity(cands.len() + 1);
            c.push(Lit::neg(b.var(s)));
            c.extend(cands.iter().map(|&s2| Lit::pos(b.var(s2))));
            self.cnf.add(c);
        }
    }

    fn dependence(&mut self, cond: &[Var], target: &Var, b: &Block) {
        let cc = cols(&b.vars, cond);
        let tc = col(&b.vars, target);
        let groups = self.index_by(b, &cc);
        let mut keys: Vec<&Vec<Elem>> = groups.keys().collect();
        keys.sort();
        for k in keys {
            let g = &groups[k];
            for (i, &s) in g.iter().enumerate() {
                let ts = decode(s, b.vars.len(), self.p);
                for &s2 in &g[i + 1..] {
                    let t2 = decode(s2, b.vars.len(), self.p);
                    if ts[tc] != t2[tc] {
                        self.cnf.add([Lit::neg(b.var(s)), Lit::neg(b.var(s2))]);
                    }
                }
            }
        }
    }

    fn independence(&mut self, left: &[Var], cond: &[Var], right: &[Var], b: &Block) {
        let lc = cols(&b.vars, left);
        let zc = cols(&b.vars, cond);
        let rc = cols(&b.vars, right);
        let mut all = lc.clone();
        all.extend(&zc);
        all.extend(&rc);
        let witnesses = self.index_by(b, &all);
        let groups = self.index_by(b, &zc);
        let mut keys: Vec<&Vec<Elem>> = groups.keys().collect();
        keys.sort();
        let empty = Vec::new();
        let r = b.vars.len();
        for k in keys {
            let g = &groups[k];
            for &s in g {
                let ts = decode(s, r, self.p);
                for &s2 in g {
                    let t2 = decode(s2, r, self.p);
                    let mut want: Vec<Elem> = lc.iter().map(|&c| ts[c]).collect();
                    want.extend(zc.iter().map(|&c| ts[c]));
                    want.extend(rc.iter().map(|&c| t2[c]));
                    let mut c = vec![Lit::neg(b.var(s)), Lit::neg(b.var(s2))];
                    c.extend(
                        witnesses
                            .get(&want)
                            .unwrap_or(&empty)
                            .iter()
                            .map(|&w| Lit::pos(b.var(w))),
                    );
                    self.cnf.add(c);
                }
            }
        }
    }

    fn finish(self) -> (Cnf, VarMap) {
        let cnf = if self.opts.prune_unreachable {
            prune(&self.cnf)
        } else {
            self.cnf
        };
        (cnf, self.map)
    }
}

/// Keep purely positive clauses and clauses whose negative variables are all
/// reachable from the variables of purely positive clauses, following edges
/// from each negative variable to the positive variables of its clause.
/// Setting every unreachable variable false satisfies the dropped clauses.
fn prune(f: &Cnf) -> Cnf {
    let n = f.num_vars() as usize;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    let mut reached = vec![false; n + 1];
    let mut stack = Vec::new();
    for c in f.clauses() {
        let negs: Vec<u32> = c.lits().iter().filter(|l| !l.is_pos()).map(|l| l.var()).collect();
        let poss = c.lits().iter().filter(|l| l.is_pos()).map(|l| l.var());
        if negs.is_empty() {
            for v in poss {
                if !reached[v as usize] {
                    reached[v as usize] = true;
                    stack.push(v);
                }
            }
        } else {
            let poss: Vec<u32> = poss.collect();
            for &u in &negs {
                adj[u as usize].extend(&poss);
            }
        }
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u as usize] {
            if !reached[v as usize] {
                reached[v as usize] = true;
                stack.push(v);
            }
        }
    }
    let mut out = Cnf::new(f.num_vars());
    for c in f.clauses() {
        let keep = c
            .lits()
            .iter()
            .filter(|l| !l.is_pos())
            .all(|l| reached[l.var() as usize]);
        if keep {
            out.add(c.lits().iter().copied());
        }
    }
    out
}

fn check_inclusion_only(phi: &Formula) -> Result<(), CompileError> {
    if phi.atom_kinds().iter().any(|k| *k != AtomKind::Inc) {
        return Err(CompileError::Unsupported(
            "the dual-Horn compiler accepts literals and inclusion atoms only".into(),
        ));
    }
    Ok(())
}

/// Dual-Horn encoding with default options: `𝔄 ⊨_X φ` iff the CNF is
/// satisfiable.
pub fn compile_dualhorn(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
) -> Result<(Cnf, VarMap), CompileError> {
    compile_dualhorn_with(structure, team, phi, DualHornOptions::default())
}

pub fn compile_dualhorn_with(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
    opts: DualHornOptions,
) -> Result<(Cnf, VarMap), CompileError> {
    check_inclusion_only(phi)?;
    compile(structure, team, phi, opts, false)
}

/// The dual-Horn construction plus clauses for dependence and independence
/// atoms. The result is general CNF.
pub fn compile_cnf_general(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
) -> Result<(Cnf, VarMap), CompileError> {
    compile(structure, team, phi, DualHornOptions::default(), true)
}

fn compile(
    structure: &Structure,
    team: &Team,
    phi: &Formula,
    opts: DualHornOptions,
    general: bool,
) -> Result<(Cnf, VarMap), CompileError> {
    validate(structure, team.vars(), phi)?;
    let mut c = Compiler {
        structure,
        p: structure.size(),
        cnf: Cnf::new(0),
        map: VarMap::new(),
        labels: 0,
        opts,
        general,
    };
    c.run(team, phi)?;
    Ok(c.finish())
}

/// Closed-form number of clauses [`compile_dualhorn_with`] emits (before
/// pruning), computed from the formula, the team's variables and the
/// structure without building anything.
pub fn dualhorn_clause_count(
    structure: &Structure,
    vars: &[Var],
    phi: &Formula,
    opts: DualHornOptions,
) -> Result<u128, CompileError> {
    check_inclusion_only(phi)?;
    validate(structure, vars, phi)?;
    let p = structure.size();
    Ok(pow(p, vars.len()) + count(structure, p, vars.to_vec(), phi, opts))
}

fn count(
    structure: &Structure,
    p: usize,
    vars: Vec<Var>,
    phi: &Formula,
    opts: DualHornOptions,
) -> u128 {
    let r = vars.len();
    let all = pow(p, r);
    match phi {
        Formula::Eq {
            left,
            right,
            positive,
        } => {
            let same = col(&vars, left) == col(&vars, right);
            let equal_tuples = if same { all } else { pow(p, r - 1) };
            if *positive {
                all - equal_tuples
            } else {
                equal_tuples
            }
        }
        Formula::Rel {
            name,
            args,
            positive,
        } => {
            let cs = cols(&vars, args);
            let mut distinct = cs.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let rel = structure.relation(name).expect("validated relation");
            let consistent = rel
                .tuples()
                .iter()
                .filter(|t| {
                    (0..cs.len()).all(|i| (0..cs.len()).all(|j| cs[i] != cs[j] || t[i] == t[j]))
                })
                .count() as u128;
            let true_tuples = consistent * pow(p, r - distinct.len());
            if *positive {
                all - true_tuples
            } else {
                true_tuples
            }
        }
        Formula::Inc { left, right } => {
            // Tuples with s(x̄) = s(ȳ) give tautologies and are dropped.
            let mut parent: Vec<usize> = (0..r).collect();
            fn find(parent: &mut [usize], i: usize) -> usize {
                if parent[i] != i {
                    let root = find(parent, parent[i]);
                    parent[i] = root;
                }
                parent[i]
            }
            for (l, rr) in cols(&vars, left).into_iter().zip(cols(&vars, right)) {
                let (a, b) = (find(&mut parent, l), find(&mut parent, rr));
                parent[a] = b;
            }
            let classes = (0..r).filter(|&i| find(&mut parent, i) == i).count();
            all - pow(p, classes)
        }
        Formula::And(a, b) => {
            count(structure, p, vars.clone(), a, opts) + count(structure, p, vars, b, opts)
        }
        Formula::Or(a, b) => {
            3 * all + count(structure, p, vars.clone(), a, opts) + count(structure, p, vars, b, opts)
        }
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            let wide = pow(p, r + 1);
            let forward = if matches!(phi, Formula::Exists(..)) {
                all
            } else {
                wide
            };
            let back = if opts.quantifier_backlinks { wide } else { 0 };
            let mut inner = vars;
            inner.push(x.clone());
            forward + back + count(structure, p, inner, body, opts)
        }
        Formula::Dep { .. } | Formula::Indep { .. } => unreachable!("checked above"),
    }
}
