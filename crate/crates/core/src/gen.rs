//! Seeded random instances for differential testing and `selftest`.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::formula::{disjunction_width, AtomKind, Formula, Var};
use crate::gadgets::{Cnf3Instance, Graph};
use crate::model::{Elem, Structure, Team};
use crate::satcore::{Cnf, Lit};

/// Which constructs a random formula may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    /// Maximum connective/quantifier nesting above the leaves.
    pub depth: usize,
    pub quantifier_depth: usize,
    pub atoms: Vec<AtomKind>,
    pub or: bool,
    pub exists: bool,
    pub forall: bool,
}

impl Shape {
    /// Inclusion atoms with every connective and quantifier.
    pub fn inclusion() -> Shape {
        Shape {
            depth: 3,
            quantifier_depth: 2,
            atoms: vec![AtomKind::Inc],
            or: true,
            exists: true,
            forall: true,
        }
    }

    /// Quantifier-free, one atom kind.
    pub fn quantifier_free(atoms: &[AtomKind]) -> Shape {
        Shape {
            depth: 3,
            quantifier_depth: 0,
            atoms: atoms.to_vec(),
            or: true,
            exists: false,
            forall: false,
        }
    }

    /// `∀` and `∧` over literals and any atom.
    pub fn universal() -> Shape {
        Shape {
            depth: 3,
            quantifier_depth: 2,
            atoms: vec![AtomKind::Dep, AtomKind::Indep, AtomKind::Inc],
            or: false,
            exists: false,
            forall: true,
        }
    }

    pub fn everything() -> Shape {
        Shape {
            depth: 3,
            quantifier_depth: 2,
            atoms: vec![AtomKind::Dep, AtomKind::Indep, AtomKind::Inc],
            or: true,
            exists: true,
            forall: true,
        }
    }
}

/// Fresh names quantifiers may bind besides shadowing a variable in scope.
const BOUND: [&str; 2] = ["u", "v"];

pub struct Gen {
    rng: StdRng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    /// Domain of `1..=max_size` numerals with random `P/1` and `R/2`.
    pub fn structure(&mut self, max_size: usize) -> Structure {
        let n = self.rng.gen_range(1..=max_size);
        let mut a = Structure::with_size(n);
        let p: Vec<Vec<Elem>> = (0..n)
            .filter(|_| self.rng.gen_bool(0.5))
            .map(|i| vec![Elem(i as u32)])
            .collect();
        let mut r = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.rng.gen_bool(0.4) {
                    r.push(vec![Elem(i as u32), Elem(j as u32)]);
                }
            }
        }
        a.add_relation("P", 1, p).expect("fresh relation");
        a.add_relation("R", 2, r).expect("fresh relation");
        a
    }

    /// Up to `max_rows` distinct rows drawn uniformly; may be empty.
    pub fn team(&mut self, structure: &Structure, vars: &[&str], max_rows: usize) -> Team {
        let mut t = Team::new(vars.iter().copied()).expect("distinct variables");
        let draws = self.rng.gen_range(0..=max_rows);
        for _ in 0..draws {
            let row = (0..vars.len())
                .map(|_| Elem(self.rng.gen_range(0..structure.size() as u32)))
                .collect();
            t.insert(row).expect("row width matches");
        }
        t
    }

    /// Exactly `rows` distinct rows, or all of `A^vars` if that is smaller.
    pub fn team_of_size(&mut self, structure: &Structure, vars: &[&str], rows: usize) -> Team {
        let total = (structure.size() as u128).saturating_pow(vars.len() as u32);
        let want = (rows as u128).min(total) as usize;
        let mut t = Team::new(vars.iter().copied()).expect("distinct variables");
        while t.len() < want {
            let row = (0..vars.len())
                .map(|_| Elem(self.rng.gen_range(0..structure.size() as u32)))
                .collect();
            t.insert(row).expect("row width matches");
        }
        t
    }

    fn pick<'v>(&mut self, vars: &'v [Var]) -> &'v str {
        vars.choose(&mut self.rng).expect("variables in scope")
    }

    fn picks(&mut self, vars: &[Var], lo: usize, hi: usize) -> Vec<String> {
        let k = self.rng.gen_range(lo..=hi);
        (0..k).map(|_| self.pick(vars).to_string()).collect()
    }

    /// `P(x)`, `R(x,y)`, `x = y`, or a negation of one of them.
    pub fn literal(&mut self, vars: &[Var]) -> Formula {
        let positive = self.rng.gen_bool(0.5);
        let (a, b) = (self.pick(vars).to_string(), self.pick(vars).to_string());
        match self.rng.gen_range(0..3) {
            0 => Formula::Rel {
                name: "P".into(),
                args: vec![a],
                positive,
            },
            1 => Formula::Rel {
                name: "R".into(),
                args: vec![a, b],
                positive,
            },
            _ => Formula::Eq {
                left: a,
                right: b,
                positive,
            },
        }
    }

    pub fn atom(&mut self, kind: AtomKind, vars: &[Var]) -> Formula {
        match kind {
            AtomKind::Dep => Formula::Dep {
                cond: self.picks(vars, 0, 2),
                target: self.pick(vars).to_string(),
            },
            AtomKind::Indep => Formula::Indep {
                left: self.picks(vars, 1, 2),
                cond: self.picks(vars, 0, 1),
                right: self.picks(vars, 1, 2),
            },
            AtomKind::Inc => {
                let k = self.rng.gen_range(1..=2);
                Formula::Inc {
                    left: self.picks(vars, k, k),
                    right: self.picks(vars, k, k),
                }
            }
        }
    }

    fn leaf(&mut self, shape: &Shape, vars: &[Var]) -> Formula {
        if shape.atoms.is_empty() || self.rng.gen_bool(0.4) {
            self.literal(vars)
        } else {
            let kind = *shape.atoms.choose(&mut self.rng).expect("non-empty");
            self.atom(kind, vars)
        }
    }

    /// A random formula over `vars` of the given shape.
    pub fn formula(&mut self, shape: &Shape, vars: &[Var]) -> Formula {
        self.grow(shape, vars.to_vec(), shape.depth, shape.quantifier_depth)
    }

    fn grow(&mut self, shape: &Shape, vars: Vec<Var>, depth: usize, qdepth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf(shape, &vars);
        }
        let mut ops = vec![0];
        if shape.or {
            ops.push(1);
        }
        if qdepth > 0 && shape.exists {
            ops.push(2);
        }
        if qdepth > 0 && shape.forall {
            ops.push(3);
        }
        match *ops.choose(&mut self.rng).expect("non-empty") {
            op @ (0 | 1) => {
                let a = self.grow(shape, vars.clone(), depth - 1, qdepth);
                let b = self.grow(shape, vars, depth - 1, qdepth);
                if op == 0 {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                }
            }
            op => {
                let x = if self.rng.gen_bool(0.8) {
                    BOUND.choose(&mut self.rng).unwrap().to_string()
                } else {
                    self.pick(&vars).to_string()
                };
                let mut inner = vars;
                if !inner.contains(&x) {
                    inner.push(x.clone());
                }
                let body = self.grow(shape, inner, depth - 1, qdepth - 1);
                if op == 2 {
                    Formula::exists(&x, body)
                } else {
                    Formula::forall(&x, body)
                }
            }
        }
    }

    /// A universal conjunction with at least one `∀`.
    pub fn universal_conj(&mut self, vars: &[Var]) -> Formula {
        let f = self.formula(&Shape::universal(), vars);
        if f.quantifier_depth() > 0 {
            return f;
        }
        let x = BOUND.choose(&mut self.rng).unwrap();
        Formula::forall(x, f)
    }

    /// Quantifier-free dependence formula of disjunction-width at most 2.
    pub fn width2_dep(&mut self, vars: &[Var]) -> Formula {
        let shape = Shape::quantifier_free(&[AtomKind::Dep]);
        loop {
            let f = self.formula(&shape, vars);
            if disjunction_width(&f) <= 2 {
                return f;
            }
        }
    }

    /// Quantifier-free first-order formula.
    pub fn first_order(&mut self, vars: &[Var], depth: usize) -> Formula {
        let shape = Shape {
            depth,
            ..Shape::quantifier_free(&[])
        };
        self.formula(&shape, vars)
    }

    /// One independence atom wrapped in up to `max_layers` first-order
    /// conjunctions or disjunctions on either side.
    pub fn bc_member(&mut self, vars: &[Var], max_layers: usize) -> Formula {
        let mut f = self.atom(AtomKind::Indep, vars);
        for _ in 0..self.rng.gen_range(0..=max_layers) {
            let fo = self.first_order(vars, 1);
            let (a, b) = if self.rng.gen_bool(0.5) { (f, fo) } else { (fo, f) };
            f = if self.rng.gen_bool(0.5) {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            };
        }
        f
    }

    /// Clauses of width 1 to 3 with at most one negative literal.
    pub fn dual_horn(&mut self, num_vars: u32, clauses: usize) -> Cnf {
        let mut f = Cnf::new(num_vars);
        for _ in 0..clauses {
            let k = self.rng.gen_range(1..=3);
            let neg = self.rng.gen_bool(0.6);
            let lits: Vec<Lit> = (0..k)
                .map(|i| {
                    let v = self.rng.gen_range(1..=num_vars);
                    if neg && i == 0 {
                        Lit::neg(v)
                    } else {
                        Lit::pos(v)
                    }
                })
                .collect();
            f.add(lits);
        }
        f
    }

    /// Random `k`-CNF clauses with `1..=k` literals each.
    pub fn kcnf(&mut self, num_vars: u32, clauses: usize, k: usize) -> Cnf {
        let mut f = Cnf::new(num_vars);
        for _ in 0..clauses {
            let w = self.rng.gen_range(1..=k);
            let lits: Vec<Lit> = (0..w).map(|_| self.lit(num_vars)).collect();
            f.add(lits);
        }
        f
    }

    fn lit(&mut self, num_vars: u32) -> Lit {
        let v = self.rng.gen_range(1..=num_vars);
        if self.rng.gen_bool(0.5) {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    }

    pub fn cnf3(&mut self, max_vars: u32, max_clauses: usize) -> Cnf3Instance {
        let m = self.rng.gen_range(1..=max_vars);
        let n = self.rng.gen_range(1..=max_clauses);
        let clauses = (0..n)
            .map(|_| [self.lit(m), self.lit(m), self.lit(m)])
            .collect();
        Cnf3Instance::new(m, clauses).expect("literals in range")
    }

    pub fn graph(&mut self, n: usize, p: f64) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if self.rng.gen_bool(p) {
                    g.add_edge(u, v).expect("valid edge");
                }
            }
        }
        g
    }
}

/// Every graph on `n` labelled vertices.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let mut g = Graph::new(n);
        for (b, &(u, v)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                g.add_edge(u, v).expect("valid edge");
            }
        }
        g
    })
}

/// Variable names `x0, x1, ..`.
pub fn var_names(k: usize) -> Vec<Var> {
    (0..k).map(|i| format!("x{i}")).collect()
}
