use super::{Cnf, Lit, SolveResult};

/// DPLL with two watched literals and chronological backtracking.
pub fn solve_dpll(f: &Cnf) -> SolveResult {
    let mut s = Dpll::new(f);
    if s.run() {
        SolveResult::Sat(s.value.iter().map(|&v| v == 1).collect())
    } else {
        SolveResult::Unsat
    }
}

struct Dpll<'a> {
    clauses: Vec<&'a [Lit]>,
    /// Per variable: 1 true, -1 false, 0 unassigned.
    value: Vec<i8>,
    /// Clause indices watching each literal (by `Lit::code`).
    watches: Vec<Vec<usize>>,
    /// Current watched pair per clause (positions in the clause).
    watched: Vec<[usize; 2]>,
    units: Vec<Lit>,
    empty: bool,
    trail: Vec<Lit>,
    head: usize,
    /// Trail length at each decision, and whether the decision was flipped.
    levels: Vec<(usize, Lit, bool)>,
}

impl<'a> Dpll<'a> {
    fn new(f: &'a Cnf) -> Dpll<'a> {
        let n = f.num_vars() as usize;
        let mut s = Dpll {
            clauses: Vec::new(),
            value: vec![0; n],
            watches: vec![Vec::new(); 2 * n],
            watched: Vec::new(),
            units: Vec::new(),
            empty: false,
            trail: Vec::new(),
            head: 0,
            levels: Vec::new(),
        };
        for c in f.clauses() {
            match c.lits() {
                [] => s.empty = true,
                [l] => s.units.push(*l),
                lits => {
                    let ci = s.clauses.len();
                    s.clauses.push(lits);
                    s.watched.push([0, 1]);
                    s.watches[lits[0].code()].push(ci);
                    s.watches[lits[1].code()].push(ci);
                }
            }
        }
        s
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var() as usize - 1];
        if l.is_pos() {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.var() as usize - 1] = if l.is_pos() { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Unit propagation from `head`; returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = !self.trail[self.head];
            self.head += 1;
            let code = falsified.code();
            let mut i = 0;
            while i < self.watches[code].len() {
                let ci = self.watches[code][i];
                let lits = self.clauses[ci];
                let [a, b] = self.watched[ci];
                let (me, other) = if lits[a] == falsified { (0, b) } else { (1, a) };
                if self.lit_value(lits[other]) == 1 {
                    i += 1;
                    continue;
                }
                // Look for a replacement watch.
                let replacement = (0..lits.len())
                    .find(|&k| k != a && k != b && self.lit_value(lits[k]) != -1);
                if let Some(k) = replacement {
                    self.watched[ci][me] = k;
                    self.watches[code].swap_remove(i);
                    self.watches[lits[k].code()].push(ci);
                    continue;
                }
                match self.lit_value(lits[other]) {
                    0 => self.assign(lits[other]),
                    -1 => return false,
                    _ => {}
                }
                i += 1;
            }
        }
        true
    }

    fn backtrack(&mut self) -> bool {
        while let Some((len, decision, flipped)) = self.levels.pop() {
            for l in self.trail.drain(len..) {
                self.value[l.var() as usize - 1] = 0;
            }
            self.head = len;
            if !flipped {
                self.levels.push((len, !decision, true));
                self.assign(!decision);
                return true;
            }
        }
        false
    }

    fn run(&mut self) -> bool {
        if self.empty {
            return false;
        }
        for l in std::mem::take(&mut self.units) {
            match self.lit_value(l) {
                0 => self.assign(l),
                -1 => return false,
                _ => {}
            }
        }
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return false;
                }
                continue;
            }
            let Some(v) = self.value.iter().position(|&x| x == 0) else {
                return true;
            };
            let decision = Lit::neg(v as u32 + 1);
            self.levels.push((self.trail.len(), decision, false));
            self.assign(decision);
        }
    }
}
