//! Exact evaluation by search.
//!
//! Besides `sat` (does a given subteam satisfy φ), the evaluator answers two
//! existence questions that disjunction and `∃` reduce to:
//!
//! - `find`: is there `Y ⊆ pool` with `Y ⊨ φ` meeting every group of rows;
//! - `extendable`: is there `Y` with `req ⊆ Y ⊆ pool` and `Y ⊨ φ`.
//!
//! A cover `Y ∪ Z = X` is then an assignment of each row (a singleton group)
//! to a disjunct, and a choice function for `∃x` is a subteam of `X[A/x]`
//! meeting the extensions of every row. Closure properties cut the search:
//! union-closed formulas have a largest satisfying subteam, downward-closed
//! ones can be checked on one representative per group.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use super::atoms::{inc_missing, indep_missing, IndepCols};
use super::{atom_holds, fo_row, validate, EvalBudget, EvalError, Tab};
use crate::formula::Formula;
use crate::model::{Elem, Structure, Team};

type Res<T> = Result<T, EvalError>;

/// Exact lax-semantics model checker with a search budget.
pub struct Evaluator<'a> {
    structure: &'a Structure,
    budget: EvalBudget,
    nodes: u64,
    start: Instant,
}

impl<'a> Evaluator<'a> {
    pub fn new(structure: &'a Structure, budget: EvalBudget) -> Evaluator<'a> {
        Evaluator {
            structure,
            budget,
            nodes: 0,
            start: Instant::now(),
        }
    }

    /// Search nodes visited so far, across all calls on this evaluator.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn check(&mut self, team: &Team, phi: &Formula) -> Res<bool> {
        validate(self.structure, team.vars(), phi)?;
        if team.len() > self.budget.max_team_size {
            return Err(EvalError::BudgetExceeded(format!(
                "team has {} rows, limit is {}",
                team.len(),
                self.budget.max_team_size
            )));
        }
        self.start = Instant::now();
        let tab = Tab::from_team(team);
        let all: Vec<usize> = (0..tab.len()).collect();
        self.sat(phi, &tab, &all)
    }

    fn tick(&mut self) -> Res<()> {
        self.nodes += 1;
        if self.nodes > self.budget.max_branch {
            return Err(EvalError::BudgetExceeded(format!(
                "more than {} search nodes",
                self.budget.max_branch
            )));
        }
        if self.nodes.is_multiple_of(4096) && self.start.elapsed() > self.budget.time_limit {
            return Err(EvalError::BudgetExceeded(format!(
                "time limit of {:?}",
                self.budget.time_limit
            )));
        }
        Ok(())
    }

    fn domain(&self) -> usize {
        self.structure.size()
    }

    fn sat(&mut self, phi: &Formula, tab: &Tab, sel: &[usize]) -> Res<bool> {
        self.tick()?;
        if sel.is_empty() {
            return Ok(true);
        }
        if phi.is_first_order() {
            return Ok(sel.iter().all(|&r| fo_row(self.structure, tab, r, phi)));
        }
        match phi {
            Formula::Dep { .. } | Formula::Indep { .. } | Formula::Inc { .. } => {
                Ok(atom_holds(tab, sel, phi))
            }
            Formula::And(a, b) => Ok(self.sat(a, tab, sel)? && self.sat(b, tab, sel)?),
            Formula::Forall(x, body) => {
                let (ext, _) = tab.expand(sel, x, self.domain());
                let all: Vec<usize> = (0..ext.len()).collect();
                self.sat(body, &ext, &all)
            }
            Formula::Or(..) | Formula::Exists(..) => {
                let groups: Vec<Vec<usize>> = sel.iter().map(|&r| vec![r]).collect();
                self.find(phi, tab, sel, &groups)
            }
            Formula::Rel { .. } | Formula::Eq { .. } => unreachable!("literals are first-order"),
        }
    }

    /// Largest `Y ⊆ pool` with `Y ⊨ φ`, as a mask over `tab`. Only defined
    /// for union-closed `φ`.
    fn max_sub(&mut self, phi: &Formula, tab: &Tab, pool: &[usize]) -> Res<Vec<bool>> {
        self.tick()?;
        let mut mask = vec![false; tab.len()];
        if phi.is_first_order() {
            for &r in pool {
                mask[r] = fo_row(self.structure, tab, r, phi);
            }
            return Ok(mask);
        }
        match phi {
            Formula::Inc { left, right } => {
                let lc = tab.cols(left);
                let rc = tab.cols(right);
                let mut cur = pool.to_vec();
                loop {
                    let have: HashSet<Vec<Elem>> = cur.iter().map(|&r| tab.key(r, &rc)).collect();
                    let next: Vec<usize> = cur
                        .iter()
                        .copied()
                        .filter(|&r| have.contains(&tab.key(r, &lc)))
                        .collect();
                    if next.len() == cur.len() {
                        break;
                    }
                    cur = next;
                }
                for r in cur {
                    mask[r] = true;
                }
            }
            Formula::And(a, b) => {
                let mut cur = pool.to_vec();
                loop {
                    let ma = self.max_sub(a, tab, &cur)?;
                    let after_a: Vec<usize> = cur.iter().copied().filter(|&r| ma[r]).collect();
                    let mb = self.max_sub(b, tab, &after_a)?;
                    let next: Vec<usize> = after_a.into_iter().filter(|&r| mb[r]).collect();
                    if next.len() == cur.len() {
                        break;
                    }
                    cur = next;
                }
                for r in cur {
                    mask[r] = true;
                }
            }
            Formula::Or(a, b) => {
                let ma = self.max_sub(a, tab, pool)?;
                let mb = self.max_sub(b, tab, pool)?;
                for &r in pool {
                    mask[r] = ma[r] || mb[r];
                }
            }
            Formula::Exists(x, body) => {
                let (ext, map) = tab.expand(pool, x, self.domain());
                let all: Vec<usize> = (0..ext.len()).collect();
                let m = self.max_sub(body, &ext, &all)?;
                for &r in pool {
                    mask[r] = map[r].iter().any(|&e| m[e]);
                }
            }
            Formula::Forall(x, body) => {
                let mut cur = pool.to_vec();
                loop {
                    let (ext, map) = tab.expand(&cur, x, self.domain());
                    let all: Vec<usize> = (0..ext.len()).collect();
                    let m = self.max_sub(body, &ext, &all)?;
                    let next: Vec<usize> = cur
                        .iter()
                        .copied()
                        .filter(|&r| map[r].iter().all(|&e| m[e]))
                        .collect();
                    if next.len() == cur.len() {
                        break;
                    }
                    cur = next;
                }
                for r in cur {
                    mask[r] = true;
                }
            }
            _ => unreachable!("max_sub on a formula that is not union closed"),
        }
        Ok(mask)
    }

    /// Is there `Y ⊆ pool` with `Y ⊨ φ` and `Y ∩ g ≠ ∅` for every group `g`?
    fn find(
        &mut self,
        phi: &Formula,
        tab: &Tab,
        pool: &[usize],
        groups: &[Vec<usize>],
    ) -> Res<bool> {
        self.tick()?;
        if groups.is_empty() {
            return Ok(true);
        }
        if groups.iter().any(|g| g.is_empty()) {
            return Ok(false);
        }
        if phi.is_union_closed() {
            let m = self.max_sub(phi, tab, pool)?;
            return Ok(groups.iter().all(|g| g.iter().any(|&r| m[r])));
        }
        match phi {
            Formula::Or(..) => self.find_or(phi, tab, pool, groups),
            Formula::Exists(x, body) => {
                let (ext, map) = tab.expand(pool, x, self.domain());
                let all: Vec<usize> = (0..ext.len()).collect();
                let lifted: Vec<Vec<usize>> = groups
                    .iter()
                    .map(|g| {
                        g.iter()
                            .flat_map(|&r| map[r].iter().copied())
                            .collect::<BTreeSet<usize>>()
                            .into_iter()
                            .collect()
                    })
                    .collect();
                self.find(body, &ext, &all, &lifted)
            }
            _ => {
                if groups.iter().all(|g| g.len() == 1) {
                    let req: BTreeSet<usize> = groups.iter().map(|g| g[0]).collect();
                    let req: Vec<usize> = req.into_iter().collect();
                    return self.extendable(phi, tab, pool, &req);
                }
                let mut order: Vec<&Vec<usize>> = groups.iter().collect();
                order.sort_by_key(|g| g.len());
                let mut chosen = Vec::new();
                self.pick_reps(phi, tab, pool, &order, 0, &mut chosen)
            }
        }
    }

    /// Choose one row per group, pruning with `extendable` (a failing partial
    /// choice cannot be completed). For downward-closed `φ` this is plain
    /// satisfaction of the chosen rows.
    fn pick_reps(
        &mut self,
        phi: &Formula,
        tab: &Tab,
        pool: &[usize],
        order: &[&Vec<usize>],
        i: usize,
        chosen: &mut Vec<usize>,
    ) -> Res<bool> {
        self.tick()?;
        let Some(group) = order.get(i) else {
            return Ok(true);
        };
        if group.iter().any(|r| chosen.contains(r)) {
            return self.pick_reps(phi, tab, pool, order, i + 1, chosen);
        }
        for &r in group.iter() {
            chosen.push(r);
            let mut req = chosen.clone();
            req.sort_unstable();
            if self.extendable(phi, tab, pool, &req)?
                && self.pick_reps(phi, tab, pool, order, i + 1, chosen)?
            {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    fn find_or(
        &mut self,
        phi: &Formula,
        tab: &Tab,
        pool: &[usize],
        groups: &[Vec<usize>],
    ) -> Res<bool> {
        let mut disjuncts = Vec::new();
        flatten(phi, true, &mut disjuncts);
        let mut open: Vec<Vec<usize>> = groups.to_vec();
        let mut hard = Vec::new();
        for d in disjuncts {
            if d.is_union_closed() {
                let m = self.max_sub(d, tab, pool)?;
                open.retain(|g| !g.iter().any(|&r| m[r]));
            } else {
                hard.push(d);
            }
        }
        if open.is_empty() {
            return Ok(true);
        }
        if hard.is_empty() {
            return Ok(false);
        }
        let mut done = vec![false; open.len()];
        let mut assigned: Vec<Vec<Vec<usize>>> = vec![Vec::new(); hard.len()];
        self.assign(&hard, tab, pool, &open, &mut done, &mut assigned)
    }

    /// Backtracking assignment of groups to disjuncts, always branching on
    /// the group with the fewest disjuncts still able to take it.
    fn assign(
        &mut self,
        hard: &[&Formula],
        tab: &Tab,
        pool: &[usize],
        groups: &[Vec<usize>],
        done: &mut [bool],
        assigned: &mut [Vec<Vec<usize>>],
    ) -> Res<bool> {
        self.tick()?;
        let mut best: Option<(usize, Vec<usize>)> = None;
        for gi in 0..groups.len() {
            if done[gi] {
                continue;
            }
            let mut options = Vec::new();
            for (di, d) in hard.iter().enumerate() {
                assigned[di].push(groups[gi].clone());
                let ok = self.find(d, tab, pool, &assigned[di]);
                assigned[di].pop();
                if ok? {
                    options.push(di);
                }
            }
            if options.is_empty() {
                return Ok(false);
            }
            let better = best.as_ref().is_none_or(|(_, o)| options.len() < o.len());
            if better {
                let forced = options.len() == 1;
                best = Some((gi, options));
                if forced {
                    break;
                }
            }
        }
        let Some((gi, options)) = best else {
            return Ok(true);
        };
        done[gi] = true;
        for di in options {
            assigned[di].push(groups[gi].clone());
            let ok = self.assign(hard, tab, pool, groups, done, assigned);
            assigned[di].pop();
            if ok? {
                done[gi] = false;
                return Ok(true);
            }
        }
        done[gi] = false;
        Ok(false)
    }

    /// Is there `Y` with `req ⊆ Y ⊆ pool` and `Y ⊨ φ`?
    fn extendable(&mut self, phi: &Formula, tab: &Tab, pool: &[usize], req: &[usize]) -> Res<bool> {
        self.tick()?;
        if phi.is_union_closed() {
            let m = self.max_sub(phi, tab, pool)?;
            return Ok(req.iter().all(|&r| m[r]));
        }
        if phi.is_downward_closed() {
            return self.sat(phi, tab, req);
        }
        if matches!(phi, Formula::Or(..) | Formula::Exists(..)) {
            let groups: Vec<Vec<usize>> = req.iter().map(|&r| vec![r]).collect();
            return self.find(phi, tab, pool, &groups);
        }

        let mut conjuncts = Vec::new();
        flatten(phi, false, &mut conjuncts);
        let mut allowed = vec![false; tab.len()];
        for &r in pool {
            allowed[r] = true;
        }
        // Any satisfying Y lies inside the largest subteam of each
        // union-closed conjunct; first-order ones are settled by this.
        let closed: Vec<&Formula> = conjuncts
            .iter()
            .copied()
            .filter(|c| c.is_union_closed() && !c.is_atom())
            .collect();
        loop {
            let cur: Vec<usize> = (0..tab.len()).filter(|&r| allowed[r]).collect();
            let mut changed = false;
            for c in &closed {
                let m = self.max_sub(c, tab, &cur)?;
                for &r in &cur {
                    if allowed[r] && !m[r] {
                        allowed[r] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if req.iter().any(|&r| !allowed[r]) {
            return Ok(false);
        }
        let atoms: Vec<&Formula> = conjuncts.iter().copied().filter(|c| c.is_atom()).collect();
        let others: Vec<&Formula> = conjuncts
            .iter()
            .copied()
            .filter(|c| !c.is_atom() && !c.is_first_order())
            .collect();
        for c in &others {
            if c.is_downward_closed() && !self.sat(c, tab, req)? {
                return Ok(false);
            }
        }
        let mut in_y = vec![false; tab.len()];
        for &r in req {
            in_y[r] = true;
        }
        let mut ylist = req.to_vec();
        self.grow(&atoms, &others, tab, &mut allowed, &mut in_y, &mut ylist)
    }

    /// Witness-driven growth of `Y`: repair the violated atom with the fewest
    /// candidate rows, trying each candidate in turn and excluding the ones
    /// already tried from later branches.
    fn grow(
        &mut self,
        atoms: &[&Formula],
        others: &[&Formula],
        tab: &Tab,
        allowed: &mut [bool],
        in_y: &mut [bool],
        ylist: &mut Vec<usize>,
    ) -> Res<bool> {
        self.tick()?;
        // Candidate rows for each missing witness, over all atoms.
        let mut best: Option<Vec<usize>> = None;
        for atom in atoms {
            let wanted: Vec<(Vec<usize>, Vec<Vec<Elem>>)> = match atom {
                Formula::Dep { .. } => {
                    if !atom_holds(tab, ylist, atom) {
                        return Ok(false);
                    }
                    continue;
                }
                Formula::Inc { right, .. } => {
                    vec![(tab.cols(right), inc_missing(tab, ylist, atom))]
                }
                Formula::Indep { .. } => {
                    let cols = IndepCols::new(tab, atom);
                    let mut all = cols.left.clone();
                    all.extend(&cols.cond);
                    all.extend(&cols.right);
                    vec![(all, indep_missing(tab, ylist, atom, usize::MAX))]
                }
                _ => unreachable!("grow only handles atoms"),
            };
            for (cols, keys) in wanted {
                for k in keys {
                    let cands: Vec<usize> = (0..tab.len())
                        .filter(|&r| allowed[r] && !in_y[r] && tab.key(r, &cols) == k)
                        .collect();
                    if cands.is_empty() {
                        return Ok(false);
                    }
                    if best.as_ref().is_none_or(|b| cands.len() < b.len()) {
                        best = Some(cands);
                    }
                }
            }
        }

        let cands = match best {
            Some(c) => c,
            None => {
                // All atoms hold on Y; settle the remaining conjuncts.
                let mut sorted = ylist.clone();
                sorted.sort_unstable();
                let mut ok = true;
                for c in others {
                    if !self.sat(c, tab, &sorted)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    return Ok(true);
                }
                if others.iter().all(|c| c.is_downward_closed()) {
                    return Ok(false);
                }
                (0..tab.len()).filter(|&r| allowed[r] && !in_y[r]).collect()
            }
        };

        let mut excluded = Vec::new();
        let mut result = Ok(false);
        for c in cands {
            in_y[c] = true;
            ylist.push(c);
            let r = self.grow(atoms, others, tab, allowed, in_y, ylist);
            ylist.pop();
            in_y[c] = false;
            match r {
                Ok(true) | Err(_) => {
                    result = r;
                    break;
                }
                Ok(false) => {
                    allowed[c] = false;
                    excluded.push(c);
                }
            }
        }
        for c in excluded {
            allowed[c] = true;
        }
        result
    }
}

/// Flatten nested `∨` (when `or`) or `∧` into a list of operands.
fn flatten<'f>(phi: &'f Formula, or: bool, out: &mut Vec<&'f Formula>) {
    match (phi, or) {
        (Formula::Or(a, b), true) | (Formula::And(a, b), false) => {
            flatten(a, or, out);
            flatten(b, or, out);
        }
        _ => out.push(phi),
    }
}
