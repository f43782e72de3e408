use std::collections::VecDeque;

use super::{is_dual_horn, Cnf, SatError, SolveResult};

/// Maximum-model propagation for dual-Horn CNF.
///
/// Start with every variable true. A clause whose positive literals are all
/// false forces its negative variable false; if it has none, the formula is
/// unsatisfiable. Linear in the number of literal occurrences.
pub fn solve_dual_horn(f: &Cnf) -> Result<SolveResult, SatError> {
    if let Some(i) = f.clauses().iter().position(|c| c.negatives() > 1) {
        debug_assert!(!is_dual_horn(f));
        return Err(SatError::NotDualHorn(i));
    }
    let n = f.num_vars() as usize;
    let mut value = vec![true; n];
    let mut live = vec![0usize; f.len()];
    let mut neg_of = vec![None; f.len()];
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();

    let falsify = |v: u32, value: &mut Vec<bool>, queue: &mut VecDeque<u32>| {
        let i = v as usize - 1;
        if value[i] {
            value[i] = false;
            queue.push_back(v);
        }
    };

    for (ci, c) in f.clauses().iter().enumerate() {
        for l in c.lits() {
            if l.is_pos() {
                live[ci] += 1;
                occurs[l.var() as usize - 1].push(ci);
            } else {
                neg_of[ci] = Some(l.var());
            }
        }
        if live[ci] == 0 {
            match neg_of[ci] {
                Some(v) => falsify(v, &mut value, &mut queue),
                None => return Ok(SolveResult::Unsat),
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &ci in &occurs[v as usize - 1] {
            live[ci] -= 1;
            if live[ci] == 0 {
                match neg_of[ci] {
                    Some(u) => falsify(u, &mut value, &mut queue),
                    None => return Ok(SolveResult::Unsat),
                }
            }
        }
    }
    Ok(SolveResult::Sat(value))
}
