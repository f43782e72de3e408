use super::{Cnf, Lit, SatError, SolveResult};

/// 2-SAT via the implication graph and Tarjan's strongly connected
/// components. Unit clauses are allowed.
pub fn solve_2sat(f: &Cnf) -> Result<SolveResult, SatError> {
    if let Some(i) = f.clauses().iter().position(|c| c.len() > 2) {
        return Err(SatError::NotTwoCnf(i));
    }
    let n = f.num_vars() as usize;
    let mut graph: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    for c in f.clauses() {
        match *c.lits() {
            [] => return Ok(SolveResult::Unsat),
            [a] => graph[(!a).code()].push(a.code()),
            [a, b] => {
                graph[(!a).code()].push(b.code());
                graph[(!b).code()].push(a.code());
            }
            _ => unreachable!(),
        }
    }
    let comp = tarjan(&graph);
    let mut model = vec![false; n];
    for v in 1..=n as u32 {
        let p = comp[Lit::pos(v).code()];
        let q = comp[Lit::neg(v).code()];
        if p == q {
            return Ok(SolveResult::Unsat);
        }
        // Components come out in reverse topological order.
        model[v as usize - 1] = p < q;
    }
    Ok(SolveResult::Sat(model))
}

/// Component index per node, numbered in the order Tarjan's algorithm
/// completes them. Iterative, so deep graphs do not overflow the stack.
fn tarjan(graph: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = graph.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            if let Some(&w) = graph[v].get(top.1) {
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
