use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{GadgetError, GadgetInstance, Provenance};
use crate::formula::Formula;
use crate::model::{Elem, Structure, Team};

/// A simple undirected graph on vertices `0..n`. Edges are stored with the
/// smaller endpoint first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn with_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GadgetError> {
        let mut g = Graph::new(n);
        for (i, &(u, v)) in edges.iter().enumerate() {
            g.add_edge(u, v).map_err(|msg| GadgetError::Graph { line: i + 1, msg })?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, String> {
        if u == v {
            return Err(format!("self-loop on {u}"));
        }
        if u.max(v) >= self.n {
            return Err(format!("edge {u} {v} leaves the {} declared vertices", self.n));
        }
        Ok(self.edges.insert((u.min(v), u.max(v))))
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// `vertices k` followed by one `u v` line per edge. Blank lines and
    /// `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Graph, GadgetError> {
        let mut graph: Option<Graph> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| GadgetError::Graph { line: i + 1, msg };
            let words: Vec<&str> = line.split_whitespace().collect();
            match (&mut graph, words.as_slice()) {
                (None, ["vertices", k]) => {
                    let k = k.parse().map_err(|_| err(format!("bad vertex count `{k}`")))?;
                    graph = Some(Graph::new(k));
                }
                (None, _) => return Err(err("expected `vertices k` first".into())),
                (Some(g), [u, v]) => {
                    let num = |w: &str| w.parse::<usize>().map_err(|_| err(format!("bad vertex `{w}`")));
                    g.add_edge(num(u)?, num(v)?).map_err(err)?;
                }
                (Some(_), _) => return Err(err(format!("expected `u v`, found `{line}`"))),
            }
        }
        graph.ok_or(GadgetError::Graph {
            line: 0,
            msg: "missing `vertices k` header".into(),
        })
    }

    pub fn render(&self) -> String {
        let mut out = format!("vertices {}\n", self.n);
        for (u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }
}

/// Team `{(v,v)} ∪ {(u,v),(v,u) : uv ∈ E}` over `x y`, checked against
/// `x ⊥ y ∨ x ⊥ y ∨ x ⊥ y ∨ x ≠ y`.
pub fn gadget_clique_cover(g: &Graph) -> Result<GadgetInstance, GadgetError> {
    let structure = Structure::new((0..g.n).map(|v| v.to_string()))?;
    let e = |v: usize| Elem(v as u32);
    let rows = (0..g.n)
        .map(|v| vec![e(v), e(v)])
        .chain(g.edges().flat_map(|(u, v)| [vec![e(u), e(v)], vec![e(v), e(u)]]));
    let team = Team::from_rows(["x", "y"], rows)?;
    let perp = || Formula::indep(&["x"], &[], &["y"]);
    let formula = Formula::or_all([perp(), perp(), perp(), Formula::neq("x", "y")])
        .expect("non-empty disjunction");
    Ok(GadgetInstance {
        structure,
        team,
        formula,
        provenance: Provenance {
            generator: "cliquecover",
            source: g.render(),
        },
    })
}

/// Team of rows `s_i^j` (`0 ≤ j ≤ i < n²`) over `v1 v2 r1 r2 m e` on the
/// domain `{0..n-1}`, checked against `∃x (=(x,r1,r2,e;m) ∧ =(v1,v2;x))`.
///
/// `(v1,v2)` and `(r1,r2)` are the base-`n` digits of `i` and `j`,
/// `m = 1` iff `i = j`, and `e = 1` iff `i = j` or `ji` is an edge.
pub fn gadget_coloring(g: &Graph, n: usize) -> Result<GadgetInstance, GadgetError> {
    if n < 2 || g.n != n * n {
        return Err(GadgetError::VertexCount {
            expected: n * n,
            found: g.n,
        });
    }
    let structure = Structure::with_size(n);
    let d = |k: usize| Elem(k as u32);
    let bit = |b: bool| Elem(u32::from(b));
    let mut team = Team::new(["v1", "v2", "r1", "r2", "m", "e"])?;
    for i in 0..n * n {
        for j in 0..=i {
            team.insert(vec![
                d(i / n),
                d(i % n),
                d(j / n),
                d(j % n),
                bit(i == j),
                bit(i == j || g.has_edge(i, j)),
            ])?;
        }
    }
    let formula = Formula::exists(
        "x",
        Formula::and(
            Formula::dep(&["x", "r1", "r2", "e"], "m"),
            Formula::dep(&["v1", "v2"], "x"),
        ),
    );
    Ok(GadgetInstance {
        structure,
        team,
        formula,
        provenance: Provenance {
            generator: "coloring",
            source: g.render(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{classify, parse, FragmentTag};

    #[test]
    fn graph_format() {
        let g = Graph::parse("# triangle\nvertices 3\n0 1\n2 1\n\n0 2\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(Graph::parse(&g.render()).unwrap(), g);
        assert!(Graph::parse("vertices 2\n0 0\n").is_err());
        assert!(Graph::parse("vertices 2\n0 2\n").is_err());
        assert!(Graph::parse("0 1\n").is_err());
    }

    #[test]
    fn clique_cover_rows() {
        let k3 = Graph::with_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let g = gadget_clique_cover(&k3).unwrap();
        assert_eq!(g.team.len(), 9);
        assert_eq!(g.formula, parse("perp(x;;y) | perp(x;;y) | perp(x;;y) | x != y").unwrap());
        assert_eq!(classify(&g.formula), FragmentTag::General);
    }

    #[test]
    fn coloring_rows() {
        let g = Graph::with_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let inst = gadget_coloring(&g, 2).unwrap();
        assert_eq!(inst.team.len(), 1 + 2 + 3 + 4);
        assert_eq!(
            inst.formula,
            parse("E x . (=(x,r1,r2,e;m) & =(v1,v2;x))").unwrap()
        );
        assert!(matches!(
            gadget_coloring(&g, 3),
            Err(GadgetError::VertexCount { expected: 9, found: 4 })
        ));
    }
}
