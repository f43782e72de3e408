use std::collections::HashMap;

use crate::formula::Var;
use crate::model::{Elem, Team};

/// Working copy of a team with indexed rows, so subteams can be passed
/// around as index lists or masks.
#[derive(Debug, Clone)]
pub(crate) struct Tab {
    pub vars: Vec<Var>,
    pub rows: Vec<Vec<Elem>>,
}

impl Tab {
    pub fn from_team(team: &Team) -> Tab {
        Tab {
            vars: team.vars().to_vec(),
            rows: team.rows().cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn col(&self, v: &str) -> usize {
        self.vars
            .iter()
            .position(|w| w == v)
            .unwrap_or_else(|| panic!("variable `{v}` not in team (validated earlier)"))
    }

    pub fn cols(&self, vs: &[Var]) -> Vec<usize> {
        vs.iter().map(|v| self.col(v)).collect()
    }

    pub fn key(&self, r: usize, cols: &[usize]) -> Vec<Elem> {
        cols.iter().map(|&c| self.rows[r][c]).collect()
    }

    /// `pool[A/x]` as a fresh table. `map[r]` lists the new indices of the
    /// extensions of row `r` (empty for rows outside the pool).
    pub fn expand(&self, pool: &[usize], x: &str, domain: usize) -> (Tab, Vec<Vec<usize>>) {
        let (vars, col) = match self.vars.iter().position(|v| v == x) {
            Some(c) => (self.vars.clone(), c),
            None => {
                let mut vars = self.vars.clone();
                vars.push(x.to_string());
                (vars, self.vars.len())
            }
        };
        let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
        let mut rows = Vec::new();
        let mut map = vec![Vec::new(); self.rows.len()];
        for &r in pool {
            for a in 0..domain as u32 {
                let mut row = self.rows[r].clone();
                if col == row.len() {
                    row.push(Elem(a));
                } else {
                    row[col] = Elem(a);
                }
                let id = *index.entry(row.clone()).or_insert_with(|| {
                    rows.push(row);
                    rows.len() - 1
                });
                map[r].push(id);
            }
        }
        (Tab { vars, rows }, map)
    }
}
