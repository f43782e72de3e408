//! Finite relational structures and teams.

mod instance;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::Var;

pub use instance::{parse_instance, render_instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("domain must not be empty")]
    EmptyDomain,
    #[error("element `{0}` listed twice in the domain")]
    DuplicateElement(String),
    #[error("element `{0}` is not in the domain")]
    UnknownElement(String),
    #[error("element index {0} is out of range")]
    ElementOutOfRange(u32),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` listed twice in the team domain")]
    DuplicateVariable(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{0}` declared twice")]
    DuplicateRelation(String),
    #[error("tuple has {found} entries, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("choice function has no entry for a team row")]
    MissingChoice,
    #[error("choice function maps a row to the empty set")]
    EmptyChoice,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

/// A domain element, identified by its position in the structure's domain.
///
/// The derived order is the domain order and is used for every canonical
/// iteration (team rows, tuple enumeration, emitted clauses).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An assignment, read against the variable list of the team holding it.
pub type Assignment = Vec<Elem>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<Elem>>,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<Elem>> {
        &self.tuples
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        self.tuples.contains(tuple)
    }
}

/// A finite structure: a non-empty ordered domain and named relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    domain: Vec<String>,
    index: HashMap<String, Elem>,
    relations: BTreeMap<String, Relation>,
}

impl Structure {
    pub fn new<S: Into<String>>(
        domain: impl IntoIterator<Item = S>,
    ) -> Result<Structure, ModelError> {
        let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        if domain.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(domain.len());
        for (i, name) in domain.iter().enumerate() {
            if index.insert(name.clone(), Elem(i as u32)).is_some() {
                return Err(ModelError::DuplicateElement(name.clone()));
            }
        }
        Ok(Structure {
            domain,
            index,
            relations: BTreeMap::new(),
        })
    }

    /// Domain `{0, .., n-1}` with the numerals as element names. Panics on `n == 0`.
    pub fn with_size(n: usize) -> Structure {
        Structure::new((0..n).map(|i| i.to_string())).expect("non-empty domain")
    }

    pub fn add_relation(
        &mut self,
        name: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Elem>>,
    ) -> Result<(), ModelError> {
        if self.relations.contains_key(name) {
            return Err(ModelError::DuplicateRelation(name.to_string()));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(ModelError::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(e) = t.iter().find(|e| e.index() >= self.domain.len()) {
                return Err(ModelError::ElementOutOfRange(e.0));
            }
            set.insert(t);
        }
        self.relations
            .insert(name.to_string(), Relation { arity, tuples: set });
        Ok(())
    }

    /// Like [`Structure::add_relation`] with tuples given by element names.
    pub fn add_named_relation(
        &mut self,
        name: &str,
        arity: usize,
        tuples: &[&[&str]],
    ) -> Result<(), ModelError> {
        let tuples = tuples
            .iter()
            .map(|t| self.elems(t))
            .collect::<Result<Vec<_>, _>>()?;
        self.add_relation(name, arity, tuples)
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.domain.len() as u32).map(Elem)
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.index.get(name).copied()
    }

    /// Look up a tuple of element names.
    pub fn elems<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Elem>, ModelError> {
        names
            .iter()
            .map(|n| {
                self.elem(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownElement(n.as_ref().to_string()))
            })
            .collect()
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.domain[e.index()]
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// A team: a set of assignments over a fixed list of distinct variables.
///
/// Rows are kept in a sorted set, so iteration order is canonical and
/// duplicates collapse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Team {
    vars: Vec<Var>,
    rows: BTreeSet<Assignment>,
}

impl Team {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Result<Team, ModelError> {
        let vars: Vec<Var> = vars.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v) {
                return Err(ModelError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Team {
            vars,
            rows: BTreeSet::new(),
        })
    }

    pub fn from_rows<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        rows: impl IntoIterator<Item = Assignment>,
    ) -> Result<Team, ModelError> {
        let mut team = Team::new(vars)?;
        for row in rows {
            team.insert(row)?;
        }
        Ok(team)
    }

    /// Build a team from rows of small integers, read as element indices.
    pub fn from_indices<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        rows: &[&[u32]],
    ) -> Result<Team, ModelError> {
        Team::from_rows(
            vars,
            rows.iter().map(|r| r.iter().map(|&i| Elem(i)).collect()),
        )
    }

    /// Insert a row; returns `false` if it was already present.
    pub fn insert(&mut self, row: Assignment) -> Result<bool, ModelError> {
        if row.len() != self.vars.len() {
            return Err(ModelError::ArityMismatch {
                expected: self.vars.len(),
                found: row.len(),
            });
        }
        Ok(self.rows.insert(row))
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &Assignment> + DoubleEndedIterator {
        self.rows.iter()
    }

    pub fn contains(&self, row: &[Elem]) -> bool {
        self.rows.contains(row)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn columns<S: AsRef<str>>(&self, vars: &[S]) -> Result<Vec<usize>, ModelError> {
        vars.iter()
            .map(|v| {
                self.column(v.as_ref())
                    .ok_or_else(|| ModelError::UnknownVariable(v.as_ref().to_string()))
            })
            .collect()
    }

    /// Same variables, only the given rows (which must belong to the team's shape).
    pub fn with_rows<'a>(&self, rows: impl IntoIterator<Item = &'a Assignment>) -> Team {
        Team {
            vars: self.vars.clone(),
            rows: rows.into_iter().cloned().collect(),
        }
    }

    /// `X ↾ W`: every row projected onto the variables in `keep`, duplicates
    /// collapsed. Column order follows the team.
    pub fn restrict<S: AsRef<str>>(
        &self,
        keep: impl IntoIterator<Item = S>,
    ) -> Result<Team, ModelError> {
        let keep: Vec<String> = keep.into_iter().map(|s| s.as_ref().to_string()).collect();
        for v in &keep {
            if self.column(v).is_none() {
                return Err(ModelError::UnknownVariable(v.clone()));
            }
        }
        let cols: Vec<usize> = (0..self.vars.len())
            .filter(|&i| keep.contains(&self.vars[i]))
            .collect();
        Ok(Team {
            vars: cols.iter().map(|&i| self.vars[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&i| r[i]).collect())
                .collect(),
        })
    }

    /// `X(x̄)`: the relation of value tuples of `xs` across the team.
    pub fn relation<S: AsRef<str>>(&self, xs: &[S]) -> Result<BTreeSet<Vec<Elem>>, ModelError> {
        let cols = self.columns(xs)?;
        Ok(self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&i| r[i]).collect())
            .collect())
    }

    /// `X(A/x)`: every row extended (or overwritten, if `x` is already a
    /// variable of the team) with every element of the domain.
    pub fn extend_forall(&self, structure: &Structure, x: &str) -> Team {
        let (vars, col) = self.extended_vars(x);
        let mut rows = BTreeSet::new();
        for row in &self.rows {
            for m in structure.elements() {
                rows.insert(set_column(row, col, m));
            }
        }
        Team { vars, rows }
    }

    /// `X(F/x)`: every row `s` extended with each element of `choice[s]`.
    pub fn extend_choice(
        &self,
        choice: &BTreeMap<Assignment, BTreeSet<Elem>>,
        x: &str,
    ) -> Result<Team, ModelError> {
        let (vars, col) = self.extended_vars(x);
        let mut rows = BTreeSet::new();
        for row in &self.rows {
            let values = choice.get(row).ok_or(ModelError::MissingChoice)?;
            if values.is_empty() {
                return Err(ModelError::EmptyChoice);
            }
            for &m in values {
                rows.insert(set_column(row, col, m));
            }
        }
        Ok(Team { vars, rows })
    }

    fn extended_vars(&self, x: &str) -> (Vec<Var>, usize) {
        match self.column(x) {
            Some(col) => (self.vars.clone(), col),
            None => {
                let mut vars = self.vars.clone();
                vars.push(x.to_string());
                (vars, self.vars.len())
            }
        }
    }

    /// Render rows with element names, for diagnostics.
    pub fn display<'a>(&'a self, structure: &'a Structure) -> TeamDisplay<'a> {
        TeamDisplay {
            team: self,
            structure,
        }
    }
}

fn set_column(row: &[Elem], col: usize, value: Elem) -> Assignment {
    let mut out = row.to_vec();
    if col == out.len() {
        out.push(value);
    } else {
        out[col] = value;
    }
    out
}

pub struct TeamDisplay<'a> {
    team: &'a Team,
    structure: &'a Structure,
}

impl fmt::Display for TeamDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.team.vars.join(","))?;
        f.write_str(" {")?;
        for (i, row) in self.team.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let names: Vec<&str> = row.iter().map(|&e| self.structure.name(e)).collect();
            write!(f, "({})", names.join(","))?;
        }
        f.write_str("}")
    }
}
