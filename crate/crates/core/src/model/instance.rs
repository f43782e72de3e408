//! Plain-text instance files: a structure followed by a team.
//!
//! ```text
//! # comment
//! domain 0 1 a
//! rel R 2
//! 0 1
//! 1 a
//!
//! team x y
//! 0 1
//! ```
//!
//! A relation block runs until a blank line or the next keyword line. The
//! team block runs to the end of the file. Arity-0 tuples and rows of a team
//! with no variables are written `()`.

use super::{Elem, ModelError, Structure, Team};

fn malformed(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Malformed {
        line,
        msg: msg.into(),
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
    /// Blank before comment stripping; comment-only lines do not end a block.
    blank: bool,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            Line {
                number: i + 1,
                tokens: body.split_whitespace().collect(),
                blank: raw.trim().is_empty(),
            }
        })
        .collect()
}

fn is_keyword(tok: &str) -> bool {
    matches!(tok, "domain" | "rel" | "team")
}

fn parse_tuple(
    structure: &Structure,
    line: &Line<'_>,
    arity: usize,
) -> Result<Vec<Elem>, ModelError> {
    if arity == 0 {
        return if line.tokens == ["()"] {
            Ok(Vec::new())
        } else {
            Err(malformed(line.number, "expected `()` for an empty tuple"))
        };
    }
    if line.tokens.len() != arity {
        return Err(malformed(
            line.number,
            format!("expected {arity} entries, found {}", line.tokens.len()),
        ));
    }
    line.tokens
        .iter()
        .map(|t| {
            structure
                .elem(t)
                .ok_or_else(|| malformed(line.number, format!("unknown element `{t}`")))
        })
        .collect()
}

/// Parse an instance file into a structure and a team.
pub fn parse_instance(text: &str) -> Result<(Structure, Team), ModelError> {
    let lines = lines(text);
    let mut i = 0;
    let skip = |i: &mut usize| {
        while *i < lines.len() && lines[*i].tokens.is_empty() {
            *i += 1;
        }
    };

    skip(&mut i);
    let header = lines
        .get(i)
        .ok_or_else(|| malformed(lines.len().max(1), "missing `domain` line"))?;
    if header.tokens[0] != "domain" {
        return Err(malformed(header.number, "expected `domain`"));
    }
    let mut structure = Structure::new(header.tokens[1..].iter().copied())
        .map_err(|e| malformed(header.number, e.to_string()))?;
    i += 1;

    loop {
        skip(&mut i);
        let Some(line) = lines.get(i) else {
            return Err(malformed(lines.len().max(1), "missing `team` line"));
        };
        match line.tokens[0] {
            "rel" => {
                let (name, arity) = match line.tokens.as_slice() {
                    [_, name, arity] => (
                        *name,
                        arity
                            .parse::<usize>()
                            .map_err(|_| malformed(line.number, "bad arity"))?,
                    ),
                    _ => return Err(malformed(line.number, "expected `rel NAME ARITY`")),
                };
                let number = line.number;
                i += 1;
                let mut tuples = Vec::new();
                while let Some(l) = lines.get(i) {
                    if l.blank {
                        break;
                    }
                    if l.tokens.is_empty() {
                        i += 1;
                        continue;
                    }
                    if is_keyword(l.tokens[0]) {
                        break;
                    }
                    tuples.push(parse_tuple(&structure, l, arity)?);
                    i += 1;
                }
                structure
                    .add_relation(name, arity, tuples)
                    .map_err(|e| malformed(number, e.to_string()))?;
            }
            "team" => {
                let mut team = Team::new(line.tokens[1..].iter().copied())
                    .map_err(|e| malformed(line.number, e.to_string()))?;
                let arity = team.vars().len();
                for l in &lines[i + 1..] {
                    if l.tokens.is_empty() {
                        continue;
                    }
                    if is_keyword(l.tokens[0]) {
                        return Err(malformed(l.number, "the team block must come last"));
                    }
                    team.insert(parse_tuple(&structure, l, arity)?)?;
                }
                return Ok((structure, team));
            }
            other => {
                return Err(malformed(
                    line.number,
                    format!("expected `rel` or `team`, found `{other}`"),
                ))
            }
        }
    }
}

fn push_tuple(out: &mut String, structure: &Structure, tuple: &[Elem]) {
    if tuple.is_empty() {
        out.push_str("()");
    } else {
        let names: Vec<&str> = tuple.iter().map(|&e| structure.name(e)).collect();
        out.push_str(&names.join(" "));
    }
    out.push('\n');
}

/// Render an instance in the format read by [`parse_instance`].
pub fn render_instance(structure: &Structure, team: &Team) -> String {
    let mut out = String::new();
    out.push_str("domain ");
    out.push_str(&structure.domain().join(" "));
    out.push('\n');
    for (name, rel) in structure.relations() {
        out.push_str(&format!("rel {name} {}\n", rel.arity()));
        for t in rel.tuples() {
            push_tuple(&mut out, structure, t);
        }
        out.push('\n');
    }
    out.push_str("team");
    for v in team.vars() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    for row in team.rows() {
        push_tuple(&mut out, structure, row);
    }
    out
}
