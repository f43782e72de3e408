use super::{Cnf, Lit, SatError, VarMap};

fn err(line: usize, msg: impl Into<String>) -> SatError {
    SatError::Dimacs {
        line,
        msg: msg.into(),
    }
}

/// DIMACS CNF text: a `p cnf V C` header and one zero-terminated clause per line.
pub fn emit_dimacs(f: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars(), f.len());
    for c in f.clauses() {
        for l in c.lits() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// One `index label element...` line per variable.
pub fn emit_manifest(m: &VarMap) -> String {
    let mut out = String::new();
    for (v, label, tuple) in m.iter() {
        out.push_str(&v.to_string());
        out.push(' ');
        out.push_str(label);
        for e in tuple {
            out.push(' ');
            out.push_str(e);
        }
        out.push('\n');
    }
    out
}

pub fn parse_manifest(text: &str) -> Result<VarMap, SatError> {
    let mut m = VarMap::new();
    for (i, line) in text.lines().enumerate() {
        let mut toks = line.split_whitespace();
        let Some(first) = toks.next() else { continue };
        let idx: u32 = first
            .parse()
            .map_err(|_| err(i + 1, format!("bad variable index `{first}`")))?;
        let label = toks.next().ok_or_else(|| err(i + 1, "missing label"))?;
        let tuple: Vec<String> = toks.map(str::to_string).collect();
        if m.intern(label, tuple) != idx {
            return Err(err(i + 1, "manifest indices must be 1, 2, 3, ... in order"));
        }
    }
    Ok(m)
}

/// Parse DIMACS keeping every clause exactly as written (repeated literals
/// included). Returns the declared variable count and the clauses.
pub fn parse_dimacs_raw(text: &str) -> Result<(u32, Vec<Vec<i32>>), SatError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        last_line = n;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(err(n, "second header"));
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            match toks.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|_| err(n, "bad variable count"))?;
                    let c = c.parse().map_err(|_| err(n, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(err(n, "expected `p cnf VARS CLAUSES`")),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(n, "clause before header"));
        };
        for tok in t.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| err(n, format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if l.unsigned_abs() > vars {
                return Err(err(n, format!("literal {l} out of range 1..={vars}")));
            } else {
                cur.push(l);
            }
        }
    }
    let Some((vars, count)) = header else {
        return Err(err(last_line.max(1), "missing header"));
    };
    if !cur.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(err(
            last_line.max(1),
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    Ok((vars, clauses))
}

/// Parse DIMACS into a [`Cnf`]. Tautological clauses are dropped.
pub fn parse_dimacs(text: &str) -> Result<Cnf, SatError> {
    let (vars, clauses) = parse_dimacs_raw(text)?;
    let mut f = Cnf::new(vars);
    for c in clauses {
        f.add(c.into_iter().map(Lit::from_dimacs));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emit_examples() {
        let mut f = Cnf::new(2);
        f.add([Lit::pos(1), Lit::neg(2)]);
        assert_eq!(emit_dimacs(&f), "p cnf 2 1\n1 -2 0\n");
        assert_eq!(emit_dimacs(&Cnf::new(0)), "p cnf 0 0\n");
    }

    #[test]
    fn round_trip() {
        let mut f = Cnf::new(4);
        f.add([Lit::pos(1), Lit::neg(2)]);
        f.add([Lit::neg(4)]);
        f.add([]);
        assert_eq!(parse_dimacs(&emit_dimacs(&f)).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(SatError::Dimacs { line: 2, .. })
        ));
        assert!(parse_dimacs("p dnf 1 1\n1 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1\n").is_err());
        let f = parse_dimacs("c comment\np cnf 3 2\n1 -2\n3 0 -1 0\n").unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn raw_keeps_repeats() {
        let (v, cs) = parse_dimacs_raw("p cnf 1 1\n1 1 1 0\n").unwrap();
        assert_eq!(v, 1);
        assert_eq!(cs, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = VarMap::new();
        m.intern("X", vec!["0".into(), "1".into()]);
        m.intern("Y", vec![]);
        let text = emit_manifest(&m);
        assert_eq!(text, "1 X 0 1\n2 Y\n");
        assert_eq!(parse_manifest(&text).unwrap(), m);
    }
}
