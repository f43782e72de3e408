use thiserror::Error;

use super::{Formula, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negation at {pos} applied to a non-literal; only relation literals may be negated")]
    NegatedCompound { pos: usize },
    #[error("inclusion atom at {pos} has tuples of length {left} and {right}")]
    IncArity { pos: usize, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Bar,
    Amp,
    Bang,
    Eq,
    Neq,
    Dot,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            b'|' => Tok::Bar,
            b'&' => Tok::Amp,
            b'.' => Tok::Dot,
            b'=' => Tok::Eq,
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::Neq
                } else {
                    Tok::Bang
                }
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

/// Parse a formula from its ASCII concrete syntax.
///
/// ```text
/// phi   := disj
/// disj  := conj ("|" conj)*
/// conj  := quant ("&" quant)*
/// quant := ("E" | "A") var "." quant | atom | "(" phi ")"
/// atom  := "=(" varlist ";" var ")"
///        | "perp(" varlist ";" varlist ";" varlist ")"
///        | "inc(" varlist ";" varlist ")"
///        | ["!"] relname "(" varlist ")"
///        | var ("=" | "!=") var
/// ```
///
/// `perp(X;Y;Z)` is the atom X ⊥_Y Z; its middle tuple and the first tuple of
/// `=(..)` may be empty. Binary connectives associate to the left.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let phi = p.disj()?;
    match p.peek() {
        Tok::End => Ok(phi),
        other => Err(p.error(format!("expected end of input, found {}", other.describe()))),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[idx].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn error(&self, msg: String) -> FormulaError {
        FormulaError::Syntax {
            pos: self.pos(),
            msg,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(self.error(format!("expected a variable, found {}", other.describe()))),
        }
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.conj()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.conj()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.quant()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.quant()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn quant(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.disj()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(kw)
                if (kw == "E" || kw == "A") && matches!(self.peek_at(1), Tok::Ident(_)) =>
            {
                self.bump();
                let var = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.quant()?;
                Ok(if kw == "E" {
                    Formula::Exists(var, Box::new(body))
                } else {
                    Formula::Forall(var, Box::new(body))
                })
            }
            _ => self.atom(),
        }
    }

    /// Comma separated variables, possibly empty, stopped by `;` or `)`.
    fn varlist(&mut self) -> Result<Vec<Var>, FormulaError> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Semi | Tok::RParen) {
            return Ok(out);
        }
        out.push(self.ident()?);
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn nonempty_varlist(&mut self, what: &str) -> Result<Vec<Var>, FormulaError> {
        let pos = self.pos();
        let vars = self.varlist()?;
        if vars.is_empty() {
            return Err(FormulaError::Syntax {
                pos,
                msg: format!("{what} must not be empty"),
            });
        }
        Ok(vars)
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let start = self.pos();
        match self.peek().clone() {
            Tok::Eq if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let cond = self.varlist()?;
                self.expect(Tok::Semi)?;
                let target = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Dep { cond, target })
            }
            Tok::Bang => {
                self.bump();
                match (self.peek().clone(), self.peek_at(1)) {
                    (Tok::Ident(name), Tok::LParen) if name != "perp" && name != "inc" => {
                        self.bump();
                        self.bump();
                        let args = self.nonempty_varlist("relation arguments")?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::Rel {
                            name,
                            args,
                            positive: false,
                        })
                    }
                    _ => Err(FormulaError::NegatedCompound { pos: start }),
                }
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                match name.as_str() {
                    "perp" => {
                        let left = self.nonempty_varlist("left tuple of perp")?;
                        self.expect(Tok::Semi)?;
                        let cond = self.varlist()?;
                        self.expect(Tok::Semi)?;
                        let right = self.nonempty_varlist("right tuple of perp")?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::Indep { left, cond, right })
                    }
                    "inc" => {
                        let left = self.nonempty_varlist("left tuple of inc")?;
                        self.expect(Tok::Semi)?;
                        let right = self.nonempty_varlist("right tuple of inc")?;
                        self.expect(Tok::RParen)?;
                        if left.len() != right.len() {
                            return Err(FormulaError::IncArity {
                                pos: start,
                                left: left.len(),
                                right: right.len(),
                            });
                        }
                        Ok(Formula::Inc { left, right })
                    }
                    _ => {
                        let args = self.nonempty_varlist("relation arguments")?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::Rel {
                            name,
                            args,
                            positive: true,
                        })
                    }
                }
            }
            Tok::Ident(left) => {
                self.bump();
                let positive = match self.bump() {
                    Tok::Eq => true,
                    Tok::Neq => false,
                    other => {
                        return Err(FormulaError::Syntax {
                            pos: start,
                            msg: format!(
                                "expected `=` or `!=` after variable `{left}`, found {}",
                                other.describe()
                            ),
                        })
                    }
                };
                let right = self.ident()?;
                Ok(Formula::Eq {
                    left,
                    right,
                    positive,
                })
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_disjunction_of_dependence_atoms() {
        let phi = parse("=(x;y) | =(u;v)").unwrap();
        assert_eq!(
            phi,
            Formula::or(Formula::dep(&["x"], "y"), Formula::dep(&["u"], "v"))
        );
    }

    #[test]
    fn parses_smallest_inclusion_atom() {
        assert_eq!(parse("inc(x;y)").unwrap(), Formula::inc(&["x"], &["y"]));
    }

    #[test]
    fn rejects_unequal_inclusion_tuples() {
        assert!(matches!(
            parse("inc(x,y;z)"),
            Err(FormulaError::IncArity { left: 2, right: 1, .. })
        ));
    }

    #[test]
    fn rejects_negated_compound() {
        assert!(matches!(
            parse("!(R(x) & S(x))"),
            Err(FormulaError::NegatedCompound { pos: 0 })
        ));
        assert!(matches!(
            parse("R(x) | !perp(x;;y)"),
            Err(FormulaError::NegatedCompound { pos: 7 })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("R(x) & ") {
            Err(FormulaError::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("unexpected {other:?}"),
        }
        match parse("x y") {
            Err(FormulaError::Syntax { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("R()").is_err());
        assert!(parse("perp(;z;y)").is_err());
    }

    #[test]
    fn quantifier_binds_tightly() {
        let phi = parse("E x . =(x;y) & R(x)").unwrap();
        assert_eq!(
            phi,
            Formula::and(
                Formula::exists("x", Formula::dep(&["x"], "y")),
                Formula::rel("R", &["x"])
            )
        );
        let phi = parse("A x . (=(x;y) & R(x))").unwrap();
        assert_eq!(
            phi,
            Formula::forall(
                "x",
                Formula::and(Formula::dep(&["x"], "y"), Formula::rel("R", &["x"]))
            )
        );
    }

    #[test]
    fn quantifier_keywords_are_contextual() {
        // `E(x)` is a relation named E, `A = x` an equality on variable A.
        assert_eq!(parse("E(x)").unwrap(), Formula::rel("E", &["x"]));
        assert_eq!(parse("A = x").unwrap(), Formula::eq("A", "x"));
    }

    #[test]
    fn empty_slots() {
        assert_eq!(parse("=(;y)").unwrap(), Formula::dep(&[], "y"));
        assert_eq!(
            parse("perp(x;;y)").unwrap(),
            Formula::indep(&["x"], &[], &["y"])
        );
        assert_eq!(
            parse("perp(x, w; z; y)").unwrap(),
            Formula::indep(&["x", "w"], &["z"], &["y"])
        );
    }

    #[test]
    fn literals_and_precedence() {
        let phi = parse("!R(x) | x != y & S(x, y)").unwrap();
        assert_eq!(
            phi,
            Formula::or(
                Formula::not_rel("R", &["x"]),
                Formula::and(Formula::neq("x", "y"), Formula::rel("S", &["x", "y"]))
            )
        );
    }
}
