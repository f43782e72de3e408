use super::Formula;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Disj,
    Conj,
    Quant,
}

/// Render a formula in the concrete syntax accepted by [`super::parse`].
///
/// Parentheses are inserted exactly where the left-associative grammar needs
/// them, so `parse(render(phi)) == phi` for every formula.
pub fn render(phi: &Formula) -> String {
    let mut out = String::new();
    write(phi, Level::Disj, &mut out);
    out
}

fn level_of(phi: &Formula) -> Level {
    match phi {
        Formula::Or(..) => Level::Disj,
        Formula::And(..) => Level::Conj,
        _ => Level::Quant,
    }
}

fn write(phi: &Formula, ctx: Level, out: &mut String) {
    if level_of(phi) < ctx {
        out.push('(');
        write(phi, Level::Disj, out);
        out.push(')');
        return;
    }
    match phi {
        Formula::Rel {
            name,
            args,
            positive,
        } => {
            if !positive {
                out.push('!');
            }
            out.push_str(name);
            out.push('(');
            out.push_str(&args.join(","));
            out.push(')');
        }
        Formula::Eq {
            left,
            right,
            positive,
        } => {
            out.push_str(left);
            out.push_str(if *positive { " = " } else { " != " });
            out.push_str(right);
        }
        Formula::Dep { cond, target } => {
            out.push_str("=(");
            out.push_str(&cond.join(","));
            out.push(';');
            out.push_str(target);
            out.push(')');
        }
        Formula::Indep { left, cond, right } => {
            out.push_str("perp(");
            out.push_str(&left.join(","));
            out.push(';');
            out.push_str(&cond.join(","));
            out.push(';');
            out.push_str(&right.join(","));
            out.push(')');
        }
        Formula::Inc { left, right } => {
            out.push_str("inc(");
            out.push_str(&left.join(","));
            out.push(';');
            out.push_str(&right.join(","));
            out.push(')');
        }
        Formula::Or(a, b) => {
            write(a, Level::Disj, out);
            out.push_str(" | ");
            write(b, Level::Conj, out);
        }
        Formula::And(a, b) => {
            write(a, Level::Conj, out);
            out.push_str(" & ");
            write(b, Level::Quant, out);
        }
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            out.push_str(if matches!(phi, Formula::Exists(..)) {
                "E "
            } else {
                "A "
            });
            out.push_str(x);
            out.push_str(" . ");
            write(body, Level::Quant, out);
        }
    }
}
