use super::{ConnectiveKind, Formula, QuantKind, Term};

/// Render a formula in the ASCII surface syntax accepted by [`super::parse`].
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    formula(f, &mut out);
    out
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    term(t, &mut out);
    out
}

fn formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Quant {
            kind,
            var,
            slash,
            body,
        } => {
            let q = match kind {
                QuantKind::Forall => 'A',
                QuantKind::Exists => 'E',
            };
            if slash.is_empty() {
                out.push(q);
                out.push_str(var);
            } else {
                out.push('(');
                out.push(q);
                out.push_str(var);
                out.push('/');
                let hidden: Vec<&str> = slash.iter().map(String::as_str).collect();
                out.push_str(&hidden.join(" "));
                out.push(')');
            }
            out.push(' ');
            formula(body, out);
        }
        Formula::Connective {
            choice_var: Some(cv),
            branches,
            ..
        } => {
            out.push_str("\\/_");
            out.push_str(cv);
            out.push('{');
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                formula(b, out);
            }
            out.push('}');
        }
        Formula::Connective {
            kind: ConnectiveKind::Or,
            branches,
            ..
        } if branches.len() != 1 => {
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    out.push_str(" | ");
                }
                conj(b, out);
            }
        }
        _ => conj(f, out),
    }
}

fn conj(f: &Formula, out: &mut String) {
    match f {
        Formula::Connective {
            kind: ConnectiveKind::And,
            choice_var: None,
            branches,
        } if branches.len() != 1 => {
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    out.push_str(" & ");
                }
                atomf(b, out);
            }
        }
        _ => atomf(f, out),
    }
}

fn atomf(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom { rel, args, negated } => {
            if *negated {
                out.push('~');
            }
            out.push_str(rel);
            out.push('(');
            term_list(args, out);
            out.push(')');
        }
        Formula::Equals { lhs, rhs, negated } => {
            if *negated {
                out.push('~');
            }
            term(lhs, out);
            out.push_str(" = ");
            term(rhs, out);
        }
        Formula::Connective {
            choice_var: None,
            branches,
            ..
        } if branches.len() == 1 => atomf(&branches[0], out),
        _ => {
            out.push('(');
            formula(f, out);
            out.push(')');
        }
    }
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::App(sym, args) if sym == "+" && args.len() == 2 => {
            term(&args[0], out);
            out.push_str(" + ");
            primary(&args[1], out);
        }
        _ => primary(t, out),
    }
}

fn primary(t: &Term, out: &mut String) {
    match t {
        Term::Var(name) => out.push_str(name),
        Term::App(sym, args) => {
            out.push_str(sym);
            out.push('(');
            term_list(args, out);
            out.push(')');
        }
    }
}

fn term_list(args: &[Term], out: &mut String) {
    for (k, a) in args.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        term(a, out);
    }
}
