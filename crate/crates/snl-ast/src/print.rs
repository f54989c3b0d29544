use std::fmt::Write;

use crate::syntax::{Formula, Sentence, Sort, Term};

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(v) | Term::Const(v) => v.clone(),
        Term::Num(k) => k.to_string(),
        Term::Suc(inner, 1) => format!("(suc {})", print_term(inner)),
        Term::Suc(inner, k) => format!("(suc^{k} {})", print_term(inner)),
        Term::Pred(inner) => format!("(pred {})", print_term(inner)),
        Term::Mu { so, clock, bound } => format!("(mu {bound} (so {so} {} {bound}))", print_term(clock)),
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_terms(ts: &[Term], out: &mut String) {
    for t in ts {
        out.push(' ');
        out.push_str(&print_term(t));
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Rel { pred, args } => {
            let _ = write!(out, "(rel {pred}");
            write_terms(args, out);
            out.push(')');
        }
        Formula::So { var, clock, args } => {
            let _ = write!(out, "(so {var} {}", print_term(clock));
            write_terms(args, out);
            out.push(')');
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "(= {} {})", print_term(a), print_term(b));
        }
        Formula::Le(a, b) => {
            let _ = write!(out, "(<= {} {})", print_term(a), print_term(b));
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(g, out);
            out.push(')');
        }
        Formula::And(fs) | Formula::Or(fs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for g in fs {
                out.push(' ');
                write_formula(g, out);
            }
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(imp ");
            write_formula(a, out);
            out.push(' ');
            write_formula(b, out);
            out.push(')');
        }
    }
}

/// Canonical DSL text. Short sentences print on one line, longer ones one clause per line.
pub fn print_sentence(s: &Sentence) -> String {
    let mut parts = Vec::new();
    let mut ex = String::from("(exists");
    for d in &s.so_vars {
        let _ = write!(ex, " ({} {})", d.name, d.arity);
    }
    ex.push(')');
    parts.push(ex);
    let mut fa = String::from("(forall");
    for d in &s.fo_vars {
        match &d.sort {
            Sort::Num { lo, hi } => {
                let _ = write!(fa, " ({} num {} {})", d.name, print_term(lo), print_term(hi));
            }
            Sort::Obj { universe } => {
                let _ = write!(fa, " ({} obj {universe})", d.name);
            }
        }
    }
    fa.push(')');
    parts.push(fa);
    if !s.consts.is_empty() {
        parts.push(format!("(const {})", s.consts.join(" ")));
    }
    for f in &s.matrix {
        parts.push(format!("(psi {})", print_formula(f)));
    }
    let one_line = format!("(sentence {})", parts.join(" "));
    if one_line.len() <= 80 {
        return one_line + "\n";
    }
    let mut out = String::from("(sentence\n");
    for p in &parts {
        let _ = writeln!(out, "  {p}");
    }
    out.pop();
    out.push_str(")\n");
    out
}
