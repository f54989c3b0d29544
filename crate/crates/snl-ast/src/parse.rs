//! S-expression reader for the sentence DSL.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{FoDecl, Formula, Sentence, SoDecl, Sort, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: arity mismatch: {msg}")]
    Arity { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {msg}")]
    Invalid { line: usize, col: usize, msg: String },
}

#[derive(Clone, Copy, Debug, Default)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Sx {
    Atom(String, Pos),
    List(Vec<Sx>, Pos),
}

impl Sx {
    fn pos(&self) -> Pos {
        match self {
            Sx::Atom(_, p) | Sx::List(_, p) => *p,
        }
    }
}

fn syntax(p: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line: p.line, col: p.col, msg: msg.into() }
}

fn invalid(p: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Invalid { line: p.line, col: p.col, msg: msg.into() }
}

fn read_all(text: &str) -> Result<Vec<Sx>, ParseError> {
    let mut stack: Vec<(Vec<Sx>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let mut atom = String::new();
    let mut atom_pos = Pos::default();

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<Sx>, Pos)], top: &mut Vec<Sx>) {
        if atom.is_empty() {
            return;
        }
        let a = Sx::Atom(std::mem::take(atom), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(a),
            None => top.push(a),
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        match c {
            ';' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                for c2 in chars.by_ref() {
                    if c2 == '\n' {
                        break;
                    }
                }
                line += 1;
                col = 1;
                continue;
            }
            '(' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                let (items, p) = stack.pop().ok_or_else(|| syntax(here, "unexpected `)`"))?;
                let l = Sx::List(items, p);
                match stack.last_mut() {
                    Some((items, _)) => items.push(l),
                    None => top.push(l),
                }
            }
            c if c.is_whitespace() => flush(&mut atom, atom_pos, &mut stack, &mut top),
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    flush(&mut atom, atom_pos, &mut stack, &mut top);
    if let Some((_, p)) = stack.last() {
        return Err(syntax(p.to_owned(), "unbalanced `(`: list is never closed"));
    }
    Ok(top)
}

fn head(items: &[Sx]) -> Option<&str> {
    match items.first() {
        Some(Sx::Atom(a, _)) => Some(a.as_str()),
        _ => None,
    }
}

fn atom_of(sx: &Sx, what: &str) -> Result<String, ParseError> {
    match sx {
        Sx::Atom(a, _) => Ok(a.clone()),
        Sx::List(_, p) => Err(syntax(*p, format!("expected {what}, found a list"))),
    }
}

fn list_of<'a>(sx: &'a Sx, what: &str) -> Result<&'a [Sx], ParseError> {
    match sx {
        Sx::List(items, _) => Ok(items),
        Sx::Atom(a, p) => Err(syntax(*p, format!("expected {what}, found `{a}`"))),
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.')
}

const KEYWORDS: &[&str] =
    &["sentence", "exists", "forall", "const", "psi", "rel", "so", "not", "and", "or", "imp", "true", "false", "mu", "suc", "pred", "num", "obj"];

struct Scope {
    so: BTreeMap<String, usize>,
    fo: BTreeMap<String, bool>,
    consts: BTreeSet<String>,
    rel_arity: BTreeMap<String, usize>,
}

impl Scope {
    fn term(&mut self, sx: &Sx, ground: bool) -> Result<Term, ParseError> {
        match sx {
            Sx::Atom(a, p) => {
                if let Ok(v) = a.parse::<u64>() {
                    return Ok(Term::Num(v));
                }
                if !ground {
                    if self.fo.contains_key(a) {
                        return Ok(Term::Var(a.clone()));
                    }
                }
                if a == "n" || self.consts.contains(a) {
                    return Ok(Term::Const(a.clone()));
                }
                if !is_ident(a) {
                    return Err(syntax(*p, format!("malformed term `{a}`")));
                }
                Err(ParseError::Undeclared { line: p.line, col: p.col, name: a.clone() })
            }
            Sx::List(items, p) => {
                let h = head(items).ok_or_else(|| syntax(*p, "term list must start with an operator"))?;
                if h == "mu" {
                    if ground {
                        return Err(invalid(*p, "μ-term not allowed in a range bound"));
                    }
                    return self.mu(items, *p);
                }
                let k = if h == "suc" {
                    Some(1)
                } else if let Some(rest) = h.strip_prefix("suc^") {
                    Some(rest.parse::<u64>().ok().filter(|k| *k >= 1).ok_or_else(|| syntax(*p, format!("bad successor power `{h}`")))?)
                } else {
                    None
                };
                if h != "pred" && k.is_none() {
                    return Err(syntax(*p, format!("unknown term operator `{h}`")));
                }
                if items.len() != 2 {
                    return Err(ParseError::Arity { line: p.line, col: p.col, msg: format!("`{h}` takes one argument") });
                }
                let inner = self.term(&items[1], ground)?;
                let (base, _) = inner.base_offset();
                if let Term::Var(v) = base {
                    if self.fo.get(v) == Some(&false) {
                        return Err(invalid(*p, format!("`{h}` applied to object variable `{v}`")));
                    }
                }
                Ok(match k {
                    Some(k) => Term::suc(inner, k),
                    None => Term::pred(inner),
                })
            }
        }
    }

    fn mu(&mut self, items: &[Sx], p: Pos) -> Result<Term, ParseError> {
        if items.len() != 3 {
            return Err(syntax(p, "expected (mu z (so P clock z))"));
        }
        let bound = atom_of(&items[1], "μ-bound variable")?;
        if self.fo.contains_key(&bound) {
            return Err(invalid(items[1].pos(), format!("μ-bound `{bound}` shadows a declared variable")));
        }
        let body = list_of(&items[2], "(so P clock z)")?;
        if head(body) != Some("so") || body.len() != 4 {
            return Err(syntax(items[2].pos(), "μ body must be (so P clock z) with a 1-valued soVar"));
        }
        let so = atom_of(&body[1], "second-order variable")?;
        match self.so.get(&so) {
            None => return Err(ParseError::Undeclared { line: body[1].pos().line, col: body[1].pos().col, name: so }),
            Some(&k) if k != 1 => {
                return Err(ParseError::Arity {
                    line: body[1].pos().line,
                    col: body[1].pos().col,
                    msg: format!("μ-terms need a 1-valued soVar, `{so}` has {k} value places"),
                })
            }
            _ => {}
        }
        match &body[3] {
            Sx::Atom(z, _) if *z == bound => {}
            other => return Err(syntax(other.pos(), format!("μ body must end with the bound variable `{bound}`"))),
        }
        let clock = self.term(&body[2], false)?;
        if clock.contains_mu() {
            return Err(invalid(body[2].pos(), "nested μ-terms are not allowed"));
        }
        Ok(Term::Mu { so, clock: Box::new(clock), bound })
    }

    fn formula(&mut self, sx: &Sx) -> Result<Formula, ParseError> {
        let (items, p) = match sx {
            Sx::Atom(a, _) if a == "true" => return Ok(Formula::True),
            Sx::Atom(a, _) if a == "false" => return Ok(Formula::False),
            Sx::Atom(a, p) => return Err(syntax(*p, format!("expected a formula, found `{a}`"))),
            Sx::List(items, p) => (items, *p),
        };
        let h = head(items).ok_or_else(|| syntax(p, "formula list must start with an operator"))?;
        let arity_err = |msg: String| ParseError::Arity { line: p.line, col: p.col, msg };
        match h {
            "rel" => {
                let pred = atom_of(items.get(1).ok_or_else(|| syntax(p, "rel needs a predicate"))?, "predicate")?;
                if self.so.contains_key(&pred) || self.fo.contains_key(&pred) {
                    return Err(invalid(p, format!("`{pred}` is not a relation symbol")));
                }
                let args = items[2..].iter().map(|t| self.term(t, false)).collect::<Result<Vec<_>, _>>()?;
                match self.rel_arity.get(&pred) {
                    Some(&k) if k != args.len() => return Err(arity_err(format!("`{pred}` used with {} arguments, earlier with {k}", args.len()))),
                    _ => {
                        self.rel_arity.insert(pred.clone(), args.len());
                    }
                }
                Ok(Formula::Rel { pred, args })
            }
            "so" => {
                let var = atom_of(items.get(1).ok_or_else(|| syntax(p, "so needs a variable"))?, "second-order variable")?;
                let k = *self.so.get(&var).ok_or_else(|| ParseError::Undeclared {
                    line: items[1].pos().line,
                    col: items[1].pos().col,
                    name: var.clone(),
                })?;
                let clock = items.get(2).ok_or_else(|| syntax(p, "so needs a clock argument"))?;
                let clock = self.term(clock, false)?;
                let args = items[3..].iter().map(|t| self.term(t, false)).collect::<Result<Vec<_>, _>>()?;
                if args.len() != k {
                    return Err(arity_err(format!("`{var}` has {k} value places, got {}", args.len())));
                }
                Ok(Formula::So { var, clock, args })
            }
            "=" | "<=" => {
                if items.len() != 3 {
                    return Err(arity_err(format!("`{h}` takes two terms")));
                }
                let a = self.term(&items[1], false)?;
                let b = self.term(&items[2], false)?;
                Ok(if h == "=" { Formula::Eq(a, b) } else { Formula::Le(a, b) })
            }
            "not" => {
                if items.len() != 2 {
                    return Err(arity_err("`not` takes one formula".into()));
                }
                Ok(Formula::not(self.formula(&items[1])?))
            }
            "and" | "or" => {
                let fs = items[1..].iter().map(|f| self.formula(f)).collect::<Result<Vec<_>, _>>()?;
                Ok(if h == "and" { Formula::And(fs) } else { Formula::Or(fs) })
            }
            "imp" => {
                if items.len() != 3 {
                    return Err(arity_err("`imp` takes two formulas".into()));
                }
                Ok(Formula::imp(self.formula(&items[1])?, self.formula(&items[2])?))
            }
            other => Err(syntax(p, format!("unknown formula operator `{other}`"))),
        }
    }
}

/// Parses one `(sentence ...)` form.
pub fn parse_sentence(text: &str) -> Result<Sentence, ParseError> {
    let top = read_all(text)?;
    let sx = match top.as_slice() {
        [one] => one,
        [] => return Err(syntax(Pos { line: 1, col: 1 }, "empty input")),
        [_, second, ..] => return Err(syntax(second.pos(), "trailing input after the sentence")),
    };
    let items = list_of(sx, "(sentence ...)")?;
    if head(items) != Some("sentence") {
        return Err(syntax(sx.pos(), "expected (sentence ...)"));
    }
    let mut rest = items[1..].iter().peekable();
    let mut scope = Scope { so: BTreeMap::new(), fo: BTreeMap::new(), consts: BTreeSet::new(), rel_arity: BTreeMap::new() };
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut claim = |name: &str, p: Pos| -> Result<(), ParseError> {
        if KEYWORDS.contains(&name) || name == "n" || !is_ident(name) {
            return Err(invalid(p, format!("`{name}` cannot be used as a name")));
        }
        if !names.insert(name.to_string()) {
            return Err(invalid(p, format!("`{name}` declared twice")));
        }
        Ok(())
    };

    let ex = rest.next().ok_or_else(|| syntax(sx.pos(), "missing (exists ...)"))?;
    let ex_items = list_of(ex, "(exists ...)")?;
    if head(ex_items) != Some("exists") {
        return Err(syntax(ex.pos(), "expected (exists ...)"));
    }
    let mut so_vars = Vec::new();
    for d in &ex_items[1..] {
        let d_items = list_of(d, "(P k)")?;
        if d_items.len() != 2 {
            return Err(syntax(d.pos(), "expected (P k)"));
        }
        let name = atom_of(&d_items[0], "second-order variable")?;
        let k: usize = atom_of(&d_items[1], "value arity")?.parse().map_err(|_| syntax(d_items[1].pos(), "value arity must be a natural number"))?;
        claim(&name, d.pos())?;
        scope.so.insert(name.clone(), k);
        so_vars.push(SoDecl { name, arity: k });
    }

    let fa = rest.next().ok_or_else(|| syntax(sx.pos(), "missing (forall ...)"))?;
    let fa_items = list_of(fa, "(forall ...)")?;
    if head(fa_items) != Some("forall") {
        return Err(syntax(fa.pos(), "expected (forall ...)"));
    }
    // constants must be known before range bounds are read
    let mut consts = Vec::new();
    if let Some(Sx::List(c_items, cp)) = rest.peek() {
        if head(c_items) == Some("const") {
            for c in &c_items[1..] {
                let name = atom_of(c, "constant")?;
                claim(&name, *cp)?;
                scope.consts.insert(name.clone());
                consts.push(name);
            }
            rest.next();
        }
    }
    let mut fo_vars = Vec::new();
    for d in &fa_items[1..] {
        let d_items = list_of(d, "variable declaration")?;
        let name = atom_of(d_items.first().ok_or_else(|| syntax(d.pos(), "empty declaration"))?, "variable")?;
        let kind = d_items.get(1).map(|k| atom_of(k, "sort")).transpose()?;
        let sort = match (kind.as_deref(), d_items.len()) {
            (Some("num"), 4) => Sort::Num { lo: scope.term(&d_items[2], true)?, hi: scope.term(&d_items[3], true)? },
            (Some("obj"), 3) => Sort::Obj { universe: atom_of(&d_items[2], "universe")? },
            _ => return Err(syntax(d.pos(), "expected (v num LO HI) or (v obj UNIVERSE)")),
        };
        claim(&name, d.pos())?;
        scope.fo.insert(name.clone(), sort.is_num());
        fo_vars.push(FoDecl { name, sort });
    }

    let mut matrix = Vec::new();
    for ps in rest {
        let ps_items = list_of(ps, "(psi F)")?;
        if head(ps_items) != Some("psi") || ps_items.len() != 2 {
            return Err(syntax(ps.pos(), "expected (psi F)"));
        }
        matrix.push(scope.formula(&ps_items[1])?);
    }
    let s = Sentence { so_vars, fo_vars, consts, matrix };
    if let Some((a, b, v)) = s.shared_variables().into_iter().next() {
        return Err(invalid(sx.pos(), format!("conjuncts {a} and {b} share the variable `{v}`")));
    }
    Ok(s)
}
