//! Slot-indexed formulas in negation normal form, and their 3-valued evaluation
//! against partial variable assignments and partial witnesses.

use std::collections::{BTreeMap, HashMap, HashSet};

use snl_ast::{DomStructure, FoDecl, Formula, RelStructure, Sentence, Term, Witness};

use crate::EvalError;

/// Cell value meaning "not yet assigned".
pub const UNK: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K3 {
    F,
    U,
    T,
}

impl K3 {
    pub fn from_bool(b: bool) -> K3 {
        if b {
            K3::T
        } else {
            K3::F
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TV {
    Val(u64),
    Bot,
    Unk,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CT {
    Slot(usize),
    Val(u64),
    Suc(Box<CT>, u64),
    Pred(Box<CT>),
    Mu(usize, Box<CT>),
}

impl CT {
    pub fn slots(&self, out: &mut Vec<usize>) {
        match self {
            CT::Slot(s) => out.push(*s),
            CT::Suc(t, _) | CT::Pred(t) | CT::Mu(_, t) => t.slots(out),
            CT::Val(_) => {}
        }
    }

    pub fn has_mu(&self) -> bool {
        match self {
            CT::Mu(..) => true,
            CT::Suc(t, _) | CT::Pred(t) => t.has_mu(),
            _ => false,
        }
    }

    /// `Some((slot, k))` when the term is `slot + k`.
    pub fn direct(&self) -> Option<(usize, u64)> {
        match self {
            CT::Slot(s) => Some((*s, 0)),
            CT::Suc(t, k) => match t.as_ref() {
                CT::Slot(s) => Some((*s, *k)),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Rel(usize, Vec<CT>),
    So(usize, CT, Vec<CT>),
    Eq(CT, CT),
    Le(CT, CT),
}

impl Atom {
    pub fn terms(&self) -> Vec<&CT> {
        match self {
            Atom::Rel(_, args) => args.iter().collect(),
            Atom::So(_, c, args) => std::iter::once(c).chain(args).collect(),
            Atom::Eq(a, b) | Atom::Le(a, b) => vec![a, b],
        }
    }

    pub fn slots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for t in self.terms() {
            t.slots(&mut out);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Mentions a second-order variable, as an atom or through a μ-term.
    pub fn is_so(&self) -> bool {
        matches!(self, Atom::So(..)) || self.terms().iter().any(|t| t.has_mu())
    }
}

/// Negation normal form: literals under flat conjunctions and disjunctions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CF {
    Const(bool),
    Lit(bool, Atom),
    And(Vec<CF>),
    Or(Vec<CF>),
}

impl CF {
    pub fn and(parts: Vec<CF>) -> CF {
        let mut out = Vec::new();
        for p in parts {
            match p {
                CF::Const(true) => {}
                CF::Const(false) => return CF::Const(false),
                CF::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => CF::Const(true),
            1 => out.pop().unwrap(),
            _ => CF::And(out),
        }
    }

    pub fn or(parts: Vec<CF>) -> CF {
        let mut out = Vec::new();
        for p in parts {
            match p {
                CF::Const(false) => {}
                CF::Const(true) => return CF::Const(true),
                CF::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => CF::Const(false),
            1 => out.pop().unwrap(),
            _ => CF::Or(out),
        }
    }

    pub fn for_each_lit<'a>(&'a self, f: &mut dyn FnMut(bool, &'a Atom)) {
        match self {
            CF::Lit(p, a) => f(*p, a),
            CF::And(fs) | CF::Or(fs) => fs.iter().for_each(|g| g.for_each_lit(f)),
            CF::Const(_) => {}
        }
    }
}

pub struct SoInfo {
    pub name: String,
    pub arity: usize,
    pub index_max: u64,
    /// Regular values in product order; value id = position.
    pub tuples: Vec<Vec<u64>>,
    pub index: HashMap<Vec<u64>, u32>,
    pub sentinel: bool,
    /// Id of the cell at clock 0.
    pub offset: usize,
}

impl SoInfo {
    pub fn bot(&self) -> u32 {
        self.tuples.len() as u32
    }

    pub fn domain_size(&self) -> usize {
        self.tuples.len() + usize::from(self.sentinel)
    }
}

pub struct RelTable {
    pub name: String,
    pub arity: usize,
    pub set: HashSet<Vec<u64>>,
    pub tuples: Vec<Vec<u64>>,
}

/// Second-order variables, cells and relations of one (sentence, structure, domain) triple.
pub struct Model {
    pub so: Vec<SoInfo>,
    pub so_by_name: HashMap<String, usize>,
    pub rels: Vec<RelTable>,
    pub rel_by_name: HashMap<String, usize>,
    pub cell_so: Vec<usize>,
    pub consts: BTreeMap<String, u64>,
}

/// First-order variables of one compiled formula.
#[derive(Clone, Debug, Default)]
pub struct Frame {
    pub names: Vec<String>,
    pub ranges: Vec<Vec<u64>>,
}

impl Frame {
    pub fn from_decls(decls: &[&FoDecl], rel: &RelStructure, dom: &DomStructure) -> Result<Frame, EvalError> {
        let mut f = Frame::default();
        for d in decls {
            f.names.push(d.name.clone());
            let mut r = dom.fo_range(d, rel)?;
            r.sort_unstable();
            r.dedup();
            f.ranges.push(r);
        }
        Ok(f)
    }

    pub fn slot(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl Model {
    pub fn new(s: &Sentence, rel: &RelStructure, dom: &DomStructure) -> Result<Model, EvalError> {
        dom.validate(s)?;
        let mut so = Vec::new();
        let mut so_by_name = HashMap::new();
        let mut cell_so = Vec::new();
        for (k, d) in s.so_vars.iter().enumerate() {
            let r = &dom.so[&d.name];
            let tuples = r.tuples();
            let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
            let offset = cell_so.len();
            cell_so.extend(std::iter::repeat_n(k, r.index_max as usize + 1));
            so_by_name.insert(d.name.clone(), k);
            so.push(SoInfo { name: d.name.clone(), arity: d.arity, index_max: r.index_max, tuples, index, sentinel: r.sentinel, offset });
        }
        let mut m = Model { so, so_by_name, rels: Vec::new(), rel_by_name: HashMap::new(), cell_so, consts: rel.constants.clone() };
        for (name, arity) in s.vocabulary() {
            m.add_rel(&name, arity, rel);
        }
        Ok(m)
    }

    fn add_rel(&mut self, name: &str, arity: usize, rel: &RelStructure) -> usize {
        if let Some(&k) = self.rel_by_name.get(name) {
            return k;
        }
        let tuples: Vec<Vec<u64>> = rel.relations.get(name).map(|r| r.iter().cloned().collect()).unwrap_or_default();
        let set = tuples.iter().cloned().collect();
        self.rels.push(RelTable { name: name.to_string(), arity, set, tuples });
        self.rel_by_name.insert(name.to_string(), self.rels.len() - 1);
        self.rels.len() - 1
    }

    pub fn ncells(&self) -> usize {
        self.cell_so.len()
    }

    /// Registers predicates used by a formula outside the sentence (objectives).
    pub fn register(&mut self, f: &Formula, rel: &RelStructure) {
        let mut preds = BTreeMap::new();
        f.predicates(&mut preds);
        for (name, arity) in preds {
            self.add_rel(&name, arity, rel);
        }
    }

    pub fn cell(&self, so: usize, index: u64) -> usize {
        self.so[so].offset + index as usize
    }

    pub fn compile_term(&self, t: &Term, frame: &Frame) -> Result<CT, EvalError> {
        Ok(match t {
            Term::Var(v) => CT::Slot(frame.slot(v).ok_or_else(|| EvalError::UnknownVar(v.clone()))?),
            Term::Const(c) => CT::Val(*self.consts.get(c).ok_or_else(|| EvalError::UnknownConst(c.clone()))?),
            Term::Num(k) => CT::Val(*k),
            Term::Suc(inner, k) => match self.compile_term(inner, frame)? {
                CT::Val(v) => CT::Val(v + k),
                CT::Suc(t, e) => CT::Suc(t, e + k),
                t => CT::Suc(Box::new(t), *k),
            },
            Term::Pred(inner) => match self.compile_term(inner, frame)? {
                CT::Val(v) => CT::Val(v.saturating_sub(1)),
                t => CT::Pred(Box::new(t)),
            },
            Term::Mu { so, clock, .. } => {
                let k = *self.so_by_name.get(so).ok_or_else(|| EvalError::UnknownSo(so.clone()))?;
                CT::Mu(k, Box::new(self.compile_term(clock, frame)?))
            }
        })
    }

    /// Compiles `f` (or its negation when `pos` is false) to negation normal form.
    pub fn compile(&self, f: &Formula, frame: &Frame, pos: bool) -> Result<CF, EvalError> {
        let terms = |ts: &[Term]| ts.iter().map(|t| self.compile_term(t, frame)).collect::<Result<Vec<_>, _>>();
        Ok(match f {
            Formula::True => CF::Const(pos),
            Formula::False => CF::Const(!pos),
            Formula::Rel { pred, args } => {
                let k = *self.rel_by_name.get(pred).ok_or_else(|| EvalError::UnknownRel(pred.clone()))?;
                CF::Lit(pos, Atom::Rel(k, terms(args)?))
            }
            Formula::So { var, clock, args } => {
                let k = *self.so_by_name.get(var).ok_or_else(|| EvalError::UnknownSo(var.clone()))?;
                CF::Lit(pos, Atom::So(k, self.compile_term(clock, frame)?, terms(args)?))
            }
            Formula::Eq(a, b) => CF::Lit(pos, Atom::Eq(self.compile_term(a, frame)?, self.compile_term(b, frame)?)),
            Formula::Le(a, b) => CF::Lit(pos, Atom::Le(self.compile_term(a, frame)?, self.compile_term(b, frame)?)),
            Formula::Not(g) => self.compile(g, frame, !pos)?,
            Formula::And(fs) | Formula::Or(fs) => {
                let parts = fs.iter().map(|g| self.compile(g, frame, pos)).collect::<Result<Vec<_>, _>>()?;
                if matches!(f, Formula::And(_)) == pos {
                    CF::and(parts)
                } else {
                    CF::or(parts)
                }
            }
            Formula::Implies(a, b) => {
                let parts = vec![self.compile(a, frame, !pos)?, self.compile(b, frame, pos)?];
                if pos {
                    CF::or(parts)
                } else {
                    CF::and(parts)
                }
            }
        })
    }

    /// Witness tables as cell value ids.
    pub fn cells_of(&self, w: &Witness) -> Result<Vec<u32>, EvalError> {
        let mut cells = vec![UNK; self.ncells()];
        for info in &self.so {
            let t = w.tables.get(&info.name).ok_or_else(|| EvalError::BadWitness(format!("no table for `{}`", info.name)))?;
            if t.len() as u64 != info.index_max + 1 {
                return Err(EvalError::BadWitness(format!("`{}` has {} entries", info.name, t.len())));
            }
            for (i, e) in t.iter().enumerate() {
                cells[info.offset + i] = match e {
                    None if info.sentinel => info.bot(),
                    None => return Err(EvalError::BadWitness(format!("`{}`[{i}] is ⊥ without a sentinel", info.name))),
                    Some(v) => *info.index.get(v).ok_or_else(|| EvalError::BadWitness(format!("`{}`[{i}] = {v:?} outside the range", info.name)))?,
                };
            }
        }
        Ok(cells)
    }

    pub fn witness_of(&self, cells: &[u32]) -> Witness {
        let mut w = Witness::default();
        for info in &self.so {
            let table = (0..=info.index_max as usize)
                .map(|i| {
                    let v = cells[info.offset + i];
                    if v == info.bot() || v == UNK {
                        None
                    } else {
                        Some(info.tuples[v as usize].clone())
                    }
                })
                .collect();
            w.tables.insert(info.name.clone(), table);
        }
        w
    }

    pub fn term(&self, t: &CT, slots: &[Option<u64>], cells: &[u32]) -> TV {
        match t {
            CT::Val(v) => TV::Val(*v),
            CT::Slot(s) => slots[*s].map_or(TV::Unk, TV::Val),
            CT::Suc(t, k) => match self.term(t, slots, cells) {
                TV::Val(v) => TV::Val(v + k),
                other => other,
            },
            CT::Pred(t) => match self.term(t, slots, cells) {
                TV::Val(v) => TV::Val(v.saturating_sub(1)),
                other => other,
            },
            CT::Mu(so, clock) => match self.term(clock, slots, cells) {
                TV::Val(i) => {
                    let info = &self.so[*so];
                    if i > info.index_max {
                        return TV::Bot;
                    }
                    match cells[info.offset + i as usize] {
                        UNK => TV::Unk,
                        v if v == info.bot() => TV::Bot,
                        v => TV::Val(info.tuples[v as usize][0]),
                    }
                }
                other => other,
            },
        }
    }

    fn values(&self, ts: &[CT], slots: &[Option<u64>], cells: &[u32], out: &mut Vec<u64>) -> K3 {
        out.clear();
        let mut unknown = false;
        for t in ts {
            match self.term(t, slots, cells) {
                TV::Val(v) => out.push(v),
                TV::Bot => return K3::F,
                TV::Unk => unknown = true,
            }
        }
        if unknown {
            K3::U
        } else {
            K3::T
        }
    }

    pub fn atom(&self, a: &Atom, slots: &[Option<u64>], cells: &[u32]) -> K3 {
        let mut buf = Vec::with_capacity(4);
        match a {
            Atom::Rel(r, args) => match self.values(args, slots, cells, &mut buf) {
                K3::T => K3::from_bool(self.rels[*r].set.contains(&buf)),
                other => other,
            },
            Atom::Eq(x, y) | Atom::Le(x, y) => {
                let (x, y) = (self.term(x, slots, cells), self.term(y, slots, cells));
                match (x, y) {
                    (TV::Bot, _) | (_, TV::Bot) => K3::F,
                    (TV::Val(x), TV::Val(y)) => K3::from_bool(if matches!(a, Atom::Eq(..)) { x == y } else { x <= y }),
                    _ => K3::U,
                }
            }
            Atom::So(so, clock, args) => {
                let info = &self.so[*so];
                let state = self.values(args, slots, cells, &mut buf);
                if state == K3::F {
                    return K3::F;
                }
                let i = match self.term(clock, slots, cells) {
                    TV::Bot => return K3::F,
                    TV::Unk => return K3::U,
                    TV::Val(i) => i,
                };
                if i > info.index_max {
                    return K3::F;
                }
                let v = cells[info.offset + i as usize];
                if v == info.bot() && info.sentinel {
                    return K3::F;
                }
                if v == UNK {
                    return K3::U;
                }
                let tuple = &info.tuples[v as usize];
                if state == K3::T {
                    return K3::from_bool(*tuple == buf);
                }
                // some arguments unknown: compare the known ones
                let mut out = K3::U;
                for (k, t) in args.iter().enumerate() {
                    if let TV::Val(x) = self.term(t, slots, cells) {
                        if x != tuple[k] {
                            out = K3::F;
                        }
                    }
                }
                out
            }
        }
    }

    pub fn eval(&self, f: &CF, slots: &[Option<u64>], cells: &[u32]) -> K3 {
        match f {
            CF::Const(b) => K3::from_bool(*b),
            CF::Lit(pos, a) => match (self.atom(a, slots, cells), pos) {
                (K3::U, _) => K3::U,
                (k, true) => k,
                (K3::T, false) => K3::F,
                (_, false) => K3::T,
            },
            CF::And(fs) => {
                let mut out = K3::T;
                for g in fs {
                    match self.eval(g, slots, cells) {
                        K3::F => return K3::F,
                        K3::U => out = K3::U,
                        K3::T => {}
                    }
                }
                out
            }
            CF::Or(fs) => {
                let mut out = K3::F;
                for g in fs {
                    match self.eval(g, slots, cells) {
                        K3::T => return K3::T,
                        K3::U => out = K3::U,
                        K3::F => {}
                    }
                }
                out
            }
        }
    }
}
