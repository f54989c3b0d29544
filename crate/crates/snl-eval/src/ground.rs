//! Propositional residuals over witness cells.

use crate::compile::{Atom, Model, CF, CT, K3, TV, UNK};

/// Boolean combination of cell facts `cell = value id`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum G {
    Const(bool),
    Is(usize, u32),
    Not(Box<G>),
    And(Vec<G>),
    Or(Vec<G>),
}

impl G {
    pub fn and(parts: Vec<G>) -> G {
        let mut out = Vec::new();
        for p in parts {
            match p {
                G::Const(true) => {}
                G::Const(false) => return G::Const(false),
                G::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => G::Const(true),
            1 => out.pop().unwrap(),
            _ => G::And(out),
        }
    }

    pub fn or(parts: Vec<G>) -> G {
        let mut out = Vec::new();
        for p in parts {
            match p {
                G::Const(false) => {}
                G::Const(true) => return G::Const(true),
                G::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => G::Const(false),
            1 => out.pop().unwrap(),
            _ => G::Or(out),
        }
    }

    pub fn negate(self) -> G {
        match self {
            G::Const(b) => G::Const(!b),
            G::Not(g) => *g,
            g => G::Not(Box::new(g)),
        }
    }

    /// Truth under a total assignment of value ids.
    pub fn eval(&self, assign: &[u32]) -> bool {
        match self {
            G::Const(b) => *b,
            G::Is(c, v) => assign[*c] == *v,
            G::Not(g) => !g.eval(assign),
            G::And(gs) => gs.iter().all(|g| g.eval(assign)),
            G::Or(gs) => gs.iter().any(|g| g.eval(assign)),
        }
    }

    pub fn cells(&self, out: &mut Vec<usize>) {
        match self {
            G::Is(c, _) => out.push(*c),
            G::Not(g) => g.cells(out),
            G::And(gs) | G::Or(gs) => gs.iter().for_each(|g| g.cells(out)),
            G::Const(_) => {}
        }
    }

    pub fn scope(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.cells(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Clauses of `(positive, cell, value)` literals, or `None` past `cap` clauses.
    pub fn to_cnf(&self, cap: usize) -> Option<Vec<Vec<(bool, usize, u32)>>> {
        self.cnf(true, cap)
    }

    fn cnf(&self, pos: bool, cap: usize) -> Option<Vec<Vec<(bool, usize, u32)>>> {
        match self {
            G::Const(b) => Some(if *b == pos { vec![] } else { vec![vec![]] }),
            G::Is(c, v) => Some(vec![vec![(pos, *c, *v)]]),
            G::Not(g) => g.cnf(!pos, cap),
            G::And(gs) | G::Or(gs) => {
                let conj = matches!(self, G::And(_)) == pos;
                if conj {
                    let mut out = Vec::new();
                    for g in gs {
                        out.extend(g.cnf(pos, cap)?);
                        if out.len() > cap {
                            return None;
                        }
                    }
                    Some(out)
                } else {
                    let mut out: Vec<Vec<(bool, usize, u32)>> = vec![vec![]];
                    for g in gs {
                        let part = g.cnf(pos, cap)?;
                        if out.len() * part.len() > cap {
                            return None;
                        }
                        out = out
                            .iter()
                            .flat_map(|a| {
                                part.iter().map(move |b| {
                                    let mut c = a.clone();
                                    c.extend_from_slice(b);
                                    c
                                })
                            })
                            .collect();
                    }
                    Some(out)
                }
            }
        }
    }
}

/// Grounds compiled formulas at fixed first-order values, expanding μ-terms over cell values.
pub(crate) struct Grounder<'m> {
    model: &'m Model,
    scratch: Vec<u32>,
}

impl<'m> Grounder<'m> {
    pub fn new(model: &'m Model) -> Self {
        Grounder { model, scratch: vec![UNK; model.ncells()] }
    }

    pub fn cf(&mut self, f: &CF, slots: &[Option<u64>]) -> G {
        match f {
            CF::Const(b) => G::Const(*b),
            CF::Lit(pos, a) => self.lit(*pos, a, slots),
            CF::And(fs) => G::and(fs.iter().map(|g| self.cf(g, slots)).collect()),
            CF::Or(fs) => G::or(fs.iter().map(|g| self.cf(g, slots)).collect()),
        }
    }

    fn mu_cells(&self, t: &CT, slots: &[Option<u64>], out: &mut Vec<usize>) {
        match t {
            CT::Mu(so, clock) => {
                if let TV::Val(i) = self.model.term(clock, slots, &self.scratch) {
                    if i <= self.model.so[*so].index_max {
                        out.push(self.model.cell(*so, i));
                    }
                }
            }
            CT::Suc(t, _) | CT::Pred(t) => self.mu_cells(t, slots, out),
            _ => {}
        }
    }

    fn lit(&mut self, pos: bool, a: &Atom, slots: &[Option<u64>]) -> G {
        let lit = |g: G| if pos { g } else { g.negate() };
        match self.model.atom(a, slots, &self.scratch) {
            K3::T => return G::Const(pos),
            K3::F => return G::Const(!pos),
            K3::U => {}
        }
        let mut mus = Vec::new();
        for t in a.terms() {
            self.mu_cells(t, slots, &mut mus);
        }
        mus.sort_unstable();
        mus.dedup();
        if mus.is_empty() {
            return lit(self.so_fact(a, slots));
        }
        let sizes: Vec<u32> = mus.iter().map(|&c| self.model.so[self.model.cell_so[c]].domain_size() as u32).collect();
        let mut vals = vec![0u32; mus.len()];
        let mut branches = Vec::new();
        'combos: loop {
            for (k, &c) in mus.iter().enumerate() {
                self.scratch[c] = vals[k];
            }
            let value = match self.model.atom(a, slots, &self.scratch) {
                K3::T => G::Const(pos),
                K3::F => G::Const(!pos),
                K3::U => lit(self.so_fact(a, slots)),
            };
            if value != G::Const(false) {
                let mut conj: Vec<G> = mus.iter().zip(&vals).map(|(&c, &v)| G::Is(c, v)).collect();
                conj.push(value);
                branches.push(G::and(conj));
            }
            for k in (0..vals.len()).rev() {
                vals[k] += 1;
                if vals[k] < sizes[k] {
                    continue 'combos;
                }
                vals[k] = 0;
            }
            break;
        }
        for &c in &mus {
            self.scratch[c] = UNK;
        }
        G::or(branches)
    }

    /// `P(i, v..)` with every term known except the cell itself.
    fn so_fact(&self, a: &Atom, slots: &[Option<u64>]) -> G {
        let Atom::So(so, clock, args) = a else { return G::Const(false) };
        let info = &self.model.so[*so];
        let TV::Val(i) = self.model.term(clock, slots, &self.scratch) else { return G::Const(false) };
        if i > info.index_max {
            return G::Const(false);
        }
        let mut vals = Vec::with_capacity(args.len());
        for t in args {
            match self.model.term(t, slots, &self.scratch) {
                TV::Val(v) => vals.push(v),
                _ => return G::Const(false),
            }
        }
        match info.index.get(&vals) {
            Some(&v) => G::Is(info.offset + i as usize, v),
            None => G::Const(false),
        }
    }
}
