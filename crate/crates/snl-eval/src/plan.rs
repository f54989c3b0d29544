//! Enumeration of first-order tuples for one conjunct. Variables are visited in a
//! greedy order, and atoms that must hold for the tuple to matter supply candidate
//! values through relation indices instead of scanning the whole range.

use std::collections::HashMap;

use crate::compile::{Atom, Model, CF, CT, TV, UNK};

pub(crate) enum Gen {
    Rel { index: usize, off: u64 },
    Eq { other: CT, off: u64 },
    So { so: usize, clock: CT, pos: usize, off: u64 },
}

struct RelIndex {
    known: Vec<(usize, CT)>,
    /// Known values to the sorted distinct values at the target position.
    map: HashMap<Vec<u64>, Vec<u64>>,
}

pub(crate) enum Step {
    Skip,
    Descend,
    Stop,
}

pub(crate) struct Plan {
    pub order: Vec<usize>,
    pub ranges: Vec<Vec<u64>>,
    gens: Vec<Option<Gen>>,
    indexes: Vec<RelIndex>,
}

fn candidate_gen(model: &Model, a: &Atom, target: usize, bound: &[bool], cells_known: bool) -> Option<(u8, Gen, Option<RelIndex>)> {
    let known = |t: &CT| {
        let mut s = Vec::new();
        t.slots(&mut s);
        !t.has_mu() && s.iter().all(|&x| bound[x])
    };
    match a {
        Atom::Rel(r, args) => {
            let (pos, off) = args.iter().enumerate().find_map(|(k, t)| match t.direct() {
                Some((s, off)) if s == target => Some((k, off)),
                _ => None,
            })?;
            let known_pos: Vec<(usize, CT)> = args.iter().enumerate().filter(|(k, t)| *k != pos && known(t)).map(|(k, t)| (k, t.clone())).collect();
            let mut map: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
            for t in &model.rels[*r].tuples {
                let key = known_pos.iter().map(|(k, _)| t[*k]).collect();
                map.entry(key).or_default().push(t[pos]);
            }
            for v in map.values_mut() {
                v.sort_unstable();
                v.dedup();
            }
            Some((2, Gen::Rel { index: 0, off }, Some(RelIndex { known: known_pos, map })))
        }
        Atom::Eq(x, y) => {
            for (t, other) in [(x, y), (y, x)] {
                if let Some((s, off)) = t.direct() {
                    if s == target && known(other) {
                        return Some((3, Gen::Eq { other: other.clone(), off }, None));
                    }
                }
            }
            None
        }
        Atom::So(so, clock, args) if cells_known && known(clock) => {
            let (pos, off) = args.iter().enumerate().find_map(|(k, t)| match t.direct() {
                Some((s, off)) if s == target => Some((k, off)),
                _ => None,
            })?;
            Some((1, Gen::So { so: *so, clock: clock.clone(), pos, off }, None))
        }
        _ => None,
    }
}

impl Plan {
    /// `slots` are the variables to enumerate; `must` are atoms that hold on every tuple of interest.
    pub fn new(model: &Model, slots: &[usize], ranges: &[Vec<u64>], must: &[&Atom], cells_known: bool) -> Plan {
        let mut bound = vec![false; ranges.len()];
        let mut order = Vec::new();
        let mut gens = Vec::new();
        let mut indexes = Vec::new();
        let mut left: Vec<usize> = slots.to_vec();
        while !left.is_empty() {
            let mut best: Option<(usize, (u8, usize), Option<(Gen, Option<RelIndex>)>)> = None;
            for (k, &s) in left.iter().enumerate() {
                let mut pick: Option<(u8, Gen, Option<RelIndex>)> = None;
                for a in must {
                    if let Some(c) = candidate_gen(model, a, s, &bound, cells_known) {
                        let better = match &pick {
                            None => true,
                            Some(p) => {
                                c.0 > p.0 || (c.0 == p.0 && c.2.as_ref().map_or(0, |i| i.known.len()) > p.2.as_ref().map_or(0, |i| i.known.len()))
                            }
                        };
                        if better {
                            pick = Some(c);
                        }
                    }
                }
                let prio = pick.as_ref().map_or(0, |p| p.0);
                let score = (prio, usize::MAX - ranges[s].len());
                if best.as_ref().is_none_or(|b| score > b.1) {
                    best = Some((k, score, pick.map(|(_, g, i)| (g, i))));
                }
            }
            let (k, _, pick) = best.unwrap();
            let s = left.remove(k);
            bound[s] = true;
            order.push(s);
            gens.push(pick.map(|(g, idx)| match (g, idx) {
                (Gen::Rel { off, .. }, Some(idx)) => {
                    indexes.push(idx);
                    Gen::Rel { index: indexes.len() - 1, off }
                }
                (g, _) => g,
            }));
        }
        Plan { order, ranges: ranges.to_vec(), gens, indexes }
    }

    /// Number of tuples of the variables from `depth` on.
    pub fn remaining(&self, depth: usize) -> u128 {
        self.order[depth..].iter().map(|&s| self.ranges[s].len() as u128).product()
    }

    fn candidates(&self, model: &Model, depth: usize, slots: &[Option<u64>], cells: &[u32], out: &mut Vec<u64>) {
        out.clear();
        let s = self.order[depth];
        let range = &self.ranges[s];
        let push_shifted = |out: &mut Vec<u64>, v: u64, off: u64| {
            if v >= off && range.binary_search(&(v - off)).is_ok() {
                out.push(v - off);
            }
        };
        match &self.gens[depth] {
            None => out.extend_from_slice(range),
            Some(Gen::Rel { index, off }) => {
                let idx = &self.indexes[*index];
                let mut key = Vec::with_capacity(idx.known.len());
                for (_, t) in &idx.known {
                    match model.term(t, slots, cells) {
                        TV::Val(v) => key.push(v),
                        _ => return,
                    }
                }
                if let Some(vals) = idx.map.get(&key) {
                    for &v in vals {
                        push_shifted(out, v, *off);
                    }
                }
            }
            Some(Gen::Eq { other, off }) => {
                if let TV::Val(v) = model.term(other, slots, cells) {
                    push_shifted(out, v, *off);
                }
            }
            Some(Gen::So { so, clock, pos, off }) => {
                let info = &model.so[*so];
                if let TV::Val(i) = model.term(clock, slots, cells) {
                    if i <= info.index_max {
                        let v = cells[info.offset + i as usize];
                        if v == UNK {
                            out.extend_from_slice(range);
                        } else if v != info.bot() {
                            push_shifted(out, info.tuples[v as usize][*pos], *off);
                        }
                    }
                }
            }
        }
    }

    /// Calls `cb(depth, slots)` at the root and after binding each variable. Returns true when stopped.
    pub fn walk(&self, model: &Model, slots: &mut [Option<u64>], cells: &[u32], cb: &mut dyn FnMut(usize, &[Option<u64>]) -> Step) -> bool {
        match cb(0, slots) {
            Step::Stop => true,
            Step::Skip => false,
            Step::Descend => self.walk_from(model, 0, slots, cells, cb),
        }
    }

    fn walk_from(
        &self,
        model: &Model,
        depth: usize,
        slots: &mut [Option<u64>],
        cells: &[u32],
        cb: &mut dyn FnMut(usize, &[Option<u64>]) -> Step,
    ) -> bool {
        if depth == self.order.len() {
            return false;
        }
        let s = self.order[depth];
        let mut cands = Vec::new();
        self.candidates(model, depth, slots, cells, &mut cands);
        for v in cands {
            slots[s] = Some(v);
            let stop = match cb(depth + 1, slots) {
                Step::Stop => true,
                Step::Skip => false,
                Step::Descend => self.walk_from(model, depth + 1, slots, cells, cb),
            };
            if stop {
                slots[s] = None;
                return true;
            }
        }
        slots[s] = None;
        false
    }
}

/// Atoms whose truth is necessary for `f` to be false: the atoms of negative top-level disjuncts.
pub(crate) fn must_for_violation(f: &CF) -> Vec<&Atom> {
    match f {
        CF::Lit(false, a) => vec![a],
        CF::Or(fs) => fs
            .iter()
            .filter_map(|g| match g {
                CF::Lit(false, a) => Some(a),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Atoms whose truth is necessary for `f` to be true: its positive top-level conjuncts.
pub(crate) fn must_for_truth(f: &CF) -> Vec<&Atom> {
    match f {
        CF::Lit(true, a) => vec![a],
        CF::And(fs) => fs
            .iter()
            .filter_map(|g| match g {
                CF::Lit(true, a) => Some(a),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Slots used by a formula, sorted.
pub(crate) fn used_slots(f: &CF) -> Vec<usize> {
    let mut out = Vec::new();
    f.for_each_lit(&mut |_, a| out.extend(a.slots()));
    out.sort_unstable();
    out.dedup();
    out
}
