//! Finite-domain search over witness cells: bitset domains, binary tables kept
//! arc consistent, forward checking for everything else, and a depth-first search
//! that tries cells in lex order and values ascending, so the first solution is the
//! lex-least one.

use std::collections::HashMap;

use crate::ground::G;

/// Clause count past which a residual is kept as a general constraint.
const CNF_CAP: usize = 64;
/// Largest value-pair product tabulated for a general binary constraint.
const TABLE_CAP: usize = 1 << 14;

type Bits = Vec<u64>;

fn full(size: usize) -> Bits {
    let mut b = vec![u64::MAX; size.div_ceil(64)];
    if !size.is_multiple_of(64) {
        *b.last_mut().unwrap() = (1u64 << (size % 64)) - 1;
    }
    b
}

fn has(b: &Bits, v: usize) -> bool {
    b[v / 64] >> (v % 64) & 1 == 1
}

fn clear(b: &mut Bits, v: usize) {
    b[v / 64] &= !(1u64 << (v % 64));
}

fn count(b: &Bits) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

fn first(b: &Bits) -> Option<usize> {
    b.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

fn ones(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + t)
        })
    })
}

struct Table {
    b: usize,
    /// Allowed values of `b` for each value of `a`.
    rows: Vec<Bits>,
}

struct Con {
    g: G,
    scope: Vec<usize>,
}

pub struct Engine {
    sizes: Vec<usize>,
    dom: Vec<Bits>,
    trail: Vec<(usize, Bits)>,
    tables: Vec<Table>,
    pair: HashMap<(usize, usize), usize>,
    arcs: Vec<Vec<usize>>,
    cons: Vec<Con>,
    watch: Vec<Vec<usize>>,
    assign: Vec<u32>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    /// Set when the constraints are contradictory before any search.
    pub root_failed: bool,
    pub nodes: u64,
    pub aborted: bool,
}

impl Engine {
    /// `sizes[c]` is the number of value ids of cell `c`.
    pub fn new(sizes: Vec<usize>, constraints: &[G]) -> Engine {
        let n = sizes.len();
        let mut e = Engine {
            dom: sizes.iter().map(|&s| full(s)).collect(),
            sizes,
            trail: Vec::new(),
            tables: Vec::new(),
            pair: HashMap::new(),
            arcs: vec![Vec::new(); n],
            cons: Vec::new(),
            watch: vec![Vec::new(); n],
            assign: vec![0; n],
            queue: Vec::new(),
            queued: vec![false; n],
            root_failed: false,
            nodes: 0,
            aborted: false,
        };
        for g in constraints {
            e.add(g);
        }
        if e.sizes.contains(&0) {
            e.root_failed = true;
        }
        if !e.root_failed {
            for c in 0..n {
                e.enqueue(c);
            }
            for k in 0..e.cons.len() {
                if !e.forward(k) {
                    e.root_failed = true;
                    break;
                }
            }
            if !e.root_failed && !e.propagate() {
                e.root_failed = true;
            }
        }
        e.trail.clear();
        e
    }

    fn table(&mut self, a: usize, b: usize) -> usize {
        if let Some(&t) = self.pair.get(&(a, b)) {
            return t;
        }
        for (x, y) in [(a, b), (b, a)] {
            self.tables.push(Table { b: y, rows: vec![full(self.sizes[y]); self.sizes[x]] });
            self.pair.insert((x, y), self.tables.len() - 1);
            self.arcs[x].push(self.tables.len() - 1);
        }
        self.pair[&(a, b)]
    }

    fn add(&mut self, g: &G) {
        if let Some(clauses) = g.to_cnf(CNF_CAP) {
            for c in clauses {
                self.add_clause(&c);
            }
            return;
        }
        let scope = g.scope();
        if scope.len() == 2 && self.sizes[scope[0]] * self.sizes[scope[1]] <= TABLE_CAP {
            let (a, b) = (scope[0], scope[1]);
            let t = self.table(a, b);
            let back = self.pair[&(b, a)];
            for x in 0..self.sizes[a] {
                for y in 0..self.sizes[b] {
                    self.assign[a] = x as u32;
                    self.assign[b] = y as u32;
                    if !g.eval(&self.assign) {
                        clear(&mut self.tables[t].rows[x], y);
                        clear(&mut self.tables[back].rows[y], x);
                    }
                }
            }
            return;
        }
        let k = self.cons.len();
        for &c in &scope {
            self.watch[c].push(k);
        }
        self.cons.push(Con { g: g.clone(), scope });
    }

    fn add_clause(&mut self, lits: &[(bool, usize, u32)]) {
        // per cell, the values that satisfy the clause
        let mut sets: Vec<(usize, Bits)> = Vec::new();
        for &(pos, c, v) in lits {
            let k = match sets.iter().position(|s| s.0 == c) {
                Some(k) => k,
                None => {
                    sets.push((c, vec![0; self.sizes[c].div_ceil(64)]));
                    sets.len() - 1
                }
            };
            let s = &mut sets[k].1;
            if pos {
                s[v as usize / 64] |= 1 << (v % 64);
            } else {
                let mut m = full(self.sizes[c]);
                clear(&mut m, v as usize);
                for (w, x) in s.iter_mut().zip(m) {
                    *w |= x;
                }
            }
        }
        if sets.iter().any(|(c, s)| count(s) as usize == self.sizes[*c]) {
            return;
        }
        match sets.len() {
            0 => self.root_failed = true,
            1 => {
                let (c, s) = &sets[0];
                for (w, x) in self.dom[*c].iter_mut().zip(s) {
                    *w &= x;
                }
            }
            2 => {
                let ((a, sa), (b, sb)) = (&sets[0], &sets[1]);
                let t = self.table(*a, *b);
                let back = self.pair[&(*b, *a)];
                for x in 0..self.sizes[*a] {
                    if !has(sa, x) {
                        for (w, y) in self.tables[t].rows[x].iter_mut().zip(sb) {
                            *w &= y;
                        }
                    }
                }
                for y in 0..self.sizes[*b] {
                    if !has(sb, y) {
                        for (w, x) in self.tables[back].rows[y].iter_mut().zip(sa) {
                            *w &= x;
                        }
                    }
                }
            }
            _ => {
                let g = G::or(lits.iter().map(|&(pos, c, v)| if pos { G::Is(c, v) } else { G::Is(c, v).negate() }).collect());
                let scope = g.scope();
                let k = self.cons.len();
                for &c in &scope {
                    self.watch[c].push(k);
                }
                self.cons.push(Con { g, scope });
            }
        }
    }

    fn enqueue(&mut self, c: usize) {
        if !self.queued[c] {
            self.queued[c] = true;
            self.queue.push(c);
        }
    }

    fn set_dom(&mut self, c: usize, d: Bits) -> bool {
        let old = std::mem::replace(&mut self.dom[c], d);
        self.trail.push((c, old));
        self.enqueue(c);
        self.dom[c].iter().any(|&w| w != 0)
    }

    /// Forward checking for a general constraint with at most one open cell.
    fn forward(&mut self, k: usize) -> bool {
        let mut open = None;
        for &c in &self.cons[k].scope {
            if count(&self.dom[c]) != 1 {
                if open.is_some() {
                    return true;
                }
                open = Some(c);
            }
            match first(&self.dom[c]) {
                Some(v) => self.assign[c] = v as u32,
                None => return false,
            }
        }
        match open {
            None => self.cons[k].g.eval(&self.assign),
            Some(c) => {
                let mut d = self.dom[c].clone();
                let mut changed = false;
                for v in ones(&self.dom[c]) {
                    self.assign[c] = v as u32;
                    if !self.cons[k].g.eval(&self.assign) {
                        clear(&mut d, v);
                        changed = true;
                    }
                }
                !changed || self.set_dom(c, d)
            }
        }
    }

    fn propagate(&mut self) -> bool {
        let mut ok = true;
        while let Some(c) = self.queue.pop() {
            self.queued[c] = false;
            if !ok {
                continue;
            }
            if self.dom[c].iter().all(|&w| w == 0) {
                ok = false;
                continue;
            }
            for i in 0..self.arcs[c].len() {
                let t = self.arcs[c][i];
                let b = self.tables[t].b;
                let mut support = vec![0u64; self.dom[b].len()];
                for x in ones(&self.dom[c]) {
                    for (w, y) in support.iter_mut().zip(&self.tables[t].rows[x]) {
                        *w |= y;
                    }
                }
                let new: Bits = self.dom[b].iter().zip(&support).map(|(d, s)| d & s).collect();
                if new != self.dom[b] && !self.set_dom(b, new) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for i in 0..self.watch[c].len() {
                let k = self.watch[c][i];
                if !self.forward(k) {
                    ok = false;
                    break;
                }
            }
        }
        ok
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, d) = self.trail.pop().unwrap();
            self.dom[c] = d;
        }
    }

    fn fix(&mut self, c: usize, v: usize) -> bool {
        if v >= self.sizes[c] || !has(&self.dom[c], v) {
            return false;
        }
        let mut d = vec![0u64; self.dom[c].len()];
        d[v / 64] |= 1 << (v % 64);
        self.set_dom(c, d) && self.propagate()
    }

    /// Domains after fixing the given cells and propagating; `None` on a contradiction.
    pub fn propagate_with(&mut self, fixes: &[(usize, u32)]) -> Option<Vec<Vec<u32>>> {
        if self.root_failed {
            return None;
        }
        let mark = self.trail.len();
        let ok = fixes.iter().all(|&(c, v)| self.fix(c, v as usize));
        let out = ok.then(|| self.dom.iter().map(|d| ones(d).map(|v| v as u32).collect()).collect());
        self.undo(mark);
        for c in 0..self.queued.len() {
            self.queued[c] = false;
        }
        self.queue.clear();
        out
    }

    /// Calls `found` on solutions in lex order until it returns false or `budget` nodes are spent.
    pub fn solve(&mut self, budget: u64, found: &mut dyn FnMut(&[u32]) -> bool) {
        if self.root_failed {
            return;
        }
        self.dfs(0, budget, found);
    }

    fn dfs(&mut self, from: usize, budget: u64, found: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        let Some(c) = (from..self.dom.len()).find(|&c| count(&self.dom[c]) > 1) else {
            let sol: Vec<u32> = self.dom.iter().map(|d| first(d).unwrap() as u32).collect();
            return !found(&sol);
        };
        let values: Vec<usize> = ones(&self.dom[c]).collect();
        for v in values {
            self.nodes += 1;
            if self.nodes > budget {
                self.aborted = true;
                return true;
            }
            let mark = self.trail.len();
            let ok = self.fix(c, v);
            if !ok {
                for q in self.queue.drain(..) {
                    self.queued[q] = false;
                }
            }
            if ok && self.dfs(c + 1, budget, found) {
                self.undo(mark);
                return true;
            }
            self.undo(mark);
        }
        false
    }
}
