//! The step-wise greedy scheme. A witness `P` is read as a path `s_0, s_1, .., s_n`
//! along the clock; step `k` moves from `u = s_{k-1}` to `v = s_k` and earns
//! `g(k, s, u, v) = |{w : R(k, s, u, v, w)}|` where `s = s_0`. The relaxed count `g⁻`
//! uses `R⁻`, which drops whatever keeps the total within the cap `B`.
//!
//! A step always has the idle move `v = u`; the other candidates are the `v` with
//! `g⁻ > 0`, where some `w` satisfies `R⁻`. The conditions are checked on moves that
//! earn something, the idle move being the one that leaves the total unchanged.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use snl_ast::{parse_sentence, DomStructure, Formula, RelStructure, Sentence, SoRange, UkInstance, ValueSet, Witness};
use snl_eval::{Frame, Model, CF, K3};

use crate::{descending_order, Method, OptError, OptResult};

pub trait TauSpec {
    /// Number of clock steps `n`; steps are numbered `1..=n`.
    fn steps(&self) -> u64;
    /// The value `s_0 = P(0)`.
    fn origin(&self) -> u64;
    /// `None` is an unbounded cap.
    fn cap(&self) -> Option<u64>;
    fn g(&self, step: u64, s: u64, u: u64, v: u64) -> u64;
    fn g_minus(&self, step: u64, s: u64, u: u64, v: u64) -> u64;
    /// Every `v` with `g⁻(step, s, u, v) > 0`, ascending.
    fn moves(&self, step: u64, s: u64, u: u64) -> Vec<u64>;
    /// The witness whose column is the path.
    fn witness(&self, path: &[u64]) -> Witness;
}

fn candidates<T: TauSpec + ?Sized>(t: &T, step: u64, s: u64, u: u64) -> Vec<u64> {
    let mut c = t.moves(step, s, u);
    if let Err(at) = c.binary_search(&u) {
        c.insert(at, u);
    }
    c
}

fn within(cap: Option<u64>, x: u64) -> bool {
    cap.is_none_or(|b| x <= b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub condition: u8,
    pub step: u64,
    pub s: u64,
    pub u: u64,
    pub v: u64,
    /// Relaxed total of the path before this step.
    pub prefix: u64,
    pub g_minus: u64,
    /// For condition (2), the next move whose relaxed count is larger.
    pub next: Option<(u64, u64)>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Counterexample { condition, step, s, u, v, prefix, g_minus, next } = self;
        write!(f, "condition ({condition}) at step {step}, s={s} u={u} v={v}, prefix {prefix}, g⁻={g_minus}")?;
        if let Some((z, gz)) = next {
            write!(f, "; next step to {z} has g⁻={gz}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauReport {
    pub condition1: bool,
    pub condition2: bool,
    /// Distinct `(step, u, prefix)` states visited.
    pub states: usize,
    pub counterexample: Option<Counterexample>,
}

impl TauReport {
    pub fn holds(&self) -> bool {
        self.condition1 && self.condition2
    }
}

/// Explores every path the relaxed moves can produce, tracking the relaxed prefix
/// total, and checks at each earning move
/// (1) `prefix + g⁻ <= B` iff some `w` satisfies `R`, and
/// (2) `g⁻` is at least every `g⁻` available on the following step.
pub fn check_tau_conditions<T: TauSpec + ?Sized>(t: &T) -> TauReport {
    let (s, n, cap) = (t.origin(), t.steps(), t.cap());
    let mut report = TauReport { condition1: true, condition2: true, states: 0, counterexample: None };
    let fail = |report: &mut TauReport, c: Counterexample| {
        if c.condition == 1 {
            report.condition1 = false;
        } else {
            report.condition2 = false;
        }
        report.counterexample.get_or_insert(c);
    };
    // largest g⁻ leaving v at a step, memoized
    let mut next_best: BTreeMap<(u64, u64), Option<(u64, u64)>> = BTreeMap::new();
    let mut level: BTreeSet<(u64, u64)> = BTreeSet::from([(s, 0)]);
    for step in 1..=n {
        report.states += level.len();
        let mut next = BTreeSet::new();
        for &(u, prefix) in &level {
            for v in candidates(t, step, s, u) {
                let gm = t.g_minus(step, s, u, v);
                next.insert((v, prefix + gm));
                if gm == 0 {
                    continue;
                }
                let ce = |condition, next| Counterexample { condition, step, s, u, v, prefix, g_minus: gm, next };
                if within(cap, prefix + gm) != (t.g(step, s, u, v) > 0) {
                    fail(&mut report, ce(1, None));
                }
                if step < n {
                    let best = *next_best
                        .entry((step + 1, v))
                        .or_insert_with(|| t.moves(step + 1, s, v).into_iter().map(|z| (z, t.g_minus(step + 1, s, v, z))).max_by_key(|&(_, g)| g));
                    if let Some((z, gz)) = best.filter(|&(_, gz)| gz > gm) {
                        fail(&mut report, ce(2, Some((z, gz))));
                    }
                }
            }
        }
        level = next;
    }
    report
}

/// Walks the clock choosing, among moves that keep the relaxed total within the cap,
/// one with the largest `g⁻` (the smallest such `v` on ties). Steps with `g⁻ > 0`
/// form the selected set; the value is the sum of `g` along the path.
pub fn tau_greedy<T: TauSpec + ?Sized>(t: &T) -> Result<OptResult, OptError> {
    if let Some(c) = check_tau_conditions(t).counterexample {
        return Err(OptError::Conditions(c));
    }
    let (s, cap) = (t.origin(), t.cap());
    let mut path = vec![s];
    let mut prefix = 0u64;
    let mut value = 0u128;
    let mut selected = Vec::new();
    for step in 1..=t.steps() {
        let u = path[path.len() - 1];
        let mut best: Option<(u64, u64)> = None;
        for v in candidates(t, step, s, u) {
            let gm = t.g_minus(step, s, u, v);
            if within(cap, prefix + gm) && best.is_none_or(|(g, _)| gm > g) {
                best = Some((gm, v));
            }
        }
        let Some((gm, v)) = best else { break };
        if gm > 0 {
            selected.push(step);
        }
        prefix += gm;
        value += u128::from(t.g(step, s, u, v));
        path.push(v);
    }
    // an early stop leaves P idle for the remaining steps
    while path.len() as u64 <= t.steps() {
        path.push(path[path.len() - 1]);
    }
    Ok(OptResult { best_value: value, witness: t.witness(&path), method: Method::Tau, selected })
}

fn column(path: &[u64]) -> Witness {
    Witness { tables: [("P".to_string(), path.iter().map(|&v| Some(vec![v])).collect())].into() }
}

/// MAX-UK with items in descending order: step `k` either keeps the sum or adds
/// item `k`, and both counts equal the item value, `g` additionally requiring the
/// new sum to stay within `b`. The cap is `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UkTau {
    pub sorted: UkInstance,
    /// Original position (0-based) of each sorted item.
    pub order: Vec<usize>,
    pub cap: Option<u64>,
}

impl UkTau {
    pub fn new(u: &UkInstance) -> UkTau {
        let order = descending_order(&u.a);
        let a = order.iter().map(|&i| u.a[i]).collect();
        UkTau { sorted: UkInstance { b: u.b, a }, order, cap: Some(u.b) }
    }

    pub fn with_cap(mut self, cap: Option<u64>) -> UkTau {
        self.cap = cap;
        self
    }

    /// Original 1-based item positions of the selected steps, ascending.
    pub fn items(&self, steps: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = steps.iter().map(|&k| self.order[k as usize - 1] as u64 + 1).collect();
        out.sort_unstable();
        out
    }
}

impl TauSpec for UkTau {
    fn steps(&self) -> u64 {
        self.sorted.a.len() as u64
    }

    fn origin(&self) -> u64 {
        0
    }

    fn cap(&self) -> Option<u64> {
        self.cap
    }

    fn g(&self, step: u64, s: u64, u: u64, v: u64) -> u64 {
        let gm = self.g_minus(step, s, u, v);
        if v <= self.sorted.b {
            gm
        } else {
            0
        }
    }

    fn g_minus(&self, step: u64, s: u64, u: u64, v: u64) -> u64 {
        let a = self.sorted.a[step as usize - 1];
        if s == 0 && v == u + a {
            a
        } else {
            0
        }
    }

    fn moves(&self, step: u64, s: u64, u: u64) -> Vec<u64> {
        if s == 0 {
            vec![u + self.sorted.a[step as usize - 1]]
        } else {
            Vec::new()
        }
    }

    fn witness(&self, path: &[u64]) -> Witness {
        column(path)
    }
}

/// A step specification given by two sentences over the same first-order
/// variables: the first four are the step, `s`, `u` and `v`, the rest are counted.
/// The conjunction of the first sentence's conjuncts is `R`, of the second's `R⁻`.
/// The single unary soVar fixes the number of steps through its index range.
pub struct FormulaTau {
    model: Model,
    r: CF,
    r_minus: CF,
    ranges: Vec<Vec<u64>>,
    so: String,
    steps: u64,
    origin: u64,
    cap: Option<u64>,
}

fn conjunction(s: &Sentence) -> Formula {
    Formula::And(s.matrix.clone())
}

impl FormulaTau {
    pub fn new(
        r: &Sentence,
        r_minus: &Sentence,
        rel: &RelStructure,
        dom: &DomStructure,
        origin: u64,
        cap: Option<u64>,
    ) -> Result<FormulaTau, OptError> {
        let bad = |msg: &str| Err(OptError::BadTau(msg.to_string()));
        let [so] = &r.so_vars[..] else {
            return bad("R must quantify exactly one second-order variable");
        };
        if so.arity != 1 {
            return bad("the second-order variable must be unary in the clock");
        }
        if r.fo_vars.len() < 4 {
            return bad("R needs the step, s, u and v variables");
        }
        if r_minus.fo_vars != r.fo_vars {
            return bad("R and R⁻ must declare the same first-order variables");
        }
        let steps = dom.so.get(&so.name).map(|d| d.index_max).ok_or_else(|| OptError::BadTau(format!("no range for {}", so.name)))?;
        let mut model = Model::new(r, rel, dom)?;
        let (fr, frm) = (conjunction(r), conjunction(r_minus));
        model.register(&frm, rel);
        let decls: Vec<_> = r.fo_vars.iter().collect();
        let frame = Frame::from_decls(&decls, rel, dom)?;
        let (r, r_minus) = (model.compile(&fr, &frame, true)?, model.compile(&frm, &frame, true)?);
        let mut so_atom = false;
        for f in [&r, &r_minus] {
            f.for_each_lit(&mut |_, a| so_atom |= a.is_so());
        }
        if so_atom {
            return bad("R and R⁻ must not mention the second-order variable");
        }
        Ok(FormulaTau { model, r, r_minus, ranges: frame.ranges, so: so.name.clone(), steps, origin, cap })
    }

    /// The MAX-UK step relations written in the DSL, items in descending order.
    /// Counted variables are `z`, the item value with `v = u + z`, and `w` in `[1, z]`.
    pub fn max_uk(u: &UkInstance) -> Result<FormulaTau, OptError> {
        let order = descending_order(&u.a);
        let a: Vec<u64> = order.iter().map(|&i| u.a[i]).collect();
        let (n, m) = (a.len() as u64, a.iter().sum::<u64>());
        let mut rel = RelStructure::default();
        rel.universes.insert("IDX".into(), (0..=n).collect());
        rel.universes.insert("VAL".into(), (0..=m).collect());
        rel.constants = BTreeMap::from([("n".into(), n), ("b".into(), u.b), ("m".into(), m)]);
        rel.add_relation("I", &["IDX", "VAL"], a.iter().enumerate().map(|(k, &x)| vec![k as u64 + 1, x]));
        rel.add_relation("ADD", &["VAL", "VAL", "VAL"], (0..=m).flat_map(|x| (0..=m - x).map(move |y| vec![x + y, x, y])));
        let mut dom = DomStructure::default();
        dom.so.insert("P".into(), SoRange::new(n, vec![ValueSet::Interval([0, m])], false));
        let text = |budget: &str| {
            format!(
                "(sentence (exists (P 1))
                   (forall (i num 1 n) (s num 0 m) (u num 0 m) (v num 0 m) (z num 0 m) (w num 0 m))
                   (const m b)
                   (psi (and (= s 0) (rel ADD v u z) (rel I i z) (<= 1 w) (<= w z) {budget})))"
            )
        };
        let parse = |t: String| parse_sentence(&t).map_err(|e| OptError::BadTau(e.to_string()));
        let (r, r_minus) = (parse(text("(<= v b)"))?, parse(text(""))?);
        FormulaTau::new(&r, &r_minus, &rel, &dom, 0, Some(u.b))
    }

    /// Tuples of the counted variables satisfying `f`, found depth-first with
    /// three-valued pruning.
    fn count(&self, f: &CF, step: u64, s: u64, u: u64, v: u64) -> u64 {
        let mut slots = vec![None; self.ranges.len()];
        slots[..4].copy_from_slice(&[Some(step), Some(s), Some(u), Some(v)]);
        self.descend(f, &mut slots, 4)
    }

    fn descend(&self, f: &CF, slots: &mut [Option<u64>], k: usize) -> u64 {
        match self.model.eval(f, slots, &[]) {
            K3::T => self.ranges[k..].iter().map(|r| r.len() as u64).product(),
            K3::F => 0,
            K3::U if k == slots.len() => 0,
            K3::U => {
                let mut total = 0;
                for &x in &self.ranges[k] {
                    slots[k] = Some(x);
                    total += self.descend(f, slots, k + 1);
                }
                slots[k] = None;
                total
            }
        }
    }
}

impl TauSpec for FormulaTau {
    fn steps(&self) -> u64 {
        self.steps
    }

    fn origin(&self) -> u64 {
        self.origin
    }

    fn cap(&self) -> Option<u64> {
        self.cap
    }

    fn g(&self, step: u64, s: u64, u: u64, v: u64) -> u64 {
        self.count(&self.r, step, s, u, v)
    }

    fn g_minus(&self, step: u64, s: u64, u: u64, v: u64) -> u64 {
        self.count(&self.r_minus, step, s, u, v)
    }

    fn moves(&self, step: u64, s: u64, u: u64) -> Vec<u64> {
        self.ranges[3].iter().copied().filter(|&v| self.g_minus(step, s, u, v) > 0).collect()
    }

    fn witness(&self, path: &[u64]) -> Witness {
        Witness { tables: [(self.so.clone(), path.iter().map(|&v| Some(vec![v])).collect())].into() }
    }
}
