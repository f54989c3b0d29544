//! Clause-level reductions: Γ_OR constraints, polarity, and the ten-clause gadget
//! taking MAX-3SAT to MAX-2SAT.

use std::collections::BTreeSet;

use snl_ast::{Cnf, CspConstraint, CspInstance, Lit};

use crate::{at_least_half, check_clauses, ApReductionTrace, ReduceError};

/// The Γ_OR constraint `l1 ∨ l2` over 0-based CSP variables `var - 1`.
pub fn or_constraint(a: Lit, b: Lit) -> CspConstraint {
    let mut allowed = BTreeSet::new();
    for x in 0..2u64 {
        for y in 0..2u64 {
            if (x == 1) != a.neg || (y == 1) != b.neg {
                allowed.insert(vec![x, y]);
            }
        }
    }
    CspConstraint { scope: vec![a.var - 1, b.var - 1], allowed }
}

/// Negation pattern `(neg1, neg2)` when the constraint is one of the four Γ_OR relations.
pub fn gamma_or_pattern(c: &CspConstraint) -> Option<(bool, bool)> {
    if c.scope.len() != 2 {
        return None;
    }
    [(false, false), (false, true), (true, false), (true, true)].into_iter().find(|&(n1, n2)| {
        let probe = or_constraint(Lit { var: 1, neg: n1 }, Lit { var: 2, neg: n2 });
        probe.allowed == c.allowed
    })
}

/// One Γ_OR constraint per clause; a unit clause `z` becomes `z ∨ z`.
pub fn twosat_to_bcsp2(f: &Cnf) -> Result<CspInstance, ReduceError> {
    check_clauses(f, 2)?;
    let constraints = f
        .clauses
        .iter()
        .map(|c| match c[..] {
            [z] => or_constraint(z, z),
            [a, b] => or_constraint(a, b),
            _ => unreachable!("widths checked"),
        })
        .collect();
    Ok(CspInstance { variables: f.nvars, domain: 2, constraints })
}

/// A positive-polarity formula over the original variables and one fresh variable
/// per mixed clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarized {
    pub cnf: Cnf,
    pub source_vars: usize,
}

impl Polarized {
    /// Restriction of a satisfying assignment to the source variables.
    pub fn back_map(&self, assign: &[bool]) -> Vec<bool> {
        assign[..=self.source_vars].to_vec()
    }
}

/// Splits each mixed clause `x ∨ ȳ` into `(x ∨ z) ∧ (z̄ ∨ ȳ)` with a fresh `z`.
pub fn cnf2_to_positive_polarity(f: &Cnf) -> Result<Polarized, ReduceError> {
    check_clauses(f, 2)?;
    let mut next = f.nvars;
    let mut clauses = Vec::with_capacity(f.clauses.len());
    for c in &f.clauses {
        match c[..] {
            [a, b] if a.neg != b.neg => {
                let (p, n) = if a.neg { (b, a) } else { (a, b) };
                next += 1;
                clauses.push(vec![p, Lit::pos(next)]);
                clauses.push(vec![Lit::neg(next), n]);
            }
            _ => clauses.push(c.clone()),
        }
    }
    Ok(Polarized { cnf: Cnf::new(next, clauses), source_vars: f.nvars })
}

/// Decides a negative-polarity formula: reading `x̄ ∨ y` as `x → y`, setting every
/// variable true satisfies all clauses. Returns that assignment (slot 0 unused).
pub fn solve_negative_polarity(f: &Cnf) -> Result<Vec<bool>, ReduceError> {
    for (k, c) in f.clauses.iter().enumerate() {
        match c[..] {
            [a, b] if a.neg != b.neg => {}
            _ => return Err(ReduceError::Polarity(k)),
        }
    }
    Ok(vec![true; f.nvars + 1])
}

/// The ten 2-clauses standing for `z1 ∨ z2 ∨ z3` with auxiliary variable `w`.
/// Single literals are written as the degenerate pair `z ∨ z`.
pub fn williams_gadget(z: [Lit; 3], w: usize) -> [Vec<Lit>; 10] {
    let [z1, z2, z3] = z;
    let (w, nw) = (Lit::pos(w), Lit::neg(w));
    [
        vec![z1, z1],
        vec![z2, z2],
        vec![z3, z3],
        vec![w, w],
        vec![z1.negate(), z2.negate()],
        vec![z2.negate(), z3.negate()],
        vec![z1.negate(), z3.negate()],
        vec![z1, nw],
        vec![z2, nw],
        vec![z3, nw],
    ]
}

/// MAX-2SAT instance from a MAX-3SAT instance: 3-clauses expand into gadgets, shorter
/// clauses pass through unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Williams {
    pub cnf: Cnf,
    pub source_vars: usize,
    /// Source clause index and auxiliary variable of every gadget.
    pub gadgets: Vec<(usize, usize)>,
}

impl Williams {
    /// Restriction to the source variables, replaced by the better uniform assignment
    /// when that satisfies more source clauses (the half guarantee keeps `c2` finite).
    pub fn back_map(&self, source: &Cnf, assign: &[bool]) -> Vec<bool> {
        at_least_half(source, assign[..=self.source_vars].to_vec())
    }

    /// `OPT(f(x)) = 6m + OPT(x)` for `m` gadgets, and the back-mapped value is at least
    /// half the clauses, so `err(x) <= (1 + 6m/val) err(f(x)) <= 13 err(f(x))`.
    pub fn trace(&self, source: &Cnf) -> ApReductionTrace {
        ApReductionTrace {
            step: "max3sat-to-max2sat".into(),
            source_size: source.clauses.len(),
            target_size: self.cnf.clauses.len(),
            back_map: "restrict to source variables; uniform assignment if it satisfies more".into(),
            c1: 1.0,
            c2: Some(13.0),
        }
    }
}

pub fn max3sat_to_max2sat(f: &Cnf) -> Result<Williams, ReduceError> {
    check_clauses(f, 3)?;
    let mut next = f.nvars;
    let mut clauses = Vec::new();
    let mut gadgets = Vec::new();
    for (k, c) in f.clauses.iter().enumerate() {
        if let [a, b, d] = c[..] {
            next += 1;
            gadgets.push((k, next));
            clauses.extend(williams_gadget([a, b, d], next));
        } else {
            clauses.push(c.clone());
        }
    }
    Ok(Williams { cnf: Cnf::new(next, clauses), source_vars: f.nvars, gadgets })
}
