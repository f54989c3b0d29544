//! Negation, disjunctive and conjunctive normal forms by distribution, under a node budget.

use snl_ast::Formula;

/// A signed atom: `Rel`, `So`, `Eq` or `Le`.
pub type Literal = (bool, Formula);

/// Formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nnf {
    Const(bool),
    Lit(bool, Formula),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

pub fn nnf(f: &Formula, pos: bool) -> Nnf {
    match f {
        Formula::True => Nnf::Const(pos),
        Formula::False => Nnf::Const(!pos),
        Formula::Not(g) => nnf(g, !pos),
        Formula::And(fs) if pos => Nnf::And(fs.iter().map(|g| nnf(g, true)).collect()),
        Formula::And(fs) => Nnf::Or(fs.iter().map(|g| nnf(g, false)).collect()),
        Formula::Or(fs) if pos => Nnf::Or(fs.iter().map(|g| nnf(g, true)).collect()),
        Formula::Or(fs) => Nnf::And(fs.iter().map(|g| nnf(g, false)).collect()),
        Formula::Implies(a, b) if pos => Nnf::Or(vec![nnf(a, false), nnf(b, true)]),
        Formula::Implies(a, b) => Nnf::And(vec![nnf(a, true), nnf(b, false)]),
        atom => Nnf::Lit(pos, atom.clone()),
    }
}

impl Nnf {
    pub fn for_each_lit(&self, f: &mut dyn FnMut(bool, &Formula)) {
        match self {
            Nnf::Lit(p, a) => f(*p, a),
            Nnf::And(gs) | Nnf::Or(gs) => gs.iter().for_each(|g| g.for_each_lit(f)),
            Nnf::Const(_) => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Sum of products: each term a set of literals. Contradictory terms are dropped and
/// subsumed terms removed.
pub fn dnf(f: &Formula, budget: usize) -> Result<Vec<Vec<Literal>>, BudgetExceeded> {
    let mut left = budget;
    let terms = distribute(&nnf(f, true), true, &mut left)?;
    Ok(minimize(terms))
}

/// Product of sums; dual of [`dnf`]. Tautological clauses are dropped.
pub fn cnf(f: &Formula, budget: usize) -> Result<Vec<Vec<Literal>>, BudgetExceeded> {
    let mut left = budget;
    let clauses = distribute(&nnf(f, true), false, &mut left)?;
    Ok(minimize(clauses))
}

/// `sum_of_products` selects DNF (`Or` concatenates, `And` multiplies) or CNF (the dual).
fn distribute(n: &Nnf, sum_of_products: bool, left: &mut usize) -> Result<Vec<Vec<Literal>>, BudgetExceeded> {
    let spend = |left: &mut usize, k: usize| {
        if *left < k {
            Err(BudgetExceeded)
        } else {
            *left -= k;
            Ok(())
        }
    };
    match n {
        // a true DNF is one empty term; a true CNF has no clauses
        Nnf::Const(b) => Ok(if *b == sum_of_products { vec![vec![]] } else { vec![] }),
        Nnf::Lit(p, a) => {
            spend(left, 1)?;
            Ok(vec![vec![(*p, a.clone())]])
        }
        Nnf::Or(gs) | Nnf::And(gs) => {
            let concat = matches!(n, Nnf::Or(_)) == sum_of_products;
            if concat {
                let mut out = Vec::new();
                for g in gs {
                    out.extend(distribute(g, sum_of_products, left)?);
                }
                Ok(out)
            } else {
                let mut out: Vec<Vec<Literal>> = vec![vec![]];
                for g in gs {
                    let part = distribute(g, sum_of_products, left)?;
                    let mut next = Vec::with_capacity(out.len() * part.len());
                    for a in &out {
                        for b in &part {
                            spend(left, a.len() + b.len())?;
                            let mut t = a.clone();
                            for l in b {
                                if !t.contains(l) {
                                    t.push(l.clone());
                                }
                            }
                            if !contradictory(&t) {
                                next.push(t);
                            }
                        }
                    }
                    out = next;
                }
                Ok(out)
            }
        }
    }
}

fn contradictory(t: &[Literal]) -> bool {
    t.iter().any(|(p, a)| t.iter().any(|(q, b)| p != q && a == b))
}

fn minimize(terms: Vec<Vec<Literal>>) -> Vec<Vec<Literal>> {
    let mut terms: Vec<Vec<Literal>> = terms.into_iter().filter(|t| !contradictory(t)).collect();
    terms.sort_by_key(Vec::len);
    let mut out: Vec<Vec<Literal>> = Vec::new();
    for t in terms {
        if !out.iter().any(|s| s.iter().all(|l| t.contains(l))) {
            out.push(t);
        }
    }
    out
}
