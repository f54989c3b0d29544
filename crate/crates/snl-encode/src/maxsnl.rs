//! MAX-CUT, MAX-UK and MAX-IP with their counting objectives.

use snl_ast::{DomStructure, Graph, MaxIpInstance, MaxSpec, RelStructure, Sentence, UkInstance, Witness};
use snl_oracle::{exact_cut, exact_maxip};

use crate::decision::{prefix_sums, subset_hitting, uk_structure};
use crate::{arcs, column, dom, interval, malformed, range, sentence, structure, witness, EncodeError};

type Quad = (Sentence, RelStructure, DomStructure, MaxSpec);

/// Objective from DSL pieces: the count and inner declarations go through the
/// sentence parser so the formula is checked against them.
fn objective(so: &str, consts: &str, count: &str, inner: &str, formula: &str, clock: Option<&str>) -> MaxSpec {
    let s = sentence(&format!("(sentence (exists {so}) (forall {count} {inner}) {consts} (psi {formula}))"));
    let ncount = sentence(&format!("(sentence (exists {so}) (forall {count}) {consts} (psi true))")).fo_vars.len();
    let mut vars = s.fo_vars;
    let inner = vars.split_off(ncount);
    MaxSpec { count: vars, inner, formula: s.matrix.into_iter().next().unwrap(), clock: clock.map(str::to_string) }
}

// The sentence keeps P functional into {0,1} and separates edge endpoints in the
// functional form, one clock per term; the objective is the ordered-pair count.
const MAX_CUT: &str = "
(sentence
  (exists (P 1))
  (forall (i num 0 n) (d num 0 1) (i' num 0 n) (j' num 0 n) (a' num 0 1) (c' num 0 1))
  (psi (imp (so P i d) (<= d 1)))
  (psi (imp (and (rel E i' j') (so P i' a') (so P j' c')) (not (= a' c')))))";

const PHI1_I: &str = "(and (or (so P i 0) (so P i 1)) (not (and (so P i 0) (so P i 1))))";
const PHI1_J: &str = "(and (or (so P j 0) (so P j 1)) (not (and (so P j 0) (so P j 1))))";
const PHI2: &str = "(or (and (so P i 1) (so P j 0)) (and (so P i 0) (so P j 1)))";

pub fn max_cut(g: &Graph) -> Result<Quad, EncodeError> {
    g.check()?;
    if g.directed || g.n == 0 {
        return Err(malformed("maxcut needs a nonempty undirected graph"));
    }
    let last = g.n as u64 - 1;
    let mut rel = structure(&[("V", g.n as u64)], &[("n", last)]);
    rel.add_relation("E", &["V", "V"], arcs(g).into_iter().map(|(u, v)| vec![u, v]));
    let spec = objective("(P 1)", "", "(i num 0 n) (j num 0 n)", "", &format!("(and {PHI1_I} {PHI1_J} (rel E i j) {PHI2})"), None);
    Ok((sentence(MAX_CUT), rel, dom(vec![("P", range(last, vec![interval(0, 1)], false))]), spec))
}

pub fn max_cut_witness(g: &Graph) -> Result<Witness, EncodeError> {
    g.check()?;
    let (_, side) = exact_cut(g).map_err(|e| malformed(e.to_string()))?;
    Ok(witness(vec![("P", column(side.into_iter().map(|b| Some(b as u64))))]))
}

const MAX_UK: &str = "
(sentence
  (exists (P 1))
  (forall (i num 0 n) (s num 0 b) (t num 0 b) (z num 0 b))
  (const b)
  (psi (so P 0 0))
  (psi (imp (and (<= (suc i) n) (so P i s) (so P (suc i) t))
            (or (and (= s t) (<= t b))
                (and (<= (suc s) t) (<= t b) (imp (and (rel I (suc i) z) (not (= z 0))) (rel ADD t s z)))))))";

// Counts (i,s,t,v,j) with P(i+1) = v = s + t, t = a_{i+1} and 1 ≤ j ≤ t. The inner
// universal block makes the count zero unless every step of P is a legal
// keep-or-add move, so arbitrary tables cannot exceed the optimum.
const MAX_UK_PI: &str = "
(and (<= (suc i) n) (<= 1 j) (<= j t) (so P 0 0) (so P i s) (so P (suc i) v) (rel ADD v s t) (rel I (suc i) t)
     (imp (and (<= (suc i') n) (so P i' s') (so P (suc i') t') (rel I (suc i') z'))
          (or (= t' s') (rel ADD t' s' z'))))";

pub fn max_uk(u: &UkInstance) -> Result<Quad, EncodeError> {
    if u.b == 0 || u.a.iter().any(|&a| a == 0 || a > u.b) {
        return Err(malformed("maxuk needs b > 0 and 0 < a_i <= b (normalize first)"));
    }
    let spec = objective(
        "(P 1)",
        "(const b)",
        "(i num 0 n) (s num 0 b) (t num 0 b) (v num 0 b) (j num 0 b)",
        "(i' num 0 n) (s' num 0 b) (t' num 0 b) (z' num 0 b)",
        MAX_UK_PI,
        Some("i"),
    );
    let d = dom(vec![("P", range(u.a.len() as u64, vec![interval(0, u.b)], false))]);
    Ok((sentence(MAX_UK), uk_structure(u), d, spec))
}

pub fn max_uk_witness(u: &UkInstance) -> Witness {
    let best = (0..=u.b).rev().find_map(|t| subset_hitting(u, t)).expect("the empty subset reaches 0");
    witness(vec![("P", column(prefix_sums(u, &best)))])
}

const MAX_IP: &str = "
(sentence
  (exists (P 1))
  (forall (z1 obj Z) (z2 obj Z) (i num 0 d) (y1 obj Z) (y2 obj Z))
  (const d)
  (psi (imp (and (so P 1 z1) (so P 2 z2)) (and (rel X1 z1) (rel X2 z2))))
  (psi (imp (and (so P 1 y1) (so P 2 y2)) (and (rel BIT y1 i) (rel BIT y2 i)))))";

/// Vectors get ids `0..|X1|` for X₁ and then `|X1|..` for X₂; `d` is the last bit position.
pub fn max_ip(m: &MaxIpInstance) -> Result<Quad, EncodeError> {
    m.check()?;
    if m.x1.is_empty() || m.dim() == 0 {
        return Err(malformed("maxip needs nonempty sets of nonempty vectors"));
    }
    let k = m.x1.len() as u64;
    let d = m.dim() as u64 - 1;
    let mut rel = structure(&[("Z", 2 * k), ("BITS", d + 1)], &[("n", k), ("d", d)]);
    rel.add_relation("X1", &["Z"], (0..k).map(|z| vec![z]));
    rel.add_relation("X2", &["Z"], (k..2 * k).map(|z| vec![z]));
    let bits =
        m.x1.iter().chain(&m.x2).enumerate().flat_map(|(z, x)| x.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| vec![z as u64, i as u64]));
    rel.add_relation("BIT", &["Z", "BITS"], bits);
    let spec = objective(
        "(P 1)",
        "(const d)",
        "(i num 0 d)",
        "(z1 obj Z) (z2 obj Z)",
        "(imp (and (so P 1 z1) (so P 2 z2)) (and (rel X1 z1) (rel X2 z2) (rel BIT z1 i) (rel BIT z2 i)))",
        Some("i"),
    );
    let d = dom(vec![("P", range(2, vec![interval(0, 2 * k - 1)], false))]);
    Ok((sentence(MAX_IP), rel, d, spec))
}

pub fn max_ip_witness(m: &MaxIpInstance) -> Result<Witness, EncodeError> {
    max_ip(m)?;
    let (_, (a, b)) = exact_maxip(m).map_err(|e| malformed(e.to_string()))?;
    let k = m.x1.len() as u64;
    Ok(witness(vec![("P", column([Some(0), Some(a as u64), Some(k + b as u64)]))]))
}
