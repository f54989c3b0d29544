use std::collections::BTreeMap;

use proptest::prelude::*;
use snl_ast::*;
use snl_eval::*;
use snl_oracle::{bipartite_check, subset_sum_dp};

const TWO_COLOR: &str = "
(sentence
  (exists (C 1))
  (forall (i num 0 n) (d num 0 1) (i' num 0 n) (d' num 0 1) (j' num 0 n) (e' num 0 1))
  (psi (imp (so C i d) (and (<= 0 d) (<= d 1))))
  (psi (imp (and (rel E i' j') (so C i' d') (so C j' e')) (not (= d' e')))))
";

// P(i, s): some subset of the first i items sums to s.
const SUBSET_SUM: &str = "
(sentence
  (exists (P 1))
  (forall (i num 0 n) (s num 0 b) (t num 0 b))
  (const b)
  (psi (so P 0 0))
  (psi (imp (and (so P i s) (so P (suc i) t)) (or (= t s) (rel ADD (suc i) s t))))
  (psi (so P n b)))
";

fn dom1(name: &str, index_max: u64, lo: u64, hi: u64, sentinel: bool) -> DomStructure {
    let mut d = DomStructure::default();
    d.so.insert(name.into(), SoRange::new(index_max, vec![ValueSet::Interval([lo, hi])], sentinel));
    d
}

fn color_instance(g: &Graph) -> (RelStructure, DomStructure) {
    let mut rel = RelStructure::default();
    rel.constants.insert("n".into(), g.n as u64 - 1);
    rel.relations.insert("E".into(), g.arcs().into_iter().map(|(u, v)| vec![u as u64, v as u64]).collect());
    (rel, dom1("C", g.n as u64 - 1, 0, 1, false))
}

fn uk_instance(uk: &UkInstance) -> (RelStructure, DomStructure) {
    let mut rel = RelStructure::default();
    rel.constants.insert("n".into(), uk.a.len() as u64);
    rel.constants.insert("b".into(), uk.b);
    let mut add = std::collections::BTreeSet::new();
    for (k, &a) in uk.a.iter().enumerate() {
        for s in 0..=uk.b.saturating_sub(a) {
            add.insert(vec![k as u64 + 1, s, s + a]);
        }
    }
    rel.relations.insert("ADD".into(), add);
    (rel, dom1("P", uk.a.len() as u64, 0, uk.b, false))
}

#[test]
fn two_color_on_small_graphs() {
    let s = parse_sentence(TWO_COLOR).unwrap();
    let (rel, dom) = color_instance(&Graph::complete(2));
    let r = search_witness(&s, &rel, &dom, DEFAULT_BUDGET).unwrap();
    assert_eq!(r.truth, Some(true));
    let w = r.witness.unwrap();
    assert_eq!(w.column("C").unwrap(), vec![Some(0), Some(1)]);
    assert!(verify_witness(&s, &rel, &dom, &w).unwrap());

    let (rel, dom) = color_instance(&Graph::cycle(5));
    assert_eq!(search_witness(&s, &rel, &dom, DEFAULT_BUDGET).unwrap().truth, Some(false));
}

#[test]
fn subset_sum_example() {
    let s = parse_sentence(SUBSET_SUM).unwrap();
    let (rel, dom) = uk_instance(&UkInstance::normalized(10, vec![7, 5, 4, 3]).unwrap());
    let r = search_witness(&s, &rel, &dom, DEFAULT_BUDGET).unwrap();
    assert_eq!(r.truth, Some(true));
    assert!(verify_witness(&s, &rel, &dom, &r.witness.unwrap()).unwrap());
    let (rel, dom) = uk_instance(&UkInstance::normalized(3, vec![2, 2]).unwrap());
    assert_eq!(search_witness(&s, &rel, &dom, DEFAULT_BUDGET).unwrap().truth, Some(false));
}

#[test]
fn empty_prefix_holds() {
    let s = parse_sentence("(sentence (exists) (forall) (psi true))").unwrap();
    let r = search_witness(&s, &RelStructure::default(), &DomStructure::default(), 10).unwrap();
    assert_eq!(r.truth, Some(true));
    assert_eq!(r.witness.unwrap(), Witness::default());
}

#[test]
fn out_of_range_clock_is_false() {
    let dom = dom1("P", 3, 0, 1, false);
    let rel = RelStructure::default();
    let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi (so P 5 0)))").unwrap();
    assert_eq!(search_witness(&s, &rel, &dom, 100).unwrap().truth, Some(false));
    let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi (not (so P 5 0))))").unwrap();
    assert_eq!(search_witness(&s, &rel, &dom, 100).unwrap().truth, Some(true));
    // a μ-term past the bound is ⊥, so both the equation and its negation's atom fail
    let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi (not (= (mu z (so P 5 z)) 0))))").unwrap();
    assert_eq!(search_witness(&s, &rel, &dom, 100).unwrap().truth, Some(true));
}

#[test]
fn mu_terms_and_sentinel() {
    let rel = RelStructure::default();
    let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi (= (mu z (so P 0 z)) 2)))").unwrap();
    let w = search_witness(&s, &rel, &dom1("P", 1, 0, 3, false), 100).unwrap().witness.unwrap();
    assert_eq!(w.column("P").unwrap(), vec![Some(2), Some(0)]);

    let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi (not (so P 0 0))) (psi (not (so P 0 1))))").unwrap();
    let w = search_witness(&s, &rel, &dom1("P", 0, 0, 1, true), 100).unwrap().witness.unwrap();
    assert_eq!(w.column("P").unwrap(), vec![None]);
    assert_eq!(search_witness(&s, &rel, &dom1("P", 0, 0, 1, false), 100).unwrap().truth, Some(false));
}

#[test]
fn verify_reports_the_violation() {
    let s = parse_sentence(TWO_COLOR).unwrap();
    let (rel, dom) = color_instance(&Graph::path(3));
    let mut w = Witness::default();
    w.tables.insert("C".into(), vec![Some(vec![0]), Some(vec![0]), Some(vec![1])]);
    let v = Compiled::new(&s, &rel, &dom).unwrap().check(&w).unwrap().unwrap();
    assert_eq!(v.psi, 1);
    let mut bad = w.clone();
    bad.tables.insert("C".into(), vec![Some(vec![0])]);
    assert!(verify_witness(&s, &rel, &dom, &bad).is_err());
}

#[test]
fn objective_counts() {
    let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi true))").unwrap();
    let spec = MaxSpec {
        count: vec![FoDecl::num("i", Term::Num(0), Term::Num(3))],
        inner: vec![],
        formula: Formula::so("P", Term::var("i"), vec![Term::Num(1)]),
        clock: Some("i".into()),
    };
    let rel = RelStructure::default();
    let dom = dom1("P", 3, 0, 1, false);
    let mut w = Witness::default();
    w.tables.insert("P".into(), vec![Some(vec![1]), Some(vec![0]), Some(vec![1]), Some(vec![1])]);
    assert_eq!(count_objective(&s, &spec, &rel, &dom, &w).unwrap(), 3);
    assert_eq!(count_objective_prefix(&s, &spec, &rel, &dom, &w, 2).unwrap(), 1);
    let og = Compiled::with_objective(&s, &spec, &rel, &dom).unwrap().ground_objective();
    assert_eq!(og.constant, 0);
    assert_eq!(og.blocks.len(), 4);
}

/// All total witnesses of a one-soVar domain, in lex order.
fn all_witnesses(name: &str, index_max: u64, values: &[u64]) -> Vec<Witness> {
    let cells = index_max as usize + 1;
    let total = values.len().pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut t = vec![None; cells];
            for c in (0..cells).rev() {
                t[c] = Some(vec![values[code % values.len()]]);
                code /= values.len();
            }
            let mut w = Witness::default();
            w.tables.insert(name.into(), t);
            w
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_finds_the_lex_least_witness(b in 1u64..6, a in proptest::collection::vec(1u64..6, 0..3)) {
        let uk = UkInstance::normalized(b, a).unwrap();
        let s = parse_sentence(SUBSET_SUM).unwrap();
        let (rel, dom) = uk_instance(&uk);
        let r = search_witness(&s, &rel, &dom, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(r.truth, Some(subset_sum_dp(&uk).unwrap().exact));
        let values: Vec<u64> = (0..=uk.b).collect();
        let brute = all_witnesses("P", uk.a.len() as u64, &values)
            .into_iter()
            .find(|w| verify_witness(&s, &rel, &dom, w).unwrap());
        prop_assert_eq!(r.witness, brute);
    }

    #[test]
    fn two_color_matches_bipartiteness(n in 2usize..8, edges in proptest::collection::vec((0usize..8, 0usize..8), 0..12)) {
        let g = Graph::new(n, edges.into_iter().filter(|(u, v)| u < &n && v < &n && u != v).collect());
        let s = parse_sentence(TWO_COLOR).unwrap();
        let (rel, dom) = color_instance(&g);
        let r = search_witness(&s, &rel, &dom, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(r.truth, Some(bipartite_check(&g)));
    }

    #[test]
    fn formula_evaluation_matches_direct_reading(p in proptest::collection::vec(0u64..3, 3), i in 0u64..4, v in 0u64..3) {
        let s = parse_sentence("(sentence (exists (P 1)) (forall) (psi true))").unwrap();
        let dom = dom1("P", 2, 0, 2, false);
        let mut w = Witness::default();
        w.tables.insert("P".into(), p.iter().map(|&x| Some(vec![x])).collect());
        let env: BTreeMap<String, u64> = [("i".to_string(), i), ("v".to_string(), v)].into();
        let f = Formula::so("P", Term::var("i"), vec![Term::var("v")]);
        let direct = (i as usize) < p.len() && p[i as usize] == v;
        prop_assert_eq!(eval_formula(&f, &env, &s, &w, &RelStructure::default(), &dom).unwrap(), direct);
        let mu = Formula::Eq(Term::mu("P", Term::var("i")), Term::var("v"));
        prop_assert_eq!(eval_formula(&mu, &env, &s, &w, &RelStructure::default(), &dom).unwrap(), direct);
    }
}

#[test]
fn mu_term_agrees_with_its_expansion() {
    let with_mu = parse_sentence("(sentence (exists (P 1)) (forall (i num 0 2)) (psi (so P (suc i) (suc^2 (mu z (so P i z))))))").unwrap();
    let expanded =
        parse_sentence("(sentence (exists (P 1)) (forall (i num 0 2) (z num 0 4)) (psi (imp (so P i z) (so P (suc i) (suc^2 z)))))").unwrap();
    let rel = RelStructure::default();
    let dom = dom1("P", 2, 0, 4, false);
    let values: Vec<u64> = (0..5).collect();
    for w in all_witnesses("P", 2, &values) {
        assert_eq!(verify_witness(&with_mu, &rel, &dom, &w).unwrap(), verify_witness(&expanded, &rel, &dom, &w).unwrap());
    }
    let a = search_witness(&with_mu, &rel, &dom, DEFAULT_BUDGET).unwrap();
    let b = search_witness(&expanded, &rel, &dom, DEFAULT_BUDGET).unwrap();
    assert_eq!(a, EvalResult { nodes: a.nodes, ..b });
}
