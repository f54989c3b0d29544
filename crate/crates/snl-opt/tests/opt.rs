use proptest::prelude::*;

use snl_ast::{Graph, UkInstance, Witness};
use snl_encode::{encode_max, Encoding, Instance, Problem};
use snl_eval::{count_objective, count_objective_prefix, verify_witness};
use snl_opt::*;
use snl_oracle::{exact_cut, subset_sum_dp};

fn uk(b: u64, a: &[u64]) -> UkInstance {
    UkInstance::normalized(b, a.to_vec()).unwrap()
}

fn maxuk(u: &UkInstance) -> Encoding {
    encode_max(Problem::MaxUk, &Instance::Uk(u.clone())).unwrap()
}

fn maxcut(g: &Graph) -> Encoding {
    encode_max(Problem::MaxCut, &Instance::Graph(g.clone())).unwrap()
}

fn exact(e: &Encoding, budget: u64) -> Result<OptResult, OptError> {
    exact_max(&e.sentence, e.objective.as_ref().unwrap(), &e.rel, &e.dom, budget)
}

fn objective(e: &Encoding, w: &Witness) -> u128 {
    count_objective(&e.sentence, e.objective.as_ref().unwrap(), &e.rel, &e.dom, w).unwrap()
}

fn opt(u: &UkInstance) -> u128 {
    subset_sum_dp(u).unwrap().optimum as u128
}

fn ratio(approx: u128, best: u128) -> f64 {
    if best == 0 {
        1.0
    } else {
        best as f64 / approx as f64
    }
}

#[test]
fn exact_max_examples() {
    let e = maxcut(&Graph::complete(3));
    let r = exact(&e, 1 << 10).unwrap();
    assert_eq!(r.best_value, 4);
    assert_eq!(objective(&e, &r.witness), 4);
    // lex-least maximizer: vertex 0 and 1 on side 0, vertex 2 on side 1
    assert_eq!(r.witness.column("P").unwrap(), vec![Some(0), Some(0), Some(1)]);

    let u = uk(8, &[5, 4, 4]);
    let e = maxuk(&u);
    let r = exact(&e, 1 << 16).unwrap();
    assert_eq!(r.best_value, 8);
    assert_eq!(r.best_value, opt(&u));
    assert_eq!(objective(&e, &r.witness), 8);
    assert!(verify_witness(&e.sentence, &e.rel, &e.dom, &r.witness).unwrap());

    let e = maxcut(&Graph::new(1, vec![]));
    assert_eq!(exact(&e, 16).unwrap().best_value, 0);
}

#[test]
fn exact_max_respects_the_budget() {
    let e = maxcut(&Graph::complete(5));
    assert_eq!(exact(&e, 31), Err(OptError::Budget { space: 32, budget: 31 }));
    assert!(exact(&e, 32).is_ok());
}

#[test]
fn greedy_examples() {
    let u = uk(8, &[5, 4, 4]);
    let r = greedy_maxuk(&u);
    assert_eq!((r.best_value, r.selected.clone()), (5, vec![1]));
    assert_eq!(opt(&u), 8);
    assert!((ratio(r.best_value, 8) - 1.6).abs() < 1e-12);

    let u = uk(10, &[7, 5, 4, 3]);
    let r = greedy_maxuk(&u);
    assert_eq!((r.best_value, r.selected.clone()), (10, vec![1, 4]));
    assert_eq!(opt(&u), 10);

    let u = uk(20, &[3, 9, 1, 6]);
    let r = greedy_maxuk(&u);
    assert_eq!(r.selected, vec![1, 2, 3, 4]);
    assert_eq!(r.best_value, 19);
    assert_eq!(opt(&u), 19);

    // equal values go in their original order
    let r = greedy_maxuk(&uk(9, &[4, 5, 4, 4]));
    assert_eq!(r.selected, vec![1, 2]);
}

#[test]
fn greedy_witness_counts_its_value() {
    for (b, a) in [(8, vec![5, 4, 4]), (10, vec![7, 5, 4, 3]), (6, vec![1, 2, 3])] {
        let u = uk(b, &a);
        let r = greedy_maxuk(&u);
        let e = maxuk(&u);
        assert!(verify_witness(&e.sentence, &e.rel, &e.dom, &r.witness).unwrap());
        assert_eq!(objective(&e, &r.witness), r.best_value);
    }
}

#[test]
fn tau_conditions_examples() {
    let t = UkTau::new(&uk(10, &[7, 5, 4, 3]));
    let rep = check_tau_conditions(&t);
    assert!(rep.holds(), "{rep:?}");

    // without a cap, an overflowing addition is allowed by the left side only
    let rep = check_tau_conditions(&t.clone().with_cap(None));
    assert!(!rep.condition1 && rep.condition2);
    let c = rep.counterexample.unwrap();
    assert_eq!((c.condition, c.step, c.u, c.v, c.prefix, c.g_minus), (1, 2, 7, 12, 7, 5));

    let empty = UkTau::new(&uk(5, &[]));
    let rep = check_tau_conditions(&empty);
    assert!(rep.holds());
    assert_eq!(rep.states, 0);
}

/// Steps earn `k` at step `k`, so condition (2) fails at once.
struct Increasing(u64);

impl TauSpec for Increasing {
    fn steps(&self) -> u64 {
        self.0
    }
    fn origin(&self) -> u64 {
        0
    }
    fn cap(&self) -> Option<u64> {
        None
    }
    fn g(&self, step: u64, s: u64, u: u64, v: u64) -> u64 {
        self.g_minus(step, s, u, v)
    }
    fn g_minus(&self, step: u64, _: u64, u: u64, v: u64) -> u64 {
        if v == u + 1 {
            step
        } else {
            0
        }
    }
    fn moves(&self, _: u64, _: u64, u: u64) -> Vec<u64> {
        vec![u + 1]
    }
    fn witness(&self, path: &[u64]) -> Witness {
        Witness { tables: [("P".to_string(), path.iter().map(|&v| Some(vec![v])).collect())].into() }
    }
}

/// Nothing ever earns.
struct Idle;

impl TauSpec for Idle {
    fn steps(&self) -> u64 {
        3
    }
    fn origin(&self) -> u64 {
        2
    }
    fn cap(&self) -> Option<u64> {
        Some(0)
    }
    fn g(&self, _: u64, _: u64, _: u64, _: u64) -> u64 {
        0
    }
    fn g_minus(&self, _: u64, _: u64, _: u64, _: u64) -> u64 {
        0
    }
    fn moves(&self, _: u64, _: u64, _: u64) -> Vec<u64> {
        Vec::new()
    }
    fn witness(&self, path: &[u64]) -> Witness {
        Increasing(0).witness(path)
    }
}

#[test]
fn condition_two_violation_blocks_the_greedy() {
    let rep = check_tau_conditions(&Increasing(3));
    assert!(rep.condition1 && !rep.condition2);
    let c = rep.counterexample.clone().unwrap();
    assert_eq!((c.condition, c.step, c.g_minus, c.next), (2, 1, 1, Some((2, 2))));
    assert_eq!(tau_greedy(&Increasing(3)), Err(OptError::Conditions(c)));
    assert!(check_tau_conditions(&Increasing(1)).holds());
}

#[test]
fn tau_greedy_examples() {
    let u = uk(10, &[7, 5, 4, 3]);
    let r = tau_greedy(&UkTau::new(&u)).unwrap();
    assert_eq!(r.best_value, 10);
    assert_eq!(r.selected, greedy_maxuk(&u).selected);

    let u = uk(8, &[5, 4, 4]);
    let r = tau_greedy(&UkTau::new(&u)).unwrap();
    assert_eq!((r.best_value, r.selected.clone()), (5, vec![1]));
    assert!((ratio(r.best_value, opt(&u)) - 1.6).abs() < 1e-12);

    let r = tau_greedy(&Idle).unwrap();
    assert_eq!(r.best_value, 0);
    assert!(r.selected.is_empty());
    assert_eq!(r.witness.column("P").unwrap(), vec![Some(2); 4]);
    let r = tau_greedy(&UkTau::new(&uk(4, &[]))).unwrap();
    assert_eq!(r.best_value, 0);
}

#[test]
fn tau_witness_is_counted_by_the_sorted_encoding() {
    for (b, a) in [(10, vec![3, 7, 4, 5]), (8, vec![4, 5, 4]), (7, vec![2, 2, 2, 2])] {
        let t = UkTau::new(&uk(b, &a));
        let r = tau_greedy(&t).unwrap();
        let e = maxuk(&t.sorted);
        assert!(verify_witness(&e.sentence, &e.rel, &e.dom, &r.witness).unwrap());
        assert_eq!(objective(&e, &r.witness), r.best_value);
    }
}

#[test]
fn formula_spec_agrees_with_the_native_one() {
    for (b, a) in [(10, vec![7, 5, 4, 3]), (6, vec![2, 5, 3]), (4, vec![1, 1, 3]), (3, vec![])] {
        let u = uk(b, &a);
        let (native, formula) = (UkTau::new(&u), FormulaTau::max_uk(&u).unwrap());
        assert_eq!(formula.steps(), native.steps());
        let m: u64 = a.iter().sum();
        for step in 1..=native.steps() {
            for x in 0..=m {
                // the formula's values stop at the total of all items
                let mut expect = native.moves(step, 0, x);
                expect.retain(|&v| v <= m);
                assert_eq!(formula.moves(step, 0, x), expect, "moves at step {step} from {x}");
                for y in 0..=m {
                    assert_eq!(formula.g(step, 0, x, y), native.g(step, 0, x, y));
                    assert_eq!(formula.g_minus(step, 0, x, y), native.g_minus(step, 0, x, y));
                }
            }
        }
        assert_eq!(check_tau_conditions(&formula), check_tau_conditions(&native));
        assert_eq!(tau_greedy(&formula), tau_greedy(&native));
    }
}

#[test]
fn formula_spec_rejects_malformed_relations() {
    let u = uk(4, &[1, 2]);
    let t = FormulaTau::max_uk(&u).unwrap();
    assert!(check_tau_conditions(&t).holds());
    let s = snl_ast::parse_sentence("(sentence (exists (P 1)) (forall (i num 0 1) (s num 0 1)) (psi true))").unwrap();
    let dom = snl_ast::DomStructure::default();
    let err = FormulaTau::new(&s, &s, &Default::default(), &dom, 0, None).err().unwrap();
    assert!(matches!(err, OptError::BadTau(_)), "{err}");
}

#[test]
fn harness_reports() {
    let corpus = CorpusSpec { count: 0, ..Default::default() };
    let r = ratio_harness(Method::GreedyUk, Problem::MaxUk, &corpus, 1).unwrap();
    assert!(r.rows.is_empty() && r.skipped.is_empty() && r.passed());

    let corpus = CorpusSpec { count: 40, ..Default::default() };
    let a = ratio_harness(Method::Tau, Problem::MaxUk, &corpus, 7).unwrap();
    let b = ratio_harness(Method::Tau, Problem::MaxUk, &corpus, 7).unwrap();
    assert_eq!(a, b);
    assert!(a.passed() && a.max_ratio <= 2.0 && a.rows.len() == 40);
    assert!(a.to_tsv().lines().count() == 41);
    assert!(a.full_selection > 0 && a.full_selection == a.full_selection_exact);

    let small = CorpusSpec { count: 10, max_n: 4, ..Default::default() };
    let c = ratio_harness(Method::Exact, Problem::MaxCut, &small, 3).unwrap();
    assert!(c.passed() && c.max_ratio == 1.0 && c.rows.len() == 10);

    let e = ratio_harness(Method::GreedyUk, Problem::MaxCut, &small, 3).unwrap_err();
    assert!(matches!(e, OptError::Unsupported { .. }));
}

fn instance() -> impl Strategy<Value = UkInstance> {
    (1u64..=60, prop::collection::vec(1u64..=30, 0..=12)).prop_map(|(b, a)| UkInstance::normalized(b, a).unwrap())
}

fn small_instance() -> impl Strategy<Value = UkInstance> {
    (1u64..=6, prop::collection::vec(1u64..=6, 0..=3)).prop_map(|(b, a)| UkInstance::normalized(b, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_is_within_half(u in instance()) {
        let r = greedy_maxuk(&u);
        let best = opt(&u);
        let picked: u64 = r.selected.iter().map(|&k| u.a[k as usize - 1]).sum();
        prop_assert_eq!(r.best_value, picked as u128);
        prop_assert!(r.best_value <= best && 2 * r.best_value >= best);
        if u.a.iter().sum::<u64>() <= u.b {
            prop_assert_eq!(r.selected.len(), u.a.len());
            prop_assert_eq!(r.best_value, best);
        }
    }

    #[test]
    fn tau_matches_greedy(u in instance()) {
        let t = UkTau::new(&u);
        prop_assert!(check_tau_conditions(&t).holds());
        let r = tau_greedy(&t).unwrap();
        let g = greedy_maxuk(&u);
        prop_assert_eq!(t.items(&r.selected), g.selected.clone());
        prop_assert_eq!(r.best_value, g.best_value);
        // on a descending instance the steps are the items themselves
        let r = tau_greedy(&UkTau::new(&t.sorted)).unwrap();
        prop_assert_eq!(r.selected, greedy_maxuk(&t.sorted).selected);
    }

    #[test]
    fn exact_max_agrees_with_oracles(u in small_instance(), n in 1usize..=4, edges in prop::collection::vec((0usize..4, 0usize..4), 0..6)) {
        prop_assume!(!u.a.is_empty());
        prop_assert_eq!(exact(&maxuk(&u), 1 << 16).unwrap().best_value, opt(&u));
        let mut edges: Vec<_> = edges.into_iter().filter(|&(a, b)| a < n && b < n && a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        let g = Graph::new(n, edges);
        prop_assert_eq!(exact(&maxcut(&g), 1 << 16).unwrap().best_value, 2 * exact_cut(&g).unwrap().0 as u128);
    }

    #[test]
    fn prefix_recurrence(u in small_instance(), picks in prop::collection::vec(any::<bool>(), 3)) {
        prop_assume!(!u.a.is_empty());
        let t = UkTau::new(&u);
        let mut path = vec![0];
        for (k, &a) in t.sorted.a.iter().enumerate() {
            let last = path[k];
            path.push(if picks[k] && last + a <= u.b { last + a } else { last });
        }
        let w = t.witness(&path);
        let e = maxuk(&t.sorted);
        let spec = e.objective.as_ref().unwrap();
        let prefix = |a| count_objective_prefix(&e.sentence, spec, &e.rel, &e.dom, &w, a).unwrap();
        for a in 0..t.steps() {
            let step = t.g(a + 1, 0, path[a as usize], path[a as usize + 1]);
            prop_assert_eq!(prefix(a + 1), prefix(a) + step as u128);
        }
        prop_assert_eq!(prefix(t.steps()), objective(&e, &w));
    }
}
