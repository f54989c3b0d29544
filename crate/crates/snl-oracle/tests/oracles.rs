use proptest::prelude::*;
use snl_ast::*;
use snl_oracle::*;

#[test]
fn reachability() {
    let g = Graph::digraph(3, vec![(0, 1)]);
    assert!(!bfs_reachable(&g, 0, 2));
    let g = Graph::digraph(3, vec![(0, 1), (1, 2)]);
    assert!(bfs_reachable(&g, 0, 2));
    assert!(bfs_reachable(&Graph::digraph(3, vec![]), 1, 1));
    assert_eq!(bfs_distances(&g, 0), vec![Some(0), Some(1), Some(2)]);
}

#[test]
fn bipartite() {
    assert!(bipartite_check(&Graph::complete(2)));
    assert!(!bipartite_check(&Graph::cycle(5)));
    assert!(bipartite_check(&Graph::new(4, vec![])));
    assert!(bipartite_check(&Graph::cycle(4)));
}

#[test]
fn twosat_small() {
    assert_eq!(twosat_decide(&Cnf::from_dimacs_clauses(1, &[&[1], &[-1]])).unwrap(), None);
    assert!(twosat_decide(&Cnf::from_dimacs_clauses(2, &[&[1, 2]])).unwrap().is_some());
    assert!(twosat_decide(&Cnf::from_dimacs_clauses(3, &[&[1, 2, 3]])).is_err());
}

#[test]
fn subset_sum() {
    let r = subset_sum_dp(&UkInstance::normalized(10, vec![7, 5, 4, 3]).unwrap()).unwrap();
    assert_eq!(r, SubsetSum { exact: true, optimum: 10 });
    let r = subset_sum_dp(&UkInstance::normalized(3, vec![2, 2]).unwrap()).unwrap();
    assert_eq!(r, SubsetSum { exact: false, optimum: 2 });
    let r = subset_sum_dp(&UkInstance::normalized(5, vec![]).unwrap()).unwrap();
    assert_eq!(r.optimum, 0);
    assert!(subset_sum_dp(&UkInstance { b: MAX_BUDGET + 1, a: vec![1] }).is_err());
}

#[test]
fn cuts() {
    assert_eq!(exact_cut(&Graph::complete(3)).unwrap().0, 2);
    let k2 = WeightedGraph { n: 2, edges: vec![(0, 1, 5)] };
    assert_eq!(exact_wcut(&k2).unwrap().0, 5);
    assert_eq!(exact_cut(&Graph::new(4, vec![])).unwrap().0, 0);
    assert!(exact_cut(&Graph::new(MAX_VERTICES + 1, vec![])).is_err());
}

#[test]
fn max2sat() {
    assert_eq!(exact_max2sat(&Cnf::from_dimacs_clauses(1, &[&[1], &[-1]])).unwrap().0, 1);
    assert_eq!(exact_max2sat(&Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2]])).unwrap().0, 2);
    // the ten-clause block for (x1 ∨ x2 ∨ x3) with the extra variable x4
    let block = Cnf::from_dimacs_clauses(4, &[&[1, 1], &[2, 2], &[3, 3], &[4, 4], &[-1, -2], &[-2, -3], &[-1, -3], &[1, -4], &[2, -4], &[3, -4]]);
    assert_eq!(exact_max2sat(&block).unwrap().0, 7);
}

#[test]
fn maxip() {
    assert_eq!(exact_maxip(&MaxIpInstance::from_strings(&["110"], &["011"])).unwrap().0, 1);
    assert_eq!(exact_maxip(&MaxIpInstance::from_strings(&["111"], &["111"])).unwrap().0, 3);
    assert_eq!(exact_maxip(&MaxIpInstance::from_strings(&["100", "010"], &["001", "001"])).unwrap().0, 0);
}

fn or_csp(f: &Cnf) -> CspInstance {
    // each clause becomes the table of value pairs satisfying it
    let constraints = f
        .clauses
        .iter()
        .map(|c| {
            let (a, b) = (c[0], *c.get(1).unwrap_or(&c[0]));
            let mut allowed = std::collections::BTreeSet::new();
            for x in 0..2u64 {
                for y in 0..2u64 {
                    let sat = (x == 1) != a.neg || (y == 1) != b.neg;
                    if sat && (a.var != b.var || x == y) {
                        allowed.insert(vec![x, y]);
                    }
                }
            }
            CspConstraint { scope: vec![a.var - 1, b.var - 1], allowed }
        })
        .collect();
    CspInstance { variables: f.nvars, domain: 2, constraints }
}

#[test]
fn csp() {
    let f = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]);
    assert_eq!(csp_brute(&or_csp(&f)).unwrap(), None);
    let empty = CspInstance { variables: 3, domain: 2, constraints: vec![] };
    assert!(csp_brute(&empty).unwrap().is_some());
}

fn arb_cnf(max_vars: usize, max_width: usize) -> impl Strategy<Value = Cnf> {
    (1..=max_vars).prop_flat_map(move |n| {
        let lit = (1..=n, any::<bool>()).prop_map(|(v, neg)| Lit { var: v, neg });
        proptest::collection::vec(proptest::collection::vec(lit, 1..=max_width), 0..12).prop_map(move |clauses| Cnf::new(n, clauses))
    })
}

fn arb_wgraph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 1u64..7), 0..14)
            .prop_map(move |edges| WeightedGraph { n, edges: edges.into_iter().filter(|e| e.0 != e.1).collect() })
    })
}

proptest! {
    #[test]
    fn twosat_matches_truth_table(f in arb_cnf(10, 2)) {
        let scc = twosat_decide(&f).unwrap();
        let tt = truth_table_sat(&f).unwrap();
        prop_assert_eq!(scc.is_some(), tt.is_some());
        if let Some(a) = scc {
            prop_assert_eq!(f.satisfied(&a), f.clauses.len());
        }
    }

    #[test]
    fn elimination_cut_matches_enumeration(g in arb_wgraph(9)) {
        let (brute, _) = exact_wcut(&g).unwrap();
        let (elim, side) = exact_wcut_elim(&g).unwrap();
        prop_assert_eq!(brute, elim);
        prop_assert_eq!(cut_value(&g, &side), elim);
    }

    #[test]
    fn csp_matches_twosat(f in arb_cnf(8, 2)) {
        prop_assert_eq!(csp_brute(&or_csp(&f)).unwrap().is_some(), twosat_decide(&f).unwrap().is_some());
    }
}
