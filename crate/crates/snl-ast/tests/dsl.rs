use proptest::prelude::*;
use snl_ast::*;

const TWO_COLOR: &str = "
; two-colorability
(sentence
  (exists (C 1))
  (forall (i num 0 n) (d num 0 1) (i' num 0 n) (d' num 0 1) (j' num 0 n) (e' num 0 1))
  (psi (imp (so C i d) (and (<= 0 d) (<= d 1))))
  (psi (imp (and (rel E i' j') (so C i' d') (so C j' e')) (not (= d' e')))))
";

#[test]
fn two_color_shape() {
    let s = parse_sentence(TWO_COLOR).unwrap();
    assert_eq!(s.so_vars.len(), 1);
    assert_eq!(s.so_vars[0].name, "C");
    assert_eq!(s.fo_vars.len(), 6);
    assert_eq!(s.matrix.len(), 2);
}

#[test]
fn empty_prefix_is_one_line() {
    let s = parse_sentence("(sentence (exists) (forall) (psi true))").unwrap();
    assert!(s.so_vars.is_empty() && s.fo_vars.is_empty());
    assert_eq!(s.matrix, vec![Formula::True]);
    assert_eq!(print_sentence(&s), "(sentence (exists) (forall) (psi true))\n");
}

#[test]
fn unbalanced_input_is_a_syntax_error() {
    let e = parse_sentence("(sentence (exists (P))").unwrap_err();
    assert!(matches!(e, ParseError::Syntax { line: 1, col: 1, .. }), "{e}");
}

#[test]
fn errors_carry_positions() {
    let e = parse_sentence("(sentence (exists (P 1))\n (forall (i num 0 n))\n (psi (so P i j)))").unwrap_err();
    assert_eq!(e, ParseError::Undeclared { line: 3, col: 15, name: "j".into() });
    let e = parse_sentence("(sentence (exists (P 1)) (forall (i num 0 n)) (psi (so P i)))").unwrap_err();
    assert!(matches!(e, ParseError::Arity { .. }));
    let e = parse_sentence("(sentence (exists) (forall (u obj V)) (psi (and (rel E u) (rel E u u))))").unwrap_err();
    assert!(matches!(e, ParseError::Arity { .. }));
    let e = parse_sentence("(sentence (exists) (forall (u obj V)) (psi (= (suc u) u)))").unwrap_err();
    assert!(matches!(e, ParseError::Invalid { .. }));
}

#[test]
fn conjuncts_may_not_share_variables() {
    let e = parse_sentence("(sentence (exists) (forall (i num 0 n)) (psi (= i i)) (psi (<= i i)))").unwrap_err();
    assert!(e.to_string().contains("share"), "{e}");
}

#[test]
fn mu_terms() {
    let s = parse_sentence("(sentence (exists (P 1)) (forall (i num 0 n)) (psi (so P (suc i) (suc^2 (mu z (so P i z))))))").unwrap();
    let mus = s.matrix[0].mus();
    assert_eq!(mus.len(), 1);
    assert!(parse_sentence("(sentence (exists (Q 2)) (forall (i num 0 n)) (psi (= (mu z (so Q i z)) 0)))").is_err());
    let nested = "(sentence (exists (P 1)) (forall (i num 0 n)) (psi (= (mu z (so P (mu y (so P i y)) z)) 0)))";
    assert!(parse_sentence(nested).is_err());
}

#[test]
fn successor_chains_fold() {
    let s = parse_sentence("(sentence (exists) (forall (i num 0 n)) (psi (= (suc (suc i)) (suc^2 i))))").unwrap();
    match &s.matrix[0] {
        Formula::Eq(a, b) => assert_eq!(a, b),
        f => panic!("{f:?}"),
    }
}

#[test]
fn uk_round_trip() {
    let text = "(sentence (exists (P 1))
      (forall (i num 0 n) (s num 0 b) (t num 0 b) (z num 0 b) (i1 num 0 n) (s1 num 0 b))
      (const b)
      (psi (imp (and (<= (suc i) n) (so P i s) (so P (suc i) t))
                (or (= s t) (and (<= (suc s) t) (or (not (rel I (suc i) z)) (<= z 0) (rel ADD t s z))))))
      (psi (imp (= i1 0) (so P i1 0))))";
    let s = parse_sentence(text).unwrap();
    let printed = print_sentence(&s);
    let again = parse_sentence(&printed).unwrap();
    assert_eq!(s, again);
    assert_eq!(printed, print_sentence(&again));
}

#[test]
fn structure_json() {
    let rel: RelStructure =
        read_json(r#"{"universes": {"V": [0,1,2]}, "relations": {"E": [[0,1]]}, "constants": {"n": 2}, "signatures": {"E": ["V","V"]}}"#).unwrap();
    rel.validate().unwrap();
    assert!(rel.holds("E", &[0, 1]));
    assert!(!rel.holds("E", &[1, 0]));
    let bad: RelStructure = read_json(r#"{"universes": {"V": [0,1]}, "relations": {"E": [[0,5]]}, "signatures": {"E": ["V","V"]}}"#).unwrap();
    assert!(bad.validate().is_err());
    let dom: DomStructure =
        read_json(r#"{"so": {"P": {"index_max": 8, "ranges": [[0,3]], "sentinel": true}}, "fo": {"i": [0,8], "u": {"values": [2,0]}}}"#).unwrap();
    assert_eq!(dom.so["P"].tuples().len(), 4);
    assert_eq!(dom.fo["u"].to_vec(), vec![0, 2]);
    let w: Witness = read_json(r#"{"tables": {"P": [[1], null]}}"#).unwrap();
    assert_eq!(w.column("P").unwrap(), vec![Some(1), None]);
}

fn arb_term(vars: Vec<String>, mu_so: Option<String>, depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![proptest::sample::select(vars.clone()).prop_map(Term::Var), (0u64..5).prop_map(Term::Num), Just(Term::cst("n")),].boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = arb_term(vars.clone(), None, depth - 1);
    let mut opts = vec![leaf, (sub.clone(), 1u64..4).prop_map(|(t, k)| Term::suc(t, k)).boxed(), sub.clone().prop_map(Term::pred).boxed()];
    if let Some(p) = mu_so {
        opts.push(sub.prop_map(move |c| Term::mu(&p, c)).boxed());
    }
    proptest::strategy::Union::new(opts).boxed()
}

fn arb_formula(vars: Vec<String>, depth: u32) -> BoxedStrategy<Formula> {
    let t = arb_term(vars.clone(), Some("P".into()), 2);
    let atom = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (t.clone(), t.clone()).prop_map(|(a, b)| Formula::rel("E", vec![a, b])),
        (t.clone(), t.clone()).prop_map(|(c, v)| Formula::so("P", c, vec![v])),
        (t.clone(), t.clone(), t.clone()).prop_map(|(c, a, b)| Formula::so("Q", c, vec![a, b])),
        (t.clone(), t.clone()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (t.clone(), t).prop_map(|(a, b)| Formula::Le(a, b)),
    ]
    .boxed();
    if depth == 0 {
        return atom;
    }
    let sub = arb_formula(vars, depth - 1);
    prop_oneof![
        atom,
        sub.clone().prop_map(Formula::not),
        proptest::collection::vec(sub.clone(), 0..3).prop_map(Formula::And),
        proptest::collection::vec(sub.clone(), 0..3).prop_map(Formula::Or),
        (sub.clone(), sub).prop_map(|(a, b)| Formula::imp(a, b)),
    ]
    .boxed()
}

fn arb_sentence() -> impl Strategy<Value = Sentence> {
    (1usize..4).prop_flat_map(|t| {
        let psis: Vec<_> = (0..t).map(|j| arb_formula(vec![format!("i{j}"), format!("j{j}")], 2)).collect();
        psis.prop_map(move |matrix| {
            let mut fo_vars = Vec::new();
            for j in 0..t {
                fo_vars.push(FoDecl::num(&format!("i{j}"), Term::Num(0), Term::cst("n")));
                fo_vars.push(FoDecl::num(&format!("j{j}"), Term::Num(1), Term::suc(Term::cst("n"), 1)));
            }
            Sentence { so_vars: vec![SoDecl { name: "P".into(), arity: 1 }, SoDecl { name: "Q".into(), arity: 2 }], fo_vars, consts: vec![], matrix }
        })
    })
}

proptest! {
    #[test]
    fn parse_inverts_print(s in arb_sentence()) {
        let text = print_sentence(&s);
        let back = parse_sentence(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(print_sentence(&back), text);
    }
}
