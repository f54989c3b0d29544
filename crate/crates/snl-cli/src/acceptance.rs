//! The acceptance matrix. Every criterion is a seeded deterministic run that
//! returns an [`Outcome`]; a criterion passes when none of its cases fail.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use snl_ast::{Graph, Lit, Sentence};
use snl_check::{
    check_mu_requirements, check_requirement_i, check_requirement_ii, combine_and, combine_or, default_offset_bound, is_binary, is_monotone, Triple,
    Verdict, DEFAULT_DNF_BUDGET,
};
use snl_encode::{canonical_witness, dstncon_counts, encode, gen, Instance, Problem, DSTNCON_PSI1, DSTNCON_PSI4};
use snl_eval::{search_witness, verify_witness, Compiled, DEFAULT_BUDGET};
use snl_opt::{check_tau_conditions, greedy_maxuk, ratio_harness, tau_greedy, CorpusSpec, Method, UkTau};
use snl_oracle::{bfs_reachable, bipartite_check, csp_brute, subset_sum_dp, twosat_decide};
use snl_reduce::diag::{accounting, chain_optimum, gadget};
use snl_reduce::{ground_monobsnl_to_bcsp2, max3sat_to_max2sat, twosat_to_bcsp2, williams_gadget, Gadget};

use crate::compare::{compare, sample, CompareConfig, Status};

pub const NAMES: [&str; 10] = ["encoders", "dstncon", "williams", "ap-chain", "gadget", "greedy-uk", "tau", "grounding", "fragments", "combinators"];

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    /// Counts, recorded diagnostics and the first few failing cases.
    pub detail: String,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    first: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.len() < 3 {
                self.first.push(what());
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn outcome(self, id: usize) -> Outcome {
        let mut detail = self.notes.join("; ");
        if !self.first.is_empty() {
            if !detail.is_empty() {
                detail.push_str("; ");
            }
            detail.push_str("failing: ");
            detail.push_str(&self.first.join(", "));
        }
        Outcome { id: id + 1, name: NAMES[id], passed: self.failures == 0 && self.cases > 0, cases: self.cases, failures: self.failures, detail }
    }
}

/// Runs every criterion, or only the named one.
pub fn run(only: Option<&str>, seed: u64) -> Result<Vec<Outcome>, String> {
    let ids: Vec<usize> = match only {
        None => (0..NAMES.len()).collect(),
        Some(name) => {
            vec![NAMES.iter().position(|&n| n == name).ok_or_else(|| format!("unknown criterion `{name}` (one of {})", NAMES.join(", ")))?]
        }
    };
    Ok(ids.into_iter().map(|i| criterion(i, seed)).collect())
}

pub fn criterion(id: usize, seed: u64) -> Outcome {
    let t = match id {
        0 => encoders(seed),
        1 => dstncon(seed),
        2 => williams(),
        3 => ap_chain(seed),
        4 => weighted_gadget(seed),
        5 => greedy_uk(seed),
        6 => tau(seed),
        7 => grounding(seed),
        8 => fragments(seed),
        9 => combinators(seed),
        _ => panic!("no criterion {id}"),
    };
    t.outcome(id)
}

pub fn to_tsv(outcomes: &[Outcome]) -> String {
    let mut out = String::from("id\tcriterion\tstatus\tcases\tfailures\tdetail\n");
    for o in outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{}\t{}\t{status}\t{}\t{}\t{}\n", o.id, o.name, o.cases, o.failures, o.detail));
    }
    out
}

fn passes_i_ii(s: &Sentence) -> bool {
    let a = default_offset_bound(s);
    check_requirement_i(s, a).iter().all(Verdict::passed) && check_requirement_ii(s, DEFAULT_DNF_BUDGET).iter().all(Verdict::passed)
}

/// Search truth, with a found witness re-verified; `None` on abort or error.
fn search_truth(t: &Triple) -> Option<bool> {
    let r = search_witness(&t.sentence, &t.rel, &t.dom, DEFAULT_BUDGET).ok()?;
    if let Some(w) = &r.witness {
        if !verify_witness(&t.sentence, &t.rel, &t.dom, w).ok()? {
            return None;
        }
    }
    r.truth
}

fn triple(p: Problem, x: &Instance) -> Result<Triple, String> {
    let e = encode(p, x).map_err(|e| e.to_string())?;
    Ok(Triple { sentence: e.sentence, rel: e.rel, dom: e.dom })
}

fn encoders(seed: u64) -> Tally {
    let mut t = Tally::default();
    let problems =
        [Problem::TwoColor, Problem::Uk, Problem::Exact3Dstcon, Problem::Nbg, Problem::Polar2Sat(true), Problem::Polar2Sat(false), Problem::Csp2];
    for p in problems {
        let max_n = if p == Problem::Uk { 10 } else { 8 };
        let cfg = CompareConfig { problem: p, count: 200, max_n, exhaustive_n: None, seed, budget: DEFAULT_BUDGET };
        match compare(&cfg) {
            Ok(r) => {
                for row in &r.rows {
                    t.check(row.status == Status::Ok, || format!("{p} #{} {} {:?}", row.index, row.digest, row.status));
                }
                let yes = r.rows.iter().filter(|row| row.oracle == "true").count();
                t.note(format!("{p} {yes}/{} yes", r.rows.len()));
            }
            Err(e) => t.fail(format!("{p}: {e}")),
        }
    }
    t
}

type Column = Vec<Option<u64>>;

/// N and C columns after fixing P to the canonical table in the sentence without
/// the two conjuncts that tie the counts to the final verdict; `None` if
/// propagation leaves a choice or fails.
fn forced_counts(x: &Instance) -> Option<(Column, Column)> {
    let mut e = encode(Problem::Dstncon, x).ok()?;
    e.sentence.matrix =
        e.sentence.matrix.iter().enumerate().filter(|(j, _)| *j != DSTNCON_PSI1 && *j != DSTNCON_PSI4).map(|(_, f)| f.clone()).collect();
    let c = Compiled::new(&e.sentence, &e.rel, &e.dom).ok()?;
    let w = canonical_witness(Problem::Dstncon, x).ok()??;
    let cells = c.model.cells_of(&w).ok()?;
    let p = &c.model.so[c.model.so_by_name["P"]];
    let fixes: Vec<(usize, u32)> = (0..=p.index_max as usize).map(|i| (p.offset + i, cells[p.offset + i])).collect();
    let doms = c.engine()?.propagate_with(&fixes)?;
    let col = |name: &str| -> Option<Column> {
        let info = &c.model.so[c.model.so_by_name[name]];
        (0..=info.index_max as usize)
            .map(|i| match doms[info.offset + i][..] {
                [v] => Some(info.tuples.get(v as usize).map(|t| t[0])),
                _ => None,
            })
            .collect()
    };
    Some((col("N")?, col("C")?))
}

fn counts_match(g: &Graph, s: usize, t: usize) -> bool {
    let x = Instance::StGraph { graph: g.clone(), s, t };
    let (Ok(counts), Some((nt, ct))) = (dstncon_counts(g, s, t), forced_counts(&x)) else {
        return false;
    };
    let k = counts.n;
    (0..=k).all(|u| {
        (0..=k).all(|e| {
            (0..=k).all(|i| {
                let w = counts.enc2(u, e, i);
                nt.get(w) == Some(&Some(counts.n_count[e][i])) && ct.get(w) == Some(&Some(counts.c_count[u][e][i]))
            })
        })
    })
}

fn canonical_verifies(x: &Instance) -> Option<bool> {
    let e = encode(Problem::Dstncon, x).ok()?;
    let w = canonical_witness(Problem::Dstncon, x).ok()??;
    w.validate(&e.sentence, &e.dom).ok()?;
    verify_witness(&e.sentence, &e.rel, &e.dom, &w).ok()
}

fn dstncon(seed: u64) -> Tally {
    let mut t = Tally::default();
    let three: Vec<(Graph, bool)> = gen::all_loopfree_digraphs(3).into_iter().map(|g| (g, true)).collect();
    let five = (0..200u64).map(|i| (gen::digraph(&mut gen::stream(seed, "accept-dstncon", i), 5, 0.3), false));
    let graphs: Vec<(Graph, bool)> = three.into_iter().chain(five).collect();
    // exhaustive search only on the three-vertex graphs
    // no path, canonical verifies, search truth, counts match
    type Row = (bool, Option<bool>, Option<Option<bool>>, bool);
    let results: Vec<Row> = graphs
        .par_iter()
        .map(|(g, small)| {
            let (s, target) = (0, g.n - 1);
            let x = Instance::StGraph { graph: g.clone(), s, t: target };
            let no_path = !bfs_reachable(g, s, target);
            let searched = small.then(|| triple(Problem::Dstncon, &x).ok().and_then(|tr| search_truth(&tr)));
            (no_path, canonical_verifies(&x), searched, counts_match(g, s, target))
        })
        .collect();
    let mut yes = 0;
    for (k, ((g, _), (no_path, canonical, searched, counts))) in graphs.iter().zip(&results).enumerate() {
        yes += usize::from(*no_path);
        t.check(*canonical == Some(*no_path), || format!("canonical #{k} n={} arcs={:?}", g.n, g.edges));
        if let Some(found) = searched {
            t.check(*found == Some(*no_path), || format!("search #{k} arcs={:?}", g.edges));
        }
        t.check(*counts, || format!("counts #{k} n={} arcs={:?}", g.n, g.edges));
    }
    t.note(format!("{} graphs (64 on 3 vertices searched), {yes} without an s-t path", graphs.len()));
    t
}

fn williams() -> Tally {
    let mut t = Tally::default();
    for signs in 0..8u32 {
        let z = [0, 1, 2].map(|k| Lit { var: k + 1, neg: signs >> k & 1 == 1 });
        let gadget = williams_gadget(z, 4);
        for x in 0..8u32 {
            let mut assign = vec![false; 5];
            for k in 0..3 {
                assign[k + 1] = x >> k & 1 == 1;
            }
            let satisfied = z.iter().any(|l| l.eval(&assign));
            let best = [false, true]
                .into_iter()
                .map(|w| {
                    assign[4] = w;
                    gadget.iter().filter(|c| c.iter().any(|l| l.eval(&assign))).count()
                })
                .max()
                .unwrap();
            let want = if satisfied { 7 } else { 6 };
            t.check(best == want, || format!("signs {signs:03b} x {x:03b}: {best} != {want}"));
        }
    }
    t.note("8 sign patterns x 8 assignments x 2 values of w".into());
    t
}

fn ap_chain(seed: u64) -> Tally {
    let mut t = Tally::default();
    let formulas: Vec<_> = (0..100u64)
        .map(|i| {
            let mut rng = gen::stream(seed, "accept-chain", i);
            let nvars = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=4);
            gen::cnf(&mut rng, nvars, m, 3)
        })
        .collect();
    // the accounting identity concerns the second step, so it runs on the MAX-2SAT formula
    let results: Vec<_> = formulas
        .par_iter()
        .map(|f| (chain_optimum(f, Gadget::Corrected), max3sat_to_max2sat(f).ok().and_then(|w| accounting(&w.cnf).ok())))
        .collect();
    let (mut claim, mut formula, mut ran) = (0, 0, 0);
    for (k, (f, (chain, acc))) in formulas.iter().zip(&results).enumerate() {
        match chain {
            Ok(c) => t.check(c.optimal, || format!("#{k} {}: max-sat {} back-mapped {}", f.to_dimacs().replace('\n', " "), c.max_sat, c.back_mapped)),
            Err(e) => t.fail(format!("#{k}: {e}")),
        }
        if let Some(a) = acc {
            ran += 1;
            claim += usize::from(a.claim_holds);
            formula += usize::from(a.formula_holds);
        }
    }
    t.note(format!("diagnostic: doubling identity held on {claim}/{ran}, measured 2occ+4opt identity on {formula}/{ran}"));
    t
}

fn weighted_gadget(seed: u64) -> Tally {
    let mut t = Tally::default();
    let graphs: Vec<_> = (0..100u64)
        .map(|i| {
            let mut rng = gen::stream(seed, "accept-gadget", i);
            let n = rng.gen_range(1..=6);
            gen::weighted_graph(&mut rng, n, 0.5, 6)
        })
        .collect();
    let results: Vec<_> = graphs.par_iter().map(|g| (gadget(g, Gadget::Corrected), gadget(g, Gadget::TwoEdge))).collect();
    let (mut two_edge_ok, mut two_edge_ran) = (0, 0);
    for (k, (g, (corrected, two_edge))) in graphs.iter().zip(&results).enumerate() {
        match corrected {
            Ok(d) => t.check(d.max_cut_target == d.corrected_formula && d.preserved, || {
                format!("#{k} {:?}: maxcut {} vs 2W+maxwcut {}", g.edges, d.max_cut_target, d.corrected_formula)
            }),
            Err(e) => t.fail(format!("#{k}: {e}")),
        }
        if let Ok(d) = two_edge {
            two_edge_ran += 1;
            two_edge_ok += usize::from(d.preserved);
        }
    }
    t.note(format!("diagnostic: two-edge gadget preserved the optimum on {two_edge_ok}/{two_edge_ran} graphs it applies to"));
    t
}

fn uk_corpus() -> CorpusSpec {
    CorpusSpec { count: 500, max_n: 12, a_max: 30, b_max: 60, ..CorpusSpec::default() }
}

fn greedy_uk(seed: u64) -> Tally {
    let mut t = Tally::default();
    match ratio_harness(Method::GreedyUk, Problem::MaxUk, &uk_corpus(), seed) {
        Ok(r) => {
            for row in &r.rows {
                t.check(row.ratio <= 2.0, || format!("#{} {} ratio {:.3}", row.index, row.digest, row.ratio));
                // greedy keeps every item exactly when they all fit
                if row.all_selected {
                    t.check(row.approx == row.exact, || format!("#{} {} all items fit but {} != {}", row.index, row.digest, row.approx, row.exact));
                }
            }
            for (i, d, why) in &r.skipped {
                t.fail(format!("#{i} {d} skipped: {why}"));
            }
            t.note(format!("max ratio {:.3}; {} instances with all items fitting", r.max_ratio, r.full_selection));
        }
        Err(e) => t.fail(e.to_string()),
    }
    t
}

fn tau(seed: u64) -> Tally {
    let mut t = Tally::default();
    let corpus = uk_corpus();
    let rows: Vec<Result<(bool, bool, f64), String>> = (0..corpus.count as u64)
        .into_par_iter()
        .map(|i| {
            let u = gen::uk(&mut gen::stream(seed, "bench-maxuk", i), corpus.max_n, corpus.a_max, corpus.b_max);
            let spec = UkTau::new(&u);
            let holds = check_tau_conditions(&spec).holds();
            let r = tau_greedy(&spec).map_err(|e| e.to_string())?;
            let g = greedy_maxuk(&u);
            let same = r.best_value == g.best_value && spec.items(&r.selected) == g.selected;
            let opt = subset_sum_dp(&u).map_err(|e| e.to_string())?.optimum;
            let ratio = if opt == 0 { 1.0 } else { opt as f64 / r.best_value as f64 };
            Ok((holds, same, ratio))
        })
        .collect();
    let mut max_ratio: f64 = 1.0;
    for (k, row) in rows.iter().enumerate() {
        match row {
            Ok((holds, same, ratio)) => {
                t.check(*holds, || format!("#{k} conditions fail"));
                t.check(*same, || format!("#{k} differs from greedy"));
                t.check(*ratio <= 2.0, || format!("#{k} ratio {ratio:.3}"));
                max_ratio = max_ratio.max(*ratio);
            }
            Err(e) => t.fail(format!("#{k}: {e}")),
        }
    }
    t.note(format!("{} instances, max ratio {max_ratio:.3}", rows.len()));
    t
}

fn grounding(seed: u64) -> Tally {
    let mut t = Tally::default();
    // csp satisfiable, sentence truth, oracle truth
    type Row = Result<(bool, Option<bool>, Option<bool>), String>;
    let colour: Vec<Row> = (0..200)
        .into_par_iter()
        .map(|i| {
            let x = sample("accept-grounding", Problem::TwoColor, 8, seed, i);
            let Instance::Graph(g) = &x else { unreachable!() };
            let e = encode(Problem::TwoColor, &x).map_err(|e| e.to_string())?;
            let csp = ground_monobsnl_to_bcsp2(&e).map_err(|e| e.to_string())?;
            let sat = csp_brute(&csp).map_err(|e| e.to_string())?.is_some();
            let truth = search_truth(&Triple { sentence: e.sentence, rel: e.rel, dom: e.dom });
            Ok((sat, truth, Some(bipartite_check(g))))
        })
        .collect();
    let cnf: Vec<Row> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = gen::stream(seed, "accept-grounding-2cnf", i);
            let vars = rng.gen_range(1..=8);
            let m = rng.gen_range(0..=3 * vars);
            let f = gen::two_cnf(&mut rng, vars, m, None);
            let csp = twosat_to_bcsp2(&f).map_err(|e| e.to_string())?;
            let sat = csp_brute(&csp).map_err(|e| e.to_string())?.is_some();
            let want = twosat_decide(&f).map_err(|e| e.to_string())?.is_some();
            Ok((sat, Some(want), Some(want)))
        })
        .collect();
    for (what, rows) in [("2color", &colour), ("2cnf", &cnf)] {
        let mut yes = 0;
        for (k, row) in rows.iter().enumerate() {
            match row {
                Ok((sat, truth, want)) => {
                    yes += usize::from(*sat);
                    t.check(Some(*sat) == *want && *truth == *want, || format!("{what} #{k}: csp {sat} sentence {truth:?} oracle {want:?}"));
                }
                Err(e) => t.fail(format!("{what} #{k}: {e}")),
            }
        }
        t.note(format!("{what} {yes}/{} satisfiable", rows.len()));
    }
    t
}

fn fragments(seed: u64) -> Tally {
    let mut t = Tally::default();
    for p in Problem::ALL {
        for i in 0..10 {
            let x = sample("accept-fragments", p, 6, seed, i);
            let e = match encode(p, &x) {
                Ok(e) => e,
                Err(err) => {
                    t.fail(format!("{p} #{i}: {err}"));
                    continue;
                }
            };
            let s = &e.sentence;
            t.check(passes_i_ii(s), || format!("{p} #{i} fails (i)-(ii)"));
            if matches!(p, Problem::TwoColor | Problem::Exact3Dstcon | Problem::Polar2Sat(_)) {
                t.check(is_monotone(s), || format!("{p} not monotone"));
            }
            if p == Problem::TwoColor {
                t.check(is_binary(s, &e.dom), || format!("{p} not binary"));
            }
            if p == Problem::Dstncon {
                let mu = check_mu_requirements(s, default_offset_bound(s));
                t.check(mu.iter().all(Result::is_ok), || format!("{p} #{i}: {mu:?}"));
            }
        }
    }
    t.note(format!("{} problems x 10 instances", Problem::ALL.len()));
    t
}

fn combinators(seed: u64) -> Tally {
    let mut t = Tally::default();
    let rows: Vec<Result<[bool; 4], String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = gen::stream(seed, "accept-combinators", i);
            let mut graph = || {
                let n = rng.gen_range(1..=5);
                gen::graph(&mut rng, n, 0.5)
            };
            let (g, h) = (graph(), graph());
            let (a, b) = (bipartite_check(&g), bipartite_check(&h));
            let tg = triple(Problem::TwoColor, &Instance::Graph(g))?;
            let th = triple(Problem::TwoColor, &Instance::Graph(h))?;
            let and = combine_and(&tg, &th).map_err(|e| e.to_string())?;
            let or = combine_or(&tg, &th).map_err(|e| e.to_string())?;
            Ok([search_truth(&and) == Some(a && b), search_truth(&or) == Some(a || b), passes_i_ii(&and.sentence), passes_i_ii(&or.sentence)])
        })
        .collect();
    for (k, row) in rows.iter().enumerate() {
        match row {
            Ok([and, or, and_snl, or_snl]) => {
                t.check(*and, || format!("#{k} and-truth"));
                t.check(*or, || format!("#{k} or-truth"));
                t.check(*and_snl && *or_snl, || format!("#{k} combined sentence fails (i)-(ii)"));
            }
            Err(e) => t.fail(format!("#{k}: {e}")),
        }
    }
    t.note("100 pairs of 2COLOR instances".into());
    t
}
