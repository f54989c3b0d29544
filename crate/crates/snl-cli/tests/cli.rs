use std::fs;
use std::path::Path;

use rand::Rng;
use snl_ast::{read_json, DomStructure, Graph, RelStructure, SoRange, ValueSet, WeightedGraph};
use snl_cli::{run, Output, EXIT_BUDGET, EXIT_OK, EXIT_PROPERTY, EXIT_USAGE};
use snl_encode::gen;
use snl_oracle::OracleAnswer;
use tempfile::TempDir;

fn snl(args: &[&str]) -> Output {
    run(std::iter::once("snl").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Data rows of a TSV report, header dropped.
fn rows(out: &str) -> Vec<Vec<&str>> {
    out.lines().skip(1).map(|l| l.split('\t').collect()).collect()
}

#[test]
fn usage_errors() {
    assert_eq!(snl(&["--help"]).code, EXIT_OK);
    assert_eq!(snl(&[]).code, EXIT_USAGE);
    assert_eq!(snl(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(snl(&["compare", "sudoku"]).code, EXIT_USAGE);
    assert_eq!(snl(&["report", "nightly"]).code, EXIT_USAGE);
    assert_eq!(snl(&["report", "acceptance", "--only", "nope"]).code, EXIT_USAGE);
    assert_eq!(snl(&["compare", "uk", "--exhaustive-n", "3"]).code, EXIT_USAGE);
    assert_eq!(snl(&["--jobs", "0", "compare", "2color"]).code, EXIT_USAGE);
    assert_eq!(snl(&["check", "/nonexistent/file.snl"]).code, EXIT_USAGE);
}

#[test]
fn report_single_criterion() {
    let o = snl(&["report", "acceptance", "--only", "williams"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert_eq!(r.len(), 1);
    assert_eq!(&r[0][..3], ["3", "williams", "PASS"]);
    assert!(o.stderr.contains("1 of 1 criteria passed"));
}

#[test]
fn compare_two_color() {
    let o = snl(&["compare", "2color", "--count", "200", "--max-n", "8"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert_eq!(r.len(), 200);
    assert!(r.iter().all(|row| row[5] == "ok"));
    assert!(o.stderr.contains("0 mismatches"));
}

#[test]
fn compare_dstncon_exhaustive() {
    let o = snl(&["compare", "dstncon", "--count", "64", "--exhaustive-n", "3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert_eq!(r.len(), 64);
    assert!(r.iter().all(|row| row[5] == "ok"));
    // 0 → 2 is reachable in exactly the graphs with the arc 0→2 or the path 0→1→2
    let yes = r.iter().filter(|row| row[2] == "true").count();
    assert_eq!(yes, 64 - 32 - 8);
}

#[test]
fn compare_uk_and_max_problems() {
    for (problem, count) in [("uk", "60"), ("maxcut", "30"), ("maxuk", "30"), ("maxip", "30"), ("polar2sat-", "60")] {
        let o = snl(&["compare", problem, "--count", count]);
        assert_eq!(o.code, EXIT_OK, "{problem}: {}", o.stderr);
        assert!(rows(&o.stdout).iter().all(|row| row[5] == "ok"), "{problem}");
    }
}

#[test]
fn compare_budget_aborts_are_not_mismatches() {
    let o = snl(&["compare", "uk", "--count", "10", "--max-n", "6", "--budget", "0"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert!(r.iter().all(|row| row[5] == "aborted" || row[5] == "ok"));
    assert!(r.iter().any(|row| row[5] == "aborted"));
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let args = ["compare", "nbg", "--count", "40", "--max-n", "6", "--seed", "9"];
    let one = snl(&[&["--jobs", "1"][..], &args].concat());
    let four = snl(&[&["--jobs", "4"][..], &args].concat());
    assert_eq!(one, four);
    let other = snl(&["compare", "nbg", "--count", "40", "--max-n", "6", "--seed", "10"]);
    assert_ne!(one.stdout, other.stdout);
}

#[test]
fn encode_eval_check_round_trip() {
    let tmp = TempDir::new().unwrap();
    let square = write(tmp.path(), "c4.txt", &Graph::cycle(4).to_text());
    let dir = tmp.path().join("c4");
    let o = snl(&["encode", "2color", &square, "-o", p(&dir)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    for f in snl_cli::commands::encoding_files(&dir) {
        assert!(f.exists(), "{}", f.display());
    }
    let files = |w: &str| {
        vec![
            "eval".to_string(),
            "--sentence".into(),
            p(&dir.join("sentence.snl")).into(),
            "--structure".into(),
            p(&dir.join("structure.json")).into(),
            "--domain".into(),
            p(&dir.join("domain.json")).into(),
            w.into(),
        ]
    };
    let mut args = files("--witness");
    args.push(p(&dir.join("witness.json")).into());
    let o = run(std::iter::once("snl".to_string()).chain(args));
    assert_eq!((o.code, o.stdout.as_str()), (EXIT_OK, "true\n"), "{}", o.stderr);

    let found = tmp.path().join("found.json");
    let mut args = files("--search");
    args.extend(["--out".into(), p(&found).into()]);
    let o = run(std::iter::once("snl".to_string()).chain(args));
    assert_eq!(o.stdout, "true\n");
    assert!(found.exists());

    let o = snl(&["check", p(&dir.join("sentence.snl")), "--domain", p(&dir.join("domain.json"))]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["snl", "yes"]));
    assert!(o.stdout.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["binary", "yes"]));

    // an odd cycle has no canonical witness and search finds none
    let pentagon = write(tmp.path(), "c5.txt", &Graph::cycle(5).to_text());
    let dir5 = tmp.path().join("c5");
    assert_eq!(snl(&["encode", "2color", &pentagon, "-o", p(&dir5)]).code, EXIT_OK);
    assert_eq!(fs::read_to_string(dir5.join("witness.json")).unwrap().trim(), "null");
    let o = snl(&[
        "eval",
        "--sentence",
        p(&dir5.join("sentence.snl")),
        "--structure",
        p(&dir5.join("structure.json")),
        "--domain",
        p(&dir5.join("domain.json")),
        "--search",
    ]);
    assert_eq!((o.code, o.stdout.as_str()), (EXIT_PROPERTY, "false\n"));
    // the square's witness does not fit the pentagon
    let o = snl(&[
        "eval",
        "--sentence",
        p(&dir5.join("sentence.snl")),
        "--structure",
        p(&dir5.join("structure.json")),
        "--domain",
        p(&dir5.join("domain.json")),
        "--witness",
        p(&dir.join("witness.json")),
    ]);
    assert_ne!(o.code, EXIT_OK);
}

#[test]
fn eval_search_budget_abort() {
    let tmp = TempDir::new().unwrap();
    let inst = write(tmp.path(), "u.txt", "30 3 5 7 9 11 13\n");
    let dir = tmp.path().join("e");
    assert_eq!(snl(&["encode", "uk", &inst, "-o", p(&dir)]).code, EXIT_OK);
    let o = snl(&[
        "eval",
        "--sentence",
        p(&dir.join("sentence.snl")),
        "--structure",
        p(&dir.join("structure.json")),
        "--domain",
        p(&dir.join("domain.json")),
        "--search",
        "--budget",
        "0",
    ]);
    assert_eq!((o.code, o.stdout.as_str()), (EXIT_BUDGET, "aborted\n"));
}

#[test]
fn check_reports_violations() {
    let tmp = TempDir::new().unwrap();
    // two second-order atoms clocked by unrelated variables
    let s = write(tmp.path(), "bad.snl", "(sentence (exists (P 1)) (forall (i num 0 n) (j num 0 n)) (psi (and (so P i 0) (so P j 0))))");
    let o = snl(&["check", &s]);
    assert_eq!(o.code, EXIT_PROPERTY, "{}{}", o.stdout, o.stderr);
    assert!(o.stdout.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["snl", "no"]));

    // three second-order disjuncts, and a DNF budget too small to decide
    let s = write(
        tmp.path(),
        "wide.snl",
        "(sentence (exists (P 1)) (forall (i num 0 n) (u num 0 n) (v num 0 n) (w num 0 n)) (psi (or (so P i u) (so P i v) (so P i w))))",
    );
    assert_eq!(snl(&["check", &s]).code, EXIT_PROPERTY);
    assert_eq!(snl(&["check", &s, "--dnf-budget", "2"]).code, EXIT_BUDGET);
}

#[test]
fn oracle_answers() {
    let tmp = TempDir::new().unwrap();
    let c5 = write(tmp.path(), "c5.txt", &Graph::cycle(5).to_text());
    assert_eq!(snl(&["oracle", "2color", &c5]).stdout, "no\n");
    assert_eq!(snl(&["oracle", "nbg", &c5]).stdout, "yes\n");
    assert_eq!(snl(&["oracle", "maxcut", &c5]).stdout, "4\n");
    let o = snl(&["oracle", "2color", &c5, "--json"]);
    let a: OracleAnswer = read_json(&o.stdout).unwrap();
    assert_eq!(a.decision, Some(false));

    let path = write(tmp.path(), "p.txt", "3 2\n0 1\n1 2\n");
    assert_eq!(snl(&["oracle", "dstncon", &path]).stdout, "no\n");
    assert_eq!(snl(&["oracle", "dstncon", &path, "--st", "2,0"]).stdout, "yes\n");

    let uk = write(tmp.path(), "u.txt", "10 7 5 4 3\n");
    assert_eq!(snl(&["oracle", "uk", &uk]).stdout, "yes\n");
    assert_eq!(snl(&["oracle", "maxuk", &uk]).stdout, "10\n");

    let big = write(tmp.path(), "k30.txt", &Graph::complete(30).to_text());
    assert_eq!(snl(&["oracle", "maxcut", &big]).code, EXIT_BUDGET);
}

#[test]
fn reduce_passes() {
    let tmp = TempDir::new().unwrap();
    let three = write(tmp.path(), "f3.cnf", "p cnf 3 2\n1 2 3 0\n-1 -2 0\n");
    let out = tmp.path().join("f2.cnf");
    let trace = tmp.path().join("trace.json");
    let o = snl(&["reduce", "max3sat-to-max2sat", &three, "-o", p(&out), "--trace", p(&trace)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    // one gadget of ten clauses plus the 2-clause
    assert_eq!(rows(&o.stdout)[0], ["max3sat-to-max2sat", "2", "11"]);
    let t: snl_reduce::ApReductionTrace = read_json(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t.step, "max3sat-to-max2sat");

    let wcut = tmp.path().join("w.json");
    assert_eq!(snl(&["reduce", "max2sat-to-wtdcut", p(&out), "-o", p(&wcut)]).code, EXIT_OK);
    let g: WeightedGraph = read_json(&fs::read_to_string(&wcut).unwrap()).unwrap();
    let cut = tmp.path().join("g.txt");
    assert_eq!(snl(&["reduce", "wtdcut-to-maxcut", p(&wcut), "-o", p(&cut), "--gadget", "corrected"]).code, EXIT_OK);
    let target = Graph::parse(&fs::read_to_string(&cut).unwrap()).unwrap();
    assert!(target.n > g.n);

    // 3-clauses are not 2SAT, and polarize has no approximation trace
    assert_eq!(snl(&["reduce", "2sat-to-bcsp2", &three, "-o", p(&tmp.path().join("x"))]).code, EXIT_USAGE);
    let two = write(tmp.path(), "f2b.cnf", "p cnf 2 2\n1 -2 0\n-1 2 0\n");
    let pol = tmp.path().join("pol.cnf");
    assert_eq!(snl(&["reduce", "polarize", &two, "-o", p(&pol)]).code, EXIT_OK);
    assert_eq!(snl(&["reduce", "polarize", &two, "-o", p(&pol), "--trace", p(&trace)]).code, EXIT_USAGE);
    let csp = tmp.path().join("csp.json");
    assert_eq!(snl(&["reduce", "2sat-to-bcsp2", &two, "-o", p(&csp)]).code, EXIT_OK);
    let c: snl_ast::CspInstance = read_json(&fs::read_to_string(&csp).unwrap()).unwrap();
    assert_eq!((c.variables, c.domain, c.constraints.len()), (2, 2, 2));
}

#[test]
fn reduce_grounding_passes_read_encodings() {
    let tmp = TempDir::new().unwrap();
    let c4 = write(tmp.path(), "c4.txt", &Graph::cycle(4).to_text());
    let dir = tmp.path().join("enc");
    assert_eq!(snl(&["encode", "2color", &c4, "-o", p(&dir)]).code, EXIT_OK);
    let csp = tmp.path().join("csp.json");
    let o = snl(&["reduce", "ground-bcsp2", p(&dir), "-o", p(&csp)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let c: snl_ast::CspInstance = read_json(&fs::read_to_string(&csp).unwrap()).unwrap();
    assert!(snl_oracle::csp_brute(&c).unwrap().is_some());

    let k3 = write(tmp.path(), "k3.txt", &Graph::complete(3).to_text());
    let mdir = tmp.path().join("max");
    assert_eq!(snl(&["encode", "maxcut", &k3, "-o", p(&mdir)]).code, EXIT_OK);
    let m = tmp.path().join("m.json");
    assert_eq!(snl(&["reduce", "ground-max2sat", p(&mdir), "-o", p(&m)]).code, EXIT_OK);
    let g: snl_reduce::Max2Sat = read_json(&fs::read_to_string(&m).unwrap()).unwrap();
    let best = (0..1u32 << g.cnf.nvars)
        .map(|mask| {
            let assign: Vec<bool> = (0..=g.cnf.nvars).map(|v| v > 0 && mask >> (v - 1) & 1 == 1).collect();
            g.value(&assign)
        })
        .max()
        .unwrap();
    assert_eq!(best, 4);
}

#[test]
fn pipeline_examples() {
    let tmp = TempDir::new().unwrap();
    let single = write(tmp.path(), "one.cnf", "p cnf 3 1\n1 2 3 0\n");
    let dir = tmp.path().join("art");
    let o = snl(&["pipeline", &single, "-o", p(&dir)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert_eq!((r[0][0], r[0][3], r[0][4]), ("1", "1", "true"));
    for f in ["max2sat.cnf", "wtdcut.json", "maxcut.txt", "trace.json", "check.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }

    let empty = write(tmp.path(), "empty.cnf", "p cnf 0 0\n");
    let o = snl(&["pipeline", &empty]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(rows(&o.stdout)[0][4], "true");

    let mut rng = gen::stream(3, "cli-pipeline", 0);
    let f = gen::cnf(&mut rng, 4, 3, 3);
    let seeded = write(tmp.path(), "seeded.cnf", &f.to_dimacs());
    let o = snl(&["pipeline", &seeded]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert_eq!(r[0][0], r[0][3]);

    assert_eq!(snl(&["pipeline", &single, "--to", "maxsat"]).code, EXIT_USAGE);
}

#[test]
fn solve_methods_agree_on_maxuk() {
    let tmp = TempDir::new().unwrap();
    let uk = write(tmp.path(), "u.txt", "10 7 5 4 3\n");
    let dir = tmp.path().join("enc");
    assert_eq!(snl(&["encode", "maxuk", &uk, "-o", p(&dir)]).code, EXIT_OK);
    let solve = |method: &str| {
        let o = snl(&["solve", "--method", method, "--spec", p(&dir)]);
        assert_eq!(o.code, EXIT_OK, "{method}: {}", o.stderr);
        rows(&o.stdout)[0].iter().map(|s| s.to_string()).collect::<Vec<_>>()
    };
    assert_eq!(solve("greedy-uk"), ["greedy-uk", "10", "1,4", "-"]);
    // the scheme walks items in descending order, so its steps are positions in that order
    assert_eq!(solve("tau"), ["tau", "10", "1,4", "1,4"]);
    assert_eq!(solve("exact")[1], "10");

    let out = tmp.path().join("r.json");
    assert_eq!(snl(&["solve", "--method", "tau", "--spec", p(&dir), "--out", p(&out)]).code, EXIT_OK);
    let r: snl_opt::OptResult = read_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.best_value, 10);

    // without the budget cap condition (1) fails
    let o = snl(&["solve", "--method", "tau", "--spec", p(&dir), "--cap", "1000"]);
    assert_eq!(o.code, EXIT_PROPERTY, "{}", o.stdout);
    assert!(o.stderr.contains("condition (1)"), "{}", o.stderr);
    assert_eq!(snl(&["solve", "--method", "exact", "--spec", p(&dir), "--budget", "10"]).code, EXIT_BUDGET);
}

/// Writes the MAX-UK step relations for `b = 10, a = (7,5,4,3)` as a formula spec.
fn tau_dir(dir: &Path, cap: Option<u64>) {
    fs::create_dir_all(dir).unwrap();
    let (a, b) = ([7u64, 5, 4, 3], 10u64);
    let (n, m) = (a.len() as u64, a.iter().sum::<u64>());
    let mut rel = RelStructure::default();
    rel.universes.insert("IDX".into(), (0..=n).collect());
    rel.universes.insert("VAL".into(), (0..=m).collect());
    rel.constants = [("n".into(), n), ("b".into(), b), ("m".into(), m)].into();
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
    fs::write(dir.join("r.snl"), text("(<= v b)")).unwrap();
    fs::write(dir.join("r_minus.snl"), text("")).unwrap();
    fs::write(dir.join("structure.json"), snl_ast::to_json(&rel)).unwrap();
    fs::write(dir.join("domain.json"), snl_ast::to_json(&dom)).unwrap();
    fs::write(dir.join("tau.json"), serde_json::json!({ "origin": 0, "cap": cap }).to_string()).unwrap();
}

#[test]
fn solve_formula_step_spec() {
    let tmp = TempDir::new().unwrap();
    let capped = tmp.path().join("capped");
    tau_dir(&capped, Some(10));
    let o = snl(&["solve", "--method", "tau", "--spec", p(&capped)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(rows(&o.stdout)[0][..3], ["tau", "10", "1,4"]);

    // uncapped, step 2 from 7 earns 5 with a better move of 4 available afterwards
    let open = tmp.path().join("open");
    tau_dir(&open, None);
    let o = snl(&["solve", "--method", "tau", "--spec", p(&open)]);
    assert_eq!(o.code, EXIT_PROPERTY, "{}", o.stdout);
    assert!(o.stderr.contains("condition"), "{}", o.stderr);
}

#[test]
fn bench_reports() {
    let o = snl(&["bench", "--method", "greedy-uk", "--problem", "maxuk", "--count", "50", "--seed", "4"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = rows(&o.stdout);
    assert_eq!(r.len(), 50);
    assert!(r.iter().all(|row| row[4].parse::<f64>().unwrap() <= 2.0));
    assert_eq!(r.iter().map(|row| row[0].parse::<usize>().unwrap()).collect::<Vec<_>>(), (0..50).collect::<Vec<_>>());

    let o = snl(&["bench", "--method", "exact", "--problem", "maxcut", "--count", "10", "--max-n", "5"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(rows(&o.stdout).iter().all(|row| row[2] == row[3]));

    assert_eq!(snl(&["bench", "--method", "tau", "--problem", "maxcut"]).code, EXIT_USAGE);
}

#[test]
fn compare_rows_cover_the_seeded_corpus() {
    // the corpus generator is the one the acceptance suite uses
    let mut rng = gen::stream(0, "compare-2color", 0);
    let n = rng.gen_range(1..=8usize);
    let g = gen::graph(&mut rng, n, 0.4);
    let d = snl_encode::digest(snl_encode::Problem::TwoColor, &snl_encode::Instance::Graph(g));
    let o = snl(&["compare", "2color", "--count", "1"]);
    assert_eq!(rows(&o.stdout)[0][1], d);
}
