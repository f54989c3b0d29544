//! One function per subcommand. Each appends to the [`Output`] and sets its exit
//! code; an `Err` aborts the command with the error's code.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use snl_ast::{parse_sentence, print_sentence, read_json, to_json, Cnf, DomStructure, MaxSpec, RelStructure, Sentence, WeightedGraph, Witness};
use snl_check::{check, CheckOptions};
use snl_encode::{canonical_witness, encode, Encoding, Instance, Meta, Problem};
use snl_eval::{search_witness, Compiled};
use snl_opt::{exact_max, greedy_maxuk, ratio_harness, tau_greedy, CorpusSpec, FormulaTau, Method, OptError, OptResult, UkTau};
use snl_oracle::OracleError;
use snl_reduce::diag::chain_optimum;
use snl_reduce::{
    cnf2_to_positive_polarity, ground_maxsnl_to_max2sat, ground_monobsnl_to_bcsp2, max2sat_to_wtdcut, max3sat_to_max2sat, twosat_to_bcsp2,
    wtdcut_to_maxcut, ApReductionTrace, Chain, Gadget, ReduceError,
};

use crate::compare::{compare, CompareConfig};
use crate::oracle::oracle_answer;
use crate::{acceptance, Cli, CliError, Command, Output, Pass, EXIT_BUDGET, EXIT_PROPERTY};

type Res = Result<(), CliError>;

pub fn dispatch(cli: &Cli, o: &mut Output) -> Res {
    match &cli.command {
        Command::Check { sentence, domain, dnf_budget, offset_bound } => {
            cmd_check(sentence, domain.as_deref(), *dnf_budget, *offset_bound, cli.seed, o)
        }
        Command::Eval { sentence, structure, domain, witness, search: _, budget, out } => {
            cmd_eval(sentence, structure, domain, witness.as_deref(), *budget, out.as_deref(), o)
        }
        Command::Encode { problem, instance, out, st } => cmd_encode(*problem, instance, out, *st, o),
        Command::Reduce { pass, input, out, gadget, trace } => cmd_reduce(*pass, input, out, *gadget, trace.as_deref(), o),
        Command::Solve { method, spec, cap, budget, out } => cmd_solve(*method, spec, *cap, *budget, out.as_deref(), o),
        Command::Oracle { problem, instance, json, st } => cmd_oracle(*problem, instance, *json, *st, o),
        Command::Compare { problem, count, max_n, exhaustive_n, budget } => {
            let cfg = CompareConfig { problem: *problem, count: *count, max_n: *max_n, exhaustive_n: *exhaustive_n, seed: cli.seed, budget: *budget };
            cmd_compare(&cfg, o)
        }
        Command::Pipeline { instance, from, to, out } => cmd_pipeline(instance, from, to, out.as_deref(), cli.verbose > 0, o),
        Command::Bench { method, problem, count, max_n, a_max, b_max, budget } => {
            let corpus = CorpusSpec { count: *count, max_n: *max_n, a_max: *a_max, b_max: *b_max, budget: *budget };
            cmd_bench(*method, *problem, &corpus, cli.seed, o)
        }
        Command::Report { suite, only } => cmd_report(suite, only.as_deref(), cli.seed, o),
    }
}

// ---- file helpers ----

fn read_text(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))
}

fn read_json_file<T: DeserializeOwned>(p: &Path) -> Result<T, CliError> {
    read_json(&read_text(p)?).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))
}

fn read_sentence(p: &Path) -> Result<Sentence, CliError> {
    parse_sentence(&read_text(p)?).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))
}

fn write_file(p: &Path, text: &str) -> Res {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("{}: {e}", dir.display())))?;
    }
    fs::write(p, text).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

const SENTENCE: &str = "sentence.snl";
const STRUCTURE: &str = "structure.json";
const DOMAIN: &str = "domain.json";
const OBJECTIVE: &str = "objective.json";
const WITNESS: &str = "witness.json";
const META: &str = "meta.json";
const INSTANCE: &str = "instance.json";

fn write_encoding(dir: &Path, e: &Encoding, x: &Instance, w: &Option<Witness>) -> Res {
    write_file(&dir.join(SENTENCE), &print_sentence(&e.sentence))?;
    write_file(&dir.join(STRUCTURE), &with_newline(to_json(&e.rel)))?;
    write_file(&dir.join(DOMAIN), &with_newline(to_json(&e.dom)))?;
    write_file(&dir.join(OBJECTIVE), &with_newline(to_json(&e.objective)))?;
    write_file(&dir.join(WITNESS), &with_newline(to_json(w)))?;
    write_file(&dir.join(META), &with_newline(to_json(&e.meta)))?;
    write_file(&dir.join(INSTANCE), &with_newline(to_json(x)))
}

fn load_encoding(dir: &Path) -> Result<Encoding, CliError> {
    Ok(Encoding {
        sentence: read_sentence(&dir.join(SENTENCE))?,
        rel: read_json_file(&dir.join(STRUCTURE))?,
        dom: read_json_file(&dir.join(DOMAIN))?,
        objective: read_json_file::<Option<MaxSpec>>(&dir.join(OBJECTIVE))?,
        meta: read_json_file::<Meta>(&dir.join(META))?,
    })
}

fn oracle_err(e: OracleError) -> CliError {
    match e {
        OracleError::TooLarge { .. } => CliError::budget(e),
        OracleError::Precondition(_) => CliError::usage(e),
    }
}

// ---- commands ----

fn cmd_check(path: &Path, domain: Option<&Path>, dnf_budget: usize, offset_bound: Option<u64>, seed: u64, o: &mut Output) -> Res {
    let s = read_sentence(path)?;
    let d: Option<DomStructure> = domain.map(read_json_file).transpose()?;
    let opts = CheckOptions { offset_bound, dnf_budget, seed, ..CheckOptions::default() };
    let report = check(&s, d.as_ref(), &opts);
    o.out(report.table());
    if report.dnf_blowup_aborted {
        o.err("DNF budget exhausted; requirement (ii) undecided");
        o.code = EXIT_BUDGET;
    } else if !(report.snl || report.mu_snl) {
        o.err(format!("{}: not in SNL or μSNL ({} violations)", path.display(), report.violations.len()));
        o.code = EXIT_PROPERTY;
    }
    Ok(())
}

fn cmd_eval(sentence: &Path, structure: &Path, domain: &Path, witness: Option<&Path>, budget: u64, out: Option<&Path>, o: &mut Output) -> Res {
    let s = read_sentence(sentence)?;
    let rel: RelStructure = read_json_file(structure)?;
    let dom: DomStructure = read_json_file(domain)?;
    let truth = match witness {
        Some(wp) => {
            let w: Witness = read_json_file(wp)?;
            let c = Compiled::new(&s, &rel, &dom).map_err(CliError::usage)?;
            match c.check(&w).map_err(CliError::usage)? {
                None => Some(true),
                Some(v) => {
                    let at: Vec<String> = v.values.iter().map(|(x, val)| format!("{x}={val}")).collect();
                    o.err(format!("conjunct {} fails at {}", v.psi, at.join(" ")));
                    Some(false)
                }
            }
        }
        None => {
            let r = search_witness(&s, &rel, &dom, budget).map_err(CliError::usage)?;
            o.err(format!("{} search nodes", r.nodes));
            if let (Some(p), Some(w)) = (out, &r.witness) {
                write_file(p, &with_newline(to_json(w)))?;
            }
            r.truth
        }
    };
    match truth {
        Some(true) => o.out("true\n"),
        Some(false) => {
            o.out("false\n");
            o.code = EXIT_PROPERTY;
        }
        None => {
            o.out("aborted\n");
            o.err(format!("search budget of {budget} nodes exhausted"));
            o.code = EXIT_BUDGET;
        }
    }
    Ok(())
}

fn cmd_encode(problem: Problem, instance: &Path, dir: &Path, st: Option<(usize, usize)>, o: &mut Output) -> Res {
    let x = Instance::parse(problem, &read_text(instance)?, st).map_err(CliError::usage)?;
    let e = encode(problem, &x).map_err(CliError::usage)?;
    let w = canonical_witness(problem, &x).map_err(CliError::usage)?;
    write_encoding(dir, &e, &x, &w)?;
    o.out("problem\tdigest\tcanonical_witness\n");
    o.out(format!("{problem}\t{}\t{}\n", e.meta.digest, if w.is_some() { "yes" } else { "no" }));
    o.err(format!("wrote encoding to {}", dir.display()));
    Ok(())
}

fn read_cnf(p: &Path) -> Result<Cnf, CliError> {
    Cnf::parse_dimacs(&read_text(p)?).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))
}

fn reduce_err(e: ReduceError) -> CliError {
    CliError::usage(e)
}

fn cmd_reduce(pass: Pass, input: &Path, out: &Path, gadget: Gadget, trace_path: Option<&Path>, o: &mut Output) -> Res {
    let (source, target, text, trace): (usize, usize, String, Option<ApReductionTrace>) = match pass {
        Pass::TwosatToBcsp2 => {
            let f = read_cnf(input)?;
            let c = twosat_to_bcsp2(&f).map_err(reduce_err)?;
            (f.clauses.len(), c.constraints.len(), to_json(&c), None)
        }
        Pass::Polarize => {
            let f = read_cnf(input)?;
            let p = cnf2_to_positive_polarity(&f).map_err(reduce_err)?;
            (f.clauses.len(), p.cnf.clauses.len(), p.cnf.to_dimacs(), None)
        }
        Pass::GroundBcsp2 => {
            let e = load_encoding(input)?;
            let c = ground_monobsnl_to_bcsp2(&e).map_err(reduce_err)?;
            (e.sentence.matrix.len(), c.constraints.len(), to_json(&c), None)
        }
        Pass::GroundMax2sat => {
            let e = load_encoding(input)?;
            let m = ground_maxsnl_to_max2sat(&e).map_err(reduce_err)?;
            (e.sentence.matrix.len(), m.cnf.clauses.len(), to_json(&m), None)
        }
        Pass::Max3satToMax2sat => {
            let f = read_cnf(input)?;
            let w = max3sat_to_max2sat(&f).map_err(reduce_err)?;
            (f.clauses.len(), w.cnf.clauses.len(), w.cnf.to_dimacs(), Some(w.trace(&f)))
        }
        Pass::Max2satToWtdcut => {
            let f = read_cnf(input)?;
            let c = max2sat_to_wtdcut(&f).map_err(reduce_err)?;
            (f.clauses.len(), c.graph.edges.len(), to_json(&c.graph), Some(c.trace(&f)))
        }
        Pass::WtdcutToMaxcut => {
            let g: WeightedGraph = read_json_file(input)?;
            let r = wtdcut_to_maxcut(&g, gadget).map_err(reduce_err)?;
            (g.edges.len(), r.graph.edges.len(), r.graph.to_text(), Some(r.trace(&g)))
        }
    };
    write_file(out, &with_newline(text))?;
    if let Some(tp) = trace_path {
        let t = trace.ok_or_else(|| CliError::usage(format!("{pass:?} is not an approximation-preserving step; no trace")))?;
        write_file(tp, &with_newline(to_json(&t)))?;
    }
    o.out("pass\tsource_size\ttarget_size\n");
    o.out(format!("{}\t{source}\t{target}\n", clap::ValueEnum::to_possible_value(&pass).map(|v| v.get_name().to_string()).unwrap_or_default()));
    o.err(format!("wrote {}", out.display()));
    Ok(())
}

/// Step specification read by `solve --method tau` from `tau.json`, next to `r.snl`,
/// `r_minus.snl`, `structure.json` and `domain.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauFile {
    pub origin: u64,
    pub cap: Option<u64>,
}

fn opt_err(e: OptError) -> CliError {
    match e {
        OptError::Budget { .. } => CliError::budget(e),
        OptError::Conditions(_) => CliError::property(e),
        _ => CliError::usage(e),
    }
}

fn uk_instance(dir: &Path) -> Result<snl_ast::UkInstance, CliError> {
    match read_json_file::<Instance>(&dir.join(INSTANCE))? {
        Instance::Uk(u) => Ok(u),
        _ => Err(CliError::usage(format!("{}: not a UK instance", dir.join(INSTANCE).display()))),
    }
}

fn cmd_solve(method: Method, dir: &Path, cap: Option<u64>, budget: u64, out: Option<&Path>, o: &mut Output) -> Res {
    let (r, items): (OptResult, Option<Vec<u64>>) = match method {
        Method::Exact => {
            let e = load_encoding(dir)?;
            let spec = e.objective.as_ref().ok_or_else(|| CliError::usage("encoding has no objective"))?;
            (exact_max(&e.sentence, spec, &e.rel, &e.dom, budget).map_err(opt_err)?, None)
        }
        Method::GreedyUk => (greedy_maxuk(&uk_instance(dir)?), None),
        Method::Tau if dir.join("tau.json").exists() => {
            let t: TauFile = read_json_file(&dir.join("tau.json"))?;
            let rel: RelStructure = read_json_file(&dir.join(STRUCTURE))?;
            let dom: DomStructure = read_json_file(&dir.join(DOMAIN))?;
            let spec =
                FormulaTau::new(&read_sentence(&dir.join("r.snl"))?, &read_sentence(&dir.join("r_minus.snl"))?, &rel, &dom, t.origin, cap.or(t.cap))
                    .map_err(opt_err)?;
            (tau_greedy(&spec).map_err(opt_err)?, None)
        }
        Method::Tau => {
            let u = uk_instance(dir)?;
            let spec = UkTau::new(&u);
            let spec = if cap.is_some() { spec.with_cap(cap) } else { spec };
            let r = tau_greedy(&spec).map_err(opt_err)?;
            let items = spec.items(&r.selected);
            (r, Some(items))
        }
    };
    let show = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    o.out("method\tvalue\tselected\titems\n");
    o.out(format!("{method}\t{}\t{}\t{}\n", r.best_value, show(&r.selected), items.as_deref().map_or("-".into(), show)));
    if let Some(p) = out {
        write_file(p, &with_newline(to_json(&r)))?;
    }
    Ok(())
}

fn cmd_oracle(problem: Problem, instance: &Path, json: bool, st: Option<(usize, usize)>, o: &mut Output) -> Res {
    let x = Instance::parse(problem, &read_text(instance)?, st).map_err(CliError::usage)?;
    let a = oracle_answer(problem, &x).map_err(oracle_err)?;
    if json {
        o.out(with_newline(to_json(&a)));
    } else {
        match (a.decision, a.optimum) {
            (Some(d), _) => o.out(if d { "yes\n" } else { "no\n" }),
            (_, Some(v)) => o.out(format!("{v}\n")),
            _ => unreachable!("oracle answers carry a decision or an optimum"),
        }
    }
    Ok(())
}

fn cmd_compare(cfg: &CompareConfig, o: &mut Output) -> Res {
    let r = compare(cfg).map_err(CliError::usage)?;
    o.out(r.to_tsv());
    o.err(r.summary());
    if r.mismatches > 0 {
        o.code = EXIT_PROPERTY;
    }
    Ok(())
}

fn cmd_pipeline(instance: &Path, from: &str, to: &str, out: Option<&Path>, verbose: bool, o: &mut Output) -> Res {
    if (from, to) != ("max3sat", "maxcut") {
        return Err(CliError::usage(format!("no pipeline from {from} to {to}; only max3sat to maxcut")));
    }
    let f = read_cnf(instance)?;
    let chain = Chain::build(&f, Gadget::Corrected).map_err(reduce_err)?;
    let trace = chain.trace();
    if let Some(dir) = out {
        write_file(&dir.join("max2sat.cnf"), &chain.williams.cnf.to_dimacs())?;
        write_file(&dir.join("wtdcut.json"), &with_newline(to_json(&chain.cut.graph)))?;
        write_file(&dir.join("maxcut.txt"), &chain.target().to_text())?;
        write_file(&dir.join("trace.json"), &with_newline(to_json(&trace)))?;
    }
    let c = chain_optimum(&f, Gadget::Corrected).map_err(oracle_err)?;
    if let Some(dir) = out {
        write_file(&dir.join("check.json"), &with_newline(to_json(&c)))?;
    }
    o.out("max_sat\ttarget_vertices\tmax_cut\tback_mapped\toptimal\n");
    o.out(format!("{}\t{}\t{}\t{}\t{}\n", c.max_sat, c.target_vertices, c.max_cut, c.back_mapped, c.optimal));
    if verbose || !c.optimal {
        o.err(format!("trace: {}", to_json(&trace)));
    }
    if !c.optimal {
        o.err(format!("back-mapped assignment satisfies {} clauses, optimum is {}\ninstance:\n{}", c.back_mapped, c.max_sat, f.to_dimacs()));
        o.code = EXIT_PROPERTY;
    }
    Ok(())
}

fn cmd_bench(method: Method, problem: Problem, corpus: &CorpusSpec, seed: u64, o: &mut Output) -> Res {
    let r = ratio_harness(method, problem, corpus, seed).map_err(opt_err)?;
    o.out(r.to_tsv());
    o.err(format!(
        "{method} on {problem}: {} instances, max ratio {:.4} (bound {}), {} violations, {} skipped",
        r.rows.len(),
        r.max_ratio,
        r.bound,
        r.violations,
        r.skipped.len()
    ));
    for (i, d, why) in &r.skipped {
        o.err(format!("skipped {i} {d}: {why}"));
    }
    if !r.passed() {
        o.code = EXIT_PROPERTY;
    }
    Ok(())
}

fn cmd_report(suite: &str, only: Option<&str>, seed: u64, o: &mut Output) -> Res {
    if suite != "acceptance" {
        return Err(CliError::usage(format!("unknown suite `{suite}` (available: acceptance)")));
    }
    let outcomes = acceptance::run(only, seed).map_err(CliError::usage)?;
    o.out(acceptance::to_tsv(&outcomes));
    for r in &outcomes {
        o.err(format!("{} {:>2} {:<12} {} cases, {} failures", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.cases, r.failures));
    }
    let failed = outcomes.iter().filter(|r| !r.passed).count();
    o.err(format!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len()));
    if failed > 0 {
        o.code = EXIT_PROPERTY;
    }
    Ok(())
}

/// Paths written by `encode`, in order.
pub fn encoding_files(dir: &Path) -> Vec<PathBuf> {
    [SENTENCE, STRUCTURE, DOMAIN, OBJECTIVE, WITNESS, META, INSTANCE].iter().map(|f| dir.join(f)).collect()
}
