//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use xplcheck::ctl::{model_check, oracle_check, CtlFormula, Formula, LabelMap, NodeSet};
use xplcheck::metrics::{self, DegreeHistogram};
use xplcheck::network::{Network, NetworkBuilder};
use xplcheck::xml::Document;
use xplcheck::xpath::{eval_filter, parse_filter};
use xplcheck::xpl::{check, parse_xpl, XplFormula};

use common::*;

const FIDELITY_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_INSTANCES: usize = 1000;
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const PIPELINE_INSTANCES: usize = 200;
const DUALITY_INSTANCES: usize = 500;
const MAX_NODES: usize = 8;
const EDGE_PROBABILITY: f64 = 0.3;
const MAX_DEPTH: usize = 4;
const SCALING_BRACKET: (f64, f64) = (1.3, 3.0);
const SCALING_SMALL_N: usize = 100_000;
const SCALING_LARGE_N: usize = 200_000;
const SCALING_ABSOLUTE_LIMIT: Duration = Duration::from_secs(5);
const LENGTH_SCALING_N: usize = 20_000;
const LENGTH_SCALING_TERMS: usize = 16;
const TIMING_REPEATS: usize = 5;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn keys_of(net: &Network, formula: &str) -> Result<Vec<String>, String> {
    let f = parse_xpl(formula).map_err(|e| e.to_string())?;
    let sat = check(net, &f).map_err(|e| e.to_string())?;
    Ok(sat.keys(net).into_iter().map(str::to_owned).collect())
}

fn worked_examples() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();

    let text = std::fs::read_to_string(fixture("bibitem.xml")).unwrap();
    let doc = Document::parse(&text).unwrap();
    let filter_cases = [
        (
            r#"count(author) = 1 and (year > 2007) and contains(abstract/em, "XML")"#,
            false,
        ),
        (r#"contains(abstract/em, "relational")"#, true),
    ];
    for (f, expected) in filter_cases {
        match parse_filter(f).map(|f| eval_filter(&f, doc.root())) {
            Ok(Ok(got)) if got == expected => {}
            other => failures.push(format!("{f}: {other:?}")),
        }
    }

    // Expected sets come from the independent networkx oracle in
    // fixtures/derive_expected.py.
    let formula_cases: [(&str, &str, &[&str]); 6] = [
        ("web", r#"EX [title = "Google"]"#, &["home", "news"]),
        (
            "citations",
            r#"IEX [(first = "Moshe") and (last = "Vardi")]"#,
            &["clarke", "halpern"],
        ),
        (
            "papers",
            r#"AX [contains(keywords, "network analysis")]"#,
            &["p1", "p2", "p3", "p6", "p7"],
        ),
        (
            "molecules",
            r#"EX [name="ATP"] | EX EX [name="ATP"] | EX EX EX [name="ATP"]"#,
            &["adp", "atp", "f16bp", "f6p", "pep", "pi"],
        ),
        (
            "contacts",
            r#"EF [(first = "Gaetan") and (last = "Dugas")]"#,
            &["dugas", "p01", "p02", "p03", "p05"],
        ),
        (
            "collaboration",
            r#"EU([count(paper) > 100], [(first = "Paul") and (last = "Erdos")])"#,
            &["erdos", "renyi", "turan"],
        ),
    ];
    for (name, formula, expected) in formula_cases {
        match keys_of(&load(name), formula) {
            Ok(got) if got == expected => {}
            other => failures.push(format!("{name}: {other:?}")),
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= FIDELITY_LIMIT {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "2 filters + 6 formulas, {} mismatches, {:.1} ms (limit {:?}){}",
            failures.len(),
            elapsed.as_secs_f64() * 1e3,
            FIDELITY_LIMIT,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn random_instance(rng: &mut StdRng) -> (Network, LabelMap) {
    let n = rng.gen_range(1..=MAX_NODES);
    let directed = rng.gen_bool(0.75);
    let net = random_graph(rng, n, EDGE_PROBABILITY, directed);
    let labels = random_labels(rng, n);
    (net, labels)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x0AC1E);
    let mut agree = 0;
    let mut first_failure = None;
    for _ in 0..ORACLE_INSTANCES {
        let (net, labels) = random_instance(&mut rng);
        let f = random_ctl(&mut rng, MAX_DEPTH);
        let fast = model_check(&net, &labels, &f).unwrap();
        let reference = oracle_check(&net, &labels, &f).unwrap();
        if fast == reference {
            agree += 1;
        } else if first_failure.is_none() {
            first_failure = Some(format!("{f} on {net}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        agree == ORACLE_INSTANCES && elapsed < ORACLE_LIMIT,
        format!(
            "{agree}/{ORACLE_INSTANCES} agree (n <= {MAX_NODES}, p = {EDGE_PROBABILITY}, depth <= {MAX_DEPTH}), {:.2} s (limit {:?}){}",
            elapsed.as_secs_f64(),
            ORACLE_LIMIT,
            first_failure.map(|s| format!("; first mismatch: {s}")).unwrap_or_default()
        ),
    )
}

fn pipeline_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x919E);
    let mut agree = 0;
    let mut first_failure = None;
    for _ in 0..PIPELINE_INSTANCES {
        let n = rng.gen_range(1..=MAX_NODES);
        let directed = rng.gen_bool(0.75);
        let net = random_graph_with(&mut rng, n, EDGE_PROBABILITY, directed, random_payload);
        let f: XplFormula = random_xpl(&mut rng, MAX_DEPTH);
        let modular = check(&net, &f).unwrap();
        let direct = NodeSet::from_bools(InlineEvaluator::new(&net).eval(&f));
        if modular == direct {
            agree += 1;
        } else if first_failure.is_none() {
            first_failure = Some(f.to_string());
        }
    }
    outcome(
        agree == PIPELINE_INSTANCES,
        format!(
            "{agree}/{PIPELINE_INSTANCES} agree with the inline evaluator{}",
            first_failure
                .map(|s| format!("; first mismatch: {s}"))
                .unwrap_or_default()
        ),
    )
}

fn dualities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xD0A1);
    let mut agree = 0;
    let mut first_failure = None;
    for _ in 0..DUALITY_INSTANCES {
        let (net, labels) = random_instance(&mut rng);
        let phi = random_ctl(&mut rng, 3);
        let psi = random_ctl(&mut rng, 3);
        let dir = random_direction(&mut rng);
        let s = |f: CtlFormula| model_check(&net, &labels, &f).unwrap();
        use xplcheck::ctl::{Modality::*, Quantifier::*};
        let m = |q, md, x: &CtlFormula| Formula::Modal(q, dir, md, Box::new(x.clone()));
        let u = |q, a: CtlFormula, b: CtlFormula| Formula::Until(q, dir, Box::new(a), Box::new(b));
        let not = |x: &CtlFormula| Formula::not(x.clone());
        let identities = [
            s(m(All, Next, &phi)) == s(m(Exists, Next, &not(&phi))).complement(),
            s(m(All, Globally, &phi)) == s(m(Exists, Eventually, &not(&phi))).complement(),
            s(m(All, Eventually, &phi)) == s(m(Exists, Globally, &not(&phi))).complement(),
            s(u(All, phi.clone(), psi.clone()))
                == s(u(Exists, not(&psi), Formula::and(not(&phi), not(&psi))))
                    .union(&s(m(Exists, Globally, &not(&psi))))
                    .complement(),
            s(m(Exists, Eventually, &phi)) == s(u(Exists, Formula::True, phi.clone())),
        ];
        if identities.iter().all(|&b| b) {
            agree += 1;
        } else if first_failure.is_none() {
            first_failure = Some(format!("phi = {phi}, psi = {psi}, identities {identities:?}"));
        }
    }
    outcome(
        agree == DUALITY_INSTANCES,
        format!(
            "{agree}/{DUALITY_INSTANCES} instances satisfy all 5 identities{}",
            first_failure
                .map(|s| format!("; first failure: {s}"))
                .unwrap_or_default()
        ),
    )
}

fn chain(n: usize) -> Network {
    let mut b = NetworkBuilder::new(true);
    for i in 0..n {
        let p = if i == n - 1 { 1 } else { 0 };
        b.node_with_content(&format!("c{i:07}"), &format!("<p>{p}</p>"))
            .unwrap();
    }
    for i in 1..n {
        b.edge(format!("c{:07}", i - 1), format!("c{i:07}"), 1.0);
    }
    b.build().unwrap()
}

/// Best-of-`TIMING_REPEATS` wall time of the full three-step check.
fn time_check(net: &Network, f: &XplFormula) -> (Duration, usize) {
    let mut best = Duration::MAX;
    let mut size = 0;
    for _ in 0..TIMING_REPEATS {
        let start = Instant::now();
        size = check(net, f).unwrap().len();
        best = best.min(start.elapsed());
    }
    (best, size)
}

fn disjunction(terms: usize) -> XplFormula {
    let text: Vec<String> = (0..terms).map(|i| format!("EF [p = \"{}\"]", i + 1)).collect();
    parse_xpl(&text.join(" | ")).unwrap()
}

fn linear_scaling() -> Outcome {
    let f = parse_xpl(r#"EF [p = "1"]"#).unwrap();
    let (small, large) = (chain(SCALING_SMALL_N), chain(SCALING_LARGE_N));
    let (t_small, s_small) = time_check(&small, &f);
    let (t_large, s_large) = time_check(&large, &f);
    let size_ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    let sizes_ok = s_small == SCALING_SMALL_N && s_large == SCALING_LARGE_N;

    let net = chain(LENGTH_SCALING_N);
    let (short, long) = (disjunction(LENGTH_SCALING_TERMS), disjunction(2 * LENGTH_SCALING_TERMS));
    let (t_short, _) = time_check(&net, &short);
    let (t_long, _) = time_check(&net, &long);
    let length_ratio = t_long.as_secs_f64() / t_short.as_secs_f64();

    let in_bracket = |r: f64| (SCALING_BRACKET.0..=SCALING_BRACKET.1).contains(&r);
    outcome(
        sizes_ok && in_bracket(size_ratio) && in_bracket(length_ratio) && t_large < SCALING_ABSOLUTE_LIMIT,
        format!(
            "n {}k -> {}k: {:.1} ms -> {:.1} ms, ratio {:.2}; length {} -> {}: {:.1} ms -> {:.1} ms, ratio {:.2}; bracket [{}, {}], limit {:?} at n = {}",
            SCALING_SMALL_N / 1000,
            SCALING_LARGE_N / 1000,
            t_small.as_secs_f64() * 1e3,
            t_large.as_secs_f64() * 1e3,
            size_ratio,
            short.len(),
            long.len(),
            t_short.as_secs_f64() * 1e3,
            t_long.as_secs_f64() * 1e3,
            length_ratio,
            SCALING_BRACKET.0,
            SCALING_BRACKET.1,
            SCALING_ABSOLUTE_LIMIT,
            SCALING_LARGE_N
        ),
    )
}

fn metrics_exactness() -> Outcome {
    let mut failures = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_owned());
        }
    };
    let k3 = load("k3");
    expect(metrics::clustering_coefficient(&k3).value() == 1.0, "C(K3) = 1.0");
    expect(
        metrics::clustering_coefficient(&load("square_diag")).value() == 0.75,
        "C(square+diagonal) = 0.75",
    );
    let kb = load("koenigsberg");
    expect(
        metrics::eulerian_path_exists(&kb) == Ok(false),
        "Koenigsberg has no Eulerian path",
    );
    expect(
        metrics::degree_histogram(&kb) == DegreeHistogram::Undirected([(3, 3), (5, 1)].into()),
        "Koenigsberg degrees {3:3, 5:1}",
    );
    let chain3 = load("chain3");
    expect(metrics::diameter(&chain3) == Ok(2), "chain diameter 2");
    expect(
        metrics::mean_geodesic(&chain3) == Ok(Ratio::new(4, 3)),
        "chain mean geodesic 4/3",
    );

    let r8 = load("random8");
    let dist = all_pairs_bfs(&r8);
    let n = r8.node_count();
    let pairs: Vec<u64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| dist[i][j].expect("fixture is connected"))
        .collect();
    let max = *pairs.iter().max().unwrap();
    let mean = Ratio::new(pairs.iter().sum::<u64>(), pairs.len() as u64);
    expect(metrics::diameter(&r8) == Ok(max), "random8 diameter = BFS oracle");
    expect(
        metrics::mean_geodesic(&r8) == Ok(mean),
        "random8 mean geodesic = BFS oracle",
    );
    outcome(
        failures.is_empty(),
        format!("10 checks, failed: [{}]", failures.join(", ")),
    )
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_xplcheck");
    let mut fixtures: Vec<_> = std::fs::read_dir(fixture(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "xml"))
        .filter(|p| std::fs::read_to_string(p).unwrap().trim_start().starts_with("<network"))
        .collect();
    fixtures.sort();
    let mut runs = 0;
    let mut failures = Vec::new();
    for path in &fixtures {
        let p = path.to_str().unwrap();
        let invocations: Vec<Vec<&str>> = vec![
            vec!["metrics", "--network", p],
            vec!["metrics", "--network", p, "--format", "json"],
            vec!["check", "--network", p, "--formula", "EF [*] | AG !EX true"],
            vec![
                "check",
                "--network",
                p,
                "--formula",
                "IEU(true, [count(*) > 1])",
                "--format",
                "json",
                "--parallel",
                "3",
            ],
            vec!["query", "--network", p, "--filter", "count(*) >= 2"],
        ];
        for args in invocations {
            let a = Command::new(bin).args(&args).output().unwrap();
            let b = Command::new(bin).args(&args).output().unwrap();
            runs += 2;
            if !a.status.success() || a.stdout != b.stdout || a.status != b.status {
                failures.push(format!("{} {}", path.file_name().unwrap().to_string_lossy(), args[0]));
            }
        }
    }
    outcome(
        failures.is_empty() && !fixtures.is_empty(),
        format!(
            "{} fixtures, {runs} runs, byte-identical pairs: {}/{}{}",
            fixtures.len(),
            runs / 2 - failures.len(),
            runs / 2,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; differing: {}", failures.join(", "))
            }
        ),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("worked-example fidelity", worked_examples),
        ("oracle equivalence", oracle_equivalence),
        ("pipeline equivalence", pipeline_equivalence),
        ("duality suite", dualities),
        ("linear scaling", linear_scaling),
        ("metrics exactness", metrics_exactness),
        ("CLI determinism", cli_determinism),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.passed;
        println!(
            "{} {}. {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
