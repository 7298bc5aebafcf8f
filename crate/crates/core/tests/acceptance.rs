//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line per criterion and exits non-zero if any failed.
//!
//! `cargo test -p tinypy-core --test acceptance`

mod support;

use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::time::Instant;

use support::{run_python, PyOutcome};
use tinypy_core::corpus::{
    generate_corpus, read_corpus, Construct, CorpusReport, Generator, PipelineConfig,
};
use tinypy_core::derive::{derive, select_level, DerivationConfig, LevelId, RuleCoverage};
use tinypy_core::grammar::{builtin_tinypy, Grammar, Symbol};
use tinypy_core::interp::{run, ErrorKind, Limits};
use tinypy_core::rng::stream;

const SEED: u64 = 20_240_101;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn corpus(
    dir: &Path,
    name: &str,
    target: u64,
    seed: u64,
    workers: usize,
) -> (CorpusReport, Vec<u8>) {
    let mut config = PipelineConfig::new(target, dir.join(name));
    config.derivation.seed = seed;
    config.workers = workers;
    let report = generate_corpus(&config).expect("corpus generation");
    (report, std::fs::read(&config.output_path).unwrap())
}

/// 10,000 snippets all run cleanly, and python3 prints the same bytes.
fn validity(dir: &Path) -> Outcome {
    let (_, bytes) = corpus(dir, "validity.txt", 10_000, SEED, 0);
    let records = read_corpus(std::str::from_utf8(&bytes).unwrap()).map_err(|e| e.to_string())?;
    let mut not_ok = 0;
    for r in &records {
        if run(&r.code, &Limits::default()).as_ref() != Ok(&r.output) {
            not_ok += 1;
        }
    }
    // the whole corpus is the sample
    let codes: Vec<String> = records.iter().map(|r| r.code.clone()).collect();
    let mismatches = run_python(&codes)
        .iter()
        .zip(&records)
        .filter(|(py, r)| **py != PyOutcome::Ok(r.output.clone()))
        .count();
    check(
        records.len() == 10_000 && not_ok == 0 && mismatches == 0,
        format!(
            "{} records, {not_ok} not Ok, {mismatches} of {} differ from python3",
            records.len(),
            codes.len()
        ),
    )
}

/// One 100,000-snippet run feeds uniqueness, construct mix and performance.
fn large_run(dir: &Path) -> (CorpusReport, Vec<u8>, f64) {
    let started = Instant::now();
    let (report, bytes) = corpus(dir, "large.txt", 100_000, SEED, 0);
    (report, bytes, started.elapsed().as_secs_f64())
}

fn uniqueness(bytes: &[u8]) -> Outcome {
    let records = read_corpus(std::str::from_utf8(bytes).unwrap()).map_err(|e| e.to_string())?;
    let distinct: HashSet<&str> = records.iter().map(|r| r.code.as_str()).collect();
    check(
        records.len() == 100_000 && distinct.len() == 100_000,
        format!(
            "{} records, {} distinct code texts",
            records.len(),
            distinct.len()
        ),
    )
}

fn construct_mix(report: &CorpusReport) -> Outcome {
    let expected = [
        (Construct::Assignments, 0.350),
        (Construct::Conditionals, 0.348),
        (Construct::Loops, 0.302),
    ];
    let total: u64 = report.per_level.values().sum();
    let mut ok = total == 100_000;
    let mut parts = Vec::new();
    for (construct, target) in expected {
        // recount from per-level totals rather than trusting the report's fractions
        let count: u64 = report
            .per_level
            .iter()
            .filter(|(level, _)| match construct {
                Construct::Assignments => matches!(level, LevelId::L1_1 | LevelId::L1_2),
                Construct::Conditionals => matches!(level, LevelId::L2_1 | LevelId::L2_2),
                Construct::Loops => matches!(level, LevelId::L3_1 | LevelId::L3_2),
            })
            .map(|(_, n)| n)
            .sum();
        let fraction = count as f64 / total as f64;
        ok &= (fraction - target).abs() <= 0.05;
        parts.push(format!("{construct:?} {fraction:.3} (target {target:.3})"));
    }
    check(ok, parts.join(", "))
}

fn performance(report: &CorpusReport, elapsed: f64) -> Outcome {
    let mb = report.dedup_state_bytes as f64 / 1e6;
    let peak = report
        .peak_working_set_bytes
        .map_or("unknown".to_string(), |b| {
            format!("{:.1} MB", b as f64 / 1e6)
        });
    check(
        report.unique_written == 100_000 && elapsed <= 75.0 && mb <= 50.0,
        format!(
            "100000 unique in {elapsed:.2}s (limit 75s), dedup state {mb:.2} MB (limit 50 MB), peak rss {peak}"
        ),
    )
}

/// Every cleanly running level-3 snippet prints its drawn execution count
/// of lines.
fn loop_law() -> Outcome {
    let mut config = DerivationConfig::default().with_seed(SEED);
    config.level_weights = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
    let generator = Generator::new(builtin_tinypy(), config, Limits::default()).unwrap();
    let mut seen = HashSet::new();
    let (mut checked, mut violations, mut next) = (0, 0, 0);
    while checked < 10_000 {
        for attempt in generator.attempts(next, next + 1024, 0).unwrap() {
            let Ok(output) = attempt.result else { continue };
            if checked == 10_000 || !seen.insert(attempt.program.code.clone()) {
                continue;
            }
            checked += 1;
            let count = attempt.program.loop_execution_count;
            if !matches!(count, Some(2 | 3)) || Some(output.lines().count() as u32) != count {
                violations += 1;
            }
        }
        next += 1024;
    }
    check(
        violations == 0,
        format!("{checked} level-3 snippets, {violations} violations"),
    )
}

/// (rule, alternative) pairs reachable from the start symbol, following the
/// inputs of computed symbols.
fn reachable_pairs(grammar: &Grammar) -> BTreeSet<(String, usize)> {
    let mut rules = BTreeSet::new();
    let mut stack = vec![grammar.start().to_string()];
    while let Some(name) = stack.pop() {
        if !rules.insert(name.clone()) {
            continue;
        }
        if let Some(inputs) = grammar.computed().get(name.as_str()) {
            stack.extend(inputs.iter().map(|i| i.to_string()));
        }
        if let Some(p) = grammar.production(&name) {
            for sym in p.alternatives.iter().flatten() {
                if let Symbol::NonTerminal(n) = sym {
                    stack.push(n.to_string());
                }
            }
        }
    }
    rules
        .into_iter()
        .filter_map(|r| grammar.production(&r).map(|p| (r, p.alternatives.len())))
        .flat_map(|(r, n)| (0..n).map(move |i| (r.clone(), i)))
        .collect()
}

fn coverage() -> Outcome {
    let grammar = builtin_tinypy();
    let config = DerivationConfig::default().with_seed(SEED);
    let mut union = RuleCoverage::new(&grammar);
    for i in 0..100_000 {
        let mut rng = stream(config.seed, i);
        let level = select_level(&config, &mut rng).unwrap();
        union.union_with(
            &derive(&grammar, level, &mut rng, &config)
                .unwrap()
                .rule_coverage,
        );
    }
    let fired: BTreeSet<(String, usize)> = union
        .pairs(&grammar)
        .into_iter()
        .map(|(r, i)| (r.to_string(), i))
        .collect();
    let missed: Vec<String> = reachable_pairs(&grammar)
        .difference(&fired)
        .map(|(r, i)| format!("{r}#{i}"))
        .collect();
    let unfired: Vec<String> = grammar
        .productions()
        .iter()
        .flat_map(|(name, p)| (0..p.alternatives.len()).map(move |i| (name.to_string(), i)))
        .filter(|pair| !fired.contains(pair))
        .map(|(r, _)| r)
        .collect();
    check(
        missed.is_empty() && unfired.iter().all(|r| r == "while"),
        format!(
            "{} pairs fired, reachable misses {missed:?}, never fired {unfired:?}",
            fired.len()
        ),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let (_, a) = corpus(dir, "det_a.txt", 10_000, SEED, 0);
    let (_, b) = corpus(dir, "det_b.txt", 10_000, SEED, 0);
    let (_, one) = corpus(dir, "det_one.txt", 10_000, SEED, 1);
    let (_, four) = corpus(dir, "det_four.txt", 10_000, SEED, 4);
    check(
        a == b && one == four && a == one,
        format!(
            "repeat run identical: {}, 1 vs 4 workers identical: {} ({} bytes)",
            a == b,
            one == four,
            a.len()
        ),
    )
}

/// Level 1.2 failures are only division by zero or overflow, and python3
/// fails on the same snippets.
fn error_handling() -> Outcome {
    let config = DerivationConfig::single_level(LevelId::L1_2).with_seed(SEED);
    let generator = Generator::new(builtin_tinypy(), config, Limits::default()).unwrap();
    let attempts = generator.attempts(0, 10_000, 0).unwrap();
    let failed: Vec<_> = attempts
        .iter()
        .filter_map(|a| a.result.clone().err().map(|e| (a, e)))
        .collect();
    let bad_kind = failed
        .iter()
        .filter(|(_, e)| !matches!(e.kind, ErrorKind::DivisionByZero | ErrorKind::OverflowGuard))
        .count();
    let codes: Vec<String> = failed.iter().map(|(a, _)| a.program.code.clone()).collect();
    let python = run_python(&codes);
    let disagreements = failed
        .iter()
        .zip(&python)
        .filter(|((_, e), py)| match e.kind {
            ErrorKind::DivisionByZero => py.error_kind() != Some(ErrorKind::DivisionByZero),
            _ => matches!(py, PyOutcome::Ok(_)),
        })
        .count();
    let division = failed
        .iter()
        .filter(|(_, e)| e.kind == ErrorKind::DivisionByZero)
        .count();
    check(
        bad_kind == 0 && disagreements == 0,
        format!(
            "10000 attempts, {} discarded ({division} DivisionByZero), {bad_kind} other kinds, {disagreements} python3 disagreements",
            failed.len()
        ),
    )
}

fn main() {
    if !support::python_available() {
        eprintln!("python3 not found; criteria 1 and 8 need it");
    }
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, outcome: Outcome| {
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("[{tag}] {name}: {detail}");
        results.push((name, outcome));
    };

    report("1 validity", validity(dir.path()));
    let (large, bytes, elapsed) = large_run(dir.path());
    report("2 uniqueness", uniqueness(&bytes));
    drop(bytes);
    report("3 construct mix", construct_mix(&large));
    report("4 performance", performance(&large, elapsed));
    report("5 loop-count law", loop_law());
    report("6 grammar coverage", coverage());
    report("7 determinism", determinism(dir.path()));
    report("8 error handling", error_handling());

    let failed = results.iter().filter(|(_, o)| o.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
