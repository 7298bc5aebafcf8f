use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use super::fingerprint::{fingerprint, Fingerprint};
use super::record::{write_record, Record};
use super::stats::{frequencies_from_counts, CorpusReport};
use crate::derive::{derive, select_level, DerivationConfig, DeriveError, DerivedProgram, LevelId};
use crate::grammar::{validate, Grammar};
use crate::interp::{run, Limits, RunResult};
use crate::rng::stream;

/// Attempts evaluated per parallel batch. Output never depends on it.
const BATCH: u64 = 2048;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub target_count: u64,
    pub derivation: DerivationConfig,
    pub limits: Limits,
    /// Give up after this many attempts in a row add nothing new.
    pub max_consecutive_rejections: u64,
    pub output_path: PathBuf,
    /// Also write `<output_path>.stats.json`.
    pub emit_stats: bool,
    pub deduplicate: bool,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    pub workers: usize,
}

impl PipelineConfig {
    pub fn new(target_count: u64, output_path: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            target_count,
            derivation: DerivationConfig::default(),
            limits: Limits::default(),
            max_consecutive_rejections: 100_000,
            output_path: output_path.into(),
            emit_stats: false,
            deduplicate: true,
            workers: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error("grammar is not usable: {0}")]
    InvalidGrammar(String),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error("{limit} consecutive attempts added nothing new ({} unique snippets written)", .report.unique_written)]
    AttemptsExhausted {
        limit: u64,
        report: Box<CorpusReport>,
    },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// One derivation plus its execution, identified by attempt index.
#[derive(Debug, Clone)]
pub struct Attempt {
    pub index: u64,
    pub program: DerivedProgram,
    pub result: RunResult,
}

/// Derives and runs attempts. Attempt `i` draws from rng stream `i`, so it
/// is the same no matter which thread computes it or in what order.
#[derive(Debug, Clone)]
pub struct Generator {
    grammar: Grammar,
    derivation: DerivationConfig,
    limits: Limits,
}

impl Generator {
    pub fn new(
        grammar: Grammar,
        derivation: DerivationConfig,
        limits: Limits,
    ) -> Result<Self, PipelineError> {
        derivation.validate()?;
        let report = validate(&grammar);
        if !report.is_usable() {
            let errors: Vec<String> = report.errors.iter().map(|e| e.to_string()).collect();
            return Err(PipelineError::InvalidGrammar(errors.join(", ")));
        }
        let levels = grammar
            .start_production()
            .map_or(0, |p| p.alternatives.len());
        if let Some(level) = LevelId::ALL
            .iter()
            .zip(derivation.level_weights)
            .find(|(l, w)| *w > 0.0 && l.index() >= levels)
        {
            return Err(DeriveError::LevelNotInGrammar(*level.0).into());
        }
        Ok(Generator {
            grammar,
            derivation,
            limits,
        })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn attempt(&self, index: u64) -> Result<Attempt, DeriveError> {
        let mut rng = stream(self.derivation.seed, index);
        let level = select_level(&self.derivation, &mut rng)?;
        let program = derive(&self.grammar, level, &mut rng, &self.derivation)?;
        let result = run(&program.code, &self.limits);
        Ok(Attempt {
            index,
            program,
            result,
        })
    }

    /// Attempts `start..end`, in index order.
    pub fn attempts(
        &self,
        start: u64,
        end: u64,
        workers: usize,
    ) -> Result<Vec<Attempt>, DeriveError> {
        self.run_batch(start, end, workers)
    }

    #[cfg(feature = "parallel")]
    fn run_batch(&self, start: u64, end: u64, workers: usize) -> Result<Vec<Attempt>, DeriveError> {
        use rayon::prelude::*;
        if workers == 1 {
            return (start..end).map(|i| self.attempt(i)).collect();
        }
        (start..end)
            .into_par_iter()
            .map(|i| self.attempt(i))
            .collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn run_batch(
        &self,
        start: u64,
        end: u64,
        _workers: usize,
    ) -> Result<Vec<Attempt>, DeriveError> {
        (start..end).map(|i| self.attempt(i)).collect()
    }
}

/// Builds a corpus with the builtin grammar and writes it to
/// `config.output_path`.
pub fn generate_corpus(config: &PipelineConfig) -> Result<CorpusReport, PipelineError> {
    generate_corpus_with(&crate::grammar::builtin_tinypy(), config)
}

/// Like [`generate_corpus`] with a caller-supplied grammar.
pub fn generate_corpus_with(
    grammar: &Grammar,
    config: &PipelineConfig,
) -> Result<CorpusReport, PipelineError> {
    let file = File::create(&config.output_path)?;
    let mut sink = BufWriter::new(file);
    let result = generate_into(grammar, config, &mut sink);
    sink.flush()?;
    let report = result?;
    if config.emit_stats {
        write_stats(&stats_path(&config.output_path), &report)?;
    }
    Ok(report)
}

/// Sidecar location for a corpus file.
pub fn stats_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".stats.json");
    PathBuf::from(name)
}

fn write_stats(path: &Path, report: &CorpusReport) -> Result<(), PipelineError> {
    let json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Core loop: derive, run, filter, deduplicate, write. Commits happen in
/// attempt-index order, so the output is the same for any worker count.
pub fn generate_into<W: Write + ?Sized>(
    grammar: &Grammar,
    config: &PipelineConfig,
    sink: &mut W,
) -> Result<CorpusReport, PipelineError> {
    if config.target_count == 0 {
        return Err(PipelineError::InvalidConfig(
            "target_count must be at least 1".into(),
        ));
    }
    if config.max_consecutive_rejections == 0 {
        return Err(PipelineError::InvalidConfig(
            "max_consecutive_rejections must be at least 1".into(),
        ));
    }
    let generator = Generator::new(grammar.clone(), config.derivation.clone(), config.limits)?;
    let started = Instant::now();
    let pool = worker_pool(config.workers)?;

    let mut seen: HashSet<Fingerprint> = HashSet::new();
    let mut report = CorpusReport::default();
    let mut level_counts: BTreeMap<LevelId, u64> = BTreeMap::new();
    let mut consecutive_rejections = 0u64;
    let mut next = 0u64;

    'outer: loop {
        let batch = match &pool {
            #[cfg(feature = "parallel")]
            Some(pool) => {
                pool.install(|| generator.attempts(next, next + BATCH, config.workers))?
            }
            _ => generator.attempts(next, next + BATCH, config.workers)?,
        };
        next += BATCH;
        for attempt in batch {
            report.attempts += 1;
            let accepted = match attempt.result {
                Err(err) => {
                    *report.errors_discarded.entry(err.kind).or_insert(0) += 1;
                    false
                }
                Ok(output) => {
                    let fresh =
                        !config.deduplicate || seen.insert(fingerprint(&attempt.program.code));
                    if fresh {
                        let record = Record {
                            code: attempt.program.code,
                            output,
                            level: attempt.program.level,
                        };
                        write_record(sink, &record)?;
                        *level_counts.entry(record.level).or_insert(0) += 1;
                        report.unique_written += 1;
                    } else {
                        report.duplicates_discarded += 1;
                    }
                    fresh
                }
            };
            if accepted {
                consecutive_rejections = 0;
                if report.unique_written == config.target_count {
                    break 'outer;
                }
            } else {
                consecutive_rejections += 1;
                if consecutive_rejections >= config.max_consecutive_rejections {
                    finish_report(&mut report, level_counts, &seen, started);
                    return Err(PipelineError::AttemptsExhausted {
                        limit: config.max_consecutive_rejections,
                        report: Box::new(report),
                    });
                }
            }
        }
    }

    finish_report(&mut report, level_counts, &seen, started);
    Ok(report)
}

fn finish_report(
    report: &mut CorpusReport,
    level_counts: BTreeMap<LevelId, u64>,
    seen: &HashSet<Fingerprint>,
    started: Instant,
) {
    report.construct_frequencies = frequencies_from_counts(&level_counts).unwrap_or_default();
    report.per_level = level_counts;
    // hashbrown keeps one control byte per bucket next to each entry
    report.dedup_state_bytes = (seen.capacity() * (std::mem::size_of::<Fingerprint>() + 1)) as u64;
    report.wall_time_secs = started.elapsed().as_secs_f64();
    report.peak_working_set_bytes = peak_working_set();
}

#[cfg(feature = "parallel")]
type WorkerPool = rayon::ThreadPool;
#[cfg(not(feature = "parallel"))]
type WorkerPool = ();

fn worker_pool(workers: usize) -> Result<Option<WorkerPool>, PipelineError> {
    #[cfg(feature = "parallel")]
    if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
        return Ok(Some(pool));
    }
    let _ = workers;
    Ok(None)
}

/// Peak resident set size (`VmHWM`) on Linux.
pub fn peak_working_set() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
