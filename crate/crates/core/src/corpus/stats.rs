use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::Record;
use crate::derive::LevelId;
use crate::interp::ErrorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Construct {
    Assignments,
    Conditionals,
    Loops,
}

impl Construct {
    pub const ALL: [Construct; 3] = [
        Construct::Assignments,
        Construct::Conditionals,
        Construct::Loops,
    ];
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Level 1 is assignments, level 2 conditionals, level 3 loops.
pub fn classify_construct(level: LevelId) -> Construct {
    match level {
        LevelId::L1_1 | LevelId::L1_2 => Construct::Assignments,
        LevelId::L2_1 | LevelId::L2_2 => Construct::Conditionals,
        LevelId::L3_1 | LevelId::L3_2 => Construct::Loops,
    }
}

pub type ConstructFrequencies = BTreeMap<Construct, f64>;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot compute frequencies of an empty corpus")]
pub struct EmptyCorpus;

/// Fraction of records per construct; every construct has an entry.
pub fn compute_stats<'a, I>(records: I) -> Result<ConstructFrequencies, EmptyCorpus>
where
    I: IntoIterator<Item = &'a Record>,
{
    frequencies_from_levels(records.into_iter().map(|r| r.level))
}

fn frequencies_from_levels(
    levels: impl IntoIterator<Item = LevelId>,
) -> Result<ConstructFrequencies, EmptyCorpus> {
    let mut counts: BTreeMap<LevelId, u64> = BTreeMap::new();
    for level in levels {
        *counts.entry(level).or_insert(0) += 1;
    }
    frequencies_from_counts(&counts)
}

pub(crate) fn frequencies_from_counts(
    per_level: &BTreeMap<LevelId, u64>,
) -> Result<ConstructFrequencies, EmptyCorpus> {
    let mut counts = [0u64; 3];
    for (level, n) in per_level {
        counts[classify_construct(*level) as usize] += n;
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(EmptyCorpus);
    }
    Ok(Construct::ALL
        .into_iter()
        .map(|c| (c, counts[c as usize] as f64 / total as f64))
        .collect())
}

/// Outcome of a corpus run. Serialized as the stats sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub attempts: u64,
    pub unique_written: u64,
    pub duplicates_discarded: u64,
    pub errors_discarded: BTreeMap<ErrorKind, u64>,
    pub per_level: BTreeMap<LevelId, u64>,
    pub construct_frequencies: ConstructFrequencies,
    pub wall_time_secs: f64,
    /// Bytes held by the fingerprint set at the end of the run.
    pub dedup_state_bytes: u64,
    /// Peak resident set of the process, where the OS reports it.
    pub peak_working_set_bytes: Option<u64>,
}

impl CorpusReport {
    pub fn total_errors(&self) -> u64 {
        self.errors_discarded.values().sum()
    }

    /// One-line summary in the shape of a (count, time, memory) table row.
    pub fn timing_line(&self) -> String {
        let memory = match self.peak_working_set_bytes {
            Some(b) => format!("{:.1} MB", b as f64 / 1e6),
            None => "n/a".to_string(),
        };
        format!(
            "programs: {}  time: {:.2}s  memory: {}  dedup state: {:.1} MB",
            self.unique_written,
            self.wall_time_secs,
            memory,
            self.dedup_state_bytes as f64 / 1e6
        )
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attempts: {}", self.attempts)?;
        writeln!(f, "unique written: {}", self.unique_written)?;
        writeln!(f, "duplicates discarded: {}", self.duplicates_discarded)?;
        write!(f, "errors discarded: {}", self.total_errors())?;
        for (kind, n) in &self.errors_discarded {
            write!(f, " {kind}={n}")?;
        }
        writeln!(f)?;
        write!(f, "per level:")?;
        for (level, n) in &self.per_level {
            write!(f, " {level}={n}")?;
        }
        writeln!(f)?;
        write!(f, "construct frequencies:")?;
        for (construct, frac) in &self.construct_frequencies {
            write!(f, " {construct}={frac:.3}")?;
        }
        writeln!(f)
    }
}
