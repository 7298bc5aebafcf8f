//! End-to-end corpus generation: derive, run, drop errors and duplicates,
//! write records, report statistics.
//!
//! # Corpus format
//!
//! UTF-8 with LF line endings. Each record is the code, a `# output` line,
//! one `# <line>` per printed line, then a blank line.
//!
//! # Stats sidecar
//!
//! With `emit_stats`, `<output>.stats.json` holds the [`CorpusReport`] as
//! JSON: `attempts`, `unique_written`, `duplicates_discarded`,
//! `errors_discarded` (error kind -> count), `per_level` (level -> count),
//! `construct_frequencies` (construct -> fraction), `wall_time_secs`,
//! `dedup_state_bytes`, `peak_working_set_bytes` (null when unknown).

mod fingerprint;
mod pipeline;
mod record;
mod stats;

pub use fingerprint::{fingerprint, Fingerprint};
pub use pipeline::{
    generate_corpus, generate_corpus_with, generate_into, peak_working_set, stats_path, Attempt,
    Generator, PipelineConfig, PipelineError,
};
pub use record::{read_corpus, write_record, CorpusFormatError, Record, StoredRecord};
pub use stats::{
    classify_construct, compute_stats, Construct, ConstructFrequencies, CorpusReport, EmptyCorpus,
};
