//! Argument parsing and dispatch for the `tinypy-gen` binary.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use tinypy_core::corpus::{generate_corpus_with, PipelineConfig, PipelineError};
use tinypy_core::derive::{DerivationConfig, LevelId};
use tinypy_core::grammar::{
    builtin_tinypy, parse_grammar, validate, Grammar, BUILTIN_GRAMMAR_TEXT,
};
use tinypy_core::interp::{run, Limits};
use tinypy_core::rng::DEFAULT_SEED;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_EXHAUSTED: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(
    name = "tinypy-gen",
    version,
    about = "Generate corpora of small executable Python programs"
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Derive, run and deduplicate snippets into a corpus file.
    Generate(GenerateArgs),
    /// Check a grammar file (the builtin grammar if none is given).
    ValidateGrammar { path: Option<PathBuf> },
    /// Write the builtin grammar in the grammar file format.
    DumpGrammar {
        /// Destination file; standard output if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run one snippet through the interpreter and print its output.
    RunSnippet {
        /// Snippet file, or `-` for standard input.
        input: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct GenerateArgs {
    /// Unique snippets to write.
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    pub num_programs: u64,
    #[arg(long, short)]
    pub output: PathBuf,
    /// `all` or one of 1.1, 1.2, 2.1, 2.2, 3.1, 3.2.
    #[arg(long, default_value = "all")]
    pub level: LevelChoice,
    /// 64-bit seed, or `random`.
    #[arg(long, default_value_t = SeedChoice::Fixed(DEFAULT_SEED))]
    pub seed: SeedChoice,
    /// Grammar file to use instead of the builtin grammar.
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    /// Keep duplicate snippets.
    #[arg(long)]
    pub no_dedup: bool,
    /// Print the run report and write `<output>.stats.json`.
    #[arg(long)]
    pub stats: bool,
    /// Print a count / wall time / memory line.
    #[arg(long)]
    pub timing: bool,
    /// Stop after this many consecutive attempts add nothing.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_attempts: u64,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelChoice {
    All,
    Only(LevelId),
}

impl FromStr for LevelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(LevelChoice::All);
        }
        s.parse().map(LevelChoice::Only).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedChoice {
    Fixed(u64),
    Random,
}

impl FromStr for SeedChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "random" {
            return Ok(SeedChoice::Random);
        }
        s.parse()
            .map(SeedChoice::Fixed)
            .map_err(|_| format!("expected a 64-bit integer or `random`, got {s:?}"))
    }
}

impl std::fmt::Display for SeedChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedChoice::Fixed(seed) => write!(f, "{seed}"),
            SeedChoice::Random => f.write_str("random"),
        }
    }
}

/// Parses arguments, not including the program name.
pub fn parse_args<I, T>(argv: I) -> Result<CliArgs, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliArgs::try_parse_from(
        std::iter::once(OsString::from("tinypy-gen")).chain(argv.into_iter().map(Into::into)),
    )
}

/// Runs a parsed command and returns the process exit status.
pub fn run_cli(args: CliArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let status = match args.command {
        Command::Generate(g) => generate(&g, out, err),
        Command::ValidateGrammar { path } => validate_grammar(path.as_deref(), out, err),
        Command::DumpGrammar { output } => dump_grammar(output.as_deref(), out, err),
        Command::RunSnippet { input } => run_snippet(&input, out, err),
    };
    let _ = out.flush();
    status
}

fn load_grammar(path: Option<&Path>, err: &mut dyn Write) -> Result<Grammar, u8> {
    let Some(path) = path else {
        return Ok(builtin_tinypy());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_IO
    })?;
    parse_grammar(&text).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_VALIDATION
    })
}

fn generate(args: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let grammar = match load_grammar(args.grammar.as_deref(), err) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let seed = match args.seed {
        SeedChoice::Fixed(seed) => seed,
        SeedChoice::Random => {
            let seed = rand::random();
            let _ = writeln!(err, "seed: {seed}");
            seed
        }
    };
    let derivation = match args.level {
        LevelChoice::All => DerivationConfig::default(),
        LevelChoice::Only(level) => DerivationConfig::single_level(level),
    }
    .with_seed(seed);

    let mut config = PipelineConfig::new(args.num_programs, &args.output);
    config.derivation = derivation;
    config.max_consecutive_rejections = args.max_attempts;
    config.emit_stats = args.stats;
    config.deduplicate = !args.no_dedup;
    config.workers = args.workers;

    match generate_corpus_with(&grammar, &config) {
        Ok(report) => {
            if args.stats {
                let _ = write!(out, "{report}");
            }
            if args.timing {
                let _ = writeln!(out, "{}", report.timing_line());
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                PipelineError::AttemptsExhausted { report, .. } => {
                    let _ = write!(err, "{report}");
                    EXIT_EXHAUSTED
                }
                PipelineError::Io(_) => EXIT_IO,
                PipelineError::InvalidGrammar(_) | PipelineError::Derive(_) => EXIT_VALIDATION,
                PipelineError::InvalidConfig(_) => EXIT_USAGE,
            }
        }
    }
}

fn validate_grammar(path: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let grammar = match load_grammar(path, err) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let report = validate(&grammar);
    let _ = write!(out, "{report}");
    if report.is_usable() {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

fn dump_grammar(output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let written = match output {
        Some(path) => std::fs::write(path, BUILTIN_GRAMMAR_TEXT),
        None => out.write_all(BUILTIN_GRAMMAR_TEXT.as_bytes()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
    }
}

fn run_snippet(input: &Path, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let source = if input == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(input)
    };
    let source = match source {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", input.display());
            return EXIT_IO;
        }
    };
    // a failing snippet is a normal result, not a tool failure
    let _ = match run(&source, &Limits::default()) {
        Ok(output) => write!(out, "{output}"),
        Err(e) => writeln!(out, "error: {} at line {}", e.kind, e.line),
    };
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generate_args(argv: &[&str]) -> GenerateArgs {
        match parse_args(argv).unwrap().command {
            Command::Generate(g) => g,
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn generate_defaults() {
        let g = generate_args(&[
            "generate",
            "--num-programs",
            "1000",
            "--output",
            "corpus.txt",
        ]);
        assert_eq!(g.num_programs, 1000);
        assert_eq!(g.output, PathBuf::from("corpus.txt"));
        assert_eq!(g.level, LevelChoice::All);
        assert_eq!(g.seed, SeedChoice::Fixed(DEFAULT_SEED));
        assert!(!g.no_dedup && !g.stats && !g.timing);
        assert_eq!(g.max_attempts, 100_000);
        assert_eq!(g.grammar, None);
    }

    #[test]
    fn generate_level_and_seed() {
        let g = generate_args(&[
            "generate",
            "--level",
            "3.1",
            "--num-programs",
            "10",
            "--output",
            "x",
            "--seed",
            "42",
        ]);
        assert_eq!(g.level, LevelChoice::Only(LevelId::L3_1));
        assert_eq!(g.seed, SeedChoice::Fixed(42));
        let g = generate_args(&["generate", "-n", "1", "-o", "x", "--seed", "random"]);
        assert_eq!(g.seed, SeedChoice::Random);
    }

    #[test]
    fn usage_errors() {
        for argv in [
            &["generate"][..],
            &["generate", "--num-programs", "0", "--output", "x"],
            &[
                "generate",
                "--num-programs",
                "5",
                "--output",
                "x",
                "--level",
                "4.2",
            ],
            &[
                "generate",
                "--num-programs",
                "5",
                "--output",
                "x",
                "--seed",
                "-1",
            ],
            &[
                "generate",
                "--num-programs",
                "5",
                "--output",
                "x",
                "--bogus",
            ],
            &["run-snippet"],
            &["frobnicate"],
            &[],
        ] {
            assert!(parse_args(argv).is_err(), "{argv:?} should be rejected");
        }
    }

    #[test]
    fn other_subcommands() {
        assert_eq!(
            parse_args(["run-snippet", "-"]).unwrap().command,
            Command::RunSnippet { input: "-".into() }
        );
        assert_eq!(
            parse_args(["validate-grammar"]).unwrap().command,
            Command::ValidateGrammar { path: None }
        );
        assert_eq!(
            parse_args(["dump-grammar", "-o", "g.bnf"]).unwrap().command,
            Command::DumpGrammar {
                output: Some("g.bnf".into())
            }
        );
    }

    #[test]
    fn run_snippet_reports_errors_on_stdout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.py");
        std::fs::write(&path, "a = 0\nprint(5 / a)\n").unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let status = run_cli(
            parse_args([OsString::from("run-snippet"), path.into()]).unwrap(),
            &mut out,
            &mut err,
        );
        assert_eq!(status, EXIT_OK);
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "error: DivisionByZero at line 2\n"
        );
    }
}
