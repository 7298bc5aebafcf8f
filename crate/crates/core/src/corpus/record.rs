use std::io::{self, Write};

use thiserror::Error;

use crate::derive::LevelId;

/// One corpus entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub code: String,
    pub output: String,
    pub level: LevelId,
}

/// Appends `record` as its code, a `# output` line, the output lines each
/// prefixed with `# `, and a blank separator line.
pub fn write_record<W: Write + ?Sized>(sink: &mut W, record: &Record) -> io::Result<()> {
    sink.write_all(record.code.as_bytes())?;
    if !record.code.is_empty() && !record.code.ends_with('\n') {
        sink.write_all(b"\n")?;
    }
    sink.write_all(b"# output\n")?;
    for line in record.output.lines() {
        sink.write_all(b"# ")?;
        sink.write_all(line.as_bytes())?;
        sink.write_all(b"\n")?;
    }
    sink.write_all(b"\n")
}

/// A record read back from a corpus file (the level is not stored).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredRecord {
    pub code: String,
    pub output: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed corpus at line {line}: {message}")]
pub struct CorpusFormatError {
    pub line: usize,
    pub message: &'static str,
}

/// Parses a corpus file produced by [`write_record`].
pub fn read_corpus(text: &str) -> Result<Vec<StoredRecord>, CorpusFormatError> {
    enum State {
        Code,
        Output,
    }
    let mut records = Vec::new();
    let mut state = State::Code;
    let mut code = String::new();
    let mut output = String::new();

    for (idx, line) in text.split_inclusive('\n').enumerate() {
        let lineno = idx + 1;
        let Some(line) = line.strip_suffix('\n') else {
            return Err(CorpusFormatError {
                line: lineno,
                message: "missing final newline",
            });
        };
        match state {
            State::Code if line == "# output" => state = State::Output,
            State::Code if line.is_empty() => {
                return Err(CorpusFormatError {
                    line: lineno,
                    message: "blank line inside code",
                })
            }
            State::Code => {
                code.push_str(line);
                code.push('\n');
            }
            State::Output if line.is_empty() => {
                records.push(StoredRecord {
                    code: std::mem::take(&mut code),
                    output: std::mem::take(&mut output),
                });
                state = State::Code;
            }
            State::Output => {
                let Some(value) = line.strip_prefix("# ") else {
                    return Err(CorpusFormatError {
                        line: lineno,
                        message: "output line without `# ` prefix",
                    });
                };
                output.push_str(value);
                output.push('\n');
            }
        }
    }
    if !code.is_empty() || matches!(state, State::Output) {
        return Err(CorpusFormatError {
            line: text.lines().count(),
            message: "truncated record",
        });
    }
    Ok(records)
}
