//! Reference-interpreter harness: runs snippets under the system `python3`.

#![allow(dead_code)]

use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value as Json;
use tinypy_core::interp::ErrorKind;

const HARNESS: &str = r#"
import io, json, sys, contextlib
snippets = json.load(sys.stdin)
results = []
for code in snippets:
    out = io.StringIO()
    try:
        with contextlib.redirect_stdout(out):
            exec(compile(code, "<snippet>", "exec"), {})
        results.append({"ok": out.getvalue()})
    except BaseException as e:
        tb = e.__traceback__
        line = getattr(e, "lineno", None)
        while tb is not None:
            if tb.tb_frame.f_code.co_filename == "<snippet>":
                line = tb.tb_lineno
            tb = tb.tb_next
        results.append({"error": type(e).__name__, "line": line})
json.dump(results, sys.stdout)
"#;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PyOutcome {
    Ok(String),
    Raised {
        exception: String,
        line: Option<usize>,
    },
}

impl PyOutcome {
    /// The interpreter error kind this exception corresponds to, if any.
    pub fn error_kind(&self) -> Option<ErrorKind> {
        match self {
            PyOutcome::Ok(_) => None,
            PyOutcome::Raised { exception, .. } => match exception.as_str() {
                "ZeroDivisionError" => Some(ErrorKind::DivisionByZero),
                "NameError" => Some(ErrorKind::UnboundVariable),
                "SyntaxError" | "IndentationError" | "TabError" => Some(ErrorKind::ParseError),
                "OverflowError" => Some(ErrorKind::OverflowGuard),
                _ => None,
            },
        }
    }
}

pub fn python_available() -> bool {
    Command::new("python3")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

/// Runs every snippet in one `python3` process.
pub fn run_python(snippets: &[String]) -> Vec<PyOutcome> {
    let mut child = Command::new("python3")
        .arg("-c")
        .arg(HARNESS)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("python3 must be installed for the reference comparison");
    let input = serde_json::to_vec(snippets).unwrap();
    child.stdin.take().unwrap().write_all(&input).unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success(), "python harness failed");
    let results: Vec<Json> = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(results.len(), snippets.len());
    results
        .into_iter()
        .map(|r| match r.get("ok") {
            Some(out) => PyOutcome::Ok(out.as_str().unwrap().to_string()),
            None => PyOutcome::Raised {
                exception: r["error"].as_str().unwrap().to_string(),
                line: r["line"].as_u64().map(|l| l as usize),
            },
        })
        .collect()
}

/// `repr(float)` for each bit pattern.
pub fn python_float_reprs(bits: &[u64]) -> Vec<String> {
    let script = "import json, struct, sys\n\
                  print(json.dumps([repr(struct.unpack('<d', b.to_bytes(8, 'little'))[0]) for b in json.load(sys.stdin)]))";
    let mut child = Command::new("python3")
        .arg("-c")
        .arg(script)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("python3 must be installed for the reference comparison");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(&serde_json::to_vec(bits).unwrap())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    serde_json::from_slice(&output.stdout).unwrap()
}
