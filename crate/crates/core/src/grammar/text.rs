//! Grammar file format.
//!
//! ```text
//! # comment
//! @start all
//! @hook expression_identifier
//! @computed final step execution_count
//! <name> ::= alt_1 | alt_2
//!          | alt_3            (continuation lines join the previous rule)
//! ```
//!
//! Inside an alternative, `<name>` refers to a rule, hook, or computed
//! symbol and every other whitespace-separated run is a terminal. Symbols are
//! concatenated with no separator when derived. `""` is the empty
//! alternative. Terminal escapes: `\s` space, `\n`, `\t`, `\\`, `\|`, and
//! `\<`, `\"`, `\#`, `\@` for the literal character; `\u{HEX}` for any other
//! character.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use indexmap::IndexMap;

use super::{Grammar, GrammarError, Production, Symbol};

#[derive(Debug, PartialEq)]
enum Token {
    Name(String),
    Bare(String),
    Bar,
    Empty,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

/// Length in bytes of a `<name>` reference starting at `s`, if there is one.
fn name_ref_len(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('<')?;
    let mut chars = rest.char_indices();
    let (_, first) = chars.next()?;
    if !is_name_start(first) {
        return None;
    }
    for (i, c) in chars {
        if c == '>' {
            return Some(i + 2);
        }
        if !is_name_char(c) {
            return None;
        }
    }
    None
}

fn tokenize_line(line: &str, lineno: usize) -> Result<Vec<Token>, GrammarError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < line.len() {
        let rest = &line[pos..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        if c == '|' {
            tokens.push(Token::Bar);
            pos += 1;
            continue;
        }
        if let Some(len) = name_ref_len(rest) {
            tokens.push(Token::Name(rest[1..len - 1].to_string()));
            pos += len;
            continue;
        }
        if rest.starts_with("\"\"")
            && rest[2..]
                .chars()
                .next()
                .is_none_or(|n| n.is_whitespace() || n == '|')
        {
            tokens.push(Token::Empty);
            pos += 2;
            continue;
        }
        let (text, len) = read_bare(rest, lineno)?;
        tokens.push(Token::Bare(text));
        pos += len;
    }
    Ok(tokens)
}

/// Reads one bare terminal, resolving escapes. Stops at whitespace, `|`, or
/// a `<name>` reference.
fn read_bare(s: &str, lineno: usize) -> Result<(String, usize), GrammarError> {
    let mut out = String::new();
    let mut iter = s.char_indices().peekable();
    while let Some(&(i, c)) = iter.peek() {
        if c.is_whitespace() || c == '|' || (i > 0 && name_ref_len(&s[i..]).is_some()) {
            return Ok((out, i));
        }
        iter.next();
        if c != '\\' {
            out.push(c);
            continue;
        }
        let Some((_, e)) = iter.next() else {
            return Err(GrammarError::syntax(lineno, "dangling escape"));
        };
        match e {
            's' => out.push(' '),
            'n' => out.push('\n'),
            't' => out.push('\t'),
            '\\' | '|' | '<' | '"' | '#' | '@' => out.push(e),
            'u' => {
                let start = i + 2;
                let body = s[start..]
                    .strip_prefix('{')
                    .and_then(|b| b.find('}').map(|end| &b[..end]))
                    .ok_or_else(|| GrammarError::syntax(lineno, "malformed \\u{..} escape"))?;
                let ch = u32::from_str_radix(body, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| GrammarError::syntax(lineno, "invalid \\u{..} code point"))?;
                out.push(ch);
                // skip `{HEX}`
                for _ in 0..body.len() + 2 {
                    iter.next();
                }
            }
            other => {
                return Err(GrammarError::syntax(
                    lineno,
                    format!("unknown escape \\{other}"),
                ))
            }
        }
    }
    Ok((out, s.len()))
}

struct RawRule {
    name: String,
    line: usize,
    tokens: Vec<(Token, usize)>,
}

/// Parses grammar text. The first rule is the start symbol unless `@start`
/// says otherwise.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut rules: Vec<RawRule> = Vec::new();
    let mut start: Option<String> = None;
    let mut hooks: BTreeSet<Arc<str>> = BTreeSet::new();
    let mut computed: IndexMap<Arc<str>, Vec<Arc<str>>> = IndexMap::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(directive) = trimmed.strip_prefix('@') {
            parse_directive(directive, lineno, &mut start, &mut hooks, &mut computed)?;
            continue;
        }
        let tokens = tokenize_line(line, lineno)?;
        match tokens.as_slice() {
            [Token::Name(name), Token::Bare(sep), ..] if sep == "::=" => {
                let name = name.clone();
                let body = tokens.into_iter().skip(2).map(|t| (t, lineno)).collect();
                rules.push(RawRule {
                    name,
                    line: lineno,
                    tokens: body,
                });
            }
            _ => match rules.last_mut() {
                Some(rule) => rule.tokens.extend(tokens.into_iter().map(|t| (t, lineno))),
                None => {
                    return Err(GrammarError::syntax(
                        lineno,
                        "expected a rule of the form <name> ::= ...",
                    ))
                }
            },
        }
    }

    if rules.is_empty() {
        return Err(GrammarError::syntax(1, "no rules"));
    }

    let mut productions: IndexMap<Arc<str>, Production> = IndexMap::new();
    for rule in &rules {
        if productions.contains_key(rule.name.as_str()) {
            return Err(GrammarError::DuplicateRule(rule.name.clone()));
        }
        let alternatives = build_alternatives(rule, &hooks, &computed)?;
        productions.insert(
            Arc::from(rule.name.as_str()),
            Production::new(&rule.name, alternatives),
        );
    }

    let start = start.unwrap_or_else(|| rules[0].name.clone());
    Ok(Grammar::new(productions, &start, hooks, computed))
}

fn parse_directive(
    directive: &str,
    lineno: usize,
    start: &mut Option<String>,
    hooks: &mut BTreeSet<Arc<str>>,
    computed: &mut IndexMap<Arc<str>, Vec<Arc<str>>>,
) -> Result<(), GrammarError> {
    let mut words = directive.split_whitespace();
    let keyword = words.next().unwrap_or("");
    let names: Vec<&str> = words.collect();
    if let Some(bad) = names
        .iter()
        .find(|n| !n.starts_with(is_name_start) || !n.chars().all(is_name_char))
    {
        return Err(GrammarError::syntax(
            lineno,
            format!("invalid name `{bad}`"),
        ));
    }
    match (keyword, names.as_slice()) {
        ("start", [name]) => {
            if start.is_some() {
                return Err(GrammarError::syntax(lineno, "@start given twice"));
            }
            *start = Some(name.to_string());
        }
        ("hook", [_, ..]) => hooks.extend(names.iter().map(|n| Arc::from(*n))),
        ("computed", [name, inputs @ ..]) => {
            computed.insert(
                Arc::from(*name),
                inputs.iter().map(|n| Arc::from(*n)).collect(),
            );
        }
        _ => {
            return Err(GrammarError::syntax(
                lineno,
                format!("malformed directive `@{directive}`"),
            ))
        }
    }
    Ok(())
}

fn build_alternatives(
    rule: &RawRule,
    hooks: &BTreeSet<Arc<str>>,
    computed: &IndexMap<Arc<str>, Vec<Arc<str>>>,
) -> Result<Vec<Vec<Symbol>>, GrammarError> {
    let mut alternatives = Vec::new();
    let mut current: Vec<Symbol> = Vec::new();
    let mut saw_token = false;
    let mut last_line = rule.line;

    let mut finish = |current: &mut Vec<Symbol>, saw_token: bool, line: usize| {
        if !saw_token {
            return Err(GrammarError::syntax(
                line,
                format!(
                    "empty alternative in <{}> (write \"\" for the empty sequence)",
                    rule.name
                ),
            ));
        }
        alternatives.push(std::mem::take(current));
        Ok(())
    };

    for (token, line) in &rule.tokens {
        last_line = *line;
        match token {
            Token::Bar => {
                finish(&mut current, saw_token, *line)?;
                saw_token = false;
            }
            Token::Empty => saw_token = true,
            Token::Bare(text) => {
                saw_token = true;
                current.push(Symbol::terminal(text));
            }
            Token::Name(name) => {
                saw_token = true;
                let sym = if hooks.contains(name.as_str()) {
                    Symbol::hook(name)
                } else if computed.contains_key(name.as_str()) {
                    Symbol::computed(name)
                } else {
                    Symbol::nonterminal(name)
                };
                current.push(sym);
            }
        }
    }
    finish(&mut current, saw_token, last_line)?;
    Ok(alternatives)
}

fn escape_terminal(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, c) in text.char_indices() {
        match c {
            ' ' => out.push_str("\\s"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\\' => out.push_str("\\\\"),
            '|' => out.push_str("\\|"),
            '<' if name_ref_len(&text[i..]).is_some() => out.push_str("\\<"),
            '"' if i == 0 => out.push_str("\\\""),
            '#' | '@' if i == 0 => {
                out.push('\\');
                out.push(c);
            }
            c if c.is_whitespace() || c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Renders a grammar in the text format accepted by [`parse_grammar`].
pub fn serialize_grammar(grammar: &Grammar) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@start {}", grammar.start());
    for hook in grammar.hooks() {
        let _ = writeln!(out, "@hook {hook}");
    }
    for (name, inputs) in grammar.computed() {
        out.push_str("@computed ");
        out.push_str(name);
        for input in inputs {
            out.push(' ');
            out.push_str(input);
        }
        out.push('\n');
    }
    for production in grammar.productions().values() {
        let _ = write!(out, "<{}> ::=", production.lhs);
        for (i, alt) in production.alternatives.iter().enumerate() {
            if i > 0 {
                out.push_str(" |");
            }
            if alt.is_empty() {
                out.push_str(" \"\"");
            }
            for sym in alt {
                out.push(' ');
                match sym {
                    Symbol::Terminal(t) => out.push_str(&escape_terminal(t)),
                    other => {
                        let _ = write!(out, "<{}>", other.text());
                    }
                }
            }
        }
        out.push('\n');
    }
    out
}
