use super::{ErrorKind, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Int,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
    EqEq,
    Assign,
    LParen,
    RParen,
    Colon,
    Comma,
    And,
    Or,
    Not,
    If,
    Elif,
    Else,
    For,
    In,
    Range,
    Print,
    Newline,
    Indent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// 1-based.
    pub line: usize,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "and" => TokenKind::And,
        "or" => TokenKind::Or,
        "not" => TokenKind::Not,
        "if" => TokenKind::If,
        "elif" => TokenKind::Elif,
        "else" => TokenKind::Else,
        "for" => TokenKind::For,
        "in" => TokenKind::In,
        "range" => TokenKind::Range,
        "print" => TokenKind::Print,
        _ => return None,
    })
}

pub fn tokenize(source: &str) -> Result<Vec<Token<'_>>, RunError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut pos = 0;
    let mut at_line_start = true;

    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        let single = |kind| (kind, 1);
        let (kind, len) = match c {
            b'\t' if at_line_start => single(TokenKind::Indent),
            b' ' | b'\t' => {
                pos += 1;
                continue;
            }
            b'\n' => single(TokenKind::Newline),
            b'0'..=b'9' => {
                let len = bytes[pos..]
                    .iter()
                    .take_while(|b| b.is_ascii_digit())
                    .count();
                (TokenKind::Int, len)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let len = bytes[pos..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                let kind = keyword(&source[pos..pos + len]).unwrap_or(TokenKind::Ident);
                (kind, len)
            }
            b'+' => single(TokenKind::Plus),
            b'-' => single(TokenKind::Minus),
            b'*' => single(TokenKind::Star),
            b'/' => single(TokenKind::Slash),
            b'(' => single(TokenKind::LParen),
            b')' => single(TokenKind::RParen),
            b':' => single(TokenKind::Colon),
            b',' => single(TokenKind::Comma),
            b'<' | b'>' | b'=' | b'!' => {
                let followed_by_eq = bytes.get(pos + 1) == Some(&b'=');
                match (c, followed_by_eq) {
                    (b'<', true) => (TokenKind::Le, 2),
                    (b'>', true) => (TokenKind::Ge, 2),
                    (b'=', true) => (TokenKind::EqEq, 2),
                    (b'!', true) => (TokenKind::Ne, 2),
                    (b'<', false) => single(TokenKind::Lt),
                    (b'>', false) => single(TokenKind::Gt),
                    (b'=', false) => single(TokenKind::Assign),
                    _ => return Err(RunError::new(ErrorKind::ParseError, line)),
                }
            }
            _ => return Err(RunError::new(ErrorKind::ParseError, line)),
        };
        tokens.push(Token {
            kind,
            text: &source[start..start + len],
            line,
        });
        pos += len;
        at_line_start = kind == TokenKind::Newline;
        if kind == TokenKind::Newline {
            line += 1;
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::TokenKind::*;
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn assignment() {
        let toks = tokenize("a = 5\n").unwrap();
        assert_eq!(
            toks.iter().map(|t| t.kind).collect::<Vec<_>>(),
            [Ident, Assign, Int, Newline]
        );
        assert_eq!(toks[0].text, "a");
        assert_eq!(toks[2].text, "5");
    }

    #[test]
    fn negated_condition() {
        assert_eq!(
            kinds("if not (a >= 3) :\n"),
            [If, Not, LParen, Ident, Ge, Int, RParen, Colon, Newline]
        );
    }

    #[test]
    fn unknown_character() {
        assert_eq!(
            tokenize("a $ b").unwrap_err(),
            RunError::new(ErrorKind::ParseError, 1)
        );
        assert_eq!(tokenize("a = 1\nb ? 2\n").unwrap_err().line, 2);
    }

    #[test]
    fn two_char_operators_and_indent() {
        assert_eq!(
            kinds("<= >= != == < > ="),
            [Le, Ge, Ne, EqEq, Lt, Gt, Assign]
        );
        assert_eq!(
            kinds("if a :\n\tprint(a)\n"),
            [If, Ident, Colon, Newline, Indent, Print, LParen, Ident, RParen, Newline]
        );
    }

    #[test]
    fn keywords_are_not_identifiers() {
        assert_eq!(kinds("for i in range"), [For, Ident, In, Range]);
        assert_eq!(kinds("format"), [Ident]);
    }

    #[test]
    fn line_numbers() {
        let toks = tokenize("a = 1\nprint(a)\n").unwrap();
        assert_eq!(toks.last().unwrap().line, 2);
    }
}
