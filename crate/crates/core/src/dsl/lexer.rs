use super::{ParseError, Position, Span};

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(x) => format!("number {x}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(super) fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let error =
        |offset: usize, message: String| ParseError::Syntax { position: Position::locate(source, offset), message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b',' => Some(Tok::Comma),
            b';' => Some(Tok::Semi),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            tokens.push(Token { tok, span: Span { start, end: i } });
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token { tok: Tok::Ident(source[start..i].to_string()), span: Span { start, end: i } });
        } else if c.is_ascii_digit() || c == b'.' {
            let mut digits = 0;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
                digits += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                    digits += 1;
                }
            }
            if digits == 0 {
                return Err(error(start, "expected digits in number".into()));
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                let exp_start = j;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == exp_start {
                    return Err(error(i, "expected digits in exponent".into()));
                }
                i = j;
            }
            let text = &source[start..i];
            let value: f64 = text.parse().map_err(|_| error(start, format!("invalid number `{text}`")))?;
            tokens.push(Token { tok: Tok::Number(value), span: Span { start, end: i } });
        } else if c == b'"' {
            i += 1;
            let mut text = String::new();
            loop {
                let Some(ch) = source[i..].chars().next() else {
                    return Err(error(start, "unterminated string".into()));
                };
                match ch {
                    '"' => {
                        i += 1;
                        break;
                    }
                    '\\' => {
                        let next = source[i + 1..].chars().next();
                        match next {
                            Some(e @ ('"' | '\\')) => text.push(e),
                            _ => return Err(error(i, "invalid escape in string".into())),
                        }
                        i += 2;
                    }
                    '\n' => return Err(error(i, "newline in string".into())),
                    other => {
                        text.push(other);
                        i += other.len_utf8();
                    }
                }
            }
            tokens.push(Token { tok: Tok::Str(text), span: Span { start, end: i } });
        } else {
            let ch = source[i..].chars().next().unwrap_or('?');
            return Err(error(start, format!("unexpected character {ch:?}")));
        }
    }
    tokens.push(Token { tok: Tok::Eof, span: Span { start: source.len(), end: source.len() } });
    Ok(tokens)
}
