use std::fmt;

use super::{ParseError, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest match first.
const SYMBOLS: &[&str] = &[
    "<=>", ":=", "..", "=>", "<=", ">=", "/=", "!=", "/:", "<:", "\\/", "/\\", "||", "(", ")", "{",
    "}", "[", "]", ",", "=", "<", ">", "+", "-", "*", "/", ":", "&", "|", "!",
];

fn unicode_symbol(c: char) -> Option<&'static str> {
    Some(match c {
        '∧' => "&",
        '∨' => "|",
        '¬' => "!",
        '⇒' | '⟹' | '→' => "=>",
        '⇔' | '⟺' => "<=>",
        '∈' => ":",
        '∉' => "/:",
        '⊆' => "<:",
        '∪' => "\\/",
        '∩' => "/\\",
        '≤' => "<=",
        '≥' => ">=",
        '≠' => "/=",
        _ => return None,
    })
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| ParseError::new(span, format!("integer literal `{text}` out of range")))?;
            out.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), span });
            continue;
        }
        if let Some(sym) = unicode_symbol(c) {
            advance(&mut i, &mut line, &mut col, 1);
            out.push(Token { tok: Tok::Sym(sym), span });
            continue;
        }
        let rest = &chars[i..];
        let matched = SYMBOLS.iter().find(|s| {
            let n = s.chars().count();
            rest.len() >= n && s.chars().zip(rest.iter()).all(|(a, b)| a == *b)
        });
        match matched {
            Some(sym) => {
                let sym = if *sym == "!=" { "/=" } else { *sym };
                let n = if sym == "/=" && rest[0] == '!' { 2 } else { sym.chars().count() };
                advance(&mut i, &mut line, &mut col, n);
                out.push(Token { tok: Tok::Sym(sym), span });
            }
            None => return Err(ParseError::new(span, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}

/// Cursor over a token stream shared by the machine and formula parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<Span, ParseError> {
        if self.at_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    pub fn expect_word(&mut self, w: &str) -> Result<Span, ParseError> {
        if self.at_word(w) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.span(), format!("expected {wanted}, found {}", self.peek()))
    }
}
