//! Line-oriented N-Quads 1.1 reader and writer.
//!
//! Triples without a graph label are placed in [`ns::DEFAULT_GRAPH`] so every
//! statement in the store carries a graph.

use super::term::{is_absolute_iri, Literal, Quad, Term};
use crate::ns;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct NQuadsError {
    pub line: usize,
    pub message: String,
}

/// Parses a whole document. Blank lines and `#` comments are skipped.
pub fn parse_document(input: &str) -> Result<Vec<Quad>, NQuadsError> {
    let mut quads = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(quad) = parse_line(line).map_err(|message| NQuadsError {
            line: line_no,
            message,
        })? {
            quads.push(quad);
        }
    }
    Ok(quads)
}

/// Parses one line; `Ok(None)` for blank or comment-only lines.
pub fn parse_line(line: &str) -> Result<Option<Quad>, String> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let s = cur.term()?;
    if s.is_literal() {
        return Err("subject must be an IRI or blank node".into());
    }
    cur.skip_ws();
    let p = cur.term()?;
    if !p.is_iri() {
        return Err("predicate must be an IRI".into());
    }
    cur.skip_ws();
    let o = cur.term()?;
    cur.skip_ws();
    let g = if cur.peek() == Some('.') {
        Term::iri(ns::DEFAULT_GRAPH)
    } else {
        let g = cur.term()?;
        if g.is_literal() {
            return Err("graph label must be an IRI or blank node".into());
        }
        cur.skip_ws();
        g
    };
    if cur.peek() != Some('.') {
        return Err(format!("expected '.' at column {}", cur.column()));
    }
    cur.bump();
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(format!("trailing content at column {}", cur.column()));
    }
    Ok(Some(Quad { s, p, o, g }))
}

/// Serializes quads one statement per line, in the order given.
pub fn write_document<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> String {
    let mut out = String::new();
    for quad in quads {
        out.push_str(&quad.to_nquads());
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        self.src[self.pos..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    fn expect(&mut self, want: char) -> Result<(), String> {
        let col = self.column();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(format!("expected '{want}' at column {col}, found '{c}'")),
            None => Err(format!("expected '{want}' at column {col}, found end of line")),
        }
    }

    fn term(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => Ok(Term::iri(self.iri()?)),
            Some('_') => self.blank(),
            Some('"') => self.literal(),
            Some(c) => Err(format!("unexpected '{c}' at column {}", self.column())),
            None => Err("unexpected end of line".into()),
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        self.expect('<')?;
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => iri.push(self.uchar()?),
                Some(c)
                    if (c as u32) <= 0x20
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return Err(format!("character {c:?} not allowed in IRI"));
                }
                Some(c) => iri.push(c),
                None => return Err("unterminated IRI".into()),
            }
        }
        if !is_absolute_iri(&iri) {
            return Err(format!("IRI is not absolute: <{iri}>"));
        }
        Ok(iri)
    }

    fn uchar(&mut self) -> Result<char, String> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            other => return Err(format!("invalid escape in IRI: {other:?}")),
        };
        self.hex(width)
    }

    fn hex(&mut self, width: usize) -> Result<char, String> {
        let mut code = 0u32;
        for _ in 0..width {
            let digit = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or("invalid hex digit in escape")?;
            code = code * 16 + digit;
        }
        char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
    }

    fn blank(&mut self) -> Result<Term, String> {
        self.expect('_')?;
        self.expect(':')?;
        let label_char = |c: char| c.is_alphanumeric() || matches!(c, '_' | '-');
        let mut label = String::new();
        while let Some(c) = self.peek() {
            // A '.' belongs to the label only when more label follows it.
            if label_char(c) || (c == '.' && !label.is_empty() && self.peek_second().is_some_and(|n| label_char(n) || n == '.')) {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        while label.ends_with('.') {
            label.pop();
            self.pos -= 1;
        }
        if label.is_empty() {
            return Err("empty blank node label".into());
        }
        Ok(Term::blank(label))
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4)?,
                        Some('U') => self.hex(8)?,
                        other => return Err(format!("invalid string escape: {other:?}")),
                    };
                    lexical.push(c);
                }
                Some('\n' | '\r') => return Err("raw line break in literal".into()),
                Some(c) => lexical.push(c),
                None => return Err("unterminated string literal".into()),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut lang = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        lang.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let valid = !lang.is_empty()
                    && lang.split('-').all(|part| !part.is_empty())
                    && lang
                        .split('-')
                        .next()
                        .is_some_and(|p| p.chars().all(|c| c.is_ascii_alphabetic()));
                if !valid {
                    return Err(format!("invalid language tag '@{lang}'"));
                }
                Ok(Term::Literal(Literal {
                    lexical,
                    datatype: ns::rdf("langString"),
                    lang: Some(lang),
                }))
            }
            Some('^') => {
                self.bump();
                self.expect('^')?;
                let datatype = self.iri()?;
                Ok(Term::typed(lexical, datatype))
            }
            _ => Ok(Term::string(lexical)),
        }
    }
}
