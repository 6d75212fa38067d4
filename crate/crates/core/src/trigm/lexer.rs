//! Push tokenizer for TriG-Messages.
//!
//! Bytes are appended with [`Lexer::push`]; [`Lexer::next`] only returns a
//! token once it is certain the token cannot grow any further, so tokens,
//! lines and UTF-8 sequences may be split across chunks arbitrarily.

use crate::chars::{is_pn_chars, is_pn_chars_base, is_pn_chars_u};
use crate::syntax::{decode_hex, Position, SyntaxError, SyntaxErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    BlankNode(String),
    Str(String),
    /// `@` followed by a word: a language tag or `@prefix` / `@base`.
    AtWord(String),
    Integer(String),
    Decimal(String),
    Double(String),
    A,
    True,
    False,
    Prefix,
    Base,
    Graph,
    Version,
    /// `MESSAGE` together with the rest of its line.
    Message,
    Dot,
    Semicolon,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Carets,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
    /// Absolute offset one past the token's last byte.
    pub end: u64,
}

#[derive(Debug)]
pub(crate) enum Lexed {
    Token(Token),
    NeedMore,
    Eof,
}

/// Outcome of scanning at the current position.
enum Scan {
    Done(Tok, usize),
    /// Whitespace or a comment of this many bytes.
    Skip(usize),
    NeedMore,
}

type ScanResult = Result<Scan, SyntaxError>;

#[derive(Debug)]
pub(crate) struct Lexer {
    buf: Vec<u8>,
    cursor: usize,
    pos: Position,
    eof: bool,
}

enum Decoded {
    Char(char, usize),
    Incomplete,
    Invalid,
    End,
}

impl Lexer {
    pub fn new() -> Self {
        Lexer { buf: Vec::new(), cursor: 0, pos: Position::START, eof: false }
    }

    pub fn push(&mut self, bytes: &[u8]) {
        if self.cursor > 0 && self.cursor * 2 >= self.buf.len() {
            self.buf.drain(..self.cursor);
            self.cursor = 0;
        }
        self.buf.extend_from_slice(bytes);
    }

    pub fn set_eof(&mut self) {
        self.eof = true;
    }

    pub fn position(&self) -> Position {
        self.pos
    }

    /// Bytes received but not yet turned into tokens.
    pub fn buffered(&self) -> usize {
        self.buf.len() - self.cursor
    }

    pub fn next(&mut self) -> Result<Lexed, SyntaxError> {
        if self.pos.offset == 0 {
            let rest = &self.buf[self.cursor..];
            const BOM: &[u8] = b"\xEF\xBB\xBF";
            if rest.len() < 3 && !self.eof && BOM.starts_with(rest) {
                return Ok(Lexed::NeedMore);
            }
            if rest.starts_with(BOM) {
                self.consume(3);
            }
        }
        loop {
            if self.cursor == self.buf.len() {
                return Ok(if self.eof { Lexed::Eof } else { Lexed::NeedMore });
            }
            match self.scan()? {
                Scan::Skip(n) => self.consume(n),
                Scan::NeedMore => return Ok(Lexed::NeedMore),
                Scan::Done(tok, n) => {
                    let pos = self.pos;
                    self.consume(n);
                    return Ok(Lexed::Token(Token { tok, pos, end: self.pos.offset }));
                }
            }
        }
    }

    fn consume(&mut self, n: usize) {
        let bytes = &self.buf[self.cursor..self.cursor + n];
        self.pos.advance(bytes);
        self.cursor += n;
    }

    fn rest(&self) -> &[u8] {
        &self.buf[self.cursor..]
    }

    fn byte(&self, i: usize) -> Option<u8> {
        self.rest().get(i).copied()
    }

    /// Position of the byte at relative index `i`, for error reporting.
    fn pos_at(&self, i: usize) -> Position {
        let mut p = self.pos;
        p.advance(&self.rest()[..i.min(self.rest().len())]);
        p
    }

    fn err(&self, i: usize, kind: SyntaxErrorKind, msg: impl Into<String>) -> SyntaxError {
        self.pos_at(i).error(kind, msg)
    }

    fn decode(&self, i: usize) -> Decoded {
        let rest = self.rest();
        let Some(&lead) = rest.get(i) else {
            return Decoded::End;
        };
        let width = match lead {
            0x00..=0x7F => return Decoded::Char(lead as char, 1),
            0xC2..=0xDF => 2,
            0xE0..=0xEF => 3,
            0xF0..=0xF4 => 4,
            _ => return Decoded::Invalid,
        };
        if i + width > rest.len() {
            // a truncated sequence is only incomplete if its bytes so far are plausible
            if rest[i + 1..].iter().all(|b| b & 0xC0 == 0x80) {
                return Decoded::Incomplete;
            }
            return Decoded::Invalid;
        }
        match std::str::from_utf8(&rest[i..i + width]) {
            Ok(s) => Decoded::Char(s.chars().next().unwrap_or('\0'), width),
            Err(_) => Decoded::Invalid,
        }
    }

    /// Result for running off the buffer end while a token may continue.
    fn more_or(&self, done: impl FnOnce() -> ScanResult) -> ScanResult {
        if self.eof {
            done()
        } else {
            Ok(Scan::NeedMore)
        }
    }

    fn scan(&self) -> ScanResult {
        let b = self.rest()[0];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                let n = self.rest().iter().take_while(|b| matches!(b, b' ' | b'\t' | b'\r' | b'\n')).count();
                Ok(Scan::Skip(n))
            }
            b'#' => match self.rest().iter().position(|&b| b == b'\n' || b == b'\r') {
                Some(n) => Ok(Scan::Skip(n)),
                None => self.more_or(|| Ok(Scan::Skip(self.rest().len()))),
            },
            b'<' => self.scan_iri(),
            b'"' | b'\'' => self.scan_string(b),
            b'_' => self.scan_blank_node(),
            b'@' => self.scan_at_word(),
            b'^' => match self.byte(1) {
                Some(b'^') => Ok(Scan::Done(Tok::Carets, 2)),
                Some(_) => Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "expected '^^'")),
                None => self.more_or(|| Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "expected '^^'"))),
            },
            b'.' => match self.byte(1) {
                Some(d) if d.is_ascii_digit() => self.scan_number(),
                Some(_) => Ok(Scan::Done(Tok::Dot, 1)),
                None => self.more_or(|| Ok(Scan::Done(Tok::Dot, 1))),
            },
            b'+' | b'-' | b'0'..=b'9' => self.scan_number(),
            b';' => Ok(Scan::Done(Tok::Semicolon, 1)),
            b',' => Ok(Scan::Done(Tok::Comma, 1)),
            b'[' => Ok(Scan::Done(Tok::LBracket, 1)),
            b']' => Ok(Scan::Done(Tok::RBracket, 1)),
            b'(' => Ok(Scan::Done(Tok::LParen, 1)),
            b')' => Ok(Scan::Done(Tok::RParen, 1)),
            b'{' => Ok(Scan::Done(Tok::LBrace, 1)),
            b'}' => Ok(Scan::Done(Tok::RBrace, 1)),
            b':' => self.scan_name(),
            _ => match self.decode(0) {
                Decoded::Char(c, _) if is_pn_chars_base(c) => self.scan_name(),
                Decoded::Incomplete => self.more_or(|| Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "invalid UTF-8"))),
                Decoded::Invalid => Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "invalid UTF-8")),
                Decoded::Char(c, _) => {
                    Err(self.err(0, SyntaxErrorKind::UnexpectedToken, format!("unexpected character {c:?}")))
                }
                Decoded::End => Ok(Scan::NeedMore),
            },
        }
    }

    /// Reads `\uXXXX` / `\UXXXXXXXX` starting at the backslash.
    fn scan_uchar(&self, i: usize, kind: SyntaxErrorKind) -> Result<Option<(char, usize)>, SyntaxError> {
        let width = match self.byte(i + 1) {
            Some(b'u') => 4,
            Some(b'U') => 8,
            None => return Ok(None),
            Some(_) => return Err(self.err(i, kind, "invalid escape sequence")),
        };
        let rest = self.rest();
        let end = i + 2 + width;
        let available = &rest[(i + 2).min(rest.len())..end.min(rest.len())];
        if !available.iter().all(u8::is_ascii_hexdigit) {
            return Err(self.err(i, kind, "invalid hex digits in escape"));
        }
        if end > rest.len() {
            return Ok(None);
        }
        match decode_hex(&rest[i + 2..end]) {
            Some(c) => Ok(Some((c, 2 + width))),
            None => Err(self.err(i, kind, "escape is not a Unicode scalar value")),
        }
    }

    fn scan_iri(&self) -> ScanResult {
        let mut out = String::new();
        let mut i = 1;
        loop {
            match self.decode(i) {
                Decoded::End | Decoded::Incomplete => {
                    return self.more_or(|| Err(self.err(0, SyntaxErrorKind::BadIri, "unterminated IRI")));
                }
                Decoded::Invalid => return Err(self.err(i, SyntaxErrorKind::BadIri, "invalid UTF-8 in IRI")),
                Decoded::Char('>', _) => return Ok(Scan::Done(Tok::IriRef(out), i + 1)),
                Decoded::Char('\\', _) => match self.scan_uchar(i, SyntaxErrorKind::BadIri)? {
                    Some((c, n)) => {
                        out.push(c);
                        i += n;
                    }
                    None => {
                        return self.more_or(|| Err(self.err(i, SyntaxErrorKind::BadIri, "truncated escape")));
                    }
                },
                Decoded::Char(c, n) => {
                    if crate::chars::is_iri_forbidden(c) {
                        return Err(self.err(i, SyntaxErrorKind::BadIri, format!("character {c:?} not allowed in IRI")));
                    }
                    out.push(c);
                    i += n;
                }
            }
        }
    }

    fn scan_string(&self, quote: u8) -> ScanResult {
        let rest = self.rest();
        let long = match (rest.get(1), rest.get(2)) {
            (Some(&a), Some(&b)) => a == quote && b == quote,
            (Some(&a), None) if a == quote => {
                // either "" or the start of """
                return self.more_or(|| Ok(Scan::Done(Tok::Str(String::new()), 2)));
            }
            (None, _) => {
                return self.more_or(|| Err(self.err(0, SyntaxErrorKind::BadLiteral, "unterminated string")));
            }
            _ => false,
        };
        let mut i = if long { 3 } else { 1 };
        let mut out = String::new();
        loop {
            match self.decode(i) {
                Decoded::End | Decoded::Incomplete => {
                    return self.more_or(|| Err(self.err(0, SyntaxErrorKind::BadLiteral, "unterminated string")));
                }
                Decoded::Invalid => {
                    return Err(self.err(i, SyntaxErrorKind::BadLiteral, "invalid UTF-8 in string"));
                }
                Decoded::Char(c, n) if c as u32 == quote as u32 => {
                    if !long {
                        return Ok(Scan::Done(Tok::Str(out), i + 1));
                    }
                    let next_two = &rest[i + 1..(i + 3).min(rest.len())];
                    if next_two.len() == 2 && next_two.iter().all(|&b| b == quote) {
                        return Ok(Scan::Done(Tok::Str(out), i + 3));
                    }
                    if next_two.len() < 2 && next_two.iter().all(|&b| b == quote) {
                        return self
                            .more_or(|| Err(self.err(0, SyntaxErrorKind::BadLiteral, "unterminated string")));
                    }
                    out.push(c);
                    i += n;
                }
                Decoded::Char('\\', _) => match self.byte(i + 1) {
                    None => {
                        return self.more_or(|| Err(self.err(i, SyntaxErrorKind::BadLiteral, "truncated escape")));
                    }
                    Some(b'u' | b'U') => match self.scan_uchar(i, SyntaxErrorKind::BadLiteral)? {
                        Some((c, n)) => {
                            out.push(c);
                            i += n;
                        }
                        None => {
                            return self
                                .more_or(|| Err(self.err(i, SyntaxErrorKind::BadLiteral, "truncated escape")));
                        }
                    },
                    Some(e) => {
                        let c = match e {
                            b't' => '\t',
                            b'b' => '\u{8}',
                            b'n' => '\n',
                            b'r' => '\r',
                            b'f' => '\u{C}',
                            b'"' => '"',
                            b'\'' => '\'',
                            b'\\' => '\\',
                            _ => {
                                return Err(self.err(i, SyntaxErrorKind::BadLiteral, "invalid escape sequence"));
                            }
                        };
                        out.push(c);
                        i += 2;
                    }
                },
                Decoded::Char(c @ ('\n' | '\r'), _) if !long => {
                    return Err(self.err(i, SyntaxErrorKind::BadLiteral, format!("raw {c:?} in short string")));
                }
                Decoded::Char(c, n) => {
                    out.push(c);
                    i += n;
                }
            }
        }
    }

    /// Scans `(PN_CHARS | '.')*` after a first character, dropping trailing dots.
    /// Returns the end index, or `None` if more input is needed.
    fn scan_dotted_chars(&self, mut i: usize, kind: SyntaxErrorKind) -> Result<Option<usize>, SyntaxError> {
        let mut last_good = i;
        loop {
            match self.decode(i) {
                Decoded::Char('.', 1) => i += 1,
                Decoded::Char(c, n) if is_pn_chars(c) => {
                    i += n;
                    last_good = i;
                }
                Decoded::Char(..) => return Ok(Some(last_good)),
                Decoded::End | Decoded::Incomplete => {
                    return if self.eof { Ok(Some(last_good)) } else { Ok(None) };
                }
                Decoded::Invalid => return Err(self.err(i, kind, "invalid UTF-8")),
            }
        }
    }

    fn scan_blank_node(&self) -> ScanResult {
        let bad = |s: &Self| Err(s.err(0, SyntaxErrorKind::UnexpectedToken, "expected blank node label '_:'"));
        match self.byte(1) {
            None => return self.more_or(|| bad(self)),
            Some(b':') => {}
            Some(_) => return bad(self),
        }
        let first = match self.decode(2) {
            Decoded::Char(c, n) if is_pn_chars_u(c) || c.is_ascii_digit() => n,
            Decoded::End | Decoded::Incomplete => {
                return self.more_or(|| Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "empty blank node label")));
            }
            _ => return Err(self.err(2, SyntaxErrorKind::UnexpectedToken, "invalid blank node label")),
        };
        match self.scan_dotted_chars(2 + first, SyntaxErrorKind::UnexpectedToken)? {
            None => Ok(Scan::NeedMore),
            Some(end) => {
                let label = String::from_utf8(self.rest()[2..end].to_vec()).unwrap_or_default();
                Ok(Scan::Done(Tok::BlankNode(label), end))
            }
        }
    }

    fn scan_at_word(&self) -> ScanResult {
        let rest = self.rest();
        let mut i = 1;
        let mut segment_start = true;
        let mut first_segment = true;
        loop {
            match rest.get(i) {
                None if !self.eof => return Ok(Scan::NeedMore),
                Some(b) if b.is_ascii_alphabetic() || (!first_segment && b.is_ascii_digit()) => {
                    segment_start = false;
                    i += 1;
                }
                Some(b'-') if !segment_start => {
                    segment_start = true;
                    first_segment = false;
                    i += 1;
                }
                _ => {
                    if segment_start {
                        return Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "invalid language tag or directive"));
                    }
                    let word = String::from_utf8(rest[1..i].to_vec()).unwrap_or_default();
                    return Ok(Scan::Done(Tok::AtWord(word), i));
                }
            }
        }
    }

    fn scan_number(&self) -> ScanResult {
        let rest = self.rest();
        let eof = self.eof;
        let digits = |from: usize| rest[from..].iter().take_while(|b| b.is_ascii_digit()).count();
        let mut i = 0;
        if matches!(rest[0], b'+' | b'-') {
            i = 1;
        }
        let int_digits = digits(i);
        i += int_digits;
        if i == rest.len() && !eof {
            return Ok(Scan::NeedMore);
        }
        let mut frac_digits = 0;
        let mut is_decimal = false;
        if rest.get(i) == Some(&b'.') {
            match rest.get(i + 1) {
                None if !eof => return Ok(Scan::NeedMore),
                Some(d) if d.is_ascii_digit() => {
                    frac_digits = digits(i + 1);
                    i += 1 + frac_digits;
                    is_decimal = true;
                    if i == rest.len() && !eof {
                        return Ok(Scan::NeedMore);
                    }
                }
                Some(b'e' | b'E') if int_digits > 0 => {
                    // `1.e5`, but only if an exponent really follows
                    match exponent_len(&rest[i + 1..], eof) {
                        None => return Ok(Scan::NeedMore),
                        Some(0) => {}
                        Some(n) => {
                            let lex = String::from_utf8(rest[..i + 1 + n].to_vec()).unwrap_or_default();
                            return Ok(Scan::Done(Tok::Double(lex), i + 1 + n));
                        }
                    }
                }
                _ => {}
            }
        }
        if int_digits == 0 && frac_digits == 0 {
            return Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "expected a number"));
        }
        if matches!(rest.get(i), Some(b'e' | b'E')) {
            match exponent_len(&rest[i..], eof) {
                None => return Ok(Scan::NeedMore),
                Some(0) => {}
                Some(n) => {
                    let lex = String::from_utf8(rest[..i + n].to_vec()).unwrap_or_default();
                    return Ok(Scan::Done(Tok::Double(lex), i + n));
                }
            }
        }
        let lex = String::from_utf8(rest[..i].to_vec()).unwrap_or_default();
        let tok = if is_decimal { Tok::Decimal(lex) } else { Tok::Integer(lex) };
        Ok(Scan::Done(tok, i))
    }

    /// Prefixed names, `a`, `true`/`false` and the bare keywords.
    fn scan_name(&self) -> ScanResult {
        // PN_PREFIX (may be empty when the name starts with ':')
        let prefix_end = if self.rest()[0] == b':' {
            0
        } else {
            let first = match self.decode(0) {
                Decoded::Char(c, n) if is_pn_chars_base(c) => n,
                _ => return Err(self.err(0, SyntaxErrorKind::UnexpectedToken, "invalid name")),
            };
            match self.scan_dotted_chars(first, SyntaxErrorKind::UnexpectedToken)? {
                None => return Ok(Scan::NeedMore),
                Some(end) => end,
            }
        };
        let rest = self.rest();
        let word = std::str::from_utf8(&rest[..prefix_end]).unwrap_or_default();
        if rest.get(prefix_end) != Some(&b':') {
            if prefix_end == rest.len() && !self.eof {
                return Ok(Scan::NeedMore);
            }
            return self.keyword(word, prefix_end);
        }
        let prefix = word.to_owned();
        let (local, end) = match self.scan_local(prefix_end + 1)? {
            None => return Ok(Scan::NeedMore),
            Some(v) => v,
        };
        Ok(Scan::Done(Tok::PName { prefix, local }, end))
    }

    fn keyword(&self, word: &str, len: usize) -> ScanResult {
        let tok = match word {
            "a" => Tok::A,
            "true" => Tok::True,
            "false" => Tok::False,
            "MESSAGE" => return self.scan_message_line(len),
            w if w.eq_ignore_ascii_case("PREFIX") => Tok::Prefix,
            w if w.eq_ignore_ascii_case("BASE") => Tok::Base,
            w if w.eq_ignore_ascii_case("GRAPH") => Tok::Graph,
            w if w.eq_ignore_ascii_case("VERSION") => Tok::Version,
            w => {
                return Err(self.err(0, SyntaxErrorKind::UnexpectedToken, format!("unknown keyword {w:?}")));
            }
        };
        Ok(Scan::Done(tok, len))
    }

    /// `MESSAGE` may only be followed by blanks and a comment up to the newline.
    fn scan_message_line(&self, mut i: usize) -> ScanResult {
        let rest = self.rest();
        while let Some(b) = rest.get(i) {
            match b {
                b' ' | b'\t' | b'\r' => i += 1,
                b'\n' => return Ok(Scan::Done(Tok::Message, i + 1)),
                b'#' => match rest[i..].iter().position(|&b| b == b'\n') {
                    Some(n) => return Ok(Scan::Done(Tok::Message, i + n + 1)),
                    None => return self.more_or(|| Ok(Scan::Done(Tok::Message, rest.len()))),
                },
                _ => {
                    return Err(self.err(
                        i,
                        SyntaxErrorKind::UnexpectedToken,
                        "MESSAGE must be the only statement on its line",
                    ));
                }
            }
        }
        self.more_or(|| Ok(Scan::Done(Tok::Message, rest.len())))
    }

    /// PN_LOCAL, starting right after the colon. Escapes are decoded,
    /// percent-encodings kept verbatim, trailing dots left for the next token.
    fn scan_local(&self, start: usize) -> Result<Option<(String, usize)>, SyntaxError> {
        let rest = self.rest();
        let mut out = String::new();
        let mut i = start;
        // (byte end, out length) after the last character that may end a name
        let mut good = (start, 0);
        let mut first = true;
        loop {
            match self.decode(i) {
                Decoded::Char('%', 1) => {
                    let hex = &rest[i + 1..(i + 3).min(rest.len())];
                    if !hex.iter().all(u8::is_ascii_hexdigit) {
                        return Err(self.err(i, SyntaxErrorKind::UnexpectedToken, "invalid percent encoding"));
                    }
                    if hex.len() < 2 {
                        return if self.eof {
                            Err(self.err(i, SyntaxErrorKind::UnexpectedToken, "invalid percent encoding"))
                        } else {
                            Ok(None)
                        };
                    }
                    out.push_str(std::str::from_utf8(&rest[i..i + 3]).unwrap_or_default());
                    i += 3;
                    good = (i, out.len());
                }
                Decoded::Char('\\', 1) => match rest.get(i + 1) {
                    None if !self.eof => return Ok(None),
                    Some(&e) if b"_~.-!$&'()*+,;=/?#@%".contains(&e) => {
                        out.push(e as char);
                        i += 2;
                        good = (i, out.len());
                    }
                    _ => return Err(self.err(i, SyntaxErrorKind::UnexpectedToken, "invalid local name escape")),
                },
                Decoded::Char('.', 1) if !first => {
                    out.push('.');
                    i += 1;
                }
                Decoded::Char(c, n)
                    if c == ':' || is_pn_chars(c) && (!first || is_pn_chars_u(c) || c.is_ascii_digit()) =>
                {
                    out.push(c);
                    i += n;
                    good = (i, out.len());
                }
                Decoded::Char(..) => break,
                Decoded::End | Decoded::Incomplete => {
                    if !self.eof {
                        return Ok(None);
                    }
                    break;
                }
                Decoded::Invalid => return Err(self.err(i, SyntaxErrorKind::UnexpectedToken, "invalid UTF-8")),
            }
            first = false;
        }
        out.truncate(good.1);
        Ok(Some((out, good.0)))
    }
}

/// Length of `[eE][+-]?[0-9]+` at the start of `s`; `Some(0)` if absent,
/// `None` if the buffer ends before that can be decided.
fn exponent_len(s: &[u8], eof: bool) -> Option<usize> {
    let mut i = 1;
    if matches!(s.get(1), Some(b'+' | b'-')) {
        i = 2;
    }
    let n = s[i.min(s.len())..].iter().take_while(|b| b.is_ascii_digit()).count();
    if i + n == s.len() && !eof {
        return None;
    }
    Some(if n == 0 { 0 } else { i + n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex_all(input: &str) -> Vec<Tok> {
        let mut lx = Lexer::new();
        lx.push(input.as_bytes());
        lx.set_eof();
        let mut out = Vec::new();
        loop {
            match lx.next().unwrap() {
                Lexed::Token(t) => out.push(t.tok),
                Lexed::Eof => return out,
                Lexed::NeedMore => panic!("need more at eof"),
            }
        }
    }

    fn lex_bytewise(input: &str) -> Vec<Tok> {
        let mut lx = Lexer::new();
        let mut out = Vec::new();
        for b in input.as_bytes() {
            lx.push(std::slice::from_ref(b));
            while let Lexed::Token(t) = lx.next().unwrap() {
                out.push(t.tok);
            }
        }
        lx.set_eof();
        while let Lexed::Token(t) = lx.next().unwrap() {
            out.push(t.tok);
        }
        out
    }

    #[test]
    fn numbers_and_dots() {
        use Tok::*;
        assert_eq!(lex_all("22 ."), [Integer("22".into()), Dot]);
        assert_eq!(lex_all("21.4 ."), [Decimal("21.4".into()), Dot]);
        assert_eq!(lex_all("22."), [Integer("22".into()), Dot]);
        assert_eq!(lex_all("1e5 -2.5E-3 1.e2 .5"), [
            Double("1e5".into()),
            Double("-2.5E-3".into()),
            Double("1.e2".into()),
            Decimal(".5".into())
        ]);
    }

    #[test]
    fn names_and_keywords() {
        use Tok::*;
        assert_eq!(lex_all("ex:a. a true MESSAGE\n"), [
            PName { prefix: "ex".into(), local: "a".into() },
            Dot,
            A,
            True,
            Message
        ]);
        assert_eq!(lex_all(":x\\-y%20 :"), [
            PName { prefix: "".into(), local: "x-y%20".into() },
            PName { prefix: "".into(), local: "".into() }
        ]);
        assert_eq!(lex_all("_:b0."), [BlankNode("b0".into()), Dot]);
        assert_eq!(lex_all("prefix PREFIX Graph"), [Prefix, Prefix, Graph]);
    }

    #[test]
    fn strings() {
        use Tok::*;
        assert_eq!(lex_all(r#""a\"b" 'c' "" """x""y""" "éé"@fr-CA"#), [
            Str("a\"b".into()),
            Str("c".into()),
            Str("".into()),
            Str("x\"\"y".into()),
            Str("éé".into()),
            AtWord("fr-CA".into())
        ]);
    }

    #[test]
    fn message_keyword_needs_its_own_line() {
        let mut lx = Lexer::new();
        lx.push(b"MESSAGE ex:a");
        lx.set_eof();
        let e = lx.next().unwrap_err();
        assert_eq!(e.kind, SyntaxErrorKind::UnexpectedToken);
        assert_eq!(e.column, 9);
    }

    #[test]
    fn message_waits_for_newline() {
        let mut lx = Lexer::new();
        lx.push(b"MESSAGE # heartbeat");
        assert!(matches!(lx.next().unwrap(), Lexed::NeedMore));
        lx.push(b"\n");
        assert!(matches!(lx.next().unwrap(), Lexed::Token(Token { tok: Tok::Message, end: 20, .. })));
    }

    #[test]
    fn bytewise_matches_whole() {
        let doc = "VERSION \"1.2-messages\" # c\n@prefix ex: <http://ex.org/> .\n_:b0 ex:p \"é\\n\"@en, 1.5e3, -7, .5 ; a ex:C .\nMESSAGE\n<http://x/\\u00E9> { [ ex:q ( 1 2 ) ] } ";
        assert_eq!(lex_bytewise(doc), lex_all(doc));
    }

    #[test]
    fn bom_is_skipped() {
        assert_eq!(lex_bytewise("\u{FEFF}ex:a"), [Tok::PName { prefix: "ex".into(), local: "a".into() }]);
    }
}
