//! N-Quads-Messages: a VERSION line, N-Quads statement lines, `#` comment
//! lines and `MESSAGE` lines that close each message.
//!
//! Every line can be classified by its first token, so the format can be
//! split with line-oriented text tools.

use std::io::{self, BufRead, Write};

use crate::chars::{is_pn_chars, is_pn_chars_u};
use crate::message::Message;
use crate::syntax::{decode_hex, ByteSpan, Position, SyntaxError, SyntaxErrorKind, MESSAGES_VERSION, VERSION_LINE};
use crate::term::{BlankNode, GraphName, Iri, Literal, Quad, Subject, Term};
use crate::CountingWriter;

/// Appends `s` as a quoted N-Quads string, escaping per canonical N-Quads.
pub fn escape_string_into(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{C}' => out.push_str("\\f"),
            c if c < ' ' || c == '\u{7F}' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Serializes one message as its quad lines followed by `MESSAGE\n`.
pub fn write_record(m: &Message, out: &mut Vec<u8>) {
    use std::fmt::Write as _;
    let mut s = String::new();
    for q in m.quads() {
        let _ = writeln!(s, "{q}");
    }
    s.push_str("MESSAGE\n");
    out.extend_from_slice(s.as_bytes());
}

/// Writes a complete N-Quads-Messages document and returns the bytes written.
pub fn write_nqm<'a, W: Write>(messages: impl IntoIterator<Item = &'a Message>, sink: W) -> io::Result<u64> {
    let mut w = CountingWriter::new(sink);
    w.write_all(VERSION_LINE.as_bytes())?;
    let mut buf = Vec::new();
    for m in messages {
        buf.clear();
        write_record(m, &mut buf);
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(w.count())
}

/// A parsed message with the bytes it occupied.
#[derive(Debug)]
pub struct NqmRecord {
    pub message: Message,
    pub span: ByteSpan,
    /// False when the message was closed by end of input instead of `MESSAGE`.
    pub terminated: bool,
}

/// Streaming N-Quads-Messages reader; reads one line at a time.
pub struct NqmReader<R> {
    input: R,
    require_version: bool,
    line: Vec<u8>,
    line_no: u64,
    offset: u64,
    header_done: bool,
    pending: Vec<Quad>,
    has_statement: bool,
    span_start: u64,
    done: bool,
}

impl<R: BufRead> NqmReader<R> {
    pub fn new(input: R) -> Self {
        Self::with_version_check(input, true)
    }

    /// With `require_version` false, a plain N-Quads document is read as one message.
    pub fn with_version_check(input: R, require_version: bool) -> Self {
        NqmReader {
            input,
            require_version,
            line: Vec::new(),
            line_no: 0,
            offset: 0,
            header_done: false,
            pending: Vec::new(),
            has_statement: false,
            span_start: 0,
            done: false,
        }
    }

    /// Quads read for the message in progress.
    pub fn pending_quads(&self) -> usize {
        self.pending.len()
    }

    fn pos(&self, column: u64) -> Position {
        Position { line: self.line_no, column, offset: self.offset }
    }

    fn next_record(&mut self) -> Result<Option<NqmRecord>, SyntaxError> {
        loop {
            self.line.clear();
            let line_start = self.offset;
            let n = self.input.read_until(b'\n', &mut self.line).map_err(|e| {
                self.pos(1).error(SyntaxErrorKind::UnexpectedToken, format!("read error: {e}"))
            })?;
            if n == 0 {
                return self.at_eof();
            }
            self.line_no += 1;
            let mut body: &[u8] = &self.line;
            let mut col_base = 0;
            if line_start == 0 && body.starts_with(b"\xEF\xBB\xBF") {
                body = &body[3..];
                col_base = 3;
            }
            let body = body.strip_suffix(b"\n").unwrap_or(body);
            let body = body.strip_suffix(b"\r").unwrap_or(body);
            let text = std::str::from_utf8(body).map_err(|e| {
                let mut p = self.pos(1);
                p.offset = line_start + col_base + e.valid_up_to() as u64;
                p.error(SyntaxErrorKind::UnexpectedToken, "invalid UTF-8")
            })?;
            let text = text.to_owned();
            let at = Position { line: self.line_no, column: 1, offset: line_start + col_base };
            self.offset += n as u64;
            let line_end = self.offset;
            if let Some(record) = self.classify(&text, at, line_end)? {
                return Ok(Some(record));
            }
        }
    }

    fn classify(&mut self, text: &str, at: Position, line_end: u64) -> Result<Option<NqmRecord>, SyntaxError> {
        let trimmed = text.trim_start_matches([' ', '\t']);
        let indent = (text.len() - trimmed.len()) as u64;
        let at_first = Position { column: at.column + indent, offset: at.offset + indent, ..at };
        let first_word = trimmed.split([' ', '\t', '#']).next().unwrap_or("");

        if !self.header_done {
            self.header_done = true;
            if first_word == "VERSION" {
                let v = parse_version_line(trimmed, at_first)?;
                if self.require_version && v != MESSAGES_VERSION {
                    return Err(at_first.error(SyntaxErrorKind::VersionUnsupported, format!("unsupported version {v:?}")));
                }
                self.span_start = line_end;
                return Ok(None);
            }
            if self.require_version {
                return Err(at_first.error(SyntaxErrorKind::VersionMissing, "expected VERSION \"1.2-messages\" on line 1"));
            }
        }

        if trimmed.is_empty() || trimmed.starts_with('#') {
            return Ok(None);
        }
        match first_word {
            "MESSAGE" => {
                let tail = trimmed["MESSAGE".len()..].trim_start_matches([' ', '\t']);
                if !(tail.is_empty() || tail.starts_with('#')) {
                    let col = at_first.column + (trimmed.len() - tail.len()) as u64;
                    let p = Position { column: col, ..at_first };
                    return Err(p.error(SyntaxErrorKind::UnexpectedToken, "MESSAGE must be alone on its line"));
                }
                Ok(Some(self.close(line_end, true)))
            }
            "VERSION" => Err(at_first.error(SyntaxErrorKind::UnexpectedToken, "VERSION is only allowed on line 1")),
            _ => {
                let quad = QuadLine::new(trimmed, at_first).parse()?;
                self.pending.push(quad);
                self.has_statement = true;
                Ok(None)
            }
        }
    }

    fn close(&mut self, end: u64, terminated: bool) -> NqmRecord {
        let quads = std::mem::take(&mut self.pending);
        let message = Message::new(quads).expect("reader blank nodes are unscoped");
        let span = ByteSpan { start: self.span_start, end };
        self.span_start = end;
        self.has_statement = false;
        NqmRecord { message, span, terminated }
    }

    fn at_eof(&mut self) -> Result<Option<NqmRecord>, SyntaxError> {
        self.done = true;
        if !self.header_done && self.require_version {
            return Err(Position::START.error(SyntaxErrorKind::VersionMissing, "empty document has no VERSION line"));
        }
        if self.has_statement {
            return Ok(Some(self.close(self.offset, false)));
        }
        Ok(None)
    }
}

impl<R: BufRead> Iterator for NqmReader<R> {
    type Item = Result<NqmRecord, SyntaxError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_record() {
            Ok(r) => r.map(Ok),
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Parses a whole N-Quads-Messages document.
pub fn parse_nqm<R: BufRead>(input: R) -> Result<Vec<Message>, SyntaxError> {
    NqmReader::new(input).map(|r| r.map(|r| r.message)).collect()
}

/// Parses the bytes of exactly one record: quad and comment lines closed by a
/// `MESSAGE` line, which may be missing when the record ends the data.
pub fn parse_record(bytes: &[u8]) -> Result<Message, SyntaxError> {
    let mut reader = NqmReader::with_version_check(bytes, false);
    let first = match reader.next() {
        Some(r) => r?,
        None => return Err(Position::START.error(SyntaxErrorKind::UnexpectedToken, "record holds no message")),
    };
    if reader.next().is_some() {
        return Err(Position::START.error(SyntaxErrorKind::UnexpectedToken, "record holds more than one message"));
    }
    Ok(first.message)
}

pub(crate) fn parse_version_line(text: &str, at: Position) -> Result<String, SyntaxError> {
    let rest = text["VERSION".len()..].trim_start_matches([' ', '\t']);
    let bad = || at.error(SyntaxErrorKind::UnexpectedToken, "malformed VERSION line");
    let rest = rest.strip_prefix('"').ok_or_else(bad)?;
    let close = rest.find('"').ok_or_else(bad)?;
    let (version, tail) = rest.split_at(close);
    let tail = tail[1..].trim_start_matches([' ', '\t']);
    if !(tail.is_empty() || tail.starts_with('#')) {
        return Err(bad());
    }
    Ok(version.to_owned())
}

/// Cursor over one quad line.
struct QuadLine<'a> {
    text: &'a str,
    i: usize,
    at: Position,
}

impl<'a> QuadLine<'a> {
    fn new(text: &'a str, at: Position) -> Self {
        QuadLine { text, i: 0, at }
    }

    fn error(&self, kind: SyntaxErrorKind, msg: impl Into<String>) -> SyntaxError {
        let column = self.at.column + self.text[..self.i].chars().count() as u64;
        Position { column, offset: self.at.offset + self.i as u64, ..self.at }.error(kind, msg)
    }

    fn rest(&self) -> &'a str {
        &self.text[self.i..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.i += r.len() - r.trim_start_matches([' ', '\t']).len();
    }

    fn parse(mut self) -> Result<Quad, SyntaxError> {
        let subject = match self.rest().as_bytes().first() {
            Some(b'<') => Subject::Iri(self.iri()?),
            Some(b'_') => Subject::BlankNode(self.blank_node()?),
            _ => return Err(self.error(SyntaxErrorKind::UnexpectedToken, "expected a subject IRI or blank node")),
        };
        self.skip_ws();
        let predicate = match self.rest().as_bytes().first() {
            Some(b'<') => self.iri()?,
            Some(b'_') => return Err(self.error(SyntaxErrorKind::PredicateBlankNode, "a predicate must be an IRI")),
            _ => return Err(self.error(SyntaxErrorKind::UnexpectedToken, "expected a predicate IRI")),
        };
        self.skip_ws();
        let object = match self.rest().as_bytes().first() {
            Some(b'<') => Term::Iri(self.iri()?),
            Some(b'_') => Term::BlankNode(self.blank_node()?),
            Some(b'"') => Term::Literal(self.literal()?),
            _ => return Err(self.error(SyntaxErrorKind::UnexpectedToken, "expected an object")),
        };
        self.skip_ws();
        let graph = match self.rest().as_bytes().first() {
            Some(b'<') => GraphName::Iri(self.iri()?),
            Some(b'_') => GraphName::BlankNode(self.blank_node()?),
            _ => GraphName::DefaultGraph,
        };
        self.skip_ws();
        if !self.rest().starts_with('.') {
            return Err(self.error(SyntaxErrorKind::UnexpectedToken, "expected '.'"));
        }
        self.i += 1;
        self.skip_ws();
        if !self.rest().is_empty() {
            return Err(self.error(SyntaxErrorKind::UnexpectedToken, "unexpected content after '.'"));
        }
        Ok(Quad { subject, predicate, object, graph })
    }

    fn uchar(&mut self, kind: SyntaxErrorKind) -> Result<char, SyntaxError> {
        let r = self.rest().as_bytes();
        let width = match r.get(1) {
            Some(b'u') => 4,
            Some(b'U') => 8,
            _ => return Err(self.error(kind, "invalid escape")),
        };
        let hex = r.get(2..2 + width).filter(|h| h.iter().all(u8::is_ascii_hexdigit));
        let c = hex.and_then(decode_hex).ok_or_else(|| self.error(kind, "invalid \\u escape"))?;
        self.i += 2 + width;
        Ok(c)
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        let start = self.i;
        self.i += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.rest().chars().next() else {
                return Err(self.error(SyntaxErrorKind::BadIri, "unterminated IRI"));
            };
            match c {
                '>' => {
                    self.i += 1;
                    break;
                }
                '\\' => out.push(self.uchar(SyntaxErrorKind::BadIri)?),
                c if crate::chars::is_iri_forbidden(c) => {
                    return Err(self.error(SyntaxErrorKind::BadIri, format!("character {c:?} not allowed in IRI")));
                }
                c => {
                    out.push(c);
                    self.i += c.len_utf8();
                }
            }
        }
        Iri::new(out).map_err(|e| {
            self.i = start;
            self.error(SyntaxErrorKind::BadIri, e.to_string())
        })
    }

    fn blank_node(&mut self) -> Result<BlankNode, SyntaxError> {
        if !self.rest().starts_with("_:") {
            return Err(self.error(SyntaxErrorKind::UnexpectedToken, "expected '_:'"));
        }
        self.i += 2;
        let r = self.rest();
        let mut chars = r.char_indices();
        match chars.next() {
            Some((_, c)) if is_pn_chars_u(c) || c.is_ascii_digit() => {}
            _ => return Err(self.error(SyntaxErrorKind::UnexpectedToken, "invalid blank node label")),
        }
        // A trailing '.' belongs to the statement, not the label.
        let mut end = r.chars().next().map_or(0, char::len_utf8);
        for (k, c) in chars {
            if is_pn_chars(c) {
                end = k + c.len_utf8();
            } else if c != '.' {
                break;
            }
        }
        let label = &r[..end];
        self.i += end;
        Ok(BlankNode::new_unchecked(label.to_owned()))
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        self.i += 1;
        let mut lex = String::new();
        loop {
            let Some(c) = self.rest().chars().next() else {
                return Err(self.error(SyntaxErrorKind::BadLiteral, "unterminated string"));
            };
            match c {
                '"' => {
                    self.i += 1;
                    break;
                }
                '\\' => {
                    let e = self.rest().as_bytes().get(1).copied();
                    let decoded = match e {
                        Some(b't') => '\t',
                        Some(b'b') => '\u{8}',
                        Some(b'n') => '\n',
                        Some(b'r') => '\r',
                        Some(b'f') => '\u{C}',
                        Some(b'"') => '"',
                        Some(b'\'') => '\'',
                        Some(b'\\') => '\\',
                        Some(b'u' | b'U') => {
                            lex.push(self.uchar(SyntaxErrorKind::BadLiteral)?);
                            continue;
                        }
                        _ => return Err(self.error(SyntaxErrorKind::BadLiteral, "invalid escape")),
                    };
                    lex.push(decoded);
                    self.i += 2;
                }
                '\n' | '\r' => return Err(self.error(SyntaxErrorKind::BadLiteral, "raw line break in string")),
                c => {
                    lex.push(c);
                    self.i += c.len_utf8();
                }
            }
        }
        if self.rest().starts_with('@') {
            self.i += 1;
            let r = self.rest();
            let n = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '-')).unwrap_or(r.len());
            let tag = &r[..n];
            let l = Literal::new_language_tagged(lex, tag)
                .map_err(|e| self.error(SyntaxErrorKind::BadLiteral, e.to_string()))?;
            self.i += n;
            return Ok(l);
        }
        if self.rest().starts_with("^^") {
            self.i += 2;
            if !self.rest().starts_with('<') {
                return Err(self.error(SyntaxErrorKind::BadLiteral, "expected datatype IRI after '^^'"));
            }
            let dt = self.iri()?;
            return Literal::new_typed(lex, dt).map_err(|e| self.error(SyntaxErrorKind::BadLiteral, e.to_string()));
        }
        Ok(Literal::new_simple(lex))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(doc: &str) -> Result<Vec<Message>, SyntaxError> {
        parse_nqm(doc.as_bytes())
    }

    #[test]
    fn empty_message_is_one_line() {
        let mut out = Vec::new();
        write_nqm([&Message::empty()], &mut out).unwrap();
        assert_eq!(out, b"VERSION \"1.2-messages\"\nMESSAGE\n");
    }

    #[test]
    fn version_only_document() {
        assert!(parse("VERSION \"1.2-messages\"\n").unwrap().is_empty());
        assert!(parse("VERSION \"1.2-messages\"").unwrap().is_empty());
    }

    #[test]
    fn version_errors() {
        assert_eq!(parse("").unwrap_err().kind, SyntaxErrorKind::VersionMissing);
        let e = parse("<http://a/s> <http://a/p> <http://a/o> .\n").unwrap_err();
        assert_eq!((e.kind, e.line), (SyntaxErrorKind::VersionMissing, 1));
        assert_eq!(parse("VERSION \"1.1\"\n").unwrap_err().kind, SyntaxErrorKind::VersionUnsupported);
    }

    #[test]
    fn lenient_plain_nquads() {
        let doc = "<http://a/s> <http://a/p> \"x\" .\n<http://a/s> <http://a/p> \"y\" <http://a/g> .\n";
        let ms: Vec<_> = NqmReader::with_version_check(doc.as_bytes(), false).collect::<Result<_, _>>().unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].message.len(), 2);
        assert!(!ms[0].terminated);
    }

    #[test]
    fn escapes_round_trip() {
        let tricky = "tab\there \"quoted\" back\\slash\nnl \u{1} \u{7F} é";
        let mut s = String::new();
        escape_string_into(tricky, &mut s);
        assert_eq!(s, "\"tab\\there \\\"quoted\\\" back\\\\slash\\nnl \\u0001 \\u007F é\"");
        let line = format!("<http://a/s> <http://a/p> {s} .");
        let q = QuadLine::new(&line, Position::START).parse().unwrap();
        assert_eq!(q.object.as_literal().unwrap().lexical(), tricky);
    }

    #[test]
    fn errors_carry_positions() {
        let doc = "VERSION \"1.2-messages\"\n<http://a/s> _:p <http://a/o> .\n";
        let e = parse(doc).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (SyntaxErrorKind::PredicateBlankNode, 2, 14));
        let doc = "VERSION \"1.2-messages\"\n<http://a/s> <http://a/p> <http://a/o> . # no\n";
        assert_eq!(parse(doc).unwrap_err().line, 2);
        let doc = "VERSION \"1.2-messages\"\nMESSAGE <http://a/s>\n";
        assert_eq!(parse(doc).unwrap_err().kind, SyntaxErrorKind::UnexpectedToken);
        let doc = "VERSION \"1.2-messages\"\n<rel> <http://a/p> <http://a/o> .\n";
        assert_eq!(parse(doc).unwrap_err().kind, SyntaxErrorKind::BadIri);
    }

    #[test]
    fn crlf_and_comments() {
        let doc = "VERSION \"1.2-messages\"\r\n# c\r\n_:b <http://a/p> \"v\"@en .\r\nMESSAGE # hb\r\n";
        let ms = parse(doc).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].len(), 1);
    }

    #[test]
    fn spans_cover_records() {
        let doc = "VERSION \"1.2-messages\"\n_:b <http://a/p> _:c .\nMESSAGE\nMESSAGE\n";
        let recs: Vec<_> = NqmReader::new(doc.as_bytes()).collect::<Result<_, _>>().unwrap();
        let spans: Vec<_> = recs.iter().map(|r| (r.span.start, r.span.end)).collect();
        assert_eq!(spans, [(23, 54), (54, 62)]);
        assert_eq!(&doc[23..54], "_:b <http://a/p> _:c .\nMESSAGE\n");
    }
}
