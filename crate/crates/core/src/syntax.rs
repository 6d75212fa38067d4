//! Types shared by the message-aware syntaxes.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// The version string announced on the first line of a message-aware document.
pub const MESSAGES_VERSION: &str = "1.2-messages";

/// The exact first line written by both writers.
pub const VERSION_LINE: &str = "VERSION \"1.2-messages\"\n";

/// Prefix name (without the colon) to namespace IRI.
pub type PrefixMap = BTreeMap<String, String>;

/// Half-open byte range `[start, end)` in the source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ByteSpan {
    pub start: u64,
    pub end: u64,
}

impl ByteSpan {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    UnexpectedToken,
    BadIri,
    BadLiteral,
    VersionMissing,
    VersionUnsupported,
    PredicateBlankNode,
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SyntaxErrorKind::UnexpectedToken => "unexpected token",
            SyntaxErrorKind::BadIri => "bad IRI",
            SyntaxErrorKind::BadLiteral => "bad literal",
            SyntaxErrorKind::VersionMissing => "version missing",
            SyntaxErrorKind::VersionUnsupported => "version unsupported",
            SyntaxErrorKind::PredicateBlankNode => "blank node in predicate position",
        };
        f.write_str(s)
    }
}

/// A parse failure. Line and column are 1-based; the column counts characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct SyntaxError {
    pub line: u64,
    pub column: u64,
    pub offset: u64,
    pub kind: SyntaxErrorKind,
    pub message: String,
}

/// A 1-based line/column plus byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: u64,
    pub column: u64,
    pub offset: u64,
}

impl Position {
    pub const START: Position = Position { line: 1, column: 1, offset: 0 };

    pub(crate) fn error(self, kind: SyntaxErrorKind, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            column: self.column,
            offset: self.offset,
            kind,
            message: message.into(),
        }
    }

    /// Moves past `bytes`, which must start at this position.
    pub(crate) fn advance(&mut self, bytes: &[u8]) {
        for &b in bytes {
            if b == b'\n' {
                self.line += 1;
                self.column = 1;
            } else if b & 0xC0 != 0x80 {
                self.column += 1;
            }
        }
        self.offset += bytes.len() as u64;
    }
}

/// Supported serializations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    TrigMessages,
    NQuadsMessages,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::TrigMessages => "trigm",
            Format::NQuadsMessages => "nqm",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            Format::TrigMessages => "application/trig-messages",
            Format::NQuadsMessages => "application/n-quads-messages",
        }
    }

    pub fn from_name(name: &str) -> Option<Format> {
        match name.to_ascii_lowercase().as_str() {
            "trigm" | "trig-messages" | "application/trig-messages" => Some(Format::TrigMessages),
            "nqm" | "n-quads-messages" | "application/n-quads-messages" => {
                Some(Format::NQuadsMessages)
            }
            _ => None,
        }
    }
}

pub(crate) fn decode_hex(digits: &[u8]) -> Option<char> {
    let s = std::str::from_utf8(digits).ok()?;
    char::from_u32(u32::from_str_radix(s, 16).ok()?)
}
