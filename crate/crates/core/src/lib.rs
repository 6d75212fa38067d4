//! Message-bounded RDF datasets: parsing, serialization, logging and replay
//! of RDF messages in TriG-Messages and N-Quads-Messages.

mod chars;
pub mod iso;
pub mod log;
pub mod message;
pub mod nqm;
pub mod profile;
pub mod syntax;
pub mod term;
pub mod trigm;
pub mod vocab;

use std::io::{self, Write};

pub use iso::{message_isomorphic, sequences_isomorphic};
pub use log::{log_create, log_open, IndexRecord, LogError, LogHandle, LogOptions, Mode, Replay};
pub use message::{skolemize, union, Message, MessageError};
pub use nqm::{parse_nqm, write_nqm, NqmReader, NqmRecord};
pub use profile::{check_order, check_order_by, OrderChecker, extract_instant, merge_by_chronology, GraphScope, Instant, Profile, ProfileError, Violation, Which};
pub use syntax::{ByteSpan, Format, PrefixMap, Position, SyntaxError, SyntaxErrorKind, MESSAGES_VERSION};
pub use term::{BlankNode, GraphName, Iri, Literal, Quad, ScopeId, Subject, Term, TermError};
pub use trigm::{parse_trig_message, parse_trigm, parse_trigm_with_prefixes, write_trig_message, write_trigm, ParserEvent, TrigmParser};

/// A writer that counts the bytes passed through it.
pub struct CountingWriter<W> {
    inner: W,
    count: u64,
}

impl<W: Write> CountingWriter<W> {
    pub fn new(inner: W) -> Self {
        CountingWriter { inner, count: 0 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.count += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
