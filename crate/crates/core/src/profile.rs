//! Message profiles: which predicate orders a stream chronologically, which
//! one orders versions, and operations built on that choice.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use chrono::{DateTime, Duration, FixedOffset, NaiveDate, NaiveTime, TimeZone, Utc};

use crate::message::Message;
use crate::term::{GraphName, Iri, Term};
use crate::vocab::xsd;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("message carries two different timestamps: {first} and {second}")]
    AmbiguousTimestamp { first: String, second: String },
    #[error("invalid xsd:dateTime {0:?}")]
    BadDatetime(String),
    #[error("message {seq}: {source}")]
    InMessage { seq: u64, source: Box<ProfileError> },
    #[error("stream {stream} goes back in time from {previous} to {next}")]
    UnorderedInput { stream: usize, previous: String, next: String },
    #[error("profile config line {line}: {message}")]
    Config { line: usize, message: String },
}

/// Which quads count when looking for ordering metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphScope {
    #[default]
    DefaultGraphOnly,
    AllGraphs,
}

/// Selects the predicate `extract_instant` looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Chronology,
    Version,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub name: String,
    pub chronology_predicate: Iri,
    pub version_predicate: Option<Iri>,
    pub graph_scope: GraphScope,
}

impl Profile {
    pub fn new(name: impl Into<String>, chronology_predicate: Iri) -> Self {
        Profile { name: name.into(), chronology_predicate, version_predicate: None, graph_scope: GraphScope::default() }
    }

    pub fn with_version_predicate(mut self, iri: Iri) -> Self {
        self.version_predicate = Some(iri);
        self
    }

    pub fn with_graph_scope(mut self, scope: GraphScope) -> Self {
        self.graph_scope = scope;
        self
    }

    /// Reads `key=value` lines: `chronology`, `version`, `scope` (`default` or
    /// `all`) and optionally `name`. Blank lines and `#` comments are ignored.
    /// IRIs may be written bare or in angle brackets.
    pub fn from_config(default_name: &str, text: &str) -> Result<Profile, ProfileError> {
        let mut name = default_name.to_owned();
        let mut chronology = None;
        let mut version = None;
        let mut scope = GraphScope::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let err = |message: String| ProfileError::Config { line, message };
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (key, value) = l.split_once('=').ok_or_else(|| err(format!("expected key=value, got {l:?}")))?;
            let value = value.trim();
            let iri = || {
                let bare = value.strip_prefix('<').and_then(|v| v.strip_suffix('>')).unwrap_or(value);
                Iri::new(bare).map_err(|e| err(format!("{e}: {bare:?}")))
            };
            match key.trim() {
                "name" => name = value.to_owned(),
                "chronology" => chronology = Some(iri()?),
                "version" => version = Some(iri()?),
                "scope" => {
                    scope = match value {
                        "default" => GraphScope::DefaultGraphOnly,
                        "all" => GraphScope::AllGraphs,
                        other => return Err(err(format!("scope must be default or all, got {other:?}"))),
                    }
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let chronology =
            chronology.ok_or(ProfileError::Config { line: 0, message: "missing chronology=<IRI>".into() })?;
        Ok(Profile { name, chronology_predicate: chronology, version_predicate: version, graph_scope: scope })
    }

    fn predicate(&self, which: Which) -> Option<&Iri> {
        match which {
            Which::Chronology => Some(&self.chronology_predicate),
            Which::Version => self.version_predicate.as_ref(),
        }
    }
}

/// An `xsd:dateTime` value. Ordering and equality follow the timeline; the
/// original lexical form is kept for output. Values without a timezone are
/// placed on the timeline as UTC.
#[derive(Debug, Clone)]
pub struct Instant {
    value: DateTime<FixedOffset>,
    lexical: String,
    has_timezone: bool,
}

impl Instant {
    pub fn parse(lexical: &str) -> Result<Instant, ProfileError> {
        parse_datetime(lexical).ok_or_else(|| ProfileError::BadDatetime(lexical.to_owned()))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn timeline(&self) -> DateTime<Utc> {
        self.value.with_timezone(&Utc)
    }

    pub fn has_timezone(&self) -> bool {
        self.has_timezone
    }

    /// Signed time from `earlier` to `self`.
    pub fn since(&self, earlier: &Instant) -> Duration {
        self.value.signed_duration_since(earlier.value)
    }
}

impl PartialEq for Instant {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Instant {}

impl PartialOrd for Instant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Instant {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for Instant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical)
    }
}

fn take_digits(s: &mut &str, n: usize) -> Option<u32> {
    let d = s.get(..n)?;
    if !d.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    *s = &s[n..];
    d.parse().ok()
}

fn expect(s: &mut &str, c: char) -> Option<()> {
    *s = s.strip_prefix(c)?;
    Some(())
}

/// `-?YYYY-MM-DDThh:mm:ss(.s+)?(Z|(+|-)hh:mm)?`
fn parse_datetime(lexical: &str) -> Option<Instant> {
    let mut s = lexical;
    let negative = s.starts_with('-');
    if negative {
        s = &s[1..];
    }
    let year_len = s.bytes().take_while(u8::is_ascii_digit).count();
    if year_len < 4 || (year_len > 4 && s.starts_with('0')) {
        return None;
    }
    let year: i32 = s[..year_len].parse().ok()?;
    s = &s[year_len..];
    let year = if negative { -year } else { year };
    expect(&mut s, '-')?;
    let month = take_digits(&mut s, 2)?;
    expect(&mut s, '-')?;
    let day = take_digits(&mut s, 2)?;
    expect(&mut s, 'T')?;
    let hour = take_digits(&mut s, 2)?;
    expect(&mut s, ':')?;
    let minute = take_digits(&mut s, 2)?;
    expect(&mut s, ':')?;
    let second = take_digits(&mut s, 2)?;
    let mut nanos = 0u32;
    if let Some(rest) = s.strip_prefix('.') {
        let n = rest.bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            return None;
        }
        // digits past nanosecond precision are dropped
        let frac = &rest[..n.min(9)];
        nanos = frac.parse::<u32>().ok()? * 10u32.pow(9 - frac.len() as u32);
        s = &rest[n..];
    }
    let (offset, has_timezone) = match s {
        "" => (0, false),
        "Z" => (0, true),
        _ => {
            let sign = match s.as_bytes()[0] {
                b'+' => 1,
                b'-' => -1,
                _ => return None,
            };
            s = &s[1..];
            let oh = take_digits(&mut s, 2)?;
            expect(&mut s, ':')?;
            let om = take_digits(&mut s, 2)?;
            if !s.is_empty() || om > 59 || oh > 14 || (oh == 14 && om != 0) {
                return None;
            }
            (sign * (oh * 3600 + om * 60) as i32, true)
        }
    };
    let date = NaiveDate::from_ymd_opt(year, month, day)?;
    let end_of_day = hour == 24;
    if end_of_day && (minute != 0 || second != 0 || nanos != 0) {
        return None;
    }
    let time = NaiveTime::from_hms_nano_opt(if end_of_day { 0 } else { hour }, minute, second, nanos)?;
    let mut naive = date.and_time(time);
    if end_of_day {
        naive = naive.checked_add_signed(Duration::days(1))?;
    }
    let tz = FixedOffset::east_opt(offset)?;
    let value = tz.from_local_datetime(&naive).single()?;
    Some(Instant { value, lexical: lexical.to_owned(), has_timezone })
}

/// Finds the instant named by the selected predicate. Returns `None` when no
/// quad in scope carries an `xsd:dateTime` for it, or when the profile has no
/// version predicate and `Which::Version` is asked for.
pub fn extract_instant(m: &Message, p: &Profile, which: Which) -> Result<Option<Instant>, ProfileError> {
    let Some(predicate) = p.predicate(which) else {
        return Ok(None);
    };
    let mut found: Option<Instant> = None;
    for q in m.quads() {
        if &q.predicate != predicate {
            continue;
        }
        if p.graph_scope == GraphScope::DefaultGraphOnly && q.graph != GraphName::DefaultGraph {
            continue;
        }
        let Term::Literal(l) = &q.object else { continue };
        if l.datatype().as_str() != xsd::DATE_TIME {
            continue;
        }
        let instant = Instant::parse(l.lexical())?;
        match &found {
            None => found = Some(instant),
            Some(prev) if *prev == instant => {}
            Some(prev) => {
                // report in a quad-order independent way
                let (a, b) = if prev.lexical() <= instant.lexical() { (prev, &instant) } else { (&instant, prev) };
                return Err(ProfileError::AmbiguousTimestamp {
                    first: a.lexical().to_owned(),
                    second: b.lexical().to_owned(),
                });
            }
        }
    }
    Ok(found)
}

/// An adjacent pair of timestamped messages that runs backwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub earlier_seq: u64,
    pub later_seq: u64,
    pub earlier: Instant,
    pub later: Instant,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.earlier_seq, self.later_seq, self.earlier, self.later)
    }
}

/// Tracks adjacent timestamped messages as they stream past.
#[derive(Debug, Default)]
pub struct OrderChecker {
    last: Option<(u64, Instant)>,
    violations: Vec<Violation>,
}

impl OrderChecker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds message `seq`; returns the violation it causes, if any.
    pub fn observe(
        &mut self,
        seq: u64,
        m: &Message,
        p: &Profile,
        which: Which,
    ) -> Result<Option<&Violation>, ProfileError> {
        let instant = extract_instant(m, p, which)
            .map_err(|e| ProfileError::InMessage { seq, source: Box::new(e) })?;
        Ok(self.observe_instant(seq, instant))
    }

    pub fn observe_instant(&mut self, seq: u64, instant: Option<Instant>) -> Option<&Violation> {
        let instant = instant?;
        let mut broke = false;
        if let Some((prev_seq, prev)) = &self.last {
            if instant < *prev {
                self.violations.push(Violation {
                    earlier_seq: *prev_seq,
                    later_seq: seq,
                    earlier: prev.clone(),
                    later: instant.clone(),
                });
                broke = true;
            }
        }
        self.last = Some((seq, instant));
        if broke {
            self.violations.last()
        } else {
            None
        }
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn into_violations(self) -> Vec<Violation> {
        self.violations
    }
}

/// Lists every adjacent pair of timestamped messages where time runs
/// backwards. Messages without an instant are skipped. Sequence numbers are
/// stream positions from 0.
pub fn check_order<'a>(
    messages: impl IntoIterator<Item = &'a Message>,
    p: &Profile,
) -> Result<Vec<Violation>, ProfileError> {
    check_order_by(messages, p, Which::Chronology)
}

/// Like [`check_order`], for either of the profile's predicates.
pub fn check_order_by<'a>(
    messages: impl IntoIterator<Item = &'a Message>,
    p: &Profile,
    which: Which,
) -> Result<Vec<Violation>, ProfileError> {
    let mut checker = OrderChecker::new();
    for (seq, m) in messages.into_iter().enumerate() {
        checker.observe(seq as u64, m, p, which)?;
    }
    Ok(checker.into_violations())
}

/// Pull-based k-way merge of chronologically ordered streams.
///
/// Ties go to the lower stream index. A message without an instant follows
/// its predecessor in the same stream; those at the very start of a stream
/// are emitted before any timestamped message, in stream order.
pub struct MergeByChronology<I> {
    streams: Vec<I>,
    profile: Profile,
    heads: Vec<Option<(Message, Instant)>>,
    last: Vec<Option<Instant>>,
    heap: BinaryHeap<Reverse<(Instant, usize)>>,
    init: usize,
    carrying: Option<usize>,
    failed: bool,
}

pub fn merge_by_chronology<I>(streams: Vec<I>, profile: &Profile) -> MergeByChronology<I::IntoIter>
where
    I: IntoIterator<Item = Message>,
{
    let streams: Vec<_> = streams.into_iter().map(IntoIterator::into_iter).collect();
    let n = streams.len();
    MergeByChronology {
        streams,
        profile: profile.clone(),
        heads: vec![None; n],
        last: vec![None; n],
        heap: BinaryHeap::new(),
        init: 0,
        carrying: None,
        failed: false,
    }
}

enum Pulled {
    Untimed(Message),
    Timed,
    End,
}

impl<I: Iterator<Item = Message>> MergeByChronology<I> {
    /// Pulls the next message of stream `k`. Timestamped messages become the
    /// stream's head; untimed ones are handed back for immediate output.
    fn pull(&mut self, k: usize) -> Result<Pulled, ProfileError> {
        let Some(m) = self.streams[k].next() else {
            return Ok(Pulled::End);
        };
        match extract_instant(&m, &self.profile, Which::Chronology)? {
            None => Ok(Pulled::Untimed(m)),
            Some(t) => {
                if let Some(prev) = &self.last[k] {
                    if t < *prev {
                        return Err(ProfileError::UnorderedInput {
                            stream: k,
                            previous: prev.lexical().to_owned(),
                            next: t.lexical().to_owned(),
                        });
                    }
                }
                self.last[k] = Some(t.clone());
                self.heap.push(Reverse((t.clone(), k)));
                self.heads[k] = Some((m, t));
                Ok(Pulled::Timed)
            }
        }
    }

    fn step(&mut self) -> Result<Option<Message>, ProfileError> {
        while self.init < self.streams.len() {
            match self.pull(self.init)? {
                Pulled::Untimed(m) => return Ok(Some(m)),
                Pulled::Timed | Pulled::End => self.init += 1,
            }
        }
        if let Some(k) = self.carrying {
            match self.pull(k)? {
                Pulled::Untimed(m) => return Ok(Some(m)),
                Pulled::Timed | Pulled::End => self.carrying = None,
            }
        }
        let Some(Reverse((_, k))) = self.heap.pop() else {
            return Ok(None);
        };
        let (m, _) = self.heads[k].take().expect("heap entries have heads");
        self.carrying = Some(k);
        Ok(Some(m))
    }
}

impl<I: Iterator<Item = Message>> Iterator for MergeByChronology<I> {
    type Item = Result<Message, ProfileError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.step() {
            Ok(m) => m.map(Ok),
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}
