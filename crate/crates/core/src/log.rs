//! Append-only message log: an N-Quads-Messages data file plus a sidecar
//! byte-offset index (`<data>.idx`).
//!
//! Index format: the line `#rdfmlog-index v1`, then one tab-separated line
//! per message: `seq offset length quad_count [timestamp]`. A message is
//! committed once its index line is complete; on open, anything past the
//! last committed message is treated as a torn write.

use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use crate::message::Message;
use crate::nqm::{self, NqmReader};
use crate::profile::{extract_instant, Instant, Profile, Which};
use crate::syntax::{Position, SyntaxError, SyntaxErrorKind, MESSAGES_VERSION, VERSION_LINE};

pub const INDEX_MAGIC: &str = "#rdfmlog-index v1";

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("{0} already exists")]
    AlreadyExists(PathBuf),
    #[error("{0} not found")]
    NotFound(PathBuf),
    #[error("index corrupt: {0}")]
    IndexCorrupt(String),
    #[error("unsupported data file version: {0}")]
    VersionUnsupported(String),
    #[error("sequence number {seq} out of range (log holds {len} messages)")]
    OutOfRange { seq: u64, len: u64 },
    #[error("invalid range {from}..={to}")]
    BadRange { from: u64, to: u64 },
    #[error("log is open read-only")]
    ReadOnly,
    #[error("data file: {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Reader,
    Writer,
}

#[derive(Debug, Clone)]
pub struct LogOptions {
    /// Re-derive the index from the data file on open and compare.
    pub paranoid: bool,
    /// Profile whose chronology instant fills the timestamp column.
    pub profile: Option<Profile>,
    /// fsync data and index after every append.
    pub sync: bool,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions { paranoid: false, profile: None, sync: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRecord {
    pub seq: u64,
    pub offset: u64,
    pub length: u64,
    pub quad_count: u64,
    pub timestamp: Option<Instant>,
}

impl IndexRecord {
    pub fn end(&self) -> u64 {
        self.offset + self.length
    }

    fn write_line(&self, out: &mut String) {
        let _ = write!(out, "{}\t{}\t{}\t{}", self.seq, self.offset, self.length, self.quad_count);
        if let Some(t) = &self.timestamp {
            let _ = write!(out, "\t{}", t.lexical());
        }
        out.push('\n');
    }
}

/// Renders a complete index file.
pub fn render_index(records: &[IndexRecord]) -> String {
    let mut out = format!("{INDEX_MAGIC}\n");
    for r in records {
        r.write_line(&mut out);
    }
    out
}

/// `<data>.idx` next to the data file.
pub fn index_path_for(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".idx");
    PathBuf::from(s)
}

pub struct LogHandle {
    data_path: PathBuf,
    index_path: PathBuf,
    mode: Mode,
    options: LogOptions,
    header_len: u64,
    records: Vec<IndexRecord>,
    data: File,
    index: Option<File>,
}

pub fn log_create(path: impl AsRef<Path>) -> Result<LogHandle, LogError> {
    LogHandle::create(path, LogOptions::default())
}

pub fn log_open(path: impl AsRef<Path>, mode: Mode) -> Result<LogHandle, LogError> {
    LogHandle::open(path, mode, LogOptions::default())
}

impl LogHandle {
    /// Creates the data file with its VERSION line and an empty index.
    pub fn create(path: impl AsRef<Path>, options: LogOptions) -> Result<LogHandle, LogError> {
        let data_path = path.as_ref().to_path_buf();
        let index_path = index_path_for(&data_path);
        let mut data = match OpenOptions::new().read(true).write(true).create_new(true).open(&data_path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => return Err(LogError::AlreadyExists(data_path)),
            Err(e) => return Err(e.into()),
        };
        data.write_all(VERSION_LINE.as_bytes())?;
        data.sync_all()?;
        let mut index = File::create(&index_path)?;
        index.write_all(render_index(&[]).as_bytes())?;
        index.sync_all()?;
        Ok(LogHandle {
            data_path,
            index_path,
            mode: Mode::Writer,
            options,
            header_len: VERSION_LINE.len() as u64,
            records: Vec::new(),
            data,
            index: Some(index),
        })
    }

    pub fn open(path: impl AsRef<Path>, mode: Mode, options: LogOptions) -> Result<LogHandle, LogError> {
        let data_path = path.as_ref().to_path_buf();
        let index_path = index_path_for(&data_path);
        let data = match OpenOptions::new().read(true).write(mode == Mode::Writer).open(&data_path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(LogError::NotFound(data_path)),
            Err(e) => return Err(e.into()),
        };
        let mut log = LogHandle {
            data_path,
            index_path,
            mode,
            options,
            header_len: 0,
            records: Vec::new(),
            data,
            index: None,
        };
        log.recover()?;
        Ok(log)
    }

    fn recover(&mut self) -> Result<(), LogError> {
        let data_len = self.data.metadata()?.len();
        let header = read_header(&self.data)?;
        let header_len = match header {
            Header::Torn => {
                // crashed while creating: nothing was ever committed
                if self.mode == Mode::Writer {
                    self.data.set_len(0)?;
                    write_at_end(&mut self.data, VERSION_LINE.as_bytes())?;
                    self.data.sync_all()?;
                    self.rewrite_index(&[])?;
                }
                self.header_len = VERSION_LINE.len() as u64;
                return self.open_index_for_append();
            }
            Header::Version(v, _) if v != MESSAGES_VERSION => return Err(LogError::VersionUnsupported(v)),
            Header::Version(_, len) => len,
            Header::Missing => {
                return Err(Position::START.error(SyntaxErrorKind::VersionMissing, "data file has no VERSION line").into())
            }
        };
        self.header_len = header_len;

        let stored = match std::fs::read(&self.index_path) {
            Ok(bytes) => Some(parse_index(&bytes)?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) => return Err(e.into()),
        };

        match stored {
            Some(StoredIndex { mut records, torn }) => {
                // a record whose bytes are not all in the data file was never committed
                let keep = records.iter().take_while(|r| r.end() <= data_len).count();
                let dropped = keep < records.len();
                records.truncate(keep);
                check_chaining(&records, header_len)?;
                let committed_end = records.last().map_or(header_len, IndexRecord::end);
                if self.options.paranoid {
                    let scan = self.scan(committed_end)?;
                    if scan.records.len() != records.len()
                        || render_index(&scan.records) != render_index(&self.with_profile_timestamps(&records, &scan.records))
                    {
                        return Err(LogError::IndexCorrupt(format!(
                            "{} does not match the data file",
                            self.index_path.display()
                        )));
                    }
                }
                self.records = records;
                if self.mode == Mode::Writer {
                    if committed_end < data_len {
                        self.data.set_len(committed_end)?;
                        self.data.sync_all()?;
                    }
                    if torn || dropped {
                        let records = self.records.clone();
                        self.rewrite_index(&records)?;
                    }
                }
            }
            None => {
                let scan = self.scan(data_len)?;
                let mut records = scan.records;
                if self.mode == Mode::Writer {
                    self.data.set_len(scan.clean_end)?;
                    if scan.unterminated {
                        // close the trailing message so later appends start a new one
                        let last = records.last_mut().expect("unterminated implies a record");
                        let mut tail = Vec::new();
                        if !ends_with_newline(&self.data, last.end())? {
                            tail.push(b'\n');
                        }
                        tail.extend_from_slice(b"MESSAGE\n");
                        write_at_end(&mut self.data, &tail)?;
                        last.length += tail.len() as u64;
                    }
                    self.data.sync_all()?;
                    self.rewrite_index(&records)?;
                }
                self.records = records;
            }
        }
        self.open_index_for_append()
    }

    /// Keeps stored timestamps only when a profile is set, so logs written
    /// without one compare equal on the first four columns.
    fn with_profile_timestamps(&self, stored: &[IndexRecord], derived: &[IndexRecord]) -> Vec<IndexRecord> {
        stored
            .iter()
            .zip(derived)
            .map(|(s, d)| IndexRecord {
                timestamp: if self.options.profile.is_some() { s.timestamp.clone() } else { d.timestamp.clone() },
                ..s.clone()
            })
            .collect()
    }

    fn open_index_for_append(&mut self) -> Result<(), LogError> {
        if self.mode == Mode::Writer && self.index.is_none() {
            self.index = Some(OpenOptions::new().append(true).open(&self.index_path)?);
        }
        Ok(())
    }

    fn rewrite_index(&mut self, records: &[IndexRecord]) -> Result<(), LogError> {
        let tmp = {
            let mut s = self.index_path.as_os_str().to_owned();
            s.push(".tmp");
            PathBuf::from(s)
        };
        let mut f = File::create(&tmp)?;
        f.write_all(render_index(records).as_bytes())?;
        f.sync_all()?;
        drop(f);
        std::fs::rename(&tmp, &self.index_path)?;
        self.index = None;
        Ok(())
    }

    /// Scans the data file up to `limit` bytes and derives index records.
    fn scan(&self, limit: u64) -> Result<Scan, LogError> {
        let mut file = &self.data;
        file.seek(SeekFrom::Start(0))?;
        let reader = BufReader::new(file.take(limit));
        let mut records = Vec::new();
        let mut clean_end = self.header_len;
        let mut unterminated = false;
        for item in NqmReader::new(reader) {
            let rec = match item {
                Ok(r) => r,
                Err(e) => {
                    // a torn final line: the data does not end with a newline and
                    // the error lies on the last line
                    if !ends_with_newline(&self.data, limit)? && e.offset >= last_line_start(&self.data, limit)? {
                        break;
                    }
                    return Err(e.into());
                }
            };
            let timestamp = self.timestamp_of(&rec.message);
            records.push(IndexRecord {
                seq: records.len() as u64,
                offset: rec.span.start,
                length: rec.span.len(),
                quad_count: rec.message.len() as u64,
                timestamp,
            });
            clean_end = rec.span.end;
            unterminated = !rec.terminated;
        }
        Ok(Scan { records, clean_end, unterminated })
    }

    fn timestamp_of(&self, m: &Message) -> Option<Instant> {
        let p = self.options.profile.as_ref()?;
        // messages with unusable timestamps are stored without one
        extract_instant(m, p, Which::Chronology).ok().flatten()
    }

    pub fn data_path(&self) -> &Path {
        &self.data_path
    }

    pub fn index_path(&self) -> &Path {
        &self.index_path
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of committed messages, which is also the next sequence number.
    pub fn len(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[IndexRecord] {
        &self.records
    }

    pub fn record(&self, seq: u64) -> Result<&IndexRecord, LogError> {
        self.records.get(seq as usize).ok_or(LogError::OutOfRange { seq, len: self.len() })
    }

    /// Appends a message and returns its sequence number. The data is
    /// flushed before the index line is written.
    pub fn append(&mut self, m: &Message) -> Result<u64, LogError> {
        if self.mode != Mode::Writer {
            return Err(LogError::ReadOnly);
        }
        let seq = self.len();
        let offset = self.records.last().map_or(self.header_len, IndexRecord::end);
        let mut bytes = Vec::new();
        nqm::write_record(m, &mut bytes);
        let record = IndexRecord {
            seq,
            offset,
            length: bytes.len() as u64,
            quad_count: m.len() as u64,
            timestamp: self.timestamp_of(m),
        };
        if let Err(e) = self.write_data(offset, &bytes) {
            let _ = self.data.set_len(offset);
            return Err(e.into());
        }
        let mut line = String::new();
        record.write_line(&mut line);
        self.open_index_for_append()?;
        let index = self.index.as_mut().expect("writer has an index handle");
        index.write_all(line.as_bytes())?;
        if self.options.sync {
            index.sync_data()?;
        }
        self.records.push(record);
        Ok(seq)
    }

    fn write_data(&mut self, offset: u64, bytes: &[u8]) -> io::Result<()> {
        self.data.seek(SeekFrom::Start(offset))?;
        self.data.write_all(bytes)?;
        if self.options.sync {
            self.data.sync_data()?;
        }
        Ok(())
    }

    /// The raw bytes of one record.
    pub fn read_raw(&self, seq: u64) -> Result<Vec<u8>, LogError> {
        let r = self.record(seq)?;
        let mut buf = vec![0; r.length as usize];
        let mut file = &self.data;
        file.seek(SeekFrom::Start(r.offset))?;
        file.read_exact(&mut buf)?;
        Ok(buf)
    }

    /// Reads one message through the index, without scanning the file.
    pub fn read(&self, seq: u64) -> Result<Message, LogError> {
        Ok(nqm::parse_record(&self.read_raw(seq)?)?)
    }

    /// Streams messages `from..=to` (both default to the ends of the log).
    pub fn replay(&self, from: Option<u64>, to: Option<u64>) -> Result<Replay, LogError> {
        let range = self.seq_range(from, to)?;
        let start = self.records.get(range.start as usize).map_or(0, |r| r.offset);
        let file = File::open(&self.data_path)?;
        let mut reader = BufReader::new(file);
        reader.seek(SeekFrom::Start(start))?;
        let lengths = self.records[range.start as usize..range.end as usize].iter().map(|r| r.length).collect();
        Ok(Replay { reader, lengths, next: 0, first_seq: range.start, failed: false })
    }

    /// Validates optional inclusive bounds and returns the half-open range.
    pub fn seq_range(&self, from: Option<u64>, to: Option<u64>) -> Result<Range<u64>, LogError> {
        let len = self.len();
        let from_seq = from.unwrap_or(0);
        if let Some(f) = from {
            if f >= len {
                return Err(LogError::OutOfRange { seq: f, len });
            }
        }
        let end = match to {
            Some(t) if t >= len => return Err(LogError::OutOfRange { seq: t, len }),
            Some(t) => t + 1,
            None => len,
        };
        if from_seq > end || (to.is_some() && from_seq >= end) {
            return Err(LogError::BadRange { from: from_seq, to: end.saturating_sub(1) });
        }
        Ok(from_seq..end)
    }

    /// Derives the index from the data file alone.
    pub fn rederive_index(&self) -> Result<Vec<IndexRecord>, LogError> {
        let end = self.records.last().map_or(self.header_len, IndexRecord::end);
        Ok(self.scan(end)?.records)
    }

    /// Checks that the index file on disk equals the one derived from the data.
    pub fn verify(&self) -> Result<(), LogError> {
        let derived = render_index(&self.rederive_index()?);
        let stored = std::fs::read_to_string(&self.index_path)
            .map_err(|e| LogError::IndexCorrupt(format!("{}: {e}", self.index_path.display())))?;
        if derived != stored {
            let line = derived.lines().zip(stored.lines()).position(|(a, b)| a != b);
            let detail = match line {
                Some(k) => format!("first difference on index line {}", k + 1),
                None => "index and data disagree on the number of messages".to_owned(),
            };
            return Err(LogError::IndexCorrupt(detail));
        }
        Ok(())
    }
}

/// Pull-based replay stream of `(seq, message)` pairs.
pub struct Replay {
    reader: BufReader<File>,
    lengths: Vec<u64>,
    next: usize,
    first_seq: u64,
    failed: bool,
}

impl Iterator for Replay {
    type Item = Result<(u64, Message), LogError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next >= self.lengths.len() {
            return None;
        }
        let mut buf = vec![0; self.lengths[self.next] as usize];
        let result = self
            .reader
            .read_exact(&mut buf)
            .map_err(LogError::from)
            .and_then(|()| nqm::parse_record(&buf).map_err(LogError::from));
        let seq = self.first_seq + self.next as u64;
        self.next += 1;
        match result {
            Ok(m) => Some(Ok((seq, m))),
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.lengths.len() - self.next;
        (n, Some(n))
    }
}

struct Scan {
    records: Vec<IndexRecord>,
    clean_end: u64,
    unterminated: bool,
}

struct StoredIndex {
    records: Vec<IndexRecord>,
    torn: bool,
}

enum Header {
    /// Empty or a strict prefix of the VERSION line.
    Torn,
    Version(String, u64),
    Missing,
}

fn read_header(file: &File) -> Result<Header, LogError> {
    let mut f = file;
    f.seek(SeekFrom::Start(0))?;
    let mut line = Vec::new();
    BufReader::new(f).take(4096).read_until(b'\n', &mut line)?;
    if line.len() < VERSION_LINE.len() && VERSION_LINE.as_bytes().starts_with(&line) {
        return Ok(Header::Torn);
    }
    let text = String::from_utf8_lossy(&line);
    let text = text.strip_prefix('\u{FEFF}').unwrap_or(&text);
    let trimmed = text.trim_start_matches([' ', '\t']);
    if !line.ends_with(b"\n") || !trimmed.starts_with("VERSION") {
        return Ok(Header::Missing);
    }
    let body = trimmed.trim_end_matches(['\n', '\r']);
    let version = nqm::parse_version_line(body, Position::START)?;
    Ok(Header::Version(version, line.len() as u64))
}

fn parse_index(bytes: &[u8]) -> Result<StoredIndex, LogError> {
    let corrupt = |msg: String| LogError::IndexCorrupt(msg);
    let text = std::str::from_utf8(bytes).map_err(|_| corrupt("index is not UTF-8".into()))?;
    let header = format!("{INDEX_MAGIC}\n");
    if header.starts_with(text) && text.len() < header.len() {
        return Ok(StoredIndex { records: Vec::new(), torn: true });
    }
    let body = text.strip_prefix(&header).ok_or_else(|| corrupt(format!("missing {INDEX_MAGIC:?} header")))?;
    let mut records = Vec::new();
    let mut torn = false;
    for (k, raw) in body.split_inclusive('\n').enumerate() {
        let Some(line) = raw.strip_suffix('\n') else {
            torn = true;
            break;
        };
        let bad = || corrupt(format!("bad index line {}: {line:?}", k + 2));
        let fields: Vec<&str> = line.split('\t').collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(bad());
        }
        let num = |i: usize| fields[i].parse::<u64>().map_err(|_| bad());
        let timestamp = match fields.get(4) {
            Some(t) => Some(Instant::parse(t).map_err(|_| bad())?),
            None => None,
        };
        let record = IndexRecord { seq: num(0)?, offset: num(1)?, length: num(2)?, quad_count: num(3)?, timestamp };
        if record.seq != records.len() as u64 {
            return Err(corrupt(format!("index line {} has seq {}, expected {}", k + 2, record.seq, records.len())));
        }
        records.push(record);
    }
    Ok(StoredIndex { records, torn })
}

fn check_chaining(records: &[IndexRecord], header_len: u64) -> Result<(), LogError> {
    let mut expected = header_len;
    for r in records {
        if r.offset != expected || r.length == 0 {
            return Err(LogError::IndexCorrupt(format!(
                "record {} starts at {} but the previous record ends at {}",
                r.seq, r.offset, expected
            )));
        }
        expected = r.end();
    }
    Ok(())
}

fn write_at_end(file: &mut File, bytes: &[u8]) -> io::Result<()> {
    file.seek(SeekFrom::End(0))?;
    file.write_all(bytes)
}

fn ends_with_newline(file: &File, end: u64) -> io::Result<bool> {
    if end == 0 {
        return Ok(false);
    }
    let mut f = file;
    f.seek(SeekFrom::Start(end - 1))?;
    let mut b = [0u8];
    f.read_exact(&mut b)?;
    Ok(b[0] == b'\n')
}

fn last_line_start(file: &File, end: u64) -> io::Result<u64> {
    let mut f = file;
    let from = end.saturating_sub(64 * 1024);
    f.seek(SeekFrom::Start(from))?;
    let mut buf = vec![0; (end - from) as usize];
    f.read_exact(&mut buf)?;
    Ok(match buf.iter().rposition(|&b| b == b'\n') {
        Some(i) => from + i as u64 + 1,
        None => from,
    })
}
