//! C ABI over `rdf-messages`.
//!
//! Every fallible function returns an [`RdfmStatus`]; on failure the message
//! is available from [`rdfm_last_error`] on the same thread. Objects are
//! opaque handles released with their matching `_free` function. Byte
//! buffers handed out by the library are released with [`rdfm_buffer_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use rdf_messages::log::{LogError, LogHandle, LogOptions, Mode};
use rdf_messages::nqm::NqmReader;
use rdf_messages::syntax::PrefixMap;
use rdf_messages::{
    message_isomorphic, skolemize, union, write_nqm, write_trigm, Message, MessageError, ParserEvent, SyntaxError,
    TrigmParser,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdfmStatus {
    Ok = 0,
    InvalidArgument = 1,
    Syntax = 2,
    Io = 3,
    NotFound = 4,
    AlreadyExists = 5,
    IndexCorrupt = 6,
    VersionUnsupported = 7,
    OutOfRange = 8,
    ReadOnly = 9,
    InvalidMessage = 10,
    Panic = 11,
}

/// Serialization format.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdfmFormat {
    Trigm = 0,
    Nqm = 1,
}

/// Incremental TriG-Messages parser.
pub struct RdfmParser(TrigmParser);

/// One message.
pub struct RdfmMessage(Message);

/// An ordered list of messages.
pub struct RdfmMessageList(Vec<Message>);

/// An open message log.
pub struct RdfmLog(LogHandle);

/// Bytes owned by the library.
#[repr(C)]
pub struct RdfmBuffer {
    pub data: *mut u8,
    pub len: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RdfmStatus, String);

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        Failure(RdfmStatus::Syntax, e.to_string())
    }
}

impl From<MessageError> for Failure {
    fn from(e: MessageError) -> Self {
        let status = match e {
            MessageError::MixedScope => RdfmStatus::InvalidMessage,
            MessageError::InvalidBase(_) | MessageError::InvalidMessageId(_) => RdfmStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(RdfmStatus::Io, e.to_string())
    }
}

impl From<LogError> for Failure {
    fn from(e: LogError) -> Self {
        let status = match &e {
            LogError::AlreadyExists(_) => RdfmStatus::AlreadyExists,
            LogError::NotFound(_) => RdfmStatus::NotFound,
            LogError::IndexCorrupt(_) => RdfmStatus::IndexCorrupt,
            LogError::VersionUnsupported(_) => RdfmStatus::VersionUnsupported,
            LogError::OutOfRange { .. } | LogError::BadRange { .. } => RdfmStatus::OutOfRange,
            LogError::ReadOnly => RdfmStatus::ReadOnly,
            LogError::Syntax(_) => RdfmStatus::Syntax,
            LogError::Io(_) => RdfmStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(what: &str) -> Failure {
    Failure(RdfmStatus::InvalidArgument, what.to_owned())
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', "\\0")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RdfmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdfmStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            RdfmStatus::Panic
        }
    }
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], Failure> {
    if len == 0 {
        Ok(&[])
    } else if data.is_null() {
        Err(invalid("null data pointer with non-zero length"))
    } else {
        Ok(std::slice::from_raw_parts(data, len))
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn emit<T>(slot: *mut *mut T, value: T) -> Result<(), Failure> {
    if slot.is_null() {
        return Err(invalid("null output pointer"));
    }
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn get<'a, T>(handle: *const T, what: &str) -> Result<&'a T, Failure> {
    handle.as_ref().ok_or_else(|| invalid(&format!("{what} handle is null")))
}

unsafe fn get_mut<'a, T>(handle: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    handle.as_mut().ok_or_else(|| invalid(&format!("{what} handle is null")))
}

unsafe fn free<T>(handle: *mut T) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

fn buffer(bytes: Vec<u8>) -> RdfmBuffer {
    let mut boxed = bytes.into_boxed_slice();
    let out = RdfmBuffer { data: boxed.as_mut_ptr(), len: boxed.len() };
    std::mem::forget(boxed);
    out
}

fn serialize(messages: &[Message], format: RdfmFormat) -> Result<Vec<u8>, Failure> {
    let mut sink = Vec::new();
    match format {
        RdfmFormat::Trigm => write_trigm(messages, &mut sink, &PrefixMap::new())?,
        RdfmFormat::Nqm => write_nqm(messages, &mut sink)?,
    };
    Ok(sink)
}

fn collect(events: Vec<ParserEvent>) -> Vec<Message> {
    events.into_iter().filter_map(ParserEvent::into_message).collect()
}

/// Message describing the last failure on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rdfm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `buffer` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rdfm_buffer_free(buffer: RdfmBuffer) {
    if !buffer.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(buffer.data, buffer.len)));
    }
}

/// Parses a whole document into a message list.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_parse(
    format: RdfmFormat,
    data: *const u8,
    len: usize,
    require_version: bool,
    out: *mut *mut RdfmMessageList,
) -> RdfmStatus {
    guard(|| {
        let input = bytes(data, len)?;
        let messages = match format {
            RdfmFormat::Trigm => rdf_messages::parse_trigm(input, require_version)?,
            RdfmFormat::Nqm => NqmReader::with_version_check(input, require_version)
                .map(|r| r.map(|rec| rec.message))
                .collect::<Result<_, _>>()?,
        };
        emit(out, RdfmMessageList(messages))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_parser_new(require_version: bool, out: *mut *mut RdfmParser) -> RdfmStatus {
    guard(|| emit(out, RdfmParser(TrigmParser::new(require_version))))
}

/// Feeds bytes; messages completed by them are returned in `out` (possibly
/// an empty list). After an error the parser only reports that error.
///
/// # Safety
/// `parser` must be live; `data` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn rdfm_parser_feed(
    parser: *mut RdfmParser,
    data: *const u8,
    len: usize,
    out: *mut *mut RdfmMessageList,
) -> RdfmStatus {
    guard(|| {
        let p = get_mut(parser, "parser")?;
        let events = p.0.feed(bytes(data, len)?)?;
        emit(out, RdfmMessageList(collect(events)))
    })
}

/// Signals end of input and returns any final message.
///
/// # Safety
/// `parser` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_parser_finish(parser: *mut RdfmParser, out: *mut *mut RdfmMessageList) -> RdfmStatus {
    guard(|| {
        let p = get_mut(parser, "parser")?;
        let events = p.0.finish()?;
        emit(out, RdfmMessageList(collect(events)))
    })
}

/// Quads read since the last emitted message.
///
/// # Safety
/// `parser` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn rdfm_parser_pending_quads(parser: *const RdfmParser) -> usize {
    parser.as_ref().map_or(0, |p| p.0.pending_quads())
}

/// # Safety
/// `parser` must come from [`rdfm_parser_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rdfm_parser_free(parser: *mut RdfmParser) {
    free(parser)
}

/// # Safety
/// `list` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_list_len(list: *const RdfmMessageList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// Copies message `index` into a new handle.
///
/// # Safety
/// `list` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_list_get(
    list: *const RdfmMessageList,
    index: usize,
    out: *mut *mut RdfmMessage,
) -> RdfmStatus {
    guard(|| {
        let l = get(list, "list")?;
        let m = l.0.get(index).ok_or_else(|| {
            Failure(RdfmStatus::OutOfRange, format!("index {index} out of range for {} messages", l.0.len()))
        })?;
        emit(out, RdfmMessage(m.clone()))
    })
}

/// Serializes the whole list as a document.
///
/// # Safety
/// `list` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_list_write(
    list: *const RdfmMessageList,
    format: RdfmFormat,
    out: *mut RdfmBuffer,
) -> RdfmStatus {
    guard(|| {
        let l = get(list, "list")?;
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        *out = buffer(serialize(&l.0, format)?);
        Ok(())
    })
}

/// Merges every message of the list into one, renaming clashing blank nodes.
///
/// # Safety
/// `list` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_list_union(list: *const RdfmMessageList, out: *mut *mut RdfmMessage) -> RdfmStatus {
    guard(|| {
        let l = get(list, "list")?;
        emit(out, RdfmMessage(union(&l.0)))
    })
}

/// # Safety
/// `list` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_list_free(list: *mut RdfmMessageList) {
    free(list)
}

/// # Safety
/// `message` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_quad_count(message: *const RdfmMessage) -> usize {
    message.as_ref().map_or(0, |m| m.0.len())
}

/// Number of distinct blank nodes.
///
/// # Safety
/// `message` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_blank_node_count(message: *const RdfmMessage) -> usize {
    message.as_ref().map_or(0, |m| m.0.blank_nodes().len())
}

/// Writes true to `out` when the messages are equal up to blank node names.
///
/// # Safety
/// `a` and `b` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_isomorphic(
    a: *const RdfmMessage,
    b: *const RdfmMessage,
    out: *mut bool,
) -> RdfmStatus {
    guard(|| {
        let (a, b) = (get(a, "message")?, get(b, "message")?);
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        *out = message_isomorphic(&a.0, &b.0);
        Ok(())
    })
}

/// Replaces blank nodes with `<base>/.well-known/genid/<id>/<label>`.
///
/// # Safety
/// `message` must be live; `base` and `message_id` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_skolemize(
    message: *const RdfmMessage,
    base: *const c_char,
    message_id: *const c_char,
    out: *mut *mut RdfmMessage,
) -> RdfmStatus {
    guard(|| {
        let m = get(message, "message")?;
        let s = skolemize(&m.0, text(base, "base")?, text(message_id, "message id")?)?;
        emit(out, RdfmMessage(s))
    })
}

/// Serializes one message as a complete single-message document.
///
/// # Safety
/// `message` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_write(
    message: *const RdfmMessage,
    format: RdfmFormat,
    out: *mut RdfmBuffer,
) -> RdfmStatus {
    guard(|| {
        let m = get(message, "message")?;
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        *out = buffer(serialize(std::slice::from_ref(&m.0), format)?);
        Ok(())
    })
}

/// # Safety
/// `message` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rdfm_message_free(message: *mut RdfmMessage) {
    free(message)
}

fn log_options(sync: bool) -> LogOptions {
    LogOptions { sync, ..LogOptions::default() }
}

/// Creates a new empty log at `path` (plus `path.idx`).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_create(path: *const c_char, sync: bool, out: *mut *mut RdfmLog) -> RdfmStatus {
    guard(|| {
        let path = PathBuf::from(text(path, "path")?);
        emit(out, RdfmLog(LogHandle::create(path, log_options(sync))?))
    })
}

/// Opens an existing log, recovering from a torn tail in writer mode.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_open(
    path: *const c_char,
    writer: bool,
    paranoid: bool,
    out: *mut *mut RdfmLog,
) -> RdfmStatus {
    guard(|| {
        let path = PathBuf::from(text(path, "path")?);
        let mode = if writer { Mode::Writer } else { Mode::Reader };
        let options = LogOptions { paranoid, ..LogOptions::default() };
        emit(out, RdfmLog(LogHandle::open(path, mode, options)?))
    })
}

/// # Safety
/// `log` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_len(log: *const RdfmLog) -> u64 {
    log.as_ref().map_or(0, |l| l.0.len())
}

/// Appends a message; its sequence number goes to `seq` when non-null.
///
/// # Safety
/// `log` and `message` must be live; `seq` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_append(log: *mut RdfmLog, message: *const RdfmMessage, seq: *mut u64) -> RdfmStatus {
    guard(|| {
        let l = get_mut(log, "log")?;
        let n = l.0.append(&get(message, "message")?.0)?;
        if !seq.is_null() {
            *seq = n;
        }
        Ok(())
    })
}

/// # Safety
/// `log` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_read(log: *const RdfmLog, seq: u64, out: *mut *mut RdfmMessage) -> RdfmStatus {
    guard(|| {
        let m = get(log, "log")?.0.read(seq)?;
        emit(out, RdfmMessage(m))
    })
}

/// Reads messages `from..=to` in order.
///
/// # Safety
/// `log` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_replay(
    log: *const RdfmLog,
    from: u64,
    to: u64,
    out: *mut *mut RdfmMessageList,
) -> RdfmStatus {
    guard(|| {
        let l = get(log, "log")?;
        let messages = l.0.replay(Some(from), Some(to))?.map(|r| r.map(|(_, m)| m)).collect::<Result<_, _>>()?;
        emit(out, RdfmMessageList(messages))
    })
}

/// Re-derives the index from the data file and compares it with the stored one.
///
/// # Safety
/// `log` must be live.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_verify(log: *const RdfmLog) -> RdfmStatus {
    guard(|| Ok(get(log, "log")?.0.verify()?))
}

/// # Safety
/// `log` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rdfm_log_free(log: *mut RdfmLog) {
    free(log)
}
