use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use rdf_messages_ffi::*;

const READINGS_NQM: &str = "VERSION \"1.2-messages\"
_:b0 <http://www.w3.org/ns/sosa/resultTime> \"2026-05-12T18:20:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
_:b0 <http://www.w3.org/ns/sosa/hasSimpleResult> \"22\"^^<http://www.w3.org/2001/XMLSchema#integer> .
MESSAGE
MESSAGE
_:b0 <http://www.w3.org/ns/sosa/resultTime> \"2026-05-12T18:25:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
_:b0 <http://www.w3.org/ns/sosa/hasSimpleResult> \"23\"^^<http://www.w3.org/2001/XMLSchema#integer> .
";

fn last_error() -> String {
    let p = rdfm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(format: RdfmFormat, doc: &[u8]) -> *mut RdfmMessageList {
    let mut list = ptr::null_mut();
    let status = unsafe { rdfm_parse(format, doc.as_ptr(), doc.len(), true, &mut list) };
    assert_eq!(status, RdfmStatus::Ok, "{}", last_error());
    list
}

fn message(list: *const RdfmMessageList, i: usize) -> *mut RdfmMessage {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { rdfm_message_list_get(list, i, &mut m) }, RdfmStatus::Ok);
    m
}

fn counts(list: *const RdfmMessageList) -> Vec<usize> {
    (0..unsafe { rdfm_message_list_len(list) })
        .map(|i| {
            let m = message(list, i);
            let n = unsafe { rdfm_message_quad_count(m) };
            unsafe { rdfm_message_free(m) };
            n
        })
        .collect()
}

#[test]
fn parse_write_and_reparse() {
    let list = parse(RdfmFormat::Nqm, READINGS_NQM.as_bytes());
    assert_eq!(counts(list), [2, 0, 2]);
    let mut buf = RdfmBuffer { data: ptr::null_mut(), len: 0 };
    assert_eq!(unsafe { rdfm_message_list_write(list, RdfmFormat::Trigm, &mut buf) }, RdfmStatus::Ok);
    let trig = unsafe { std::slice::from_raw_parts(buf.data, buf.len) }.to_vec();
    unsafe { rdfm_buffer_free(buf) };
    let again = parse(RdfmFormat::Trigm, &trig);
    assert_eq!(counts(again), [2, 0, 2]);
    for i in 0..3 {
        let (a, b) = (message(list, i), message(again, i));
        let mut same = false;
        assert_eq!(unsafe { rdfm_message_isomorphic(a, b, &mut same) }, RdfmStatus::Ok);
        assert!(same);
        unsafe {
            rdfm_message_free(a);
            rdfm_message_free(b);
        }
    }
    let (first, last) = (message(list, 0), message(list, 2));
    let mut same = true;
    unsafe { rdfm_message_isomorphic(first, last, &mut same) };
    assert!(!same);
    unsafe {
        rdfm_message_free(first);
        rdfm_message_free(last);
        rdfm_message_list_free(list);
        rdfm_message_list_free(again);
    }
}

#[test]
fn incremental_parser() {
    let mut parser = ptr::null_mut();
    assert_eq!(unsafe { rdfm_parser_new(true, &mut parser) }, RdfmStatus::Ok);
    let mut seen = Vec::new();
    for b in READINGS_NQM.as_bytes() {
        let mut list = ptr::null_mut();
        assert_eq!(unsafe { rdfm_parser_feed(parser, b, 1, &mut list) }, RdfmStatus::Ok);
        seen.extend(counts(list));
        if unsafe { rdfm_message_list_len(list) } > 0 {
            assert_eq!(unsafe { rdfm_parser_pending_quads(parser) }, 0);
        }
        unsafe { rdfm_message_list_free(list) };
    }
    let mut list = ptr::null_mut();
    assert_eq!(unsafe { rdfm_parser_finish(parser, &mut list) }, RdfmStatus::Ok);
    seen.extend(counts(list));
    assert_eq!(seen, [2, 0, 2]);
    unsafe {
        rdfm_message_list_free(list);
        rdfm_parser_free(parser);
    }
}

#[test]
fn union_and_skolemize() {
    let list = parse(RdfmFormat::Nqm, READINGS_NQM.as_bytes());
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { rdfm_message_list_union(list, &mut u) }, RdfmStatus::Ok);
    assert_eq!(unsafe { (rdfm_message_quad_count(u), rdfm_message_blank_node_count(u)) }, (4, 2));

    let base = CString::new("http://ex.org").unwrap();
    let id = CString::new("m1").unwrap();
    let m = message(list, 0);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rdfm_message_skolemize(m, base.as_ptr(), id.as_ptr(), &mut s) }, RdfmStatus::Ok);
    assert_eq!(unsafe { (rdfm_message_quad_count(s), rdfm_message_blank_node_count(s)) }, (2, 0));
    let mut buf = RdfmBuffer { data: ptr::null_mut(), len: 0 };
    assert_eq!(unsafe { rdfm_message_write(s, RdfmFormat::Nqm, &mut buf) }, RdfmStatus::Ok);
    let text = String::from_utf8(unsafe { std::slice::from_raw_parts(buf.data, buf.len) }.to_vec()).unwrap();
    assert!(text.contains("<http://ex.org/.well-known/genid/m1/b0>"));
    unsafe { rdfm_buffer_free(buf) };

    let bad = CString::new("not an iri").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { rdfm_message_skolemize(m, bad.as_ptr(), id.as_ptr(), &mut none) }, RdfmStatus::InvalidArgument);
    assert!(none.is_null());
    assert!(last_error().contains("not an iri"));
    unsafe {
        rdfm_message_free(u);
        rdfm_message_free(s);
        rdfm_message_free(m);
        rdfm_message_list_free(list);
    }
}

#[test]
fn log_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("ffi.nqm").to_str().unwrap()).unwrap();
    let list = parse(RdfmFormat::Nqm, READINGS_NQM.as_bytes());
    let mut log = ptr::null_mut();
    assert_eq!(unsafe { rdfm_log_create(path.as_ptr(), false, &mut log) }, RdfmStatus::Ok);
    for i in 0..3 {
        let m = message(list, i);
        let mut seq = u64::MAX;
        assert_eq!(unsafe { rdfm_log_append(log, m, &mut seq) }, RdfmStatus::Ok);
        assert_eq!(seq, i as u64);
        unsafe { rdfm_message_free(m) };
    }
    assert_eq!(unsafe { rdfm_log_verify(log) }, RdfmStatus::Ok);
    unsafe { rdfm_log_free(log) };

    let mut again = ptr::null_mut();
    assert_eq!(unsafe { rdfm_log_create(path.as_ptr(), false, &mut again) }, RdfmStatus::AlreadyExists);

    let mut reader = ptr::null_mut();
    assert_eq!(unsafe { rdfm_log_open(path.as_ptr(), false, true, &mut reader) }, RdfmStatus::Ok);
    assert_eq!(unsafe { rdfm_log_len(reader) }, 3);
    let mut replayed = ptr::null_mut();
    assert_eq!(unsafe { rdfm_log_replay(reader, 0, 2, &mut replayed) }, RdfmStatus::Ok);
    assert_eq!(counts(replayed), [2, 0, 2]);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { rdfm_log_read(reader, 3, &mut m) }, RdfmStatus::OutOfRange);
    assert_eq!(unsafe { rdfm_log_append(reader, ptr::null(), ptr::null_mut()) }, RdfmStatus::InvalidArgument);
    let empty = message(list, 1);
    assert_eq!(unsafe { rdfm_log_append(reader, empty, ptr::null_mut()) }, RdfmStatus::ReadOnly);
    unsafe {
        rdfm_message_free(empty);
        rdfm_message_list_free(replayed);
        rdfm_message_list_free(list);
        rdfm_log_free(reader);
    }

    let missing = CString::new(dir.path().join("nope.nqm").to_str().unwrap()).unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { rdfm_log_open(missing.as_ptr(), false, false, &mut none) }, RdfmStatus::NotFound);
}

#[test]
fn errors_and_null_handling() {
    let mut list = ptr::null_mut();
    let doc = b"<http://e/s> <http://e/p> <http://e/o> .\n";
    assert_eq!(unsafe { rdfm_parse(RdfmFormat::Trigm, doc.as_ptr(), doc.len(), true, &mut list) }, RdfmStatus::Syntax);
    assert!(list.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { rdfm_parse(RdfmFormat::Trigm, doc.as_ptr(), doc.len(), false, &mut list) }, RdfmStatus::Ok);
    assert!(rdfm_last_error().is_null());
    assert_eq!(unsafe { rdfm_parse(RdfmFormat::Trigm, ptr::null(), 4, true, &mut list) }, RdfmStatus::InvalidArgument);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { rdfm_message_list_get(list, 9, &mut m) }, RdfmStatus::OutOfRange);
    assert_eq!(unsafe { rdfm_message_list_get(ptr::null(), 0, &mut m) }, RdfmStatus::InvalidArgument);
    unsafe {
        assert_eq!(rdfm_message_list_len(ptr::null()), 0);
        rdfm_message_list_free(list);
        rdfm_message_list_free(ptr::null_mut());
        rdfm_message_free(ptr::null_mut());
        rdfm_buffer_free(RdfmBuffer { data: ptr::null_mut(), len: 0 });
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rdf_messages.h")).unwrap();
    for name in ["rdfm_parse(", "rdfm_parser_feed(", "rdfm_log_open(", "rdfm_last_error(", "RDFM_STATUS_INDEX_CORRUPT"] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = target_dir().join("librdf_messages_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
