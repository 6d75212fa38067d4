mod common;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use common::*;
use rdf_messages::{parse_nqm, parse_trigm};

fn run(args: &[&str], stdin: Option<&[u8]>) -> Output {
    run_env(args, stdin, &[])
}

fn run_env(args: &[&str], stdin: Option<&[u8]>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rdfmsg"));
    cmd.args(args).env_remove("RDFMSG_DEFAULT_FORMAT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(input) = stdin {
        pipe.write_all(input).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn readings_log(dir: &Path) -> String {
    let log = dir.join("l2.nqm").to_str().unwrap().to_owned();
    let o = run(&["log", "append", &log], Some(READINGS_NQM.as_bytes()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    log
}

#[test]
fn validate_counts() {
    let dir = tempfile::tempdir().unwrap();
    let trig = write(dir.path(), "l2.trigm", &readings_document());
    let o = run(&["validate", &trig], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "messages=3 quads=4 empty=1");

    let o = run(&["validate", "-", "--format", "nqm"], Some(READINGS_NQM.as_bytes()));
    assert_eq!(stdout(&o).trim(), "messages=3 quads=4 empty=1");
}

#[test]
fn validate_failures() {
    let dir = tempfile::tempdir().unwrap();
    let without = readings_document().split_once('\n').unwrap().1.to_owned();
    let f = write(dir.path(), "nov.trig", &without);
    let o = run(&["validate", &f], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("rdfmsg: "));
    let o = run(&["validate", &f, "--lenient"], None);
    assert_eq!(stdout(&o).trim(), "messages=3 quads=4 empty=1");
    let plain = write(dir.path(), "plain.trig", &format!("{PREFIX_HEADER}{OBSERVATION}"));
    let o = run(&["validate", &plain, "--lenient"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "messages=1 quads=4 empty=0");
    let empty = write(dir.path(), "empty.trigm", "");
    assert_eq!(run(&["validate", &empty], None).status.code(), Some(1));
    assert_eq!(run(&["validate", "/nonexistent/x.trigm"], None).status.code(), Some(3));
    assert_eq!(run(&["validate", "--bogus"], None).status.code(), Some(2));
}

#[test]
fn format_from_env() {
    let o = run_env(&["validate"], Some(READINGS_NQM.as_bytes()), &[("RDFMSG_DEFAULT_FORMAT", "nqm")]);
    assert_eq!(stdout(&o).trim(), "messages=3 quads=4 empty=1");
    // the flag wins over the environment
    let doc = readings_document();
    let o = run_env(&["validate", "--format", "trigm"], Some(doc.as_bytes()), &[("RDFMSG_DEFAULT_FORMAT", "nqm")]);
    assert_eq!(stdout(&o).trim(), "messages=3 quads=4 empty=1");
}

#[test]
fn convert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let trig = write(dir.path(), "l2.trigm", &readings_document());
    let nq = dir.path().join("l2.nqm");
    let back = dir.path().join("back.trigm");
    assert!(run(&["convert", &trig, nq.to_str().unwrap()], None).status.success());
    assert!(run(&["convert", nq.to_str().unwrap(), back.to_str().unwrap()], None).status.success());
    let original = parse_trigm(readings_document().as_bytes(), true).unwrap();
    let via = parse_nqm(fs::read(&nq).unwrap().as_slice()).unwrap();
    let again = parse_trigm(&fs::read(&back).unwrap(), true).unwrap();
    assert!(naive_sequences_isomorphic(&original, &via));
    assert!(naive_sequences_isomorphic(&original, &again));

    let o = run(&["convert", "-", "-", "--from", "nqm", "--to", "trigm"], Some(READINGS_NQM.as_bytes()));
    assert!(o.status.success());
    assert!(naive_sequences_isomorphic(&original, &parse_trigm(&o.stdout, true).unwrap()));
}

#[test]
fn split_writes_one_file_per_message() {
    let dir = tempfile::tempdir().unwrap();
    let trig = write(dir.path(), "l2.trigm", &readings_document());
    let out = dir.path().join("parts");
    assert!(run(&["split", &trig, "--out-dir", out.to_str().unwrap()], None).status.success());
    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["msg-000000.trig", "msg-000001.trig", "msg-000002.trig"]);
    let sizes: Vec<usize> = names
        .iter()
        .map(|n| rdf_messages::parse_trig_message(&fs::read(out.join(n)).unwrap()).unwrap().len())
        .collect();
    assert_eq!(sizes, [2, 0, 2]);
    assert_eq!(run(&["split", &trig, "--out-dir", out.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn log_commands() {
    let dir = tempfile::tempdir().unwrap();
    let log = readings_log(dir.path());
    let idx = fs::read_to_string(format!("{log}.idx")).unwrap();
    assert_eq!(idx, "#rdfmlog-index v1\n0\t23\t222\t2\n1\t245\t8\t0\n2\t253\t222\t2\n");

    let o = run(&["log", "read", &log, "--seq", "1"], None);
    assert_eq!(stdout(&o), "VERSION \"1.2-messages\"\nMESSAGE\n");
    let o = run(&["log", "read", &log, "--seq", "3"], None);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["log", "replay", &log], None);
    let replayed = parse_nqm(o.stdout.as_slice()).unwrap();
    assert!(naive_sequences_isomorphic(&replayed, &parse_nqm(READINGS_NQM.as_bytes()).unwrap()));
    let o = run(&["log", "replay", &log, "--from", "2", "--to", "2"], None);
    assert_eq!(parse_nqm(o.stdout.as_slice()).unwrap().len(), 1);
    let o = run(&["log", "replay", &log, "--pace", "chronology", "--speed", "1000", "--chronology-predicate", &format!("{SOSA}resultTime")], None);
    assert_eq!(parse_nqm(o.stdout.as_slice()).unwrap().len(), 3);

    let o = run(&["log", "verify", &log], None);
    assert_eq!(stdout(&o).trim(), "ok messages=3");

    let perturbed = idx.replacen("\t23\t", "\t24\t", 1);
    fs::write(format!("{log}.idx"), perturbed).unwrap();
    assert_eq!(run(&["log", "verify", &log], None).status.code(), Some(3));
}

#[test]
fn check_order_on_files_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    let sosa = format!("{SOSA}resultTime");
    let log = readings_log(dir.path());
    let o = run(&["check-order", &log, "--chronology-predicate", &sosa], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());

    let lines: Vec<&str> = READINGS_NQM.lines().collect();
    let reversed = format!("{}\n{}\n{}\nMESSAGE\nMESSAGE\n{}\n{}\n", lines[0], lines[5], lines[6], lines[1], lines[2]);
    let f = write(dir.path(), "rev.nqm", &reversed);
    let o = run(&["check-order", &f, "--chronology-predicate", &sosa], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "(0, 2, 2026-05-12T18:25:00Z, 2026-05-12T18:20:00Z)");

    let cfg = write(dir.path(), "p.conf", &format!("chronology=<{sosa}>\nscope=default\n"));
    assert_eq!(run(&["check-order", &f, "--profile", &cfg], None).status.code(), Some(1));
    let bad = write(dir.path(), "bad.conf", "scope=default\n");
    assert_eq!(run(&["check-order", &f, "--profile", &bad], None).status.code(), Some(2));
}

#[test]
fn skolemize_output() {
    let dir = tempfile::tempdir().unwrap();
    let log = readings_log(dir.path());
    let o = run(&["skolemize", &log, "--base", "http://ex.org", "--format", "nqm"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("<http://ex.org/.well-known/genid/000000/b0>"));
    assert!(text.contains("<http://ex.org/.well-known/genid/000002/b0>"));
    assert!(!text.contains("_:"));

    let out = dir.path().join("sk.trigm");
    let o = run(&["skolemize", &log, "--base", "http://ex.org", "--id-template", "hash", "-o", out.to_str().unwrap()], None);
    assert!(o.status.success());
    let ms = parse_trigm(&fs::read(&out).unwrap(), true).unwrap();
    assert_eq!(ms.iter().map(|m| m.len()).collect::<Vec<_>>(), [2, 0, 2]);
    assert!(ms.iter().all(|m| m.blank_nodes().is_empty()));
    assert_ne!(ms[0].quads()[0].subject, ms[2].quads()[0].subject);

    assert_eq!(run(&["skolemize", &log, "--base", "not an iri"], None).status.code(), Some(2));
}
