//! Test support: fixtures, a naive isomorphism oracle and random generators.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rdf_messages::syntax::PrefixMap;
use rdf_messages::{BlankNode, GraphName, Iri, Literal, Message, Quad, Subject, Term};

pub const PROV: &str = "http://www.w3.org/ns/prov#";
pub const SOSA: &str = "http://www.w3.org/ns/sosa/";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const EX: &str = "http://example.org/";

pub const PREFIX_HEADER: &str = "PREFIX prov: <http://www.w3.org/ns/prov#>\n\
PREFIX sosa: <http://www.w3.org/ns/sosa/>\n\
PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n\
PREFIX ex: <http://example.org/>\n";

pub const OBSERVATION: &str = r#"_:b0 prov:generatedAtTime "2026-01-30T10:05:34Z"^^xsd:dateTime .
_:b0 {  ex:Observation1 a sosa:Observation ;
          sosa:resultTime "2026-01-30T09:52:30Z"^^xsd:dateTime ;
          sosa:hasSimpleResult 21.4 . }
"#;

pub const READINGS: &str = r#"VERSION "1.2-messages" # prefixes supplied by the reader
_:b0 sosa:resultTime "2026-05-12T18:20:00Z"^^xsd:dateTime ;
    sosa:hasSimpleResult 22 .
MESSAGE # heartbeat
MESSAGE # next reading follows
_:b0 sosa:resultTime "2026-05-12T18:25:00Z"^^xsd:dateTime ;
    sosa:hasSimpleResult 23 .
"#;

/// The sensor readings stream (reading, heartbeat, reading) in N-Quads-Messages.
pub const READINGS_NQM: &str = "VERSION \"1.2-messages\"
_:b0 <http://www.w3.org/ns/sosa/resultTime> \"2026-05-12T18:20:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
_:b0 <http://www.w3.org/ns/sosa/hasSimpleResult> \"22\"^^<http://www.w3.org/2001/XMLSchema#integer> .
MESSAGE
MESSAGE
_:b0 <http://www.w3.org/ns/sosa/resultTime> \"2026-05-12T18:25:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
_:b0 <http://www.w3.org/ns/sosa/hasSimpleResult> \"23\"^^<http://www.w3.org/2001/XMLSchema#integer> .
";

pub fn prefixes() -> PrefixMap {
    [("prov", PROV), ("sosa", SOSA), ("xsd", XSD), ("ex", EX)]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

/// The sensor readings stream as TriG-Messages with prefixes after the VERSION line.
pub fn readings_document() -> String {
    let (version, rest) = READINGS.split_once('\n').unwrap();
    format!("{version}\n{PREFIX_HEADER}{rest}")
}

/// The observation as a one-message TriG-Messages document.
pub fn observation_document() -> String {
    format!("VERSION \"1.2-messages\"\n{PREFIX_HEADER}{OBSERVATION}MESSAGE\n")
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn bnode(l: &str) -> BlankNode {
    BlankNode::new(l).unwrap()
}

pub fn typed(lex: &str, dt: &str) -> Literal {
    Literal::new_typed(lex, iri(dt)).unwrap()
}

// ---- naive oracle ------------------------------------------------------

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Key {
    Iri(String),
    Lit(String, String, Option<String>),
    Blank(String),
    Default,
}

fn subject_key(s: &Subject) -> Key {
    match s {
        Subject::Iri(i) => Key::Iri(i.as_str().to_owned()),
        Subject::BlankNode(b) => Key::Blank(b.label().to_owned()),
    }
}

fn term_key(t: &Term) -> Key {
    match t {
        Term::Iri(i) => Key::Iri(i.as_str().to_owned()),
        Term::BlankNode(b) => Key::Blank(b.label().to_owned()),
        Term::Literal(l) => Key::Lit(
            l.lexical().to_owned(),
            l.datatype().as_str().to_owned(),
            l.language().map(str::to_owned),
        ),
    }
}

fn graph_key(g: &GraphName) -> Key {
    match g {
        GraphName::DefaultGraph => Key::Default,
        GraphName::Iri(i) => Key::Iri(i.as_str().to_owned()),
        GraphName::BlankNode(b) => Key::Blank(b.label().to_owned()),
    }
}

type QuadKey = [Key; 4];

fn keys(m: &Message) -> Vec<QuadKey> {
    m.quads()
        .iter()
        .map(|q| [subject_key(&q.subject), Key::Iri(q.predicate.as_str().to_owned()), term_key(&q.object), graph_key(&q.graph)])
        .collect()
}

fn labels(ks: &[QuadKey]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    for q in ks {
        for k in q {
            if let Key::Blank(l) = k {
                seen.insert(l.clone());
            }
        }
    }
    seen.into_iter().collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Tries every bijection between the two label sets and compares quad sets.
pub fn naive_isomorphic(a: &Message, b: &Message) -> bool {
    let ka = keys(a);
    let kb = keys(b);
    let sa: BTreeSet<QuadKey> = ka.iter().cloned().collect();
    let sb: BTreeSet<QuadKey> = kb.iter().cloned().collect();
    if sa.len() != sb.len() {
        return false;
    }
    let la = labels(&ka);
    let lb = labels(&kb);
    if la.len() != lb.len() {
        return false;
    }
    assert!(la.len() <= 8, "oracle limited to small messages");
    for perm in permutations(la.len()) {
        let rename = |k: &Key| match k {
            Key::Blank(l) => Key::Blank(lb[perm[la.iter().position(|x| x == l).unwrap()]].clone()),
            other => other.clone(),
        };
        let mapped: BTreeSet<QuadKey> = sa.iter().map(|q| [rename(&q[0]), rename(&q[1]), rename(&q[2]), rename(&q[3])]).collect();
        if mapped == sb {
            return true;
        }
    }
    false
}

pub fn naive_sequences_isomorphic(a: &[Message], b: &[Message]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| naive_isomorphic(x, y))
}

// ---- random generation --------------------------------------------------

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const LABELS: &[&str] = &["b0", "b1", "x", "g0", "node-2", "a.b", "0a", "_u", "é"];

const LEXICALS: &[&str] = &[
    "plain",
    "",
    "with \"quotes\"",
    "back\\slash",
    "line\nbreak",
    "tab\there",
    "cr\rlf",
    "ctrl\u{1}\u{7f}",
    "snow ☃ and 𝄞",
    "'single'",
    "trailing space ",
    "#not a comment",
    "MESSAGE",
    "\"\"\"",
];

fn random_iri(rng: &mut StdRng) -> Iri {
    let choices = [
        "http://example.org/a",
        "http://example.org/b",
        "http://example.org/p",
        "http://example.org/q",
        "http://example.org/",
        "http://example.org/with.dot",
        "http://example.org/path/seg",
        "http://example.org/café",
        "http://www.w3.org/ns/sosa/resultTime",
        "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
        "urn:x-test:1",
        "http://other.example/x?y=1#frag",
    ];
    iri(choices.choose(rng).unwrap())
}

fn random_literal(rng: &mut StdRng) -> Literal {
    match rng.gen_range(0..9) {
        0 => Literal::new_simple(*LEXICALS.choose(rng).unwrap()),
        1 => Literal::new_language_tagged(*LEXICALS.choose(rng).unwrap(), *["en", "en-GB", "nl", "de-CH-1996"].choose(rng).unwrap()).unwrap(),
        2 => typed(&rng.gen_range(-1000i64..1000).to_string(), "http://www.w3.org/2001/XMLSchema#integer"),
        3 => typed(["21.4", "-0.5", ".5", "5.0", "+1.25"].choose(rng).unwrap(), "http://www.w3.org/2001/XMLSchema#decimal"),
        4 => typed(["1e5", "1.5E-3", "-2.0e0", ".5e1"].choose(rng).unwrap(), "http://www.w3.org/2001/XMLSchema#double"),
        5 => typed(["true", "false"].choose(rng).unwrap(), "http://www.w3.org/2001/XMLSchema#boolean"),
        6 => typed(
            &format!("2026-05-12T18:{:02}:{:02}Z", rng.gen_range(0..60), rng.gen_range(0..60)),
            "http://www.w3.org/2001/XMLSchema#dateTime",
        ),
        7 => typed(["abc", "5.", "01", " 7", "1e"].choose(rng).unwrap(), "http://www.w3.org/2001/XMLSchema#integer"),
        _ => typed(LEXICALS.choose(rng).unwrap(), "http://example.org/dt"),
    }
}

/// A random message of at most `max_quads` quads using at most `max_blank`
/// distinct blank node labels.
pub fn random_message(rng: &mut StdRng, max_quads: usize, max_blank: usize) -> Message {
    let labels: Vec<&str> = LABELS.choose_multiple(rng, max_blank.min(LABELS.len())).copied().collect();
    let blank = |rng: &mut StdRng| -> Option<BlankNode> {
        if labels.is_empty() {
            None
        } else {
            Some(bnode(labels.choose(rng).unwrap()))
        }
    };
    let n = rng.gen_range(0..=max_quads);
    let mut quads = Vec::with_capacity(n);
    for _ in 0..n {
        let subject: Subject = match (rng.gen_bool(0.5), blank(rng)) {
            (true, Some(b)) => b.into(),
            _ => random_iri(rng).into(),
        };
        let object: Term = match rng.gen_range(0..3) {
            0 => random_iri(rng).into(),
            1 => match blank(rng) {
                Some(b) => b.into(),
                None => random_literal(rng).into(),
            },
            _ => random_literal(rng).into(),
        };
        let graph = match rng.gen_range(0..4) {
            0 => GraphName::Iri(iri("http://example.org/g1")),
            1 => match blank(rng) {
                Some(b) => b.into(),
                None => GraphName::DefaultGraph,
            },
            _ => GraphName::DefaultGraph,
        };
        quads.push(Quad::new(subject, random_iri(rng), object, graph));
    }
    Message::new(quads).unwrap()
}

/// Random messages where roughly `empty_ratio` of them are empty.
pub fn random_messages(rng: &mut StdRng, count: usize, max_quads: usize, max_blank: usize, empty_ratio: f64) -> Vec<Message> {
    (0..count)
        .map(|_| if rng.gen_bool(empty_ratio) { Message::empty() } else { random_message(rng, max_quads, max_blank) })
        .collect()
}

/// Renames every blank node label through `f`, keeping one scope per message.
pub fn relabel(m: &Message, f: impl Fn(&str) -> String) -> Message {
    Message::new(m.quads().iter().map(|q| q.map_blank_nodes(|b| bnode(&f(b.label()))))).unwrap()
}

/// Splits `bytes` at random cut points.
pub fn random_chunks<'a>(rng: &mut StdRng, bytes: &'a [u8]) -> Vec<&'a [u8]> {
    let mut cuts: Vec<usize> = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..=bytes.len())).collect();
    cuts.push(0);
    cuts.push(bytes.len());
    cuts.sort_unstable();
    cuts.windows(2).map(|w| &bytes[w[0]..w[1]]).collect()
}

/// Proptest settings that keep regression files out of the source tree.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}
