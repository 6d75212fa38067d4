use std::io::{self, Write};

use crate::message::Message;
use crate::syntax::{PrefixMap, VERSION_LINE};
use crate::term::{GraphName, Iri, Literal, Quad, Subject, Term};
use crate::vocab::{rdf, xsd};
use crate::CountingWriter;

/// Writes a TriG-Messages document: VERSION line, `PREFIX` lines, then every
/// message followed by a `MESSAGE` line. Returns the bytes written.
pub fn write_trigm<'a, W: Write>(
    messages: impl IntoIterator<Item = &'a Message>,
    sink: W,
    prefixes: &PrefixMap,
) -> io::Result<u64> {
    let mut w = CountingWriter::new(sink);
    w.write_all(VERSION_LINE.as_bytes())?;
    write_prefixes(&mut w, prefixes)?;
    for m in messages {
        write_statements(&mut w, m, prefixes)?;
        w.write_all(b"MESSAGE\n")?;
    }
    w.flush()?;
    Ok(w.count())
}

/// Writes one message as plain TriG, with no VERSION or MESSAGE lines.
/// An empty message with no prefixes produces no bytes at all.
pub fn write_trig_message<W: Write>(message: &Message, sink: W, prefixes: &PrefixMap) -> io::Result<u64> {
    let mut w = CountingWriter::new(sink);
    write_prefixes(&mut w, prefixes)?;
    write_statements(&mut w, message, prefixes)?;
    w.flush()?;
    Ok(w.count())
}

fn write_prefixes<W: Write>(w: &mut W, prefixes: &PrefixMap) -> io::Result<()> {
    for (name, ns) in prefixes {
        writeln!(w, "PREFIX {name}: <{ns}>")?;
    }
    Ok(())
}

fn write_statements<W: Write>(w: &mut W, m: &Message, prefixes: &PrefixMap) -> io::Result<()> {
    let quads = m.quads();
    let mut i = 0;
    while i < quads.len() {
        let graph = &quads[i].graph;
        let run = quads[i..].iter().take_while(|q| &q.graph == graph).count();
        let block = &quads[i..i + run];
        match graph {
            GraphName::DefaultGraph => write_triples(w, block, prefixes, "")?,
            GraphName::Iri(g) => {
                writeln!(w, "{} {{", iri_token(g, prefixes))?;
                write_triples(w, block, prefixes, "    ")?;
                w.write_all(b"}\n")?;
            }
            GraphName::BlankNode(b) => {
                writeln!(w, "{b} {{")?;
                write_triples(w, block, prefixes, "    ")?;
                w.write_all(b"}\n")?;
            }
        }
        i += run;
    }
    Ok(())
}

/// Consecutive quads with one subject share a `;` group.
fn write_triples<W: Write>(w: &mut W, quads: &[Quad], prefixes: &PrefixMap, indent: &str) -> io::Result<()> {
    let mut i = 0;
    while i < quads.len() {
        let subject = &quads[i].subject;
        let run = quads[i..].iter().take_while(|q| &q.subject == subject).count();
        write!(w, "{indent}{}", subject_token(subject, prefixes))?;
        for (k, q) in quads[i..i + run].iter().enumerate() {
            if k > 0 {
                write!(w, " ;\n{indent}    ")?;
            } else {
                w.write_all(b" ")?;
            }
            write!(w, "{} {}", predicate_token(&q.predicate, prefixes), object_token(&q.object, prefixes))?;
        }
        w.write_all(b" .\n")?;
        i += run;
    }
    Ok(())
}

fn subject_token(s: &Subject, prefixes: &PrefixMap) -> String {
    match s {
        Subject::Iri(i) => iri_token(i, prefixes),
        Subject::BlankNode(b) => b.to_string(),
    }
}

fn predicate_token(p: &Iri, prefixes: &PrefixMap) -> String {
    if p.as_str() == rdf::TYPE {
        "a".to_owned()
    } else {
        iri_token(p, prefixes)
    }
}

fn object_token(o: &Term, prefixes: &PrefixMap) -> String {
    match o {
        Term::Iri(i) => iri_token(i, prefixes),
        Term::BlankNode(b) => b.to_string(),
        Term::Literal(l) => literal_token(l, prefixes),
    }
}

fn iri_token(iri: &Iri, prefixes: &PrefixMap) -> String {
    let s = iri.as_str();
    let best = prefixes
        .iter()
        .filter(|(_, ns)| s.starts_with(ns.as_str()) && is_safe_local(&s[ns.len()..]))
        .max_by_key(|(_, ns)| ns.len());
    match best {
        Some((name, ns)) => format!("{name}:{}", &s[ns.len()..]),
        None => iri.to_string(),
    }
}

/// A conservative subset of PN_LOCAL that needs no escaping.
fn is_safe_local(local: &str) -> bool {
    match local.chars().next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

fn literal_token(l: &Literal, prefixes: &PrefixMap) -> String {
    let lex = l.lexical();
    let dt = l.datatype().as_str();
    let bare = match dt {
        xsd::INTEGER => is_integer(lex),
        xsd::DECIMAL => is_decimal(lex),
        xsd::DOUBLE => is_double(lex),
        xsd::BOOLEAN => lex == "true" || lex == "false",
        _ => false,
    };
    if bare {
        return lex.to_owned();
    }
    let mut out = String::with_capacity(lex.len() + 2);
    crate::nqm::escape_string_into(lex, &mut out);
    if let Some(lang) = l.language() {
        out.push('@');
        out.push_str(lang);
    } else if dt != xsd::STRING {
        out.push_str("^^");
        out.push_str(&iri_token(l.datatype(), prefixes));
    }
    out
}

fn unsigned(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer(s: &str) -> bool {
    digits(unsigned(s))
}

fn is_decimal(s: &str) -> bool {
    match unsigned(s).split_once('.') {
        Some((int, frac)) => (int.is_empty() || digits(int)) && digits(frac),
        None => false,
    }
}

fn is_double(s: &str) -> bool {
    let Some((mantissa, exp)) = unsigned(s).split_once(['e', 'E']) else {
        return false;
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((int, frac)) => {
            (digits(int) && (frac.is_empty() || digits(frac))) || (int.is_empty() && digits(frac))
        }
        None => digits(mantissa),
    };
    mantissa_ok && is_integer(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_shorthand_detection() {
        assert!(is_integer("22") && is_integer("-7") && !is_integer("2.0") && !is_integer("+"));
        assert!(is_decimal("21.4") && is_decimal(".5") && !is_decimal("5.") && !is_decimal("1"));
        assert!(is_double("1e5") && is_double("1.E-2") && is_double(".5e1") && !is_double("e5") && !is_double("1.5"));
    }

    #[test]
    fn prefix_compaction_is_conservative() {
        let mut p = PrefixMap::new();
        p.insert("ex".into(), "http://ex.org/".into());
        let iri = |s: &str| Iri::new(s).unwrap();
        assert_eq!(iri_token(&iri("http://ex.org/a-b"), &p), "ex:a-b");
        assert_eq!(iri_token(&iri("http://ex.org/"), &p), "ex:");
        assert_eq!(iri_token(&iri("http://ex.org/a.b"), &p), "<http://ex.org/a.b>");
        assert_eq!(iri_token(&iri("http://ex.org/a/b"), &p), "<http://ex.org/a/b>");
    }
}
