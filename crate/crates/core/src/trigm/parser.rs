//! Incremental TriG-Messages parser.
//!
//! Tokens are collected until they might close a unit (a directive, a
//! triples statement, a graph-block bracket, or a `MESSAGE` line). The unit
//! is then parsed from the queued tokens; if it turns out to be incomplete
//! the tokens stay queued until more arrive. Quads of the current message
//! are the only statement data retained between units.

use std::collections::{HashMap, HashSet};

use oxiri::Iri as ParsedIri;

use crate::message::Message;
use crate::syntax::{ByteSpan, Position, PrefixMap, SyntaxError, SyntaxErrorKind, MESSAGES_VERSION};
use crate::term::{BlankNode, GraphName, Iri, Literal, Quad, Subject, Term};
use crate::trigm::lexer::{Lexed, Lexer, Tok, Token};
use crate::vocab::{rdf, xsd};

#[derive(Debug)]
pub enum ParserEvent {
    /// A complete message and the bytes it was read from.
    MessageReady { message: Message, span: ByteSpan },
    NeedMoreInput,
    EndOfLog,
}

impl ParserEvent {
    pub fn into_message(self) -> Option<Message> {
        match self {
            ParserEvent::MessageReady { message, .. } => Some(message),
            _ => None,
        }
    }
}

/// Fresh blank nodes (from `[]` and collections) get a placeholder label
/// that cannot clash with a written one; it is replaced when the message is
/// emitted.
const FRESH_MARK: char = '\0';

#[derive(Debug)]
pub struct TrigmParser {
    lexer: Lexer,
    tokens: Vec<Token>,
    prefixes: PrefixMap,
    base: Option<ParsedIri<String>>,
    require_version: bool,
    version: Option<String>,
    started: bool,
    graph: Option<GraphName>,
    pending: Vec<Quad>,
    has_statement: bool,
    span_start: u64,
    fresh: u32,
    poisoned: Option<SyntaxError>,
    finished: bool,
}

enum Action {
    Version(String),
    Prefix(String, String),
    Base(ParsedIri<String>),
    Message,
    OpenGraph(GraphName),
    CloseGraph,
    Triples(Vec<Quad>, u32),
}

/// Why a unit could not be parsed from the queued tokens.
enum Stop {
    Incomplete,
    Error(SyntaxError),
}

impl From<SyntaxError> for Stop {
    fn from(e: SyntaxError) -> Self {
        Stop::Error(e)
    }
}

type Step<T> = Result<T, Stop>;

impl TrigmParser {
    /// With `require_version`, the document must open with `VERSION "1.2-messages"`.
    pub fn new(require_version: bool) -> Self {
        Self::with_prefixes(require_version, PrefixMap::new())
    }

    /// Starts with prefixes already declared, as if by a document header.
    pub fn with_prefixes(require_version: bool, prefixes: PrefixMap) -> Self {
        TrigmParser {
            lexer: Lexer::new(),
            tokens: Vec::new(),
            prefixes,
            base: None,
            require_version,
            version: None,
            started: false,
            graph: None,
            pending: Vec::new(),
            has_statement: false,
            span_start: 0,
            fresh: 0,
            poisoned: None,
            finished: false,
        }
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    /// Quads parsed for the message currently being read.
    pub fn pending_quads(&self) -> usize {
        self.pending.len()
    }

    /// Bytes held that are not yet part of a parsed statement.
    pub fn buffered_bytes(&self) -> usize {
        self.lexer.buffered()
    }

    pub fn position(&self) -> Position {
        self.lexer.position()
    }

    /// Consumes a chunk and returns the messages it completed, followed by
    /// [`ParserEvent::NeedMoreInput`].
    pub fn feed(&mut self, bytes: &[u8]) -> Result<Vec<ParserEvent>, SyntaxError> {
        self.check_usable()?;
        self.lexer.push(bytes);
        let mut events = Vec::new();
        self.run(&mut events)
            .map_err(|e| self.poison(e))?;
        events.push(ParserEvent::NeedMoreInput);
        Ok(events)
    }

    /// Signals end of input: flushes a trailing message and reports [`ParserEvent::EndOfLog`].
    pub fn finish(&mut self) -> Result<Vec<ParserEvent>, SyntaxError> {
        self.check_usable()?;
        self.lexer.set_eof();
        let mut events = Vec::new();
        let result = self.run(&mut events).and_then(|()| self.close(&mut events));
        result.map_err(|e| self.poison(e))?;
        self.finished = true;
        events.push(ParserEvent::EndOfLog);
        Ok(events)
    }

    fn check_usable(&self) -> Result<(), SyntaxError> {
        if let Some(e) = &self.poisoned {
            return Err(e.clone());
        }
        if self.finished {
            return Err(self.lexer.position().error(SyntaxErrorKind::UnexpectedToken, "parser already finished"));
        }
        Ok(())
    }

    fn poison(&mut self, e: SyntaxError) -> SyntaxError {
        self.poisoned = Some(e.clone());
        self.pending.clear();
        self.tokens.clear();
        e
    }

    fn run(&mut self, events: &mut Vec<ParserEvent>) -> Result<(), SyntaxError> {
        loop {
            match self.lexer.next()? {
                Lexed::NeedMore | Lexed::Eof => return Ok(()),
                Lexed::Token(t) => {
                    let closes = matches!(
                        t.tok,
                        Tok::Dot | Tok::LBrace | Tok::RBrace | Tok::IriRef(_) | Tok::Str(_) | Tok::Message
                    );
                    self.tokens.push(t);
                    if closes {
                        self.drain_units(events, false)?;
                    }
                }
            }
        }
    }

    fn close(&mut self, events: &mut Vec<ParserEvent>) -> Result<(), SyntaxError> {
        self.drain_units(events, true)?;
        let end = self.lexer.position();
        if self.require_version && self.version.is_none() {
            return Err(Position::START.error(SyntaxErrorKind::VersionMissing, "document has no VERSION announcement"));
        }
        if self.graph.is_some() {
            return Err(end.error(SyntaxErrorKind::UnexpectedToken, "unexpected end of input inside a graph block"));
        }
        if self.has_statement {
            self.emit(events, end.offset);
        }
        Ok(())
    }

    fn drain_units(&mut self, events: &mut Vec<ParserEvent>, eof: bool) -> Result<(), SyntaxError> {
        while !self.tokens.is_empty() {
            let head = &self.tokens[0];
            if self.require_version && self.version.is_none() && head.tok != Tok::Version {
                return Err(head.pos.error(SyntaxErrorKind::VersionMissing, "expected VERSION \"1.2-messages\" first"));
            }
            let (consumed, action) = match self.parse_unit() {
                Ok(v) => v,
                Err(Stop::Incomplete) if eof => {
                    let at = self.lexer.position();
                    return Err(at.error(SyntaxErrorKind::UnexpectedToken, "unexpected end of input"));
                }
                Err(Stop::Incomplete) => return Ok(()),
                Err(Stop::Error(e)) => return Err(e),
            };
            let first = self.tokens[0].pos;
            let last_end = self.tokens[consumed - 1].end;
            self.tokens.drain(..consumed);
            self.apply(action, first, last_end, events)?;
        }
        Ok(())
    }

    fn apply(
        &mut self,
        action: Action,
        at: Position,
        end: u64,
        events: &mut Vec<ParserEvent>,
    ) -> Result<(), SyntaxError> {
        if let Action::Version(v) = &action {
            if self.started {
                return Err(at.error(SyntaxErrorKind::UnexpectedToken, "VERSION must come before anything else"));
            }
            if self.require_version && v != MESSAGES_VERSION {
                return Err(at.error(SyntaxErrorKind::VersionUnsupported, format!("unsupported version {v:?}")));
            }
        } else if self.require_version && self.version.is_none() {
            return Err(at.error(SyntaxErrorKind::VersionMissing, "expected VERSION \"1.2-messages\" first"));
        }
        self.started = true;
        match action {
            Action::Version(v) => {
                self.version = Some(v);
                self.span_start = end;
            }
            Action::Prefix(name, ns) => {
                self.prefixes.insert(name, ns);
            }
            Action::Base(iri) => self.base = Some(iri),
            Action::Message => self.emit(events, end),
            Action::OpenGraph(g) => {
                self.graph = Some(g);
                self.has_statement = true;
            }
            Action::CloseGraph => self.graph = None,
            Action::Triples(quads, fresh) => {
                self.pending.extend(quads);
                self.fresh = fresh;
                self.has_statement = true;
            }
        }
        Ok(())
    }

    fn emit(&mut self, events: &mut Vec<ParserEvent>, end: u64) {
        let quads = std::mem::take(&mut self.pending);
        let message = finalize_fresh_labels(quads);
        events.push(ParserEvent::MessageReady {
            message,
            span: ByteSpan { start: self.span_start, end },
        });
        self.span_start = end;
        self.has_statement = false;
        self.fresh = 0;
    }

    fn parse_unit(&self) -> Step<(usize, Action)> {
        let mut u = Unit {
            toks: &self.tokens,
            i: 0,
            prefixes: &self.prefixes,
            base: self.base.as_ref(),
            fresh: self.fresh,
            quads: Vec::new(),
            graph: self.graph.clone().unwrap_or_default(),
        };
        let action = match &self.graph {
            None => u.top_level()?,
            Some(_) => u.in_graph()?,
        };
        Ok((u.i, action))
    }
}

/// Replaces placeholder labels with `g<n>` labels unused in the message.
fn finalize_fresh_labels(quads: Vec<Quad>) -> Message {
    let written: HashSet<&str> = quads
        .iter()
        .flat_map(Quad::blank_nodes)
        .map(BlankNode::label)
        .filter(|l| !l.starts_with(FRESH_MARK))
        .collect();
    let has_fresh = quads.iter().flat_map(Quad::blank_nodes).any(|b| b.label().starts_with(FRESH_MARK));
    if !has_fresh {
        return Message::new(quads).expect("parser blank nodes are unscoped");
    }
    let mut names: HashMap<String, String> = HashMap::new();
    let mut next = 0u32;
    let mut fresh_name = |written: &HashSet<&str>| loop {
        let candidate = format!("g{next}");
        next += 1;
        if !written.contains(candidate.as_str()) {
            return candidate;
        }
    };
    let mut out = Vec::with_capacity(quads.len());
    for q in &quads {
        out.push(q.map_blank_nodes(|b| {
            if b.label().starts_with(FRESH_MARK) {
                let name = names.entry(b.label().to_owned()).or_insert_with(|| fresh_name(&written));
                BlankNode::new_unchecked(name.clone())
            } else {
                b.clone()
            }
        }));
    }
    Message::new(out).expect("parser blank nodes are unscoped")
}

/// Recursive-descent parse of one unit over queued tokens.
struct Unit<'a> {
    toks: &'a [Token],
    i: usize,
    prefixes: &'a PrefixMap,
    base: Option<&'a ParsedIri<String>>,
    fresh: u32,
    quads: Vec<Quad>,
    graph: GraphName,
}

impl<'a> Unit<'a> {
    fn peek(&self) -> Step<&'a Token> {
        self.toks.get(self.i).ok_or(Stop::Incomplete)
    }

    fn peek_at(&self, ahead: usize) -> Step<&'a Token> {
        self.toks.get(self.i + ahead).ok_or(Stop::Incomplete)
    }

    fn bump(&mut self) -> Step<&'a Token> {
        let t = self.peek()?;
        self.i += 1;
        Ok(t)
    }

    fn unexpected(t: &Token, expected: &str) -> Stop {
        Stop::Error(t.pos.error(SyntaxErrorKind::UnexpectedToken, format!("expected {expected}, found {}", describe(&t.tok))))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Step<()> {
        let t = self.bump()?;
        if t.tok == want {
            Ok(())
        } else {
            Err(Self::unexpected(t, what))
        }
    }

    fn top_level(&mut self) -> Step<Action> {
        let t = self.peek()?;
        match &t.tok {
            Tok::Version => {
                self.i += 1;
                let s = self.bump()?;
                match &s.tok {
                    Tok::Str(v) => Ok(Action::Version(v.clone())),
                    _ => Err(Self::unexpected(s, "a version string")),
                }
            }
            Tok::Message => {
                self.i += 1;
                Ok(Action::Message)
            }
            Tok::AtWord(w) if w == "prefix" => {
                self.i += 1;
                let a = self.prefix_decl()?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(a)
            }
            Tok::AtWord(w) if w == "base" => {
                self.i += 1;
                let a = self.base_decl()?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(a)
            }
            Tok::Prefix => {
                self.i += 1;
                self.prefix_decl()
            }
            Tok::Base => {
                self.i += 1;
                self.base_decl()
            }
            Tok::Graph => {
                self.i += 1;
                let g = self.graph_label()?;
                self.expect(Tok::LBrace, "'{'")?;
                Ok(Action::OpenGraph(g))
            }
            Tok::LBrace => {
                self.i += 1;
                Ok(Action::OpenGraph(GraphName::DefaultGraph))
            }
            Tok::IriRef(_) | Tok::PName { .. } | Tok::BlankNode(_) if self.peek_at(1)?.tok == Tok::LBrace => {
                let g = self.graph_label()?;
                self.i += 1;
                Ok(Action::OpenGraph(g))
            }
            Tok::LBracket
                if self.peek_at(1)?.tok == Tok::RBracket && self.peek_at(2)?.tok == Tok::LBrace =>
            {
                let g = self.graph_label()?;
                self.i += 1;
                Ok(Action::OpenGraph(g))
            }
            _ => {
                self.triples()?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(self.take_triples())
            }
        }
    }

    fn in_graph(&mut self) -> Step<Action> {
        let t = self.peek()?;
        match &t.tok {
            Tok::RBrace => {
                self.i += 1;
                Ok(Action::CloseGraph)
            }
            Tok::Message | Tok::Version | Tok::Prefix | Tok::Base | Tok::Graph | Tok::LBrace => {
                Err(Self::unexpected(t, "a triple or '}' inside a graph block"))
            }
            Tok::AtWord(w) if w == "prefix" || w == "base" => Err(Self::unexpected(t, "a triple or '}'")),
            _ => {
                self.triples()?;
                let t = self.peek()?;
                match t.tok {
                    Tok::Dot => self.i += 1,
                    Tok::RBrace => {}
                    _ => return Err(Self::unexpected(t, "'.' or '}'")),
                }
                Ok(self.take_triples())
            }
        }
    }

    fn take_triples(&mut self) -> Action {
        Action::Triples(std::mem::take(&mut self.quads), self.fresh)
    }

    fn prefix_decl(&mut self) -> Step<Action> {
        let t = self.bump()?;
        let name = match &t.tok {
            Tok::PName { prefix, local } if local.is_empty() => prefix.clone(),
            _ => return Err(Self::unexpected(t, "a prefix name like 'ex:'")),
        };
        let iri = self.iri_ref()?;
        Ok(Action::Prefix(name, iri.into_string()))
    }

    fn base_decl(&mut self) -> Step<Action> {
        let iri = self.iri_ref()?;
        let parsed = ParsedIri::parse(iri.into_string())
            .map_err(|e| self.toks[self.i - 1].pos.error(SyntaxErrorKind::BadIri, e.to_string()))?;
        Ok(Action::Base(parsed))
    }

    fn iri_ref(&mut self) -> Step<Iri> {
        let t = self.bump()?;
        match &t.tok {
            Tok::IriRef(raw) => Ok(self.resolve(raw, t.pos)?),
            _ => Err(Self::unexpected(t, "an IRI")),
        }
    }

    fn resolve(&self, raw: &str, pos: Position) -> Result<Iri, SyntaxError> {
        let bad = |msg: String| pos.error(SyntaxErrorKind::BadIri, msg);
        let absolute = match &self.base {
            Some(base) => {
                let reference = oxiri::IriRef::parse(raw).map_err(|e| bad(format!("invalid IRI <{raw}>: {e}")))?;
                base.resolve(&reference).map_err(|e| bad(format!("cannot resolve <{raw}>: {e}")))?.into_inner()
            }
            None => raw.to_owned(),
        };
        Iri::new(absolute).map_err(|e| bad(e.to_string()))
    }

    fn pname(&self, prefix: &str, local: &str, pos: Position) -> Result<Iri, SyntaxError> {
        let ns = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| pos.error(SyntaxErrorKind::BadIri, format!("undefined prefix {prefix:?}")))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| pos.error(SyntaxErrorKind::BadIri, e.to_string()))
    }

    fn fresh_node(&mut self) -> BlankNode {
        let b = BlankNode::new_unchecked(format!("{FRESH_MARK}{}", self.fresh));
        self.fresh += 1;
        b
    }

    fn graph_label(&mut self) -> Step<GraphName> {
        let t = self.bump()?;
        Ok(match &t.tok {
            Tok::IriRef(raw) => GraphName::Iri(self.resolve(raw, t.pos)?),
            Tok::PName { prefix, local } => GraphName::Iri(self.pname(prefix, local, t.pos)?),
            Tok::BlankNode(l) => GraphName::BlankNode(BlankNode::new_unchecked(l.clone())),
            Tok::LBracket => {
                self.expect(Tok::RBracket, "']'")?;
                GraphName::BlankNode(self.fresh_node())
            }
            _ => return Err(Self::unexpected(t, "a graph name")),
        })
    }

    fn push(&mut self, s: Subject, p: Iri, o: Term) {
        self.quads.push(Quad { subject: s, predicate: p, object: o, graph: self.graph.clone() });
    }

    fn triples(&mut self) -> Step<()> {
        let t = self.peek()?;
        match &t.tok {
            Tok::LBracket => {
                let s = self.blank_node_property_list()?;
                // the predicate list is optional after `[ ... ]`
                if !matches!(self.peek()?.tok, Tok::Dot | Tok::RBrace) {
                    self.predicate_object_list(&Subject::BlankNode(s))?;
                }
                Ok(())
            }
            _ => {
                let s = self.subject()?;
                self.predicate_object_list(&s)
            }
        }
    }

    fn subject(&mut self) -> Step<Subject> {
        let t = self.bump()?;
        Ok(match &t.tok {
            Tok::IriRef(raw) => Subject::Iri(self.resolve(raw, t.pos)?),
            Tok::PName { prefix, local } => Subject::Iri(self.pname(prefix, local, t.pos)?),
            Tok::BlankNode(l) => Subject::BlankNode(BlankNode::new_unchecked(l.clone())),
            Tok::LParen => self.collection()?,
            _ => return Err(Self::unexpected(t, "a subject")),
        })
    }

    fn predicate_object_list(&mut self, s: &Subject) -> Step<()> {
        loop {
            let p = self.verb()?;
            self.object_list(s, &p)?;
            // `;` may repeat and may trail
            let mut saw_semicolon = false;
            while self.peek()?.tok == Tok::Semicolon {
                self.i += 1;
                saw_semicolon = true;
            }
            if !saw_semicolon {
                return Ok(());
            }
            if matches!(self.peek()?.tok, Tok::Dot | Tok::RBracket | Tok::RBrace) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Step<Iri> {
        let t = self.bump()?;
        match &t.tok {
            Tok::A => Ok(crate::term::iri_const(rdf::TYPE)),
            Tok::IriRef(raw) => Ok(self.resolve(raw, t.pos)?),
            Tok::PName { prefix, local } => Ok(self.pname(prefix, local, t.pos)?),
            Tok::BlankNode(_) | Tok::LBracket => Err(Stop::Error(
                t.pos.error(SyntaxErrorKind::PredicateBlankNode, "a predicate must be an IRI"),
            )),
            _ => Err(Self::unexpected(t, "a predicate")),
        }
    }

    fn object_list(&mut self, s: &Subject, p: &Iri) -> Step<()> {
        loop {
            let o = self.object()?;
            self.push(s.clone(), p.clone(), o);
            if self.peek()?.tok != Tok::Comma {
                return Ok(());
            }
            self.i += 1;
        }
    }

    fn object(&mut self) -> Step<Term> {
        let t = self.peek()?;
        match &t.tok {
            Tok::LBracket => Ok(self.blank_node_property_list()?.into()),
            Tok::LParen => {
                self.i += 1;
                Ok(self.collection()?.into())
            }
            _ => {
                self.i += 1;
                self.simple_object(t)
            }
        }
    }

    fn simple_object(&mut self, t: &Token) -> Step<Term> {
        let typed = |lex: &str, dt: &str| -> Term {
            Literal::new_typed(lex, crate::term::iri_const(dt)).expect("not rdf:langString").into()
        };
        Ok(match &t.tok {
            Tok::IriRef(raw) => self.resolve(raw, t.pos)?.into(),
            Tok::PName { prefix, local } => self.pname(prefix, local, t.pos)?.into(),
            Tok::BlankNode(l) => BlankNode::new_unchecked(l.clone()).into(),
            Tok::Integer(l) => typed(l, xsd::INTEGER),
            Tok::Decimal(l) => typed(l, xsd::DECIMAL),
            Tok::Double(l) => typed(l, xsd::DOUBLE),
            Tok::True => typed("true", xsd::BOOLEAN),
            Tok::False => typed("false", xsd::BOOLEAN),
            Tok::Str(lex) => self.literal_tail(lex)?,
            _ => return Err(Self::unexpected(t, "an object")),
        })
    }

    /// Optional `@lang` or `^^datatype` after a string.
    fn literal_tail(&mut self, lex: &str) -> Step<Term> {
        let t = self.peek()?;
        match &t.tok {
            Tok::AtWord(lang) => {
                self.i += 1;
                let l = Literal::new_language_tagged(lex, lang.clone())
                    .map_err(|e| t.pos.error(SyntaxErrorKind::BadLiteral, e.to_string()))?;
                Ok(l.into())
            }
            Tok::Carets => {
                self.i += 1;
                let d = self.bump()?;
                let dt = match &d.tok {
                    Tok::IriRef(raw) => self.resolve(raw, d.pos)?,
                    Tok::PName { prefix, local } => self.pname(prefix, local, d.pos)?,
                    _ => return Err(Self::unexpected(d, "a datatype IRI")),
                };
                let l = Literal::new_typed(lex, dt)
                    .map_err(|e| d.pos.error(SyntaxErrorKind::BadLiteral, e.to_string()))?;
                Ok(l.into())
            }
            _ => Ok(Literal::new_simple(lex).into()),
        }
    }

    /// `[ predicateObjectList? ]`, with the opening bracket not yet consumed.
    fn blank_node_property_list(&mut self) -> Step<BlankNode> {
        self.expect(Tok::LBracket, "'['")?;
        let b = self.fresh_node();
        if self.peek()?.tok == Tok::RBracket {
            self.i += 1;
            return Ok(b);
        }
        self.predicate_object_list(&Subject::BlankNode(b.clone()))?;
        self.expect(Tok::RBracket, "']'")?;
        Ok(b)
    }

    /// `( object* )` after the opening parenthesis.
    fn collection(&mut self) -> Step<Subject> {
        let mut items = Vec::new();
        while self.peek()?.tok != Tok::RParen {
            items.push(self.object()?);
        }
        self.i += 1;
        if items.is_empty() {
            return Ok(Subject::Iri(crate::term::iri_const(rdf::NIL)));
        }
        let nodes: Vec<BlankNode> = items.iter().map(|_| self.fresh_node()).collect();
        let first = crate::term::iri_const(rdf::FIRST);
        let rest = crate::term::iri_const(rdf::REST);
        for (k, item) in items.into_iter().enumerate() {
            let here = Subject::BlankNode(nodes[k].clone());
            self.push(here.clone(), first.clone(), item);
            let next: Term = match nodes.get(k + 1) {
                Some(n) => n.clone().into(),
                None => crate::term::iri_const(rdf::NIL).into(),
            };
            self.push(here, rest.clone(), next);
        }
        Ok(Subject::BlankNode(nodes[0].clone()))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::IriRef(i) => format!("<{i}>"),
        Tok::PName { prefix, local } => format!("{prefix}:{local}"),
        Tok::BlankNode(l) => format!("_:{l}"),
        Tok::Str(_) => "a string".into(),
        Tok::AtWord(w) => format!("@{w}"),
        Tok::Integer(l) | Tok::Decimal(l) | Tok::Double(l) => l.clone(),
        Tok::A => "'a'".into(),
        Tok::True => "true".into(),
        Tok::False => "false".into(),
        Tok::Prefix => "PREFIX".into(),
        Tok::Base => "BASE".into(),
        Tok::Graph => "GRAPH".into(),
        Tok::Version => "VERSION".into(),
        Tok::Message => "MESSAGE".into(),
        Tok::Dot => "'.'".into(),
        Tok::Semicolon => "';'".into(),
        Tok::Comma => "','".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBrace => "'{'".into(),
        Tok::RBrace => "'}'".into(),
        Tok::Carets => "'^^'".into(),
    }
}

/// Parses a whole document held in memory.
pub fn parse_trigm(bytes: &[u8], require_version: bool) -> Result<Vec<Message>, SyntaxError> {
    parse_trigm_with_prefixes(bytes, require_version, PrefixMap::new())
}

pub fn parse_trigm_with_prefixes(
    bytes: &[u8],
    require_version: bool,
    prefixes: PrefixMap,
) -> Result<Vec<Message>, SyntaxError> {
    let mut p = TrigmParser::with_prefixes(require_version, prefixes);
    let mut out: Vec<Message> = p.feed(bytes)?.into_iter().filter_map(ParserEvent::into_message).collect();
    out.extend(p.finish()?.into_iter().filter_map(ParserEvent::into_message));
    Ok(out)
}

/// Parses plain TriG as a single message; no statements gives the empty message.
pub fn parse_trig_message(bytes: &[u8]) -> Result<Message, SyntaxError> {
    let messages = parse_trigm(bytes, false)?;
    let mut it = messages.into_iter();
    let first = it.next().unwrap_or_else(Message::empty);
    if it.next().is_some() {
        return Err(Position::START.error(SyntaxErrorKind::UnexpectedToken, "document holds more than one message"));
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREFIXES: &str = "PREFIX ex: <http://example.org/>\nPREFIX sosa: <http://www.w3.org/ns/sosa/>\n";

    fn doc(body: &str) -> String {
        format!("VERSION \"1.2-messages\"\n{PREFIXES}{body}")
    }

    fn parse(body: &str) -> Result<Vec<Message>, SyntaxError> {
        parse_trigm(doc(body).as_bytes(), true)
    }

    #[test]
    fn message_lines_split_messages() {
        let ms = parse("ex:a ex:p 1 .\nMESSAGE\nMESSAGE\nex:b ex:p 2 .\n").unwrap();
        assert_eq!(ms.iter().map(Message::len).collect::<Vec<_>>(), [1, 0, 1]);
        let ms = parse("ex:a ex:p 1 .\nMESSAGE\n").unwrap();
        assert_eq!(ms.len(), 1);
    }

    #[test]
    fn prefixes_persist_across_messages() {
        let ms = parse("ex:a ex:p ex:o .\nMESSAGE\nex:b ex:p ex:o .\n").unwrap();
        assert_eq!(ms[1].quads()[0].subject.to_string(), "<http://example.org/b>");
    }

    #[test]
    fn blank_nodes_are_message_scoped() {
        let ms = parse("_:x ex:p 1 .\nMESSAGE\n_:x ex:p 1 .\n").unwrap();
        let a = ms[0].quads()[0].subject.as_blank_node().unwrap();
        let b = ms[1].quads()[0].subject.as_blank_node().unwrap();
        assert_eq!(a.label(), b.label());
        assert_ne!(a, b);
    }

    #[test]
    fn version_rules() {
        let e = parse_trigm(b"ex:a ex:p 1 .\n", true).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (SyntaxErrorKind::VersionMissing, 1, 1));
        let e = parse_trigm(b"VERSION \"1.2\"\n", true).unwrap_err();
        assert_eq!(e.kind, SyntaxErrorKind::VersionUnsupported);
        let e = parse("VERSION \"1.2-messages\"\n").unwrap_err();
        assert_eq!(e.kind, SyntaxErrorKind::UnexpectedToken);
        let lenient = parse_trigm(format!("{PREFIXES}ex:a ex:p 1 .").as_bytes(), false).unwrap();
        assert_eq!(lenient.len(), 1);
    }

    #[test]
    fn message_keyword_is_case_sensitive() {
        assert!(parse("ex:a ex:p 1 .\nmessage\n").is_err());
    }

    #[test]
    fn unclosed_graph_at_eof() {
        assert!(parse("ex:g { ex:a ex:p 1 .\n").is_err());
    }

    #[test]
    fn predicate_blank_node_is_rejected() {
        assert_eq!(parse("ex:a _:p 1 .\n").unwrap_err().kind, SyntaxErrorKind::PredicateBlankNode);
    }

    #[test]
    fn fresh_nodes_avoid_written_labels() {
        let ms = parse("_:g0 ex:p [ ex:q 1 ] .\n").unwrap();
        let labels: Vec<_> = ms[0].blank_nodes().iter().map(|b| b.label().to_owned()).collect();
        assert_eq!(labels.len(), 2);
        assert_ne!(labels[0], labels[1]);
    }

    #[test]
    fn collections_expand() {
        let ms = parse("ex:a ex:p ( 1 2 ) .\nex:b ex:p () .\n").unwrap();
        assert_eq!(ms[0].len(), 6);
    }

    #[test]
    fn emission_happens_at_message_newline() {
        let text = doc("ex:a ex:p 1 .\nMESSAGE\n");
        let cut = text.find("MESSAGE").unwrap() + "MESSAGE".len();
        let mut p = TrigmParser::new(true);
        let events = p.feed(&text.as_bytes()[..cut]).unwrap();
        assert!(events.iter().all(|e| matches!(e, ParserEvent::NeedMoreInput)));
        let events = p.feed(&text.as_bytes()[cut..]).unwrap();
        assert!(matches!(events[0], ParserEvent::MessageReady { .. }));
        assert_eq!(p.pending_quads(), 0);
        assert!(matches!(p.finish().unwrap().last(), Some(ParserEvent::EndOfLog)));
    }

    #[test]
    fn errors_poison_the_parser() {
        let mut p = TrigmParser::new(true);
        assert!(p.feed(b"garbage .\n").is_err());
        assert!(p.feed(b"VERSION \"1.2-messages\"\n").is_err());
    }

    #[test]
    fn single_message_helper() {
        assert!(parse_trig_message(b"").unwrap().is_empty());
        let m = parse_trig_message(b"<http://a/s> <http://a/p> \"x\" .").unwrap();
        assert_eq!(m.len(), 1);
    }
}
