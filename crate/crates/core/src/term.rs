//! RDF terms and quads.
//!
//! Blank nodes carry a [`ScopeId`] naming the message that owns them. Two
//! blank nodes are the same node only when both the label and the scope
//! agree, so `_:b0` in one message is never `_:b0` in another.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::chars;
use crate::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNodeLabel(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("rdf:langString literal without a language tag")]
    MissingLanguageTag,
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        if value.is_empty() || value.chars().any(chars::is_iri_forbidden) || !has_scheme(&value) {
            return Err(TermError::InvalidIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

fn has_scheme(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut bytes = scheme.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic())
        && bytes.all(|b| b.is_ascii_alphanumeric() || matches!(b, b'+' | b'-' | b'.'))
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Identifies the message that owns a blank node.
///
/// [`ScopeId::UNSCOPED`] marks nodes that have not been adopted by a message yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScopeId(u64);

static NEXT_SCOPE: AtomicU64 = AtomicU64::new(1);

impl ScopeId {
    pub const UNSCOPED: ScopeId = ScopeId(0);

    pub(crate) fn fresh() -> Self {
        ScopeId(NEXT_SCOPE.fetch_add(1, Ordering::Relaxed))
    }

    pub fn is_unscoped(self) -> bool {
        self == Self::UNSCOPED
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode {
    label: String,
    scope: ScopeId,
}

impl BlankNode {
    /// An unscoped blank node. It receives its scope when placed in a message.
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if !chars::is_valid_bnode_label(&label) {
            return Err(TermError::InvalidBlankNodeLabel(label));
        }
        Ok(BlankNode { label, scope: ScopeId::UNSCOPED })
    }

    pub(crate) fn new_unchecked(label: String) -> Self {
        BlankNode { label, scope: ScopeId::UNSCOPED }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scope(&self) -> ScopeId {
        self.scope
    }

    pub(crate) fn with_scope(&self, scope: ScopeId) -> Self {
        BlankNode { label: self.label.clone(), scope }
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.label)
    }
}

/// A literal. The lexical form is kept exactly as read.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    pub fn new_simple(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: iri_const(xsd::STRING), language: None }
    }

    /// A typed literal. `rdf:langString` needs a tag, so it is rejected here.
    pub fn new_typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, TermError> {
        if datatype.as_str() == rdf::LANG_STRING {
            return Err(TermError::MissingLanguageTag);
        }
        Ok(Literal { lexical: lexical.into(), datatype, language: None })
    }

    pub fn new_language_tagged(
        lexical: impl Into<String>,
        language: impl Into<String>,
    ) -> Result<Self, TermError> {
        let language = language.into();
        if !chars::is_valid_lang_tag(&language) {
            return Err(TermError::InvalidLanguageTag(language));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: iri_const(rdf::LANG_STRING),
            language: Some(language),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = String::with_capacity(self.lexical.len() + 2);
        crate::nqm::escape_string_into(&self.lexical, &mut buf);
        f.write_str(&buf)?;
        match &self.language {
            Some(lang) => write!(f, "@{lang}"),
            None if self.datatype.as_str() == xsd::STRING => Ok(()),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

pub(crate) fn iri_const(value: &str) -> Iri {
    Iri(value.to_owned())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Iri(Iri),
    BlankNode(BlankNode),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum GraphName {
    #[default]
    DefaultGraph,
    Iri(Iri),
    BlankNode(BlankNode),
}

impl Subject {
    pub fn as_blank_node(&self) -> Option<&BlankNode> {
        match self {
            Subject::BlankNode(b) => Some(b),
            Subject::Iri(_) => None,
        }
    }
}

impl Term {
    pub fn as_blank_node(&self) -> Option<&BlankNode> {
        match self {
            Term::BlankNode(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }
}

impl GraphName {
    pub fn as_blank_node(&self) -> Option<&BlankNode> {
        match self {
            GraphName::BlankNode(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_default_graph(&self) -> bool {
        matches!(self, GraphName::DefaultGraph)
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::BlankNode(b)
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::BlankNode(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => Term::Iri(i),
            Subject::BlankNode(b) => Term::BlankNode(b),
        }
    }
}

impl From<Iri> for GraphName {
    fn from(iri: Iri) -> Self {
        GraphName::Iri(iri)
    }
}

impl From<BlankNode> for GraphName {
    fn from(b: BlankNode) -> Self {
        GraphName::BlankNode(b)
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(i) => i.fmt(f),
            Subject::BlankNode(b) => b.fmt(f),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::BlankNode(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

/// One RDF statement. The types rule out literal subjects and non-IRI predicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
    pub graph: GraphName,
}

impl Quad {
    pub fn new(
        subject: impl Into<Subject>,
        predicate: Iri,
        object: impl Into<Term>,
        graph: GraphName,
    ) -> Self {
        Quad { subject: subject.into(), predicate, object: object.into(), graph }
    }

    /// Blank nodes in subject, object, graph-name order.
    pub fn blank_nodes(&self) -> impl Iterator<Item = &BlankNode> {
        self.subject
            .as_blank_node()
            .into_iter()
            .chain(self.object.as_blank_node())
            .chain(self.graph.as_blank_node())
    }

    pub fn is_ground(&self) -> bool {
        self.blank_nodes().next().is_none()
    }

    /// Rewrites every blank node through `f`, leaving other terms untouched.
    pub fn map_blank_nodes<'a, T, F>(&'a self, mut f: F) -> Quad
    where
        F: FnMut(&'a BlankNode) -> T,
        T: Into<Subject> + Into<Term> + Into<GraphName> + Clone,
    {
        let subject = match &self.subject {
            Subject::BlankNode(b) => f(b).into(),
            s => s.clone(),
        };
        let object = match &self.object {
            Term::BlankNode(b) => f(b).into(),
            o => o.clone(),
        };
        let graph = match &self.graph {
            GraphName::BlankNode(b) => f(b).into(),
            g => g.clone(),
        };
        Quad { subject, predicate: self.predicate.clone(), object, graph }
    }

    /// Structural equality that compares blank nodes by label only.
    pub fn eq_ignoring_scope(&self, other: &Quad) -> bool {
        fn bn(a: Option<&BlankNode>, b: Option<&BlankNode>) -> Option<bool> {
            match (a, b) {
                (Some(a), Some(b)) => Some(a.label == b.label),
                (None, None) => None,
                _ => Some(false),
            }
        }
        let subject = bn(self.subject.as_blank_node(), other.subject.as_blank_node())
            .unwrap_or_else(|| self.subject == other.subject);
        let object = bn(self.object.as_blank_node(), other.object.as_blank_node())
            .unwrap_or_else(|| self.object == other.object);
        let graph = bn(self.graph.as_blank_node(), other.graph.as_blank_node())
            .unwrap_or_else(|| self.graph == other.graph);
        subject && object && graph && self.predicate == other.predicate
    }
}

/// N-Quads statement form, including the trailing ` .`.
impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)?;
        match &self.graph {
            GraphName::DefaultGraph => {}
            GraphName::Iri(i) => write!(f, " {i}")?,
            GraphName::BlankNode(b) => write!(f, " {b}")?,
        }
        f.write_str(" .")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://ex.org/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("relative/path").is_err());
        assert!(Iri::new("http://ex.org/a b").is_err());
        assert!(Iri::new("http://ex.org/<a>").is_err());
        assert!(Iri::new("1http://x").is_err());
    }

    #[test]
    fn literal_display_follows_nquads() {
        let l = Literal::new_simple("a\"b\\c\nd");
        assert_eq!(l.to_string(), r#""a\"b\\c\nd""#);
        let l = Literal::new_language_tagged("chat", "fr").unwrap();
        assert_eq!(l.to_string(), r#""chat"@fr"#);
        let l = Literal::new_typed("22", iri_const(xsd::INTEGER)).unwrap();
        assert_eq!(l.to_string(), r#""22"^^<http://www.w3.org/2001/XMLSchema#integer>"#);
    }

    #[test]
    fn blank_node_identity_needs_label_and_scope() {
        let a = BlankNode::new("b0").unwrap();
        let s1 = ScopeId::fresh();
        let s2 = ScopeId::fresh();
        assert_eq!(a.with_scope(s1), a.with_scope(s1));
        assert_ne!(a.with_scope(s1), a.with_scope(s2));
    }
}
