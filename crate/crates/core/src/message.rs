//! The RDF message: one communicative act, owning its blank-node scope.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::term::{BlankNode, Iri, Quad, ScopeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error("blank nodes from two different message scopes cannot share a message")]
    MixedScope,
    #[error("skolemization base {0:?} is not an absolute IRI")]
    InvalidBase(String),
    #[error("message id {0:?} must be a non-empty run of unreserved URL characters")]
    InvalidMessageId(String),
}

/// An immutable, possibly empty set of quads kept in first-occurrence order.
#[derive(Debug, Clone)]
pub struct Message {
    quads: Vec<Quad>,
    scope: ScopeId,
}

impl Message {
    /// Builds a message with a fresh scope, dropping duplicate quads.
    ///
    /// Blank nodes in `quads` must be unscoped or all carry the same scope.
    pub fn new(quads: impl IntoIterator<Item = Quad>) -> Result<Self, MessageError> {
        let quads: Vec<Quad> = quads.into_iter().collect();
        let mut prior = None;
        for b in quads.iter().flat_map(Quad::blank_nodes) {
            if b.scope().is_unscoped() {
                continue;
            }
            match prior {
                None => prior = Some(b.scope()),
                Some(s) if s != b.scope() => return Err(MessageError::MixedScope),
                Some(_) => {}
            }
        }
        let scope = ScopeId::fresh();
        let mut seen = HashSet::with_capacity(quads.len());
        let mut out = Vec::with_capacity(quads.len());
        for q in quads {
            let q = if q.is_ground() { q } else { q.map_blank_nodes(|b| b.with_scope(scope)) };
            if seen.insert(q.clone()) {
                out.push(q);
            }
        }
        Ok(Message { quads: out, scope })
    }

    /// The heartbeat message.
    pub fn empty() -> Self {
        Message { quads: Vec::new(), scope: ScopeId::fresh() }
    }

    pub fn quads(&self) -> &[Quad] {
        &self.quads
    }

    pub fn into_quads(self) -> Vec<Quad> {
        self.quads
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    pub fn scope(&self) -> ScopeId {
        self.scope
    }

    /// Distinct blank nodes in order of first appearance.
    pub fn blank_nodes(&self) -> Vec<&BlankNode> {
        let mut seen = HashSet::new();
        self.quads
            .iter()
            .flat_map(Quad::blank_nodes)
            .filter(|b| seen.insert(*b))
            .collect()
    }

    /// Same quads in the same order, blank nodes compared by label.
    pub fn structurally_eq(&self, other: &Message) -> bool {
        self.quads.len() == other.quads.len()
            && self.quads.iter().zip(&other.quads).all(|(a, b)| a.eq_ignoring_scope(b))
    }

    /// Dataset isomorphism between two messages.
    pub fn is_isomorphic(&self, other: &Message) -> bool {
        crate::iso::message_isomorphic(self, other)
    }

    /// Replaces every blank node `L` by `<base>/.well-known/genid/<message_id>/L`.
    pub fn skolemize(&self, base: &Iri, message_id: &str) -> Result<Message, MessageError> {
        skolemize(self, base.as_str(), message_id)
    }
}

pub fn skolemize(m: &Message, base: &str, message_id: &str) -> Result<Message, MessageError> {
    if Iri::new(base).is_err() {
        return Err(MessageError::InvalidBase(base.to_owned()));
    }
    if message_id.is_empty()
        || !message_id.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~'))
    {
        return Err(MessageError::InvalidMessageId(message_id.to_owned()));
    }
    let prefix = format!("{}/.well-known/genid/{}/", base.trim_end_matches('/'), message_id);
    let mut cache: HashMap<&str, Iri> = HashMap::new();
    let mut quads = Vec::with_capacity(m.len());
    for q in m.quads() {
        let mapped = q.map_blank_nodes(|b| {
            cache
                .entry(b.label())
                .or_insert_with(|| {
                    // labels never contain IRI-forbidden characters
                    Iri::new(format!("{prefix}{}", b.label())).expect("skolem IRI")
                })
                .clone()
        });
        quads.push(mapped);
    }
    Message::new(quads)
}

/// Explicitly merges messages, keeping their blank nodes apart.
///
/// The first message using a label keeps it; later messages get
/// `<label>_m<k>` (k = input index) whenever the label is already taken.
pub fn union<'a>(messages: impl IntoIterator<Item = &'a Message>) -> Message {
    let messages: Vec<&Message> = messages.into_iter().collect();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let all_labels: HashSet<&str> = messages
        .iter()
        .flat_map(|m| m.quads().iter().flat_map(Quad::blank_nodes))
        .map(BlankNode::label)
        .collect();
    let mut quads = Vec::new();
    for (k, m) in messages.iter().enumerate() {
        let mut rename: HashMap<&str, String> = HashMap::new();
        for b in m.blank_nodes() {
            let label = b.label();
            let fresh = if taken.contains(label) {
                let mut candidate = format!("{label}_m{k}");
                while taken.contains(&candidate) || all_labels.contains(candidate.as_str()) {
                    candidate.push_str(&format!("_m{k}"));
                }
                candidate
            } else {
                label.to_owned()
            };
            taken.insert(fresh.clone());
            rename.insert(label, fresh);
        }
        quads.extend(
            m.quads()
                .iter()
                .map(|q| q.map_blank_nodes(|b| BlankNode::new_unchecked(rename[b.label()].clone()))),
        );
    }
    Message::new(quads).expect("relabeled quads are unscoped")
}
