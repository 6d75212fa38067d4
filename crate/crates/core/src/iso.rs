//! Blank-node bijection search between two messages.
//!
//! Exhaustive backtracking over candidate bijections. Candidates are pruned
//! by a degree signature (positions and predicates a node occurs with), and
//! each partial assignment is checked against the quads it fully determines.

use std::collections::{HashMap, HashSet};

use crate::message::Message;
use crate::term::{BlankNode, GraphName, Literal, Subject, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node<'a> {
    Iri(&'a str),
    Literal(&'a Literal),
    Blank(usize),
    DefaultGraph,
}

type Key<'a> = [Node<'a>; 4];

struct Encoded<'a> {
    keys: Vec<Key<'a>>,
    blanks: usize,
    signatures: Vec<Signature<'a>>,
}

/// Per-node occurrence profile: sorted (position, predicate) pairs.
type Signature<'a> = Vec<(u8, &'a str)>;

fn encode<'m>(m: &'m Message) -> Encoded<'m> {
    // keyed by label: all nodes in one message share its scope
    let mut by_label: HashMap<&str, usize> = HashMap::new();
    let mut node = |b: &'m BlankNode| -> usize {
        let next = by_label.len();
        *by_label.entry(b.label()).or_insert(next)
    };
    let mut keys = Vec::with_capacity(m.len());
    for q in m.quads() {
        let s = match &q.subject {
            Subject::Iri(i) => Node::Iri(i.as_str()),
            Subject::BlankNode(b) => Node::Blank(node(b)),
        };
        let o = match &q.object {
            Term::Iri(i) => Node::Iri(i.as_str()),
            Term::BlankNode(b) => Node::Blank(node(b)),
            Term::Literal(l) => Node::Literal(l),
        };
        let g = match &q.graph {
            GraphName::DefaultGraph => Node::DefaultGraph,
            GraphName::Iri(i) => Node::Iri(i.as_str()),
            GraphName::BlankNode(b) => Node::Blank(node(b)),
        };
        keys.push([s, Node::Iri(q.predicate.as_str()), o, g]);
    }
    let blanks = by_label.len();
    let mut signatures = vec![Vec::new(); blanks];
    for (key, q) in keys.iter().zip(m.quads()) {
        for (pos, n) in [(0u8, key[0]), (2, key[2]), (3, key[3])] {
            if let Node::Blank(i) = n {
                signatures[i].push((pos, q.predicate.as_str()));
            }
        }
    }
    for s in &mut signatures {
        s.sort_unstable();
    }
    Encoded { keys, blanks, signatures }
}

fn map_key<'a>(key: &Key<'a>, assignment: &[Option<usize>]) -> Option<Key<'a>> {
    let mut out = *key;
    for n in &mut out {
        if let Node::Blank(i) = *n {
            *n = Node::Blank(assignment[i]?);
        }
    }
    Some(out)
}

pub fn message_isomorphic(a: &Message, b: &Message) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ea = encode(a);
    let eb = encode(b);
    if ea.blanks != eb.blanks {
        return false;
    }
    let target: HashSet<Key<'_>> = eb.keys.iter().copied().collect();

    // ground quads must match outright
    let mut ground_a = 0;
    for k in &ea.keys {
        if !k.iter().any(|n| matches!(n, Node::Blank(_))) {
            if !target.contains(k) {
                return false;
            }
            ground_a += 1;
        }
    }
    let ground_b = eb.keys.iter().filter(|k| !k.iter().any(|n| matches!(n, Node::Blank(_)))).count();
    if ground_a != ground_b {
        return false;
    }

    let mut sig_a: Vec<&Signature> = ea.signatures.iter().collect();
    let mut sig_b: Vec<&Signature> = eb.signatures.iter().collect();
    sig_a.sort();
    sig_b.sort();
    if sig_a != sig_b {
        return false;
    }

    // Assign nodes with the rarest signatures first.
    let mut class_size: HashMap<&Signature, usize> = HashMap::new();
    for s in &eb.signatures {
        *class_size.entry(s).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..ea.blanks).collect();
    order.sort_by_key(|&i| (class_size[&ea.signatures[i]], i));
    let mut depth_of = vec![0; ea.blanks];
    for (d, &i) in order.iter().enumerate() {
        depth_of[i] = d;
    }
    // quads become checkable at the depth where their last blank node is assigned
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); ea.blanks];
    for (qi, k) in ea.keys.iter().enumerate() {
        let deepest = k
            .iter()
            .filter_map(|n| match n {
                Node::Blank(i) => Some(depth_of[*i]),
                _ => None,
            })
            .max();
        if let Some(d) = deepest {
            checks[d].push(qi);
        }
    }

    let mut search = Search {
        a: &ea,
        b: &eb,
        target: &target,
        order: &order,
        checks: &checks,
        assignment: vec![None; ea.blanks],
        used: vec![false; eb.blanks],
    };
    search.run(0)
}

struct Search<'s, 'a> {
    a: &'s Encoded<'a>,
    b: &'s Encoded<'a>,
    target: &'s HashSet<Key<'a>>,
    order: &'s [usize],
    checks: &'s [Vec<usize>],
    assignment: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl Search<'_, '_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let node = self.order[depth];
        for candidate in 0..self.b.blanks {
            if self.used[candidate] || self.a.signatures[node] != self.b.signatures[candidate] {
                continue;
            }
            self.assignment[node] = Some(candidate);
            self.used[candidate] = true;
            let consistent = self.checks[depth].iter().all(|&qi| {
                map_key(&self.a.keys[qi], &self.assignment).is_some_and(|k| self.target.contains(&k))
            });
            if consistent && self.run(depth + 1) {
                return true;
            }
            self.used[candidate] = false;
            self.assignment[node] = None;
        }
        false
    }
}

/// Checks that two message sequences are isomorphic element by element.
pub fn sequences_isomorphic(a: &[Message], b: &[Message]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| message_isomorphic(x, y))
}
