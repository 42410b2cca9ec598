use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::{RdfTerm, Triple, TripleSet};

/// RDF graph isomorphism: true iff some bijection between the blank nodes
/// of `a` and `b` maps one graph onto the other. Other terms compare exactly.
///
/// Blank nodes are coloured by iterated neighbourhood hashing, then a
/// backtracking search assigns nodes within colour classes, checking every
/// triple as soon as all of its blank nodes are mapped.
pub fn isomorphic(a: &TripleSet, b: &TripleSet) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ground_a, blank_a): (Vec<&Triple>, Vec<&Triple>) = a.iter().partition(|t| !has_blank(t));
    let (ground_b, blank_b): (Vec<&Triple>, Vec<&Triple>) = b.iter().partition(|t| !has_blank(t));
    if ground_a.len() != ground_b.len() || !ground_a.iter().all(|t| b.contains(t)) {
        return false;
    }
    if blank_a.is_empty() {
        return true;
    }

    let colours_a = colour(&blank_a);
    let colours_b = colour(&blank_b);
    if colours_a.len() != colours_b.len() {
        return false;
    }
    let mut classes_b: HashMap<u64, Vec<&str>> = HashMap::new();
    for (node, c) in &colours_b {
        classes_b.entry(*c).or_default().push(node);
    }
    let mut histogram_a: HashMap<u64, usize> = HashMap::new();
    for c in colours_a.values() {
        *histogram_a.entry(*c).or_default() += 1;
    }
    if histogram_a.len() != classes_b.len()
        || histogram_a
            .iter()
            .any(|(c, n)| classes_b.get(c).map(Vec::len) != Some(*n))
    {
        return false;
    }
    for nodes in classes_b.values_mut() {
        nodes.sort_unstable();
    }

    let mut order: Vec<&str> = colours_a.keys().copied().collect();
    order.sort_by_key(|n| (histogram_a[&colours_a[n]], *n));

    let mut touching: HashMap<&str, Vec<&Triple>> = HashMap::new();
    for t in &blank_a {
        for n in blank_labels(t) {
            touching.entry(n).or_default().push(t);
        }
    }

    let target: HashSet<&Triple> = blank_b.iter().copied().collect();
    let mut search = Search {
        order: &order,
        colours_a: &colours_a,
        classes_b: &classes_b,
        touching: &touching,
        target: &target,
        forward: HashMap::new(),
        used: HashSet::new(),
    };
    search.assign(0)
}

struct Search<'a> {
    order: &'a [&'a str],
    colours_a: &'a HashMap<&'a str, u64>,
    classes_b: &'a HashMap<u64, Vec<&'a str>>,
    touching: &'a HashMap<&'a str, Vec<&'a Triple>>,
    target: &'a HashSet<&'a Triple>,
    forward: HashMap<&'a str, &'a str>,
    used: HashSet<&'a str>,
}

impl<'a> Search<'a> {
    fn assign(&mut self, depth: usize) -> bool {
        let Some(&node) = self.order.get(depth) else {
            return true;
        };
        let candidates = &self.classes_b[&self.colours_a[node]];
        for &candidate in candidates {
            if self.used.contains(candidate) {
                continue;
            }
            self.forward.insert(node, candidate);
            self.used.insert(candidate);
            if self.consistent(node) && self.assign(depth + 1) {
                return true;
            }
            self.forward.remove(node);
            self.used.remove(candidate);
        }
        false
    }

    fn consistent(&self, node: &str) -> bool {
        self.touching[node].iter().all(|t| match self.map_triple(t) {
            Some(mapped) => self.target.contains(&mapped),
            None => true,
        })
    }

    fn map_triple(&self, t: &Triple) -> Option<Triple> {
        let map = |term: &RdfTerm| -> Option<RdfTerm> {
            match term {
                RdfTerm::BlankNode(l) => self
                    .forward
                    .get(l.as_str())
                    .map(|m| RdfTerm::BlankNode((*m).to_owned())),
                other => Some(other.clone()),
            }
        };
        Some(Triple {
            subject: map(&t.subject)?,
            predicate: t.predicate.clone(),
            object: map(&t.object)?,
        })
    }
}

fn has_blank(t: &Triple) -> bool {
    t.subject.is_blank() || t.object.is_blank()
}

fn blank_labels(t: &Triple) -> impl Iterator<Item = &str> {
    let s = match &t.subject {
        RdfTerm::BlankNode(l) => Some(l.as_str()),
        _ => None,
    };
    let o = match &t.object {
        RdfTerm::BlankNode(l) if Some(l.as_str()) != s => Some(l.as_str()),
        _ => None,
    };
    s.into_iter().chain(o)
}

fn hash_of(v: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

/// Iterated colour refinement over the blank nodes of `triples`.
fn colour<'a>(triples: &[&'a Triple]) -> HashMap<&'a str, u64> {
    let mut colours: HashMap<&str, u64> = HashMap::new();
    for t in triples {
        for n in blank_labels(t) {
            colours.insert(n, 0);
        }
    }
    let mut classes = 1;
    for _ in 0..=colours.len() {
        let mut signatures: HashMap<&str, Vec<u64>> = HashMap::new();
        for t in triples {
            let term_colour = |term: &RdfTerm| match term {
                RdfTerm::BlankNode(l) => hash_of(("blank", colours[l.as_str()])),
                other => hash_of(("term", other)),
            };
            let self_loop = t.subject == t.object;
            if let RdfTerm::BlankNode(s) = &t.subject {
                let sig = hash_of((0u8, &t.predicate, term_colour(&t.object), self_loop));
                signatures.entry(s).or_default().push(sig);
            }
            if let RdfTerm::BlankNode(o) = &t.object {
                if !self_loop {
                    let sig = hash_of((1u8, &t.predicate, term_colour(&t.subject)));
                    signatures.entry(o).or_default().push(sig);
                }
            }
        }
        let next: HashMap<&str, u64> = signatures
            .into_iter()
            .map(|(n, mut sigs)| {
                sigs.sort_unstable();
                (n, hash_of((colours[n], sigs)))
            })
            .collect();
        let next_classes = next.values().collect::<HashSet<_>>().len();
        colours = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    colours
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: RdfTerm, o: RdfTerm) -> Triple {
        Triple::new(s, RdfTerm::iri("http://e/p"), o).unwrap()
    }

    fn set(ts: Vec<Triple>) -> TripleSet {
        ts.into_iter().collect()
    }

    #[test]
    fn identical_sets() {
        let a = set(vec![t(RdfTerm::iri("http://e/s"), RdfTerm::literal("o"))]);
        assert!(isomorphic(&a, &a.clone()));
    }

    #[test]
    fn relabeling() {
        let a = set(vec![t(RdfTerm::blank("x"), RdfTerm::literal("o"))]);
        let b = set(vec![t(RdfTerm::blank("y"), RdfTerm::literal("o"))]);
        assert!(isomorphic(&a, &b));
    }

    #[test]
    fn self_loop_is_not_an_edge_between_two_nodes() {
        let a = set(vec![t(RdfTerm::blank("x"), RdfTerm::blank("x"))]);
        let b = set(vec![t(RdfTerm::blank("a"), RdfTerm::blank("b"))]);
        assert!(!isomorphic(&a, &b));
        assert!(!isomorphic(&b, &a));
    }

    #[test]
    fn regular_graphs_need_search() {
        // Two 2-cycles vs one 4-cycle: every node has in/out degree one.
        let cyc = |labels: &[(&str, &str)]| {
            set(labels
                .iter()
                .map(|(s, o)| t(RdfTerm::blank(*s), RdfTerm::blank(*o)))
                .collect())
        };
        let two = cyc(&[("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")]);
        let four = cyc(&[("w", "x"), ("x", "y"), ("y", "z"), ("z", "w")]);
        let two_again = cyc(&[("q", "r"), ("s", "t"), ("r", "q"), ("t", "s")]);
        assert!(!isomorphic(&two, &four));
        assert!(isomorphic(&two, &two_again));
    }

    #[test]
    fn ground_mismatch() {
        let a = set(vec![t(RdfTerm::iri("http://e/s"), RdfTerm::literal("o"))]);
        let b = set(vec![t(RdfTerm::iri("http://e/s"), RdfTerm::literal("x"))]);
        assert!(!isomorphic(&a, &b));
    }
}
