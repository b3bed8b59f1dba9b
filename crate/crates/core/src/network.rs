//! Weighted, labelled networks.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// A node-labelled weighted graph.
///
/// Weights are stored per ordered pair. Undirected input is stored in both
/// orientations, so `total_weight` counts every undirected edge twice, self
/// loops once.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), Rational>,
    directed: bool,
    total: Rational,
}

/// Identifies a network inside a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub nodes: usize,
    pub edges: usize,
    pub sha256: String,
}

/// Builds a network from `(from, to, weight)` entries.
///
/// Labels become dense ids in order of first appearance. Repeated entries for
/// the same pair are summed.
pub fn build_network<S: AsRef<str>>(
    entries: &[(S, S, Rational)],
    directed: bool,
) -> Result<Network> {
    build_network_with_nodes::<S, &str>(&[], entries, directed)
}

/// Like [`build_network`], but interns `nodes` first so that isolated nodes
/// are kept.
pub fn build_network_with_nodes<S: AsRef<str>, N: AsRef<str>>(
    nodes: &[N],
    entries: &[(S, S, Rational)],
    directed: bool,
) -> Result<Network> {
    let mut labels = Vec::new();
    let mut index = HashMap::new();
    let mut intern = |label: &str| -> usize {
        if let Some(&id) = index.get(label) {
            return id;
        }
        let id = labels.len();
        labels.push(label.to_string());
        index.insert(label.to_string(), id);
        id
    };
    for node in nodes {
        intern(node.as_ref());
    }

    let mut edges: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (entry, (from, to, weight)) in entries.iter().enumerate() {
        if weight.is_negative() {
            return Err(Error::NegativeWeight {
                entry,
                from: from.as_ref().to_string(),
                to: to.as_ref().to_string(),
                weight: format_rational(weight),
            });
        }
        let a = intern(from.as_ref());
        let b = intern(to.as_ref());
        *edges.entry((a, b)).or_insert_with(Rational::zero) += weight;
        if !directed && a != b {
            *edges.entry((b, a)).or_insert_with(Rational::zero) += weight;
        }
    }
    edges.retain(|_, w| !w.is_zero());

    let total: Rational = edges.values().sum();
    if total.is_zero() {
        return Err(Error::ZeroTotalWeight);
    }

    Ok(Network {
        index: {
            let mut index = HashMap::with_capacity(labels.len());
            for (i, l) in labels.iter().enumerate() {
                index.insert(l.clone(), i);
            }
            index
        },
        labels,
        edges,
        directed,
        total,
    })
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Sum of `e(A,B)` over all ordered pairs.
    pub fn total_weight(&self) -> &Rational {
        &self.total
    }

    pub fn weight(&self, from: usize, to: usize) -> Rational {
        self.edges
            .get(&(from, to))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Positive-weight ordered pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.edges.iter().map(|(&(a, b), w)| (a, b, w))
    }

    /// Number of distinct edges: ordered pairs if directed, unordered otherwise.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.edges.len()
        } else {
            self.edges.keys().filter(|(a, b)| a <= b).count()
        }
    }

    pub fn out_strength(&self, node: usize) -> Rational {
        self.edges
            .range((node, 0)..=(node, usize::MAX))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn in_strength(&self, node: usize) -> Rational {
        self.edges
            .iter()
            .filter(|((_, b), _)| *b == node)
            .map(|(_, w)| w)
            .sum()
    }

    /// Out- and in-strength of every node in one pass.
    pub fn strengths(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut out = vec![Rational::zero(); self.node_count()];
        let mut inn = vec![Rational::zero(); self.node_count()];
        for (&(a, b), w) in &self.edges {
            out[a] += w;
            inn[b] += w;
        }
        (out, inn)
    }

    /// The network with every weight multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: &Rational) -> Network {
        let mut scaled = self.clone();
        for w in scaled.edges.values_mut() {
            *w *= factor;
        }
        scaled.total *= factor;
        scaled
    }

    /// Node count, edge count and a SHA-256 over a canonical rendering of the
    /// edge set (labels sorted, weights as exact fractions).
    pub fn fingerprint(&self) -> Fingerprint {
        let mut lines: Vec<String> = self
            .edges
            .iter()
            .filter(|((a, b), _)| self.directed || a <= b)
            .map(|(&(a, b), w)| {
                let (x, y) = (&self.labels[a], &self.labels[b]);
                let (x, y) = if self.directed || x <= y {
                    (x, y)
                } else {
                    (y, x)
                };
                format!("{x}\t{y}\t{}", format_rational(w))
            })
            .collect();
        lines.sort();
        let mut hasher = Sha256::new();
        hasher.update(if self.directed {
            b"directed\n".as_slice()
        } else {
            b"undirected\n".as_slice()
        });
        for line in &lines {
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        Fingerprint {
            nodes: self.node_count(),
            edges: self.edge_count(),
            sha256: hex::encode(hasher.finalize()),
        }
    }
}
