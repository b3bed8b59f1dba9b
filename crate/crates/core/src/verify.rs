//! Independent checking of certificate documents.
//!
//! Nothing here reuses the score matrix, the chain search, the subnetwork
//! resolver or the LP: pair scores are recomputed from the embedded network
//! in plain rational arithmetic, subnetwork penalties are re-proven by full
//! set-partition enumeration, and the bound is recomputed from the listed
//! weights and penalties. Checks run in a fixed order and the first failure
//! is reported:
//!
//! * permissibility: weights are non-negative and the weighted reduced
//!   scores keep every pair within its score, with matching sign;
//! * penalty: each component's claimed penalty is implied by its scores;
//! * bound: trivial bound, bound, achieved modularity, status and gap agree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::certificate::{parse_field, CertificateDocument, Kind, Status};
use crate::network::Network;
use crate::rational::Rational;

/// Largest subnetwork whose penalty is re-proven (Bell(10) = 115975).
pub const MAX_VERIFIED_SUBNETWORK: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// The document is structurally unusable.
    Document,
    Permissibility,
    Penalty,
    Bound,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Document => "document",
            Condition::Permissibility => "permissibility",
            Condition::Penalty => "penalty",
            Condition::Bound => "bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// Offending component, in document order.
    pub component: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.component {
            Some(j) => write!(
                f,
                "{} violated by component {j}: {}",
                self.condition, self.message
            ),
            None => write!(f, "{} violated: {}", self.condition, self.message),
        }
    }
}

impl std::error::Error for Violation {}

#[derive(Clone, Debug, PartialEq)]
pub struct Verified {
    pub achieved: Rational,
    pub bound: Rational,
    pub status: Status,
    pub components: usize,
}

fn fail<T>(
    condition: Condition,
    component: Option<usize>,
    message: impl Into<String>,
) -> Result<T, Violation> {
    Err(Violation {
        condition,
        component,
        message: message.into(),
    })
}

fn field(text: &str, what: &str, component: Option<usize>) -> Result<Rational, Violation> {
    parse_field(text, what).or_else(|e| fail(Condition::Document, component, e.to_string()))
}

/// Pair scores recomputed from edge weights.
struct Scores {
    pair: HashMap<(usize, usize), Rational>,
    positive_sum: Rational,
    diag_sum: Rational,
}

impl Scores {
    fn new(net: &Network) -> Self {
        let n = net.node_count();
        let t = net.total_weight().clone();
        let t2 = &t * &t;
        let mut out_w = vec![Rational::zero(); n];
        let mut in_w = vec![Rational::zero(); n];
        let mut w: HashMap<(usize, usize), Rational> = HashMap::new();
        for (a, b, x) in net.edges() {
            out_w[a] += x;
            in_w[b] += x;
            w.insert((a, b), x.clone());
        }
        let get = |a: usize, b: usize| w.get(&(a, b)).cloned().unwrap_or_else(Rational::zero);
        let mut pair = HashMap::new();
        let mut positive_sum = Rational::zero();
        for a in 0..n {
            for b in a + 1..n {
                let s = (get(a, b) + get(b, a)) / &t
                    - (&out_w[a] * &in_w[b] + &out_w[b] * &in_w[a]) / &t2;
                if s.is_positive() {
                    positive_sum += &s;
                }
                pair.insert((a, b), s);
            }
        }
        let diag_sum = (0..n)
            .map(|a| get(a, a) / &t - &out_w[a] * &in_w[a] / &t2)
            .sum();
        Scores {
            pair,
            positive_sum,
            diag_sum,
        }
    }

    fn get(&self, a: usize, b: usize) -> &Rational {
        &self.pair[&(a.min(b), a.max(b))]
    }
}

struct Parsed {
    kind: Kind,
    nodes: Vec<usize>,
    loads: Vec<(usize, usize, Rational)>,
    lambda: Rational,
    penalty: Rational,
}

/// Verifies a document against the network it embeds.
pub fn verify_document(doc: &CertificateDocument) -> Result<Verified, Violation> {
    let net = doc
        .network
        .to_network()
        .or_else(|e| fail(Condition::Document, None, e.to_string()))?;
    verify_with(doc, &net)
}

/// Verifies a document and additionally requires that it speaks about `net`.
pub fn verify_against(doc: &CertificateDocument, net: &Network) -> Result<Verified, Violation> {
    let fp = net.fingerprint();
    if fp.sha256 != doc.network.sha256
        || fp.nodes != doc.network.node_count
        || fp.edges != doc.network.edge_count
    {
        return fail(
            Condition::Document,
            None,
            "certificate is for a different network",
        );
    }
    verify_document(doc)
}

fn verify_with(doc: &CertificateDocument, net: &Network) -> Result<Verified, Violation> {
    let scores = Scores::new(net);
    let id = |label: &str, j: Option<usize>| -> Result<usize, Violation> {
        match net.id(label) {
            Some(v) => Ok(v),
            None => fail(Condition::Document, j, format!("unknown node {label:?}")),
        }
    };

    let mut parsed = Vec::with_capacity(doc.components.len());
    for (j, rec) in doc.components.iter().enumerate() {
        let at = Some(j);
        let nodes = rec
            .nodes
            .iter()
            .map(|l| id(l, at))
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = nodes.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return fail(Condition::Document, at, "repeated node");
        }
        let mut loads = Vec::with_capacity(rec.scores.len());
        for (a, b, v) in &rec.scores {
            let (a, b) = (id(a, at)?, id(b, at)?);
            if a == b || !nodes.contains(&a) || !nodes.contains(&b) {
                return fail(
                    Condition::Document,
                    at,
                    "score on a pair outside the component",
                );
            }
            loads.push((a, b, field(v, "score", at)?));
        }
        let mut pairs: Vec<(usize, usize)> = loads
            .iter()
            .map(|(a, b, _)| (*a.min(b), *a.max(b)))
            .collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return fail(Condition::Document, at, "pair listed twice");
        }
        if rec.kind == Kind::Chain {
            let k = nodes.len();
            let expected = nodes
                .windows(2)
                .map(|w| (w[0], w[1]))
                .chain(std::iter::once((
                    nodes[0],
                    *nodes.last().unwrap_or(&nodes[0]),
                )));
            if k < 3
                || loads.len() != k
                || !loads
                    .iter()
                    .zip(expected)
                    .all(|((a, b, _), e)| (*a, *b) == e)
            {
                return fail(
                    Condition::Document,
                    at,
                    "chain scores do not follow the node sequence",
                );
            }
        }
        parsed.push(Parsed {
            kind: rec.kind,
            nodes,
            loads,
            lambda: field(&rec.lambda, "lambda", at)?,
            penalty: field(&rec.penalty, "penalty", at)?,
        });
    }

    // Permissibility.
    let mut used: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (j, c) in parsed.iter().enumerate() {
        if c.lambda.is_negative() {
            return fail(Condition::Permissibility, Some(j), "negative weight");
        }
        for (a, b, load) in &c.loads {
            let s = scores.get(*a, *b);
            if load.is_zero() {
                continue;
            }
            if s.is_zero() || s.is_positive() != load.is_positive() {
                return fail(
                    Condition::Permissibility,
                    Some(j),
                    format!(
                        "score on ({}, {}) has the wrong sign",
                        net.label(*a),
                        net.label(*b)
                    ),
                );
            }
            *used
                .entry((*a.min(b), *a.max(b)))
                .or_insert_with(Rational::zero) += &c.lambda * load.abs();
        }
    }
    for (&(a, b), total) in &used {
        if total > &scores.get(a, b).abs() {
            return fail(
                Condition::Permissibility,
                None,
                format!(
                    "pair ({}, {}) is loaded beyond its score",
                    net.label(a),
                    net.label(b)
                ),
            );
        }
    }

    // Penalties.
    for (j, c) in parsed.iter().enumerate() {
        let at = Some(j);
        if c.penalty.is_negative() {
            return fail(Condition::Penalty, at, "negative penalty");
        }
        let proven = match c.kind {
            Kind::Chain => {
                let k = c.loads.len();
                let interior = &c.loads[..k - 1];
                let closing = &c.loads[k - 1].2;
                if !closing.is_negative() || interior.iter().any(|(_, _, v)| !v.is_positive()) {
                    return fail(
                        Condition::Penalty,
                        at,
                        "chain scores have the wrong pattern",
                    );
                }
                interior
                    .iter()
                    .map(|(_, _, v)| v.clone())
                    .fold(closing.abs(), |m, v| m.min(v))
            }
            Kind::Subnetwork => {
                if c.nodes.len() > MAX_VERIFIED_SUBNETWORK {
                    return fail(Condition::Penalty, at, "subnetwork too large to re-prove");
                }
                subnetwork_penalty(&c.nodes, &c.loads)
            }
        };
        if c.penalty > proven {
            return fail(
                Condition::Penalty,
                at,
                "claimed penalty exceeds what the scores prove",
            );
        }
    }

    // Bound arithmetic.
    let trivial = &scores.positive_sum + &scores.diag_sum;
    if field(&doc.trivial_bound, "trivial bound", None)? != trivial {
        return fail(
            Condition::Bound,
            None,
            "trivial bound does not match the network",
        );
    }
    let total: Rational = parsed.iter().map(|c| &c.lambda * &c.penalty).sum();
    let bound = &trivial - &total;
    if field(&doc.bound, "bound", None)? != bound {
        return fail(
            Condition::Bound,
            None,
            "bound is not the trivial bound minus the weighted penalties",
        );
    }
    let mut community = vec![usize::MAX; net.node_count()];
    for (c, members) in doc.achieved.communities.iter().enumerate() {
        for label in members {
            let v = id(label, None).or_else(|_| {
                fail(
                    Condition::Bound,
                    None,
                    format!("unknown node {label:?} in partition"),
                )
            })?;
            if community[v] != usize::MAX {
                return fail(
                    Condition::Bound,
                    None,
                    format!("node {label:?} assigned twice"),
                );
            }
            community[v] = c;
        }
    }
    if community.contains(&usize::MAX) {
        return fail(
            Condition::Bound,
            None,
            "partition does not cover every node",
        );
    }
    let achieved: Rational = scores
        .pair
        .iter()
        .filter(|((a, b), _)| community[*a] == community[*b])
        .map(|(_, s)| s)
        .sum::<Rational>()
        + &scores.diag_sum;
    if field(&doc.achieved.modularity, "achieved modularity", None)? != achieved {
        return fail(
            Condition::Bound,
            None,
            "achieved modularity does not match the partition",
        );
    }
    if bound < achieved {
        return fail(
            Condition::Bound,
            None,
            "bound is below an achieved modularity",
        );
    }
    let status = if bound == achieved {
        Status::OptimalProved
    } else {
        Status::Gap
    };
    if doc.status != status {
        return fail(Condition::Bound, None, format!("status should be {status}"));
    }
    if field(&doc.gap, "gap", None)? != &bound - &achieved {
        return fail(Condition::Bound, None, "gap is not bound minus achieved");
    }
    Ok(Verified {
        achieved,
        bound,
        status,
        components: parsed.len(),
    })
}

/// Sum of positive scores minus the best partition of the component's nodes.
fn subnetwork_penalty(nodes: &[usize], loads: &[(usize, usize, Rational)]) -> Rational {
    let k = nodes.len();
    let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut w = vec![vec![Rational::zero(); k]; k];
    let mut positive = Rational::zero();
    for (a, b, v) in loads {
        let (i, j) = (local[a], local[b]);
        w[i][j] = v.clone();
        w[j][i] = v.clone();
        if v.is_positive() {
            positive += v;
        }
    }
    let mut labels = vec![0usize; k];
    let mut best: Option<Rational> = None;
    assign(&w, &mut labels, 0, 0, &Rational::zero(), &mut best);
    positive - best.unwrap_or_else(Rational::zero)
}

fn assign(
    w: &[Vec<Rational>],
    labels: &mut [usize],
    i: usize,
    used: usize,
    acc: &Rational,
    best: &mut Option<Rational>,
) {
    if i == labels.len() {
        if best.as_ref().is_none_or(|b| acc > b) {
            *best = Some(acc.clone());
        }
        return;
    }
    for c in 0..=used {
        labels[i] = c;
        let mut next = acc.clone();
        for j in 0..i {
            if labels[j] == c {
                next += &w[i][j];
            }
        }
        assign(w, labels, i + 1, used.max(c + 1), &next, best);
    }
}
