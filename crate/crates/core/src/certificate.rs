//! Self-contained JSON certificate documents.
//!
//! A document carries the network it speaks about, the achieved partition,
//! and every weighted component behind the bound. All numbers are exact
//! rationals written as `"numerator/denominator"` strings, in modularity
//! units (not the internal integer score units).

use serde::{Deserialize, Serialize};

use crate::combine::{ComponentKind, WeightedComponent};
use crate::error::{Error, Result};
use crate::network::{build_network_with_nodes, Network};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::scores::{Partition, ScoreMatrix};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub format_version: u32,
    pub network: NetworkSection,
    pub achieved: AchievedSection,
    pub trivial_bound: String,
    pub bound: String,
    pub components: Vec<ComponentRecord>,
    pub status: Status,
    pub gap: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSection {
    pub directed: bool,
    pub node_count: usize,
    pub edge_count: usize,
    pub sha256: String,
    /// Labels in node-id order, so isolated nodes survive.
    pub nodes: Vec<String>,
    /// `[from, to, weight]`; undirected edges are listed once.
    pub edges: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AchievedSection {
    pub modularity: String,
    pub communities: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Chain,
    Subnetwork,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub kind: Kind,
    /// Chain order for chains, ascending node id for subnetworks.
    pub nodes: Vec<String>,
    /// Reduced pair scores `[a, b, score]`. Chains list their consecutive
    /// pairs followed by the closing pair.
    pub scores: Vec<(String, String, String)>,
    pub lambda: String,
    pub penalty: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "optimal-proved")]
    OptimalProved,
    #[serde(rename = "gap")]
    Gap,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::OptimalProved => "optimal-proved",
            Status::Gap => "gap",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: String,
    pub seed: u64,
    pub strategy: String,
    pub tries_per_k: usize,
    pub max_subnet_size: usize,
    pub tool_version: String,
}

impl NetworkSection {
    pub fn from_network(net: &Network) -> Self {
        let fp = net.fingerprint();
        let edges = net
            .edges()
            .filter(|(a, b, _)| net.is_directed() || a <= b)
            .map(|(a, b, w)| {
                (
                    net.label(a).to_string(),
                    net.label(b).to_string(),
                    format_rational(w),
                )
            })
            .collect();
        NetworkSection {
            directed: net.is_directed(),
            node_count: fp.nodes,
            edge_count: fp.edges,
            sha256: fp.sha256,
            nodes: net.labels().to_vec(),
            edges,
        }
    }

    /// Rebuilds the network; fails if it does not match the recorded
    /// fingerprint.
    pub fn to_network(&self) -> Result<Network> {
        let mut entries = Vec::with_capacity(self.edges.len());
        for (a, b, w) in &self.edges {
            entries.push((a.as_str(), b.as_str(), parse_field(w, "edge weight")?));
        }
        let net = build_network_with_nodes(&self.nodes, &entries, self.directed)?;
        let fp = net.fingerprint();
        if fp.nodes != self.node_count || fp.edges != self.edge_count || fp.sha256 != self.sha256 {
            return Err(Error::Document(
                "network does not match its fingerprint".into(),
            ));
        }
        Ok(net)
    }
}

pub fn parse_field(text: &str, what: &str) -> Result<Rational> {
    parse_rational(text)
        .ok_or_else(|| Error::Document(format!("{what} {text:?} is not a rational")))
}

/// Labels of each community of `partition`.
pub fn community_labels(net: &Network, partition: &Partition) -> Vec<Vec<String>> {
    partition
        .communities()
        .into_iter()
        .map(|c| c.into_iter().map(|v| net.label(v).to_string()).collect())
        .collect()
}

impl ComponentRecord {
    /// Converts a weighted component whose loads are in `sm` score units.
    pub fn from_weighted(net: &Network, sm: &ScoreMatrix, w: &WeightedComponent) -> Self {
        let c = &w.component;
        let label = |v: usize| net.label(v).to_string();
        let scores = match c.kind {
            ComponentKind::Chain => {
                let k = c.nodes.len();
                let value = sm.value_of(&c.penalty);
                let mut s: Vec<_> = c
                    .nodes
                    .windows(2)
                    .map(|p| (label(p[0]), label(p[1]), format_rational(&value)))
                    .collect();
                s.push((
                    label(c.nodes[0]),
                    label(c.nodes[k - 1]),
                    format_rational(&-value),
                ));
                s
            }
            ComponentKind::Subnetwork => c
                .loads
                .iter()
                .map(|(a, b, l)| (label(*a), label(*b), format_rational(&sm.value_of(l))))
                .collect(),
        };
        ComponentRecord {
            kind: match c.kind {
                ComponentKind::Chain => Kind::Chain,
                ComponentKind::Subnetwork => Kind::Subnetwork,
            },
            nodes: c.nodes.iter().map(|&v| label(v)).collect(),
            scores,
            lambda: format_rational(&w.lambda),
            penalty: format_rational(&sm.value_of(&c.penalty)),
        }
    }
}

impl CertificateDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CertificateDocument = serde_json::from_str(text)
            .map_err(|e| Error::Document(format!("malformed certificate: {e}")))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format version {}",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn bound_value(&self) -> Result<Rational> {
        parse_field(&self.bound, "bound")
    }

    pub fn achieved_value(&self) -> Result<Rational> {
        parse_field(&self.achieved.modularity, "achieved modularity")
    }

    pub fn gap_value(&self) -> Result<Rational> {
        parse_field(&self.gap, "gap")
    }
}
