//! End-to-end certification: optimize, bound, document, verify.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::certificate::{
    community_labels, AchievedSection, CertificateDocument, ComponentRecord, NetworkSection,
    Provenance, Status, FORMAT_VERSION,
};
use crate::chains::{
    find_penalized_chains, greedy_certify, ChainCertificate, ChainOptions, ResidualScores,
};
use crate::combine::{combine, CombinedCertificate, Component, WeightedComponent};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::optimizer::{optimize, OptimizerConfig};
use crate::rational::{format_rational, Rational};
use crate::scores::{ScoreMatrix, ScoredPartition};
use crate::subnet::{resolve_all, ResolvedSubnetwork};
use crate::verify::verify_document;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Chains,
    Subnets,
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Chains => "chains",
            Method::Subnets => "subnets",
            Method::Both => "both",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chains" => Ok(Method::Chains),
            "subnets" => Ok(Method::Subnets),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub method: Method,
    /// Largest subnetwork (and longest extra chain) in the component pool.
    pub max_subnet_size: usize,
    /// Most positive pairs excluded at once when resolving a subnetwork.
    pub exclusion_cap: usize,
    /// Cap on subnetworks resolved per size.
    pub subnet_limit: Option<usize>,
    pub chains: ChainOptions,
    pub optimizer: OptimizerConfig,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            method: Method::Both,
            max_subnet_size: 6,
            exclusion_cap: usize::MAX,
            subnet_limit: None,
            chains: ChainOptions::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Everything a certification run produced.
#[derive(Clone, Debug)]
pub struct Certification {
    pub document: CertificateDocument,
    pub achieved: ScoredPartition,
    pub chains: Option<ChainCertificate>,
    pub combined: CombinedCertificate,
    /// Subnetwork size at which the pool stopped growing.
    pub last_size: usize,
}

impl Certification {
    pub fn bound(&self) -> Rational {
        self.document
            .bound_value()
            .expect("emitted document is well formed")
    }

    pub fn status(&self) -> Status {
        self.document.status
    }
}

/// Certifies `net` with a partition found by the optimizer.
pub fn certify(net: &Network, opts: &CertifyOptions) -> Result<Certification> {
    let sm = ScoreMatrix::from_network(net)?;
    let achieved = optimize(&sm, &opts.optimizer);
    certify_partition(net, &sm, achieved, opts)
}

/// Bounds the modularity of `net` and documents `achieved` against it.
pub fn certify_partition(
    net: &Network,
    sm: &ScoreMatrix,
    achieved: ScoredPartition,
    opts: &CertifyOptions,
) -> Result<Certification> {
    if opts.max_subnet_size < 3 && opts.method != Method::Chains {
        return Err(Error::InvalidParameter(
            "subnetwork size must be at least 3".into(),
        ));
    }
    let target = sm.units_of(&achieved.modularity);
    let chains = match opts.method {
        Method::Chains | Method::Both => Some(greedy_certify(sm, &opts.chains)),
        Method::Subnets => None,
    };
    let greedy: Vec<Component> = chains
        .as_ref()
        .map(|c| c.chains.iter().map(Component::from_chain).collect())
        .unwrap_or_default();
    let chain_only = || {
        let weighted = greedy
            .iter()
            .cloned()
            .map(|component| WeightedComponent {
                component,
                lambda: Rational::one(),
            })
            .collect();
        CombinedCertificate::with_weights(sm, weighted)
    };

    let mut combined = chain_only()?;
    let mut last_size = 0;
    let solved = |c: &CombinedCertificate| c.bound <= target;
    if opts.method != Method::Chains && !solved(&combined) {
        let res = ResidualScores::new(sm);
        let mut subnets: Vec<ResolvedSubnetwork> = Vec::new();
        let mut extra: Vec<Component> = Vec::new();
        for size in 3..=opts.max_subnet_size.min(sm.n()) {
            subnets.extend(resolve_all(
                &res,
                size..=size,
                opts.exclusion_cap,
                opts.subnet_limit,
            )?);
            if opts.method == Method::Both {
                let found = find_penalized_chains(&res, size, opts.chains.path_budget);
                extra.extend(found.chains.iter().map(Component::from_chain));
            }
            let pool = greedy
                .iter()
                .chain(&extra)
                .cloned()
                .chain(subnets.iter().map(Component::from_subnet));
            let stage = combine(dedup(pool), sm)?;
            last_size = size;
            if stage.bound < combined.bound {
                combined = stage;
            }
            if solved(&combined) {
                break;
            }
        }
    }

    let document = document(net, sm, &achieved, &combined, opts);
    if let Err(v) = verify_document(&document) {
        return Err(Error::Document(format!(
            "emitted certificate failed verification: {v}"
        )));
    }
    Ok(Certification {
        document,
        achieved,
        chains,
        combined,
        last_size,
    })
}

/// Keeps one component per distinct load pattern, the one with the larger
/// penalty, in a deterministic order.
fn dedup(pool: impl Iterator<Item = Component>) -> Vec<Component> {
    let mut best: BTreeMap<Vec<(usize, usize, Rational)>, Component> = BTreeMap::new();
    for c in pool {
        match best.get(&c.loads) {
            Some(old) if old.penalty >= c.penalty => {}
            _ => {
                best.insert(c.loads.clone(), c);
            }
        }
    }
    best.into_values().collect()
}

fn document(
    net: &Network,
    sm: &ScoreMatrix,
    achieved: &ScoredPartition,
    combined: &CombinedCertificate,
    opts: &CertifyOptions,
) -> CertificateDocument {
    let bound = combined.bound_value(sm);
    let gap = &bound - &achieved.modularity;
    CertificateDocument {
        format_version: FORMAT_VERSION,
        network: NetworkSection::from_network(net),
        achieved: AchievedSection {
            modularity: format_rational(&achieved.modularity),
            communities: community_labels(net, &achieved.partition),
        },
        trivial_bound: format_rational(&sm.value_of(&combined.trivial_bound)),
        bound: format_rational(&bound),
        components: combined
            .components
            .iter()
            .map(|w| ComponentRecord::from_weighted(net, sm, w))
            .collect(),
        status: if bound == achieved.modularity {
            Status::OptimalProved
        } else {
            Status::Gap
        },
        gap: format_rational(&gap),
        provenance: Provenance {
            method: opts.method.to_string(),
            seed: opts.chains.seed,
            strategy: opts.chains.strategy.to_string(),
            tries_per_k: opts.chains.tries_per_k,
            max_subnet_size: opts.max_subnet_size,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    }
}
