//! Community detection by modularity maximization, paired with exact upper
//! bounds on the best achievable modularity.
//!
//! The pipeline is: build a [`Network`], derive its [`ScoreMatrix`], find a
//! good partition with the [`optimizer`], then bound the maximum from above
//! with penalized chains ([`chains`]) and resolved subnetworks ([`subnet`])
//! combined through a linear program ([`combine`]). When bound and achieved
//! score coincide the partition is proven optimal. Every bound can be
//! re-checked by the self-contained [`verify`] module.
//!
//! All scoring and bounding is done in exact arithmetic.

pub mod brute;
pub mod certificate;
pub mod certify;
pub mod chains;
pub mod combine;
pub mod corpus;
pub mod error;
pub mod io;
pub mod lp;
pub mod network;
pub mod optimizer;
pub mod planted;
pub mod rational;
pub mod report;
pub mod scores;
pub mod subnet;
pub mod verify;

pub use brute::brute_force_max;
pub use certificate::CertificateDocument;
pub use certify::{certify, Certification, CertifyOptions, Method};
pub use chains::{greedy_certify, Chain, ChainCertificate, ResidualScores, Strategy};
pub use combine::{combine, CombinedCertificate, Component};
pub use error::{Error, Result};
pub use io::parse_edge_list;
pub use network::{build_network, Network};
pub use optimizer::{optimize, refine, OptimizerConfig};
pub use planted::generate_planted;
pub use rational::Rational;
pub use scores::{Partition, ScoreMatrix, ScoredPartition};
pub use subnet::{partial_brute_force, reduce_weights, Resolution, ResolvedSubnetwork, Subnetwork};
