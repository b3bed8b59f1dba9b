//! Shared inputs for the benchmarks.

use modbound::corpus;
use modbound::{Network, ScoreMatrix};

/// A bundled network with its score matrix.
pub fn bundled(name: &str) -> (Network, ScoreMatrix) {
    let net = corpus::find(name)
        .expect("bundled network")
        .network()
        .expect("parses");
    let sm = ScoreMatrix::from_network(&net).expect("scores");
    (net, sm)
}
