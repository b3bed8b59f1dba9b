#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use modbound::network::build_network_with_nodes;
use modbound::Network;

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Edge list over `n` nodes named `v0..`, every node kept.
pub fn network(n: usize, edges: &[(usize, usize, Q)], directed: bool) -> Option<Network> {
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let entries: Vec<(&str, &str, Q)> = edges
        .iter()
        .map(|(a, b, w)| (labels[*a].as_str(), labels[*b].as_str(), w.clone()))
        .collect();
    build_network_with_nodes(&labels, &entries, directed).ok()
}

/// Random networks with 2..=`max_n` nodes, unit or small rational weights,
/// occasional self-loops.
pub fn arb_network(max_n: usize, allow_directed: bool) -> impl Strategy<Value = Network> {
    (2..=max_n, any::<bool>(), any::<bool>())
        .prop_flat_map(move |(n, directed, unit)| {
            let edge = (0..n, 0..n, 1i64..=6, 1i64..=4);
            (
                Just(n),
                Just(directed && allow_directed),
                Just(unit),
                prop::collection::vec(edge, 1..=3 * n),
            )
        })
        .prop_filter_map("needs positive weight", |(n, directed, unit, raw)| {
            let edges: Vec<(usize, usize, Q)> = raw
                .into_iter()
                .map(|(a, b, num, den)| (a, b, if unit { q(1, 1) } else { q(num, den) }))
                .collect();
            network(n, &edges, directed)
        })
}

/// Seeded random network: each ordered (directed) or unordered pair is an
/// edge with probability `density`.
pub fn random_network(
    rng: &mut impl Rng,
    n: usize,
    density: f64,
    weighted: bool,
    directed: bool,
) -> Network {
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || (!directed && b < a) {
                    continue;
                }
                if rng.gen::<f64>() < density {
                    let w = if weighted {
                        q(rng.gen_range(1..=9), rng.gen_range(1..=4))
                    } else {
                        q(1, 1)
                    };
                    edges.push((a, b, w));
                }
            }
        }
        if let Some(net) = network(n, &edges, directed) {
            return net;
        }
    }
}

/// Modularity straight from the ordered-pair definition.
pub fn ordered_pair_modularity(net: &Network, community: &[usize]) -> Q {
    let n = net.node_count();
    let t = net.total_weight().clone();
    let mut out_w = vec![Q::zero(); n];
    let mut in_w = vec![Q::zero(); n];
    for (a, b, w) in net.edges() {
        out_w[a] += w;
        in_w[b] += w;
    }
    let mut total = Q::zero();
    for a in 0..n {
        for b in 0..n {
            if community[a] == community[b] {
                total += net.weight(a, b) / &t - &out_w[a] * &in_w[b] / (&t * &t);
            }
        }
    }
    total
}

/// Visits every set partition of `0..n` as a restricted growth string.
pub fn all_partitions(n: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(labels: &mut Vec<usize>, n: usize, max: usize, visit: &mut impl FnMut(&[usize])) {
        if labels.len() == n {
            visit(labels);
            return;
        }
        for c in 0..=max {
            labels.push(c);
            go(labels, n, max.max(c + 1), visit);
            labels.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, 0, visit);
}

/// Exhaustive maximum of the ordered-pair modularity.
pub fn exhaustive_max(net: &Network) -> Q {
    let mut best: Option<Q> = None;
    all_partitions(net.node_count(), &mut |p| {
        let v = ordered_pair_modularity(net, p);
        if best.as_ref().is_none_or(|b| &v > b) {
            best = Some(v);
        }
    });
    best.unwrap()
}

/// Exhaustive maximum of the intra-group score sum for local pair scores.
pub fn exhaustive_sub_max(k: usize, score: impl Fn(usize, usize) -> Q) -> Q {
    let mut best: Option<Q> = None;
    all_partitions(k, &mut |p| {
        let mut v = Q::zero();
        for i in 0..k {
            for j in i + 1..k {
                if p[i] == p[j] {
                    v += score(i, j);
                }
            }
        }
        if best.as_ref().is_none_or(|b| &v > b) {
            best = Some(v);
        }
    });
    best.unwrap()
}
