//! Planted-partition benchmark networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{build_network_with_nodes, Network};
use crate::rational::{from_i128, Rational};

/// Undirected network of `n` nodes split into `communities` contiguous,
/// near-equal groups. Each pair is linked with probability `p_in` inside a
/// group and `p_out` across; link weights are uniform integers in
/// `1..=weight_scale`. Node `i` of group `c` is labelled `"{i}:{c}"`.
pub fn generate_planted(
    n: usize,
    communities: usize,
    p_in: f64,
    p_out: f64,
    weight_scale: u32,
    seed: u64,
) -> Result<Network> {
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out >= p_in {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= p_out < p_in <= 1, got p_in = {p_in}, p_out = {p_out}"
        )));
    }
    if communities == 0 || communities > n {
        return Err(Error::InvalidParameter(format!(
            "cannot split {n} nodes into {communities} communities"
        )));
    }
    if weight_scale == 0 {
        return Err(Error::InvalidParameter(
            "weight scale must be positive".into(),
        ));
    }
    let group: Vec<usize> = (0..n).map(|i| i * communities / n).collect();
    let labels: Vec<String> = (0..n).map(|i| format!("{i}:{}", group[i])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(&str, &str, Rational)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = if group[a] == group[b] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                let w = rng.gen_range(1..=weight_scale);
                edges.push((&labels[a], &labels[b], from_i128(i128::from(w))));
            }
        }
    }
    build_network_with_nodes(&labels, &edges, false)
}

/// Planted community of every node, read back from `"{i}:{c}"` labels.
pub fn planted_communities(net: &Network) -> Option<Vec<usize>> {
    net.labels()
        .iter()
        .map(|l| l.rsplit_once(':').and_then(|(_, c)| c.parse().ok()))
        .collect()
}

/// Adjusted Rand index between two labellings of the same nodes.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labellings differ in length");
    let n = a.len();
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let pairs = |c: u64| (c * c.saturating_sub(1) / 2) as f64;
    let index: f64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let rows: f64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let cols: f64 = (0..kb)
        .map(|j| pairs(table.iter().map(|r| r[j]).sum()))
        .sum();
    let total = pairs(n as u64);
    let expected = rows * cols / total;
    let max = (rows + cols) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
