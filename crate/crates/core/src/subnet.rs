//! Penalties proven on small subnetworks.
//!
//! Restricted to a node subset, the best achievable share of the positive
//! scores is found by partial brute force: exclude `m` positive pairs, merge
//! along the rest, and raise `m` until no partition that cuts more positive
//! pairs could beat the best found. The shortfall against the sum of all
//! positive scores is the subnetwork's penalty. A linear program then shrinks
//! the scores the penalty rests on, so that several subnetworks can share
//! the same pair.

use std::collections::BTreeSet;
use std::ops::{AddAssign, Neg, RangeInclusive, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::chains::ResidualScores;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram};
use crate::rational::{from_i128, Rational};

/// Index of the local pair `(i, j)`, `i < j`, among the `k * (k - 1) / 2`
/// pairs of a `k`-node subnetwork.
#[inline]
pub fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

/// Local pairs `(i, j)` in index order.
pub fn local_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
}

/// Node subset with its own pair scores, in score units.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subnetwork {
    nodes: Vec<usize>,
    scores: Vec<Rational>,
}

impl Subnetwork {
    /// `scores` lists the pairs of `nodes` (ascending) in [`pair_index`] order.
    pub fn new(nodes: Vec<usize>, scores: Vec<Rational>) -> Result<Self> {
        let k = nodes.len();
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "subnetwork nodes must be strictly ascending".into(),
            ));
        }
        if scores.len() != k * k.saturating_sub(1) / 2 {
            return Err(Error::InvalidParameter(format!(
                "{} scores for {k} nodes",
                scores.len()
            )));
        }
        Ok(Subnetwork { nodes, scores })
    }

    /// Induced subnetwork with the current residual scores.
    pub fn from_residual(res: &ResidualScores, nodes: &[usize]) -> Self {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let scores = local_pairs(nodes.len())
            .map(|(i, j)| from_i128(res.residual(nodes[i], nodes[j])))
            .collect();
        Subnetwork { nodes, scores }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn scores(&self) -> &[Rational] {
        &self.scores
    }

    pub fn score(&self, i: usize, j: usize) -> &Rational {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        &self.scores[pair_index(self.size(), i, j)]
    }

    /// Sum of the positive internal scores.
    pub fn positive_sum(&self) -> Rational {
        self.scores.iter().filter(|s| s.is_positive()).sum()
    }

    /// At least one negative and two positive internal pairs.
    pub fn may_carry_penalty(&self) -> bool {
        let pos = self.scores.iter().filter(|s| s.is_positive()).count();
        pos >= 2 && self.scores.iter().any(|s| s.is_negative())
    }

    /// Loads in global node ids, zero pairs omitted.
    pub fn loads(&self) -> Vec<(usize, usize, Rational)> {
        local_pairs(self.size())
            .zip(&self.scores)
            .filter(|(_, s)| !s.is_zero())
            .map(|((i, j), s)| (self.nodes[i], self.nodes[j], s.clone()))
            .collect()
    }

    /// Sum of intra-community scores under a local labelling.
    pub fn partition_value(&self, labels: &[usize]) -> Rational {
        local_pairs(self.size())
            .zip(&self.scores)
            .filter(|((i, j), _)| labels[*i] == labels[*j])
            .map(|(_, s)| s.clone())
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedSubnetwork {
    pub sub: Subnetwork,
    /// Best internal partition value found, which is proven maximal.
    pub q_star: Rational,
    /// Proven upper bound on any internal partition value; equals `q_star`.
    pub upper: Rational,
    /// `positive_sum - q_star`.
    pub penalty: Rational,
    /// Local community labels achieving `q_star`.
    pub witness: Vec<usize>,
    /// Local labellings of every partition evaluated before resolution.
    pub proof_partitions: Vec<Vec<usize>>,
    /// Every partition cutting fewer positive pairs than this was evaluated;
    /// any `cut_order` positive pairs together weigh at least `penalty`.
    pub cut_order: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Resolution {
    Resolved(ResolvedSubnetwork),
    Unresolved {
        sub: Subnetwork,
        /// Best lower value seen before the exclusion cap was hit.
        best: Rational,
        evaluated: usize,
    },
}

impl Resolution {
    pub fn resolved(self) -> Option<ResolvedSubnetwork> {
        match self {
            Resolution::Resolved(r) => Some(r),
            Resolution::Unresolved { .. } => None,
        }
    }
}

trait Units:
    Clone
    + Ord
    + Zero
    + AddAssign
    + for<'a> AddAssign<&'a Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
{
}
impl<T> Units for T where
    T: Clone
        + Ord
        + Zero
        + AddAssign
        + for<'a> AddAssign<&'a T>
        + Sub<Output = T>
        + Neg<Output = T>
{
}

struct Search<T> {
    best: T,
    witness: Vec<usize>,
    records: Vec<Vec<usize>>,
    cut_order: usize,
    resolved: bool,
}

/// Partial brute force over integer scores.
fn search<T: Units>(k: usize, scores: &[T], cap: usize, discard: bool) -> Search<T> {
    let pairs: Vec<(usize, usize)> = local_pairs(k).collect();
    let positives: Vec<usize> = (0..pairs.len())
        .filter(|&e| scores[e] > T::zero())
        .collect();
    let negatives: Vec<usize> = (0..pairs.len())
        .filter(|&e| scores[e] < T::zero())
        .collect();
    let mut ascending: Vec<T> = positives.iter().map(|&e| scores[e].clone()).collect();
    ascending.sort();
    let mut total = T::zero();
    for s in &ascending {
        total += s;
    }

    let mut out = Search {
        best: T::zero(),
        witness: (0..k).collect(),
        records: Vec::new(),
        cut_order: 0,
        resolved: false,
    };
    let mut smallest = T::zero();
    let mut excluded = vec![false; pairs.len()];
    let mut labels = vec![0usize; k];
    let mut parent = vec![0usize; k];
    for m in 0..=positives.len().min(cap) {
        for_each_combination(positives.len(), m, |chosen| {
            excluded.iter_mut().for_each(|x| *x = false);
            let mut cut = T::zero();
            for &c in chosen {
                excluded[positives[c]] = true;
                cut += &scores[positives[c]];
            }
            for (v, p) in parent.iter_mut().enumerate() {
                *p = v;
            }
            for &e in &positives {
                if !excluded[e] {
                    let (a, b) = pairs[e];
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
            if discard {
                for &c in chosen {
                    let (a, b) = pairs[positives[c]];
                    if find(&mut parent, a) == find(&mut parent, b) {
                        return;
                    }
                }
            }
            canonical_labels(&mut parent, &mut labels);
            let mut value = total.clone() - cut;
            for &e in &negatives {
                let (a, b) = pairs[e];
                if labels[a] == labels[b] {
                    value += &scores[e];
                }
            }
            if value > out.best {
                out.best = value;
                out.witness = labels.clone();
            }
            out.records.push(labels.clone());
        });
        if m < ascending.len() {
            smallest += &ascending[m];
        }
        if total.clone() - smallest.clone() <= out.best {
            out.cut_order = m + 1;
            out.resolved = true;
            break;
        }
    }
    out
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// First-appearance labels of the union-find roots.
fn canonical_labels(parent: &mut [usize], labels: &mut [usize]) {
    let k = parent.len();
    let mut root_label = vec![usize::MAX; k];
    let mut next = 0;
    for (v, label) in labels.iter_mut().enumerate().take(k) {
        let r = find(parent, v);
        if root_label[r] == usize::MAX {
            root_label[r] = next;
            next += 1;
        }
        *label = root_label[r];
    }
}

/// Calls `visit` with every `m`-subset of `0..n` in lexicographic order.
fn for_each_combination(n: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    if m > n {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        visit(&idx);
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Integer numerators of `scores` over a common denominator.
fn integer_scores(scores: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = scores
        .iter()
        .fold(BigInt::from(1), |acc, s| acc.lcm(s.denom()));
    let nums = scores
        .iter()
        .map(|s| s.numer() * (&den / s.denom()))
        .collect();
    (nums, den)
}

/// Resolves `sub` by partial brute force, excluding at most `cap` positive
/// pairs at a time.
pub fn partial_brute_force(sub: &Subnetwork, cap: usize) -> Resolution {
    resolve(sub, cap, true)
}

/// [`partial_brute_force`] without skipping exclusion sets whose pairs end
/// up inside a merged group. Only useful for cross-checking.
pub fn partial_brute_force_keep_all(sub: &Subnetwork, cap: usize) -> Resolution {
    resolve(sub, cap, false)
}

fn resolve(sub: &Subnetwork, cap: usize, discard: bool) -> Resolution {
    let k = sub.size();
    let (nums, den) = integer_scores(&sub.scores);
    let small: Option<Vec<i128>> = nums
        .iter()
        .map(|v| v.to_i128().filter(|x| x.abs() < 1 << 100))
        .collect();
    let (best, found) = match small {
        Some(ints) => {
            let s = search(k, &ints, cap, discard);
            (Rational::new(BigInt::from(s.best), den), Found::from(s))
        }
        None => {
            let s = search(k, &nums, cap, discard);
            (Rational::new(s.best.clone(), den), Found::from(s))
        }
    };
    if !found.resolved {
        return Resolution::Unresolved {
            sub: sub.clone(),
            best,
            evaluated: found.records.len(),
        };
    }
    let penalty = sub.positive_sum() - &best;
    Resolution::Resolved(ResolvedSubnetwork {
        sub: sub.clone(),
        upper: best.clone(),
        q_star: best,
        penalty,
        witness: found.witness,
        proof_partitions: found.records,
        cut_order: found.cut_order,
    })
}

struct Found {
    witness: Vec<usize>,
    records: Vec<Vec<usize>>,
    cut_order: usize,
    resolved: bool,
}

impl<T> From<Search<T>> for Found {
    fn from(s: Search<T>) -> Self {
        Found {
            witness: s.witness,
            records: s.records,
            cut_order: s.cut_order,
            resolved: s.resolved,
        }
    }
}

/// Smallest-footprint scores (same signs, magnitudes no larger) that still
/// carry the penalty of `rs`. Falls back to the original scores when the
/// reduction fails to re-verify.
pub fn reduce_weights(rs: &ResolvedSubnetwork) -> Result<Subnetwork> {
    reduce_weights_checked(rs).map(|(sub, _)| sub)
}

/// Like [`reduce_weights`], also telling whether the reduced scores passed
/// re-verification (`false` means the original scores were returned).
pub fn reduce_weights_checked(rs: &ResolvedSubnetwork) -> Result<(Subnetwork, bool)> {
    let sub = &rs.sub;
    let k = sub.size();
    let p = &rs.penalty;
    if !p.is_positive() {
        return Err(Error::InvalidParameter(
            "subnetwork carries no penalty".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = local_pairs(k).collect();
    // One variable per nonzero pair: y = |score| - x, maximized.
    let vars: Vec<usize> = (0..pairs.len())
        .filter(|&e| !sub.scores[e].is_zero())
        .collect();
    let mut var_of = vec![usize::MAX; pairs.len()];
    for (v, &e) in vars.iter().enumerate() {
        var_of[e] = v;
    }
    let mag: Vec<Rational> = vars.iter().map(|&e| sub.scores[e].abs()).collect();
    let positives: Vec<usize> = vars
        .iter()
        .copied()
        .filter(|&e| sub.scores[e].is_positive())
        .collect();

    let mut lp = LinearProgram::new(vars.len());
    lp.objective = vec![from_i128(1); vars.len()];
    for (v, m) in mag.iter().enumerate() {
        lp.add_row(vec![(v, from_i128(1))], m.clone());
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut push = |lp: &mut LinearProgram, mut set: Vec<usize>| -> Result<bool> {
        set.sort_unstable();
        if !seen.insert(set.clone()) {
            return Ok(false);
        }
        let cap: Rational = set.iter().map(|&v| mag[v].clone()).sum::<Rational>() - p;
        if cap.is_negative() {
            return Err(Error::Lp(
                "proof constraint violated by the original scores".into(),
            ));
        }
        lp.add_row(set.into_iter().map(|v| (v, from_i128(1))).collect(), cap);
        Ok(true)
    };
    for labels in &rs.proof_partitions {
        let set: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(_, &e)| {
                let (i, j) = pairs[e];
                let together = labels[i] == labels[j];
                sub.scores[e].is_positive() != together
            })
            .map(|(v, _)| v)
            .collect();
        push(&mut lp, set)?;
    }

    let reduced = loop {
        let sol = solve_lp(&lp)?;
        let x: Vec<Rational> = mag.iter().zip(&sol.values).map(|(m, y)| m - y).collect();
        let mut order: Vec<usize> = positives.iter().map(|&e| var_of[e]).collect();
        order.sort_by(|&a, &b| x[a].cmp(&x[b]).then(a.cmp(&b)));
        order.truncate(rs.cut_order);
        let lightest: Rational = order.iter().map(|&v| x[v].clone()).sum();
        if order.len() == rs.cut_order && &lightest < p {
            if push(&mut lp, order)? {
                continue;
            }
            return Err(Error::Lp("cutting plane loop repeated a constraint".into()));
        }
        break x;
    };

    let mut scores = vec![Rational::zero(); pairs.len()];
    for (v, &e) in vars.iter().enumerate() {
        scores[e] = if sub.scores[e].is_negative() {
            -reduced[v].clone()
        } else {
            reduced[v].clone()
        };
    }
    let candidate = Subnetwork {
        nodes: sub.nodes.clone(),
        scores,
    };
    let verified = match partial_brute_force(&candidate, pairs.len()) {
        Resolution::Resolved(r) => &r.penalty >= p,
        Resolution::Unresolved { .. } => false,
    };
    Ok(if verified {
        (candidate, true)
    } else {
        (sub.clone(), false)
    })
}

/// Connected node subsets of size `3..=max_size` in the graph of positive
/// residual pairs that may carry a penalty, in canonical order (by smallest
/// node, then discovery order). `limit` caps the number returned.
pub fn enumerate_subnetworks(
    res: &ResidualScores,
    max_size: usize,
    limit: Option<usize>,
) -> Vec<Subnetwork> {
    let n = res.n();
    if max_size < 3 {
        return Vec::new();
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| b != a && res.residual(a, b) > 0)
                .collect()
        })
        .collect();
    let per_anchor: Vec<Vec<Vec<usize>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut found = Vec::new();
            let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
            let mut sub = vec![v];
            let mut near = vec![false; n];
            near[v] = true;
            for &u in &adj[v] {
                near[u] = true;
            }
            extend_subgraph(&adj, v, max_size, &mut sub, ext, &mut near, &mut found);
            found
        })
        .collect();
    let mut out = Vec::new();
    for group in per_anchor {
        for nodes in group {
            let candidate = Subnetwork::from_residual(res, &nodes);
            if candidate.may_carry_penalty() {
                out.push(candidate);
                if limit.is_some_and(|l| out.len() >= l) {
                    return out;
                }
            }
        }
    }
    out
}

/// Extension step of connected-subgraph enumeration: every connected set
/// containing `anchor` as its smallest node is produced exactly once.
fn extend_subgraph(
    adj: &[Vec<usize>],
    anchor: usize,
    max_size: usize,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    near: &mut [bool],
    found: &mut Vec<Vec<usize>>,
) {
    if sub.len() >= 3 {
        found.push(sub.clone());
    }
    if sub.len() == max_size {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next_ext = ext.clone();
        let mut added = Vec::new();
        for &u in &adj[w] {
            if u > anchor && !near[u] {
                near[u] = true;
                added.push(u);
                next_ext.push(u);
            }
        }
        sub.push(w);
        extend_subgraph(adj, anchor, max_size, sub, next_ext, near, found);
        sub.pop();
        for u in added {
            near[u] = false;
        }
    }
}

/// Every penalized subnetwork with a size in `sizes`, resolved and reduced.
/// Subnetworks that stay unresolved under `cap` exclusions are dropped;
/// `limit` caps how many are enumerated.
pub fn resolve_all(
    res: &ResidualScores,
    sizes: RangeInclusive<usize>,
    cap: usize,
    limit: Option<usize>,
) -> Result<Vec<ResolvedSubnetwork>> {
    let mut subs = enumerate_subnetworks(res, *sizes.end(), None);
    subs.retain(|s| sizes.contains(&s.size()));
    if let Some(l) = limit {
        subs.truncate(l);
    }
    let resolved: Vec<Result<Option<ResolvedSubnetwork>>> = subs
        .par_iter()
        .map(|sub| match partial_brute_force(sub, cap) {
            Resolution::Resolved(r) if r.penalty.is_positive() => {
                let reduced = reduce_weights(&r)?;
                Ok(Some(ResolvedSubnetwork { sub: reduced, ..r }))
            }
            _ => Ok(None),
        })
        .collect();
    let mut out = Vec::new();
    for r in resolved {
        if let Some(r) = r? {
            out.push(r);
        }
    }
    Ok(out)
}
