//! Upper bounds from penalized chains.
//!
//! A chain `A1, ..., Ak` whose consecutive pairs all score positive while
//! the closing pair `(A1, Ak)` scores negative cannot collect every one of
//! those scores at once: either some positive pair is cut or the negative
//! pair lands inside a community. Its penalty is the smallest magnitude
//! among the `k` pair scores. Reduced chains (the same pairs scored `p` and
//! `-p`) are subtracted from a residual score matrix one by one, so their
//! penalties add up while the residual keeps every pair's sign and never
//! grows in magnitude.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scores::ScoreMatrix;

pub const DEFAULT_PATH_BUDGET: u64 = 10_000_000;

/// Pair scores after subtracting applied reduced components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualScores {
    n: usize,
    base: Vec<i128>,
    current: Vec<i128>,
}

impl ResidualScores {
    pub fn new(sm: &ScoreMatrix) -> Self {
        ResidualScores {
            n: sm.n(),
            base: sm.pair_units().to_vec(),
            current: sm.pair_units().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn residual(&self, a: usize, b: usize) -> i128 {
        self.current[a * self.n + b]
    }

    #[inline]
    pub fn base(&self, a: usize, b: usize) -> i128 {
        self.base[a * self.n + b]
    }

    /// Signed adjustment applied so far: `residual - base`.
    pub fn delta(&self, a: usize, b: usize) -> i128 {
        self.residual(a, b) - self.base(a, b)
    }

    fn add(&mut self, a: usize, b: usize, amount: i128) {
        self.current[a * self.n + b] += amount;
        self.current[b * self.n + a] += amount;
    }

    /// Every residual keeps the sign of its base score and does not exceed it
    /// in magnitude.
    pub fn is_legal(&self) -> bool {
        self.base.iter().zip(&self.current).all(|(&s, &r)| {
            if s >= 0 {
                (0..=s).contains(&r)
            } else {
                (s..=0).contains(&r)
            }
        })
    }

    /// Positive-residual neighbours of each node, ascending.
    fn positive_adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|a| {
                (0..self.n)
                    .filter(|&b| b != a && self.residual(a, b) > 0)
                    .collect()
            })
            .collect()
    }

    /// Component id of every node in the positive-residual graph.
    pub fn positive_components(&self) -> Vec<usize> {
        let adj = self.positive_adjacency();
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        queue.push_back(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub nodes: Vec<usize>,
    /// Penalty in score units.
    pub penalty: i128,
}

impl Chain {
    /// Node pairs with their reduced-score sign: consecutive pairs `+1`, the
    /// closing pair `-1`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        let k = self.nodes.len();
        self.nodes
            .windows(2)
            .map(|w| (w[0], w[1], 1))
            .chain(std::iter::once((self.nodes[0], self.nodes[k - 1], -1)))
    }
}

/// Penalty of the chain through `nodes` on the current residual.
pub fn chain_penalty(res: &ResidualScores, nodes: &[usize]) -> Result<i128> {
    let k = nodes.len();
    if k < 3 {
        return Err(Error::InvalidChain(format!(
            "needs at least 3 nodes, got {k}"
        )));
    }
    for (i, &v) in nodes.iter().enumerate() {
        if v >= res.n {
            return Err(Error::InvalidChain(format!("node {v} out of range")));
        }
        if nodes[..i].contains(&v) {
            return Err(Error::InvalidChain(format!("node {v} repeats")));
        }
    }
    let closing = res.residual(nodes[0], nodes[k - 1]);
    if closing >= 0 {
        return Err(Error::InvalidChain(format!(
            "closing pair ({}, {}) is not negative",
            nodes[0],
            nodes[k - 1]
        )));
    }
    let mut penalty = -closing;
    for w in nodes.windows(2) {
        let s = res.residual(w[0], w[1]);
        if s <= 0 {
            return Err(Error::InvalidChain(format!(
                "pair ({}, {}) is not positive",
                w[0], w[1]
            )));
        }
        penalty = penalty.min(s);
    }
    Ok(penalty)
}

/// Subtracts the reduced chain from `res`.
pub fn apply_chain(res: &mut ResidualScores, chain: &Chain) -> Result<()> {
    let available = chain_penalty(res, &chain.nodes)?;
    if chain.penalty <= 0 || chain.penalty > available {
        return Err(Error::InvalidChain(format!(
            "penalty {} outside (0, {available}]",
            chain.penalty
        )));
    }
    for (a, b, sign) in chain.pairs().collect::<Vec<_>>() {
        res.add(a, b, -i128::from(sign) * chain.penalty);
    }
    debug_assert!(res.is_legal());
    Ok(())
}

/// All penalized chains with exactly `k` nodes, in lexicographic node order,
/// each listed once with its smaller endpoint first.
#[derive(Clone, Debug, Default)]
pub struct ChainSearch {
    pub chains: Vec<Chain>,
    /// Set when the path budget ran out before the enumeration finished.
    pub truncated: bool,
    pub visited: u64,
}

pub fn find_penalized_chains(res: &ResidualScores, k: usize, budget: u64) -> ChainSearch {
    let n = res.n;
    let mut out = ChainSearch::default();
    if k < 3 || k > n {
        return out;
    }
    let adj = res.positive_adjacency();
    let comp = res.positive_components();
    let mut dist = vec![usize::MAX; n];
    let mut path = Vec::with_capacity(k);
    let mut on_path = vec![false; n];

    for start in 0..n {
        let targets: Vec<usize> = (start + 1..n)
            .filter(|&b| comp[b] == comp[start] && res.residual(start, b) < 0)
            .collect();
        if targets.is_empty() {
            continue;
        }
        // Distance from every node to the nearest closing endpoint.
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        let mut queue = VecDeque::new();
        for &t in &targets {
            dist[t] = 0;
            queue.push_back(t);
        }
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        if dist[start] > k - 1 {
            continue;
        }
        path.clear();
        path.push(start);
        on_path[start] = true;
        let mut frame = Dfs {
            res,
            adj: &adj,
            dist: &dist,
            k,
            budget,
            path: &mut path,
            on_path: &mut on_path,
            out: &mut out,
        };
        frame.extend(i128::MAX);
        on_path[start] = false;
        if out.truncated {
            break;
        }
    }
    out
}

struct Dfs<'a> {
    res: &'a ResidualScores,
    adj: &'a [Vec<usize>],
    dist: &'a [usize],
    k: usize,
    budget: u64,
    path: &'a mut Vec<usize>,
    on_path: &'a mut [bool],
    out: &'a mut ChainSearch,
}

impl Dfs<'_> {
    fn extend(&mut self, interior_min: i128) {
        let last = *self.path.last().unwrap();
        let start = self.path[0];
        if self.path.len() == self.k {
            let closing = self.res.residual(start, last);
            if last > start && closing < 0 {
                self.out.chains.push(Chain {
                    nodes: self.path.clone(),
                    penalty: interior_min.min(-closing),
                });
            }
            return;
        }
        let remaining = self.k - self.path.len();
        for i in 0..self.adj[last].len() {
            let next = self.adj[last][i];
            if self.on_path[next] || self.dist[next] > remaining - 1 {
                continue;
            }
            self.out.visited += 1;
            if self.out.visited > self.budget {
                self.out.truncated = true;
                return;
            }
            let s = self.res.residual(last, next);
            self.path.push(next);
            self.on_path[next] = true;
            self.extend(interior_min.min(s));
            self.on_path[next] = false;
            self.path.pop();
            if self.out.truncated {
                return;
            }
        }
    }
}

/// True iff some component of the positive-residual graph contains a pair
/// with negative residual.
pub fn has_remaining_penalized_chain(res: &ResidualScores) -> bool {
    let comp = res.positive_components();
    (0..res.n).any(|a| (a + 1..res.n).any(|b| comp[a] == comp[b] && res.residual(a, b) < 0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    /// Highest penalty, ties to the lexicographically smallest node sequence.
    Best,
    /// Uniformly random among the remaining chains.
    Random,
    /// Best with the given probability, random otherwise.
    Mixed(f64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Best => write!(f, "best"),
            Strategy::Random => write!(f, "random"),
            Strategy::Mixed(p) => write!(f, "mixed:{p}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best" => Ok(Strategy::Best),
            "random" => Ok(Strategy::Random),
            "mixed" => Ok(Strategy::Mixed(0.5)),
            other => {
                let p = other
                    .strip_prefix("mixed:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .filter(|p| (0.0..=1.0).contains(p))
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("unknown strategy {other:?}"))
                    })?;
                Ok(Strategy::Mixed(p))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainOptions {
    pub strategy: Strategy,
    pub seed: u64,
    pub tries_per_k: usize,
    /// Partial paths visited per chain length before giving up on that length.
    pub path_budget: u64,
    /// Longest chain considered; `None` means the node count.
    pub max_k: Option<usize>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            strategy: Strategy::Best,
            seed: 0,
            tries_per_k: 1,
            path_budget: DEFAULT_PATH_BUDGET,
            max_k: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainCertificate {
    /// Values in score units; see [`ChainCertificate::bound_value`].
    pub trivial_bound: i128,
    pub chains: Vec<Chain>,
    pub total_penalty: i128,
    pub bound: i128,
    pub residual: ResidualScores,
    pub strategy: Strategy,
    pub seed: u64,
    /// Some chain length hit the path budget.
    pub truncated: bool,
    /// Longest chain length searched.
    pub max_k: usize,
}

impl ChainCertificate {
    pub fn bound_value(&self, sm: &ScoreMatrix) -> Rational {
        sm.value(self.bound)
    }

    pub fn trivial_value(&self, sm: &ScoreMatrix) -> Rational {
        sm.value(self.trivial_bound)
    }
}

/// Greedy chain selection: lengths `k = 3, 4, ...`; at each length keep
/// picking penalized chains (by `strategy`) and subtracting them until none
/// is left, then move to the next length while penalized structure remains.
pub fn greedy_certify(sm: &ScoreMatrix, opts: &ChainOptions) -> ChainCertificate {
    let n = sm.n();
    let trivial = sm.trivial_bound_units();
    let mut res = ResidualScores::new(sm);
    let mut chains = Vec::new();
    let mut truncated = false;
    let max_k = opts.max_k.unwrap_or(n).min(n);
    let mut k = 3;
    let mut searched = 0;
    while k <= max_k && has_remaining_penalized_chain(&res) {
        searched = k;
        let found = find_penalized_chains(&res, k, opts.path_budget);
        truncated |= found.truncated;
        if !found.chains.is_empty() {
            let mut best: Option<(i128, ResidualScores, Vec<Chain>)> = None;
            for t in 0..opts.tries_per_k.max(1) {
                let mut trial = res.clone();
                let seed =
                    opts.seed ^ ((k as u64) << 32) ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let picked = select_chains(&mut trial, &found.chains, opts.strategy, seed);
                let total: i128 = picked.iter().map(|c| c.penalty).sum();
                if best.as_ref().is_none_or(|b| total > b.0) {
                    best = Some((total, trial, picked));
                }
            }
            let (_, trial, picked) = best.expect("at least one try");
            res = trial;
            chains.extend(picked);
        }
        k += 1;
    }
    let total_penalty: i128 = chains.iter().map(|c| c.penalty).sum();
    ChainCertificate {
        trivial_bound: trivial,
        total_penalty,
        bound: trivial - total_penalty,
        chains,
        residual: res,
        strategy: opts.strategy,
        seed: opts.seed,
        truncated,
        max_k: searched,
    }
}

fn current_penalty(res: &ResidualScores, nodes: &[usize]) -> i128 {
    let k = nodes.len();
    let closing = res.residual(nodes[0], nodes[k - 1]);
    if closing >= 0 {
        return 0;
    }
    let mut p = -closing;
    for w in nodes.windows(2) {
        let s = res.residual(w[0], w[1]);
        if s <= 0 {
            return 0;
        }
        p = p.min(s);
    }
    p
}

/// Applies candidates to `res` until every candidate is saturated.
fn select_chains(
    res: &mut ResidualScores,
    candidates: &[Chain],
    strategy: Strategy,
    seed: u64,
) -> Vec<Chain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut heap: BinaryHeap<(i128, Reverse<usize>)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (c.penalty, Reverse(i)))
        .collect();
    let mut pool: Vec<usize> = (0..candidates.len()).collect();
    let mut picked = Vec::new();

    loop {
        let use_best = match strategy {
            Strategy::Best => true,
            Strategy::Random => false,
            Strategy::Mixed(p) => rng.gen_bool(p),
        };
        let choice = if use_best {
            pop_best(res, candidates, &mut heap)
        } else {
            pop_random(res, candidates, &mut pool, &mut rng)
        };
        let Some((idx, penalty)) = choice else { break };
        let chain = Chain {
            nodes: candidates[idx].nodes.clone(),
            penalty,
        };
        apply_chain(res, &chain).expect("candidate re-validated on the current residual");
        picked.push(chain);
    }
    picked
}

fn pop_best(
    res: &ResidualScores,
    candidates: &[Chain],
    heap: &mut BinaryHeap<(i128, Reverse<usize>)>,
) -> Option<(usize, i128)> {
    while let Some((stored, Reverse(idx))) = heap.pop() {
        let now = current_penalty(res, &candidates[idx].nodes);
        if now == 0 {
            continue;
        }
        if now == stored {
            return Some((idx, now));
        }
        heap.push((now, Reverse(idx)));
    }
    None
}

fn pop_random(
    res: &ResidualScores,
    candidates: &[Chain],
    pool: &mut Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, i128)> {
    while !pool.is_empty() {
        let slot = rng.gen_range(0..pool.len());
        let idx = pool[slot];
        let now = current_penalty(res, &candidates[idx].nodes);
        if now > 0 {
            return Some((idx, now));
        }
        pool.swap_remove(slot);
    }
    None
}
