//! Merge/split local search for high-modularity partitions.
//!
//! The search keeps a set of communities and repeatedly tries, for every
//! ordered pair (source, destination) with the destination possibly a new
//! empty community, a Kernighan-Lin series of single-node moves from source
//! to destination. The best prefix of each series is a candidate
//! recombination: a prefix covering the whole source is a merge, a prefix
//! into the empty community is a split, anything else is a regrouping. The
//! globally best strictly improving candidate is applied until none is left.
//!
//! Gains are computed on the integer unit scores of [`ScoreMatrix`], so every
//! accepted step is an exact improvement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scores::{Partition, ScoreMatrix, ScoredPartition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizerConfig {
    pub seed: u64,
    /// Independent searches; restart 0 starts from a single community.
    pub restarts: usize,
    /// Cap on applied recombinations per search.
    pub max_passes: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            seed: 0,
            restarts: 8,
            max_passes: 1000,
        }
    }
}

/// Best partition found over `cfg.restarts` searches.
pub fn optimize(sm: &ScoreMatrix, cfg: &OptimizerConfig) -> ScoredPartition {
    let n = sm.n();
    let restarts = cfg.restarts.max(1);
    let results: Vec<(i128, Partition)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 || n <= 1 {
                Partition::single_community(n)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                let groups = n.min(2 + r);
                let raw: Vec<usize> = (0..n).map(|_| rng.gen_range(0..groups)).collect();
                Partition::new(&raw)
            };
            let p = Search::new(sm, &start).run(cfg.max_passes);
            (
                sm.modularity_units(&p).expect("partition sized to matrix"),
                p,
            )
        })
        .collect();
    let (_, best) = results
        .into_iter()
        .reduce(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1.assignment() < a.1.assignment()) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    sm.score(best).expect("partition sized to matrix")
}

/// Improves `start` with the same search; the result never scores lower.
pub fn refine(sm: &ScoreMatrix, start: &Partition, cfg: &OptimizerConfig) -> ScoredPartition {
    let p = Search::new(sm, start).run(cfg.max_passes);
    sm.score(p).expect("partition sized to matrix")
}

struct Search<'a> {
    sm: &'a ScoreMatrix,
    n: usize,
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
    /// `link[v * k + c]`: total score between `v` and the members of `c`.
    link: Vec<i128>,
}

struct Move {
    gain: i128,
    dest: usize,
    nodes: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(sm: &'a ScoreMatrix, start: &Partition) -> Self {
        assert_eq!(start.len(), sm.n());
        let mut s = Search {
            sm,
            n: sm.n(),
            assignment: start.assignment().to_vec(),
            members: Vec::new(),
            link: Vec::new(),
        };
        s.rebuild();
        s
    }

    fn rebuild(&mut self) {
        let canon = Partition::new(&self.assignment);
        self.assignment = canon.assignment().to_vec();
        self.members = canon.communities();
        let k = self.members.len();
        self.link = vec![0; self.n * k];
        let pairs = self.sm.pair_units();
        for v in 0..self.n {
            let row = &pairs[v * self.n..(v + 1) * self.n];
            for (u, &s) in row.iter().enumerate() {
                if s != 0 {
                    self.link[v * k + self.assignment[u]] += s;
                }
            }
        }
    }

    fn run(mut self, max_passes: usize) -> Partition {
        for _ in 0..max_passes {
            match self.best_move() {
                Some(m) if m.gain > 0 => {
                    // A destination id equal to the community count is fresh.
                    for v in m.nodes {
                        self.assignment[v] = m.dest;
                    }
                    self.rebuild();
                }
                _ => break,
            }
        }
        Partition::new(&self.assignment)
    }

    fn best_move(&self) -> Option<Move> {
        let k = self.members.len();
        let mut best: Option<Move> = None;
        for source in 0..k {
            for dest in 0..=k {
                if dest == source {
                    continue;
                }
                if let Some(m) = self.series(source, dest) {
                    if best.as_ref().is_none_or(|b| m.gain > b.gain) {
                        best = Some(m);
                    }
                }
            }
        }
        best
    }

    /// Kernighan-Lin series from `source` into `dest` (`dest == k` is a new
    /// community). Returns the best strictly positive prefix.
    fn series(&self, source: usize, dest: usize) -> Option<Move> {
        let k = self.members.len();
        let sources = &self.members[source];
        let steps = if dest == k {
            sources.len().saturating_sub(1)
        } else {
            sources.len()
        };
        if steps == 0 {
            return None;
        }
        let mut remaining: Vec<(usize, i128)> = sources
            .iter()
            .map(|&v| {
                let to = if dest == k {
                    0
                } else {
                    self.link[v * k + dest]
                };
                (v, to - self.link[v * k + source])
            })
            .collect();
        let mut moved = Vec::with_capacity(steps);
        let mut cum = 0i128;
        let mut best_gain = 0i128;
        let mut best_len = 0usize;
        for step in 1..=steps {
            let (pick, _) =
                remaining
                    .iter()
                    .enumerate()
                    .fold((0usize, i128::MIN), |acc, (i, &(v, g))| {
                        if g > acc.1 || (g == acc.1 && v < remaining[acc.0].0) {
                            (i, g)
                        } else {
                            acc
                        }
                    });
            let (v, g) = remaining.swap_remove(pick);
            cum += g;
            moved.push(v);
            for (w, gw) in remaining.iter_mut() {
                *gw += 2 * self.sm.pair(*w, v);
            }
            if cum > best_gain {
                best_gain = cum;
                best_len = step;
            }
        }
        if best_len == 0 {
            return None;
        }
        moved.truncate(best_len);
        Some(Move {
            gain: best_gain,
            dest,
            nodes: moved,
        })
    }
}
