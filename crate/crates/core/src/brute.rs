//! Exhaustive set-partition search, the ground-truth oracle for small inputs.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scores::{Partition, ScoreMatrix};

pub const DEFAULT_LIMIT: usize = 12;

/// Exact maximum modularity over all set partitions of `sm`'s nodes.
///
/// Ties go to the lexicographically smallest canonical assignment.
pub fn brute_force_max(sm: &ScoreMatrix, limit: usize) -> Result<(Rational, Partition)> {
    let n = sm.n();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    let (best, assignment) = max_by_enumeration(n, |a, b| sm.pair(a, b));
    Ok((
        sm.value(best + sm.diag_total_units()),
        Partition::new(&assignment),
    ))
}

/// Maximizes `sum_{a<b, c(a)=c(b)} pair(a, b)` over all partitions of `n`
/// nodes. Returns the optimum and the first optimal restricted growth string.
pub fn max_by_enumeration(n: usize, pair: impl Fn(usize, usize) -> i128) -> (i128, Vec<usize>) {
    if n == 0 {
        return (0, Vec::new());
    }
    let mut dense = vec![0i128; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                dense[a * n + b] = pair(a.min(b), a.max(b));
            }
        }
    }
    let mut search = Search {
        n,
        dense,
        current: vec![0; n],
        best: i128::MIN,
        best_assignment: vec![0; n],
        links: vec![0; n * (n + 1)],
    };
    search.descend(1, 1, 0);
    (search.best, search.best_assignment)
}

struct Search {
    n: usize,
    dense: Vec<i128>,
    current: Vec<usize>,
    best: i128,
    best_assignment: Vec<usize>,
    links: Vec<i128>,
}

impl Search {
    fn descend(&mut self, node: usize, used: usize, acc: i128) {
        if node == self.n {
            if acc > self.best {
                self.best = acc;
                self.best_assignment.copy_from_slice(&self.current);
            }
            return;
        }
        let row = node * (self.n + 1);
        for c in 0..=used {
            self.links[row + c] = 0;
        }
        for j in 0..node {
            let c = self.current[j];
            self.links[row + c] += self.dense[node * self.n + j];
        }
        for c in 0..=used.min(self.n - 1) {
            self.current[node] = c;
            let gain = self.links[row + c];
            let next_used = if c == used { used + 1 } else { used };
            self.descend(node + 1, next_used, acc + gain);
        }
    }
}

/// Calls `visit` with every restricted growth string of length `n`.
pub fn for_each_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut current = vec![0usize; n];
    fn rec(node: usize, used: usize, current: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if node == current.len() {
            visit(current);
            return;
        }
        for c in 0..=used {
            current[node] = c;
            rec(
                node + 1,
                if c == used { used + 1 } else { used },
                current,
                visit,
            );
        }
    }
    rec(1, 1, &mut current, &mut visit);
}

/// Bell numbers `B(0..=n)`.
pub fn bell_numbers(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    let mut bells = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        bells.push(next[0]);
        row = next;
    }
    bells.truncate(n + 1);
    bells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_network;
    use crate::rational::ratio;
    use crate::scores::score_matrix;

    fn sm(edges: &[(&str, &str, i128)]) -> ScoreMatrix {
        let entries: Vec<_> = edges.iter().map(|&(a, b, w)| (a, b, ratio(w, 1))).collect();
        score_matrix(&build_network(&entries, false).unwrap()).unwrap()
    }

    #[test]
    fn bell_sequence() {
        assert_eq!(bell_numbers(6), vec![1, 1, 2, 5, 15, 52, 203]);
        assert_eq!(bell_numbers(12)[12], 4_213_597);
        assert_eq!(bell_numbers(10)[10], 115_975);
    }

    #[test]
    fn enumerates_bell_many() {
        for n in 0..8 {
            let mut count = 0u128;
            for_each_partition(n, |_| count += 1);
            assert_eq!(count, bell_numbers(n)[n]);
        }
    }

    #[test]
    fn dyad_optimum() {
        let (q, p) = brute_force_max(&sm(&[("a", "b", 1)]), DEFAULT_LIMIT).unwrap();
        assert_eq!(q, ratio(0, 1));
        assert_eq!(p.assignment(), &[0, 0]);
    }

    #[test]
    fn path_optimum() {
        let (q, p) = brute_force_max(&sm(&[("a", "b", 1), ("b", "c", 1)]), DEFAULT_LIMIT).unwrap();
        assert_eq!(q, ratio(0, 1));
        assert_eq!(p.assignment(), &[0, 0, 0]);
    }

    #[test]
    fn self_loop_singleton() {
        let (q, p) = brute_force_max(&sm(&[("a", "a", 1)]), DEFAULT_LIMIT).unwrap();
        assert_eq!(q, ratio(0, 1));
        assert_eq!(p.num_communities(), 1);
    }

    #[test]
    fn refuses_over_limit() {
        let s = sm(&[("a", "b", 1), ("b", "c", 1), ("c", "d", 1)]);
        assert!(matches!(
            brute_force_max(&s, 3),
            Err(Error::TooLarge { n: 4, limit: 3 })
        ));
    }

    #[test]
    fn two_triangles_split() {
        let s = sm(&[
            ("a", "b", 1),
            ("b", "c", 1),
            ("a", "c", 1),
            ("d", "e", 1),
            ("e", "f", 1),
            ("d", "f", 1),
            ("c", "d", 1),
        ]);
        let (q, p) = brute_force_max(&s, DEFAULT_LIMIT).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 1, 1, 1]);
        assert_eq!(q, s.modularity(&p).unwrap());
        // 5/14: two communities of 3 intra edges each out of 7, degree sums 7 each.
        assert_eq!(q, ratio(6, 7) - ratio(1, 2));
    }
}
