//! Effective modularity scores and partitions.
//!
//! Scores are kept as integer numerators over one shared denominator, so all
//! downstream sums, minima and comparisons are exact `i128` arithmetic. The
//! stored pair score is `s(A,B) = q(A,B) + q(B,A)` for `A != B`, and the
//! diagonal is `d(A) = q(A,A)`, with
//! `q(A,B) = e(A,B)/T - w_out(A) w_in(B) / T^2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::rational::{common_denominator, Rational};

/// Largest magnitude a scaled score numerator may take.
const MAX_UNITS: i128 = 1 << 96;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreMatrix {
    n: usize,
    denominator: BigInt,
    pairs: Vec<i128>,
    diag: Vec<i128>,
}

/// Builds the exact score matrix of `net`.
pub fn score_matrix(net: &Network) -> Result<ScoreMatrix> {
    ScoreMatrix::from_network(net)
}

impl ScoreMatrix {
    pub fn from_network(net: &Network) -> Result<Self> {
        let n = net.node_count();
        let scale = common_denominator(net.edges().map(|(_, _, w)| w));
        let int =
            |w: &Rational| -> BigInt { (w * Rational::from_integer(scale.clone())).to_integer() };

        let mut weight = vec![BigInt::zero(); n * n];
        let mut out = vec![BigInt::zero(); n];
        let mut inn = vec![BigInt::zero(); n];
        for (a, b, w) in net.edges() {
            let w = int(w);
            out[a] += &w;
            inn[b] += &w;
            weight[a * n + b] = w;
        }
        let total: BigInt = out.iter().sum();
        if total.is_zero() {
            return Err(Error::ZeroTotalWeight);
        }

        let mut pair_nums = vec![BigInt::zero(); n * n];
        let mut diag_nums = Vec::with_capacity(n);
        for a in 0..n {
            diag_nums.push(&weight[a * n + a] * &total - &out[a] * &inn[a]);
            for b in a + 1..n {
                let v = (&weight[a * n + b] + &weight[b * n + a]) * &total
                    - &out[a] * &inn[b]
                    - &out[b] * &inn[a];
                pair_nums[a * n + b] = v;
            }
        }

        let mut denominator = &total * &total;
        let mut g = denominator.clone();
        for v in diag_nums.iter().chain(pair_nums.iter()) {
            if !v.is_zero() {
                g = g.gcd(v);
            }
            if g.is_one() {
                break;
            }
        }
        denominator /= &g;

        let shrink = |v: &BigInt| -> Result<i128> {
            let v = v / &g;
            match v.to_i128() {
                Some(x) if x.abs() <= MAX_UNITS => Ok(x),
                _ => Err(Error::ScoreOverflow),
            }
        };
        let mut pairs = vec![0i128; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let v = shrink(&pair_nums[a * n + b])?;
                pairs[a * n + b] = v;
                pairs[b * n + a] = v;
            }
        }
        let diag = diag_nums.iter().map(shrink).collect::<Result<Vec<_>>>()?;
        Ok(ScoreMatrix {
            n,
            denominator,
            pairs,
            diag,
        })
    }

    /// Builds a matrix directly from unit scores; used for synthetic score
    /// patterns. `pair(a, b)` is read for `a < b`.
    pub fn from_units(
        n: usize,
        denominator: BigInt,
        pair: impl Fn(usize, usize) -> i128,
        diag: Vec<i128>,
    ) -> Self {
        assert_eq!(diag.len(), n);
        assert!(denominator.is_positive());
        let mut pairs = vec![0i128; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let v = pair(a, b);
                pairs[a * n + b] = v;
                pairs[b * n + a] = v;
            }
        }
        ScoreMatrix {
            n,
            denominator,
            pairs,
            diag,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Shared denominator: a score of `u` units has value `u / denominator`.
    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// `s(a, b)` in units; zero for `a == b`.
    #[inline]
    pub fn pair(&self, a: usize, b: usize) -> i128 {
        self.pairs[a * self.n + b]
    }

    #[inline]
    pub fn diag(&self, a: usize) -> i128 {
        self.diag[a]
    }

    /// Row-major symmetric pair scores with zero diagonal.
    pub fn pair_units(&self) -> &[i128] {
        &self.pairs
    }

    pub fn diag_units(&self) -> &[i128] {
        &self.diag
    }

    pub fn value(&self, units: i128) -> Rational {
        Rational::new(BigInt::from(units), self.denominator.clone())
    }

    /// Converts a rational amount of units into its true value.
    pub fn value_of(&self, units: &Rational) -> Rational {
        units / Rational::from_integer(self.denominator.clone())
    }

    /// Converts a true value into units.
    pub fn units_of(&self, value: &Rational) -> Rational {
        value * Rational::from_integer(self.denominator.clone())
    }

    pub fn pair_value(&self, a: usize, b: usize) -> Rational {
        self.value(self.pair(a, b))
    }

    pub fn diag_value(&self, a: usize) -> Rational {
        self.value(self.diag(a))
    }

    pub fn diag_total_units(&self) -> i128 {
        self.diag.iter().sum()
    }

    /// `sum_{a<b} s(a,b) + sum_a d(a)`; zero for every matrix built from a network.
    pub fn balance_units(&self) -> i128 {
        let mut total = self.diag_total_units();
        for a in 0..self.n {
            for b in a + 1..self.n {
                total += self.pair(a, b);
            }
        }
        total
    }

    pub fn positive_mass_units(&self) -> i128 {
        let mut total = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                total += self.pair(a, b).max(0);
            }
        }
        total
    }

    /// All positive pair mass plus every diagonal term.
    pub fn trivial_bound_units(&self) -> i128 {
        self.positive_mass_units() + self.diag_total_units()
    }

    pub fn trivial_upper_bound(&self) -> Rational {
        self.value(self.trivial_bound_units())
    }

    pub fn modularity_units(&self, partition: &Partition) -> Result<i128> {
        let c = partition.assignment();
        if c.len() != self.n {
            return Err(Error::PartitionSize {
                expected: self.n,
                got: c.len(),
            });
        }
        let mut total = self.diag_total_units();
        for a in 0..self.n {
            let row = &self.pairs[a * self.n..(a + 1) * self.n];
            for b in a + 1..self.n {
                if c[a] == c[b] {
                    total += row[b];
                }
            }
        }
        Ok(total)
    }

    pub fn modularity(&self, partition: &Partition) -> Result<Rational> {
        Ok(self.value(self.modularity_units(partition)?))
    }

    pub fn score(&self, partition: Partition) -> Result<ScoredPartition> {
        let modularity = self.modularity(&partition)?;
        Ok(ScoredPartition {
            partition,
            modularity,
        })
    }
}

/// Upper bound from collecting every positive pair and all diagonal terms.
pub fn trivial_upper_bound(sm: &ScoreMatrix) -> Rational {
    sm.trivial_upper_bound()
}

pub fn modularity(sm: &ScoreMatrix, partition: &Partition) -> Result<Rational> {
    sm.modularity(partition)
}

/// A node-to-community assignment with communities numbered `0..k` in order
/// of first appearance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    communities: usize,
}

impl Partition {
    /// Canonicalizes arbitrary community ids.
    pub fn new(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for &c in raw {
            let next = map.len();
            assignment.push(*map.entry(c).or_insert(next));
        }
        Partition {
            communities: map.len(),
            assignment,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            communities: n,
        }
    }

    pub fn single_community(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            communities: usize::from(n > 0),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn num_communities(&self) -> usize {
        self.communities
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Members of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.communities];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// A partition together with its exact modularity.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredPartition {
    pub partition: Partition,
    pub modularity: Rational,
}
