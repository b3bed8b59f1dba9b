//! Weighted combination of penalized components.
//!
//! Each component carries reduced pair scores ("loads") and a proven
//! penalty. Any non-negative weighting whose summed loads stay within every
//! pair's original score magnitude (with matching sign) is permissible, and
//! its weighted penalties add up. The best weighting is a linear program
//! with one variable per component and one row per touched pair.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram};
use crate::rational::{from_i128, Rational};
use crate::scores::ScoreMatrix;
use crate::subnet::ResolvedSubnetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Chain,
    Subnetwork,
}

/// A reduced penalized chain or subnetwork. Loads and penalty are in score
/// units of the matrix the component was built against.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    /// Chain order for chains, ascending for subnetworks.
    pub nodes: Vec<usize>,
    /// Signed reduced score per unordered pair `(a, b)` with `a < b`;
    /// zero pairs are omitted.
    pub loads: Vec<(usize, usize, Rational)>,
    pub penalty: Rational,
}

impl Component {
    pub fn from_chain(chain: &Chain) -> Self {
        let p = from_i128(chain.penalty);
        let loads = chain
            .pairs()
            .map(|(a, b, sign)| {
                let v = if sign > 0 { p.clone() } else { -p.clone() };
                (a.min(b), a.max(b), v)
            })
            .collect();
        Component {
            kind: ComponentKind::Chain,
            nodes: chain.nodes.clone(),
            loads,
            penalty: p,
        }
    }

    pub fn from_subnet(rs: &ResolvedSubnetwork) -> Self {
        Component {
            kind: ComponentKind::Subnetwork,
            nodes: rs.sub.nodes().to_vec(),
            loads: rs.sub.loads(),
            penalty: rs.penalty.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComponent {
    pub component: Component,
    pub lambda: Rational,
}

/// Bound obtained from a weighted component set. Amounts are in score units.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedCertificate {
    pub components: Vec<WeightedComponent>,
    pub trivial_bound: Rational,
    pub total_penalty: Rational,
    pub bound: Rational,
}

impl CombinedCertificate {
    pub fn bound_value(&self, sm: &ScoreMatrix) -> Rational {
        sm.value_of(&self.bound)
    }

    /// Certificate with fixed weights; fails if they are not permissible.
    pub fn with_weights(sm: &ScoreMatrix, components: Vec<WeightedComponent>) -> Result<Self> {
        check_permissible(sm, &components)?;
        let trivial_bound = from_i128(sm.trivial_bound_units());
        let total_penalty: Rational = components
            .iter()
            .map(|w| &w.lambda * &w.component.penalty)
            .sum();
        Ok(CombinedCertificate {
            bound: &trivial_bound - &total_penalty,
            components,
            trivial_bound,
            total_penalty,
        })
    }
}

fn check_permissible(sm: &ScoreMatrix, components: &[WeightedComponent]) -> Result<()> {
    let mut used: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for w in components {
        if w.lambda.is_negative() {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        for (a, b, load) in &w.component.loads {
            let s = sm.pair(*a, *b);
            if (s > 0 && load.is_negative())
                || (s < 0 && load.is_positive())
                || (s == 0 && !load.is_zero())
            {
                return Err(Error::InvalidParameter(format!(
                    "load on ({a}, {b}) has the wrong sign"
                )));
            }
            *used.entry((*a, *b)).or_insert_with(Rational::zero) += &w.lambda * load.abs();
        }
    }
    for ((a, b), total) in used {
        if total > from_i128(sm.pair(a, b).abs()) {
            return Err(Error::InvalidParameter(format!(
                "pair ({a}, {b}) over capacity"
            )));
        }
    }
    Ok(())
}

/// Finds the permissible weighting maximizing total penalty.
pub fn combine(components: Vec<Component>, sm: &ScoreMatrix) -> Result<CombinedCertificate> {
    for c in &components {
        for (a, b, load) in &c.loads {
            let s = sm.pair(*a, *b);
            if load.is_zero() || (s > 0) != load.is_positive() || s == 0 {
                return Err(Error::InvalidParameter(format!(
                    "component load on ({a}, {b}) does not match the score sign"
                )));
            }
        }
    }
    let mut row_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(components.len());
    for c in &components {
        let col = c
            .loads
            .iter()
            .map(|(a, b, load)| {
                let next = row_of.len();
                (*row_of.entry((*a, *b)).or_insert(next), load.abs())
            })
            .collect();
        columns.push(col);
    }
    let mut lp = LinearProgram::new(components.len());
    lp.objective = components.iter().map(|c| c.penalty.clone()).collect();
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); row_of.len()];
    for (j, col) in columns.into_iter().enumerate() {
        for (r, a) in col {
            rows[r].push((j, a));
        }
    }
    let mut rhs = vec![Rational::zero(); row_of.len()];
    for (&(a, b), &r) in &row_of {
        rhs[r] = from_i128(sm.pair(a, b).abs());
    }
    for (coeffs, rhs) in rows.into_iter().zip(rhs) {
        lp.add_row(coeffs, rhs);
    }
    let solution = solve_lp(&lp)?;
    let weighted: Vec<WeightedComponent> = components
        .into_iter()
        .zip(solution.values)
        .filter(|(_, l)| !l.is_zero())
        .map(|(component, lambda)| WeightedComponent { component, lambda })
        .collect();
    CombinedCertificate::with_weights(sm, weighted)
}
