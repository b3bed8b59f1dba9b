//! Linear programs `max c.x` subject to `A x <= b`, `x >= 0`, with `b >= 0`.
//!
//! A floating-point revised simplex finds a candidate optimal basis quickly.
//! That basis is then taken over by an exact rational simplex (Bland's rule)
//! which re-derives primal and dual values in exact arithmetic and keeps
//! pivoting until optimality holds exactly. The float phase only ever
//! affects speed, never the returned values.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    /// Objective coefficient per variable (maximized).
    pub objective: Vec<Rational>,
    pub rows: Vec<Constraint>,
}

/// `sum coeffs <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
    /// Pivots the exact phase needed after the float warm start.
    pub exact_pivots: usize,
    /// Whether the exact phase had to start from the all-slack basis.
    pub cold_start: bool,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) {
        self.rows.push(Constraint { coeffs, rhs });
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (i, row) in self.rows.iter().enumerate() {
            if row.rhs.is_negative() {
                return Err(Error::Lp(format!("row {i} has negative right-hand side")));
            }
            if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(Error::Lp(format!("row {i} references variable {j} of {n}")));
            }
        }
        Ok(())
    }
}

/// Solves `lp` exactly.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let problem = Problem::new(lp);
    let warm = float_simplex(&problem);
    let mut cold_start = false;
    let mut basis = match warm {
        Some(b) => b,
        None => {
            cold_start = true;
            Basis::slack()
        }
    };
    let (state, pivots) = match exact_simplex(&problem, basis.clone()) {
        Ok(done) => done,
        Err(ExactFailure::Unbounded) => return Err(Error::Lp("unbounded".into())),
        Err(ExactFailure::BadStart) => {
            cold_start = true;
            basis = Basis::slack();
            match exact_simplex(&problem, basis) {
                Ok(done) => done,
                Err(ExactFailure::Unbounded) => return Err(Error::Lp("unbounded".into())),
                Err(ExactFailure::BadStart) => {
                    return Err(Error::Lp("slack basis rejected".into()))
                }
            }
        }
    };
    let mut values = vec![Rational::zero(); problem.n];
    for (&j, v) in state.basis.structural.iter().zip(state.primal) {
        values[j] = v;
    }
    let objective = values
        .iter()
        .zip(&lp.objective)
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, c)| v * c)
        .sum();
    Ok(LpSolution {
        values,
        objective,
        exact_pivots: pivots,
        cold_start,
    })
}

/// Column-major copy of the program.
struct Problem<'a> {
    lp: &'a LinearProgram,
    n: usize,
    m: usize,
    /// Structural columns as `(row, coefficient)`.
    columns: Vec<Vec<(usize, Rational)>>,
    rows: Vec<HashMap<usize, Rational>>,
}

impl<'a> Problem<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        let mut rows = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
            for (j, a) in &row.coeffs {
                *merged.entry(*j).or_insert_with(Rational::zero) += a;
            }
            merged.retain(|_, a| !a.is_zero());
            for (j, a) in &merged {
                columns[*j].push((i, a.clone()));
            }
            rows.push(merged.into_iter().collect());
        }
        Problem {
            lp,
            n,
            m,
            columns,
            rows,
        }
    }

    fn coeff(&self, row: usize, col: usize) -> Option<&Rational> {
        self.rows[row].get(&col)
    }
}

/// Basic structural variables and the rows whose slacks are *not* basic.
/// A row is "tight" when its slack is nonbasic; both lists have equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Basis {
    structural: Vec<usize>,
    tight: Vec<usize>,
}

impl Basis {
    fn slack() -> Self {
        Basis {
            structural: Vec::new(),
            tight: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Float phase

const FLOAT_TOL: f64 = 1e-9;

fn float_simplex(p: &Problem<'_>) -> Option<Basis> {
    let (n, m) = (p.n, p.m);
    if m == 0 {
        return Some(Basis::slack());
    }
    let scale: Vec<f64> = (0..m)
        .map(|i| {
            p.lp.rows[i]
                .coeffs
                .iter()
                .map(|(_, a)| to_f64(a).abs())
                .fold(0.0f64, f64::max)
                .max(1e-300)
        })
        .collect();
    let cols: Vec<Vec<(usize, f64)>> = p
        .columns
        .iter()
        .map(|c| c.iter().map(|(i, a)| (*i, to_f64(a) / scale[*i])).collect())
        .collect();
    let cost: Vec<f64> = p.lp.objective.iter().map(to_f64).collect();
    let cmax = cost.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(1e-300);
    let cost: Vec<f64> = cost.iter().map(|c| c / cmax).collect();
    let rhs: Vec<f64> = (0..m)
        .map(|i| to_f64(&p.lp.rows[i].rhs) / scale[i])
        .collect();

    // Variables 0..n structural, n..n+m slacks.
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut position: Vec<Option<usize>> = vec![None; n + m];
    for (k, &v) in basis.iter().enumerate() {
        position[v] = Some(k);
    }
    let mut binv = vec![0.0f64; m * m];
    for k in 0..m {
        binv[k * m + k] = 1.0;
    }
    let mut xb = rhs.clone();
    let var_cost = |v: usize| if v < n { cost[v] } else { 0.0 };

    let max_iter = 50 * (n + m) + 1000;
    let mut degenerate_run = 0usize;
    let mut y = vec![0.0f64; m];
    let mut alpha = vec![0.0f64; m];
    let mut row_nz: Vec<usize> = Vec::with_capacity(m);
    for iter in 0..max_iter {
        if iter % 64 == 0 {
            for i in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    let cb = var_cost(basis[k]);
                    if cb != 0.0 {
                        acc += cb * binv[k * m + i];
                    }
                }
                y[i] = acc;
            }
        }
        let bland = degenerate_run > 50;
        let mut entering: Option<(usize, f64)> = None;
        for v in 0..n + m {
            if position[v].is_some() {
                continue;
            }
            let d = if v < n {
                cost[v] - cols[v].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
            } else {
                -y[v - n]
            };
            if d > FLOAT_TOL {
                if bland {
                    entering = Some((v, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d > best) {
                    entering = Some((v, d));
                }
            }
        }
        let Some((enter, reduced)) = entering else {
            let structural: Vec<usize> = basis.iter().copied().filter(|&v| v < n).collect();
            let slack_rows: Vec<bool> = {
                let mut s = vec![false; m];
                for &v in &basis {
                    if v >= n {
                        s[v - n] = true;
                    }
                }
                s
            };
            let tight: Vec<usize> = (0..m).filter(|&i| !slack_rows[i]).collect();
            return Some(Basis { structural, tight });
        };

        alpha.iter_mut().for_each(|a| *a = 0.0);
        if enter < n {
            for &(i, a) in &cols[enter] {
                for k in 0..m {
                    alpha[k] += binv[k * m + i] * a;
                }
            }
        } else {
            let i = enter - n;
            for k in 0..m {
                alpha[k] = binv[k * m + i];
            }
        }
        let mut leave: Option<(usize, f64)> = None;
        for k in 0..m {
            if alpha[k] > FLOAT_TOL {
                let t = xb[k].max(0.0) / alpha[k];
                let better = match leave {
                    None => true,
                    Some((lk, lt)) => {
                        if t < lt - 1e-12 {
                            true
                        } else if t <= lt + 1e-12 {
                            if bland {
                                basis[k] < basis[lk]
                            } else {
                                alpha[k] > alpha[lk]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((k, t));
                }
            }
        }
        let (r, t) = leave?;
        degenerate_run = if t <= 1e-12 { degenerate_run + 1 } else { 0 };

        let piv = alpha[r];
        row_nz.clear();
        for i in 0..m {
            if binv[r * m + i] != 0.0 {
                binv[r * m + i] /= piv;
                row_nz.push(i);
            }
        }
        xb[r] /= piv;
        for k in 0..m {
            if k == r || alpha[k] == 0.0 {
                continue;
            }
            let f = alpha[k];
            for &i in &row_nz {
                binv[k * m + i] -= f * binv[r * m + i];
            }
            xb[k] -= f * xb[r];
        }
        for &i in &row_nz {
            y[i] += reduced * binv[r * m + i];
        }
        position[basis[r]] = None;
        basis[r] = enter;
        position[enter] = Some(r);
    }
    None
}

// ---------------------------------------------------------------------------
// Exact phase

enum ExactFailure {
    Unbounded,
    /// The starting basis is singular or primal infeasible.
    BadStart,
}

struct ExactState {
    basis: Basis,
    /// Values of `basis.structural`, in order.
    primal: Vec<Rational>,
}

fn exact_simplex(
    p: &Problem<'_>,
    mut basis: Basis,
) -> std::result::Result<(ExactState, usize), ExactFailure> {
    let mut pivots = 0usize;
    let mut first = true;
    loop {
        let k = basis.structural.len();
        debug_assert_eq!(k, basis.tight.len());
        let lu = SparseLu::factor(p, &basis).ok_or(ExactFailure::BadStart)?;
        let b_t: Vec<Rational> = basis
            .tight
            .iter()
            .map(|&i| p.lp.rows[i].rhs.clone())
            .collect();
        let x_j = lu.solve(&b_t);
        let tight_set: HashMap<usize, usize> = basis
            .tight
            .iter()
            .enumerate()
            .map(|(pos, &i)| (i, pos))
            .collect();
        let slack_value = |i: usize, x: &[Rational]| -> Rational {
            let mut v = p.lp.rows[i].rhs.clone();
            for (pos, &j) in basis.structural.iter().enumerate() {
                if let Some(a) = p.coeff(i, j) {
                    if !x[pos].is_zero() {
                        v -= a * &x[pos];
                    }
                }
            }
            v
        };
        if first {
            first = false;
            let feasible = x_j.iter().all(|v| !v.is_negative())
                && (0..p.m)
                    .filter(|i| !tight_set.contains_key(i))
                    .all(|i| !slack_value(i, &x_j).is_negative());
            if !feasible {
                return Err(ExactFailure::BadStart);
            }
        }

        let c_j: Vec<Rational> = basis
            .structural
            .iter()
            .map(|&j| p.lp.objective[j].clone())
            .collect();
        let y_t = lu.solve_transpose(&c_j);
        let mut y = vec![Rational::zero(); p.m];
        for (pos, &i) in basis.tight.iter().enumerate() {
            y[i] = y_t[pos].clone();
        }

        // Bland: smallest variable index with positive reduced cost.
        let in_basis: std::collections::HashSet<usize> = basis.structural.iter().copied().collect();
        let mut entering: Option<usize> = None;
        for j in 0..p.n {
            if in_basis.contains(&j) {
                continue;
            }
            let mut d = p.lp.objective[j].clone();
            for (i, a) in &p.columns[j] {
                if !y[*i].is_zero() {
                    d -= &y[*i] * a;
                }
            }
            if d.is_positive() {
                entering = Some(j);
                break;
            }
        }
        if entering.is_none() {
            for &i in basis
                .tight
                .iter()
                .collect::<std::collections::BTreeSet<_>>()
            {
                if y[i].is_negative() {
                    entering = Some(p.n + i);
                    break;
                }
            }
        }
        let Some(enter) = entering else {
            return Ok((ExactState { basis, primal: x_j }, pivots));
        };

        // Rates at which basic variables fall as the entering one rises.
        let column_t: Vec<Rational> = if enter < p.n {
            basis
                .tight
                .iter()
                .map(|&i| p.coeff(i, enter).cloned().unwrap_or_else(Rational::zero))
                .collect()
        } else {
            let r = enter - p.n;
            basis
                .tight
                .iter()
                .map(|&i| {
                    if i == r {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        };
        let u = lu.solve(&column_t);
        // (variable index, value, rate)
        let mut best: Option<(usize, Rational, usize)> = None;
        let consider = |var: usize,
                        value: Rational,
                        rate: Rational,
                        leave: usize,
                        best: &mut Option<(usize, Rational, usize)>| {
            if !rate.is_positive() {
                return;
            }
            let t = value / rate;
            let replace = match best {
                None => true,
                Some((bv, bt, _)) => t < *bt || (t == *bt && var < *bv),
            };
            if replace {
                *best = Some((var, t, leave));
            }
        };
        for (pos, &j) in basis.structural.iter().enumerate() {
            consider(j, x_j[pos].clone(), u[pos].clone(), pos, &mut best);
        }
        for i in 0..p.m {
            if tight_set.contains_key(&i) {
                continue;
            }
            let mut rate = if enter < p.n {
                p.coeff(i, enter).cloned().unwrap_or_else(Rational::zero)
            } else {
                Rational::zero()
            };
            for (pos, &j) in basis.structural.iter().enumerate() {
                if let Some(a) = p.coeff(i, j) {
                    if !u[pos].is_zero() {
                        rate -= a * &u[pos];
                    }
                }
            }
            consider(p.n + i, slack_value(i, &x_j), rate, usize::MAX, &mut best);
        }
        let Some((leaving, _, leave_pos)) = best else {
            return Err(ExactFailure::Unbounded);
        };

        if leaving < p.n {
            basis.structural.remove(leave_pos);
        } else {
            basis.tight.push(leaving - p.n);
        }
        if enter < p.n {
            basis.structural.push(enter);
        } else {
            let r = enter - p.n;
            basis.tight.retain(|&i| i != r);
        }
        pivots += 1;
    }
}

/// Exact sparse LU of the basis block `A[tight, structural]` with Markowitz
/// pivoting. Solves `M x = b` and `M^T y = c`, where `x` is indexed like
/// `structural` and `y` like `tight`.
struct SparseLu {
    k: usize,
    /// Row operations `(target, source, factor)`: `row[target] -= factor * row[source]`.
    ops: Vec<(usize, usize, Rational)>,
    /// Pivot steps `(row, col)` in elimination order.
    pivots: Vec<(usize, usize)>,
    /// Eliminated rows (upper factor), indexed by local row.
    upper: Vec<HashMap<usize, Rational>>,
}

impl SparseLu {
    fn factor(p: &Problem<'_>, basis: &Basis) -> Option<SparseLu> {
        let k = basis.structural.len();
        if k != basis.tight.len() {
            return None;
        }
        let col_of: HashMap<usize, usize> = basis
            .structural
            .iter()
            .enumerate()
            .map(|(c, &j)| (j, c))
            .collect();
        let mut rows: Vec<HashMap<usize, Rational>> = basis
            .tight
            .iter()
            .map(|&i| {
                p.rows[i]
                    .iter()
                    .filter_map(|(j, a)| col_of.get(j).map(|&c| (c, a.clone())))
                    .collect()
            })
            .collect();
        let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); k];
        for (r, row) in rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        let mut row_done = vec![false; k];
        let mut col_done = vec![false; k];
        let mut ops = Vec::new();
        let mut pivots = Vec::with_capacity(k);
        for _ in 0..k {
            // Markowitz: minimise (row count - 1) * (column count - 1).
            let mut choice: Option<(usize, usize, usize)> = None;
            for c in 0..k {
                if col_done[c] {
                    continue;
                }
                let cc = col_rows[c].len();
                if cc == 0 {
                    return None;
                }
                for &r in &col_rows[c] {
                    let cost = (rows[r].len() - 1) * (cc - 1);
                    if choice.is_none_or(|(_, _, best)| cost < best) {
                        choice = Some((r, c, cost));
                        if cost == 0 {
                            break;
                        }
                    }
                }
                if matches!(choice, Some((_, _, 0))) {
                    break;
                }
            }
            let (pr, pc, _) = choice?;
            row_done[pr] = true;
            col_done[pc] = true;
            let pivot_row = rows[pr].clone();
            let pivot = pivot_row[&pc].clone();
            let targets: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
            for &c in pivot_row.keys() {
                col_rows[c].remove(&pr);
            }
            for r in targets {
                let factor = &rows[r][&pc] / &pivot;
                for (c, a) in &pivot_row {
                    let entry = rows[r].entry(*c).or_insert_with(Rational::zero);
                    *entry -= &factor * a;
                    if entry.is_zero() {
                        rows[r].remove(c);
                        col_rows[*c].remove(&r);
                    } else {
                        col_rows[*c].insert(r);
                    }
                }
                debug_assert!(!rows[r].contains_key(&pc));
                ops.push((r, pr, factor));
            }
            pivots.push((pr, pc));
        }
        Some(SparseLu {
            k,
            ops,
            pivots,
            upper: rows,
        })
    }

    fn solve(&self, b: &[Rational]) -> Vec<Rational> {
        let mut b = b.to_vec();
        for (target, source, f) in &self.ops {
            if !b[*source].is_zero() {
                let delta = f * &b[*source];
                b[*target] -= delta;
            }
        }
        let mut x = vec![Rational::zero(); self.k];
        for &(r, c) in self.pivots.iter().rev() {
            let row = &self.upper[r];
            let mut acc = b[r].clone();
            for (cc, a) in row {
                if *cc != c && !x[*cc].is_zero() {
                    acc -= a * &x[*cc];
                }
            }
            x[c] = acc / &row[&c];
        }
        x
    }

    fn solve_transpose(&self, c: &[Rational]) -> Vec<Rational> {
        // Solve U^T z = c in pivot order, then apply the row operations
        // transposed in reverse.
        let mut z = vec![Rational::zero(); self.k];
        let mut acc: Vec<Rational> = c.to_vec();
        for &(r, col) in &self.pivots {
            let row = &self.upper[r];
            let zr = &acc[col] / &row[&col];
            if !zr.is_zero() {
                for (cc, a) in row {
                    if *cc != col {
                        acc[*cc] -= a * &zr;
                    }
                }
            }
            z[r] = zr;
        }
        for (target, source, f) in self.ops.iter().rev() {
            if !z[*target].is_zero() {
                let delta = f * &z[*target];
                z[*source] -= delta;
            }
        }
        z
    }
}
