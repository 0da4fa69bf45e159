//! The row-stochastic matrix of a digraph and its left Perron vector.
//!
//! A matrix is stored as sparse explicit rows plus, per row, a mixing weight
//! `lambda_i` towards the uniform off-diagonal row:
//!
//! ```text
//! a'_ij = (1 - lambda_i) * a_ij + lambda_i / (n - 1)      (j != i)
//! ```
//!
//! so a padded matrix stays `O(arcs + n)` in memory and a left product costs
//! the same.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Digraph;

/// Rows whose explicit sum is within this of 1 count as full.
const ROW_SUM_TOL: f64 = 1e-9;

pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// `10 * n * ln(n) + 10000`.
pub fn default_max_iter(n: usize) -> usize {
    let n_f = n.max(1) as f64;
    (10.0 * n_f * n_f.ln()) as usize + 10_000
}

/// Non-negative matrix with zero diagonal and row sums at most 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RowStochasticMatrix {
    rows: Vec<Vec<(usize, f64)>>,
    mix: Vec<f64>,
}

impl RowStochasticMatrix {
    /// `a_ij = 1 / d+(i)` for every arc `i -> j`; sink rows are zero.
    pub fn from_digraph(g: &Digraph) -> Self {
        let rows = (0..g.n())
            .map(|i| {
                let w = 1.0 / g.out_degree(i) as f64;
                g.out_neighbours(i).iter().map(|&j| (j, w)).collect()
            })
            .collect();
        Self {
            rows,
            mix: vec![0.0; g.n()],
        }
    }

    /// Builds a matrix from explicit sparse rows, checking the invariants.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidParameter(format!("row {i} repeats a column")));
            }
            for &(j, a) in row.iter() {
                if j >= n {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) out of range"
                    )));
                }
                if j == i && a != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "diagonal entry ({i}, {i}) is non-zero"
                    )));
                }
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) = {a} is negative"
                    )));
                }
            }
            row.retain(|&(j, a)| j != i && a > 0.0);
            let s: f64 = row.iter().map(|&(_, a)| a).sum();
            if s > 1.0 + ROW_SUM_TOL {
                return Err(Error::InvalidParameter(format!("row {i} sums to {s} > 1")));
            }
        }
        Ok(Self {
            rows,
            mix: vec![0.0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Weight of the uniform off-diagonal component in row `i`.
    pub fn mixing(&self, i: usize) -> f64 {
        self.mix[i]
    }

    /// The explicit (pre-mixing) entries of row `i`.
    pub fn explicit_row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    fn uniform_entry(&self) -> f64 {
        match self.n() {
            0 | 1 => 0.0,
            n => 1.0 / (n - 1) as f64,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let explicit = self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map_or(0.0, |k| self.rows[i][k].1);
        (1.0 - self.mix[i]) * explicit + self.mix[i] * self.uniform_entry()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let explicit: f64 = self.rows[i].iter().map(|&(_, a)| a).sum();
        let uniform = if self.n() > 1 { 1.0 } else { 0.0 };
        (1.0 - self.mix[i]) * explicit + self.mix[i] * uniform
    }

    /// Rows that are identically zero.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.mix[i] == 0.0 && self.rows[i].is_empty())
            .collect()
    }

    /// Smallest off-diagonal entry, or `None` when `n < 2`.
    pub fn min_off_diagonal(&self) -> Option<f64> {
        let n = self.n();
        if n < 2 {
            return None;
        }
        let u = self.uniform_entry();
        (0..n)
            .map(|i| {
                let scaled = (1.0 - self.mix[i])
                    * self.rows[i]
                        .iter()
                        .map(|&(_, a)| a)
                        .fold(f64::INFINITY, f64::min);
                let base = self.mix[i] * u;
                if self.rows[i].len() == n - 1 {
                    scaled + base
                } else {
                    base
                }
            })
            .reduce(f64::min)
    }

    /// The row vector product `u A`.
    pub fn left_mul(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(u.len(), n);
        let unif = self.uniform_entry();
        let mut out = vec![0.0; n];
        let mut spread = 0.0;
        for i in 0..n {
            let keep = u[i] * (1.0 - self.mix[i]);
            if keep != 0.0 {
                for &(j, a) in &self.rows[i] {
                    out[j] += keep * a;
                }
            }
            spread += u[i] * self.mix[i];
        }
        for j in 0..n {
            out[j] += (spread - u[j] * self.mix[j]) * unif;
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Makes every row sum to 1 and every off-diagonal entry positive.
    ///
    /// Each row becomes `(1 - lambda) * row + lambda * uniform` with the
    /// smallest `lambda in [epsilon, 1]` achieving row sum 1 and off-diagonal
    /// entries of at least `epsilon / n`: `lambda = epsilon` for full rows and
    /// `lambda = 1` (the uniform row) for deficient ones such as sinks.
    pub fn pad_and_perturb(&self, epsilon: f64) -> Result<Self> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "padding needs at least two indices".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0 / n as f64) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} outside (0, 1/{n})"
            )));
        }
        let mut out = self.clone();
        for i in 0..n {
            let full = (self.row_sum(i) - 1.0).abs() <= ROW_SUM_TOL;
            if full {
                out.mix[i] = if self.mix[i] == 0.0 {
                    epsilon
                } else {
                    1.0 - (1.0 - epsilon) * (1.0 - self.mix[i])
                };
            } else {
                out.mix[i] = 1.0;
                out.rows[i].clear();
            }
        }
        Ok(out)
    }
}

/// Positive left fixed vector of a positive row-stochastic matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronWeights {
    pub u: Vec<f64>,
    /// `|| u A - u ||_1` for the returned `u`.
    pub residual: f64,
    pub iterations: usize,
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Power iteration for the left Perron vector of a positive row-stochastic
/// matrix, starting from the uniform vector.
///
/// Each step applies the lazy map `u <- (u + u A) / 2` and renormalises to
/// `sum u = 1`. The lazy map has the same fixed vectors as `u <- u A` but no
/// eigenvalues on the unit circle other than 1, so periodic structure left
/// in a lightly perturbed matrix does not stall convergence.
pub fn perron_left_vector(
    a: &RowStochasticMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<PerronWeights> {
    let n = a.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "Perron vector needs at least two indices".into(),
        ));
    }
    if let Some(i) = (0..n).find(|&i| (a.row_sum(i) - 1.0).abs() > ROW_SUM_TOL) {
        return Err(Error::InvalidParameter(format!(
            "row {i} sums to {}, expected 1",
            a.row_sum(i)
        )));
    }
    if a.min_off_diagonal().is_some_and(|m| m <= 0.0) {
        return Err(Error::InvalidParameter(
            "matrix has a zero off-diagonal entry; pad it first".into(),
        ));
    }

    let mut u = vec![1.0 / n as f64; n];
    let mut best = PerronWeights {
        u: u.clone(),
        residual: f64::INFINITY,
        iterations: 0,
    };
    for it in 0..=max_iter {
        let ua = a.left_mul(&u);
        let residual = l1_distance(&ua, &u);
        if residual < best.residual {
            best = PerronWeights {
                u: u.clone(),
                residual,
                iterations: it,
            };
        }
        if residual <= tol {
            return Ok(best);
        }
        if it == max_iter {
            break;
        }
        for (x, y) in u.iter_mut().zip(&ua) {
            *x = 0.5 * (*x + y);
        }
        let total: f64 = u.iter().sum();
        u.iter_mut().for_each(|x| *x /= total);
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: best.residual,
        best: Box::new(best),
    })
}
