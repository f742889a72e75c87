use rayon::prelude::*;

use super::FactorMatrix;
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Damping of the multiplicative update.
pub const BETA: f64 = 0.5;

/// Floor for update denominators.
pub const EPSILON_DIV: f64 = 1e-12;

/// Up to this order the objective is summed entry by entry; above it the
/// Gram-matrix expansion is used.
const DIRECT_OBJECTIVE_LIMIT: usize = 128;

#[derive(Clone, Debug)]
pub struct SymNmfOutput {
    pub h: FactorMatrix,
    /// Objective before the first update followed by one value per update.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// True when the relative-decrease criterion fired before `max_iter`.
    pub converged: bool,
}

/// `HᵀH`, accumulated row by row in index order.
fn gram(h: &FactorMatrix) -> Vec<f64> {
    let k = h.cols();
    let mut g = vec![0.0; k * k];
    for i in 0..h.rows() {
        let r = h.row(i);
        for a in 0..k {
            let ra = r[a];
            if ra == 0.0 {
                continue;
            }
            for b in 0..k {
                g[a * k + b] += ra * r[b];
            }
        }
    }
    g
}

fn row_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `||M - HHᵀ||_F²`.
pub fn symnmf_objective(m: &SimilarityMatrix, h: &FactorMatrix) -> f64 {
    let n = m.order();
    if n <= DIRECT_OBJECTIVE_LIMIT {
        return (0..n)
            .map(|i| {
                let hi = h.row(i);
                (0..n)
                    .map(|j| (m.get(i, j) - row_dot(hi, h.row(j))).powi(2))
                    .sum::<f64>()
            })
            .sum();
    }
    // residual on the support of M, plus ||HHᵀ||² restricted to its complement
    let on_support: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let hi = h.row(i);
            m.row(i).fold((0.0, 0.0), |(res, cross), (j, v)| {
                let g = row_dot(hi, h.row(j));
                (res + (v - g).powi(2), cross + g * g)
            })
        })
        .collect();
    let (res, cross) = on_support
        .iter()
        .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let g = gram(h);
    let full: f64 = g.iter().map(|x| x * x).sum();
    res + (full - cross).max(0.0)
}

/// Symmetric NMF `min_{H >= 0} ||M - HHᵀ||_F²` by damped multiplicative
/// updates `H <- H * (1 - β + β (MH) / (HHᵀH))`.
///
/// Stops when the relative decrease of the objective falls below `rel_tol`
/// or after `max_iter` updates.
pub fn symnmf(
    m: &SimilarityMatrix,
    h0: &FactorMatrix,
    max_iter: usize,
    rel_tol: f64,
) -> Result<SymNmfOutput> {
    let n = m.order();
    if h0.rows() != n {
        return Err(Error::Dimension(format!(
            "factor has {} rows, matrix order is {n}",
            h0.rows()
        )));
    }
    if !h0.is_nonnegative() {
        return Err(Error::Argument("initial factor must be nonnegative".into()));
    }
    let k = h0.cols();
    let mut h = h0.clone();
    let mut trace = vec![symnmf_objective(m, &h)];
    if !trace[0].is_finite() {
        return Err(Error::Numeric { iteration: 0 });
    }
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=max_iter {
        let mh = m.mul_dense(h.as_slice(), k);
        let g = gram(&h);
        h.as_mut_slice()
            .par_chunks_mut(k)
            .zip(mh.par_chunks(k))
            .for_each(|(row, mrow)| {
                let old: Vec<f64> = row.to_vec();
                for c in 0..k {
                    let denom: f64 = (0..k).map(|b| old[b] * g[b * k + c]).sum::<f64>();
                    let ratio = mrow[c] / denom.max(EPSILON_DIV);
                    row[c] = old[c] * (1.0 - BETA + BETA * ratio);
                }
            });
        if h.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric { iteration: it });
        }
        let obj = symnmf_objective(m, &h);
        if !obj.is_finite() {
            return Err(Error::Numeric { iteration: it });
        }
        let prev = *trace.last().unwrap();
        trace.push(obj);
        iterations = it;
        let decrease = (prev - obj) / prev.max(f64::MIN_POSITIVE);
        if decrease < rel_tol {
            converged = true;
            break;
        }
    }
    Ok(SymNmfOutput {
        h,
        trace,
        iterations,
        converged,
    })
}
