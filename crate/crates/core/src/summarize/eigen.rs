use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FactorMatrix;
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Floor applied to every entry of the initial factor.
pub const EPSILON_INIT: f64 = 1e-8;

/// Below this order the eigenproblem is solved densely.
pub const DENSE_EIGEN_LIMIT: usize = 256;

const KRYLOV_TOL: f64 = 1e-7;
const KRYLOV_BLOCK: usize = 4;
const KRYLOV_MAX_RESTARTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenSolver {
    Dense,
    Krylov,
    /// Solver failed; the factor was drawn uniformly at random.
    RandomFallback,
}

#[derive(Clone, Debug)]
pub struct EigenInit {
    pub h: FactorMatrix,
    /// Top eigenvalues, descending (empty on fallback).
    pub eigenvalues: Vec<f64>,
    pub solver: EigenSolver,
}

/// Nonnegative initial factor from the top-`k` eigenpairs of `m`.
///
/// Column `j` is the positive part of `v_j` or `-v_j`, whichever keeps more
/// norm, scaled by `sqrt(max(lambda_j, 0))` and floored at [`EPSILON_INIT`].
pub fn eigen_init(m: &SimilarityMatrix, k: usize, seed: u64) -> Result<EigenInit> {
    let n = m.order();
    if k == 0 {
        return Err(Error::Argument("k must be positive".into()));
    }
    if k > n {
        return Err(Error::Dimension(format!("k = {k} exceeds matrix order {n}")));
    }
    let Some((values, vectors, solver)) = top_eigenpairs(m, k, seed) else {
        return Ok(EigenInit {
            h: random_factor(n, k, seed),
            eigenvalues: Vec::new(),
            solver: EigenSolver::RandomFallback,
        });
    };
    let mut h = FactorMatrix::zeros(n, k);
    for (c, (lambda, v)) in values.iter().zip(&vectors).enumerate() {
        let pos: f64 = v.iter().map(|x| x.max(0.0).powi(2)).sum();
        let neg: f64 = v.iter().map(|x| (-x).max(0.0).powi(2)).sum();
        let sign = if neg > pos { -1.0 } else { 1.0 };
        let scale = lambda.max(0.0).sqrt();
        for (i, x) in v.iter().enumerate() {
            h.set(i, c, ((sign * x).max(0.0) * scale).max(EPSILON_INIT));
        }
    }
    Ok(EigenInit {
        h,
        eigenvalues: values,
        solver,
    })
}

/// Uniform `[0, 1)` factor, floored at [`EPSILON_INIT`].
pub(crate) fn random_factor(n: usize, k: usize, seed: u64) -> FactorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * k)
        .map(|_| rng.random::<f64>().max(EPSILON_INIT))
        .collect();
    FactorMatrix::from_vec(n, k, data)
}

/// Top-`k` eigenpairs by largest algebraic eigenvalue, descending. `None` if
/// the iterative solver does not converge.
pub fn top_eigenpairs(
    m: &SimilarityMatrix,
    k: usize,
    seed: u64,
) -> Option<(Vec<f64>, Vec<Vec<f64>>, EigenSolver)> {
    if m.order() < DENSE_EIGEN_LIMIT {
        dense_top(m, k).map(|(v, w)| (v, w, EigenSolver::Dense))
    } else {
        krylov_top(m, k, seed, KRYLOV_TOL, KRYLOV_MAX_RESTARTS)
            .map(|(v, w)| (v, w, EigenSolver::Krylov))
    }
}

fn sorted_eigen(eig: &SymmetricEigen<f64, nalgebra::Dyn>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

pub(crate) fn dense_top(m: &SimilarityMatrix, k: usize) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.order();
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in m.entries() {
        dense[(i, j)] = v;
    }
    let eig = SymmetricEigen::try_new(dense, f64::EPSILON, 100_000)?;
    let order = sorted_eigen(&eig);
    let values = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
    let vectors = order[..k]
        .iter()
        .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
        .collect();
    Some((values, vectors))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Block Krylov eigensolver with thick restarts and explicit Rayleigh-Ritz
/// projection. Only matrix-vector products with `m` are used.
///
/// The basis starts from a seeded random block and grows by orthogonalizing
/// `A v` for the newest basis vectors. When full, the top Ritz vectors are
/// kept, the residuals of the wanted ones that have not converged seed the
/// next expansion, and growth continues from those.
pub(crate) fn krylov_top(
    m: &SimilarityMatrix,
    k: usize,
    seed: u64,
    tol: f64,
    max_restarts: usize,
) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.order();
    let cap = n.min((3 * k).max(k + 30));
    let keep = (k + (cap - k) / 2).min(cap.saturating_sub(1)).max(k.min(cap));
    let block = k.clamp(1, KRYLOV_BLOCK);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cap);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(cap);

    // orthogonalize `w` against the basis and append it (with its image)
    let push = |w: &mut Vec<f64>, basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>| -> bool {
        let start = dot(w, w).sqrt();
        if start == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(b, w);
                axpy(-c, b, w);
            }
        }
        let norm = dot(w, w).sqrt();
        if norm <= 1e-10 * start {
            return false;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let mut image = vec![0.0; n];
        m.matvec(w, &mut image);
        basis.push(std::mem::take(w));
        images.push(image);
        true
    };
    let random_vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
    };

    for _ in 0..block.min(cap) {
        let mut w = random_vec(&mut rng);
        push(&mut w, &mut basis, &mut images);
    }
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    let mut next_expand = 0usize;

    for _ in 0..max_restarts {
        let mut failures = 0;
        while basis.len() < cap {
            let mut w = if let Some(r) = seeds.pop() {
                r
            } else if next_expand < basis.len() {
                next_expand += 1;
                images[next_expand - 1].clone()
            } else {
                random_vec(&mut rng)
            };
            if !push(&mut w, &mut basis, &mut images) {
                failures += 1;
                if failures > 4 * cap {
                    break;
                }
            }
        }
        let p = basis.len();
        if p < k {
            return None;
        }
        let mut proj = DMatrix::<f64>::zeros(p, p);
        for a in 0..p {
            for b in a..p {
                let v = 0.5 * (dot(&basis[a], &images[b]) + dot(&basis[b], &images[a]));
                proj[(a, b)] = v;
                proj[(b, a)] = v;
            }
        }
        let eig = SymmetricEigen::try_new(proj, f64::EPSILON, 100_000)?;
        let order = sorted_eigen(&eig);
        let scale = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(f64::MIN_POSITIVE);

        let retain = keep.min(p);
        let mut ritz = Vec::with_capacity(retain);
        let mut ritz_images = Vec::with_capacity(retain);
        for &c in &order[..retain] {
            let s = eig.eigenvectors.column(c);
            let mut y = vec![0.0; n];
            let mut ay = vec![0.0; n];
            for a in 0..p {
                axpy(s[a], &basis[a], &mut y);
                axpy(s[a], &images[a], &mut ay);
            }
            ritz.push(y);
            ritz_images.push(ay);
        }
        let mut pending: Vec<(f64, Vec<f64>)> = Vec::new();
        for c in 0..k {
            let theta = eig.eigenvalues[order[c]];
            let residual: Vec<f64> = ritz[c]
                .iter()
                .zip(&ritz_images[c])
                .map(|(y, ay)| ay - theta * y)
                .collect();
            let norm = dot(&residual, &residual).sqrt();
            if norm > tol * scale {
                pending.push((norm, residual));
            }
        }
        if pending.is_empty() || p == n {
            let values = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
            ritz.truncate(k);
            return Some((values, ritz));
        }
        // largest residuals are expanded first (popped from the back)
        pending.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        seeds = pending.into_iter().rev().take(block).rev().map(|(_, r)| r).collect();
        basis = ritz;
        images = ritz_images;
        next_expand = basis.len();
    }
    None
}
