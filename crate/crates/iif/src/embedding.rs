//! Low-dimensional embeddings of the post-selection data.
//!
//! After screening, the retained columns are standardized and compressed
//! to a handful of coordinates per observation, either linearly (leading
//! left singular vectors) or through the geometry of a nearest-neighbor
//! affinity graph (normalized-Laplacian eigenmaps). The graph route can
//! separate classes that interleave nonlinearly, where no single linear
//! projection works.
//!
//! Everything here is deterministic: dense symmetric eigendecompositions,
//! explicit tie rules, and a fixed sign convention per coordinate.

use ndarray::{Array1, Array2};

use crate::{Error, Result};

/// A post-selection submatrix with every kept column at mean 0, variance 1
/// (population divisor).
#[derive(Debug, Clone)]
pub struct StandardizedMatrix {
    /// n x s values, observations in rows.
    pub values: Array2<f64>,
    /// Original column indices of the kept columns, ascending.
    pub feature_ids: Vec<usize>,
    /// Subset members dropped for having zero variance.
    pub dropped: Vec<usize>,
}

/// How an embedding was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedMethod {
    Pca,
    Laplacian,
}

/// An n x d coordinate matrix with unit-norm columns.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub coords: Array2<f64>,
    pub method: EmbedMethod,
    /// Zero columns appended because the input rank fell short of d.
    pub padded: usize,
}

/// Extract `subset` columns of `values` and standardize each to mean 0,
/// variance 1. Constant columns are dropped and reported in `dropped`;
/// an empty result is an error.
pub fn column_standardize(values: &Array2<f64>, subset: &[usize]) -> Result<StandardizedMatrix> {
    let (n, p) = values.dim();
    if subset.is_empty() {
        return Err(Error::Degenerate("empty feature subset".into()));
    }
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "standardization needs at least 2 rows, got {n}"
        )));
    }
    let mut ids: Vec<usize> = subset.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if let Some(&bad) = ids.iter().find(|&&j| j >= p) {
        return Err(Error::Shape(format!(
            "feature index {bad} out of range for p={p}"
        )));
    }

    let nf = n as f64;
    let mut kept: Vec<usize> = Vec::with_capacity(ids.len());
    let mut dropped: Vec<usize> = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(ids.len());
    for &j in &ids {
        let col = values.column(j);
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value in column {j}")));
        }
        let mean = col.sum() / nf;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
        if var <= 0.0 {
            dropped.push(j);
            continue;
        }
        let sd = var.sqrt();
        cols.push(col.iter().map(|v| (v - mean) / sd).collect());
        kept.push(j);
    }
    if kept.is_empty() {
        return Err(Error::Degenerate(
            "every selected column is constant".into(),
        ));
    }
    let mut out = Array2::zeros((n, kept.len()));
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            out[[r, c]] = v;
        }
    }
    Ok(StandardizedMatrix {
        values: out,
        feature_ids: kept,
        dropped,
    })
}

/// Full eigendecomposition of a dense symmetric matrix, eigenvalues
/// ascending. Errors if the iteration fails to converge.
fn symmetric_eigen(m: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = m.nrows();
    let fm = faer::Mat::from_fn(n, n, |r, c| m[[r, c]]);
    let eig = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Convergence("symmetric eigensolver stalled".into()))?;
    let values: Vec<f64> = (0..n).map(|i| eig.S()[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for c in 0..n {
        for r in 0..n {
            vectors[[r, c]] = eig.U()[(r, c)];
        }
    }
    Ok((values, vectors))
}

/// Flip each column so its largest-magnitude entry is positive; the first
/// such entry decides on magnitude ties.
fn fix_signs(coords: &mut Array2<f64>) {
    for mut col in coords.columns_mut() {
        let mut best = 0usize;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() + 1e-15 {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

fn normalize_columns(coords: &mut Array2<f64>) {
    for mut col in coords.columns_mut() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|v| v / norm);
        }
    }
}

/// Top-d left singular vectors of the standardized matrix, computed from
/// the smaller Gram matrix. Columns are unit norm with the fixed sign
/// convention; if rank(W) < d the remaining columns are zero (`padded`).
pub fn pca_embed(w: &StandardizedMatrix, d: usize) -> Result<Embedding> {
    let (n, s) = w.values.dim();
    if d == 0 {
        return Err(Error::Domain("embedding dimension must be positive".into()));
    }
    if d > n {
        return Err(Error::Domain(format!(
            "embedding dimension {d} exceeds the {n} observations"
        )));
    }

    let mut coords = Array2::zeros((n, d));
    let mut padded = 0usize;
    if s <= n {
        // Eigen of W'W: right singular vectors; map back through W.
        let gram = w.values.t().dot(&w.values);
        let (vals, vecs) = symmetric_eigen(&gram)?;
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        let cutoff = top * (n.max(s) as f64) * f64::EPSILON;
        for c in 0..d {
            if c >= s {
                padded += 1;
                continue;
            }
            let idx = s - 1 - c;
            let lambda = vals[idx];
            if lambda <= cutoff || lambda <= 0.0 {
                padded += 1;
                continue;
            }
            let sigma = lambda.sqrt();
            let v = vecs.column(idx);
            let u = w.values.dot(&v.to_owned()) / sigma;
            for r in 0..n {
                coords[[r, c]] = u[r];
            }
        }
    } else {
        // Eigen of WW': left singular vectors directly.
        let gram = w.values.dot(&w.values.t());
        let (vals, vecs) = symmetric_eigen(&gram)?;
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        let cutoff = top * (n.max(s) as f64) * f64::EPSILON;
        for c in 0..d {
            let idx = n - 1 - c;
            let lambda = vals[idx];
            if lambda <= cutoff || lambda <= 0.0 {
                padded += 1;
                continue;
            }
            for r in 0..n {
                coords[[r, c]] = vecs[[r, idx]];
            }
        }
    }
    normalize_columns(&mut coords);
    fix_signs(&mut coords);
    Ok(Embedding {
        coords,
        method: EmbedMethod::Pca,
        padded,
    })
}

/// Dense affinity from cosine distances between observation rows:
/// A_ij = exp(-gamma * d_ij^2) with d the cosine distance. Zero-norm rows
/// get self-only affinity (1 on the diagonal, 0 elsewhere).
pub fn cosine_affinity(w: &StandardizedMatrix, gamma: f64) -> Result<Array2<f64>> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let n = w.values.nrows();
    let norms: Vec<f64> = (0..n)
        .map(|i| w.values.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        a[[i, i]] = 1.0;
        for j in (i + 1)..n {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let dot = w.values.row(i).dot(&w.values.row(j));
            let cos = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            let dist = 1.0 - cos;
            let v = (-gamma * dist * dist).exp();
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    Ok(a)
}

/// Keep A_ij only where j is among i's k largest off-diagonal affinities
/// or i is among j's (symmetric union). Ties at the k-th place resolve to
/// the smaller index. The diagonal of the result is zero.
pub fn knn_sparsify(a: &Array2<f64>, k: usize) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape("affinity matrix must be square".into()));
    }
    if k == 0 {
        return Err(Error::Domain("neighbor count must be at least 1".into()));
    }
    let k = k.min(n.saturating_sub(1));
    let mut keep = vec![false; n * n];
    let mut idx: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        idx.clear();
        idx.extend((0..n).filter(|&j| j != i));
        idx.sort_by(|&x, &y| a[[i, y]].partial_cmp(&a[[i, x]]).unwrap().then(x.cmp(&y)));
        for &j in idx.iter().take(k) {
            keep[i * n + j] = true;
            keep[j * n + i] = true;
        }
    }
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j && keep[i * n + j] {
                out[[i, j]] = a[[i, j]];
            }
        }
    }
    Ok(out)
}

/// Spectral embedding from a sparse symmetric affinity.
///
/// Forms L = I - D^{-1/2} A D^{-1/2}, takes the d+1 smallest eigenvectors,
/// removes the trivial direction D^{1/2} 1 explicitly (robust even when
/// the zero eigenvalue is degenerate), scales rows back by D^{-1/2}, and
/// returns d unit-norm coordinate columns in ascending eigenvalue order.
///
/// Isolated vertices receive a self-loop of weight `eig_tol` so degrees
/// stay positive; eigenpair residuals above `eig_tol` are an error.
pub fn laplacian_embed(a: &Array2<f64>, d: usize, eig_tol: f64) -> Result<Embedding> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape("affinity matrix must be square".into()));
    }
    if d == 0 {
        return Err(Error::Domain("embedding dimension must be positive".into()));
    }
    if d + 1 > n {
        return Err(Error::Degenerate(format!(
            "need at least d+1 = {} observations, got {n}",
            d + 1
        )));
    }
    if !(eig_tol > 0.0) {
        return Err(Error::Domain("eig_tol must be positive".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[[i, j]] - a[[j, i]]).abs() > 1e-12 {
                return Err(Error::Domain("affinity matrix must be symmetric".into()));
            }
            if a[[i, j]] < 0.0 {
                return Err(Error::Domain("affinities must be non-negative".into()));
            }
        }
    }

    let mut work = a.clone();
    for i in 0..n {
        work[[i, i]] = 0.0;
    }
    let mut degree = Array1::zeros(n);
    for i in 0..n {
        let row_sum: f64 = work.row(i).sum();
        degree[i] = if row_sum > 0.0 {
            row_sum
        } else {
            work[[i, i]] = eig_tol;
            eig_tol
        };
    }

    let inv_sqrt_d: Vec<f64> = degree.iter().map(|&v: &f64| 1.0 / v.sqrt()).collect();
    let mut lap = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let norm = work[[i, j]] * inv_sqrt_d[i] * inv_sqrt_d[j];
            lap[[i, j]] = if i == j { 1.0 - norm } else { -norm };
        }
    }

    let (_vals, vecs) = symmetric_eigen(&lap)?;

    // Exact eigenvector of L for eigenvalue 0, used to strip the trivial
    // direction even when the zero eigenspace is degenerate.
    let mut trivial: Vec<f64> = degree.iter().map(|&v: &f64| v.sqrt()).collect();
    let tnorm = trivial.iter().map(|v| v * v).sum::<f64>().sqrt();
    trivial.iter_mut().for_each(|v| *v /= tnorm);

    let mut accepted: Vec<(f64, Vec<f64>)> = Vec::with_capacity(d);
    for c in 0..n {
        if accepted.len() == d {
            break;
        }
        let mut v: Vec<f64> = (0..n).map(|r| vecs[[r, c]]).collect();
        // Gram-Schmidt against the trivial direction and prior picks.
        // Within a degenerate eigenspace this stays an exact eigenvector;
        // across distinct eigenvalues the coefficients are already ~0.
        let coef: f64 = v.iter().zip(&trivial).map(|(x, t)| x * t).sum();
        v.iter_mut().zip(&trivial).for_each(|(x, t)| *x -= coef * t);
        for (_, u) in &accepted {
            let coef: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= coef * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 0.5 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);

        // Residual check via the Rayleigh quotient of the orthogonalized
        // vector. Within a cluster of near-equal eigenvalues the solver's
        // individual pairings are ill-conditioned, so Gram-Schmidt may mix
        // directions; the Rayleigh quotient is the best eigenvalue estimate
        // for the vector we actually keep, and its residual stays small
        // exactly when such mixing happens.
        let lv: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| lap[[i, j]] * v[j]).sum())
            .collect();
        let rho: f64 = v.iter().zip(&lv).map(|(x, y)| x * y).sum();
        let resid = v
            .iter()
            .zip(&lv)
            .map(|(x, y)| (y - rho * x) * (y - rho * x))
            .sum::<f64>()
            .sqrt();
        if resid > eig_tol.max(1e-10) {
            return Err(Error::Convergence(format!(
                "eigenpair residual {resid:.3e} above tolerance",
            )));
        }
        accepted.push((rho, v));
    }
    if accepted.len() < d {
        return Err(Error::Degenerate(
            "not enough independent eigenvectors for the embedding".into(),
        ));
    }

    let mut coords = Array2::zeros((n, d));
    for (c, (_, v)) in accepted.iter().enumerate() {
        for r in 0..n {
            coords[[r, c]] = v[r] * inv_sqrt_d[r];
        }
    }
    normalize_columns(&mut coords);
    fix_signs(&mut coords);
    Ok(Embedding {
        coords,
        method: EmbedMethod::Laplacian,
        padded: 0,
    })
}
