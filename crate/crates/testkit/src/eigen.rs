//! Dense symmetric eigensolver and subspace-comparison helpers.

use ndarray::Array2;

/// Cyclic Jacobi eigensolver: eigenvalues ascending, eigenvectors in the
/// matching columns. Independent of any tridiagonalization-based path.
pub fn jacobi_eigen(m: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = Array2::eye(n);
    for _ in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[[i, j]] * a[[i, j]];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    a[[i, p]] = c * aip - s * aiq;
                    a[[i, q]] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[[p, i]];
                    let aqi = a[[q, i]];
                    a[[p, i]] = c * api - s * aqi;
                    a[[q, i]] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[[x, x]].partial_cmp(&a[[y, y]]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vecs = Array2::zeros((n, n));
    for (c, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs[[r, c]] = v[[r, i]];
        }
    }
    (vals, vecs)
}

/// Modified Gram-Schmidt orthonormal basis of the column space.
///
/// # Panics
/// Panics if the columns are (numerically) linearly dependent.
pub fn orthonormalize(m: &Array2<f64>) -> Array2<f64> {
    let mut q = m.clone();
    let d = q.ncols();
    for c in 0..d {
        for prev in 0..c {
            let coef = q.column(c).dot(&q.column(prev));
            let prior = q.column(prev).to_owned();
            q.column_mut(c).zip_mut_with(&prior, |x, &y| *x -= coef * y);
        }
        let norm = q.column(c).dot(&q.column(c)).sqrt();
        assert!(norm > 1e-10, "rank-deficient basis in test helper");
        q.column_mut(c).mapv_inplace(|x| x / norm);
    }
    q
}

/// Largest principal angle (radians) between two column spaces of equal
/// dimension. Zero iff the spans coincide.
pub fn max_principal_angle(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    // cos(angles) = singular values of Qa' Qb.
    let qa = orthonormalize(a);
    let qb = orthonormalize(b);
    let m = qa.t().dot(&qb);
    let gram = m.t().dot(&m);
    let (vals, _) = jacobi_eigen(&gram);
    let min_sv2 = vals.first().copied().unwrap_or(0.0).max(0.0);
    min_sv2.sqrt().min(1.0).acos()
}
