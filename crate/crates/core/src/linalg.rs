//! Dense linear algebra kernels shared across the crate.
//!
//! Three workhorses live here, all desk-scale (n up to a few hundred):
//!
//! - [`ComplexLu`]: LU factorization with partial pivoting over complex
//!   scalars, giving determinants and linear solves. The minimum pivot
//!   magnitude is exposed so callers can detect near-singular systems.
//! - [`complex_eigenvalues`]: eigenvalues of a general complex matrix via
//!   Householder Hessenberg reduction followed by explicitly shifted QR
//!   iteration with Givens rotations (Wilkinson shift, deflation on
//!   negligible subdiagonals).
//! - [`symmetric_eigen`]: cyclic Jacobi eigendecomposition for real
//!   symmetric matrices, returning ascending eigenvalues with an
//!   orthonormal eigenvector matrix.
//!
//! The QR and Jacobi routines are independent algorithms, which the test
//! suites exploit by cross-checking one against the other on symmetric
//! inputs.

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::scalar::{r, Real};
use crate::C;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular to working precision (pivot {pivot:e} at step {step})")]
    Singular { pivot: f64, step: usize },
    #[error("eigenvalue iteration failed to converge within {0} steps")]
    NoConvergence(usize),
}

fn check_square<S>(m: &Array2<S>) -> Result<usize, LinalgError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// LU factorization `PA = LU` of a complex square matrix.
pub struct ComplexLu<T> {
    lu: Array2<C<T>>,
    perm: Vec<usize>,
    swaps: usize,
    min_pivot: T,
    norm: T,
}

impl<T: Real> ComplexLu<T> {
    pub fn factor(m: &Array2<C<T>>) -> Result<Self, LinalgError> {
        let n = check_square(m)?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let mut min_pivot = T::infinity();
        let norm = lu
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a });

        for k in 0..n {
            let mut p = k;
            let mut pmag = lu[[k, k]].norm();
            for i in (k + 1)..n {
                let mag = lu[[i, k]].norm();
                if mag > pmag {
                    p = i;
                    pmag = mag;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[[k, j]];
                    lu[[k, j]] = lu[[p, j]];
                    lu[[p, j]] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            if pmag < min_pivot {
                min_pivot = pmag;
            }
            if pmag == T::zero() {
                continue; // structurally singular column; det picks up the zero
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let factor = lu[[i, k]] / pivot;
                lu[[i, k]] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[[k, j]];
                    lu[[i, j]] = lu[[i, j]] - sub;
                }
            }
        }
        if n == 0 {
            min_pivot = T::zero();
        }
        Ok(Self { lu, perm, swaps, min_pivot, norm })
    }

    /// Smallest pivot magnitude relative to the largest input entry.
    /// Zero means exactly singular; values near machine epsilon mean the
    /// solve is untrustworthy.
    pub fn relative_min_pivot(&self) -> T {
        if self.norm == T::zero() {
            T::zero()
        } else {
            self.min_pivot / self.norm
        }
    }

    pub fn det(&self) -> C<T> {
        let n = self.lu.nrows();
        let mut d = if self.swaps % 2 == 0 {
            C::new(T::one(), T::zero())
        } else {
            C::new(-T::one(), T::zero())
        };
        for k in 0..n {
            d = d * self.lu[[k, k]];
        }
        d
    }

    pub fn solve_vec(&self, b: &Array1<C<T>>) -> Result<Array1<C<T>>, LinalgError> {
        let n = self.lu.nrows();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs length {} vs system size {n}",
                b.len()
            )));
        }
        if self.min_pivot == T::zero() && n > 0 {
            return Err(LinalgError::Singular { pivot: 0.0, step: 0 });
        }
        let mut y = Array1::from_elem(n, C::new(T::zero(), T::zero()));
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                let sub = self.lu[[i, j]] * y[j];
                acc = acc - sub;
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                let sub = self.lu[[i, j]] * y[j];
                acc = acc - sub;
            }
            y[i] = acc / self.lu[[i, i]];
        }
        Ok(y)
    }

    pub fn solve_matrix(&self, rhs: &Array2<C<T>>) -> Result<Array2<C<T>>, LinalgError> {
        let n = self.lu.nrows();
        if rhs.nrows() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs has {} rows vs system size {n}",
                rhs.nrows()
            )));
        }
        let cols = rhs.ncols();
        let mut out = Array2::from_elem((n, cols), C::new(T::zero(), T::zero()));
        for j in 0..cols {
            let col = rhs.column(j).to_owned();
            let x = self.solve_vec(&col)?;
            for i in 0..n {
                out[[i, j]] = x[i];
            }
        }
        Ok(out)
    }
}

/// Determinant of a complex square matrix.
pub fn complex_det<T: Real>(m: &Array2<C<T>>) -> Result<C<T>, LinalgError> {
    Ok(ComplexLu::factor(m)?.det())
}

/// Eigenvalues of a general complex square matrix, in no particular order.
///
/// Householder reduction to upper Hessenberg form, then explicitly shifted
/// QR iteration (Wilkinson shift from the trailing 2x2, exceptional shifts
/// on stagnation). Suitable for the desk-scale matrices this crate handles.
pub fn complex_eigenvalues<T: Real>(m: &Array2<C<T>>) -> Result<Vec<C<T>>, LinalgError> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[[0, 0]]]);
    }
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    qr_eigenvalues(&mut h)
}

fn hessenberg_in_place<T: Real>(h: &mut Array2<C<T>>) {
    let n = h.nrows();
    let zero = C::new(T::zero(), T::zero());
    for k in 0..n.saturating_sub(2) {
        let mut norm_sq = T::zero();
        for i in (k + 1)..n {
            norm_sq += h[[i, k]].norm_sqr();
        }
        let norm_x = norm_sq.sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let x0 = h[[k + 1, k]];
        let alpha = if x0 == zero {
            C::new(-norm_x, T::zero())
        } else {
            -(x0 / C::new(x0.norm(), T::zero())) * C::new(norm_x, T::zero())
        };
        // v = x - alpha e1, normalized; reflector P = I - 2 v v^H
        let mut v: Vec<C<T>> = (k + 1..n).map(|i| h[[i, k]]).collect();
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for c in v.iter_mut() {
            *c = *c / C::new(vnorm, T::zero());
        }
        let two = C::new(r::<T>(2.0), T::zero());
        // left: rows k+1..n, columns k..n
        for j in k..n {
            let mut dot = zero; // v^H * column j (rows k+1..)
            for (idx, i) in ((k + 1)..n).enumerate() {
                dot = dot + v[idx].conj() * h[[i, j]];
            }
            let scale = two * dot;
            for (idx, i) in ((k + 1)..n).enumerate() {
                let sub = scale * v[idx];
                h[[i, j]] = h[[i, j]] - sub;
            }
        }
        // right: all rows, columns k+1..n
        for i in 0..n {
            let mut dot = zero; // row i * v
            for (idx, j) in ((k + 1)..n).enumerate() {
                dot = dot + h[[i, j]] * v[idx];
            }
            let scale = two * dot;
            for (idx, j) in ((k + 1)..n).enumerate() {
                let sub = scale * v[idx].conj();
                h[[i, j]] = h[[i, j]] - sub;
            }
        }
        h[[k + 1, k]] = alpha;
        for i in (k + 2)..n {
            h[[i, k]] = zero;
        }
    }
}

/// Eigenvalues of the two-by-two complex block [[a, b], [c, d]].
fn eig_2x2<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> (C<T>, C<T>) {
    let half = C::new(r::<T>(0.5), T::zero());
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    (mean + disc, mean - disc)
}

fn qr_eigenvalues<T: Real>(h: &mut Array2<C<T>>) -> Result<Vec<C<T>>, LinalgError> {
    let n = h.nrows();
    let zero = C::new(T::zero(), T::zero());
    let eps = T::epsilon();
    let tiny = T::min_positive_value();
    let mut eig = vec![zero; n];
    let mut hi = n - 1;
    let mut block_iters = 0usize;
    let mut total_iters = 0usize;
    let max_total = 120 * n;

    let negligible = |h: &Array2<C<T>>, i: usize| -> bool {
        let s = h[[i, i - 1]].norm();
        let d = h[[i - 1, i - 1]].norm() + h[[i, i]].norm();
        s <= eps * d + tiny
    };

    loop {
        // Deflate converged eigenvalues at the bottom of the active block.
        while hi > 0 && negligible(h, hi) {
            h[[hi, hi - 1]] = zero;
            eig[hi] = h[[hi, hi]];
            hi -= 1;
            block_iters = 0;
        }
        if hi == 0 {
            eig[0] = h[[0, 0]];
            return Ok(eig);
        }
        // Active block is lo..=hi.
        let mut lo = hi;
        while lo > 0 && !negligible(h, lo) {
            lo -= 1;
        }
        if lo > 0 {
            h[[lo, lo - 1]] = zero;
        }
        if hi - lo == 1 {
            let (l1, l2) = eig_2x2(h[[lo, lo]], h[[lo, hi]], h[[hi, lo]], h[[hi, hi]]);
            eig[hi] = l1;
            eig[lo] = l2;
            h[[hi, lo]] = zero;
            if lo == 0 {
                return Ok(eig);
            }
            hi = lo - 1;
            block_iters = 0;
            continue;
        }

        block_iters += 1;
        total_iters += 1;
        if total_iters > max_total {
            return Err(LinalgError::NoConvergence(max_total));
        }
        let mu = if block_iters % 12 == 0 {
            // exceptional shift to break stalls
            let off = h[[hi, hi - 1]].norm() + h[[hi - 1, hi - 2]].norm();
            h[[hi, hi]] + C::new(r::<T>(1.5) * off, T::zero())
        } else {
            let (l1, l2) = eig_2x2(
                h[[hi - 1, hi - 1]],
                h[[hi - 1, hi]],
                h[[hi, hi - 1]],
                h[[hi, hi]],
            );
            let d = h[[hi, hi]];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        // Explicit shifted QR step on the window: H <- RQ + mu I where
        // QR = H - mu I, realized with Givens rotations on the Hessenberg band.
        for i in lo..=hi {
            h[[i, i]] = h[[i, i]] - mu;
        }
        // rotations[i] holds (ca, cb) with G = [[conj(ca), conj(cb)], [-cb, ca]]
        let mut rotations: Vec<(C<T>, C<T>)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let a = h[[i, i]];
            let b = h[[i + 1, i]];
            let t = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (ca, cb) = if t == T::zero() {
                (C::new(T::one(), T::zero()), zero)
            } else {
                let tc = C::new(t, T::zero());
                (a / tc, b / tc)
            };
            for j in i..=hi {
                let hi_j = h[[i, j]];
                let lo_j = h[[i + 1, j]];
                h[[i, j]] = ca.conj() * hi_j + cb.conj() * lo_j;
                h[[i + 1, j]] = -cb * hi_j + ca * lo_j;
            }
            rotations.push((ca, cb));
        }
        for (idx, (ca, cb)) in rotations.iter().enumerate() {
            let i = lo + idx;
            let row_end = if i + 2 <= hi { i + 2 } else { hi };
            for row in lo..=row_end {
                let col_i = h[[row, i]];
                let col_i1 = h[[row, i + 1]];
                h[[row, i]] = col_i * *ca + col_i1 * *cb;
                h[[row, i + 1]] = col_i * (-cb.conj()) + col_i1 * ca.conj();
            }
        }
        for i in lo..=hi {
            h[[i, i]] = h[[i, i]] + mu;
        }
    }
}

/// Eigendecomposition of a real symmetric matrix.
pub struct SymEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Array1<T>,
    /// Orthonormal eigenvectors; column `i` pairs with `values[i]`.
    pub vectors: Array2<T>,
}

/// Cyclic Jacobi eigendecomposition. The input is symmetrized as
/// `(M + M^T)/2` before iterating, so mildly asymmetric inputs are treated
/// as their symmetric part.
pub fn symmetric_eigen<T: Real>(m: &Array2<T>) -> Result<SymEigen<T>, LinalgError> {
    let n = check_square(m)?;
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = (m[[i, j]] + m[[j, i]]) / r::<T>(2.0);
        }
    }
    let mut v = Array2::zeros((n, n));
    for i in 0..n {
        v[[i, i]] = T::one();
    }
    if n > 1 {
        let frob = a.iter().map(|x| *x * *x).sum::<T>().sqrt();
        let tol = r::<T>(1e-15) * if frob == T::zero() { T::one() } else { frob };
        let max_sweeps = 64;
        let mut converged = false;
        for _ in 0..max_sweeps {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[[p, q]] * a[[p, q]];
                }
            }
            if off.sqrt() <= tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[[p, q]];
                    if apq.abs() <= tol / r::<T>(1e3) {
                        continue;
                    }
                    let theta = (a[[q, q]] - a[[p, p]]) / (r::<T>(2.0) * apq);
                    let t = {
                        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                    };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[[k, p]];
                        let akq = a[[k, q]];
                        a[[k, p]] = c * akp - s * akq;
                        a[[k, q]] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[[p, k]];
                        let aqk = a[[q, k]];
                        a[[p, k]] = c * apk - s * aqk;
                        a[[q, k]] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[[k, p]];
                        let vkq = v[[k, q]];
                        v[[k, p]] = c * vkp - s * vkq;
                        v[[k, q]] = s * vkp + c * vkq;
                    }
                }
            }
        }
        if !converged {
            // one last check; Jacobi converges quadratically so this is rare
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[[p, q]] * a[[p, q]];
                }
            }
            if off.sqrt() > tol * r::<T>(1e3) {
                return Err(LinalgError::NoConvergence(max_sweeps));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[[i, i]]
            .partial_cmp(&a[[j, j]])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut values = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (new_idx, &old_idx) in order.iter().enumerate() {
        values[new_idx] = a[[old_idx, old_idx]];
        for row in 0..n {
            vectors[[row, new_idx]] = v[[row, old_idx]];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Spectral norm of a real symmetric matrix (largest absolute eigenvalue).
pub fn symmetric_spectral_norm<T: Real>(m: &Array2<T>) -> Result<T, LinalgError> {
    let eig = symmetric_eigen(m)?;
    Ok(eig
        .values
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc }))
}

/// Modified Gram-Schmidt on the rows of `rows`, in place. Returns `false`
/// when a row is (numerically) dependent on the previous ones, in which
/// case the contents are unspecified.
pub fn orthonormalize_rows<T: Real>(rows: &mut [Vec<T>]) -> bool {
    let k = rows.len();
    for i in 0..k {
        for j in 0..i {
            let mut dot = T::zero();
            for (a, b) in rows[i].iter().zip(rows[j].iter()) {
                dot += *a * *b;
            }
            let (head, tail) = rows.split_at_mut(i);
            let prev = &head[j];
            for (a, b) in tail[0].iter_mut().zip(prev.iter()) {
                *a -= dot * *b;
            }
        }
        let norm = rows[i].iter().map(|x| *x * *x).sum::<T>().sqrt();
        if norm <= r::<T>(1e-12) {
            return false;
        }
        for x in rows[i].iter_mut() {
            *x /= norm;
        }
    }
    true
}
