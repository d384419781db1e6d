//! Symmetric eigendecomposition: Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration, with optional eigenvector
//! accumulation. Matrices that are already tridiagonal (path Laplacians)
//! skip the reduction, which makes eigenvalue-only sweeps over many sizes
//! cheap.

use super::Mat;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigendecomposition of a symmetric matrix; `values` ascending, column `k`
/// of `vectors` is the eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Scalar> SymEigen<T> {
    /// Applies `f(Lambda)` through the decomposition: `V f(diag) V^T x`.
    pub fn apply_function(&self, f: impl Fn(T) -> T, x: &[T]) -> Vec<T> {
        let n = self.values.len();
        assert_eq!(x.len(), n);
        let mut coeffs = self.vectors.tr_matvec(x);
        for (c, &lam) in coeffs.iter_mut().zip(&self.values) {
            *c *= f(lam);
        }
        self.vectors.matvec(&coeffs)
    }

    /// Action of the matrix exponential `e^{tau A} x`.
    pub fn exp_action(&self, tau: T, x: &[T]) -> Vec<T> {
        self.apply_function(|lam| (tau * lam).exp(), x)
    }

    /// Reassembles `V diag(values) V^T`.
    pub fn reconstruct(&self) -> Mat<T> {
        let n = self.values.len();
        let mut out = Mat::zeros(n, n);
        for k in 0..n {
            let lam = self.values[k];
            for i in 0..n {
                let vik = self.vectors[(i, k)] * lam;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out
    }
}

/// Full symmetric eigendecomposition.
pub fn sym_eigen<T: Scalar>(a: &Mat<T>) -> Result<SymEigen<T>> {
    let (mut d, mut e, mut v) = tridiagonalize(a, true);
    let mut vm = v.take().expect("accumulated basis");
    ql_implicit(&mut d, &mut e, Some(&mut vm))?;
    sort_ascending(&mut d, Some(&mut vm));
    Ok(SymEigen {
        values: d,
        vectors: vm,
    })
}

/// Eigenvalues only, ascending. Skips all eigenvector work.
pub fn sym_eigenvalues<T: Scalar>(a: &Mat<T>) -> Result<Vec<T>> {
    let (mut d, mut e, _) = tridiagonalize(a, false);
    ql_implicit(&mut d, &mut e, None)?;
    sort_ascending(&mut d, None);
    Ok(d)
}

/// Householder reduction of a symmetric matrix to tridiagonal form
/// (diagonal `d`, subdiagonal `e` with `e[0]` unused). When `accumulate`
/// is set, also returns the orthogonal basis of the reduction. Matrices
/// that are already tridiagonal are passed through unchanged.
fn tridiagonalize<T: Scalar>(a: &Mat<T>, accumulate: bool) -> (Vec<T>, Vec<T>, Option<Mat<T>>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");

    if a.is_tridiagonal() {
        let d: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        let mut e = vec![T::zero(); n];
        for i in 1..n {
            e[i] = a[(i, i - 1)];
        }
        let v = accumulate.then(|| Mat::identity(n));
        return (d, e, v);
    }

    let mut v = a.clone();
    let mut d: Vec<T> = (0..n).map(|j| v[(n - 1, j)]).collect();
    let mut e = vec![T::zero(); n];

    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = T::zero();
            }
            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    if accumulate {
        for i in 0..(n - 1) {
            v[(n - 1, i)] = v[(i, i)];
            v[(i, i)] = T::one();
            let h = d[i + 1];
            if h != T::zero() {
                for k in 0..=i {
                    d[k] = v[(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = T::zero();
                    for k in 0..=i {
                        g += v[(k, i + 1)] * v[(k, j)];
                    }
                    for k in 0..=i {
                        let upd = g * d[k];
                        v[(k, j)] -= upd;
                    }
                }
            }
            for k in 0..=i {
                v[(k, i + 1)] = T::zero();
            }
        }
        for j in 0..n {
            d[j] = v[(n - 1, j)];
            v[(n - 1, j)] = T::zero();
        }
        v[(n - 1, n - 1)] = T::one();
        e[0] = T::zero();
        (d, e, Some(v))
    } else {
        // without accumulation the reduced tridiagonal lives on the diagonal
        // of the worked copy; e[] already carries the subdiagonal
        let dd: Vec<T> = (0..n).map(|i| v[(i, i)]).collect();
        e[0] = T::zero();
        (dd, e, None)
    }
}

/// `sqrt(a^2 + b^2)` in the overflow-safe ratio form. The standard library
/// hypot is correctly rounded but an order of magnitude slower, and the QL
/// iteration spends most of its time here.
#[inline]
fn pythag<T: Scalar>(a: T, b: T) -> T {
    let (a, b) = (a.abs(), b.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return T::zero();
    }
    let q = small / big;
    big * (T::one() + q * q).sqrt()
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, rotating
/// the columns of `v` along when present.
fn ql_implicit<T: Scalar>(d: &mut [T], e: &mut [T], mut v: Option<&mut Mat<T>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    const MAX_ITER: usize = 200;

    for l in 0..n {
        let cand = d[l].abs() + e[l].abs();
        if cand > tst1 {
            tst1 = cand;
        }
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NumericalFailure(format!(
                        "QL iteration stalled at index {l}, residual {:e}",
                        e[l].abs().to_f64_lossy()
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (T::of(2.0) * e[l]);
                let mut r = pythag(p, T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = pythag(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(vm) = v.as_deref_mut() {
                        for k in 0..n {
                            let h = vm[(k, i + 1)];
                            vm[(k, i + 1)] = s * vm[(k, i)] + c * h;
                            vm[(k, i)] = c * vm[(k, i)] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

fn sort_ascending<T: Scalar>(d: &mut [T], mut v: Option<&mut Mat<T>>) {
    let n = d.len();
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().take(n).skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(k, i);
            if let Some(vm) = v.as_deref_mut() {
                for row in 0..n {
                    let tmp = vm[(row, i)];
                    vm[(row, i)] = vm[(row, k)];
                    vm[(row, k)] = tmp;
                }
            }
        }
    }
}
