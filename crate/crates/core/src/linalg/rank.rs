//! Numerical rank by Householder QR with column pivoting.

use super::Mat;
use crate::scalar::Scalar;

/// Outcome of a rank computation.
#[derive(Clone, Debug)]
pub struct RankInfo<T> {
    pub rank: usize,
    /// Tolerance actually used on the diagonal of `R`.
    pub tol: T,
    /// Largest diagonal magnitude of `R` (a norm estimate of the input).
    pub norm_estimate: T,
}

/// Rank of `a` with tolerance `tol = max(nrows, ncols) * eps * ||a||`,
/// where `||a||` is estimated by the largest pivot column norm. A caller
/// supplied tolerance overrides the default.
pub fn column_pivoted_rank<T: Scalar>(a: &Mat<T>, tol_override: Option<T>) -> RankInfo<T> {
    let m = a.nrows();
    let n = a.ncols();
    let mut r = a.clone();
    let kmax = m.min(n);

    let mut col_norms: Vec<T> = (0..n)
        .map(|j| {
            let mut s = T::zero();
            for i in 0..m {
                s += r[(i, j)] * r[(i, j)];
            }
            s
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut diag = Vec::with_capacity(kmax);

    for k in 0..kmax {
        // pivot: remaining column with the largest updated norm
        let mut best = k;
        for j in (k + 1)..n {
            if col_norms[j] > col_norms[best] {
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                let tmp = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = tmp;
            }
            col_norms.swap(k, best);
            perm.swap(k, best);
        }

        // Householder reflector for column k below row k
        let mut norm = T::zero();
        for i in k..m {
            norm += r[(i, k)] * r[(i, k)];
        }
        let norm = norm.sqrt();
        if norm == T::zero() {
            diag.push(T::zero());
            continue;
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|&x| x * x).sum::<T>();
        if vnorm2 > T::zero() {
            for j in k..n {
                let mut proj = T::zero();
                for (idx, i) in (k..m).enumerate() {
                    proj += v[idx] * r[(i, j)];
                }
                let factor = T::of(2.0) * proj / vnorm2;
                for (idx, i) in (k..m).enumerate() {
                    let upd = factor * v[idx];
                    r[(i, j)] -= upd;
                }
            }
        }
        r[(k, k)] = alpha;
        diag.push(alpha.abs());

        // downdate remaining column norms
        for (j, norm_j) in col_norms.iter_mut().enumerate().take(n).skip(k + 1) {
            let rkj = r[(k, j)];
            *norm_j -= rkj * rkj;
            if *norm_j < T::zero() {
                // recompute when cancellation bites
                let mut s = T::zero();
                for i in (k + 1)..m {
                    s += r[(i, j)] * r[(i, j)];
                }
                *norm_j = s;
            }
        }
    }

    let norm_estimate = diag.first().copied().unwrap_or(T::zero());
    let tol = tol_override
        .unwrap_or_else(|| T::of_usize(m.max(n)) * T::epsilon() * norm_estimate);
    let rank = diag.iter().take_while(|&&d| d > tol).count();
    RankInfo {
        rank,
        tol,
        norm_estimate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rank_identity() {
        let info = column_pivoted_rank(&Mat::<f64>::identity(5), None);
        assert_eq!(info.rank, 5);
    }

    #[test]
    fn rank_deficient_outer_product() {
        // rank-1 matrix u v^T
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 1.0, 2.0, -1.0];
        let a = Mat::from_fn(3, 4, |i, j| u[i] * v[j]);
        let info = column_pivoted_rank(&a, None);
        assert_eq!(info.rank, 1);
    }

    #[test]
    fn near_dependence_respects_tolerance() {
        let mut a = Mat::<f64>::identity(3);
        a[(2, 2)] = 1e-18; // far below n * eps * 1
        let info = column_pivoted_rank(&a, None);
        assert_eq!(info.rank, 2);
        let forced = column_pivoted_rank(&a, Some(1e-20));
        assert_eq!(forced.rank, 3);
    }
}
