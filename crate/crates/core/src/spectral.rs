//! Spectra of network models, closed-form cross-checks, and the two
//! parabolic controllability conditions (uniform gap, inverse summability).

use crate::csvio::{cell_usize, CsvTable};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, sym_eigenvalues, Mat};
use crate::network::{round_half_away, FamilySpec, NetworkFamily, NetworkModel};
use crate::scalar::Scalar;

/// Relative cutoff below which an eigenvalue counts as zero, and below which
/// a gap counts as an exact degeneracy.
pub const ZERO_EIGEN_REL_TOL: f64 = 1e-10;

/// Full symmetric eigendecomposition of a model with derived gap and
/// summability diagnostics. Eigenvalues ascending; column `k` of `vectors`
/// belongs to `values[k]`.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
    pub gaps: Vec<T>,
    pub min_gap: T,
    pub inverse_sum: T,
}

impl<T: Scalar> Spectrum<T> {
    fn from_decomposition(values: Vec<T>, vectors: Mat<T>) -> Self {
        let stats = GapStats::from_values(&values);
        Spectrum {
            gaps: values.windows(2).map(|w| w[1] - w[0]).collect(),
            min_gap: stats.min_gap,
            inverse_sum: stats.inverse_sum,
            values,
            vectors,
        }
    }

    /// Action of `e^{tau L}` on a state through the decomposition.
    pub fn exp_action(&self, tau: T, x: &[T]) -> Vec<T> {
        let mut coeffs = self.vectors.tr_matvec(x);
        for (c, &lam) in coeffs.iter_mut().zip(&self.values) {
            *c *= (tau * lam).exp();
        }
        self.vectors.matvec(&coeffs)
    }
}

/// Gap and summability numbers extracted from an ascending eigenvalue list.
#[derive(Clone, Copy, Debug)]
pub struct GapStats<T> {
    pub min_gap: T,
    /// 1-based index `k` at which `lambda_{k+1} - lambda_k` attains the
    /// minimum.
    pub gap_location: usize,
    /// Smallest gap after collapsing numerically degenerate eigenvalues
    /// (circulant spectra are exactly degenerate; this is the gap between
    /// distinct clusters).
    pub cluster_min_gap: T,
    pub inverse_sum: T,
}

impl<T: Scalar> GapStats<T> {
    pub fn from_values(values: &[T]) -> Self {
        let n = values.len();
        let max_abs = values
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m });
        let zero_tol = T::of(ZERO_EIGEN_REL_TOL) * max_abs.max(T::one());
        let mut min_gap = T::infinity();
        let mut gap_location = 1;
        let mut cluster_min_gap = T::infinity();
        for k in 0..n.saturating_sub(1) {
            let g = values[k + 1] - values[k];
            if g < min_gap {
                min_gap = g;
                gap_location = k + 1;
            }
            if g > zero_tol && g < cluster_min_gap {
                cluster_min_gap = g;
            }
        }
        let inverse_sum = values
            .iter()
            .filter(|&&v| v > zero_tol)
            .map(|&v| T::one() / v)
            .sum();
        GapStats {
            min_gap: if min_gap.is_infinite() { T::zero() } else { min_gap },
            gap_location,
            cluster_min_gap: if cluster_min_gap.is_infinite() {
                T::zero()
            } else {
                cluster_min_gap
            },
            inverse_sum,
        }
    }
}

/// Gap/summability report with pass flags under caller thresholds.
#[derive(Clone, Copy, Debug)]
pub struct GapReport<T> {
    pub n_agents: usize,
    pub min_gap: T,
    pub gap_location: usize,
    pub cluster_min_gap: T,
    pub inverse_sum: T,
    pub uniform_gap_flag: bool,
    pub summability_flag: bool,
}

/// Full eigendecomposition of the model's Laplacian.
pub fn compute_spectrum<T: Scalar>(model: &NetworkModel<T>) -> Result<Spectrum<T>> {
    model.validate_structure()?;
    let eig = sym_eigen(model.laplacian())?;
    Ok(Spectrum::from_decomposition(eig.values, eig.vectors))
}

/// Ascending eigenvalues only; much cheaper for sweeps over many sizes.
pub fn compute_eigenvalues<T: Scalar>(model: &NetworkModel<T>) -> Result<Vec<T>> {
    model.validate_structure()?;
    sym_eigenvalues(model.laplacian())
}

/// Closed-form path eigenvalue `4 sin^2(pi (k-1) / 2N)`, times `N^2` when
/// scaled. `k` is 1-based.
pub fn closed_form_path(n: usize, k: usize, scaled: bool) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "path eigenvalue index",
            index: k,
            len: n,
        });
    }
    let base = 4.0 * (std::f64::consts::PI * (k as f64 - 1.0) / (2.0 * n as f64))
        .sin()
        .powi(2);
    Ok(if scaled {
        (n * n) as f64 * base
    } else {
        base
    })
}

/// Closed-form dense-periodic eigenvalue
/// `2 - (2/l) sum_{j=1..l} cos(2 k pi j / N)` with `l = [rN]`; `k = N` gives
/// zero. `k` is 1-based.
pub fn closed_form_dense_periodic(n: usize, r: f64, k: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSize {
            what: "dense periodic network",
            min: 3,
            got: n,
        });
    }
    if !(0.0..=0.5).contains(&r) {
        return Err(Error::OutOfRange {
            what: "interaction radius r",
            value: r,
            lo: 0.0,
            hi: 0.5,
        });
    }
    let ell = round_half_away(r * n as f64);
    if ell < 1 {
        return Err(Error::DegenerateRadius { n, r });
    }
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "dense periodic eigenvalue index",
            index: k,
            len: n,
        });
    }
    let ell = ell as usize;
    let mut sum = 0.0;
    for j in 1..=ell {
        sum += (2.0 * std::f64::consts::PI * k as f64 * j as f64 / n as f64).cos();
    }
    Ok(2.0 - 2.0 / ell as f64 * sum)
}

/// Gap report for a computed spectrum under user thresholds. The flags
/// mirror the two parabolic controllability conditions: a uniform gap and a
/// finite inverse sum.
pub fn gap_report<T: Scalar>(
    spectrum: &Spectrum<T>,
    gap_threshold: T,
    sum_threshold: T,
) -> GapReport<T> {
    let stats = GapStats::from_values(&spectrum.values);
    GapReport {
        n_agents: spectrum.values.len(),
        min_gap: stats.min_gap,
        gap_location: stats.gap_location,
        cluster_min_gap: stats.cluster_min_gap,
        inverse_sum: stats.inverse_sum,
        uniform_gap_flag: stats.min_gap >= gap_threshold,
        summability_flag: stats.inverse_sum <= sum_threshold,
    }
}

/// Least-squares slope of `log lambda_k` against `log (k-1)` for the scaled
/// fractional family, fitted over mode numbers `k-1` in `[2, n/4]`.
///
/// The fit band sits in the low-frequency part of the spectrum because a
/// finite-difference discretization tracks the operator's `k^{2a}` growth
/// only below the grid's resolution limit; near the top of the band the
/// symbol saturates and every discretization flattens.
pub fn fractional_exponent_fit<T: Scalar>(model: &NetworkModel<T>) -> Result<f64> {
    match model.family() {
        NetworkFamily::Fractional { .. } => {}
        other => {
            return Err(Error::FamilyMismatch {
                expected: "fractional",
                got: other.name(),
            })
        }
    }
    if !model.scaled() {
        return Err(Error::ScalingMismatch);
    }
    let n = model.n_agents();
    if n < 64 {
        return Err(Error::InsufficientData(
            "exponent fit needs n >= 64 for a usable band",
        ));
    }
    let values = compute_eigenvalues(model)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 2..=n {
        let mode = k - 1;
        if mode < 2 || mode > n / 4 {
            continue;
        }
        let lam = values[k - 1].to_f64_lossy();
        if lam <= 0.0 {
            continue;
        }
        xs.push((mode as f64).ln());
        ys.push(lam.ln());
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData("fit band too small"));
    }
    Ok(least_squares_slope(&xs, &ys))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Which part of the spectrum enters the gap statistics of a study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralWindow {
    /// All `N` eigenvalues.
    Full,
    /// The lowest `ceil(f * N)` eigenvalues: the grid-resolved part of a
    /// finite-difference spectrum.
    LowestFraction(f64),
}

impl SpectralWindow {
    fn cut(&self, n: usize) -> usize {
        match *self {
            SpectralWindow::Full => n,
            SpectralWindow::LowestFraction(f) => ((f * n as f64).ceil() as usize).clamp(2, n),
        }
    }
}

/// One row of a gap scaling study.
#[derive(Clone, Copy, Debug)]
pub struct GapStudyRow<T> {
    pub n: usize,
    pub min_gap: T,
    pub cluster_min_gap: T,
    pub inverse_sum: T,
}

/// Gap and summability numbers for a family across sizes; used to probe
/// uniformity of the controllability conditions in `N`.
pub fn gap_scaling_study<T: Scalar>(
    spec: FamilySpec,
    n_list: &[usize],
    window: SpectralWindow,
) -> Result<Vec<GapStudyRow<T>>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let model = spec.build::<T>(n)?;
        let values = compute_eigenvalues(&model)?;
        let cut = window.cut(values.len());
        let stats = GapStats::from_values(&values[..cut]);
        rows.push(GapStudyRow {
            n,
            min_gap: stats.min_gap,
            cluster_min_gap: stats.cluster_min_gap,
            inverse_sum: stats.inverse_sum,
        });
    }
    Ok(rows)
}

/// `(k, lambda_k)` table.
pub fn eigenvalue_table<T: Scalar>(values: &[T]) -> CsvTable {
    let mut t = CsvTable::new(&["k", "lambda_k"]);
    for (i, &v) in values.iter().enumerate() {
        t.push_row(vec![
            cell_usize(i + 1),
            crate::csvio::fmt_float(v.to_f64_lossy()),
        ]);
    }
    t
}

/// `(k, gap_k)` table with `gap_k = lambda_{k+1} - lambda_k`.
pub fn gap_table<T: Scalar>(values: &[T]) -> CsvTable {
    let mut t = CsvTable::new(&["k", "gap_k"]);
    for (i, w) in values.windows(2).enumerate() {
        t.push_row(vec![
            cell_usize(i + 1),
            crate::csvio::fmt_float((w[1] - w[0]).to_f64_lossy()),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::network::{
        build_dense_periodic, build_fractional, build_grid2d, build_path,
    };

    #[test]
    fn path_small_spectra() {
        let s2 = compute_spectrum(&build_path::<f64>(2, false).unwrap()).unwrap();
        assert!((s2.values[0]).abs() < 1e-12);
        assert!((s2.values[1] - 2.0).abs() < 1e-12);
        let s3 = compute_spectrum(&build_path::<f64>(3, false).unwrap()).unwrap();
        for (v, e) in s3.values.iter().zip([0.0, 1.0, 3.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_path_examples() {
        assert_eq!(closed_form_path(100, 1, false).unwrap(), 0.0);
        assert!((closed_form_path(2, 2, false).unwrap() - 2.0).abs() < 1e-15);
        assert!((closed_form_path(2, 2, true).unwrap() - 8.0).abs() < 1e-14);
        assert!(closed_form_path(5, 6, false).is_err());
        assert!(closed_form_path(5, 0, false).is_err());
    }

    #[test]
    fn closed_form_dense_periodic_examples() {
        assert!((closed_form_dense_periodic(4, 0.5, 2).unwrap() - 2.0).abs() < 1e-14);
        assert!(closed_form_dense_periodic(4, 0.5, 4).unwrap().abs() < 1e-14);
        assert!((closed_form_dense_periodic(4, 0.5, 1).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn computed_path_matches_closed_form_across_sizes() {
        for n in [2usize, 3, 7, 33, 64] {
            for scaled in [false, true] {
                let model = build_path::<f64>(n, scaled).unwrap();
                let vals = compute_eigenvalues(&model).unwrap();
                let tol = 1e-9 * (n * n) as f64;
                for (k, &v) in vals.iter().enumerate() {
                    let cf = closed_form_path(n, k + 1, scaled).unwrap();
                    assert!(
                        (v - cf).abs() <= tol,
                        "n={n} scaled={scaled} k={} computed={v} closed={cf}",
                        k + 1
                    );
                }
            }
        }
    }

    #[test]
    fn computed_dense_periodic_matches_closed_form_multiset() {
        for n in [4usize, 5, 12, 45, 64] {
            for r in [0.1, 0.25, 0.5] {
                if round_half_away(r * n as f64) < 1 {
                    continue;
                }
                let model = build_dense_periodic::<f64>(n, r, false).unwrap();
                let mut vals = compute_eigenvalues(&model).unwrap();
                let mut cf: Vec<f64> = (1..=n)
                    .map(|k| closed_form_dense_periodic(n, r, k).unwrap())
                    .collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cf.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (a, b) in vals.iter().zip(&cf) {
                    assert!((a - b).abs() < 1e-9, "n={n} r={r}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn kernel_eigenvector_is_constant() {
        let models: Vec<NetworkModel<f64>> = vec![
            build_path(6, false).unwrap(),
            build_dense_periodic(7, 0.3, false).unwrap(),
            build_fractional(6, 0.4, 1.0, false).unwrap(),
            build_grid2d(3, false).unwrap(),
        ];
        for m in models {
            let s = compute_spectrum(&m).unwrap();
            assert!(s.values[0].abs() < 1e-10);
            let v0 = s.vectors.column(0);
            let expect = 1.0 / (m.n_agents() as f64).sqrt();
            for &c in &v0 {
                assert!(
                    (c.abs() - expect).abs() < 1e-8,
                    "kernel vector not constant: {c} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn spectrum_invariants_orthonormal_reconstruct_trace() {
        let models: Vec<NetworkModel<f64>> = vec![
            build_path(17, true).unwrap(),
            build_dense_periodic(16, 0.25, false).unwrap(),
            build_fractional(12, 0.6, 1.0, true).unwrap(),
        ];
        for m in models {
            let s = compute_spectrum(&m).unwrap();
            let n = m.n_agents();
            let vtv = s.vectors.transpose().matmul(&s.vectors);
            assert!(vtv.sub(&Mat::identity(n)).max_abs() < 1e-8);
            // reconstruction against the Laplacian
            let mut recon = Mat::<f64>::zeros(n, n);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        recon[(i, j)] += s.values[k] * s.vectors[(i, k)] * s.vectors[(j, k)];
                    }
                }
            }
            let scale = m.laplacian().max_abs();
            assert!(recon.sub(m.laplacian()).max_abs() <= 1e-8 * scale);
            // trace identity
            let sum: f64 = s.values.iter().sum();
            let tr = m.laplacian().trace();
            assert!((sum - tr).abs() <= 1e-8 * tr.abs().max(1.0));
        }
    }

    #[test]
    fn scaled_and_unscaled_eigenvalues_differ_by_the_factor() {
        let n = 12;
        let u = compute_eigenvalues(&build_path::<f64>(n, false).unwrap()).unwrap();
        let s = compute_eigenvalues(&build_path::<f64>(n, true).unwrap()).unwrap();
        for (a, b) in u.iter().zip(&s) {
            assert!((a * (n * n) as f64 - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
        let alpha = 0.7;
        let fu = compute_eigenvalues(&build_fractional::<f64>(n, alpha, 1.0, false).unwrap())
            .unwrap();
        let fs =
            compute_eigenvalues(&build_fractional::<f64>(n, alpha, 1.0, true).unwrap()).unwrap();
        let factor = (n as f64).powf(2.0 * alpha);
        for (a, b) in fu.iter().zip(&fs) {
            assert!((a * factor - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn dense_periodic_has_degenerate_pairs() {
        for n in [5usize, 9, 16] {
            let s =
                compute_spectrum(&build_dense_periodic::<f64>(n, 0.25, false).unwrap()).unwrap();
            let min_gap = s
                .gaps
                .iter()
                .fold(f64::INFINITY, |m, &g| m.min(g));
            assert!(
                min_gap < 1e-10,
                "n={n}: plane-wave pair not degenerate, min gap {min_gap:e}"
            );
        }
    }

    #[test]
    fn gap_report_path3() {
        let s = compute_spectrum(&build_path::<f64>(3, false).unwrap()).unwrap();
        let r = gap_report(&s, 0.5, 2.0);
        assert!((r.min_gap - 1.0).abs() < 1e-12);
        assert_eq!(r.gap_location, 1);
        assert!((r.inverse_sum - (1.0 + 1.0 / 3.0)).abs() < 1e-12);
        assert!(r.uniform_gap_flag);
        assert!(r.summability_flag);
    }

    #[test]
    fn scaled_path_inverse_sum_is_summable() {
        let s = compute_spectrum(&build_path::<f64>(100, true).unwrap()).unwrap();
        assert!(s.inverse_sum < 0.5, "inverse sum {}", s.inverse_sum);
    }

    #[test]
    fn dense_periodic_cluster_gap_shrinks_from_sparse_to_dense() {
        // radius-sweep qualitative check at N = 45 (the fig8 preset): the spectrum
        // accumulates more at r = 1/2 than at r = 0.1
        let gap_at = |r: f64| {
            let s = compute_spectrum(&build_dense_periodic::<f64>(45, r, false).unwrap()).unwrap();
            GapStats::from_values(&s.values).cluster_min_gap
        };
        assert!(gap_at(0.5) < gap_at(0.1));
    }

    #[test]
    fn exponent_fit_error_paths() {
        let unscaled = build_fractional::<f64>(64, 0.5, 1.0, false).unwrap();
        assert!(matches!(
            fractional_exponent_fit(&unscaled),
            Err(Error::ScalingMismatch)
        ));
        let small = build_fractional::<f64>(32, 0.5, 1.0, true).unwrap();
        assert!(matches!(
            fractional_exponent_fit(&small),
            Err(Error::InsufficientData(_))
        ));
        let path = build_path::<f64>(64, true).unwrap();
        assert!(matches!(
            fractional_exponent_fit(&path),
            Err(Error::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn fractional_quarter_min_gap_order_in_n() {
        // the full-spectrum min gap of the scaled alpha = 1/4 family decays
        // like N^{2a - 1} = N^{-1/2}: the log-log exponent sits within 0.2
        // of -0.5 by N = 512
        let rows = gap_scaling_study::<f64>(
            FamilySpec::Fractional {
                alpha: 0.25,
                c_alpha: 1.0,
                scaled: true,
            },
            &[512],
            SpectralWindow::Full,
        )
        .unwrap();
        let exponent = rows[0].min_gap.ln() / (512f64).ln();
        assert!(
            (exponent + 0.5).abs() <= 0.2,
            "min-gap exponent {exponent} not within 0.2 of -0.5"
        );
    }

    #[test]
    fn unscaled_path_min_gap_matches_smallest_eigenvalue_formula() {
        let rows = gap_scaling_study::<f64>(
            FamilySpec::Path { scaled: false },
            &[8, 16, 32],
            SpectralWindow::Full,
        )
        .unwrap();
        for row in rows {
            let expect = closed_form_path(row.n, 2, false).unwrap();
            assert!(
                (row.min_gap - expect).abs() < 1e-12,
                "n={}: {} vs {expect}",
                row.n,
                row.min_gap
            );
        }
    }
}
