//! Construction of the network Laplacians and control patterns.
//!
//! Four families are covered: the 1D path (nearest-neighbor chain), the 2D
//! grid (five-point stencil on a square), the dense periodic band (each agent
//! coupled to the `[rN]` nearest agents on each side of a ring, with weight
//! `1/[rN]`), and the fractional network with weights `c / |i-j|^{1+2a}`.
//! Every builder produces a symmetric positive-semidefinite Laplacian with
//! zero row sums and the constant vector in its kernel.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use serde_json::json;

/// Network family tag plus the family's own parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetworkFamily {
    Path1D,
    Grid2D { side: usize },
    DensePeriodic { r: f64, ell: usize },
    Fractional { alpha: f64, c_alpha: f64 },
}

impl NetworkFamily {
    pub fn name(&self) -> &'static str {
        match self {
            NetworkFamily::Path1D => "path1d",
            NetworkFamily::Grid2D { .. } => "grid2d",
            NetworkFamily::DensePeriodic { .. } => "dense_periodic",
            NetworkFamily::Fractional { .. } => "fractional",
        }
    }
}

/// A symmetric graph Laplacian with its construction metadata.
///
/// `scaled = false` is the consensus scaling `L`; `scaled = true` is the PDE
/// scaling (`N^2 L` for path/grid/dense periodic, `N^{2a} L` for the
/// fractional family).
#[derive(Clone, Debug)]
pub struct NetworkModel<T> {
    family: NetworkFamily,
    n_agents: usize,
    laplacian: Mat<T>,
    scaled: bool,
}

impl<T: Scalar> NetworkModel<T> {
    pub fn family(&self) -> NetworkFamily {
        self.family
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn laplacian(&self) -> &Mat<T> {
        &self.laplacian
    }

    pub fn scaled(&self) -> bool {
        self.scaled
    }

    /// Interaction weight `a_ij = -L_ij` for `i != j`.
    pub fn interaction_weight(&self, i: usize, j: usize) -> T {
        if i == j {
            T::zero()
        } else {
            -self.laplacian[(i, j)]
        }
    }

    /// Cheap structural invariants: symmetry, zero row sums, sign pattern.
    /// Row sums are evaluated with compensated summation so the tolerance
    /// reflects construction error rather than verification error.
    pub fn validate_structure(&self) -> Result<()> {
        let l = &self.laplacian;
        let sym = l.max_symmetry_defect().to_f64_lossy();
        if sym > 1e-12 {
            return Err(Error::NumericalFailure(format!(
                "laplacian symmetry defect {sym:e}"
            )));
        }
        for i in 0..self.n_agents {
            let s = neumaier_sum(l.row(i)).abs();
            if s > 1e-10 {
                return Err(Error::NumericalFailure(format!(
                    "row {i} sums to {s:e}"
                )));
            }
            for (j, &v) in l.row(i).iter().enumerate() {
                let v = v.to_f64_lossy();
                if i == j && v < 0.0 {
                    return Err(Error::NumericalFailure(format!(
                        "negative diagonal at {i}: {v}"
                    )));
                }
                if i != j && v > 0.0 {
                    return Err(Error::NumericalFailure(format!(
                        "positive off-diagonal at ({i},{j}): {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Dense matrix as CSV, one row per line, `c1..cn` header.
    pub fn laplacian_csv(&self) -> String {
        let n = self.n_agents;
        let mut out = String::new();
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("c{}", j + 1));
        }
        out.push('\n');
        for i in 0..n {
            for (j, &v) in self.laplacian.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&crate::csvio::fmt_float(v.to_f64_lossy()));
            }
            out.push('\n');
        }
        out
    }

    /// JSON descriptor `{family, n_agents, params, scaled}` for manifests.
    pub fn descriptor_json(&self) -> String {
        let params = match self.family {
            NetworkFamily::Path1D => json!({}),
            NetworkFamily::Grid2D { side } => json!({ "side": side }),
            NetworkFamily::DensePeriodic { r, ell } => json!({ "r": r, "ell": ell }),
            NetworkFamily::Fractional { alpha, c_alpha } => {
                json!({ "alpha": alpha, "c_alpha": c_alpha })
            }
        };
        json!({
            "family": self.family.name(),
            "n_agents": self.n_agents,
            "params": params,
            "scaled": self.scaled,
        })
        .to_string()
    }
}

fn neumaier_sum<T: Scalar>(xs: &[T]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in xs {
        let x = x.to_f64_lossy();
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Nearest integer with ties rounded away from zero, as used for `[rN]`.
pub fn round_half_away(x: f64) -> i64 {
    if x >= 0.0 {
        (x + 0.5).floor() as i64
    } else {
        (x - 0.5).ceil() as i64
    }
}

/// Tridiagonal path Laplacian with diagonal `(1, 2, ..., 2, 1)`.
pub fn build_path<T: Scalar>(n: usize, scaled: bool) -> Result<NetworkModel<T>> {
    if n < 2 {
        return Err(Error::InvalidSize {
            what: "path network",
            min: 2,
            got: n,
        });
    }
    let factor = if scaled {
        T::of_usize(n) * T::of_usize(n)
    } else {
        T::one()
    };
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
        l[(i, i)] = T::of(deg) * factor;
        if i > 0 {
            l[(i, i - 1)] = -factor;
        }
        if i + 1 < n {
            l[(i, i + 1)] = -factor;
        }
    }
    Ok(NetworkModel {
        family: NetworkFamily::Path1D,
        n_agents: n,
        laplacian: l,
        scaled,
    })
}

/// Five-point 2D grid Laplacian on a `side x side` square, row-major node
/// order `(i, j) -> (i-1)*side + j` (1-based grid coordinates).
pub fn build_grid2d<T: Scalar>(side: usize, scaled: bool) -> Result<NetworkModel<T>> {
    if side < 2 {
        return Err(Error::InvalidSize {
            what: "grid network",
            min: 2,
            got: side,
        });
    }
    let n = side * side;
    let factor = if scaled {
        T::of_usize(side) * T::of_usize(side)
    } else {
        T::one()
    };
    let mut l = Mat::zeros(n, n);
    let idx = |i: usize, j: usize| i * side + j;
    for i in 0..side {
        for j in 0..side {
            let me = idx(i, j);
            let mut deg = 0.0;
            let mut neighbors = Vec::with_capacity(4);
            if i > 0 {
                neighbors.push(idx(i - 1, j));
            }
            if i + 1 < side {
                neighbors.push(idx(i + 1, j));
            }
            if j > 0 {
                neighbors.push(idx(i, j - 1));
            }
            if j + 1 < side {
                neighbors.push(idx(i, j + 1));
            }
            for &nb in &neighbors {
                l[(me, nb)] = -factor;
                deg += 1.0;
            }
            l[(me, me)] = T::of(deg) * factor;
        }
    }
    Ok(NetworkModel {
        family: NetworkFamily::Grid2D { side },
        n_agents: n,
        laplacian: l,
        scaled,
    })
}

/// Periodic dense-band Laplacian: diagonal 2, with each of the `2l` band
/// slots `j = i-l..i+l (j != i)` contributing `-1/l` to the agent it lands
/// on after wrapping. For `2l < N` this is the textbook circulant with
/// entries `-1/l` at circular distances `1..l`; when the band wraps onto
/// itself (`2l >= N`) the aliased entries accumulate, which keeps row sums
/// zero and matches the plane-wave eigenvalue formula for every `(N, r)`.
pub fn build_dense_periodic<T: Scalar>(n: usize, r: f64, scaled: bool) -> Result<NetworkModel<T>> {
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
    let ell = ell as usize;
    let factor = if scaled {
        T::of_usize(n) * T::of_usize(n)
    } else {
        T::one()
    };
    let w = factor / T::of_usize(ell);
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = T::of(2.0) * factor;
        for d in 1..=ell {
            let plus = (i + d) % n;
            let minus = (i + n - (d % n)) % n;
            l[(i, plus)] -= w;
            l[(i, minus)] -= w;
        }
    }
    Ok(NetworkModel {
        family: NetworkFamily::DensePeriodic { r, ell },
        n_agents: n,
        laplacian: l,
        scaled,
    })
}

/// Fractional network: off-diagonal weights `-c / |i-j|^{1+2a}`, diagonal
/// chosen so rows sum to zero. The scaled variant multiplies by `n^{2a}`.
pub fn build_fractional<T: Scalar>(
    n: usize,
    alpha: f64,
    c_alpha: f64,
    scaled: bool,
) -> Result<NetworkModel<T>> {
    if n < 2 {
        return Err(Error::InvalidSize {
            what: "fractional network",
            min: 2,
            got: n,
        });
    }
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::OutOfRange {
            what: "fractional exponent alpha",
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if c_alpha <= 0.0 {
        return Err(Error::OutOfRange {
            what: "coupling constant c_alpha",
            value: c_alpha,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let factor = if scaled {
        T::of_usize(n).powf(T::of(2.0 * alpha))
    } else {
        T::one()
    };
    let c = T::of(c_alpha);
    let expo = T::of(1.0 + 2.0 * alpha);
    // one weight per distance, reused across the Toeplitz diagonals
    let weights: Vec<T> = (1..n)
        .map(|d| c / T::of_usize(d).powf(expo) * factor)
        .collect();
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        let mut diag = T::zero();
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = weights[i.abs_diff(j) - 1];
            l[(i, j)] = -w;
            diag += w;
        }
        l[(i, i)] = diag;
    }
    Ok(NetworkModel {
        family: NetworkFamily::Fractional { alpha, c_alpha },
        n_agents: n,
        laplacian: l,
        scaled,
    })
}

/// The standard 1D fractional-Laplacian normalization
/// `c(a) = 4^a Gamma(1/2 + a) / (sqrt(pi) |Gamma(-a)|)`, available as an
/// alternative to the default `c = 1` (the constant only rescales time).
pub fn fractional_coupling_standard(alpha: f64) -> f64 {
    // |Gamma(-a)| = pi / (sin(pi a) Gamma(1 + a)) for a in (0, 1)
    let num = 4f64.powf(alpha) * gamma(0.5 + alpha) * (std::f64::consts::PI * alpha).sin()
        * gamma(1.0 + alpha);
    num / std::f64::consts::PI.powf(1.5)
}

/// Lanczos approximation of the Gamma function for positive arguments.
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_1,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// A family with its parameters fixed but the size left free; sweeps over
/// `N` (spectra, control costs, limits) build from one of these.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilySpec {
    Path { scaled: bool },
    Grid2D { scaled: bool },
    DensePeriodic { r: f64, scaled: bool },
    Fractional { alpha: f64, c_alpha: f64, scaled: bool },
}

impl FamilySpec {
    /// Builds the model at size `n` (`n` is the grid side for `Grid2D`).
    pub fn build<T: Scalar>(&self, n: usize) -> Result<NetworkModel<T>> {
        match *self {
            FamilySpec::Path { scaled } => build_path(n, scaled),
            FamilySpec::Grid2D { scaled } => build_grid2d(n, scaled),
            FamilySpec::DensePeriodic { r, scaled } => build_dense_periodic(n, r, scaled),
            FamilySpec::Fractional {
                alpha,
                c_alpha,
                scaled,
            } => build_fractional(n, alpha, c_alpha, scaled),
        }
    }

    /// File-name fragment `{family}_{N}_{params}` used by the CSV emitters.
    pub fn table_name(&self, n: usize) -> String {
        match *self {
            FamilySpec::Path { scaled } => {
                format!("path1d_{n}_{}", if scaled { "scaled" } else { "unscaled" })
            }
            FamilySpec::Grid2D { scaled } => {
                format!("grid2d_{n}_{}", if scaled { "scaled" } else { "unscaled" })
            }
            FamilySpec::DensePeriodic { r, scaled } => format!(
                "dense_periodic_{n}_r{r}{}",
                if scaled { "_scaled" } else { "" }
            ),
            FamilySpec::Fractional { alpha, c_alpha, scaled } => format!(
                "fractional_{n}_alpha{alpha}_c{c_alpha}{}",
                if scaled { "_scaled" } else { "" }
            ),
        }
    }
}

/// Which agents a control actuates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControlShape {
    /// One agent, zero-based index.
    SingleNode(usize),
    /// All agents `j` (1-based) with `j/N` in `(a, b]`.
    InteriorStrip { a: f64, b: f64 },
    /// One full side of a 2D grid.
    GridSide,
}

/// Input matrix `B` with one column per actuated agent.
#[derive(Clone, Debug)]
pub struct ControlPattern<T> {
    shape: ControlShape,
    actuated: Vec<usize>,
    matrix: Mat<T>,
}

impl<T: Scalar> ControlPattern<T> {
    pub fn shape(&self) -> ControlShape {
        self.shape
    }

    pub fn actuated(&self) -> &[usize] {
        &self.actuated
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    pub fn n_inputs(&self) -> usize {
        self.actuated.len()
    }

    /// `B u` scattered into state space.
    pub fn apply(&self, u: &[T]) -> Vec<T> {
        debug_assert_eq!(u.len(), self.actuated.len());
        let mut out = vec![T::zero(); self.matrix.nrows()];
        for (col, &agent) in self.actuated.iter().enumerate() {
            out[agent] = u[col];
        }
        out
    }

    /// `B^T x` gathered from state space.
    pub fn gather(&self, x: &[T]) -> Vec<T> {
        self.actuated.iter().map(|&agent| x[agent]).collect()
    }
}

/// Builds the `n_agents x m` actuation matrix for a shape on a model.
pub fn build_control<T: Scalar>(
    model: &NetworkModel<T>,
    shape: ControlShape,
) -> Result<ControlPattern<T>> {
    let n = model.n_agents();
    let actuated: Vec<usize> = match shape {
        ControlShape::SingleNode(i) => {
            if i >= n {
                return Err(Error::IndexOutOfRange {
                    what: "actuated agent",
                    index: i,
                    len: n,
                });
            }
            vec![i]
        }
        ControlShape::InteriorStrip { a, b } => {
            if !(0.0..1.0).contains(&a) || b > 1.0 || a >= b {
                return Err(Error::OutOfRange {
                    what: "strip bounds (a, b)",
                    value: a,
                    lo: 0.0,
                    hi: b,
                });
            }
            (1..=n)
                .filter(|&j| {
                    let pos = j as f64 / n as f64;
                    pos > a && pos <= b
                })
                .map(|j| j - 1)
                .collect()
        }
        ControlShape::GridSide => match model.family() {
            NetworkFamily::Grid2D { side } => (0..side).collect(),
            other => {
                return Err(Error::FamilyMismatch {
                    expected: "grid2d",
                    got: other.name(),
                })
            }
        },
    };
    if actuated.is_empty() {
        return Err(Error::EmptyControl);
    }
    let m = actuated.len();
    let mut matrix = Mat::zeros(n, m);
    for (col, &agent) in actuated.iter().enumerate() {
        matrix[(agent, col)] = T::one();
    }
    Ok(ControlPattern {
        shape,
        actuated,
        matrix,
    })
}

/// Fraction of nonzero off-diagonal entries, `#nonzero / N^2`.
pub fn edge_density<T: Scalar>(model: &NetworkModel<T>) -> f64 {
    let n = model.n_agents();
    let mut count = 0usize;
    for i in 0..n {
        for (j, &v) in model.laplacian().row(i).iter().enumerate() {
            if i != j && v != T::zero() {
                count += 1;
            }
        }
    }
    count as f64 / (n as f64 * n as f64)
}
