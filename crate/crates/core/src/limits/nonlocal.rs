//! Midpoint-rule Nystrom semi-discretization of the non-local diffusion
//! equation `dx/dt (s) = int_I W(s, s*) psi(x(s*) - x(s)) ds*` with RK4 in
//! time, and the graph-limit convergence study built on it.

use super::kernel::Kernel;
use super::DistributionField;
use crate::dynamics::InfluenceFunction;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::profile::Profile;
use crate::scalar::Scalar;

/// Interaction nonlinearity of the limit equation.
#[derive(Clone, Copy, Debug)]
pub enum Psi {
    /// `psi(d) = d`: the linear networked limit.
    Identity,
    /// `psi(d) = a(|d|) d`: the alignment limit.
    Alignment(InfluenceFunction),
}

/// Solves the non-local diffusion equation on `m_quad` uniform cells by the
/// midpoint Nystrom rule and fixed-step RK4. `g_cells` are the initial cell
/// values (use [`Profile::cell_averages`] for named profiles). Bounded
/// kernels only; the singular fractional power kernel is rejected.
pub fn solve_nonlocal_diffusion<T: Scalar>(
    kernel: &Kernel<T>,
    g_cells: &[T],
    horizon: T,
    dt: T,
    psi: Psi,
) -> Result<DistributionField<T>> {
    if let Kernel::FractionalPower { .. } = kernel {
        return Err(Error::UnsupportedKernel(
            "singular fractional kernel excluded from the Nystrom solver",
        ));
    }
    let m = g_cells.len();
    if m < 2 {
        return Err(Error::InvalidSize {
            what: "quadrature cells",
            min: 2,
            got: m,
        });
    }
    // kernel sampled once at cell midpoints
    let mids: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
    let k = Mat::from_fn(m, m, |i, j| kernel.eval(mids[i], mids[j]));
    let inv_m = T::one() / T::of_usize(m);
    let row_bound = (0..m)
        .map(|i| k.row(i).iter().copied().sum::<T>() * inv_m)
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let psi_gain = match psi {
        Psi::Identity => 1.0,
        Psi::Alignment(a) => a.sup().max(1.0),
    };
    let dt_stable = T::of(1.8) / (T::of(2.0 * psi_gain) * row_bound.max(T::of(1e-300)));

    let rhs = |_t: T, x: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); m];
        match psi {
            Psi::Identity => {
                for i in 0..m {
                    let mut acc = T::zero();
                    for (j, &kij) in k.row(i).iter().enumerate() {
                        acc += kij * (x[j] - x[i]);
                    }
                    out[i] = acc * inv_m;
                }
            }
            Psi::Alignment(a) => {
                for i in 0..m {
                    let mut acc = T::zero();
                    for (j, &kij) in k.row(i).iter().enumerate() {
                        if kij == T::zero() {
                            continue;
                        }
                        let diff = x[j] - x[i];
                        acc += kij * a.eval(diff.abs()) * diff;
                    }
                    out[i] = acc * inv_m;
                }
            }
        }
        out
    };

    // reuse the RK4 plumbing from the dynamics module via a local driver
    let (times, values, h) = rk4_local(g_cells, horizon, dt, dt_stable, rhs)?;
    Ok(DistributionField {
        n_cells: m,
        times,
        values,
        dt: h,
    })
}

fn rk4_local<T: Scalar>(
    x0: &[T],
    horizon: T,
    dt: T,
    dt_stable: T,
    rhs: impl Fn(T, &[T]) -> Vec<T>,
) -> Result<(Vec<T>, Vec<Vec<T>>, T)> {
    if horizon <= T::zero() || dt <= T::zero() {
        return Err(Error::OutOfRange {
            what: "horizon/step",
            value: dt.to_f64_lossy(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let dt_eff = if dt > dt_stable { dt_stable } else { dt };
    let steps = (horizon / dt_eff).to_f64_lossy().ceil().max(1.0) as usize;
    if steps > 2_000_000 {
        return Err(Error::StepSize {
            requested: dt.to_f64_lossy(),
            needed: dt_stable.to_f64_lossy(),
        });
    }
    let h = horizon / T::of_usize(steps);
    let half = h / T::of(2.0);
    let sixth = h / T::of(6.0);
    let mut x = x0.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    states.push(x.clone());
    for mstep in 0..steps {
        let t = h * T::of_usize(mstep);
        let k1 = rhs(t, &x);
        let x2: Vec<T> = x.iter().zip(&k1).map(|(&a, &k)| a + half * k).collect();
        let k2 = rhs(t + half, &x2);
        let x3: Vec<T> = x.iter().zip(&k2).map(|(&a, &k)| a + half * k).collect();
        let k3 = rhs(t + half, &x3);
        let x4: Vec<T> = x.iter().zip(&k3).map(|(&a, &k)| a + h * k).collect();
        let k4 = rhs(t + h, &x4);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += sixth * (k1[i] + T::of(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
        times.push(h * T::of_usize(mstep + 1));
        states.push(x.clone());
    }
    for row in &states {
        for v in row {
            if !v.is_finite() {
                return Err(Error::NumericalFailure(
                    "non-finite field during integration".into(),
                ));
            }
        }
    }
    Ok((times, states, h))
}

/// Family selector for the graph-limit convergence study.
#[derive(Clone, Copy, Debug)]
pub enum GraphLimitFamily {
    /// Dense periodic band: finite systems are the unit band kernels,
    /// the limit is the periodic indicator `chi_{[0,r]}`.
    DensePeriodic { r: f64 },
    /// Sparse path: the limit kernel vanishes, so the reference is the
    /// frozen initial profile.
    Path,
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub distance: f64,
}

/// Sup-in-time `L^2(I)` distance between the `N`-agent distribution and the
/// limit-equation reference for each `N` in `n_list`.
pub fn graph_limit_convergence(
    family: GraphLimitFamily,
    n_list: &[usize],
    m_quad: usize,
    profile: &Profile,
    horizon: f64,
    dt: f64,
) -> Result<Vec<ConvergenceRow>> {
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    if n_max == 0 {
        return Err(Error::InsufficientData("empty size list"));
    }
    if m_quad < 4 * n_max {
        return Err(Error::InvalidSize {
            what: "reference resolution m_quad (needs >= 4 max N)",
            min: 4 * n_max,
            got: m_quad,
        });
    }
    for &n in n_list {
        if !m_quad.is_multiple_of(n) {
            return Err(Error::InvalidSize {
                what: "reference resolution m_quad (must be a multiple of every N)",
                min: n,
                got: m_quad,
            });
        }
    }

    let reference: Option<DistributionField<f64>> = match family {
        GraphLimitFamily::DensePeriodic { r } => {
            let kernel = Kernel::<f64>::indicator_band(r);
            let g = profile.cell_averages(m_quad);
            Some(solve_nonlocal_diffusion(&kernel, &g, horizon, dt, Psi::Identity)?)
        }
        GraphLimitFamily::Path => None,
    };

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let g = profile.cell_averages(n);
        let field = match family {
            GraphLimitFamily::DensePeriodic { r } => {
                let kernel = Kernel::<f64>::band_step(n, r)?;
                solve_nonlocal_diffusion(&kernel, &g, horizon, dt, Psi::Identity)?
            }
            GraphLimitFamily::Path => {
                let model = crate::network::build_path::<f64>(n, false)?;
                let kernel = Kernel::from_model(&model)?;
                solve_nonlocal_diffusion(&kernel, &g, horizon, dt, Psi::Identity)?
            }
        };
        let distance = match &reference {
            Some(refer) => super::sup_l2_distance(&field, refer)?,
            None => {
                // sparse family: compare against the frozen initial profile
                let frozen = DistributionField {
                    n_cells: n,
                    times: field.times.clone(),
                    values: vec![g.clone(); field.times.len()],
                    dt: field.dt,
                };
                super::sup_l2_distance(&field, &frozen)?
            }
        };
        rows.push(ConvergenceRow { n, distance });
    }
    Ok(rows)
}
