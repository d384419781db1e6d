//! Weak-form residuals of the subordination identities: the first-order
//! transport equation obtained by averaging the non-local diffusion
//! dynamics, and the kinetic equation obtained from the second-order model.
//! Time derivatives use centered differences at interior grid times only.

use super::DistributionField;
use crate::dynamics::{InfluenceFunction, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Residuals of one test function over the interior time grid.
#[derive(Clone, Debug)]
pub struct ResidualTable {
    /// `(p, q)` for monomials `x^p v^q`; first-order tables carry `q = 0`.
    pub degree: (u32, u32),
    pub rows: Vec<(f64, f64)>,
    pub max_residual: f64,
}

/// Residual of the subordinated non-local transport equation for the test
/// functions `phi(x) = x^p`:
/// `R_p(t) = | d/dt int phi(x(s,t)) ds + int V[mu](x(s,t)) phi'(x(s,t)) ds |`
/// with `V[mu](x) = int a(|x(s*,t) - x|)(x - x(s*,t)) ds*`.
///
/// `dt_fd` must be an integer multiple of the field's grid spacing; the
/// centered difference uses that stride, and endpoints are excluded.
pub fn subordination_residual<T: Scalar>(
    field: &DistributionField<T>,
    a: InfluenceFunction,
    degrees: &[u32],
    dt_fd: f64,
) -> Result<Vec<ResidualTable>> {
    if degrees.contains(&0) {
        return Err(Error::DegenerateTest(
            "phi(x) = 1 makes both sides vanish identically",
        ));
    }
    let stride = stride_for(field.dt.to_f64_lossy(), dt_fd)?;
    let m = field.n_cells;
    let inv_m = T::one() / T::of_usize(m);
    let steps = field.times.len();
    if steps < 2 * stride + 1 {
        return Err(Error::InsufficientData(
            "field too short for centered differences",
        ));
    }

    let mut tables = Vec::with_capacity(degrees.len());
    for &p in degrees {
        // phi moments at all times
        let phi_mean: Vec<T> = field
            .values
            .iter()
            .map(|row| row.iter().map(|&x| x.powi(p as i32)).sum::<T>() * inv_m)
            .collect();
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for k in (stride..steps - stride).step_by(stride) {
            let row = &field.values[k];
            // transport term: (1/m^2) sum_i sum_j a(|x_j - x_i|)(x_i - x_j) phi'(x_i)
            let mut transport = T::zero();
            for &xi in row.iter() {
                let mut v = T::zero();
                for &xj in row.iter() {
                    let diff = xi - xj;
                    v += a.eval(diff.abs()) * diff;
                }
                v *= inv_m;
                let dphi = T::of_usize(p as usize) * xi.powi(p as i32 - 1);
                transport += v * dphi;
            }
            transport *= inv_m;
            let ddt = (phi_mean[k + stride] - phi_mean[k - stride])
                / (T::of(2.0) * field.dt * T::of_usize(stride));
            let r = (ddt + transport).abs().to_f64_lossy();
            worst = worst.max(r);
            rows.push((field.times[k].to_f64_lossy(), r));
        }
        tables.push(ResidualTable {
            degree: (p, 0),
            rows,
            max_residual: worst,
        });
    }
    Ok(tables)
}

/// Residual of the kinetic weak form for the second-order model with test
/// functions `phi(x, v) = x^p v^q`:
/// `R(t) = | d/dt <phi> - <v dphi/dx> + <F dphi/dv> |` with
/// `F(x, v) = int [a(|x* - x|)(x - x*)] dmu(x*) + v`.
pub fn second_order_weak_residual<T: Scalar>(
    traj: &Trajectory<T>,
    a: InfluenceFunction,
    degrees: &[(u32, u32)],
    dt_fd: f64,
) -> Result<Vec<ResidualTable>> {
    let vels = traj.velocities.as_ref().ok_or(Error::MissingVelocities)?;
    if traj.dim != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            got: traj.dim,
        });
    }
    if degrees.iter().any(|&(p, q)| p + q == 0 || p + q > 3) {
        return Err(Error::DegenerateTest(
            "test degrees must satisfy 1 <= p + q <= 3",
        ));
    }
    let stride = stride_for(traj.dt.to_f64_lossy(), dt_fd)?;
    let n = traj.n_agents;
    let inv_n = T::one() / T::of_usize(n);
    let steps = traj.times.len();
    if steps < 2 * stride + 1 {
        return Err(Error::InsufficientData(
            "trajectory too short for centered differences",
        ));
    }

    let monomial = |x: T, v: T, p: u32, q: u32| -> T { x.powi(p as i32) * v.powi(q as i32) };

    let mut tables = Vec::with_capacity(degrees.len());
    for &(p, q) in degrees {
        let phi_mean: Vec<T> = (0..steps)
            .map(|k| {
                traj.states[k]
                    .iter()
                    .zip(&vels[k])
                    .map(|(&x, &v)| monomial(x, v, p, q))
                    .sum::<T>()
                    * inv_n
            })
            .collect();
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for k in (stride..steps - stride).step_by(stride) {
            let xs = &traj.states[k];
            let vs = &vels[k];
            let mut flux = T::zero(); // <v dphi/dx>
            let mut force = T::zero(); // <F dphi/dv>
            for i in 0..n {
                let (x, v) = (xs[i], vs[i]);
                if p > 0 {
                    let dx = T::of_usize(p as usize) * x.powi(p as i32 - 1) * v.powi(q as i32);
                    flux += v * dx;
                }
                if q > 0 {
                    let mut f = v;
                    for &xj in xs.iter() {
                        let diff = x - xj;
                        f += a.eval(diff.abs()) * diff * inv_n;
                    }
                    let dv = T::of_usize(q as usize) * x.powi(p as i32) * v.powi(q as i32 - 1);
                    force += f * dv;
                }
            }
            flux *= inv_n;
            force *= inv_n;
            let ddt = (phi_mean[k + stride] - phi_mean[k - stride])
                / (T::of(2.0) * traj.dt * T::of_usize(stride));
            let r = (ddt - flux + force).abs().to_f64_lossy();
            worst = worst.max(r);
            rows.push((traj.times[k].to_f64_lossy(), r));
        }
        tables.push(ResidualTable {
            degree: (p, q),
            rows,
            max_residual: worst,
        });
    }
    Ok(tables)
}

fn stride_for(dt_grid: f64, dt_fd: f64) -> Result<usize> {
    if dt_fd <= 0.0 {
        return Err(Error::OutOfRange {
            what: "finite-difference step dt_fd",
            value: dt_fd,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let ratio = dt_fd / dt_grid;
    let stride = ratio.round();
    if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::OutOfRange {
            what: "dt_fd (must be an integer multiple of the stored grid step)",
            value: dt_fd,
            lo: dt_grid,
            hi: f64::INFINITY,
        });
    }
    Ok(stride as usize)
}
