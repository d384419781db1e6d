//! Continuum limits of the finite consensus models: the graph-limit
//! distribution and its non-local diffusion equation, the empirical-measure
//! view with Wasserstein-1 convergence, and the weak-form subordination
//! checks that bridge the two.

mod kernel;
mod measure;
mod nonlocal;
mod residual;

pub use kernel::{l2_distance_sq_to_indicator_band, periodic_distance, Kernel};
pub use measure::{meanfield_convergence, to_empirical, wasserstein1, EmpiricalMeasure};
pub use nonlocal::{
    graph_limit_convergence, solve_nonlocal_diffusion, ConvergenceRow, GraphLimitFamily, Psi,
};
pub use residual::{second_order_weak_residual, subordination_residual, ResidualTable};

use crate::csvio::{fmt_float, CsvTable};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Piecewise-constant opinion distribution `x^N(s, t)` on the cells
/// `I_i = [(i-1)/N, i/N)` over a uniform time grid.
#[derive(Clone, Debug)]
pub struct DistributionField<T> {
    pub n_cells: usize,
    pub times: Vec<T>,
    /// One row per time, `n_cells` values each.
    pub values: Vec<Vec<T>>,
    pub dt: T,
}

impl<T: Scalar> DistributionField<T> {
    /// Squared `L^2(I)` norm at time index `m`: `(1/N) sum x_i^2`.
    pub fn l2_norm_sq(&self, m: usize) -> T {
        let row = &self.values[m];
        row.iter().map(|&v| v * v).sum::<T>() / T::of_usize(self.n_cells)
    }

    /// Piecewise-constant refinement onto `m_fine` cells (`m_fine` must be a
    /// multiple of the current cell count).
    pub fn refine_row(&self, m: usize, m_fine: usize) -> Result<Vec<T>> {
        if !m_fine.is_multiple_of(self.n_cells) {
            return Err(Error::InvalidSize {
                what: "refinement target (must be a multiple of the cell count)",
                min: self.n_cells,
                got: m_fine,
            });
        }
        let k = m_fine / self.n_cells;
        let mut out = Vec::with_capacity(m_fine);
        for &v in &self.values[m] {
            for _ in 0..k {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Snapshot CSV `(s_mid, value)` at time index `m`.
    pub fn snapshot_csv(&self, m: usize) -> String {
        let mut t = CsvTable::new(&["s_mid", "value"]);
        for (i, &v) in self.values[m].iter().enumerate() {
            let s = (i as f64 + 0.5) / self.n_cells as f64;
            t.push_row(vec![fmt_float(s), fmt_float(v.to_f64_lossy())]);
        }
        t.render()
    }

    /// Full space-time CSV `(t, s_mid, value)`.
    pub fn surface_csv(&self) -> String {
        let mut t = CsvTable::new(&["t", "s_mid", "value"]);
        for (m, row) in self.values.iter().enumerate() {
            let time = self.times[m].to_f64_lossy();
            for (i, &v) in row.iter().enumerate() {
                let s = (i as f64 + 0.5) / self.n_cells as f64;
                t.push_row(vec![fmt_float(time), fmt_float(s), fmt_float(v.to_f64_lossy())]);
            }
        }
        t.render()
    }
}

/// Embeds a scalar-opinion trajectory as the piecewise-constant field
/// `x^N(s, t)`; cell `i` at time `t_m` carries agent `i`'s state exactly.
pub fn to_distribution<T: Scalar>(traj: &Trajectory<T>) -> Result<DistributionField<T>> {
    if traj.dim != 1 {
        return Err(Error::UnsupportedDimension {
            expected: 1,
            got: traj.dim,
        });
    }
    Ok(DistributionField {
        n_cells: traj.n_agents,
        times: traj.times.clone(),
        values: traj.states.clone(),
        dt: traj.dt,
    })
}

/// Sup over the common time grid of the `L^2(I)` distance between two
/// fields; the coarser one is refined piecewise-constantly.
pub fn sup_l2_distance<T: Scalar>(
    a: &DistributionField<T>,
    b: &DistributionField<T>,
) -> Result<f64> {
    if a.times.len() != b.times.len() {
        return Err(Error::InvalidSize {
            what: "field comparison (time grids must match)",
            min: a.times.len(),
            got: b.times.len(),
        });
    }
    let m_fine = a.n_cells.max(b.n_cells);
    let mut worst = 0.0f64;
    for m in 0..a.times.len() {
        let ra = a.refine_row(m, m_fine)?;
        let rb = b.refine_row(m, m_fine)?;
        let mut acc = T::zero();
        for (x, y) in ra.iter().zip(&rb) {
            let d = *x - *y;
            acc += d * d;
        }
        let dist = (acc / T::of_usize(m_fine)).sqrt().to_f64_lossy();
        worst = worst.max(dist);
    }
    Ok(worst)
}
