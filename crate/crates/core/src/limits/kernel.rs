//! Interaction kernels `W(s, s*)` on the unit square.
//!
//! Step kernels carry the finite networks into the graph-limit machinery;
//! the indicator band `chi_{[0,r]}` (periodic distance, matching the
//! circulant networks) is the limit kernel of the dense periodic family.
//! The singular fractional power kernel exists as a value but is excluded
//! from the Nystrom solver.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::network::{round_half_away, NetworkModel};
use crate::scalar::Scalar;

/// Periodic distance on `[0, 1)`.
pub fn periodic_distance(s: f64, s_star: f64) -> f64 {
    let u = (s - s_star).abs();
    u.min(1.0 - u)
}

#[derive(Clone, Debug)]
pub enum Kernel<T> {
    /// Piecewise-constant on the `n x n` cell grid; value on `I_i x I_j` is
    /// `values[(i, j)]`.
    Step { n: usize, values: Mat<T> },
    /// `chi_{[0, r]}(per_dist(s, s*))` with wraparound distance.
    IndicatorBand { r: f64 },
    /// `c |s - s*|^{-1-2a}`; singular on the diagonal.
    FractionalPower { alpha: f64, c: f64 },
}

impl<T: Scalar> Kernel<T> {
    /// Step kernel of a network model: the (negated off-diagonal)
    /// interaction weights `a_ij = -L_ij`, zero on the diagonal cells.
    /// PDE-scaled models are rejected; their kernels diverge with `N`.
    pub fn from_model(model: &NetworkModel<T>) -> Result<Self> {
        if model.scaled() {
            return Err(Error::ScalingMismatch);
        }
        let n = model.n_agents();
        let values = Mat::from_fn(n, n, |i, j| model.interaction_weight(i, j));
        Ok(Kernel::Step { n, values })
    }

    /// The unit-weight band kernel of the periodic dense network: 1 at
    /// circular cell distances `1..[rN]`, 0 elsewhere. This is the kernel
    /// whose `L^2` distance to `chi_{[0,r]}` obeys the `4/N` bound.
    pub fn band_step(n: usize, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize {
                what: "band kernel",
                min: 2,
                got: n,
            });
        }
        if !(0.0..=0.5).contains(&r) {
            return Err(Error::OutOfRange {
                what: "band radius r",
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
        let values = Mat::from_fn(n, n, |i, j| {
            let d = (i + n - j) % n;
            let cd = d.min(n - d);
            if cd >= 1 && cd <= ell {
                T::one()
            } else {
                T::zero()
            }
        });
        Ok(Kernel::Step { n, values })
    }

    pub fn indicator_band(r: f64) -> Self {
        Kernel::IndicatorBand { r }
    }

    /// Pointwise evaluation.
    pub fn eval(&self, s: f64, s_star: f64) -> T {
        match self {
            Kernel::Step { n, values } => {
                let i = ((s * *n as f64).floor() as usize).min(n - 1);
                let j = ((s_star * *n as f64).floor() as usize).min(n - 1);
                values[(i, j)]
            }
            Kernel::IndicatorBand { r } => {
                if periodic_distance(s, s_star) <= *r {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Kernel::FractionalPower { alpha, c } => {
                let d = (s - s_star).abs();
                T::of(*c) * T::of(d).powf(T::of(-1.0 - 2.0 * alpha))
            }
        }
    }

    /// `int int W(s, s*)^2 ds ds*` for step kernels.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        match self {
            Kernel::Step { n, values } => {
                let mut acc = 0.0;
                for i in 0..*n {
                    for j in 0..*n {
                        let v = values[(i, j)].to_f64_lossy();
                        acc += v * v;
                    }
                }
                Ok(acc / (*n as f64 * *n as f64))
            }
            _ => Err(Error::UnsupportedKernel("L2 norm implemented for step kernels")),
        }
    }
}

/// Area of `{(x, y) in [0,h]^2 : y - x <= v}`.
fn half_plane_area(v: f64, h: f64) -> f64 {
    if v <= -h {
        0.0
    } else if v <= 0.0 {
        (h + v) * (h + v) / 2.0
    } else if v <= h {
        h * h - (h - v) * (h - v) / 2.0
    } else {
        h * h
    }
}

/// Exact area of `{(s, s*) in I_0 x I_d : per_dist(s, s*) <= r}` for the
/// cell pair at offset `d` (the quantity only depends on `(j - i) mod n`).
fn indicator_cell_area(d: usize, n: usize, r: f64) -> f64 {
    let h = 1.0 / n as f64;
    let a = d as f64 * h;
    // u = s* - s ranges over [a - h, a + h]; chi = 1 when |u| <= r or
    // u >= 1 - r (u <= r - 1 cannot occur for u > -h)
    let band = half_plane_area(r - a, h) - half_plane_area(-r - a, h);
    let wrap = h * h - half_plane_area((1.0 - r) - a, h);
    band + wrap
}

/// Exact `int int (W - chi_{[0,r]})^2` between a step kernel and the
/// periodic indicator band. Both factors are indicators on cell-aligned or
/// diagonal-band regions, so the integral decomposes into closed-form cell
/// areas; no quadrature error enters.
pub fn l2_distance_sq_to_indicator_band<T: Scalar>(kernel: &Kernel<T>, r: f64) -> Result<f64> {
    let (n, values) = match kernel {
        Kernel::Step { n, values } => (*n, values),
        _ => return Err(Error::UnsupportedKernel("distance defined for step kernels")),
    };
    let h = 1.0 / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = (j + n - i) % n;
            let w = values[(i, j)].to_f64_lossy();
            let a_chi = indicator_cell_area(d, n, r);
            // integral over the cell of (w - chi)^2 with chi an indicator:
            // chi=1 on area a_chi: (w-1)^2 a_chi + w^2 (h^2 - a_chi)
            total += (w - 1.0) * (w - 1.0) * a_chi + w * w * (h * h - a_chi);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_dense_periodic, build_path};
    use crate::rng::SplitMix64;

    #[test]
    fn path_kernel_l2_norm_matches_count() {
        for n in [3usize, 8, 50] {
            let model = build_path::<f64>(n, false).unwrap();
            let k = Kernel::from_model(&model).unwrap();
            let expect = 2.0 * (n as f64 - 1.0) / (n as f64 * n as f64);
            assert!((k.l2_norm_sq().unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn scaled_model_rejected() {
        let model = build_path::<f64>(4, true).unwrap();
        assert!(matches!(
            Kernel::from_model(&model),
            Err(Error::ScalingMismatch)
        ));
    }

    #[test]
    fn band_step_two_cells_everything_off_diagonal() {
        let k = Kernel::<f64>::band_step(2, 0.5).unwrap();
        assert_eq!(k.eval(0.25, 0.75), 1.0);
        assert_eq!(k.eval(0.75, 0.25), 1.0);
        assert_eq!(k.eval(0.25, 0.25), 0.0);
        assert_eq!(k.eval(0.75, 0.75), 0.0);
    }

    #[test]
    fn kernel_symmetry() {
        let k = Kernel::<f64>::band_step(9, 0.3).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..200 {
            let s = rng.next_f64();
            let t = rng.next_f64();
            assert_eq!(k.eval(s, t), k.eval(t, s));
        }
        let ind = Kernel::<f64>::indicator_band(0.2);
        for _ in 0..200 {
            let s = rng.next_f64();
            let t = rng.next_f64();
            assert_eq!(ind.eval(s, t), ind.eval(t, s));
        }
    }

    #[test]
    fn exact_distance_agrees_with_fine_midpoint_quadrature() {
        let n = 16;
        let r = 0.25;
        let k = Kernel::<f64>::band_step(n, r).unwrap();
        let exact = l2_distance_sq_to_indicator_band(&k, r).unwrap();
        // midpoint oracle on a fine grid
        let m = 1024;
        let mut acc = 0.0;
        for i in 0..m {
            let s = (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let t = (j as f64 + 0.5) / m as f64;
                let chi = if periodic_distance(s, t) <= r { 1.0 } else { 0.0 };
                let d = k.eval(s, t) - chi;
                acc += d * d;
            }
        }
        let quad = acc / (m as f64 * m as f64);
        assert!(
            (exact - quad).abs() < 2e-3,
            "exact {exact} vs midpoint {quad}"
        );
    }

    #[test]
    fn kernel_bound_holds_for_sample_sizes() {
        for n in [8usize, 32, 100] {
            let k = Kernel::<f64>::band_step(n, 0.25).unwrap();
            let d = l2_distance_sq_to_indicator_band(&k, 0.25).unwrap();
            assert!(d <= 4.0 / n as f64, "n={n}: {d} > {}", 4.0 / n as f64);
        }
    }

    #[test]
    fn model_kernel_values_are_interaction_weights() {
        let model = build_dense_periodic::<f64>(8, 0.25, false).unwrap();
        let k = Kernel::from_model(&model).unwrap();
        // ell = 2: weight 1/2 on the band
        assert_eq!(k.eval(0.05, 0.2), 0.5);
        assert_eq!(k.eval(0.05, 0.55), 0.0);
        assert_eq!(k.eval(0.05, 0.05), 0.0);
    }
}
