//! Time integration of the consensus models: first-order linear networked
//! dynamics (optionally controlled), the first-order nonlinear alignment
//! model, and the second-order damped model. All integrators are classical
//! fixed-step RK4 with an explicit-scheme stability guard on the step size.

use crate::csvio::{fmt_float, CsvTable};
use crate::error::{Error, Result};
use crate::linalg::{mean, norm2};
use crate::network::{ControlPattern, NetworkModel};
use crate::scalar::Scalar;

/// Hard cap on stored integration steps.
const MAX_STEPS: usize = 2_000_000;
/// Hard cap on stored state entries (memory guard).
const MAX_STORAGE: usize = 100_000_000;

/// Influence function `a : R+ -> R+` of the alignment model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InfluenceFunction {
    /// `a(s) = v`
    Constant(f64),
    /// `a(s) = (1 + s^2)^{-beta}`
    RationalDecay { beta: f64 },
    /// `a(s) = 1` for `s <= radius`, `0` beyond
    Indicator { radius: f64 },
}

impl InfluenceFunction {
    pub fn eval<T: Scalar>(&self, s: T) -> T {
        match *self {
            InfluenceFunction::Constant(v) => T::of(v),
            InfluenceFunction::RationalDecay { beta } => {
                (T::one() + s * s).powf(T::of(-beta))
            }
            InfluenceFunction::Indicator { radius } => {
                if s <= T::of(radius) {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Supremum of `a`, used by the step-size guard.
    pub fn sup(&self) -> f64 {
        match *self {
            InfluenceFunction::Constant(v) => v,
            InfluenceFunction::RationalDecay { .. } => 1.0,
            InfluenceFunction::Indicator { .. } => 1.0,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            InfluenceFunction::Constant(v) => format!("const{v}"),
            InfluenceFunction::RationalDecay { beta } => format!("rational{beta}"),
            InfluenceFunction::Indicator { radius } => format!("indicator{radius}"),
        }
    }
}

/// Control input evaluated along the integration.
pub enum ControlSignal<'a, T> {
    /// Continuous-time closure; evaluated at RK4 stage times.
    Func(&'a dyn Fn(T) -> Vec<T>),
    /// Samples on a uniform grid from `t = 0` with spacing `dt`; linear
    /// interpolation in between. Must cover the integration horizon.
    Sampled { dt: T, values: &'a [Vec<T>] },
}

impl<T: Scalar> ControlSignal<'_, T> {
    fn check_domain(&self, horizon: T) -> Result<()> {
        match self {
            ControlSignal::Func(_) => Ok(()),
            ControlSignal::Sampled { dt, values } => {
                let have = *dt * T::of_usize(values.len().saturating_sub(1));
                if have + T::of(1e-12) < horizon {
                    Err(Error::SignalDomain {
                        have: have.to_f64_lossy(),
                        need: horizon.to_f64_lossy(),
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    fn eval(&self, t: T) -> Vec<T> {
        match self {
            ControlSignal::Func(f) => f(t),
            ControlSignal::Sampled { dt, values } => {
                let pos = (t / *dt).to_f64_lossy();
                let idx = pos.floor().max(0.0) as usize;
                if idx + 1 >= values.len() {
                    return values.last().expect("nonempty signal").clone();
                }
                let frac = T::of(pos - pos.floor());
                values[idx]
                    .iter()
                    .zip(&values[idx + 1])
                    .map(|(&a, &b)| a + frac * (b - a))
                    .collect()
            }
        }
    }
}

/// A fixed-step trajectory: uniform time grid, one flattened state row per
/// step (agent-major layout for opinion dimension `d >= 1`), and velocities
/// for second-order runs.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub velocities: Option<Vec<Vec<T>>>,
    pub dt: T,
    pub n_agents: usize,
    pub dim: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn n_steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn state(&self, m: usize) -> &[T] {
        &self.states[m]
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("nonempty trajectory")
    }

    /// Per-coordinate mean opinion at step `m`.
    pub fn mean_at(&self, m: usize) -> Vec<T> {
        per_coordinate_mean(&self.states[m], self.n_agents, self.dim)
    }

    /// CSV with header `time,x_1,...,x_n` (plus `v_i` columns when present);
    /// multi-dimensional opinions emit `x_i_c` per coordinate.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["time".to_string()];
        let label = |base: &str, i: usize, c: usize| {
            if self.dim == 1 {
                format!("{base}_{}", i + 1)
            } else {
                format!("{base}_{}_{}", i + 1, c + 1)
            }
        };
        for i in 0..self.n_agents {
            for c in 0..self.dim {
                header.push(label("x", i, c));
            }
        }
        if self.velocities.is_some() {
            for i in 0..self.n_agents {
                for c in 0..self.dim {
                    header.push(label("v", i, c));
                }
            }
        }
        let refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        let mut t = CsvTable::new(&refs);
        for m in 0..self.times.len() {
            let mut row = vec![fmt_float(self.times[m].to_f64_lossy())];
            row.extend(self.states[m].iter().map(|v| fmt_float(v.to_f64_lossy())));
            if let Some(vels) = &self.velocities {
                row.extend(vels[m].iter().map(|v| fmt_float(v.to_f64_lossy())));
            }
            t.push_row(row);
        }
        t.render()
    }
}

fn per_coordinate_mean<T: Scalar>(state: &[T], n: usize, d: usize) -> Vec<T> {
    let mut out = vec![T::zero(); d];
    for i in 0..n {
        for (c, o) in out.iter_mut().enumerate() {
            *o += state[i * d + c];
        }
    }
    for o in out.iter_mut() {
        *o /= T::of_usize(n);
    }
    out
}

/// Chooses the effective step: the requested `dt` shrunk to the stability
/// bound when necessary, then snapped so an integer number of steps lands
/// exactly on the horizon.
fn plan_steps<T: Scalar>(horizon: T, dt: T, dt_stable: T, n_state: usize) -> Result<(usize, T)> {
    if horizon <= T::zero() {
        return Err(Error::OutOfRange {
            what: "horizon T",
            value: horizon.to_f64_lossy(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if dt <= T::zero() {
        return Err(Error::OutOfRange {
            what: "time step dt",
            value: dt.to_f64_lossy(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let dt_eff = if dt > dt_stable { dt_stable } else { dt };
    let steps_f = (horizon / dt_eff).to_f64_lossy();
    let steps = steps_f.ceil().max(1.0) as usize;
    if steps > MAX_STEPS || steps.saturating_mul(n_state) > MAX_STORAGE {
        return Err(Error::StepSize {
            requested: dt.to_f64_lossy(),
            needed: dt_stable.to_f64_lossy(),
        });
    }
    Ok((steps, horizon / T::of_usize(steps)))
}

/// RK4 driver storing every step; `rhs(t, x)` returns the derivative.
fn rk4<T: Scalar>(
    x0: &[T],
    horizon: T,
    dt: T,
    dt_stable: T,
    rhs: impl Fn(T, &[T]) -> Vec<T>,
) -> Result<(Vec<T>, Vec<Vec<T>>, T)> {
    let (steps, h) = plan_steps(horizon, dt, dt_stable, x0.len())?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    states.push(x0.to_vec());
    let half = h / T::of(2.0);
    let sixth = h / T::of(6.0);
    let mut x = x0.to_vec();
    for m in 0..steps {
        let t = h * T::of_usize(m);
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
        times.push(h * T::of_usize(m + 1));
        states.push(x.clone());
    }
    for row in &states {
        for v in row {
            if !v.is_finite() {
                return Err(Error::NumericalFailure(
                    "non-finite state during integration".into(),
                ));
            }
        }
    }
    Ok((times, states, h))
}

/// Integrates `x' = -L x + B u(t)`. Opinion dimension `d` is inferred from
/// `x0.len() / n_agents`; controls require `d = 1`.
pub fn simulate_linear<T: Scalar>(
    model: &NetworkModel<T>,
    x0: &[T],
    horizon: T,
    dt: T,
    control: Option<(&ControlPattern<T>, &ControlSignal<T>)>,
) -> Result<Trajectory<T>> {
    let n = model.n_agents();
    if x0.is_empty() || !x0.len().is_multiple_of(n) {
        return Err(Error::UnsupportedDimension {
            expected: n,
            got: x0.len(),
        });
    }
    let d = x0.len() / n;
    if control.is_some() && d != 1 {
        return Err(Error::UnsupportedDimension { expected: 1, got: d });
    }
    if let Some((_, signal)) = control {
        signal.check_domain(horizon)?;
    }
    let lap = model.laplacian();
    let dt_stable = T::of(1.8) / lap.gershgorin_bound().max(T::of(1e-300));
    let rhs = |t: T, x: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); x.len()];
        if d == 1 {
            let lx = lap.matvec(x);
            for (o, v) in out.iter_mut().zip(lx) {
                *o = -v;
            }
        } else {
            // apply L to each coordinate slice
            for c in 0..d {
                let slice: Vec<T> = (0..n).map(|i| x[i * d + c]).collect();
                let lx = lap.matvec(&slice);
                for (i, v) in lx.into_iter().enumerate() {
                    out[i * d + c] = -v;
                }
            }
        }
        if let Some((pattern, signal)) = control {
            let u = signal.eval(t);
            let bu = pattern.apply(&u);
            for (o, v) in out.iter_mut().zip(bu) {
                *o += v;
            }
        }
        out
    };
    let (times, states, h) = rk4(x0, horizon, dt, dt_stable, rhs)?;
    Ok(Trajectory {
        times,
        states,
        velocities: None,
        dt: h,
        n_agents: n,
        dim: d,
    })
}

fn alignment_rhs<T: Scalar>(n: usize, d: usize, a: &InfluenceFunction, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    let inv_n = T::one() / T::of_usize(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut dist2 = T::zero();
            for c in 0..d {
                let diff = x[j * d + c] - x[i * d + c];
                dist2 += diff * diff;
            }
            let w = a.eval(dist2.sqrt()) * inv_n;
            for c in 0..d {
                out[i * d + c] += w * (x[j * d + c] - x[i * d + c]);
            }
        }
    }
    out
}

/// Integrates the alignment model
/// `x_i' = (1/N) sum_j a(|x_j - x_i|)(x_j - x_i)`.
pub fn simulate_alignment<T: Scalar>(
    n: usize,
    a: InfluenceFunction,
    x0: &[T],
    horizon: T,
    dt: T,
) -> Result<Trajectory<T>> {
    if n == 0 || x0.is_empty() || !x0.len().is_multiple_of(n) {
        return Err(Error::UnsupportedDimension {
            expected: n.max(1),
            got: x0.len(),
        });
    }
    let d = x0.len() / n;
    let dt_stable = T::of(1.8 / (2.0 * a.sup().max(1e-300)));
    let (times, states, h) = rk4(x0, horizon, dt, dt_stable, |_t, x| {
        alignment_rhs(n, d, &a, x)
    })?;
    Ok(Trajectory {
        times,
        states,
        velocities: None,
        dt: h,
        n_agents: n,
        dim: d,
    })
}

/// Right-hand side selection for the second-order damped model.
pub enum SecondOrderModel<'a, T> {
    /// `x_i'' + x_i' = (1/N) sum_j a_ij (x_j - x_i)`, i.e. `-(1/N) L x`.
    Networked(&'a NetworkModel<T>),
    /// `x_i'' + x_i' = (1/N) sum_j a(|x_j - x_i|)(x_j - x_i)`.
    Alignment {
        n_agents: usize,
        influence: InfluenceFunction,
    },
}

/// Integrates the second-order damped consensus model; the trajectory
/// carries both positions and velocities.
pub fn simulate_second_order<T: Scalar>(
    model: &SecondOrderModel<T>,
    x0: &[T],
    v0: &[T],
    horizon: T,
    dt: T,
) -> Result<Trajectory<T>> {
    let n = match model {
        SecondOrderModel::Networked(m) => m.n_agents(),
        SecondOrderModel::Alignment { n_agents, .. } => *n_agents,
    };
    if x0.len() != v0.len() || x0.is_empty() || !x0.len().is_multiple_of(n) {
        return Err(Error::UnsupportedDimension {
            expected: n,
            got: x0.len(),
        });
    }
    let d = x0.len() / n;
    let nd = x0.len();
    let coupling_bound = match model {
        SecondOrderModel::Networked(m) => {
            (m.laplacian().gershgorin_bound() / T::of_usize(n)).to_f64_lossy()
        }
        SecondOrderModel::Alignment { influence, .. } => 2.0 * influence.sup(),
    };
    let dt_stable = T::of(1.8 / (1.0 + coupling_bound.max(0.0).sqrt()));
    let inv_n = T::one() / T::of_usize(n);

    let mut z0 = Vec::with_capacity(2 * nd);
    z0.extend_from_slice(x0);
    z0.extend_from_slice(v0);
    let rhs = |_t: T, z: &[T]| -> Vec<T> {
        let (x, v) = z.split_at(nd);
        let mut out = vec![T::zero(); 2 * nd];
        out[..nd].copy_from_slice(v);
        let coupling = match model {
            SecondOrderModel::Networked(m) => {
                let mut c = vec![T::zero(); nd];
                if d == 1 {
                    let lx = m.laplacian().matvec(x);
                    for (ci, li) in c.iter_mut().zip(lx) {
                        *ci = -(li * inv_n);
                    }
                } else {
                    for cc in 0..d {
                        let slice: Vec<T> = (0..n).map(|i| x[i * d + cc]).collect();
                        let lx = m.laplacian().matvec(&slice);
                        for (i, li) in lx.into_iter().enumerate() {
                            c[i * d + cc] = -(li * inv_n);
                        }
                    }
                }
                c
            }
            SecondOrderModel::Alignment { influence, .. } => alignment_rhs(n, d, influence, x),
        };
        for i in 0..nd {
            out[nd + i] = -v[i] + coupling[i];
        }
        out
    };
    let (times, zs, h) = rk4(&z0, horizon, dt, dt_stable, rhs)?;
    let mut states = Vec::with_capacity(zs.len());
    let mut velocities = Vec::with_capacity(zs.len());
    for z in zs {
        states.push(z[..nd].to_vec());
        velocities.push(z[nd..].to_vec());
    }
    Ok(Trajectory {
        times,
        states,
        velocities: Some(velocities),
        dt: h,
        n_agents: n,
        dim: d,
    })
}

/// Distance to the consensus subspace `||x - mean(x) 1||_2` at every step.
pub fn disagreement<T: Scalar>(traj: &Trajectory<T>) -> Vec<T> {
    traj.states
        .iter()
        .map(|state| {
            let means = per_coordinate_mean(state, traj.n_agents, traj.dim);
            let centered: Vec<T> = state
                .iter()
                .enumerate()
                .map(|(idx, &v)| v - means[idx % traj.dim])
                .collect();
            norm2(&centered)
        })
        .collect()
}

/// Mean opinion of a flat `d = 1` state.
pub fn state_mean<T: Scalar>(state: &[T]) -> T {
    mean(state)
}
