//! Empirical measures on the opinion axis and the Wasserstein-1 metric,
//! plus the mean-field convergence study for the alignment model.

use super::nonlocal::ConvergenceRow;
use crate::dynamics::{simulate_alignment, InfluenceFunction};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::scalar::Scalar;

/// Weighted atomic measure on the real line; atoms sorted by location,
/// coincident locations merged, weights summing to one.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Scalar> EmpiricalMeasure<T> {
    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> T {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }
}

/// Empirical measure `(1/N) sum delta_{x_i}` of a scalar state.
pub fn to_empirical<T: Scalar>(state: &[T]) -> EmpiricalMeasure<T> {
    let n = state.len();
    let w = T::one() / T::of_usize(n);
    let mut locs: Vec<T> = state.to_vec();
    locs.sort_by(|a, b| a.partial_cmp(b).expect("finite opinions"));
    let mut atoms: Vec<(T, T)> = Vec::new();
    for x in locs {
        match atoms.last_mut() {
            Some((loc, weight)) if *loc == x => *weight += w,
            _ => atoms.push((x, w)),
        }
    }
    EmpiricalMeasure { atoms }
}

/// Wasserstein-1 distance between two atomic measures by exact CDF
/// integration: `int |F_mu - F_nu|` over the merged support grid.
pub fn wasserstein1<T: Scalar>(mu: &EmpiricalMeasure<T>, nu: &EmpiricalMeasure<T>) -> T {
    let mut events: Vec<T> = mu
        .atoms
        .iter()
        .map(|&(x, _)| x)
        .chain(nu.atoms.iter().map(|&(x, _)| x))
        .collect();
    events.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    events.dedup();
    let mut dist = T::zero();
    let mut f_mu = T::zero();
    let mut f_nu = T::zero();
    let mut i_mu = 0;
    let mut i_nu = 0;
    for w in events.windows(2) {
        while i_mu < mu.atoms.len() && mu.atoms[i_mu].0 <= w[0] {
            f_mu += mu.atoms[i_mu].1;
            i_mu += 1;
        }
        while i_nu < nu.atoms.len() && nu.atoms[i_nu].0 <= w[0] {
            f_nu += nu.atoms[i_nu].1;
            i_nu += 1;
        }
        dist += (f_mu - f_nu).abs() * (w[1] - w[0]);
    }
    dist
}

/// Mean-field convergence of the alignment dynamics: sup-in-time `W_1`
/// distance between the `n`-agent empirical measure and a fine reference
/// run at `n_ref >= 8 max(n_list)`, both sampled from the same profile.
pub fn meanfield_convergence(
    a: InfluenceFunction,
    profile: &Profile,
    n_list: &[usize],
    n_ref: usize,
    horizon: f64,
    dt: f64,
) -> Result<Vec<ConvergenceRow>> {
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    if n_max == 0 {
        return Err(Error::InsufficientData("empty size list"));
    }
    if n_ref < 8 * n_max {
        return Err(Error::InvalidSize {
            what: "mean-field reference size (needs >= 8 max N)",
            min: 8 * n_max,
            got: n_ref,
        });
    }
    let g_ref = profile.cell_averages(n_ref);
    let ref_traj = simulate_alignment(n_ref, a, &g_ref, horizon, dt)?;
    let ref_measures: Vec<EmpiricalMeasure<f64>> =
        ref_traj.states.iter().map(|s| to_empirical(s)).collect();

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let g = profile.cell_averages(n);
        let traj = simulate_alignment(n, a, &g, horizon, dt)?;
        if traj.times.len() != ref_traj.times.len() {
            return Err(Error::NumericalFailure(
                "mean-field study requires matching time grids".into(),
            ));
        }
        let mut worst = 0.0f64;
        for (state, reference) in traj.states.iter().zip(&ref_measures) {
            let mu = to_empirical(state);
            worst = worst.max(wasserstein1(&mu, reference));
        }
        rows.push(ConvergenceRow { n, distance: worst });
    }
    Ok(rows)
}
