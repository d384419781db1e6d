//! Initial-data profiles on `I = [0, 1]`.
//!
//! Deterministic profiles are sampled as exact cell averages (closed-form
//! antiderivatives), which keeps the L2 convergence hypotheses of the graph
//! limit clean. Random data always takes an explicit seed.

use crate::rng::SplitMix64;

/// Named initial profile `g : I -> R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `g(s) = sin(2 pi s)`
    Sin,
    /// `g(s) = s`
    Linear,
    /// `g(s) = c`
    Constant(f64),
    /// Uniform-in-range values drawn per cell from a seeded generator.
    SeededUniform { lo: f64, hi: f64, seed: u64 },
}

impl Profile {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            Profile::Sin => (2.0 * std::f64::consts::PI * s).sin(),
            Profile::Linear => s,
            Profile::Constant(c) => *c,
            Profile::SeededUniform { .. } => {
                panic!("seeded profile has no pointwise values; use cell_averages")
            }
        }
    }

    /// Exact averages over the cells `[(i-1)/n, i/n)`.
    pub fn cell_averages(&self, n: usize) -> Vec<f64> {
        match self {
            Profile::Sin => (0..n)
                .map(|i| {
                    let a = i as f64 / n as f64;
                    let b = (i + 1) as f64 / n as f64;
                    let tau = 2.0 * std::f64::consts::PI;
                    ((tau * a).cos() - (tau * b).cos()) / (tau * (b - a))
                })
                .collect(),
            Profile::Linear => (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect(),
            Profile::Constant(c) => vec![*c; n],
            Profile::SeededUniform { lo, hi, seed } => {
                SplitMix64::new(*seed).uniform_vec(n, *lo, *hi)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Sin => "sin".into(),
            Profile::Linear => "linear".into(),
            Profile::Constant(c) => format!("const{c}"),
            Profile::SeededUniform { seed, .. } => format!("seeded{seed}"),
        }
    }
}
