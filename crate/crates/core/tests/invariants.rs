//! Cross-module invariants: time-rescaling equivalences, the graph-limit
//! pipeline identity, generic-scalar consistency, and the Example 3.1
//! indistinguishability fixture.

use consensus_lab::dd::Dd;
use consensus_lab::dynamics::{simulate_alignment, simulate_linear, InfluenceFunction};
use consensus_lab::limits::{
    solve_nonlocal_diffusion, to_distribution, to_empirical, wasserstein1, Kernel, Psi,
};
use consensus_lab::linalg::{norm2, vsub};
use consensus_lab::network::{build_fractional, build_path, build_dense_periodic};
use consensus_lab::profile::Profile;
use consensus_lab::rng::SplitMix64;
use consensus_lab::scalar::Scalar;

/// Unscaled dynamics over `T` equals scaled dynamics over `T / N^2`.
#[test]
fn path_time_rescaling_equivalence() {
    for n in [4usize, 8, 16] {
        let unscaled = build_path::<f64>(n, false).unwrap();
        let scaled = build_path::<f64>(n, true).unwrap();
        let mut rng = SplitMix64::new(n as u64);
        let x0 = rng.uniform_vec(n, -1.0, 1.0);
        let horizon = 1.0;
        let a = simulate_linear(&unscaled, &x0, horizon, horizon / 2000.0, None).unwrap();
        let h2 = horizon / (n * n) as f64;
        let b = simulate_linear(&scaled, &x0, h2, h2 / 3000.0, None).unwrap();
        let diff = norm2(&vsub(a.final_state(), b.final_state()));
        assert!(diff <= 1e-6, "N={n}: rescaling mismatch {diff:e}");
    }
}

/// Fractional analogue with exponent `2a`.
#[test]
fn fractional_time_rescaling_equivalence() {
    let alpha = 0.75;
    for n in [4usize, 8, 16] {
        let unscaled = build_fractional::<f64>(n, alpha, 1.0, false).unwrap();
        let scaled = build_fractional::<f64>(n, alpha, 1.0, true).unwrap();
        let mut rng = SplitMix64::new(100 + n as u64);
        let x0 = rng.uniform_vec(n, -1.0, 1.0);
        let horizon = 1.0;
        let a = simulate_linear(&unscaled, &x0, horizon, horizon / 2000.0, None).unwrap();
        let h2 = horizon / (n as f64).powf(2.0 * alpha);
        let b = simulate_linear(&scaled, &x0, h2, h2 / 3000.0, None).unwrap();
        let diff = norm2(&vsub(a.final_state(), b.final_state()));
        assert!(diff <= 1e-6, "N={n}: fractional rescaling mismatch {diff:e}");
    }
}

/// The three-agent fixture: identical empirical measures, different flows.
#[test]
fn indistinguishability_of_networked_states() {
    let model = build_path::<f64>(3, false).unwrap();
    let x1 = [1.0, 0.0, -1.0];
    let x2 = [1.0, -1.0, 0.0];
    // exact initial derivatives via the matrix-vector product
    let d1 = model.laplacian().matvec(&x1);
    assert_eq!(d1.iter().map(|v| -v).collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
    let d2 = model.laplacian().matvec(&x2);
    assert_eq!(d2.iter().map(|v| -v).collect::<Vec<_>>(), vec![-2.0, 3.0, -1.0]);
    // same initial empirical measure
    let w0 = wasserstein1(&to_empirical(&x1), &to_empirical(&x2));
    assert_eq!(w0, 0.0);
    // trajectories split apart immediately
    let t1 = simulate_linear(&model, &x1, 0.1, 1e-3, None).unwrap();
    let t2 = simulate_linear(&model, &x2, 0.1, 1e-3, None).unwrap();
    let gap = norm2(&vsub(t1.final_state(), t2.final_state()));
    assert!(gap > 0.01, "trajectories failed to separate: {gap}");
    // and the embedded fields differ while the measures started equal
    let f1 = to_distribution(&t1).unwrap();
    let f2 = to_distribution(&t2).unwrap();
    let field_gap = consensus_lab::limits::sup_l2_distance(&f1, &f2).unwrap();
    assert!(field_gap > 0.005);
}

/// The alignment ODE at `N` agents is the Nystrom discretization of the
/// nonlinear limit equation at `m = N`, exactly.
#[test]
fn alignment_ode_is_nystrom_at_matching_resolution() {
    let n = 24;
    let influence = InfluenceFunction::RationalDecay { beta: 1.0 };
    let g = Profile::Sin.cell_averages(n);
    let horizon = 1.0;
    let dt = 1.0 / 256.0;
    let traj = simulate_alignment(n, influence, &g, horizon, dt).unwrap();
    let kernel = Kernel::<f64>::indicator_band(0.5); // identically one
    let field =
        solve_nonlocal_diffusion(&kernel, &g, horizon, dt, Psi::Alignment(influence)).unwrap();
    assert_eq!(field.values.len(), traj.states.len());
    let mut worst = 0.0f64;
    for (frow, srow) in field.values.iter().zip(&traj.states) {
        for (a, b) in frow.iter().zip(srow) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-9, "alignment pipeline mismatch {worst:e}");
}

/// The generic kernels produce consistent answers across scalar types.
#[test]
fn f32_and_f64_spectra_agree_to_single_precision() {
    let m64 = build_path::<f64>(12, false).unwrap();
    let m32 = build_path::<f32>(12, false).unwrap();
    let v64 = consensus_lab::spectral::compute_eigenvalues(&m64).unwrap();
    let v32 = consensus_lab::spectral::compute_eigenvalues(&m32).unwrap();
    for (a, b) in v64.iter().zip(&v32) {
        assert!((*a - *b as f64).abs() < 1e-5, "{a} vs {b}");
    }
}

#[test]
fn dd_and_f64_spectra_agree_to_double_precision() {
    let mdd = build_dense_periodic::<Dd>(9, 0.3, false).unwrap();
    let m64 = build_dense_periodic::<f64>(9, 0.3, false).unwrap();
    let vdd = consensus_lab::spectral::compute_eigenvalues(&mdd).unwrap();
    let v64 = consensus_lab::spectral::compute_eigenvalues(&m64).unwrap();
    for (a, b) in vdd.iter().zip(&v64) {
        assert!((a.to_f64_lossy() - b).abs() < 1e-13);
    }
}

/// Mean invariance across twenty seeded fixtures, linear and alignment.
#[test]
fn mean_invariance_seeded_fixtures() {
    for seed in 0..10u64 {
        let mut rng = SplitMix64::new(seed);
        let n = 8 + (seed as usize % 5);
        let x0 = rng.uniform_vec(n, -2.0, 2.0);
        let m0: f64 = x0.iter().sum::<f64>() / n as f64;

        let model = build_path::<f64>(n, false).unwrap();
        let lin = simulate_linear(&model, &x0, 5.0, 0.01, None).unwrap();
        let ml: f64 = lin.final_state().iter().sum::<f64>() / n as f64;
        assert!((ml - m0).abs() <= 1e-8 * (1.0 + m0.abs()), "linear seed {seed}");

        let ali = simulate_alignment(
            n,
            InfluenceFunction::RationalDecay { beta: 0.5 },
            &x0,
            5.0,
            0.01,
        )
        .unwrap();
        let ma: f64 = ali.final_state().iter().sum::<f64>() / n as f64;
        assert!((ma - m0).abs() <= 1e-8 * (1.0 + m0.abs()), "alignment seed {seed}");
    }
}
