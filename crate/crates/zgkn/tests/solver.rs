use proptest::prelude::*;
use zgkn::omega_system::{find_e, OmegaSystem};
use zgkn::params::{ModelParams, WindingTarget, ALPHA_S};
use zgkn::solver::*;
use zgkn::theta_system::{find_lambda, ThetaSystem};
use zgkn::Error;

fn solve(a: f64, g: f64, kappa: f64, nt: i64, no: i64) -> BoundState {
    solve_pair(&ModelParams::new(a, g, kappa), WindingTarget::new(nt, no), &SolveOptions::default()).unwrap()
}

#[test]
fn hydrogen_ground_state() {
    let s = solve(1e-4, -ALPHA_S, 0.5, 0, 0);
    let want = (1.0 - ALPHA_S * ALPHA_S).sqrt();
    assert!((s.energy - want).abs() < 1e-3, "{}", s.energy);
    assert!((s.energy - 0.99997337).abs() < 1e-6, "{}", s.energy);
    assert_eq!(s.label.to_string(), "1s1/2");
    assert_eq!(s.mirror_energy(), -s.energy);
    assert!(s.in_guaranteed_region);
}

#[test]
fn radial_excitation_raises_energy() {
    let e0 = solve(1e-4, -0.5, 0.5, 0, 0).energy;
    let e1 = solve(1e-4, -0.5, 0.5, 0, 1).energy;
    assert!(e0 <= e1, "{e0} {e1}");
}

#[test]
fn degeneracy_is_broken_by_the_ring() {
    // At Z = 1 the split is a few 1e-13, so it needs tolerances far below the defaults.
    let tight = SolveOptions { tol: 1e-12, inner_tol: 1e-14, ..SolveOptions::default() };
    let p = ModelParams::new(4e-4, -0.00729735, 0.5);
    let s = solve_pair(&p, WindingTarget::new(0, 1), &tight).unwrap();
    let q = solve_pair(&p, WindingTarget::new(-1, 1), &tight).unwrap();
    assert_eq!(s.label.to_string(), "2s1/2");
    assert_eq!(q.label.to_string(), "2p1/2");
    assert!(s.energy < q.energy, "{} {}", s.energy, q.energy);

    let s = solve(0.05, -0.3, 0.5, 0, 1);
    let q = solve(0.05, -0.3, 0.5, -1, 1);
    assert!((s.energy - q.energy).abs() > 10.0 * SolveOptions::default().tol, "{} {}", s.energy, q.energy);
}

#[test]
fn contraction_probe_examples() {
    let p = ModelParams::new(0.1, -0.3, 0.5);
    let t = WindingTarget::new(0, 0);
    let opts = SolveOptions::default();
    let r = contraction_probe(&p, t, 0.9, 1e-4, &opts).unwrap();
    assert!(r < 1.0, "{r}");
    let small = contraction_probe(&ModelParams::new(1e-4, -0.3, 0.5), t, 0.9, 1e-4, &opts).unwrap();
    assert!(small < 1e-2, "{small}");
    assert!(matches!(contraction_probe(&p, t, 0.9, 0.0, &opts), Err(Error::InvalidArgument(_))));
    assert!(contraction_probe(&p, t, 0.99999, 1e-4, &opts).is_err());
}

#[test]
fn rejects_bad_requests() {
    let opts = SolveOptions::default();
    let p = ModelParams::new(0.1, -0.3, 0.5);
    assert!(matches!(solve_pair(&p, WindingTarget::new(-1, 0), &opts), Err(Error::Inadmissible(_))));
    assert!(matches!(solve_pair(&ModelParams::new(0.0, -0.3, 0.5), WindingTarget::new(0, 0), &opts), Err(Error::Inadmissible(_))));
    let bad = SolveOptions { tol: 0.0, ..opts };
    assert!(matches!(solve_pair(&p, WindingTarget::new(0, 0), &bad), Err(Error::InvalidArgument(_))));
}

#[test]
fn iteration_budget_is_reported() {
    let opts = SolveOptions { max_iter: 1, tol: 1e-14, ..SolveOptions::default() };
    let r = solve_pair(&ModelParams::new(0.1, -0.3, 0.5), WindingTarget::new(0, 0), &opts);
    match r {
        Err(Error::NotConverged { iterations, last_energy, .. }) => {
            assert_eq!(iterations, 1);
            assert!(last_energy > 0.0 && last_energy < 1.0);
        }
        other => panic!("expected NotConverged, got {other:?}"),
    }
}

#[test]
fn iteration_count_follows_contraction() {
    let p = ModelParams::new(0.1, -0.3, 0.5);
    let t = WindingTarget::new(0, 0);
    let opts = SolveOptions::default();
    let s = solve_pair(&p, t, &opts).unwrap();
    let e0 = initial_energy(&p, &s.label);
    let l0 = find_lambda(&ThetaSystem::new(&p, e0), 0, opts.inner_tol).unwrap().mu_star;
    let e1 = find_e(&OmegaSystem::new(&p, l0), 0, opts.inner_tol).unwrap().mu_star;
    let ratio = s.convergence.contraction_ratio.expect("several iterations at a = 0.1");
    assert!(ratio < 1.0, "{ratio}");
    let bound = ((opts.tol / (e1 - e0).abs()).ln() / ratio.ln()).ceil() as usize + 2;
    assert!(s.convergence.iterations <= bound, "{} > {bound}", s.convergence.iterations);
}

fn target() -> impl Strategy<Value = (f64, i64, i64)> {
    prop_oneof![
        Just((0.5, 0, 0)),
        Just((0.5, 0, 1)),
        Just((0.5, -1, 1)),
        Just((-0.5, 0, 0)),
        Just((-0.5, -1, 1)),
        Just((1.5, 0, 0)),
        Just((0.5, 1, 0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn residuals_and_signs(a in 0.005f64..0.25, g in -0.45f64..-0.05, (kappa, nt, no) in target()) {
        let opts = SolveOptions::default();
        let s = solve_pair(&ModelParams::new(a, g, kappa), WindingTarget::new(nt, no), &opts).unwrap();
        prop_assert!(s.energy > 0.0 && s.energy < 1.0);
        prop_assert!(s.convergence.residual_lambda <= 2.0 * opts.tol, "{:?}", s.convergence);
        prop_assert!(s.convergence.residual_e <= 2.0 * opts.tol, "{:?}", s.convergence);
        if nt >= 0 {
            prop_assert!(s.lambda < 0.0);
        } else {
            prop_assert!(s.lambda > 0.0);
        }
        prop_assert!(!s.convergence.retried);
    }
}
