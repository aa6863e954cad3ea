use std::f64::consts::PI;

use proptest::prelude::*;
use zgkn::cylinder::*;
use zgkn::omega_system::OmegaSystem;
use zgkn::params::ModelParams;
use zgkn::theta_system::ThetaSystem;
use zgkn::Error;

/// A flow whose axis speed never vanishes.
struct FlatAxis;

impl CylinderField for FlatAxis {
    fn x_bounds(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn f(&self, _x: f64) -> f64 {
        1.0
    }
    fn g(&self, _x: f64, y: f64, mu: f64) -> f64 {
        y.sin() + mu
    }
    fn y0(&self) -> f64 {
        -PI
    }
    fn orientation(&self) -> Orientation {
        Orientation::Increasing
    }
    fn equilibria(&self, _mu: f64) -> BoundaryEquilibria {
        BoundaryEquilibria { s_minus: 0.0, n_minus: -PI, s_plus: -PI, n_plus: 0.0 }
    }
    fn unstable_tangent(&self, _mu: f64) -> [f64; 2] {
        [1.0, 0.0]
    }
    fn stable_tangent(&self, _mu: f64) -> [f64; 2] {
        [-1.0, 0.0]
    }
}

fn theta(a: f64, kappa: f64, e: f64) -> ThetaSystem {
    ThetaSystem::with_values(a, kappa, e)
}

fn omega(a: f64, gamma: f64, kappa: f64, lambda: f64) -> OmegaSystem {
    OmegaSystem::new(&ModelParams::new(a, gamma, kappa), lambda)
}

fn orbit_with(direction: Direction, origin_shift: i64, kind: EquilibriumKind, shift: i64) -> Orbit {
    Orbit {
        samples: Vec::new(),
        direction,
        origin_shift,
        terminal: Some(Terminal { kind, shift, lift: 0.0, x: 0.0, snap_distance: 0.0 }),
    }
}

#[test]
fn off_connector_shot_lands_on_a_node() {
    let f = theta(0.1, 0.5, 0.5);
    let o = integrate_unstable(&f, -0.5, f.unstable_tangent(-0.5), LAUNCH_OFFSET, f.span()).unwrap();
    let t = o.terminal.unwrap();
    assert_eq!(t.kind, EquilibriumKind::NPlus);
    assert!(t.snap_distance < 1e-3);
    assert!(o.x_strictly_increasing());
}

#[test]
fn zero_offset_is_rejected() {
    let f = theta(0.1, 0.5, 0.5);
    let r = integrate_unstable(&f, -0.5, f.unstable_tangent(-0.5), 0.0, f.span());
    assert_eq!(r.unwrap_err(), Error::StartAtEquilibrium);
    let r = integrate_stable(&f, -0.5, 0, f.stable_tangent(-0.5), 0.0, f.span());
    assert_eq!(r.unwrap_err(), Error::StartAtEquilibrium);
}

#[test]
fn winding_from_terminal_shifts() {
    use EquilibriumKind::*;
    assert_eq!(winding_of(&orbit_with(Direction::Forward, 0, SPlus, 2)).unwrap(), 2);
    assert_eq!(winding_of(&orbit_with(Direction::Forward, 0, NPlus, 0)).unwrap(), 0);
    // a lift of s⁺ + 2π has shift −1
    assert_eq!(winding_of(&orbit_with(Direction::Forward, 0, SPlus, -1)).unwrap(), -1);
    assert_eq!(winding_of(&orbit_with(Direction::Backward, 3, SMinus, 1)).unwrap(), 2);
    let bare = Orbit { samples: Vec::new(), direction: Direction::Forward, origin_shift: 0, terminal: None };
    assert!(winding_of(&bare).is_err());
}

#[test]
fn flat_limit_connector() {
    let f = theta(0.0, 0.5, 0.9);
    let c = find_connector(&f, 0, (-1.2, -0.8), 1e-10).unwrap();
    assert!((c.mu_star + 1.0).abs() < 1e-8, "{}", c.mu_star);
    assert_eq!(c.winding, 0);
    assert!(c.iterations <= bisection_budget(0.4, 1e-10));
    assert!(c.bracket.1 - c.bracket.0 <= 1e-10);
    let t = c.orbit.terminal.unwrap();
    assert_eq!((t.kind, t.shift), (EquilibriumKind::SPlus, 0));
    assert!(t.snap_distance < 1e-3);
}

#[test]
fn radial_connector_near_sommerfeld() {
    let f = omega(1e-4, -0.5, 0.5, -1.0);
    let c = find_connector(&f, 0, (f.e_floor, f.e_ceil), 1e-9).unwrap();
    assert!((c.mu_star - 0.75f64.sqrt()).abs() < 5e-3, "{}", c.mu_star);
}

#[test]
fn bracket_without_jump() {
    let f = theta(0.0, 0.5, 0.9);
    match find_connector(&f, 0, (-0.95, -0.9), 1e-9) {
        Err(Error::NoJump { w_lo, w_hi, target, .. }) => {
            assert_eq!(w_lo, w_hi);
            assert_eq!(target, 0);
        }
        other => panic!("expected NoJump, got {other:?}"),
    }
    assert!(matches!(find_connector(&f, 0, (-0.8, -1.2), 1e-9), Err(Error::InvalidArgument(_))));
}

#[test]
fn signed_area_changes_sign_across_connector() {
    let f = theta(0.1, 0.5, 0.5);
    let c = find_connector(&f, 0, (-1.2, -0.8), 1e-10).unwrap();
    let below = signed_area(&f, c.mu_star - 0.02, 0).unwrap();
    let above = signed_area(&f, c.mu_star + 0.02, 0).unwrap();
    assert!(below * above < 0.0, "{below} {above}");
    let at = signed_area(&f, c.mu_star, 0).unwrap();
    assert!(at.abs() < 1e-2 * below.abs().min(above.abs()), "{at}");

    let g = omega(0.05, -0.3, 0.5, -1.0);
    let c = find_connector(&g, 0, (g.e_floor, g.e_ceil), 1e-10).unwrap();
    let lo = signed_area(&g, c.mu_star - 0.01, 0).unwrap();
    let hi = signed_area(&g, c.mu_star + 0.01, 0).unwrap();
    assert!(lo * hi < 0.0, "{lo} {hi}");
}

#[test]
fn stable_manifold_meets_unstable_one() {
    let f = theta(0.1, 0.5, 0.5);
    for n in [-1, 0, 1] {
        let c = zgkn::theta_system::find_lambda(&f, n, 1e-10).unwrap();
        assert!(c.matching_gap.abs() < 1e-3, "{}", c.matching_gap);
        // the backward shot separates on the node next to S⁻
        let back = f.trace_stable(c.mu_star, n).unwrap();
        let end = back.end_lift().unwrap();
        assert!((end - f.equilibria(c.mu_star).s_minus).abs() < PI + 1e-3, "{end}");
    }
}

#[test]
fn assumptions_hold_for_both_flows() {
    let f = theta(0.1, 0.5, 0.5);
    let r = check_assumptions(&f, -1.0, 64, 64);
    assert!(r.all_sampled_pass(), "{r:?}");
    assert!(r.e_heteroclinic.passed);
    let f = theta(0.1, -1.5, 0.7);
    assert!(check_assumptions(&f, 2.0, 64, 64).all_sampled_pass());

    let g = omega(0.1, -0.3, 0.5, -1.0);
    let r = check_assumptions(&g, 0.6, 64, 64);
    assert!(r.all_sampled_pass(), "{r:?}");
    assert!(r.e_heteroclinic.passed);
    let g = omega(0.1, -0.3, -0.5, 1.0);
    assert!(check_assumptions(&g, 0.9, 64, 64).all_sampled_pass());
}

#[test]
fn nonvanishing_axis_speed_fails_first_check() {
    let r = check_assumptions(&FlatAxis, 0.0, 16, 16);
    assert!(!r.a_axis_speed.passed);
    assert!(r.a_axis_speed.detail.contains("x- = 0"), "{}", r.a_axis_speed.detail);
    assert!(!r.all_sampled_pass());
    assert!(!r.e_heteroclinic.passed);
}

#[test]
fn budget_bounds_iterations() {
    let f = theta(0.05, 1.5, 0.3);
    for (n, tol) in [(0, 1e-6), (1, 1e-9), (-1, 1e-12)] {
        let br = zgkn::theta_system::lambda_bracket(&f, n);
        let c = find_connector(&f, n, br, tol).unwrap();
        assert!(c.iterations <= bisection_budget(br.1 - br.0, tol));
        assert!(c.bracket.1 - c.bracket.0 <= tol);
    }
}

fn kappa_choice() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(-0.5), Just(1.5), Just(-1.5)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_lift_is_continuous(a in 0.0f64..0.25, kappa in kappa_choice(), e in 0.0f64..1.0, lambda in -4.0f64..4.0) {
        let f = theta(a, kappa, e);
        let o = f.trace_unstable(lambda).unwrap();
        prop_assert!(o.max_lift_jump() < PI);
        prop_assert!(o.x_strictly_increasing());
    }

    #[test]
    fn omega_lift_is_continuous(a in 0.01f64..0.25, gamma in -0.45f64..-0.05, e in 0.05f64..0.95, lambda in -3.0f64..-1.0) {
        let f = omega(a, gamma, 0.5, lambda);
        let o = f.trace_unstable(e).unwrap();
        prop_assert!(o.max_lift_jump() < PI);
        prop_assert!(o.x_strictly_increasing());
    }

    // Winding grows as λ decreases, so the unstable manifold sits lower for smaller λ.
    #[test]
    fn theta_lift_is_monotone(a in 0.0f64..0.25, kappa in kappa_choice(), e in 0.0f64..1.0, l1 in -3.0f64..3.0, dl in 0.05f64..1.0) {
        let f = theta(a, kappa, e);
        let lo = f.trace_unstable(l1).unwrap();
        let hi = f.trace_unstable(l1 + dl).unwrap();
        for i in 1..20 {
            let x = PI * i as f64 / 20.0;
            let (y_lo, y_hi) = (lo.y_at(x).unwrap(), hi.y_at(x).unwrap());
            prop_assert!(y_lo <= y_hi + 1e-7, "x = {}: {} > {}", x, y_lo, y_hi);
        }
    }

    #[test]
    fn omega_lift_is_monotone(a in 0.02f64..0.25, gamma in -0.45f64..-0.05, e1 in 0.05f64..0.85, de in 0.01f64..0.1) {
        let f = omega(a, gamma, 0.5, -1.0);
        let lo = f.trace_unstable(e1).unwrap();
        let hi = f.trace_unstable(e1 + de).unwrap();
        for i in 1..20 {
            let r = -2.0 + 4.0 * i as f64 / 20.0;
            let x = (r / a).atan();
            let (y_lo, y_hi) = (lo.y_at(x).unwrap(), hi.y_at(x).unwrap());
            prop_assert!(y_hi <= y_lo + 1e-7, "r = {}: {} > {}", r, y_hi, y_lo);
        }
    }
}
