use proptest::prelude::*;
use zgkn::params::*;

#[test]
fn hydrogenic_table_rows() {
    for s in [0.5, -0.5] {
        let rows = [((0, 0), "1s1/2"), ((0, 1), "2s1/2"), ((-1, 1), "2p1/2")];
        for ((nt, no), label) in rows {
            let l = spectroscopic_label(WindingTarget::new(nt, no), s).unwrap();
            assert_eq!(l.to_string(), label);
            assert_eq!(l.m_j, s);
        }
    }
}

#[test]
fn j_three_halves_rows() {
    // The printed windings for the j = 3/2 rows have M = 0 with k > 0.
    assert!(spectroscopic_label(WindingTarget::new(-2, 0), 0.5).is_err());
    assert!(spectroscopic_label(WindingTarget::new(-1, 0), 1.5).is_err());
    // k = −2, M = 0 is reached from (1, 0, ±½) and (0, 0, ±3/2).
    for (nt, kappa) in [(1, 0.5), (1, -0.5), (0, 1.5), (0, -1.5)] {
        let l = spectroscopic_label(WindingTarget::new(nt, 0), kappa).unwrap();
        assert_eq!((l.n, l.ell, l.j, l.k, l.big_m), (2, 1, 1.5, -2, 0));
        assert_eq!(l.m_j, kappa);
        assert_eq!(l.to_string(), "2p3/2");
    }
}

#[test]
fn forbidden_and_inadmissible() {
    assert!(spectroscopic_label(WindingTarget::new(0, -1), 0.5).is_err());
    assert!(spectroscopic_label(WindingTarget::new(-1, 0), 0.5).is_err());
    assert!(spectroscopic_label(WindingTarget::new(0, 0), 0.0).is_err());
    assert!(spectroscopic_label(WindingTarget::new(0, 0), 1.0).is_err());
}

#[test]
fn guaranteed_region_flag() {
    assert!(ModelParams::new(0.1, -0.3, 0.5).in_guaranteed_region());
    assert!(!ModelParams::new(0.3, -0.3, 0.5).in_guaranteed_region());
    assert!(!ModelParams::new(0.1, -0.5, 0.5).in_guaranteed_region());
    assert!((a_max() - 0.2928932188134524).abs() < 1e-15);
}

fn half_integer() -> impl Strategy<Value = f64> {
    (0i64..6, any::<bool>()).prop_map(|(t, neg)| (t as f64 + 0.5) * if neg { -1.0 } else { 1.0 })
}

proptest! {
    #[test]
    fn label_round_trip(nt in -6i64..6, no in 0i64..6, kappa in half_integer()) {
        let t = WindingTarget::new(nt, no);
        prop_assume!(t.is_admissible());
        match spectroscopic_label(t, kappa) {
            Ok(l) => {
                prop_assert_eq!(l.winding_target(), t);
                prop_assert_eq!(l.j, l.k.unsigned_abs() as f64 - 0.5);
                prop_assert_eq!(l.n, l.big_m + l.k.unsigned_abs() as u32);
                prop_assert_eq!(l.m_j, kappa);
                prop_assert!(!(l.k > 0 && l.big_m == 0));
                prop_assert_eq!(l.ell as f64, l.j + 0.5 * l.k.signum() as f64);
            }
            Err(_) => prop_assert!(spin_orbit_k(t.big_n(), kappa) > 0 && no == 0),
        }
    }

    #[test]
    fn n_theta_conversion_inverts(nt in -50i64..50) {
        prop_assert_eq!(n_to_theta_winding(theta_winding_to_n(nt)), nt);
        prop_assert_ne!(theta_winding_to_n(nt), 0);
    }

    #[test]
    fn validate_rejection_rule(a in -0.5f64..0.5, g in -1.0f64..0.5, kappa in half_integer(), nt in -3i64..3, no in -1i64..3) {
        let p = ModelParams::new(a, g, kappa);
        let t = WindingTarget::new(nt, no);
        let r = validate(&p, t);
        prop_assert_eq!(r.accepted, a > 0.0 && g < 0.0 && t.is_admissible());
        prop_assert_eq!(r.in_guaranteed_region, p.in_guaranteed_region());
    }
}
