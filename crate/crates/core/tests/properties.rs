use e3lab::dynamics::{divergence, vector_field, vector_field_bracket_form};
use e3lab::e3::structure_matrix;
use e3lab::elliptic::{binary_invariants, j_invariant_quartic, verify_isomorphism, QuarticCurve, Weierstrass};
use e3lab::field::{bracket, fd_gradient};
use e3lab::lax::{spectral_coefficients, SpectralCoefficients};
use e3lab::reduction::{reduced_constants, rotate, u_and_udot, unrotate};
use e3lab::separation::{chart_distance, separation_relation_residuals};
use e3lab::{CaseSelector, E3State, ScalarField, SystemParams, C64};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = E3State> {
    prop::array::uniform6(-2.0f64..2.0).prop_map(|c| E3State::new([c[0], c[1], c[2]], [c[3], c[4], c[5]]))
}

fn params() -> impl Strategy<Value = SystemParams> {
    (0.3f64..3.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_filter("chi must not vanish", |(_, x0, z0)| x0.hypot(*z0) > 0.1)
        .prop_map(|(i2, x0, z0)| SystemParams::new(i2, x0, z0).unwrap())
}

fn case() -> impl Strategy<Value = CaseSelector> {
    (0usize..5).prop_map(|k| CaseSelector::named()[k].clone())
}

fn scale(s: &E3State) -> f64 {
    1.0 + s.to_vec6().amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn casimirs_commute_with_every_coordinate(s in state(), i in 0usize..6) {
        let x = ScalarField::coordinate(i);
        prop_assert!(bracket(&ScalarField::casimir_f1(), &x, &s).unwrap().abs() < 1e-12);
        prop_assert!(bracket(&ScalarField::casimir_f2(), &x, &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn structure_matrix_is_antisymmetric(s in state()) {
        let j = structure_matrix(&s);
        prop_assert_eq!(j, -j.transpose());
    }

    #[test]
    fn jacobi_identity(s in state(), p in params()) {
        let fields = [ScalarField::h1(&p), ScalarField::h2(&p), ScalarField::m_squared()];
        let inner = |f: &ScalarField, g: &ScalarField| {
            let (f, g) = (f.clone(), g.clone());
            ScalarField::new("inner", move |x: &E3State| bracket(&f, &g, x).unwrap())
        };
        let [f, g, h] = &fields;
        let total = bracket(f, &inner(g, h), &s).unwrap()
            + bracket(g, &inner(h, f), &s).unwrap()
            + bracket(h, &inner(f, g), &s).unwrap();
        prop_assert!(total.abs() < 1e-6 * scale(&s).powi(3), "{}", total);
    }

    #[test]
    fn analytic_and_difference_gradients_agree(s in state(), p in params()) {
        for f in [ScalarField::h1(&p), ScalarField::gamma_chi(&p), ScalarField::m_squared(), ScalarField::casimir_f1()] {
            let g = f.gradient(&s);
            let d = fd_gradient(|x| f.value(x), &s);
            prop_assert!((g - d).amax() < 1e-7 * scale(&s).powi(2));
        }
    }

    #[test]
    fn bracket_form_matches_component_form(s in state(), p in params(), c in case()) {
        let a = vector_field(&s, &p, &c);
        let b = vector_field_bracket_form(&s, &p, &c).unwrap();
        prop_assert!((a - b).amax() < 1e-12 * scale(&s).powi(3));
    }

    #[test]
    fn named_cases_preserve_volume(s in state(), p in params(), c in case()) {
        let d = divergence(&s, &p, &c).unwrap();
        prop_assert!(d.analytic.abs() < 1e-12 * scale(&s).powi(2));
        prop_assert!(d.numeric.abs() < 1e-5 * scale(&s).powi(2));
    }

    #[test]
    fn rotation_round_trip(s in state(), p in params()) {
        let back = unrotate(&rotate(&s, &p), &p);
        prop_assert!((back.to_vec6() - s.to_vec6()).amax() < 1e-14 * scale(&s));
        let r = rotate(&s, &p);
        prop_assert!((r.x.norm() - s.m.norm()).abs() < 1e-14 * scale(&s));
    }

    #[test]
    fn cubic_holds_for_every_coupling(s in state(), p in params(), c in case()) {
        let k = reduced_constants(&s, &p);
        let (u, ud) = u_and_udot(&s, &p, &c);
        prop_assert!(k.d >= 0.0);
        prop_assert!((ud * ud - k.cubic(u, p.i2())).abs() < 1e-10 * (1.0 + ud * ud + u.powi(3) / p.i2().powi(2)));
    }

    #[test]
    fn spectral_coefficients_are_integrals(s in state(), p in params()) {
        let (a, b) = (spectral_coefficients(&s, &p).as_array(), SpectralCoefficients::from_integrals(&s, &p).as_array());
        for i in 0..5 {
            prop_assert!((a[i] - b[i]).abs() < 1e-12 * (1.0 + b[i].abs()));
        }
    }

    #[test]
    fn j_invariant_ignores_scaling(c in prop::array::uniform5(-3.0f64..3.0), k in 0.2f64..5.0) {
        let a = QuarticCurve::new(c);
        let b = QuarticCurve::new(c.map(|x| k * x));
        if let (Ok(ja), Ok(jb)) = (j_invariant_quartic(&a), j_invariant_quartic(&b)) {
            prop_assume!(ja.abs() < 1e6);
            prop_assert!((ja - jb).abs() < 1e-8 * ja.abs().max(1.0));
        }
        let (g2, g3) = binary_invariants(c);
        let (h2, h3) = binary_invariants(c.map(|x| k * x));
        prop_assert!((h2 - k * k * g2).abs() < 1e-10 * (1.0 + h2.abs()));
        prop_assert!((h3 - k.powi(3) * g3).abs() < 1e-10 * (1.0 + h3.abs()));
    }

    #[test]
    fn spectral_and_reduced_curves_share_j(s in state(), p in params()) {
        if let Ok(iso) = verify_isomorphism(&s, &p) {
            prop_assume!(iso.j_spectral.abs() < 1e8);
            prop_assert!(iso.gap < 1e-8, "{:?}", iso);
        }
    }

    #[test]
    fn weierstrass_is_even_and_periodic(g2 in -3.0f64..3.0, g3 in -3.0f64..3.0, x in 0.05f64..0.95, y in -0.3f64..0.3) {
        let Ok(wp) = Weierstrass::new(g2, g3) else { return Ok(()) };
        let w = wp.real_half_period();
        let z = C64::new(2.0 * w * x, y * w);
        let Ok(p) = wp.p(z) else { return Ok(()) };
        let tol = 1e-9 * (1.0 + p.norm());
        prop_assert!((wp.p(-z).unwrap() - p).norm() < tol);
        prop_assert!((wp.p(z + 2.0 * w).unwrap() - p).norm() < tol);
        prop_assert!((wp.p(z.conj()).unwrap() - p.conj()).norm() < tol);
    }

    #[test]
    fn separation_relations_hold_off_the_singular_set(s in state(), p in params()) {
        prop_assume!(chart_distance(&s, &p) > 0.1);
        let (r1, r2) = separation_relation_residuals(&s, &p).unwrap();
        prop_assert!(r1 < 1e-8, "{}", r1);
        prop_assert!(r2 < 1e-12 * scale(&s));
    }
}
