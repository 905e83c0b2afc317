use proptest::prelude::*;

use rdlab::estimates::gronwall_envelope;
use rdlab::grid::{level_width, make_grid, required_depth};
use rdlab::oracle::heat_quadrature;
use rdlab::scheme::step_level;
use rdlab::weak::{abs_mass, pair};
use rdlab::{make_builtin, BumpTestFunction, Field, GridSpec, ReactionTerm};

fn builtin_reactions() -> Vec<ReactionTerm> {
    vec![
        ReactionTerm::zero(),
        make_builtin("linear", &[1.3]).unwrap(),
        make_builtin("linear", &[-2.0]).unwrap(),
        make_builtin("sine", &[]).unwrap(),
        make_builtin("clamped_logistic", &[2.0]).unwrap(),
        make_builtin("clamped_logistic", &[0.1]).unwrap(),
    ]
}

fn grid(alpha: f64) -> GridSpec {
    make_grid(0.1, alpha * 0.01, 1000, 1.0, false).unwrap()
}

fn row_strategy() -> impl Strategy<Value = Vec<f64>> {
    (1usize..40).prop_flat_map(|h| prop::collection::vec(-5.0f64..5.0, 2 * h + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn heat_step_stays_in_range(row in row_strategy(), alpha in 0.01f64..=0.5) {
        let out = step_level(&row, &grid(alpha), &ReactionTerm::zero()).unwrap();
        let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in out {
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn heat_step_is_linear(
        (a_row, b_row) in (1usize..30).prop_flat_map(|h| (
            prop::collection::vec(-3.0f64..3.0, 2 * h + 1),
            prop::collection::vec(-3.0f64..3.0, 2 * h + 1),
        )),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        alpha in 0.01f64..=0.5,
    ) {
        let g = grid(alpha);
        let zero = ReactionTerm::zero();
        let mix: Vec<f64> = a_row.iter().zip(&b_row).map(|(x, y)| a * x + b * y).collect();
        let lhs = step_level(&mix, &g, &zero).unwrap();
        let sa = step_level(&a_row, &g, &zero).unwrap();
        let sb = step_level(&b_row, &g, &zero).unwrap();
        for i in 0..lhs.len() {
            let rhs = a * sa[i] + b * sb[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn even_rows_stay_palindromic(half in prop::collection::vec(-3.0f64..3.0, 2..30), alpha in 0.01f64..=0.5) {
        let mut row: Vec<f64> = half.iter().rev().cloned().collect();
        row.extend_from_slice(&half[1..]);
        let g = grid(alpha);
        for reaction in builtin_reactions() {
            let out = step_level(&row, &g, &reaction).unwrap();
            let rev: Vec<f64> = out.iter().rev().cloned().collect();
            prop_assert_eq!(out, rev);
        }
    }

    #[test]
    fn envelope_semigroup(w0 in 0.0f64..10.0, m in 0.0f64..3.0, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let direct = gronwall_envelope(w0, m, t1 + t2).unwrap();
        let composed = gronwall_envelope(gronwall_envelope(w0, m, t1).unwrap(), m, t2).unwrap();
        prop_assert!((direct - composed).abs() <= 1e-12 * (1.0 + direct));
        let doubled = gronwall_envelope(2.0 * w0, m, t1).unwrap();
        prop_assert!((doubled - 2.0 * gronwall_envelope(w0, m, t1).unwrap()).abs() <= 1e-12 * (1.0 + doubled));
    }

    #[test]
    fn level_widths_shrink_by_two(big_n in 1usize..5000, n in 0usize..4999) {
        let spec = make_grid(0.1, 0.001, big_n, 1.0, false).unwrap();
        prop_assume!(n < big_n);
        prop_assert_eq!(level_width(&spec, n).unwrap() - level_width(&spec, n + 1).unwrap(), 2);
        prop_assert_eq!(level_width(&spec, big_n).unwrap(), 1);
        prop_assert!(level_width(&spec, big_n + 1).is_err());
    }

    #[test]
    fn required_depth_is_monotone(x in 0.0f64..5.0, t in 0.0f64..2.0, dx_x in 0.0f64..1.0, dt_t in 0.0f64..1.0) {
        let (dx, dt) = (0.05, 0.001);
        let base = required_depth(x, t, dx, dt).unwrap();
        prop_assert!(required_depth(x + dx_x, t, dx, dt).unwrap() >= base);
        prop_assert!(required_depth(x, t + dt_t, dx, dt).unwrap() >= base);
        prop_assert!(base as f64 >= x / dx + t / dt - 1e-6);
    }

    #[test]
    fn alpha_is_reported_exactly(dx in 0.001f64..1.0, alpha in 0.001f64..0.5, d in 0.1f64..10.0) {
        let dt = alpha * dx * dx / d;
        let g = make_grid(dx, dt, 10, d, false).unwrap();
        prop_assert_eq!(g.alpha, d * dt / (dx * dx));
        prop_assert!(!g.unstable);
    }

    #[test]
    fn reactions_respect_their_constants(u in -10.0f64..10.0, v in -10.0f64..10.0) {
        for r in builtin_reactions() {
            let (fu, fv) = (r.evaluate(u), r.evaluate(v));
            prop_assert!((fu - fv).abs() <= r.k1 * (u - v).abs() * (1.0 + 1e-12) + 1e-15, "{}", r.name);
            prop_assert!(r.evaluate(0.0).abs() <= r.k0);
        }
    }

    #[test]
    fn bump_derivatives_match_central_differences(
        sx in -0.95f64..0.95,
        st in -0.95f64..0.95,
        xc in -2.0f64..2.0,
        tc in 0.0f64..2.0,
        rx in 0.5f64..2.0,
        rt in 0.5f64..2.0,
    ) {
        let phi = BumpTestFunction::new(xc, tc, rx, rt, 1.0);
        let (x, t) = (xc + sx * rx, tc + st * rt);
        let h = 1e-5;
        let v = phi.evaluate(x, t);
        let ft = (phi.value(x, t + h) - phi.value(x, t - h)) / (2.0 * h);
        let c = phi.value(x, t);
        let fxx = ((phi.value(x - h, t) - c) + (phi.value(x + h, t) - c)) / (h * h);
        prop_assert!((v.dt_derivative - ft).abs() <= 1e-6, "{} vs {}", v.dt_derivative, ft);
        prop_assert!((v.dxx_derivative - fxx).abs() <= 1e-6, "{} vs {}", v.dxx_derivative, fxx);
    }

    #[test]
    fn bump_is_nonnegative_and_peaks_at_centre(
        x in -5.0f64..5.0, t in -3.0f64..3.0, a in 0.0f64..4.0, rx in 0.1f64..3.0, rt in 0.1f64..3.0,
    ) {
        let phi = BumpTestFunction::new(0.5, 0.2, rx, rt, a);
        let peak = a * (-2.0f64).exp();
        let v = phi.value(x, t);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= peak * (1.0 + 1e-15));
        prop_assert!((phi.value(0.5, 0.2) - peak).abs() <= 1e-15 * (1.0 + peak));
    }

    #[test]
    fn heat_quadrature_respects_bounds(x in -3.0f64..3.0, t in 0.01f64..2.0, k in 0.5f64..3.0) {
        let v = heat_quadrature(|y: f64| (k * y).sin(), x, t, 1.0).unwrap();
        prop_assert!(v.abs() <= 1.0 + 1e-9);
        let exact = (-k * k * t).exp() * (k * x).sin();
        prop_assert!((v - exact).abs() <= 1e-8);
    }
}

fn random_field(values: &[f64], big_n: usize) -> Field {
    let spec = make_grid(0.1, 0.0025, big_n, 1.0, false).unwrap();
    let mut it = values.iter().cycle();
    let rows = (0..=big_n).map(|n| (0..2 * (big_n - n) + 1).map(|_| *it.next().unwrap()).collect()).collect();
    Field::from_rows(spec, rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pairing_is_linear_and_bounded(
        u in prop::collection::vec(-2.0f64..2.0, 50..200),
        v in prop::collection::vec(-2.0f64..2.0, 50..200),
        a in -3.0f64..3.0,
        xc in -1.0f64..1.0,
        tc in 0.0f64..0.4,
    ) {
        let big_n = 300;
        let fu = random_field(&u, big_n);
        let fv = random_field(&v, big_n);
        let rows = fu.rows().iter().zip(fv.rows()).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + a * y).collect()).collect();
        let mix = Field::from_rows(*fu.spec(), rows).unwrap();
        let phi = BumpTestFunction::new(xc, tc, 0.8, 0.2, 1.5);
        let (pu, pv, pm) = (pair(&fu, &phi).unwrap(), pair(&fv, &phi).unwrap(), pair(&mix, &phi).unwrap());
        let scale = abs_mass(&fu, &phi) * (2.0 + 2.0 * a.abs());
        prop_assert!((pm - (pu + a * pv)).abs() <= 1e-12 * (1.0 + scale));
        prop_assert!(pu.abs() <= fu.max_abs() * abs_mass(&fu, &phi) * (1.0 + 1e-12));

        let double = BumpTestFunction::new(xc, tc, 0.8, 0.2, 3.0);
        prop_assert!((pair(&fu, &double).unwrap() - 2.0 * pu).abs() <= 1e-12 * (1.0 + pu.abs()));
    }
}
