use std::f64::consts::PI;

use cosine_bouquet::model::*;
use proptest::prelude::*;

/// Endpoint potential by bisection on the raw orbit `t ↦ e^t - 1 - π|s_{n+1}|`:
/// below `t_s` the orbit turns negative, above it runs off to infinity.
fn endpoint_by_bisection(s: &ExternalAddress) -> f64 {
    let escapes = |t0: f64| {
        let mut t = t0;
        for n in 1..400 {
            t = t.exp() - 1.0 - PI * s.entry(n).abs() as f64;
            if t < 0.0 {
                return false;
            }
            if t > 60.0 {
                return true;
            }
        }
        true
    };
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    if escapes(lo) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if escapes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn symbol() -> impl Strategy<Value = Symbol> {
    (any::<bool>(), -5i64..=5).prop_map(|(r, n)| if r { Symbol::r(n) } else { Symbol::l(n) })
}

fn address() -> impl Strategy<Value = ExternalAddress> {
    (prop::collection::vec(symbol(), 0..3), prop::collection::vec(symbol(), 1..4))
        .prop_map(|(pre, per)| ExternalAddress::new(pre, per).unwrap())
}

#[test]
fn constant_addresses_solve_the_fixed_point_equation() {
    // e^t - 1 - t = π|n| by Newton
    for n in 1..=6i64 {
        let target = PI * n as f64;
        let mut t: f64 = 2.0;
        for _ in 0..60 {
            t -= (t.exp() - 1.0 - t - target) / (t.exp() - 1.0);
        }
        for s in [Symbol::r(n), Symbol::l(-n)] {
            let got = potential_boundary(&ExternalAddress::constant(s), 1e-13).unwrap();
            assert!((got - t).abs() < 1e-10, "{s}: {got} vs {t}");
        }
    }
    assert_eq!(potential_boundary(&"0R".parse().unwrap(), 1e-12).unwrap(), 0.0);
}

#[test]
fn preperiodic_example_matches_bisection() {
    let s: ExternalAddress = "2R,1L|3R,0L".parse().unwrap();
    let want = endpoint_by_bisection(&s);
    let got = potential_boundary(&s, 1e-13).unwrap();
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn parse_rejects_garbage() {
    for bad in ["", "3", "R", "1R|", "1X", "1R,,2L"] {
        assert!(bad.parse::<ExternalAddress>().is_err(), "{bad:?}");
    }
}

#[test]
fn symbols_order_by_index_then_side() {
    let a: Vec<Symbol> = ["-1R", "0L", "0R", "1L"].iter().map(|s| s.parse().unwrap()).collect();
    assert!(a.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn brush_csv_lists_rows() {
    let s: ExternalAddress = "1R".parse().unwrap();
    let t_s = potential_boundary(&s, 1e-12).unwrap();
    let rows: Vec<BrushSample> = [t_s - 0.1, t_s + 0.1]
        .iter()
        .map(|&t| BrushSample {
            address: s.clone(),
            t,
            verdict: brush_membership(&ModelPoint::new(s.clone(), t).unwrap(), 1000).unwrap().verdict,
        })
        .collect();
    let csv = brush_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "address,t,verdict");
    assert!(lines[1].ends_with("NotInXbar"));
    assert!(lines[2].ends_with("InX"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_round_trips(s in address()) {
        let back: ExternalAddress = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn endpoint_agrees_with_bisection(s in address()) {
        let got = potential_boundary(&s, 1e-13).unwrap();
        let want = endpoint_by_bisection(&s);
        prop_assert!((got - want).abs() < 1e-8, "{}: {} vs {}", s, got, want);
    }

    #[test]
    fn endpoint_is_shift_equivariant(s in address()) {
        let t = potential_boundary(&s, 1e-13).unwrap();
        let shifted = potential_boundary(&s.shift(), 1e-13).unwrap();
        let image = growth(t) - PI * s.entry(1).abs() as f64;
        prop_assert!((shifted - image).abs() < 1e-8 * (1.0 + image.abs()));
    }

    #[test]
    fn brush_trichotomy_around_the_endpoint(s in address(), d in 0.01f64..2.0) {
        let t_s = potential_boundary(&s, 1e-13).unwrap();
        let above = brush_membership(&ModelPoint::new(s.clone(), t_s + d).unwrap(), 10_000).unwrap();
        prop_assert_eq!(above.verdict, BrushVerdict::InX);
        if t_s - d >= 0.0 {
            let below = brush_membership(&ModelPoint::new(s.clone(), t_s - d).unwrap(), 10_000).unwrap();
            prop_assert_eq!(below.verdict, BrushVerdict::NotInXbar);
        }
    }

    #[test]
    fn model_map_keeps_c_above_growth_over_root_two(s in address(), t in 0.0f64..6.0) {
        if let ModelStep::Point(q) = apply_model_map(&ModelPoint::new(s, t).unwrap()) {
            prop_assert!(q.complexified().norm() >= growth(t) / 2f64.sqrt() - 1e-12);
        }
    }

    #[test]
    fn conjugation_is_an_involution_fixing_potentials(s in address()) {
        let c = s.conjugate();
        prop_assert_eq!(c.conjugate(), s.clone());
        let a = potential_boundary(&s, 1e-13).unwrap();
        let b = potential_boundary(&c, 1e-13).unwrap();
        prop_assert_eq!(a, b);
    }
}
