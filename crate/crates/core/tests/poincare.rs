use cosine_bouquet::poincare::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn fixed_point_and_multiplier() {
    let s = solve_coefficients(40);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((s.z0 - golden).abs() < 1e-15);
    assert!((s.z0 * s.z0 - 1.0 - s.z0).abs() < 1e-15);
    assert!((s.lambda - (1.0 + 5f64.sqrt())).abs() < 1e-15);
}

#[test]
fn low_coefficients_by_hand() {
    // λ²a₂ = 2a₀a₂ + a₁² and λ³a₃ = 2a₀a₃ + 2a₁a₂, with 2a₀ = λ
    let s = solve_coefficients(10);
    let l = s.lambda;
    let a2 = 1.0 / (l * l - l);
    let a3 = 2.0 * a2 / (l * l * l - l);
    assert!((s.coeffs[2] - a2).abs() < 1e-15);
    assert!((s.coeffs[3] - a3).abs() < 1e-15);
    assert!(s.residuals().iter().all(|r| *r < 1e-14));
}

#[test]
fn too_few_steps_is_an_error() {
    let s = solve_coefficients(40);
    let z = c(30.0, 0.0);
    let need = s.required_steps(z);
    assert!(need > 0);
    assert!(s.evaluate(z, need - 1).is_err());
}

#[test]
fn jet_matches_contour_integrals() {
    let s = solve_coefficients(40);
    for z in [c(0.7, -0.4), c(-3.0, 2.0), c(12.0, 1.0)] {
        let jet = s.jet(z, 6, 1.0).unwrap();
        let r = 0.25f64;
        let contour = contour_coefficients(&s, z, r, 7, 256).unwrap();
        // the trapezoid rule errs by about ε·max|Φ| on the circle, over r^k
        let size = (0..=6).map(|k| contour[k].norm() * r.powi(k as i32)).fold(0.0, f64::max);
        for (k, (a, b)) in jet.coeffs.iter().zip(&contour).enumerate() {
            let err = (a - b).norm() * r.powi(k as i32) / size;
            assert!(err < 1e-10, "z = {z}, k = {k}: {a} vs {b}");
        }
    }
}

#[test]
fn critical_preimage_and_orders() {
    let s = solve_coefficients(DEFAULT_TERMS);
    let crit = find_critical_preimage(&s, 40.0).unwrap();
    assert!(s.derivative(crit.z).unwrap().norm() < 1e-8);
    assert!(crit.second_derivative.norm() > 0.0);
    let orders: Vec<usize> = (0..=8).map(|n| vanishing_order_at(&s, &crit, n).unwrap()).collect();
    assert!(orders.windows(2).all(|w| w[1] >= w[0]), "{orders:?}");
    for (n, k) in orders.iter().enumerate() {
        assert!(*k >= n, "ord at z_{n} = {k}");
    }
}

#[test]
fn growth_slope_near_log2_over_log_lambda() {
    let s = solve_coefficients(DEFAULT_TERMS);
    let est = order_of_growth_estimate(&s, &log_spaced(1e3, 1e8, 12)).unwrap();
    let target = 2f64.ln() / s.lambda.ln();
    assert!((target - target_order(&s)).abs() < 1e-15);
    assert!((est.slope - target).abs() < 0.05, "{} vs {target}", est.slope);
}

#[test]
fn report_lists_requested_orders() {
    let rep = poincare_report(DEFAULT_TERMS, 5).unwrap();
    assert_eq!(rep.orders.len(), 6);
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("\"lambda\""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_equation(r in 0.0f64..8.0, th in -3.2f64..3.2) {
        let s = solve_coefficients(DEFAULT_TERMS);
        let z = Complex64::from_polar(r, th);
        let lhs = s.eval(z * s.lambda).unwrap();
        let rhs = s.eval(z).unwrap().powi(2) - 1.0;
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn independent_of_extra_steps(r in 0.0f64..20.0, th in -3.2f64..3.2, extra in 1u32..4) {
        let s = solve_coefficients(DEFAULT_TERMS);
        let z = Complex64::from_polar(r, th);
        let m = s.required_steps(z);
        let a = s.evaluate(z, m).unwrap();
        let b = s.evaluate(z, m + extra).unwrap();
        prop_assert!((a - b).norm() <= 1e-7 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn log_abs_agrees_where_representable(r in 1.0f64..60.0, th in -3.2f64..3.2) {
        let s = solve_coefficients(DEFAULT_TERMS);
        let z = Complex64::from_polar(r, th);
        let v = s.eval(z).unwrap();
        prop_assume!(v.norm() > 1e-3 && v.norm().is_finite());
        prop_assert!((s.log_abs(z) - v.norm().ln()).abs() < 1e-6 * v.norm().ln().abs().max(1.0));
    }
}
