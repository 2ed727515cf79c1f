use cosine_bouquet::conjugacy::*;
use cosine_bouquet::dynamics::{evaluate, CosineParams, EntireMap};
use proptest::prelude::*;

fn cfg() -> ConjugacyConfig {
    build_config(&CosineParams::pi_sinh()).unwrap()
}

#[test]
fn l_is_the_ceiling_of_pi_sinh_nine() {
    // |π sinh| on |z| = 9 peaks on the real axis
    let c = cfg();
    assert_eq!(c.l, (std::f64::consts::PI * 9f64.sinh()).ceil());
    assert_eq!(c.mu, 8.0 / c.l);
}

#[test]
fn samples_are_g_orbits_outside_l() {
    let c = cfg();
    let g = c.g();
    for s in generate_samples(&c, 10, 8, 17).unwrap() {
        for w in s.orbit.windows(2) {
            let img = g.eval(w[0]);
            assert!((img - w[1]).norm() < 1e-9 * w[1].norm(), "{} -> {} vs {}", w[0], img, w[1]);
        }
        assert!(s.orbit.iter().all(|z| z.norm() > c.l));
    }
}

#[test]
fn phi_commutes_and_converges() {
    let c = cfg();
    let f = c.f;
    for s in generate_samples(&c, 6, 10, 5).unwrap() {
        let t = phi_table(&c, &s, 8).unwrap();
        // f(φ_{j+1}(z_0)) = φ_j(z_1)
        for j in 0..7 {
            let lhs = evaluate(&f, t.phi[j + 1][0]);
            assert!((lhs - t.phi[j][1]).norm() < 1e-8 * lhs.norm().max(1.0));
        }
        let r = fitted_ratio(&t.d, s.z().norm() * c.mu).unwrap_or(0.0);
        assert!(r < 0.9, "ratio {r}");
    }
}

#[test]
fn phi_is_odd() {
    let c = cfg();
    for s in generate_samples(&c, 4, 8, 23).unwrap() {
        let (a, _) = phi_iterate(&c, &s, 6).unwrap();
        let (b, _) = phi_iterate(&c, &s.mirrored(), 6).unwrap();
        assert!((a + b).norm() < 1e-9 * a.norm(), "{a} vs {b}");
    }
}

#[test]
fn distinct_points_stay_apart() {
    let c = cfg();
    let s = generate_samples(&c, 6, 8, 31).unwrap();
    let pairs: Vec<(Sample, Sample)> = s.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
    assert!(injectivity_probe(&c, &pairs, 6).unwrap().into_iter().all(|b| b));
    assert!(injectivity_probe(&c, &[(s[0].clone(), s[0].clone())], 6).is_err());
}

proptest! {
    #[test]
    fn fitted_ratio_recovers_geometric_rates(c0 in 0.1f64..10.0, q in 0.05f64..0.95) {
        let d: Vec<f64> = (0..12).map(|j| c0 * q.powi(j)).collect();
        let got = fitted_ratio(&d, 1.0).unwrap();
        prop_assume!(d[11] > 1e-12);
        prop_assert!((got - q).abs() < 1e-9);
    }
}
