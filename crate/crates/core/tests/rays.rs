use cosine_bouquet::dynamics::*;
use cosine_bouquet::model::{potential_boundary, quadruple, ExternalAddress, Side, Symbol};
use cosine_bouquet::verify::random_admissible;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pi_sinh() -> CosineParams {
    CosineParams::pi_sinh()
}

#[test]
fn singular_values_are_plus_minus_pi_i() {
    let (v1, v2) = singular_values(&pi_sinh());
    let mut ims = [v1.im, v2.im];
    ims.sort_by(f64::total_cmp);
    assert!((ims[0] + std::f64::consts::PI).abs() < 1e-14);
    assert!((ims[1] - std::f64::consts::PI).abs() < 1e-14);
    assert!(v1.re.abs() < 1e-14 && v2.re.abs() < 1e-14);
}

#[test]
fn constant_ray_lands_at_a_repelling_fixed_point() {
    let f = pi_sinh();
    let s = ExternalAddress::constant(Symbol::r(2));
    let l = landing_point(&f, &s, 1e-12).unwrap();
    assert!((evaluate(&f, l.z) - l.z).norm() < 1e-8, "{}", l.z);
    assert!(derivative(&f, l.z).norm() > 1.0);
    // Newton on f(z) - z from the landing point stays put
    let mut z = l.z;
    for _ in 0..20 {
        z -= (evaluate(&f, z) - z) / (derivative(&f, z) - 1.0);
    }
    assert!((z - l.z).norm() < 1e-8);
}

#[test]
fn quadruple_rays_land_together() {
    let f = pi_sinh();
    let q = quadruple(true, &[], 1, 1).unwrap();
    let lands: Vec<Complex64> = q.iter().map(|s| landing_point(&f, s, 1e-11).unwrap().z).collect();
    for z in &lands[1..] {
        assert!((z - lands[0]).norm() < 1e-6, "{z} vs {}", lands[0]);
    }
}

#[test]
fn escape_classification() {
    let f = pi_sinh();
    assert_eq!(escape_classify(&f, c(0.0, 0.0), 50.0, 200).unwrap(), Escape::Bounded);
    assert!(matches!(escape_classify(&f, c(5.0, 0.0), 50.0, 200).unwrap(), Escape::Escaping(_)));
}

#[test]
fn disjoint_certificate_matches_the_real_maximum() {
    // on |z| = r the maximum of |sinh| is sinh r, on the real axis
    let g = CosineParams::disjoint_sinh(0.5);
    let cert = certify_disjoint_type(&g, 1.0).unwrap();
    assert!((cert.max_modulus - 0.5 * 1f64.sinh()).abs() < 1e-12);
    assert!(cert.verdict);
    let bad = certify_disjoint_type(&CosineParams::disjoint_sinh(1.0), 1.0).unwrap();
    assert!(!bad.verdict);
    let split = fundamental_domain_split(&g, 1.0).unwrap();
    assert!(split.separates(c(3.0, 0.1), c(3.0, 3.2)).unwrap());
    assert!(!split.separates(c(3.0, 0.1), c(4.0, -0.2)).unwrap());
    assert!(split.label(c(0.2, 0.0)).is_err());
}

#[test]
fn inadmissible_addresses_are_rejected() {
    // 1_R maps to the left half-plane, so it cannot be followed by 0_R
    let s: ExternalAddress = "1R|0R".parse().unwrap();
    assert!(check_admissible(&pi_sinh(), &s).is_err());
    assert!(landing_point(&pi_sinh(), &s, 1e-10).is_err());
}

#[test]
fn random_admissible_rays_are_functorial() {
    let f = pi_sinh();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let s = random_admissible(&mut rng, &f);
        let r = functoriality(&f, &s, 8, 30.0).unwrap();
        assert!(r.strips_match, "{s}: {:?}", r.strips);
        assert!(r.max_residual < 1e-8, "{s}: {}", r.max_residual);
    }
}

#[test]
fn ray_csv_header_and_rows() {
    let s = ExternalAddress::constant(Symbol::r(0));
    let tr = trace_ray_samples(&pi_sinh(), &s, &[1.0, 2.0, 3.0], 1e-12, true).unwrap();
    let csv = tr.to_csv();
    assert!(csv.starts_with("t,re,im,residual\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(tr.landing.unwrap().norm() < 1e-6);
}

fn strip() -> impl Strategy<Value = Symbol> {
    (any::<bool>(), -4i64..=4).prop_map(|(r, n)| Symbol::new(if r { Side::R } else { Side::L }, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_branch_inverts(s in strip(), re in -40.0f64..40.0, im in -40.0f64..40.0) {
        let w = c(re, im);
        prop_assume!(w.norm() > 1e-3 && (w - c(0.0, std::f64::consts::PI)).norm() > 1e-3
            && (w + c(0.0, std::f64::consts::PI)).norm() > 1e-3);
        let f = pi_sinh();
        // F(S_s) is a half-plane
        let right = image_side(&f, s).unwrap() == Side::R;
        prop_assume!((w.re > 1e-6) == right && w.re.abs() > 1e-6);
        let z = inverse_branch(&f, s, w).unwrap();
        prop_assert!((evaluate(&f, z) - w).norm() < 1e-10 * w.norm().max(1.0));
        prop_assert_eq!(strip_of(z).unwrap(), s);
    }

    #[test]
    fn conjugate_address_gives_conjugate_ray(seed in any::<u64>(), dt in 0.2f64..3.0) {
        let f = pi_sinh();
        let s = random_admissible(&mut ChaCha8Rng::seed_from_u64(seed), &f);
        let t = potential_boundary(&s, 1e-13).unwrap() + dt;
        let a = trace_ray(&f, &s, t, 8, 1e-12).unwrap().z;
        let b = trace_ray(&f, &s.conjugate(), t, 8, 1e-12).unwrap().z;
        prop_assert!((a.conj() - b).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn ray_points_map_along_the_shift(seed in any::<u64>(), dt in 0.2f64..3.0) {
        let f = pi_sinh();
        let s = random_admissible(&mut ChaCha8Rng::seed_from_u64(seed), &f);
        let t = potential_boundary(&s, 1e-13).unwrap() + dt;
        let p = trace_ray(&f, &s, t, 8, 1e-12).unwrap();
        if p.chain.len() > 1 {
            let w = evaluate(&f, p.chain[0]);
            prop_assert!((w - p.chain[1]).norm() < 1e-8 * w.norm().max(1.0));
        }
        prop_assert_eq!(strip_of(p.z).unwrap(), s.entry(0));
    }

    #[test]
    fn landing_points_commute_with_f(seed in any::<u64>()) {
        let f = pi_sinh();
        let s = random_admissible(&mut ChaCha8Rng::seed_from_u64(seed), &f);
        let a = landing_point(&f, &s, 1e-11).unwrap().z;
        let b = landing_point(&f, &s.shift(), 1e-11).unwrap().z;
        prop_assert!((evaluate(&f, a) - b).norm() < 1e-6 * b.norm().max(1.0), "{}: f({}) vs {}", s, a, b);
    }
}
