//! The acceptance suite, shared by `bouquet verify` and the test harness.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conjugacy;
use crate::dynamics::{self, CosineParams, Escape};
use crate::error::{Error, Result};
use crate::model::{self, BrushVerdict, ExternalAddress, ModelPoint, Pinch, Side, Symbol};
use crate::orbifold::{self, Convention};
use crate::poincare;
use crate::render::{self, RenderConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub limit_seconds: f64,
    /// Failed checks, empty when passed.
    pub failures: Vec<String>,
    pub details: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {} ({}): {:.2}s{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            if self.failures.is_empty() {
                String::new()
            } else {
                format!(" [{}]", self.failures.join("; "))
            }
        )
    }
}

/// Collects named checks for one criterion.
struct Checks {
    failures: Vec<String>,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn run<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

fn finish(id: u8, name: &'static str, limit: f64, start: Instant, c: Checks) -> CriterionResult {
    let seconds = start.elapsed().as_secs_f64();
    let mut failures = c.failures;
    if seconds > limit {
        failures.push(format!("runtime {seconds:.1}s over {limit}s"));
    }
    CriterionResult {
        id,
        name,
        passed: failures.is_empty(),
        seconds,
        limit_seconds: limit,
        failures,
        details: c.details,
    }
}

/// An eventually periodic address with up to 2 preperiodic and 1 to 3
/// periodic symbols, `|n| ≤ 5`.
pub fn random_address(rng: &mut ChaCha8Rng) -> ExternalAddress {
    let sym = |rng: &mut ChaCha8Rng| {
        let side = if rng.gen_bool(0.5) { Side::R } else { Side::L };
        Symbol::new(side, rng.gen_range(-5..=5))
    };
    let pre = (0..rng.gen_range(0..3)).map(|_| sym(rng)).collect();
    let per = (0..rng.gen_range(1..4)).map(|_| sym(rng)).collect();
    ExternalAddress::new(pre, per).expect("nonempty period")
}

/// An address realisable by `π sinh`: each symbol's side is the side its
/// predecessor's strip maps to; `|n| ≤ 3`.
pub fn random_admissible(rng: &mut ChaCha8Rng, f: &CosineParams) -> ExternalAddress {
    loop {
        let pre = rng.gen_range(0..3);
        let per = rng.gen_range(1..4);
        let mut side = if rng.gen_bool(0.5) { Side::R } else { Side::L };
        let mut v = Vec::with_capacity(pre + per);
        for _ in 0..pre + per {
            let s = Symbol::new(side, rng.gen_range(-3..=3));
            v.push(s);
            side = dynamics::image_side(f, s).unwrap_or(side);
        }
        let a = ExternalAddress::new(v[..pre].to_vec(), v[pre..].to_vec()).expect("nonempty period");
        if dynamics::check_admissible(f, &a).is_ok() {
            return a;
        }
    }
}

/// Model steps for the brush check; near `t_s = 0` the potential creeps up
/// by about `t²/2` per step.
const BRUSH_DEPTH: usize = 10_000;

/// 1: endpoint potentials and the brush trichotomy.
pub fn model_endpoints() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    if let Some(t) = c.run("t of 0R", model::potential_boundary(&ExternalAddress::constant(Symbol::r(0)), 1e-12)) {
        c.check(t == 0.0, format!("t_(0R) = {t}"));
    }
    let mut oracle = 0.0f64;
    for _ in 0..60 {
        oracle = (1.0 + PI + oracle).ln();
    }
    if let Some(t) = c.run("t of 1R", model::potential_boundary(&ExternalAddress::constant(Symbol::r(1)), 1e-12)) {
        c.check((t - oracle).abs() < 1e-6, format!("t_(1R) = {t}, oracle {oracle}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut consistent = 0;
    for _ in 0..100 {
        let s = random_address(&mut rng);
        let Some(t_s) = c.run(&format!("t of {s}"), model::potential_boundary(&s, 1e-12)) else {
            continue;
        };
        let above = ModelPoint::new(s.clone(), t_s + 1e-3).and_then(|p| model::brush_membership(&p, BRUSH_DEPTH));
        let below = if t_s >= 1e-3 {
            ModelPoint::new(s.clone(), t_s - 1e-3)
                .and_then(|p| model::brush_membership(&p, BRUSH_DEPTH))
                .map(|m| m.verdict == BrushVerdict::NotInXbar)
        } else {
            Ok(true)
        };
        match (above, below) {
            (Ok(a), Ok(true)) if a.verdict == BrushVerdict::InX => consistent += 1,
            (a, b) => c.check(false, format!("{s} at t_s = {t_s}: above {a:?}, below NotInXbar {b:?}")),
        }
    }
    c.check(consistent == 100, format!("{consistent}/100 addresses consistent at t_s ± 1e-3"));
    finish(1, "model endpoints", 5.0, start, c)
}

/// 2: the semiconjugacy on 200 samples.
pub fn semiconjugacy() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let f = CosineParams::pi_sinh();
    let Some(cfg) = c.run("build_config", conjugacy::build_config(&f)) else {
        return finish(2, "semiconjugacy", 60.0, start, c);
    };
    c.check(
        cfg.k == 8.0 && cfg.l == 12729.0 && (cfg.mu - 6.2849e-4).abs() < 1e-7,
        format!("K = {}, L = {}, mu = {:e}", cfg.k, cfg.l, cfg.mu),
    );
    let jmax = 12;
    if let Some(samples) = c.run("samples", conjugacy::generate_samples(&cfg, 200, jmax + 1, 2024)) {
        if let Some(rep) = c.run("convergence", conjugacy::convergence_report(&cfg, &samples, jmax)) {
            c.check(
                rep.max_commutation_residual < 1e-8,
                format!("max commutation residual {:e}", rep.max_commutation_residual),
            );
            let bad = rep
                .samples
                .iter()
                .filter(|s| !s.fitted_ratio.is_some_and(|r| r < 0.9))
                .count();
            c.check(bad == 0, format!("fitted ratio < 0.9 on {}/200 samples (max {:.3})", 200 - bad, rep.fitted_ratio));
            c.check(rep.budget.is_finite() && rep.budget > 0.0, format!("budget {}", rep.budget));
        }
        let pairs: Vec<_> = (0..20).map(|i| (samples[2 * i].clone(), samples[2 * i + 1].clone())).collect();
        if let Some(sep) = c.run("injectivity", conjugacy::injectivity_probe(&cfg, &pairs, jmax)) {
            let ok = sep.iter().filter(|b| **b).count();
            c.check(ok == 20, format!("{ok}/20 pairs separated by > 1e-6"));
        }
    }
    finish(2, "semiconjugacy", 60.0, start, c)
}

/// Pairs from the listed quadruples with `n ≥ 1`.
pub fn pinched_pairs() -> Result<Vec<(ExternalAddress, ExternalAddress)>> {
    let params = [(true, 0, 1, 1), (true, 1, 1, 2), (false, 0, 1, 3), (false, -1, 2, 1), (true, 2, 1, 3)];
    params
        .iter()
        .map(|&(left, m, n, k)| {
            let q = model::quadruple(left, &[], m, n)?;
            Ok((q[0].clone(), q[k].clone()))
        })
        .collect()
}

/// Pairs of realisable addresses that the itinerary rule calls not pinched.
pub fn non_pinched_pairs(f: &CosineParams, count: usize) -> Result<Vec<(ExternalAddress, ExternalAddress)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = Vec::new();
    for _ in 0..200 {
        if out.len() == count {
            break;
        }
        let a = random_admissible(&mut rng, f);
        let b = random_admissible(&mut rng, f);
        if a == b || a.zero_tail_start().is_some() || b.zero_tail_start().is_some() {
            continue;
        }
        if model::pinched(&a, &b, f, 10)? == Pinch::NotPinched {
            out.push((a, b));
        }
    }
    if out.len() < count {
        return Err(Error::SearchFailure);
    }
    Ok(out)
}

/// 3: rays, landing points and pinching.
pub fn rays_and_pinching() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let f = CosineParams::pi_sinh();
    let zero = ExternalAddress::constant(Symbol::r(0));
    let ts: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64).collect();
    if let Some(tr) = c.run("trace 0R", dynamics::trace_ray_samples(&f, &zero, &ts, 1e-12, false)) {
        let m = tr.samples.iter().map(|(_, z)| z.im.abs()).fold(0.0, f64::max);
        c.check(m < 1e-9, format!("ray 0R: max |Im| = {m:e} over 10 potentials"));
    }
    if let Some(l) = c.run("landing 0R", dynamics::landing_point(&f, &zero, 1e-10)) {
        c.check(l.z.norm() < 1e-6, format!("0R lands at {}", l.z));
    }
    if let Some(pairs) = c.run("pinched pairs", pinched_pairs()) {
        for (a, b) in pairs {
            let verdict = model::pinched(&a, &b, &f, 10);
            let la = dynamics::landing_point(&f, &a, 1e-10);
            let lb = dynamics::landing_point(&f, &b, 1e-10);
            match (verdict, la, lb) {
                (Ok(Pinch::Pinched), Ok(x), Ok(y)) => {
                    let d = (x.z - y.z).norm();
                    c.check(d < 1e-6, format!("{a} ~ {b}: landing distance {d:e}"));
                }
                other => c.check(false, format!("{a} ~ {b}: {other:?}")),
            }
        }
    }
    if let Some(pairs) = c.run("non-pinched pairs", non_pinched_pairs(&f, 5)) {
        for (a, b) in pairs {
            match (dynamics::landing_point(&f, &a, 1e-10), dynamics::landing_point(&f, &b, 1e-10)) {
                (Ok(x), Ok(y)) => {
                    let d = (x.z - y.z).norm();
                    c.check(d > 1e-3, format!("{a} vs {b}: landing distance {d:.4}"));
                }
                other => c.check(false, format!("{a} vs {b}: {other:?}")),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = 0;
    for _ in 0..50 {
        let s = random_admissible(&mut rng, &f);
        match dynamics::functoriality(&f, &s, 10, 30.0) {
            Ok(r) if r.strips_match && r.max_residual < 1e-8 => ok += 1,
            other => c.check(false, format!("functoriality {s}: {other:?}")),
        }
    }
    c.check(ok == 50, format!("functoriality on {ok}/50 addresses"));
    finish(3, "rays and pinching", 60.0, start, c)
}

/// 4: the orbifold bound chain.
pub fn orbifold_bounds() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let oracle = 1.0 / (2.0 * 2f64.sqrt() * (4.0 + (3.0 + 2.0 * 2f64.sqrt()).ln()));
    if let Some(v) = c.run("B-P at -1", orbifold::density_lower_punctured01(Complex64::new(-1.0, 0.0))) {
        c.check(
            (v - 0.0613511).abs() < 1e-6 && (v - oracle).abs() < 1e-15,
            format!("B-P(-1) = {v}"),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ratio_bad, mut log_bad, mut log_applies, mut chain_bad) = (0, 0, 0, 0);
    for _ in 0..10_000 {
        let z = Complex64::new(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0));
        if orbifold::o0_ratio(z) > 2f64.sqrt() + 1e-12 {
            ratio_bad += 1;
        }
        let s = (1.0 - z.exp()).sqrt();
        if (1.0 - s).norm() >= 1.0 {
            log_applies += 1;
            if orbifold::o0_log_term(z) > LN_2 + z.re.abs() + 1e-12 {
                log_bad += 1;
            }
        }
        if orbifold::density_lower_o0(z, Convention::ExpZ) < 1.0 / (60.0 + 8.0 * z.re.abs()) {
            chain_bad += 1;
        }
    }
    c.check(ratio_bad == 0, format!("sqrt(2) bound violated on {ratio_bad}/10000"));
    c.check(log_bad == 0, format!("log 2 + |Re z| bound violated on {log_bad}/{log_applies}"));
    c.check(chain_bad == 0, format!("chain below 1/(60 + 8|Re z|) on {chain_bad}/10000"));
    if let Ok(spec) = orbifold::OrbifoldSpec::arithmetic(Complex64::new(2.0 * PI, 0.0)) {
        let radii = poincare::log_spaced(10.0, 1e6, 50);
        let vals: Vec<Result<f64>> = radii
            .iter()
            .map(|&r| orbifold::theorem_main2_bound(&spec, 2.0, Complex64::new(r, 0.0)))
            .collect();
        let positive = vals.iter().filter(|v| matches!(v, Ok(x) if *x > 0.0)).count();
        c.check(positive == 50, format!("main estimate positive at {positive}/50 radii"));
        if positive == 50 {
            let ys: Vec<f64> = vals.iter().map(|v| v.as_ref().map_or(0.0, |x| x.ln())).collect();
            let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
            let slope = least_squares_slope(&xs, &ys);
            c.check((slope + 1.0).abs() <= 0.1, format!("log-log slope {slope:.4}"));
        }
    }
    finish(4, "orbifold bounds", 30.0, start, c)
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// 5: uniform expansion along the positive real axis.
pub fn expansion() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let f = CosineParams::pi_sinh();
    if let Some(cert) = c.run("expansion estimate", orbifold::expansion_estimate(&f, 8.0)) {
        let below = cert.bounds.iter().filter(|b| **b <= 1.0).count();
        c.check(
            below == 0,
            format!("bound > 1 at {}/{} grid points (min {:.4})", cert.bounds.len() - below, cert.bounds.len(), cert.min_bound),
        );
        let monotone = cert.bounds.windows(2).all(|w| w[1] > w[0]);
        c.check(monotone, "bound increasing along the grid");
        c.check(cert.e_est >= 1.05, format!("E_est = {:.4}", cert.e_est));
    }
    finish(5, "expansion", 10.0, start, c)
}

/// 6: the Poincaré function.
pub fn poincare_function() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let s = poincare::solve_coefficients(40);
    let a2 = 1.0 / (5.0 + 5f64.sqrt());
    c.check((s.coeffs[2] - a2).abs() < 1e-12, format!("a2 = {}", s.coeffs[2]));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let z = Complex64::from_polar(0.5 * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
        match (s.eval(s.lambda * z), s.eval(z)) {
            (Ok(a), Ok(b)) => worst = worst.max((a - (b * b - 1.0)).norm()),
            _ => worst = f64::INFINITY,
        }
    }
    c.check(worst < 1e-9, format!("functional-equation residual {worst:e}"));
    if let Some(crit) = c.run("critical preimage", poincare::find_critical_preimage(&s, 40.0)) {
        for n in 0..=10 {
            if let Some(k) = c.run(&format!("order at n = {n}"), poincare::vanishing_order_at(&s, &crit, n)) {
                c.check(k >= n as usize, format!("ord at z_{n} = {k}"));
            }
        }
    }
    if let Some(g) = c.run("growth", poincare::order_of_growth_estimate(&s, &poincare::log_spaced(1e2, 1e6, 25))) {
        let cap = 2f64.ln() / 3f64.ln();
        c.check(
            (0.54..=0.64).contains(&g.slope) && g.slope < cap,
            format!("growth slope {:.4} (target {:.4})", g.slope, poincare::target_order(&s)),
        );
    }
    finish(6, "Poincaré function", 30.0, start, c)
}

/// 7: disjoint-type certificate and fundamental domains.
pub fn certificates() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let g = CosineParams::disjoint_sinh(0.5);
    if let Some(cert) = c.run("certificate", dynamics::certify_disjoint_type(&g, 1.0)) {
        let oracle = 0.5 * 1f64.sinh();
        c.check(cert.verdict && cert.margin > 0.4, format!("margin {:.4}", cert.margin));
        c.check((cert.max_modulus - oracle).abs() < 1e-6, format!("max |g| = {:.6}", cert.max_modulus));
    }
    if let Some(split) = c.run("split", dynamics::fundamental_domain_split(&g, 1.0)) {
        let (z, w) = (Complex64::new(5.0, 0.0), Complex64::new(5.0, 2.0 * PI));
        for p in [z, w] {
            let e = dynamics::escape_classify(&g, p, 2.0, 50);
            c.check(matches!(e, Ok(Escape::Escaping(_))), format!("{p} escapes: {e:?}"));
        }
        match (split.label(z), split.label(w), split.separates(z, w)) {
            (Ok(a), Ok(b), Ok(true)) => c.check(a != b, format!("labels {a} and {b} separate")),
            other => c.check(false, format!("split: {other:?}")),
        }
    }
    finish(7, "certificates", 5.0, start, c)
}

/// The 512² window used by the determinism criterion.
pub fn determinism_config(threads: usize) -> RenderConfig {
    RenderConfig {
        overlays: vec![ExternalAddress::constant(Symbol::r(0))],
        threads,
        ..RenderConfig::pi_sinh_default()
    }
}

/// 8: byte-identical renders.
pub fn determinism() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let runs: Vec<Result<Vec<u8>>> = [1, 8, 1]
        .iter()
        .map(|&t| render::render(&determinism_config(t)).map(|i| i.to_ppm()))
        .collect();
    match (&runs[0], &runs[1], &runs[2]) {
        (Ok(a), Ok(b), Ok(a2)) => {
            c.check(a == b, "threads 1 and 8 identical");
            c.check(a == a2, "repeated run identical");
        }
        _ => c.check(false, format!("render failed: {:?}", runs.iter().find_map(|r| r.as_ref().err()))),
    }
    finish(8, "determinism", 30.0, start, c)
}

pub type Criterion = fn() -> CriterionResult;

pub const ACCEPTANCE: [(&str, Criterion); 8] = [
    ("model", model_endpoints),
    ("conjugacy", semiconjugacy),
    ("rays", rays_and_pinching),
    ("orbifold", orbifold_bounds),
    ("expansion", expansion),
    ("poincare", poincare_function),
    ("certificates", certificates),
    ("determinism", determinism),
];

/// Runs the named suite: `acceptance` for all criteria or one of the
/// names in [`ACCEPTANCE`].
pub fn run_suite(name: &str) -> Result<Vec<CriterionResult>> {
    if name == "acceptance" {
        return Ok(ACCEPTANCE.iter().map(|(_, f)| f()).collect());
    }
    ACCEPTANCE
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| vec![f()])
        .ok_or_else(|| Error::InvalidInput(format!("unknown suite {name:?}")))
}
