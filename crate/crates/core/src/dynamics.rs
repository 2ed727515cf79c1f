//! Numerics for the cosine family `F(z) = a·e^z + b·e^{-z}`.
//!
//! Rays are traced by pulling a point far out in the strip of `s_D` back
//! through the inverse branches for `s_{D-1}, …, s_0`. The start point sits
//! on the strip midline at the model potential `T(M^D(s, t))`, so the
//! traced point is `γ_s(t)` up to an error that contracts under pullback.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ExternalAddress, Side, Symbol};

/// Boundary samples used by the maximum-modulus certificate.
pub const MAX_MODULUS_SAMPLES: usize = 4096;

/// Cap on the pullback depth of the ray tracer.
pub const MAX_RAY_DEPTH: usize = 64;

/// Model potential after which one more level of depth is invisible.
const SATURATION: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineParams {
    pub a: Complex64,
    pub b: Complex64,
}

impl CosineParams {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        if a == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidInput("a and b must be nonzero".into()));
        }
        Ok(CosineParams { a, b })
    }

    /// `π·sinh z`.
    pub fn pi_sinh() -> Self {
        Self::disjoint_sinh(PI)
    }

    /// `λ·sinh z`, of disjoint type for small `λ > 0`.
    pub fn disjoint_sinh(lambda: f64) -> Self {
        CosineParams {
            a: Complex64::new(lambda / 2.0, 0.0),
            b: Complex64::new(-lambda / 2.0, 0.0),
        }
    }

    /// `Some(λ)` when the map is `λ·sinh` with real `λ > 0`.
    pub fn sinh_multiplier(&self) -> Option<f64> {
        let real = self.a.im == 0.0 && self.b.im == 0.0;
        (real && self.a.re > 0.0 && self.b.re == -self.a.re).then_some(2.0 * self.a.re)
    }
}

impl fmt::Display for CosineParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} b={}", self.a, self.b)
    }
}

/// An entire map with enough data for the disjoint-type certificate.
pub trait EntireMap: Sync {
    fn eval(&self, z: Complex64) -> Complex64;
    fn deriv(&self, z: Complex64) -> Complex64;
    fn singular_values(&self) -> Vec<Complex64>;
}

impl EntireMap for CosineParams {
    fn eval(&self, z: Complex64) -> Complex64 {
        evaluate(self, z)
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        derivative(self, z)
    }

    fn singular_values(&self) -> Vec<Complex64> {
        let (v1, v2) = singular_values(self);
        vec![v1, v2]
    }
}

/// `z ↦ f(μz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaled {
    pub f: CosineParams,
    pub mu: Complex64,
}

impl EntireMap for Rescaled {
    fn eval(&self, z: Complex64) -> Complex64 {
        evaluate(&self.f, self.mu * z)
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        self.mu * derivative(&self.f, self.mu * z)
    }

    fn singular_values(&self) -> Vec<Complex64> {
        self.f.singular_values()
    }
}

/// `a·e^z + b·e^{-z}`. Beyond the exponent range the result is non-finite.
pub fn evaluate(f: &CosineParams, z: Complex64) -> Complex64 {
    f.a * z.exp() + f.b * (-z).exp()
}

pub fn derivative(f: &CosineParams, z: Complex64) -> Complex64 {
    f.a * z.exp() - f.b * (-z).exp()
}

/// The critical values `±2√(ab)`; there are no asymptotic values.
pub fn singular_values(f: &CosineParams) -> (Complex64, Complex64) {
    let v = 2.0 * (f.a * f.b).sqrt();
    (v, -v)
}

/// The half-strip `S_n` (height `π`, centred at `nπ`) containing `z`.
pub fn strip_of(z: Complex64) -> Result<Symbol> {
    let h = z.im / PI;
    let n = h.round();
    let boundary = (h - n).abs() == 0.5;
    if z.re == 0.0 || boundary || !z.is_finite() {
        let lo = if boundary { h.floor() } else { n } as i64;
        let hi = if boundary { lo + 1 } else { lo };
        let side = if z.re < 0.0 { Side::L } else { Side::R };
        return Err(Error::StripBoundary {
            z,
            below: Symbol::new(if z.re == 0.0 { Side::L } else { side }, lo),
            above: Symbol::new(if z.re == 0.0 { Side::R } else { side }, hi),
        });
    }
    let side = if z.re > 0.0 { Side::R } else { Side::L };
    Ok(Symbol::new(side, n as i64))
}

fn in_strip(z: Complex64, s: Symbol, guard: f64) -> bool {
    let side_ok = match s.side {
        Side::R => z.re > guard,
        Side::L => z.re < -guard,
    };
    side_ok && (z.im - s.index as f64 * PI).abs() < PI / 2.0 - guard
}

fn strip_distance(z: Complex64, s: Symbol) -> f64 {
    let side = match s.side {
        Side::R => (-z.re).max(0.0),
        Side::L => z.re.max(0.0),
    };
    let height = ((z.im - s.index as f64 * PI).abs() - PI / 2.0).max(0.0);
    side.hypot(height)
}

/// Both roots of `a·u² - w·u + b = 0`, i.e. the values `e^z` with `F(z) = w`.
///
/// The larger root comes from a cancellation-free formula and the other from
/// the product of roots. For large `|w|` the discriminant is formed as
/// `w·√(1 - 4ab/w²)` so that `w²` never overflows.
pub(crate) fn exp_roots(f: &CosineParams, w: Complex64) -> (Complex64, Complex64, f64) {
    let four_ab = 4.0 * f.a * f.b;
    let q = if w.norm() >= 1.0 {
        w * (1.0 + (1.0 - four_ab / w / w).sqrt()) / 2.0
    } else {
        let d = (w * w - four_ab).sqrt();
        if (w + d).norm() >= (w - d).norm() {
            (w + d) / 2.0
        } else {
            (w - d) / 2.0
        }
    };
    let u1 = q / f.a;
    // b / q without forming |q|², which overflows for huge q
    let m = q.norm();
    let u2 = f.b * ((q / m).conj() / m);
    let disc = (w * w - four_ab).norm() / (w.norm_sqr() + four_ab.norm()).max(f64::MIN_POSITIVE);
    (u1, u2, disc)
}

/// Every `z` with `e^z = u` and `Im z` within `π` of `center`.
fn log_near(u: Complex64, center: f64) -> [Complex64; 2] {
    let base = u.ln();
    let k = ((center - base.im) / (2.0 * PI)).round();
    let z = Complex64::new(base.re, base.im + 2.0 * PI * k);
    let other = if z.im > center {
        z - Complex64::new(0.0, 2.0 * PI)
    } else {
        z + Complex64::new(0.0, 2.0 * PI)
    };
    [z, other]
}

/// The unique `z ∈ S_s` with `F(z) = w`.
pub fn inverse_branch(f: &CosineParams, s: Symbol, w: Complex64) -> Result<Complex64> {
    if !w.is_finite() {
        return Err(Error::Branch { strip: s, w });
    }
    let (u1, u2, disc) = exp_roots(f, w);
    if disc < 1e-15 {
        return Err(Error::CriticalValue { w });
    }
    let center = s.index as f64 * PI;
    [u1, u2]
        .into_iter()
        .flat_map(|u| log_near(u, center))
        .find(|&z| in_strip(z, s, 0.0))
        .ok_or(Error::Branch { strip: s, w })
}

/// The preimage of `w` closest to the closed strip `S̄_s`. Used where the
/// target lies on a strip boundary, as landing points may.
pub fn inverse_branch_closure(f: &CosineParams, s: Symbol, w: Complex64) -> Result<Complex64> {
    if !w.is_finite() {
        return Err(Error::Branch { strip: s, w });
    }
    let (u1, u2, _) = exp_roots(f, w);
    let center = s.index as f64 * PI;
    let best = [u1, u2]
        .into_iter()
        .flat_map(|u| log_near(u, center))
        .map(|z| (strip_distance(z, s), z))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("four candidates");
    if best.0 > 1e-6 {
        return Err(Error::Branch { strip: s, w });
    }
    Ok(best.1)
}

/// For `λ·sinh` with real `λ > 0`: the side of the half-plane `F(S_s)`.
pub fn image_side(f: &CosineParams, s: Symbol) -> Option<Side> {
    f.sinh_multiplier()?;
    let even = s.index.rem_euclid(2) == 0;
    Some(match (s.side, even) {
        (Side::R, true) | (Side::L, false) => Side::R,
        _ => Side::L,
    })
}

/// Checks that consecutive symbols are compatible with the strip images,
/// so the ray of `s` exists. Maps outside the real sinh family pass.
pub fn check_admissible(f: &CosineParams, s: &ExternalAddress) -> Result<()> {
    for i in 0..s.horizon() {
        if let Some(side) = image_side(f, s.entry(i)) {
            if side != s.entry(i + 1).side {
                return Err(Error::Inadmissible {
                    address: s.to_string(),
                    index: i,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Escape {
    Escaping(usize),
    Bounded,
    Undecided,
}

pub fn escape_classify(f: &CosineParams, z: Complex64, radius: f64, maxiter: usize) -> Result<Escape> {
    let (v1, v2) = singular_values(f);
    if !(radius > v1.norm().max(v2.norm()) + 1.0) {
        return Err(Error::InvalidInput(format!(
            "escape radius {radius} must exceed the critical values by 1"
        )));
    }
    Ok(escape_time(f, z, radius, maxiter))
}

/// [`escape_classify`] without the radius check, for the renderer's inner loop.
pub(crate) fn escape_time(f: &CosineParams, z: Complex64, radius: f64, maxiter: usize) -> Escape {
    let mut z = z;
    let mut last = z.norm();
    let mut run = 0;
    let mut left = last > radius;
    for n in 1..=maxiter {
        z = evaluate(f, z);
        let m = z.norm();
        if !m.is_finite() {
            return Escape::Escaping(n);
        }
        if m > radius {
            left = true;
            run = if m > last { run + 1 } else { 0 };
            if run >= 3 {
                return Escape::Escaping(n);
            }
        } else {
            run = 0;
        }
        last = m;
    }
    if left {
        Escape::Undecided
    } else {
        Escape::Bounded
    }
}

/// One traced ray point.
#[derive(Debug, Clone, PartialEq)]
pub struct RayPoint {
    pub t: f64,
    pub z: Complex64,
    /// Pullback depth of the accepted result.
    pub depth: usize,
    /// `chain[k]` lies on the ray of `σ^k(s)`; `chain[0] = z`. The start
    /// point at full depth is omitted when it is not representable.
    pub chain: Vec<Complex64>,
    /// `|z_D - z_{D'}|` between consecutive depths of the schedule.
    pub residuals: Vec<f64>,
}

/// Preimage in `S_s` of the point whose logarithm is `log_w`, for `|w|`
/// too large to represent. Exact up to a relative `O(|ab|/|w|²)`.
fn inverse_branch_log(f: &CosineParams, s: Symbol, log_w: Complex64) -> Result<Complex64> {
    let center = s.index as f64 * PI;
    [log_w - f.a.ln(), f.b.ln() - log_w]
        .into_iter()
        .flat_map(|z| log_near(z.exp_unit(), center).map(|c| Complex64::new(z.re, c.im)))
        .find(|&z| in_strip(z, s, 0.0))
        .ok_or(Error::Branch {
            strip: s,
            w: Complex64::new(f64::INFINITY, 0.0),
        })
}

trait ExpUnit {
    fn exp_unit(self) -> Complex64;
}

impl ExpUnit for Complex64 {
    /// `e^{i·Im z}`, which carries the argument without overflow.
    fn exp_unit(self) -> Complex64 {
        Complex64::from_polar(1.0, self.im)
    }
}

/// Start potentials above this are pulled back in logarithmic form.
const LOG_START: f64 = 1.0e8;

fn pull_back(
    f: &CosineParams,
    s: &ExternalAddress,
    potentials: &[f64],
    depth: usize,
) -> Result<Vec<Complex64>> {
    let top = s.entry(depth);
    let sign = if top.side == Side::R { 1.0 } else { -1.0 };
    let height = PI * top.index as f64;
    let t = potentials[depth];
    let mut chain = vec![Complex64::new(0.0, 0.0); depth + 1];
    chain[depth] = Complex64::new(sign * t, height);
    if t > LOG_START {
        let log_w = if t.is_finite() {
            chain[depth].ln()
        } else {
            // T_D = e^{T_{D-1}} - O(1) overflows; its logarithm is T_{D-1}
            Complex64::new(potentials[depth - 1], if sign > 0.0 { 0.0 } else { PI })
        };
        chain[depth - 1] = inverse_branch_log(f, s.entry(depth - 1), log_w)?;
    } else {
        chain[depth - 1] = inverse_branch(f, s.entry(depth - 1), chain[depth])?;
    }
    for k in (0..depth - 1).rev() {
        chain[k] = inverse_branch(f, s.entry(k), chain[k + 1])?;
    }
    Ok(chain)
}

/// The point `γ_s(t)`, pulled back from depth `depth`, doubling the depth
/// until consecutive results differ by less than `tol`.
///
/// Once a model potential `T_k` exceeds 40 the start at depth `k + 1` is
/// within `e^{-40}` of the ray relative to its size, so deeper starts change
/// nothing in double precision and the schedule stops there.
pub fn trace_ray(f: &CosineParams, s: &ExternalAddress, t: f64, depth: usize, tol: f64) -> Result<RayPoint> {
    if depth < 1 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    check_admissible(f, s)?;
    let t_s = model::potential_boundary(s, 1e-14)?;
    if !(t > t_s) {
        return Err(Error::BelowEndpoint { t, t_s });
    }
    let potentials = model::potential_orbit(s, t, MAX_RAY_DEPTH);
    if potentials.iter().any(|&p| p < 0.0) {
        return Err(Error::BelowEndpoint { t, t_s });
    }
    let saturated = potentials.iter().position(|&p| p > SATURATION);
    let max_depth = saturated.map_or(potentials.len() - 1, |k| (k + 1).min(MAX_RAY_DEPTH));
    let deep = saturated.is_some_and(|k| k < MAX_RAY_DEPTH);

    let mut d = depth.min(max_depth);
    let mut chain = pull_back(f, s, &potentials, d)?;
    let mut residuals = Vec::new();
    loop {
        if d >= max_depth {
            if deep || residuals.last().is_some_and(|&r| r < tol) {
                break;
            }
            return Err(Error::RayNonConvergence { residuals });
        }
        let next = (2 * d).min(max_depth);
        let next_chain = pull_back(f, s, &potentials, next)?;
        let r = (next_chain[0] - chain[0]).norm();
        residuals.push(r);
        chain = next_chain;
        d = next;
        if r < tol {
            break;
        }
    }
    if !chain[d].is_finite() {
        chain.pop();
    }
    Ok(RayPoint {
        t,
        z: chain[0],
        depth: d,
        chain,
        residuals,
    })
}

/// Samples of one ray, ordered by decreasing potential.
#[derive(Debug, Clone, PartialEq)]
pub struct RayTrace {
    pub address: ExternalAddress,
    pub samples: Vec<(f64, Complex64)>,
    pub landing: Option<Complex64>,
    pub residuals: Vec<f64>,
}

impl RayTrace {
    /// CSV with columns `t,re,im,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im,residual\n");
        for ((t, z), r) in self.samples.iter().zip(&self.residuals) {
            out.push_str(&format!("{},{},{},{}\n", t, z.re, z.im, r));
        }
        out
    }
}

pub fn trace_ray_samples(
    f: &CosineParams,
    s: &ExternalAddress,
    potentials: &[f64],
    tol: f64,
    with_landing: bool,
) -> Result<RayTrace> {
    let mut ts = potentials.to_vec();
    ts.sort_by(|a, b| b.total_cmp(a));
    let mut samples = Vec::with_capacity(ts.len());
    let mut residuals = Vec::with_capacity(ts.len());
    for t in ts {
        let p = trace_ray(f, s, t, 4, tol)?;
        samples.push((t, p.z));
        residuals.push(p.residuals.last().copied().unwrap_or(0.0));
    }
    let landing = if with_landing {
        Some(landing_point(f, s, tol)?.z)
    } else {
        None
    };
    Ok(RayTrace {
        address: s.clone(),
        samples,
        landing,
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landing {
    pub z: Complex64,
    pub error_estimate: f64,
}

/// Landing point of the ray `γ_s`.
///
/// The periodic tail lands at a fixed point of the composed inverse branches
/// along one period; it is found by iterating that composition from a ray
/// point, which walks down the ray. The preperiod is then pulled back with
/// branches onto the closed strips. Tails constant at `0_R` or `0_L` land at
/// the fixed point `0`.
pub fn landing_point(f: &CosineParams, s: &ExternalAddress, tol: f64) -> Result<Landing> {
    const MAX_ITER: usize = 20_000;
    check_admissible(f, s)?;
    let pre = s.preperiod().len();
    let per = s.period().len();
    let tail = s.shift_by(pre);

    let (mut z, mut err) = if tail.zero_tail_start().is_some() && f.sinh_multiplier().is_some() {
        (Complex64::new(0.0, 0.0), 0.0)
    } else {
        let t_s = model::potential_boundary(&tail, 1e-14)?;
        let mut z = trace_ray(f, &tail, t_s + 1.0, 4, 1e-12)?.z;
        let block = |z: Complex64| -> Result<Complex64> {
            let mut z = z;
            for i in (0..per).rev() {
                z = inverse_branch_closure(f, tail.entry(i), z)?;
            }
            Ok(z)
        };
        let mut last_step = f64::INFINITY;
        let mut last_ratio = f64::INFINITY;
        let mut err = f64::INFINITY;
        let mut done = false;
        for _ in 0..MAX_ITER {
            let next = block(z)?;
            let step = (next - z).norm();
            z = next;
            // the contraction is a rotation-scaling, so step ratios wobble
            let ratio = step / last_step;
            let q = ratio.max(last_ratio);
            last_ratio = ratio;
            last_step = step;
            if step == 0.0 {
                err = 0.0;
                done = true;
                break;
            }
            if q < 1.0 {
                err = step * q / (1.0 - q);
                if err < tol * 1e-2 {
                    done = true;
                    break;
                }
            }
        }
        if !done {
            return Err(Error::LandingNonConvergence { last_step });
        }
        (z, err)
    };

    for i in (0..pre).rev() {
        let next = inverse_branch_closure(f, s.entry(i), z)?;
        let d = derivative(f, next).norm();
        if d > 0.0 {
            err /= d;
        }
        z = next;
    }
    Ok(Landing { z, error_estimate: err })
}

/// Result of comparing `f(γ_{σ^k s}(t_k))` with `γ_{σ^{k+1} s}(t_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Functoriality {
    pub t: f64,
    /// `strip_of` of each traced point `γ_{σ^k s}(t_k)`.
    pub strips: Vec<Symbol>,
    pub strips_match: bool,
    pub max_residual: f64,
}

/// Traces `σ^k(s)` at its model potential `t_k` for `k ≤ entries` and
/// checks that the strip of each point is `s_k` and that `f` maps each
/// point onto the next. The base potential is chosen above `t_s` so that the
/// model potentials stay at most `cap`.
pub fn functoriality(f: &CosineParams, s: &ExternalAddress, entries: usize, cap: f64) -> Result<Functoriality> {
    let t_s = model::potential_boundary(s, 1e-14)?;
    let top = |t: f64| {
        model::potential_orbit(s, t, entries)
            .iter()
            .fold(0.0f64, |m, &p| if p.is_finite() { m.max(p) } else { f64::INFINITY })
    };
    let (mut lo, mut hi) = (t_s, t_s + 1.0);
    if top(hi) > cap {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if top(mid) > cap {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi = lo;
    }
    let t = hi;
    if !(t > t_s) {
        return Err(Error::Precondition(format!("no potential above t_s keeps {s} below {cap}")));
    }
    let ts = model::potential_orbit(s, t, entries);
    let mut points = Vec::with_capacity(entries + 1);
    for (k, &tk) in ts.iter().enumerate().take(entries + 1) {
        points.push(trace_ray(f, &s.shift_by(k), tk, 8, 1e-12)?.z);
    }
    let mut strips = Vec::with_capacity(points.len());
    let mut strips_match = true;
    for (k, z) in points.iter().enumerate() {
        let st = strip_of(*z)?;
        strips_match &= st == s.entry(k);
        strips.push(st);
    }
    let max_residual = points
        .windows(2)
        .map(|w| (evaluate(f, w[0]) - w[1]).norm() / w[1].norm().max(1.0))
        .fold(0.0, f64::max);
    Ok(Functoriality {
        t,
        strips,
        strips_match,
        max_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisjointCertificate {
    pub radius: f64,
    pub max_modulus: f64,
    pub padding: f64,
    pub margin: f64,
    pub singular_values_inside: bool,
    pub verdict: bool,
}

/// Sampled maximum of `|g|` on `|z| = r`, and the maximum of `|g'|` there.
pub fn boundary_maxima<M: EntireMap + ?Sized>(g: &M, r: f64, samples: usize) -> (f64, f64) {
    (0..samples)
        .map(|k| {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / samples as f64);
            (g.eval(z).norm(), g.deriv(z).norm())
        })
        .fold((0.0, 0.0), |(m, d), (a, b)| (m.max(a), d.max(b)))
}

/// Certifies `g(D̄_r) ⊂ D_r` with the singular values inside `D_r`.
///
/// Between two samples a point is at most half the arc spacing `πr/n` away
/// from a sample, so the sampled maximum is padded by `max|g'|·πr/n`.
pub fn certify_disjoint_type<M: EntireMap + ?Sized>(g: &M, r: f64) -> Result<DisjointCertificate> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("radius {r} must be positive")));
    }
    let n = MAX_MODULUS_SAMPLES;
    let (max_modulus, max_deriv) = boundary_maxima(g, r, n);
    let padding = max_deriv * PI * r / n as f64;
    let margin = r - (max_modulus + padding);
    let singular_values_inside = g.singular_values().iter().all(|v| v.norm() < r);
    Ok(DisjointCertificate {
        radius: r,
        max_modulus,
        padding,
        margin,
        singular_values_inside,
        verdict: singular_values_inside && margin > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSequence {
    pub points: Vec<Complex64>,
    /// `max |z_{i+1}| / |z_i|`.
    pub ratio_bound: f64,
}

/// Solutions of `F(z) = p` in one tract: `Log u + 2πik` for the root `u` of
/// the quadratic on the requested side (`|u| > 1` on the right).
pub fn marked_preimage_sequence(f: &CosineParams, p: Complex64, side: Side, count: usize) -> Result<MarkedSequence> {
    let (u1, u2, disc) = exp_roots(f, p);
    if disc < 1e-15 {
        return Err(Error::CriticalValue { w: p });
    }
    let right = if u1.norm() >= u2.norm() { u1 } else { u2 };
    let left = if u1.norm() >= u2.norm() { u2 } else { u1 };
    let base = match side {
        Side::R => right,
        Side::L => left,
    }
    .ln();
    let mut points: Vec<Complex64> = (0..count as i64)
        .map(|k| base + Complex64::new(0.0, 2.0 * PI * k as f64))
        .collect();
    points.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    if points.first().is_some_and(|z| z.norm() == 0.0) {
        return Err(Error::Precondition(format!("preimage sequence of {p} contains 0")));
    }
    let ratio_bound = points
        .windows(2)
        .map(|w| w[1].norm() / w[0].norm())
        .fold(1.0, f64::max);
    Ok(MarkedSequence { points, ratio_bound })
}

/// Fundamental domains of a disjoint-type map: the components of
/// `f⁻¹(ℂ ∖ D̄_r)`, labelled by half-strips.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalDomains {
    pub f: CosineParams,
    pub radius: f64,
    pub certificate: DisjointCertificate,
}

pub fn fundamental_domain_split(f: &CosineParams, radius: f64) -> Result<FundamentalDomains> {
    let certificate = certify_disjoint_type(f, radius)?;
    if !certificate.verdict {
        return Err(Error::Config(format!(
            "{f} is not certified of disjoint type on radius {radius} (margin {})",
            certificate.margin
        )));
    }
    Ok(FundamentalDomains {
        f: *f,
        radius,
        certificate,
    })
}

impl FundamentalDomains {
    pub fn label(&self, z: Complex64) -> Result<Symbol> {
        if z.norm() <= self.radius || evaluate(&self.f, z).norm() <= self.radius {
            return Err(Error::Label { z, radius: self.radius });
        }
        strip_of(z)
    }

    /// Two points with different labels lie in different fundamental
    /// domains, so the escaping set is disconnected between them.
    pub fn separates(&self, z: Complex64, w: Complex64) -> Result<bool> {
        Ok(self.label(z)? != self.label(w)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn addr(s: &str) -> ExternalAddress {
        s.parse().unwrap()
    }

    #[test]
    fn evaluation() {
        let f = CosineParams::pi_sinh();
        assert!(evaluate(&f, c(0.0, 0.0)).norm() < 1e-15);
        assert!((evaluate(&f, c(0.0, PI / 2.0)) - c(0.0, PI)).norm() < 1e-14);
        assert!(evaluate(&f, c(0.0, PI)).norm() < 1e-14);
        assert!((derivative(&f, c(0.0, 0.0)) - c(PI, 0.0)).norm() < 1e-14);
        assert!(!evaluate(&f, c(800.0, 0.0)).is_finite());
        assert!(CosineParams::new(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn critical_values() {
        let (v1, v2) = singular_values(&CosineParams::pi_sinh());
        assert!((v1.norm() - PI).abs() < 1e-14 && v1.re.abs() < 1e-15);
        assert_eq!(v1, -v2);
        let (w1, _) = singular_values(&CosineParams::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap());
        assert_eq!(w1, c(2.0, 0.0));
        let (u1, _) = singular_values(&CosineParams::disjoint_sinh(0.5));
        assert!((u1.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn strips() {
        assert_eq!(strip_of(c(1.0, 0.0)).unwrap(), Symbol::r(0));
        assert_eq!(strip_of(c(-2.0, PI)).unwrap(), Symbol::l(1));
        assert_eq!(strip_of(c(3.0, -4.0 * PI)).unwrap(), Symbol::r(-4));
        assert!(matches!(strip_of(c(0.0, 1.0)), Err(Error::StripBoundary { .. })));
        assert!(matches!(strip_of(c(1.0, 1.5 * PI)), Err(Error::StripBoundary { .. })));
    }

    #[test]
    fn inverse_examples() {
        let f = CosineParams::pi_sinh();
        let z = inverse_branch(&f, Symbol::r(0), c(PI, 0.0)).unwrap();
        assert!((z - c((1.0 + 2f64.sqrt()).ln(), 0.0)).norm() < 1e-14);
        let z = inverse_branch(&f, Symbol::r(0), evaluate(&f, c(1.0, 0.0))).unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-14);
        let z0 = c(-1.0, PI);
        let z = inverse_branch(&f, Symbol::l(1), evaluate(&f, z0)).unwrap();
        assert!((z - z0).norm() < 1e-13);
        assert!(inverse_branch(&f, Symbol::r(0), c(-3.0, 0.0)).is_err());
        assert!(matches!(
            inverse_branch(&f, Symbol::r(0), c(0.0, PI)),
            Err(Error::CriticalValue { .. })
        ));
        let huge = c(1e200, 3e199);
        let z = inverse_branch(&f, Symbol::r(2), huge).unwrap();
        assert!(in_strip(z, Symbol::r(2), 0.0));
        assert!((evaluate(&f, z) - huge).norm() / huge.norm() < 1e-12);
    }

    #[test]
    fn admissibility() {
        let f = CosineParams::pi_sinh();
        assert!(check_admissible(&f, &addr("0R")).is_ok());
        assert!(check_admissible(&f, &addr("1R")).is_err());
        assert!(check_admissible(&f, &addr("1R|0R")).is_err());
        assert!(check_admissible(&f, &addr("1R|0L")).is_ok());
        assert!(check_admissible(&f, &addr("2L,1R|0L")).is_err());
        assert!(check_admissible(&f, &addr("1L|0R")).is_ok());
    }

    #[test]
    fn escape_examples() {
        let f = CosineParams::pi_sinh();
        assert_eq!(escape_classify(&f, c(0.0, 0.0), 50.0, 100).unwrap(), Escape::Bounded);
        assert!(matches!(escape_classify(&f, c(5.0, 0.0), 50.0, 100).unwrap(), Escape::Escaping(n) if n <= 4));
        assert_eq!(escape_classify(&f, c(0.0, PI / 2.0), 50.0, 100).unwrap(), Escape::Bounded);
        assert!(escape_classify(&f, c(0.0, 0.0), 3.0, 100).is_err());
    }

    #[test]
    fn real_rays() {
        let f = CosineParams::pi_sinh();
        for t in [1.0, 2.0, 3.0, 5.0] {
            let p = trace_ray(&f, &addr("0R"), t, 1, 1e-12).unwrap();
            assert!(p.z.im.abs() < 1e-12 && p.z.re > 0.0, "{:?}", p.z);
            let q = trace_ray(&f, &addr("0L"), t, 1, 1e-12).unwrap();
            assert!((q.z + p.z).norm() < 1e-12);
        }
        let g = CosineParams::disjoint_sinh(0.5);
        let p = trace_ray(&g, &addr("0R"), 2.0, 1, 1e-12).unwrap();
        assert!(p.z.im.abs() < 1e-12 && p.z.re > 0.0);
        assert!(matches!(
            trace_ray(&f, &addr("0R,2R|0R"), 0.5, 1, 1e-12),
            Err(Error::BelowEndpoint { .. })
        ));
    }

    #[test]
    fn ray_chain_is_an_orbit() {
        let f = CosineParams::pi_sinh();
        let p = trace_ray(&f, &addr("2R,-1R|3L,1R,-2L"), 3.0, 2, 1e-12).unwrap();
        for w in p.chain.windows(2).take(5) {
            let r = (evaluate(&f, w[0]) - w[1]).norm() / w[1].norm();
            assert!(r < 1e-12);
        }
        assert_eq!(strip_of(p.z).unwrap(), Symbol::r(2));
    }

    #[test]
    fn landing_examples() {
        let f = CosineParams::pi_sinh();
        assert_eq!(landing_point(&f, &addr("0R"), 1e-10).unwrap().z, c(0.0, 0.0));
        let z = landing_point(&f, &addr("1L|0R"), 1e-10).unwrap().z;
        assert!((z - c(0.0, PI)).norm() < 1e-12);
        // ray of period 1 with a genuine fixed point as landing point
        let s = addr("2R");
        let l = landing_point(&f, &s, 1e-10).unwrap();
        assert!((evaluate(&f, l.z) - l.z).norm() < 1e-8);
        assert!(strip_distance(l.z, Symbol::r(2)) < 1e-9);
    }

    #[test]
    fn functoriality_on_a_mixed_address() {
        let f = CosineParams::pi_sinh();
        let r = functoriality(&f, &addr("2R,1R|1L,4R,3R,2L"), 10, 30.0).unwrap();
        assert!(r.strips_match, "{:?}", r.strips);
        assert!(r.max_residual < 1e-8, "{}", r.max_residual);
    }

    #[test]
    fn certificates() {
        let c1 = certify_disjoint_type(&CosineParams::disjoint_sinh(0.5), 1.0).unwrap();
        assert!(c1.verdict);
        assert!((c1.max_modulus - 0.5 * 1f64.sinh()).abs() < 1e-6);
        assert!(c1.margin > 0.4);
        let c2 = certify_disjoint_type(&CosineParams::pi_sinh(), 1.0).unwrap();
        assert!(!c2.verdict);
        let c3 = certify_disjoint_type(&CosineParams::disjoint_sinh(0.5), 0.2).unwrap();
        assert!(!c3.singular_values_inside && !c3.verdict);
    }

    #[test]
    fn marked_sequences() {
        let f = CosineParams::pi_sinh();
        let m = marked_preimage_sequence(&f, c(PI, 0.0), Side::R, 3).unwrap();
        let x = (1.0 + 2f64.sqrt()).ln();
        for (k, z) in m.points.iter().enumerate() {
            assert!((z - c(x, 2.0 * PI * k as f64)).norm() < 1e-13);
        }
        assert!(m.ratio_bound <= 8.0);
        assert!((m.ratio_bound - c(x, 2.0 * PI).norm() / x).abs() < 1e-12);
        assert!(marked_preimage_sequence(&f, c(0.0, PI), Side::R, 3).is_err());
    }

    #[test]
    fn fundamental_domains() {
        let g = CosineParams::disjoint_sinh(0.5);
        let d = fundamental_domain_split(&g, 1.0).unwrap();
        assert_eq!(d.label(c(5.0, 0.0)).unwrap(), Symbol::r(0));
        assert_eq!(d.label(c(-5.0, 0.0)).unwrap(), Symbol::l(0));
        assert!(d.separates(c(5.0, 0.0), c(-5.0, 0.0)).unwrap());
        assert!(d.label(c(0.5, 0.0)).is_err());
        assert!(fundamental_domain_split(&CosineParams::pi_sinh(), 1.0).is_err());
    }
}
