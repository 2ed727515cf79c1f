//! Semiconjugacy from a disjoint-type partner `g(z) = f(μz)` to `f`.
//!
//! With `φ₀ = id` and `φ₁(z) = μz`, the curve `γ₁(z)` is the segment from
//! `z` to `φ₁(z)`. The curve `γ_{j+1}(z)` is the lift under `f` of
//! `γ_j(g(z))` that starts at `φ_j(z)`, and `φ_{j+1}(z)` is its other end.
//! By construction `f ∘ φ_{j+1} = φ_j ∘ g`.
//!
//! Forward `g`-orbits overflow after two or three steps, so samples are built
//! backwards: a chain `w_0, …, w_D` of the map `h = μ·f` (which is `g`
//! conjugated by `w = μz`) is pulled back from a start point in `|w| > K`,
//! and the `g`-orbit is `z_i = w_i / μ`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, certify_disjoint_type, evaluate, image_side, CosineParams, DisjointCertificate, Rescaled};
use crate::error::{Error, Result};
use crate::model::{Side, Symbol};
use crate::orbifold;

/// Bisections allowed per base segment while lifting a curve.
pub const MAX_REFINEMENTS: usize = 12;

/// Vertices of the initial segment `γ₁`.
const SEGMENT_VERTICES: usize = 48;

/// Floor applied to the expansion estimate.
pub const E_FLOOR: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyConfig {
    pub k: f64,
    pub l: f64,
    pub mu: f64,
    pub f: CosineParams,
    pub e_est: f64,
    pub certificate: DisjointCertificate,
}

impl ConjugacyConfig {
    /// `g(z) = f(μz)`.
    pub fn g(&self) -> Rescaled {
        Rescaled {
            f: self.f,
            mu: Complex64::new(self.mu, 0.0),
        }
    }

    /// `h = μ·f`, the map `g` in the coordinate `w = μz`.
    pub fn h(&self) -> CosineParams {
        CosineParams {
            a: self.f.a * self.mu,
            b: self.f.b * self.mu,
        }
    }

    /// `α = (1/K)·log(|log μ|/log 2 + 1)`, the hyperbolic length bound for `γ₁`.
    pub fn alpha(&self) -> f64 {
        (self.mu.ln().abs() / LN_2 + 1.0).ln() / self.k
    }

    /// `α·E/(E-1)`.
    pub fn budget(&self) -> f64 {
        self.alpha() * self.e_est / (self.e_est - 1.0)
    }
}

/// The forward orbit of the singular values, which must stay in `|z| < bound`.
fn postsingular_within(f: &CosineParams, bound: f64) -> bool {
    let (v1, v2) = dynamics::singular_values(f);
    [v1, v2].into_iter().all(|v| {
        let mut z = v;
        (0..64).all(|_| {
            let ok = z.norm() < bound;
            z = evaluate(f, z);
            ok
        })
    })
}

/// Constants for the construction: `K = 8`, `L` the ceiling of the sampled
/// maximum of `|f|` on `|z| = K + 1`, and `μ = K/L`.
pub fn build_config(f: &CosineParams) -> Result<ConjugacyConfig> {
    let k = 8.0;
    if !postsingular_within(f, k / 2.0) {
        return Err(Error::Config(format!("postsingular set of {f} leaves |z| < {}", k / 2.0)));
    }
    let (max_modulus, _) = dynamics::boundary_maxima(f, k + 1.0, dynamics::MAX_MODULUS_SAMPLES);
    let l = max_modulus.ceil().max(k);
    let mu = k / l;
    let g = Rescaled {
        f: *f,
        mu: Complex64::new(mu, 0.0),
    };
    let certificate = certify_disjoint_type(&g, k / 2.0)?;
    if !certificate.verdict {
        return Err(Error::Config(format!(
            "g = f(μ·) is not certified of disjoint type (margin {})",
            certificate.margin
        )));
    }
    let e_est = orbifold::expansion_estimate(f, k)?.e_est;
    Ok(ConjugacyConfig {
        k,
        l,
        mu,
        f: *f,
        e_est,
        certificate,
    })
}

/// A finite `g`-orbit `z_0, g(z_0), …` with every point in `|z| > L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub orbit: Vec<Complex64>,
}

impl Sample {
    pub fn z(&self) -> Complex64 {
        self.orbit[0]
    }

    /// The orbit of `-z_0`; `g` is odd for the sinh family.
    pub fn mirrored(&self) -> Sample {
        Sample {
            orbit: self.orbit.iter().map(|z| -z).collect(),
        }
    }
}

/// Pulls the `h`-chain back from `start` through the strips `symbols`
/// (`symbols[i]` is the strip of `w_i`).
pub fn sample_from_symbols(cfg: &ConjugacyConfig, symbols: &[Symbol], start: Complex64) -> Result<Sample> {
    let h = cfg.h();
    let mut chain = vec![start];
    for s in symbols.iter().rev() {
        let w = dynamics::inverse_branch(&h, *s, *chain.last().expect("nonempty"))?;
        chain.push(w);
    }
    chain.reverse();
    let orbit: Vec<Complex64> = chain.iter().map(|w| w / cfg.mu).collect();
    if let Some(z) = orbit.iter().find(|z| z.norm() <= cfg.l) {
        return Err(Error::OrbitTooSmall { w: *z, radius: cfg.l });
    }
    Ok(Sample { orbit })
}

/// Random samples with orbits of length `len`: admissible strip sequences
/// with `|n| ≤ 3` and starts on a strip midline with `|Re w| ∈ [10, 14]`.
pub fn generate_samples(cfg: &ConjugacyConfig, count: usize, len: usize, seed: u64) -> Result<Vec<Sample>> {
    let h = cfg.h();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut side = if rng.gen_bool(0.5) { Side::R } else { Side::L };
        let mut symbols = Vec::with_capacity(len);
        for _ in 0..len {
            let s = Symbol::new(side, rng.gen_range(-3..=3));
            symbols.push(s);
            side = image_side(&h, s).unwrap_or(side);
        }
        let last = symbols[len - 1];
        let sign = if last.side == Side::R { 1.0 } else { -1.0 };
        let start = Complex64::new(sign * rng.gen_range(10.0..14.0), PI * last.index as f64);
        out.push(sample_from_symbols(cfg, &symbols[..len - 1], start)?);
    }
    Ok(out)
}

/// A polyline with the largest distance between consecutive vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePolyline {
    pub vertices: Vec<Complex64>,
    pub max_gap: f64,
}

impl CurvePolyline {
    pub fn new(vertices: Vec<Complex64>) -> Self {
        let max_gap = vertices.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
        CurvePolyline { vertices, max_gap }
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().expect("nonempty polyline")
    }
}

/// `γ₁(z)`: the segment from `z` to `μz`, with vertices spaced
/// geometrically since it runs along a ray from the origin.
pub fn initial_segment(cfg: &ConjugacyConfig, z: Complex64) -> Result<CurvePolyline> {
    let n = SEGMENT_VERTICES;
    let vertices: Vec<Complex64> = (0..=n).map(|k| z * cfg.mu.powf(k as f64 / n as f64)).collect();
    if let Some(v) = vertices.iter().find(|v| v.norm() <= cfg.k) {
        return Err(Error::OrbitTooSmall { w: *v, radius: cfg.k });
    }
    let mut vertices = vertices;
    vertices[n] = z * cfg.mu;
    Ok(CurvePolyline::new(vertices))
}

/// The preimage of `w` nearest to `near`, and the distance from it to the
/// next nearest preimage.
fn nearest_preimage(f: &CosineParams, w: Complex64, near: Complex64) -> (Complex64, f64) {
    let (u1, u2, _) = dynamics::exp_roots(f, w);
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    let mut second = f64::INFINITY;
    let mut candidates = Vec::with_capacity(6);
    for u in [u1, u2] {
        let base = u.ln();
        let k = ((near.im - base.im) / (2.0 * PI)).round();
        for dk in [-1.0, 0.0, 1.0] {
            candidates.push(Complex64::new(base.re, base.im + 2.0 * PI * (k + dk)));
        }
    }
    for z in &candidates {
        let d = (z - near).norm();
        if d < best.0 {
            best = (d, *z);
        }
    }
    for z in &candidates {
        let d = (z - best.1).norm();
        if d > 0.0 && d < second {
            second = d;
        }
    }
    (best.1, second)
}

fn lift_segment(
    f: &CosineParams,
    from: Complex64,
    p: Complex64,
    q: Complex64,
    depth: usize,
    out: &mut Vec<Complex64>,
    refinements: &mut usize,
) -> Result<Complex64> {
    let (z, other) = nearest_preimage(f, q, from);
    if (z - from).norm() < other / 4.0 {
        out.push(z);
        return Ok(z);
    }
    if depth >= MAX_REFINEMENTS {
        return Err(Error::Continuation {
            at: q,
            refinements: depth,
        });
    }
    *refinements += 1;
    let mid = (p + q) / 2.0;
    let z_mid = lift_segment(f, from, p, mid, depth + 1, out, refinements)?;
    lift_segment(f, z_mid, mid, q, depth + 1, out, refinements)
}

/// The lift of `base` under `f` that starts at `start`, where
/// `f(start) = base.start()`. Returns the lift and the refinement count.
pub fn lift_curve(f: &CosineParams, base: &CurvePolyline, start: Complex64) -> Result<(CurvePolyline, usize)> {
    let mut out = vec![start];
    let mut refinements = 0;
    let mut from = start;
    for w in base.vertices.windows(2) {
        from = lift_segment(f, from, w[0], w[1], 0, &mut out, &mut refinements)?;
    }
    Ok((CurvePolyline::new(out), refinements))
}

/// All `φ_ℓ` along one sample orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiTable {
    /// `phi[ℓ][i] = φ_ℓ(z_i)`.
    pub phi: Vec<Vec<Complex64>>,
    /// `d[j] = |φ_{j+1}(z_0) - φ_j(z_0)|`.
    pub d: Vec<f64>,
    /// `commutation[j] = |f(φ_{j+1}(z_0)) - φ_j(z_1)|`.
    pub commutation: Vec<f64>,
    pub refinements: usize,
}

/// `φ_ℓ(z_i)` for `ℓ ≤ jmax` and `i ≤ jmax - ℓ`.
pub fn phi_table(cfg: &ConjugacyConfig, sample: &Sample, jmax: usize) -> Result<PhiTable> {
    if jmax < 1 {
        return Err(Error::InvalidInput("jmax must be at least 1".into()));
    }
    if sample.orbit.len() < jmax + 1 {
        return Err(Error::Precondition(format!(
            "orbit of length {} is too short for j = {jmax}",
            sample.orbit.len()
        )));
    }
    let f = &cfg.f;
    let width = jmax;
    let mut phi = vec![sample.orbit[..=width].to_vec()];
    let mut curves: Vec<CurvePolyline> = sample.orbit[..width]
        .iter()
        .map(|&z| initial_segment(cfg, z))
        .collect::<Result<_>>()?;
    phi.push(curves.iter().map(CurvePolyline::end).collect());
    let mut refinements = 0;
    for level in 2..=jmax {
        let prev = &phi[level - 1];
        let mut next_curves = Vec::with_capacity(curves.len() - 1);
        for i in 0..curves.len() - 1 {
            let (c, r) = lift_curve(f, &curves[i + 1], prev[i])?;
            refinements += r;
            next_curves.push(c);
        }
        phi.push(next_curves.iter().map(CurvePolyline::end).collect());
        curves = next_curves;
    }
    let d = (0..jmax).map(|j| (phi[j + 1][0] - phi[j][0]).norm()).collect();
    let commutation = (0..jmax)
        .map(|j| (evaluate(f, phi[j + 1][0]) - phi[j][1]).norm())
        .collect();
    Ok(PhiTable {
        phi,
        d,
        commutation,
        refinements,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiDiagnostics {
    pub d: Vec<f64>,
    pub commutation_residual: f64,
    pub refinements: usize,
}

/// `φ_j(z_0)` with the increments and commutation residuals up to `j`.
pub fn phi_iterate(cfg: &ConjugacyConfig, sample: &Sample, j: usize) -> Result<(Complex64, PhiDiagnostics)> {
    let table = phi_table(cfg, sample, j)?;
    let residual = table.commutation.iter().copied().fold(0.0, f64::max);
    Ok((
        table.phi[j][0],
        PhiDiagnostics {
            d: table.d,
            commutation_residual: residual,
            refinements: table.refinements,
        },
    ))
}

/// Least-squares ratio `c` in `d_j ≈ C·c^j` over `j ∈ [2, jmax)`, ignoring
/// increments at the roundoff floor.
pub fn fitted_ratio(d: &[f64], scale: f64) -> Option<f64> {
    let floor = 1e-13 * scale.max(1.0);
    let pts: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, &v)| v > floor)
        .map(|(j, &v)| (j as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub z: Complex64,
    pub d: Vec<f64>,
    pub commutation_residual: f64,
    pub fitted_ratio: Option<f64>,
    /// Largest `d_{j+1}/d_j` over `j ≥ 2` above the roundoff floor.
    pub max_step_ratio: f64,
    pub monotone_tail: bool,
    /// `Σ_j d_j` measured in the metric of `{|z| > K/2}`, an upper estimate
    /// for the orbifold distance travelled by `φ_j(z)`.
    pub hyperbolic_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub mu: f64,
    pub samples: Vec<SampleReport>,
    pub fitted_ratio: f64,
    pub max_commutation_residual: f64,
    pub budget: f64,
}

fn hyperbolic_length(cfg: &ConjugacyConfig, a: Complex64, b: Complex64) -> f64 {
    // the segment may dip below K/2 only near the Julia set's bounded part
    let mid = (a + b) / 2.0;
    let r = cfg.k / 2.0;
    let m = mid.norm().max(a.norm().min(b.norm()));
    if m <= r * 1.0001 {
        return f64::INFINITY;
    }
    orbifold::density_upper_disk_complement(r, Complex64::new(m, 0.0)).unwrap_or(f64::INFINITY) * (b - a).norm()
}

pub fn sample_report(cfg: &ConjugacyConfig, sample: &Sample, jmax: usize) -> Result<SampleReport> {
    let table = phi_table(cfg, sample, jmax)?;
    let scale = table.phi[jmax][0].norm();
    let floor = 1e-13 * scale.max(1.0);
    let live: Vec<f64> = table.d.iter().skip(2).copied().filter(|&v| v > floor).collect();
    let max_step_ratio = live.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let hyperbolic_sum = (0..jmax)
        .map(|j| hyperbolic_length(cfg, table.phi[j][0], table.phi[j + 1][0]))
        .sum();
    Ok(SampleReport {
        z: sample.z(),
        fitted_ratio: fitted_ratio(&table.d, scale),
        max_step_ratio,
        monotone_tail: max_step_ratio < 1.0,
        commutation_residual: table.commutation.iter().copied().fold(0.0, f64::max),
        d: table.d,
        hyperbolic_sum,
    })
}

pub fn convergence_report(cfg: &ConjugacyConfig, samples: &[Sample], jmax: usize) -> Result<ConvergenceReport> {
    let reports: Vec<SampleReport> = samples
        .par_iter()
        .map(|s| sample_report(cfg, s, jmax))
        .collect::<Result<_>>()?;
    let fitted_ratio = reports
        .iter()
        .map(|r| r.fitted_ratio.unwrap_or(0.0))
        .fold(0.0, f64::max);
    let max_commutation_residual = reports.iter().map(|r| r.commutation_residual).fold(0.0, f64::max);
    Ok(ConvergenceReport {
        k: cfg.k,
        l: cfg.l,
        mu: cfg.mu,
        samples: reports,
        fitted_ratio,
        max_commutation_residual,
        budget: cfg.budget(),
    })
}

/// Minimum separation required by [`injectivity_probe`].
pub const SEPARATION: f64 = 1e-6;

/// For each pair, whether `|φ_j(z) - φ_j(z̃)| > 10⁻⁶`.
pub fn injectivity_probe(cfg: &ConjugacyConfig, pairs: &[(Sample, Sample)], j: usize) -> Result<Vec<bool>> {
    pairs
        .par_iter()
        .map(|(a, b)| {
            if a.z() == b.z() {
                return Err(Error::Precondition("injectivity probe needs distinct points".into()));
            }
            let (pa, _) = phi_iterate(cfg, a, j)?;
            let (pb, _) = phi_iterate(cfg, b, j)?;
            Ok((pa - pb).norm() > SEPARATION)
        })
        .collect()
}
