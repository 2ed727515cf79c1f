//! Lower and upper bounds for hyperbolic densities of marked planes.
//!
//! Lower bounds come from a chain of coverings starting at the classical
//! estimate for `ℂ ∖ {0, 1}` on `Re z ≤ 1/2`:
//!
//! ```text
//! ℂ∖{0,1} --(-4(z²-z))--> (ℂ*, ν(1)=2) --(e^z)--> (ℂ, ν(2πin)=2)
//! ```
//!
//! A covering is a local isometry, so a lower bound upstairs divided by the
//! derivative of the covering is a lower bound downstairs. Upper bounds come
//! from Pick's theorem applied to the complement of a disk.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::dynamics::CosineParams;
use crate::error::{Error, Result};

/// `C₁ = 2√2`.
pub const C1: f64 = 2.0 * SQRT_2;

/// `C₂ = 4 + log(3 + 2√2)`.
pub fn c2() -> f64 {
    4.0 + (3.0 + 2.0 * SQRT_2).ln()
}

/// Which exponential covers the two-point orbifold `(ℂ*, ν(1) = 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Convention {
    /// `z ↦ e^z`, marks at `2πin`; the bound is in terms of `|Re z|`.
    ExpZ,
    /// `z ↦ e^{iz}`, marks at `2πn`; the bound is in terms of `|Im z|`.
    #[default]
    ExpI,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Surface {
    Plane,
    PuncturedPlane,
    DiskComplement(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Marks {
    Finite(Vec<(Complex64, u32)>),
    /// `base + n·step` for `n ≥ 1`, all with ramification `nu`.
    Arithmetic { base: Complex64, step: Complex64, nu: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbifoldSpec {
    pub surface: Surface,
    pub marks: Marks,
}

impl OrbifoldSpec {
    pub fn new(surface: Surface, marks: Marks) -> Result<Self> {
        match &marks {
            Marks::Finite(list) => {
                for (i, (p, nu)) in list.iter().enumerate() {
                    if *nu < 2 {
                        return Err(Error::InvalidInput(format!("ramification {nu} at {p} is below 2")));
                    }
                    if list[..i].iter().any(|(q, _)| q == p) {
                        return Err(Error::InvalidInput(format!("mark {p} repeated")));
                    }
                    if surface == Surface::PuncturedPlane && p.norm() == 0.0 {
                        return Err(Error::InvalidInput("mark at the puncture".into()));
                    }
                }
            }
            Marks::Arithmetic { step, nu, .. } => {
                if step.norm() == 0.0 || *nu < 2 {
                    return Err(Error::InvalidInput("degenerate arithmetic marks".into()));
                }
            }
        }
        Ok(OrbifoldSpec { surface, marks })
    }

    /// Arithmetic marks `n·step`, `n ≥ 1`, with ramification 2.
    pub fn arithmetic(step: Complex64) -> Result<Self> {
        Self::new(
            Surface::Plane,
            Marks::Arithmetic {
                base: Complex64::new(0.0, 0.0),
                step,
                nu: 2,
            },
        )
    }

    /// `χ = χ(S) - Σ(1 - 1/ν)`; `None` for infinitely many marks.
    pub fn euler_characteristic(&self) -> Option<Rational64> {
        let surface = match self.surface {
            Surface::Plane => Rational64::from_integer(1),
            Surface::PuncturedPlane | Surface::DiskComplement(_) => Rational64::from_integer(0),
        };
        match &self.marks {
            Marks::Finite(list) => Some(
                list.iter()
                    .fold(surface, |chi, (_, nu)| chi - (Rational64::from_integer(1) - Rational64::new(1, *nu as i64))),
            ),
            Marks::Arithmetic { .. } => None,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.euler_characteristic()
            .is_none_or(|chi| chi < Rational64::from_integer(0))
    }

    /// The `n`-th mark in order of modulus, `n ≥ 0`.
    fn mark(&self, n: usize) -> Option<Complex64> {
        match &self.marks {
            Marks::Finite(list) => {
                let mut pts: Vec<Complex64> = list.iter().map(|m| m.0).collect();
                pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
                pts.get(n).copied()
            }
            Marks::Arithmetic { base, step, .. } => Some(base + step * (n as f64 + 1.0)),
        }
    }
}

/// Lower bound for `ρ_{ℂ∖{0,1}}(z)` on `Re z ≤ 1/2`:
/// `1 / (C₁|z|(C₂ + |log|z||))`.
pub fn density_lower_punctured01(z: Complex64) -> Result<f64> {
    if z.re > 0.5 || z.norm() == 0.0 || !z.is_finite() {
        return Err(Error::Domain(format!("{z} (need Re z ≤ 1/2, z ≠ 0)")));
    }
    let m = z.norm();
    Ok(1.0 / (C1 * m * (c2() + m.ln().abs())))
}

/// Lower bound for the density of `(ℂ*, ν(1) = 2)`:
/// `1 / (2C₁·|s|·|1-s|·(C₂ + log 2 + |log|1-s||))` with `s = √(1-w)`.
///
/// At the cone point `w = 1` the value is the density in the chart
/// `w = 1 - ζ²`, the limit `1/(C₁(C₂ + log 2))`. At the puncture it is `+∞`.
pub fn density_lower_o2(w: Complex64) -> f64 {
    if w.norm() == 0.0 {
        return f64::INFINITY;
    }
    let s = (1.0 - w).sqrt();
    if s.norm() == 0.0 {
        return 1.0 / (C1 * (c2() + LN_2));
    }
    let t = 1.0 - s;
    1.0 / (2.0 * C1 * s.norm() * t.norm() * (c2() + LN_2 + t.norm().ln().abs()))
}

/// The same covering without weakening `|log(|1-s|/2)|` to
/// `log 2 + |log|1-s||`; never smaller than [`density_lower_o2`].
pub fn density_lower_o2_sharp(w: Complex64) -> f64 {
    if w.norm() == 0.0 {
        return f64::INFINITY;
    }
    let s = (1.0 - w).sqrt();
    let z = (1.0 - s) / 2.0;
    match density_lower_punctured01(z) {
        Ok(rho) => rho / (4.0 * s.norm()),
        Err(_) => 0.0,
    }
}

/// `s = √(1 - e^z)` and `log|1 - s|`, without overflow or cancellation.
fn exp_root(z: Complex64) -> (Complex64, f64) {
    if z.re > 700.0 {
        // |s| ≈ e^{Re z/2}, 1 + s ≈ s
        let s = Complex64::from_polar((z.re / 2.0).exp().min(f64::MAX), z.im / 2.0) * Complex64::new(0.0, 1.0);
        return (s, z.re / 2.0);
    }
    let s = if z.re > 30.0 {
        let h = (z / 2.0).exp() * ((-z).exp() - 1.0).sqrt();
        if h.re < 0.0 {
            -h
        } else {
            h
        }
    } else {
        (1.0 - z.exp()).sqrt()
    };
    // (1 - s)(1 + s) = e^z and |1 + s| ≥ 1
    (s, z.re - (1.0 + s).norm().ln())
}

/// Lower bound for the density of `(ℂ, ν(2πin) = 2)` pulled back through
/// `e^z`, i.e. `|e^z|·ρ₂(e^z)`. With [`Convention::ExpI`] the marks sit at
/// `2πn` and the bound is evaluated at `iz`. Infinite at the marks.
pub fn density_lower_o0(z: Complex64, convention: Convention) -> f64 {
    let z = match convention {
        Convention::ExpZ => z,
        Convention::ExpI => Complex64::new(0.0, 1.0) * z,
    };
    let k = (z.im / (2.0 * PI)).round();
    if z.re.abs() < 1e-12 && (z.im - 2.0 * PI * k).abs() < 1e-12 * (1.0 + k.abs()) {
        return f64::INFINITY;
    }
    let (s, log_t) = exp_root(z);
    if s.norm() == 0.0 {
        return f64::INFINITY;
    }
    // |e^z| / (|s||1 - s|) = |1 + s| / |s|
    let ratio = if z.re > 700.0 { 1.0 } else { (1.0 + s).norm() / s.norm() };
    ratio / (2.0 * C1 * (c2() + LN_2 + log_t.abs()))
}

/// The factor `|s| / |1 + s|` that the chain bounds by `√2`.
pub fn o0_ratio(z: Complex64) -> f64 {
    let (s, _) = exp_root(z);
    if z.re > 700.0 {
        return 1.0;
    }
    s.norm() / (1.0 + s).norm()
}

/// `|log|1 - √(1 - e^z)||`, bounded by `log 2 + |Re z|` in the chain.
pub fn o0_log_term(z: Complex64) -> f64 {
    exp_root(z).1.abs()
}

/// The simplified closed form `1/(8(C₂ + 2 log 2) + 8|Re z|)` obtained from
/// the chain with both simplifications.
pub fn density_lower_o0_simplified(z: Complex64, convention: Convention) -> f64 {
    let x = match convention {
        Convention::ExpZ => z.re,
        Convention::ExpI => z.im,
    };
    1.0 / (2.0 * C1 * SQRT_2 * (c2() + 2.0 * LN_2 + x.abs()))
}

/// The Möbius map with `M(0) = a`, `M(1) = b`, `M(-1) = c`, written as
/// `M(s) = (A s + a)/(C s + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub big_a: Complex64,
    pub big_c: Complex64,
}

impl Mobius {
    pub fn through(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        if a == b || b == c || a == c {
            return Err(Error::InvalidInput(format!("marks {a}, {b}, {c} are not distinct")));
        }
        let big_c = (2.0 * a - b - c) / (b - c);
        let big_a = b * (big_c + 1.0) - a;
        Ok(Mobius { a, big_a, big_c })
    }

    pub fn apply(&self, s: Complex64) -> Complex64 {
        (self.big_a * s + self.a) / (self.big_c * s + 1.0)
    }

    pub fn derivative(&self, s: Complex64) -> Complex64 {
        let d = self.big_c * s + 1.0;
        (self.big_a - self.a * self.big_c) / (d * d)
    }

    pub fn inverse(&self, w: Complex64) -> Complex64 {
        (w - self.a) / (self.big_a - self.big_c * w)
    }
}

/// Lower bound for the upstairs orbifold with marks `πk`: twice the
/// exponential chain at `2iζ`.
fn rho_pi_marks(zeta: Complex64) -> f64 {
    2.0 * density_lower_o0(2.0 * Complex64::new(0.0, 1.0) * zeta, Convention::ExpZ)
}

fn density_222_regular(m: &Mobius, w: Complex64) -> Result<f64> {
    let sigma = m.inverse(w);
    if !sigma.is_finite() {
        return Err(Error::Domain(format!("{w} is the image of the pole")));
    }
    let zeta = sigma.asin();
    let dm = m.derivative(sigma).norm();
    // ζ and π - ζ cover the same point; both bounds are valid
    let best = rho_pi_marks(zeta).max(rho_pi_marks(PI - zeta));
    let dz = dm * zeta.cos().norm();
    if dz == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(best / dz)
}

/// The bound through `ζ ↦ M(sin ζ)` for one labelling: `M(0) = a`,
/// `M(1) = b`, `M(-1) = c`. Symmetric in `b` and `c` only.
///
/// At a mark the value is the density in the cone chart `w = m + u²`,
/// evaluated at small `|u|`.
pub fn density_lower_222_labelled(a: Complex64, b: Complex64, c: Complex64, w: Complex64) -> Result<f64> {
    let m = Mobius::through(a, b, c)?;
    for mark in [a, b, c] {
        let scale = (w - mark).norm().max(1.0).max((b - c).norm());
        if (w - mark).norm() <= 1e-12 * scale {
            let u = 1e-5 * scale.sqrt();
            return Ok(density_222_regular(&m, mark + Complex64::new(u * u, 0.0))? * 2.0 * u);
        }
    }
    density_222_regular(&m, w)
}

/// Lower bound for the density of `(ℂ, ν(a) = ν(b) = ν(c) = 2)` at `w`: the
/// best of the three labellings of [`density_lower_222_labelled`], so the
/// value does not depend on the order of the marks.
pub fn density_lower_222(a: Complex64, b: Complex64, c: Complex64, w: Complex64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (p, q, r) in [(a, b, c), (b, a, c), (c, a, b)] {
        best = best.max(density_lower_222_labelled(p, q, r, w)?);
    }
    Ok(best)
}

/// Exact density `1/(|z|(log|z| - log r))` of `{|z| > r}`; by Pick an upper
/// bound for any orbifold containing it.
pub fn density_upper_disk_complement(r: f64, z: Complex64) -> Result<f64> {
    let m = z.norm();
    if !(r > 0.0) || m <= 1.0001 * r {
        return Err(Error::Domain(format!("|z| = {m} too close to the disk of radius {r}")));
    }
    Ok(1.0 / (m * (m.ln() - r.ln())))
}

/// A point given by `log|z|` and `z/|z|`, so that moduli beyond `f64` are
/// representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub log_modulus: f64,
    pub direction: Complex64,
}

impl PolarPoint {
    pub fn from_complex(z: Complex64) -> Self {
        PolarPoint {
            log_modulus: z.norm().ln(),
            direction: z / z.norm(),
        }
    }
}

/// Selection data of the main estimate at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// `b/|z|` and `c/|z|`.
    pub b: Complex64,
    pub c: Complex64,
    pub z: Complex64,
    /// `ρ_{0,b̃,c̃}(z̃)`; the bound is this divided by `|z|`.
    pub scaled_bound: f64,
}

/// Moduli past which the selected marks equal their limits `2|z|`, `4|z|`
/// to double precision.
const SATURATED_LOG: f64 = 690.0;

/// The selections `b`, `c` of the main estimate at `z` and the scaled
/// bound `ρ_{0,b̃,c̃}(z̃)`. Zero is used as the anchor mark.
pub fn main2_selection(spec: &OrbifoldSpec, k: f64, z: PolarPoint) -> Result<Selection> {
    let modulus = z.log_modulus.exp();
    let (b, c) = if let (Marks::Arithmetic { base, step, .. }, true) = (&spec.marks, z.log_modulus > SATURATED_LOG) {
        if base.norm() != 0.0 {
            return Err(Error::Domain("saturated selection needs marks on a ray from 0".into()));
        }
        let dir = step / step.norm();
        (2.0 * dir, 4.0 * dir)
    } else {
        if !modulus.is_finite() {
            return Err(Error::Domain("modulus overflow".into()));
        }
        let mut n = 0;
        let mut find = |target: f64| -> Result<Complex64> {
            if let Marks::Arithmetic { base, step, .. } = &spec.marks {
                return Ok(first_arithmetic_mark(*base, *step, target));
            }
            loop {
                let m = spec.mark(n).ok_or(Error::SequenceTooShort { modulus })?;
                n += 1;
                if m.norm() >= target {
                    return Ok(m);
                }
            }
        };
        let b = find(2.0 * modulus)?;
        let c = find(2.0 * b.norm())?;
        (b / modulus, c / modulus)
    };
    let (bn, cn) = (b.norm(), c.norm());
    let tol = 1e-12;
    if bn < 2.0 - tol || bn > 2.0 * k + tol || cn < 4.0 - tol || cn > 4.0 * k * k + tol {
        return Err(Error::Domain(format!(
            "selection windows violated: |b̃| = {bn}, |c̃| = {cn} for K = {k}"
        )));
    }
    let scaled_bound = density_lower_222(Complex64::new(0.0, 0.0), b, c, z.direction)?;
    Ok(Selection {
        b,
        c,
        z: z.direction,
        scaled_bound,
    })
}

/// First mark `base + n·step`, `n ≥ 1`, with modulus at least `target`.
/// Past `2⁴⁰` steps the base is below rounding and the index is rounded up.
fn first_arithmetic_mark(base: Complex64, step: Complex64, target: f64) -> Complex64 {
    let h = step.norm();
    let estimate = (target - base.norm()) / h;
    if estimate > (1u64 << 40) as f64 {
        return base + step * (target / h).ceil();
    }
    let mut n = (estimate.floor() - 2.0).max(1.0);
    loop {
        let m = base + step * n;
        if m.norm() >= target {
            return m;
        }
        n += 1.0;
    }
}

/// Lower bound `ρ_{0,b̃,c̃}(z̃)/|z|` for the orbifold with marks `spec`,
/// whose moduli grow by a ratio of at most `k`.
pub fn theorem_main2_bound(spec: &OrbifoldSpec, k: f64, z: Complex64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(Error::InvalidInput(format!("ratio bound {k} must exceed 1")));
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain("z = 0 is the anchor mark".into()));
    }
    let sel = main2_selection(spec, k, PolarPoint::from_complex(z))?;
    Ok(sel.scaled_bound / z.norm())
}

/// `log|F(z)|`, `F(z)/|F(z)|` and `|F'(z)|/|F(z)|` without overflow.
fn image_polar(f: &CosineParams, z: Complex64) -> (PolarPoint, f64) {
    let (lead, other, sign) = if z.re >= 0.0 {
        (f.a, f.b * (-2.0 * z).exp(), 1.0)
    } else {
        (f.b, f.a * (2.0 * z).exp(), -1.0)
    };
    let val = lead + other;
    let der = lead - other;
    let phase = Complex64::from_polar(1.0, sign * z.im);
    let p = PolarPoint {
        log_modulus: sign * z.re + val.norm().ln(),
        direction: phase * val / val.norm(),
    };
    (p, der.norm() / val.norm())
}

/// Marks of the preimage orbifold: for `λ·sinh` the zeros `πik` of `F`,
/// taken for `k ≥ 1` with `0` as anchor; consecutive moduli grow by at most 2.
pub fn preimage_marks(f: &CosineParams) -> Result<(OrbifoldSpec, f64)> {
    f.sinh_multiplier()
        .ok_or_else(|| Error::Precondition(format!("preimage marks are only wired for the sinh family, not {f}")))?;
    Ok((OrbifoldSpec::arithmetic(Complex64::new(0.0, PI))?, 2.0))
}

/// `|F'(z)|·ρ_lower(F(z)) / ρ_upper(z)`: the main estimate over the preimage
/// marks at `F(z)` against the density of `{|w| > K/2}` at `z`.
pub fn expansion_lower_bound(f: &CosineParams, z: Complex64, k_disk: f64) -> Result<f64> {
    let (w, dlog) = image_polar(f, z);
    if w.log_modulus <= k_disk.ln() {
        return Err(Error::Precondition(format!("|F({z})| ≤ {k_disk}")));
    }
    let (marks, k) = preimage_marks(f)?;
    let sel = main2_selection(&marks, k, w)?;
    let upper = density_upper_disk_complement(k_disk / 2.0, z)?;
    // |F'|·m/|F| / upper
    Ok(dlog * sel.scaled_bound / upper)
}

/// The covering form `ρ_lower(z) / ρ_upper(z)` of the expansion bound, with
/// the main estimate taken at `z` itself.
pub fn expansion_lower_bound_covering(f: &CosineParams, z: Complex64, k_disk: f64) -> Result<f64> {
    let (marks, k) = preimage_marks(f)?;
    let lower = theorem_main2_bound(&marks, k, z)?;
    Ok(lower / density_upper_disk_complement(k_disk / 2.0, z)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCertificate {
    pub params: CosineParams,
    #[serde(rename = "K_disk")]
    pub k_disk: f64,
    pub grid: Vec<f64>,
    pub bounds: Vec<f64>,
    pub min_bound: f64,
    #[serde(rename = "E_est")]
    pub e_est: f64,
}

/// Evaluates [`expansion_lower_bound`] on 40 log-spaced points of
/// `[20, 10⁴]` on the real axis; `E_est` is the minimum, floored at 1.05.
pub fn expansion_estimate(f: &CosineParams, k_disk: f64) -> Result<ExpansionCertificate> {
    let n = 40;
    let grid: Vec<f64> = (0..n)
        .map(|i| 20.0 * (1e4f64 / 20.0).powf(i as f64 / (n - 1) as f64))
        .collect();
    let bounds = grid
        .iter()
        .map(|&x| expansion_lower_bound(f, Complex64::new(x, 0.0), k_disk))
        .collect::<Result<Vec<f64>>>()?;
    let min_bound = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ExpansionCertificate {
        params: *f,
        k_disk,
        grid,
        bounds,
        min_bound,
        e_est: min_bound.max(crate::conjugacy::E_FLOOR),
    })
}

/// Identifier of a bound chain in CSV tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chain {
    Punctured01,
    O2,
    O0,
    Main2,
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chain::Punctured01 => "punctured01",
            Chain::O2 => "o2",
            Chain::O0 => "o0",
            Chain::Main2 => "main2",
        };
        f.write_str(s)
    }
}

impl Chain {
    /// Covering steps used by the chain.
    pub fn steps(&self) -> Vec<&'static str> {
        let mut v = vec!["C∖{0,1}: Re z ≤ 1/2 estimate"];
        match self {
            Chain::Punctured01 => {}
            Chain::O2 => v.push("z ↦ -4(z²-z), root with Re ≤ 1/2"),
            Chain::O0 => v.extend(["z ↦ -4(z²-z)", "z ↦ e^z"]),
            Chain::Main2 => v.extend(["z ↦ -4(z²-z)", "z ↦ e^z", "ζ ↦ M(sin ζ)", "w ↦ w/|z|"]),
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityBound {
    pub at: Complex64,
    pub lower: f64,
    pub upper: f64,
    pub chain: Chain,
}

impl Chain {
    /// Distance from `z` to the marked points of the chain's orbifold.
    pub fn mark_distance(&self, z: Complex64) -> f64 {
        let lattice = |x: f64| {
            let n = (x / (2.0 * PI)).round();
            (x - 2.0 * PI * n, n)
        };
        match self {
            Chain::Punctured01 | Chain::O2 => z.norm().min((z - 1.0).norm()),
            Chain::O0 => {
                let (dx, _) = lattice(z.re);
                dx.hypot(z.im)
            }
            Chain::Main2 => {
                let (dx, n) = lattice(z.re);
                if n < 0.0 {
                    z.norm()
                } else {
                    dx.hypot(z.im)
                }
            }
        }
    }
}

/// Lower bounds along `chain`, with the upper bound `2/d` of the mark-free
/// disk of radius `d` about each point (Pick; `+∞` on a mark).
pub fn bound_table(points: &[Complex64], chain: Chain) -> Vec<DensityBound> {
    let spec = OrbifoldSpec::arithmetic(Complex64::new(2.0 * PI, 0.0)).expect("valid marks");
    points
        .iter()
        .map(|&z| {
            let lower = match chain {
                Chain::Punctured01 => density_lower_punctured01(z).unwrap_or(0.0),
                Chain::O2 => density_lower_o2(z),
                Chain::O0 => density_lower_o0(z, Convention::default()),
                Chain::Main2 => theorem_main2_bound(&spec, 2.0, z).unwrap_or(0.0),
            };
            let d = chain.mark_distance(z);
            let upper = if d > 0.0 { 2.0 / d } else { f64::INFINITY };
            DensityBound {
                at: z,
                lower,
                upper,
                chain,
            }
        })
        .collect()
}

/// CSV with columns `re,im,lower,upper,chain_id`.
pub fn bounds_csv(rows: &[DensityBound]) -> String {
    let mut out = String::from("re,im,lower,upper,chain_id\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.at.re, r.at.im, r.lower, r.upper, r.chain));
    }
    out
}
