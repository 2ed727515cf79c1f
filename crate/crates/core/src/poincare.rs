//! The Poincaré function of `p(z) = z² - 1` at its repelling fixed point
//! `z₀ = (1 + √5)/2`: the entire solution of `Φ(λz) = p(Φ(z))` with
//! `Φ(0) = z₀`, `Φ'(0) = 1` and `λ = p'(z₀) = 1 + √5`.
//!
//! ```
//! use cosine_bouquet::poincare::solve_coefficients;
//!
//! let series = solve_coefficients(40);
//! let z = num_complex::Complex64::new(0.3, 0.1);
//! let lhs = series.eval(z * series.lambda).unwrap();
//! let rhs = series.eval(z).unwrap().powi(2) - 1.0;
//! assert!((lhs - rhs).norm() < 1e-9);
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TERMS: usize = 40;
pub const DEFAULT_RADIUS: f64 = 0.5;

/// Relative size below which a jet coefficient counts as zero.
pub const ORDER_THRESHOLD: f64 = 1e-20;

/// Past this modulus `p` is iterated on `log|Φ|` alone.
const LOG_SWITCH: f64 = 1e100;

fn p(w: Complex64) -> Complex64 {
    w * w - 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareSeries {
    pub z0: f64,
    pub lambda: f64,
    pub coeffs: Vec<f64>,
    /// Largest `|w|` at which the truncated series is evaluated directly.
    pub radius: f64,
}

/// Coefficients `a₀..a_N` from `λⁿaₙ = Σ_{i+j=n} aᵢaⱼ`.
pub fn solve_coefficients(n: usize) -> PoincareSeries {
    let n = n.max(2);
    let z0 = (1.0 + 5f64.sqrt()) / 2.0;
    let lambda = 2.0 * z0;
    let mut a = vec![z0, 1.0];
    let mut power = lambda;
    for k in 2..=n {
        power *= lambda;
        let conv: f64 = (1..k).map(|i| a[i] * a[k - i]).sum();
        a.push(conv / (power - 2.0 * z0));
    }
    PoincareSeries {
        z0,
        lambda,
        coeffs: a,
        radius: DEFAULT_RADIUS,
    }
}

impl PoincareSeries {
    pub fn terms(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `|λⁿaₙ - Σ_{i+j=n} aᵢaⱼ|` for `n = 1..N` (the `n = 0` relation is
    /// `a₀² - 1 = a₀`).
    pub fn residuals(&self) -> Vec<f64> {
        let a = &self.coeffs;
        (1..a.len())
            .map(|n| {
                let conv: f64 = (0..=n).map(|i| a[i] * a[n - i]).sum();
                (self.lambda.powi(n as i32) * a[n] - conv).abs()
            })
            .collect()
    }

    fn series(&self, w: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    /// Smallest `m` with `|λ⁻ᵐz| ≤ radius`.
    pub fn required_steps(&self, z: Complex64) -> u32 {
        let r = z.norm();
        if r <= self.radius {
            0
        } else {
            ((r / self.radius).ln() / self.lambda.ln()).ceil() as u32
        }
    }

    /// `Φ(z) = pᵐ(S(λ⁻ᵐz))` with `S` the truncated series.
    pub fn evaluate(&self, z: Complex64, m: u32) -> Result<Complex64> {
        let required = self.required_steps(z);
        if m < required {
            return Err(Error::InsufficientSteps { z, required, given: m });
        }
        let mut w = self.series(z / self.lambda.powi(m as i32));
        for _ in 0..m {
            w = p(w);
        }
        Ok(w)
    }

    /// [`evaluate`](Self::evaluate) with the fewest steps.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.evaluate(z, self.required_steps(z))
    }

    /// `Φ'(z)` by the chain rule through the same iteration.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let jet = self.jet(z, 1, 1.0)?;
        Ok(jet.coeffs[1])
    }

    /// `log|Φ(z)|`, usable far beyond the range of `f64` values of `Φ`.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let m = self.required_steps(z);
        let mut w = self.series(z / self.lambda.powi(m as i32));
        let mut k = 0;
        while k < m && w.norm() < LOG_SWITCH {
            w = p(w);
            k += 1;
        }
        // ln|w² - 1| = 2 ln|w| up to |w|⁻² < 10⁻²⁰⁰
        let mut log = w.norm().ln();
        for _ in k..m {
            log *= 2.0;
        }
        log
    }

    /// Taylor jet of `Φ` at `z` in the variable `u`, `z + scale·u`, up to
    /// `order`.
    pub fn jet(&self, z: Complex64, order: usize, scale: f64) -> Result<Jet> {
        let m = self.required_steps(z);
        let shrink = self.lambda.powi(m as i32);
        let w = z / shrink;
        let t = scale / shrink;
        // Taylor shift of the polynomial to w, then scale by t
        let n = self.coeffs.len();
        let mut shifted: Vec<Complex64> = self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = shifted[j + 1];
                shifted[j] += w * next;
            }
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        let mut tk = 1.0;
        for (k, c) in shifted.into_iter().enumerate() {
            if k > order {
                break;
            }
            coeffs[k] = c * tk;
            tk *= t;
        }
        let mut jet = Jet { base: z, scale, coeffs };
        for _ in 0..m {
            jet.coeffs = jet_square_minus_one(&jet.coeffs);
        }
        Ok(jet)
    }
}

/// Truncated Taylor data of a function at `base` in the variable `u`,
/// where the point is `base + scale·u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Jet {
    pub base: Complex64,
    pub scale: f64,
    pub coeffs: Vec<Complex64>,
}

fn jet_square_minus_one(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        if c[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..n - i {
            out[i + j] += c[i] * c[j];
        }
    }
    out[0] -= 1.0;
    out
}

impl Jet {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The jet of `Φ` at `λ·base` from `Φ(λw) = p(Φ(w))`; the variable is
    /// carried along, so the scale grows by `λ`.
    pub fn propagate(&self, lambda: f64) -> Jet {
        Jet {
            base: self.base * lambda,
            scale: self.scale * lambda,
            coeffs: jet_square_minus_one(&self.coeffs),
        }
    }

    /// Index of the first coefficient past the constant term above the
    /// threshold relative to the largest one, i.e. `ord(Φ - Φ(base))`.
    pub fn vanishing_order(&self) -> Option<usize> {
        let max = self.coeffs[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return None;
        }
        self.coeffs[1..]
            .iter()
            .position(|c| c.norm() > ORDER_THRESHOLD * max)
            .map(|k| k + 1)
    }

    /// Coefficients in the plain variable `h = scale·u`.
    pub fn unscaled(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / self.scale.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPreimage {
    pub z: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub second_derivative: Complex64,
}

/// A point `z̃` with `Φ(z̃) = 0 = Φ'(z̃)`: sign changes of `Φ'` along the
/// real axis in `[-box, box]`, refined by Newton on `Φ'`, keeping the
/// smallest one where `|Φ| < 10⁻⁸`.
pub fn find_critical_preimage(series: &PoincareSeries, search_box: f64) -> Result<CriticalPreimage> {
    let step = 0.01;
    let n = (search_box / step).ceil() as usize;
    for sign in [-1.0, 1.0] {
        let d = |x: f64| series.derivative(Complex64::new(x, 0.0)).map(|v| v.re);
        let mut prev = d(0.0)?;
        for i in 1..=n {
            let x = sign * step * i as f64;
            let cur = d(x)?;
            if prev.signum() != cur.signum() {
                let mut z = Complex64::new(x - sign * step / 2.0, 0.0);
                for _ in 0..60 {
                    let jet = series.jet(z, 2, 1.0)?;
                    let delta = jet.coeffs[1] / (2.0 * jet.coeffs[2]);
                    z -= delta;
                    if delta.norm() < 1e-15 * (1.0 + z.norm()) {
                        break;
                    }
                }
                let jet = series.jet(z, 2, 1.0)?;
                if jet.coeffs[0].norm() < 1e-8 && jet.coeffs[1].norm() < 1e-8 {
                    return Ok(CriticalPreimage {
                        z,
                        value: jet.coeffs[0],
                        derivative: jet.coeffs[1],
                        second_derivative: 2.0 * jet.coeffs[2],
                    });
                }
            }
            prev = cur;
        }
    }
    Err(Error::SearchFailure)
}

/// The jet at `z̃` with the vanishing value and derivative set to exact
/// zeros, scaled so that the quadratic coefficient has modulus one.
pub fn critical_jet(series: &PoincareSeries, crit: &CriticalPreimage, order: usize) -> Result<Jet> {
    let c2 = crit.second_derivative.norm() / 2.0;
    if c2 == 0.0 {
        return Err(Error::Precondition("critical point is degenerate".into()));
    }
    let mut jet = series.jet(crit.z, order, c2.powf(-0.5))?;
    jet.coeffs[0] = Complex64::new(0.0, 0.0);
    jet.coeffs[1] = Complex64::new(0.0, 0.0);
    Ok(jet)
}

/// `ord(Φ - Φ(zₙ))` at `zₙ = λⁿz̃`, starting with jets of order 8 and
/// doubling up to `2ⁿ + 2`.
pub fn vanishing_order_at(series: &PoincareSeries, crit: &CriticalPreimage, n: u32) -> Result<usize> {
    let cap = (1usize << n.min(20)) + 2;
    let mut order = 8.min(cap).max(2);
    loop {
        let mut jet = critical_jet(series, crit, order)?;
        for _ in 0..n {
            jet = jet.propagate(series.lambda);
        }
        if let Some(k) = jet.vanishing_order() {
            return Ok(k);
        }
        if order >= cap {
            return Err(Error::Precondition(format!("jet order {order} too small at n = {n}")));
        }
        order = (order * 2).min(cap);
    }
}

/// Taylor coefficients of `Φ` at `z` in `h` by the trapezoid rule on the
/// circle `|h| = r`.
pub fn contour_coefficients(series: &PoincareSeries, z: Complex64, r: f64, count: usize, points: usize) -> Result<Vec<Complex64>> {
    let samples: Vec<Complex64> = (0..points)
        .map(|j| {
            let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / points as f64);
            series.eval(z + r * e)
        })
        .collect::<Result<_>>()?;
    Ok((0..count)
        .map(|k| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / points as f64))
                .sum();
            sum / (points as f64 * r.powi(k as i32))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub radii: Vec<f64>,
    pub log_log_max: Vec<f64>,
    pub slope: f64,
    /// Angle of the sampled maximum on each circle.
    pub argmax: Vec<f64>,
}

/// Least-squares slope of `log log max_{|z|=r}|Φ|` against `log r`.
pub fn order_of_growth_estimate(series: &PoincareSeries, radii: &[f64]) -> Result<GrowthEstimate> {
    if radii.len() < 2 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radii must be increasing, at least two".into()));
    }
    let angles = 720;
    let mut log_log_max = Vec::with_capacity(radii.len());
    let mut argmax = Vec::with_capacity(radii.len());
    for &r in radii {
        let (best, theta) = (0..angles)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / angles as f64 - std::f64::consts::PI;
                (series.log_abs(Complex64::from_polar(r, theta)), theta)
            })
            .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        if !(best > 0.0) || !best.is_finite() {
            return Err(Error::Domain(format!("log max modulus {best} at r = {r}")));
        }
        log_log_max.push(best.ln());
        argmax.push(theta);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = log_log_max.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&log_log_max).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(GrowthEstimate {
        radii: radii.to_vec(),
        log_log_max,
        slope: sxy / sxx,
        argmax,
    })
}

/// `log 2 / log λ`.
pub fn target_order(series: &PoincareSeries) -> f64 {
    2f64.ln() / series.lambda.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareReport {
    pub z0: f64,
    pub lambda: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<f64>,
    pub z_tilde: Complex64,
    pub orders: Vec<(u32, usize)>,
    pub growth_slope: f64,
}

/// Everything the `poincare` command writes: orders for `n = 0..=max_n`
/// and the growth slope over 25 log-spaced radii in `[10², 10⁶]`.
pub fn poincare_report(terms: usize, max_n: u32) -> Result<PoincareReport> {
    let series = solve_coefficients(terms);
    let crit = find_critical_preimage(&series, 40.0)?;
    let orders = (0..=max_n)
        .map(|n| vanishing_order_at(&series, &crit, n).map(|k| (n, k)))
        .collect::<Result<Vec<_>>>()?;
    let radii = log_spaced(1e2, 1e6, 25);
    let growth = order_of_growth_estimate(&series, &radii)?;
    Ok(PoincareReport {
        z0: series.z0,
        lambda: series.lambda,
        n: series.terms(),
        coeffs: series.coeffs.clone(),
        z_tilde: crit.z,
        orders,
        growth_slope: growth.slope,
    })
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}
