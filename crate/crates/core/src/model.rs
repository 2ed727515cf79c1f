//! Symbolic model of the straight brush for `z ↦ π sinh z`.
//!
//! A point of the model is a pair `(s, t)` where `s` is an external address
//! (a sequence over two copies of ℤ, tagged `L` and `R`) and `t ≥ 0` is a
//! potential. The model map shifts the address and grows the potential with
//! `F(t) = e^t - 1`, paying `π·|s₁|` for the height of the next strip:
//!
//! ```text
//! M(s, t) = (σ(s), F(t) - π·|s₁|)
//! ```
//!
//! Points whose forward potentials all stay non-negative form the brush
//! `X̄`; for each address the admissible potentials are a half line
//! `[t_s, ∞)` and `t_s` is the endpoint potential.
//!
//! Only eventually periodic addresses are represented. This makes `t_s` the
//! fixed point of a finite composition of contractions.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, CosineParams};
use crate::error::{Error, Result};

/// Potential above which a model orbit is declared escaping.
pub const ESCAPE_POTENTIAL: f64 = 50.0;

/// Backward potentials above this are reported as an infeasible address.
pub const POTENTIAL_GUARD: f64 = 1.0e12;

/// Distance to a boundary of the itinerary domains that forces a resample.
pub const ITINERARY_GUARD: f64 = 1.0e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// One letter of an external address, `n_L` or `n_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub side: Side,
    pub index: i64,
}

impl Symbol {
    pub const fn new(side: Side, index: i64) -> Self {
        Symbol { side, index }
    }

    pub const fn l(index: i64) -> Self {
        Symbol::new(Side::L, index)
    }

    pub const fn r(index: i64) -> Self {
        Symbol::new(Side::R, index)
    }

    /// `|n_L| = |n_R| = |n|`.
    pub fn abs(&self) -> u64 {
        self.index.unsigned_abs()
    }

    // i_L < i_R < (i+1)_L
    fn order_key(&self) -> i128 {
        2 * self.index as i128 + matches!(self.side, Side::R) as i128
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::L => 'L',
            Side::R => 'R',
        };
        write!(f, "{}{}", self.index, side)
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::Parse {
            what: "symbol",
            text: s.to_string(),
        };
        let (digits, side) = match s.chars().last() {
            Some('L') | Some('l') => (&s[..s.len() - 1], Side::L),
            Some('R') | Some('r') => (&s[..s.len() - 1], Side::R),
            _ => return Err(err()),
        };
        let index = digits.parse::<i64>().map_err(|_| err())?;
        Ok(Symbol { side, index })
    }
}

/// Reduces an eventually periodic word to its canonical form: the period is
/// primitive and the preperiod cannot be shortened by rotating the period.
pub(crate) fn canonicalize<T: Clone + PartialEq>(
    mut preperiod: Vec<T>,
    mut period: Vec<T>,
) -> (Vec<T>, Vec<T>) {
    let n = period.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i % d]) {
            period.truncate(d);
            break;
        }
    }
    while let (Some(a), Some(b)) = (preperiod.last(), period.last()) {
        if a != b {
            break;
        }
        preperiod.pop();
        period.rotate_right(1);
    }
    (preperiod, period)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// An eventually periodic external address `preperiod · period^∞`.
///
/// Values are always kept in canonical form, so derived equality is
/// equality of the infinite sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ExternalAddress {
    preperiod: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl ExternalAddress {
    pub fn new(preperiod: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("empty period".into()));
        }
        let (preperiod, period) = canonicalize(preperiod, period);
        Ok(ExternalAddress { preperiod, period })
    }

    pub fn periodic(period: Vec<Symbol>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    /// The constant address `s^∞`.
    pub fn constant(symbol: Symbol) -> Self {
        ExternalAddress {
            preperiod: Vec::new(),
            period: vec![symbol],
        }
    }

    pub fn preperiod(&self) -> &[Symbol] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    pub fn entry(&self, n: usize) -> Symbol {
        if n < self.preperiod.len() {
            self.preperiod[n]
        } else {
            self.period[(n - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The one-sided shift `σ`.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    pub fn shift_by(&self, k: usize) -> Self {
        if k <= self.preperiod.len() {
            return ExternalAddress {
                preperiod: self.preperiod[k..].to_vec(),
                period: self.period.clone(),
            };
        }
        let r = (k - self.preperiod.len()) % self.period.len();
        let mut period = self.period.clone();
        period.rotate_left(r);
        ExternalAddress {
            preperiod: Vec::new(),
            period,
        }
    }

    /// The address of the complex-conjugate ray: `n_R ↦ (-n)_R`.
    pub fn conjugate(&self) -> Self {
        let flip = |v: &[Symbol]| v.iter().map(|s| Symbol::new(s.side, -s.index)).collect();
        ExternalAddress {
            preperiod: flip(&self.preperiod),
            period: flip(&self.period),
        }
    }

    /// Index from which the address is constantly `0_R` or `0_L`, if any.
    pub fn zero_tail_start(&self) -> Option<usize> {
        if self.period.len() == 1 && self.period[0].index == 0 {
            Some(self.preperiod.len())
        } else {
            None
        }
    }

    /// Number of entries after which the sequence is determined.
    pub(crate) fn horizon(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }
}

impl Ord for ExternalAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        let span = self.preperiod.len().max(other.preperiod.len())
            + lcm(self.period.len(), other.period.len());
        (0..span)
            .map(|i| self.entry(i).cmp(&other.entry(i)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for ExternalAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic comparison with respect to the symbol order.
pub fn address_compare(a: &ExternalAddress, b: &ExternalAddress) -> Ordering {
    a.cmp(b)
}

fn join(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for ExternalAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.preperiod.is_empty() {
            f.write_str(&join(&self.period))
        } else {
            write!(f, "{}|{}", join(&self.preperiod), join(&self.period))
        }
    }
}

fn parse_symbols(s: &str) -> Result<Vec<Symbol>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

impl FromStr for ExternalAddress {
    type Err = Error;

    /// Accepts `"1R,2L|0R"` (preperiod, bar, period) or a bare period `"2R"`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('|') {
            Some((pre, per)) => Self::new(parse_symbols(pre)?, parse_symbols(per)?),
            None => Self::new(Vec::new(), parse_symbols(s)?),
        }
    }
}

impl TryFrom<String> for ExternalAddress {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ExternalAddress> for String {
    fn from(a: ExternalAddress) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub address: ExternalAddress,
    pub t: f64,
}

impl ModelPoint {
    pub fn new(address: ExternalAddress, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("potential {t} is negative")));
        }
        Ok(ModelPoint { address, t })
    }

    /// The complexified point `t + 2πi·s₀`.
    pub fn complexified(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.t, 2.0 * PI * self.address.entry(0).index as f64)
    }
}

/// `F(t) = e^t - 1`.
pub fn growth(t: f64) -> f64 {
    t.exp_m1()
}

/// `F⁻¹(x) = log(1 + x)`.
pub fn growth_inverse(x: f64) -> f64 {
    x.ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelStep {
    Point(ModelPoint),
    /// The next potential would be negative; the point is not in `X̄`.
    Rejected(f64),
}

pub fn apply_model_map(p: &ModelPoint) -> ModelStep {
    let next = growth(p.t) - PI * p.address.entry(1).abs() as f64;
    if next >= 0.0 {
        ModelStep::Point(ModelPoint {
            address: p.address.shift(),
            t: next,
        })
    } else {
        ModelStep::Rejected(next)
    }
}

/// Potentials `T(Mⁿ(s, t))` for `n = 0..=steps`, stopping early on a
/// negative value (which is included) or on overflow.
pub fn potential_orbit(address: &ExternalAddress, t: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut t = t;
    out.push(t);
    for n in 1..=steps {
        t = growth(t) - PI * address.entry(n).abs() as f64;
        out.push(t);
        if t < 0.0 || !t.is_finite() {
            break;
        }
    }
    out
}

/// Endpoint potential `t_s`.
///
/// The periodic tail is seeded with 0 and the period block
/// `x ↦ F⁻¹(x + π|s|)` composed over one period is iterated to a fixed
/// point; the preperiod is then unrolled backwards.
pub fn potential_boundary(s: &ExternalAddress, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    const MAX_BLOCKS: usize = 100_000;
    let pre = s.preperiod().len();
    let per = s.period().len();
    // value at index `pre` (start of the period) from the value at `pre + per`
    let block = |x: f64| {
        let mut x = x;
        for i in (1..=per).rev() {
            x = growth_inverse(x + PI * s.entry(pre + i).abs() as f64);
        }
        x
    };
    let mut x = 0.0;
    let mut converged = false;
    for _ in 0..MAX_BLOCKS {
        let next = block(x);
        if next > POTENTIAL_GUARD || !next.is_finite() {
            return Err(Error::InfeasibleAddress {
                guard: POTENTIAL_GUARD,
            });
        }
        let delta = (next - x).abs();
        x = next;
        if delta <= tol * 1e-3 || delta == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Divergence {
            iterations: MAX_BLOCKS,
            last: x,
        });
    }
    for i in (1..=pre).rev() {
        x = growth_inverse(x + PI * s.entry(i).abs() as f64);
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BrushVerdict {
    /// The potential exceeded the escape threshold: the point lies in `X`.
    InX,
    /// Never rejected within the depth and never escaped.
    InXbarOnly,
    NotInXbar,
}

impl fmt::Display for BrushVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BrushVerdict::InX => "InX",
            BrushVerdict::InXbarOnly => "InXbarOnly",
            BrushVerdict::NotInXbar => "NotInXbar",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub verdict: BrushVerdict,
    /// Set when the orbit neither escaped nor stabilised at a fixed
    /// potential within the depth; the verdict is then `InXbarOnly`.
    pub undecided: bool,
}

pub fn brush_membership(p: &ModelPoint, depth: usize) -> Result<Membership> {
    if depth < 1 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let mut current = p.clone();
    for _ in 0..depth {
        if current.t > ESCAPE_POTENTIAL {
            return Ok(Membership {
                verdict: BrushVerdict::InX,
                undecided: false,
            });
        }
        match apply_model_map(&current) {
            ModelStep::Rejected(_) => {
                return Ok(Membership {
                    verdict: BrushVerdict::NotInXbar,
                    undecided: false,
                })
            }
            ModelStep::Point(next) => {
                let stalled = next.t == current.t && next.address == current.address;
                current = next;
                if stalled {
                    return Ok(Membership {
                        verdict: BrushVerdict::InXbarOnly,
                        undecided: false,
                    });
                }
            }
        }
    }
    if current.t > ESCAPE_POTENTIAL {
        return Ok(Membership {
            verdict: BrushVerdict::InX,
            undecided: false,
        });
    }
    Ok(Membership {
        verdict: BrushVerdict::InXbarOnly,
        undecided: true,
    })
}

/// One row of the brush CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct BrushSample {
    pub address: ExternalAddress,
    pub t: f64,
    pub verdict: BrushVerdict,
}

pub fn brush_csv(samples: &[BrushSample]) -> String {
    let mut out = String::from("address,t,verdict\n");
    for s in samples {
        out.push_str(&format!("{},{},{}\n", s.address, s.t, s.verdict));
    }
    out
}

/// Entry `(n, k)` of an itinerary: the domain `U_(n,k)` of height `2π`,
/// with `k = 1` on the right of the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ItineraryEntry {
    pub n: i64,
    pub k: u8,
}

impl fmt::Display for ItineraryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Itinerary {
    preperiod: Vec<ItineraryEntry>,
    period: Vec<ItineraryEntry>,
}

impl Itinerary {
    pub fn new(preperiod: Vec<ItineraryEntry>, period: Vec<ItineraryEntry>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("empty itinerary period".into()));
        }
        let (preperiod, period) = canonicalize(preperiod, period);
        Ok(Itinerary { preperiod, period })
    }

    pub fn preperiod(&self) -> &[ItineraryEntry] {
        &self.preperiod
    }

    pub fn period(&self) -> &[ItineraryEntry] {
        &self.period
    }

    pub fn entry(&self, i: usize) -> ItineraryEntry {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[ItineraryEntry]| v.iter().map(|e| e.to_string()).collect::<String>();
        write!(f, "{}|{}", j(&self.preperiod), j(&self.period))
    }
}

/// The itinerary domain containing `z`, or `None` within the guard distance
/// of `Re z = 0` or `Im z ∈ 2πℤ`.
pub fn itinerary_domain(z: num_complex::Complex64, guard: f64) -> Option<ItineraryEntry> {
    let height = z.im / (2.0 * PI);
    let n = height.floor();
    let to_line = (height - height.round()).abs() * 2.0 * PI;
    if z.re.abs() < guard || to_line < guard {
        return None;
    }
    Some(ItineraryEntry {
        n: n as i64,
        k: (z.re > 0.0) as u8,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItineraryResult {
    Assigned(Itinerary),
    /// Some forward image of the ray is `ℝ⁺` or `ℝ⁻`.
    Unassigned,
}

/// Itinerary of the dynamic ray with address `s`.
///
/// Every forward image `f^i(γ_s)` is the ray of `σ^i(s)`, which lies inside
/// a single domain `U_(n,k)`; the domain is read off a traced sample point of
/// that ray. Entries past the periodic horizon up to `depth` are traced as a
/// consistency check.
pub fn itinerary_of_address(
    s: &ExternalAddress,
    f: &CosineParams,
    depth: usize,
) -> Result<ItineraryResult> {
    if depth < 1 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if s.zero_tail_start().is_some() {
        return Ok(ItineraryResult::Unassigned);
    }
    let horizon = s.horizon();
    let checked = depth.max(horizon).min(horizon + s.period().len());
    let mut entries = Vec::with_capacity(checked);
    for i in 0..checked {
        let shifted = s.shift_by(i);
        let t_s = potential_boundary(&shifted, 1e-12)?;
        let mut t = t_s + 1.0;
        let mut entry = None;
        for _ in 0..6 {
            let point = dynamics::trace_ray(f, &shifted, t, 4, 1e-12)?;
            if let Some(e) = itinerary_domain(point.z, ITINERARY_GUARD) {
                entry = Some(e);
                break;
            }
            t += 1.0;
        }
        match entry {
            Some(e) => entries.push(e),
            None => {
                let z = dynamics::trace_ray(f, &shifted, t, 4, 1e-12)?.z;
                return Err(Error::ItineraryAmbiguous { z });
            }
        }
    }
    let pre = s.preperiod().len();
    for i in horizon..checked {
        if entries[i] != entries[i - s.period().len()] {
            return Err(Error::Precondition(format!(
                "itinerary of {s} is not periodic with the address period at entry {i}"
            )));
        }
    }
    let itin = Itinerary::new(entries[..pre].to_vec(), entries[pre..horizon].to_vec())?;
    Ok(ItineraryResult::Assigned(itin))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pinch {
    Pinched,
    NotPinched,
    /// Neither the itinerary rule nor the listed quadruples decide the pair.
    Unknown,
}

/// Which of the two listed quadruples an address belongs to, with its
/// parameters. Addresses are `prefix · x · y · u · 0^∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QuadrupleMember {
    pub family: QuadrupleFamily,
    pub member: u8,
    pub m: i64,
    pub n: i64,
    pub prefix: Vec<Symbol>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum QuadrupleFamily {
    Left,
    Right,
}

fn floor_half(k: i64) -> i64 {
    k.div_euclid(2)
}

pub(crate) fn quadruple_member(s: &ExternalAddress) -> Option<QuadrupleMember> {
    s.zero_tail_start()?;
    let tail = s.period()[0].side;
    let pre = s.preperiod();
    if pre.len() < 3 {
        return None;
    }
    let (x, y, u) = (pre[pre.len() - 3], pre[pre.len() - 2], pre[pre.len() - 1]);
    let prefix = pre[..pre.len() - 3].to_vec();
    if u.index != 1 {
        return None;
    }
    use Side::{L, R};
    // (u side, tail side) is either (L, R) or (R, L)
    match (u.side, tail) {
        (L, R) | (R, L) => {}
        _ => return None,
    }
    if y.index < 0 {
        return None;
    }
    let y_odd = y.index.rem_euclid(2) == 1;
    let x_odd = x.index.rem_euclid(2) == 1;
    let n = floor_half(y.index);
    let m = floor_half(x.index);
    // rows: (x side, x odd, y side, y odd, u side)
    let rows: [(QuadrupleFamily, u8, Side, bool, Side, bool, Side); 8] = [
        (QuadrupleFamily::Left, 0, R, false, R, true, L),
        (QuadrupleFamily::Left, 1, R, false, R, false, R),
        (QuadrupleFamily::Left, 2, R, true, L, true, R),
        (QuadrupleFamily::Left, 3, R, true, L, false, L),
        (QuadrupleFamily::Right, 0, L, true, R, true, L),
        (QuadrupleFamily::Right, 1, L, true, R, false, R),
        (QuadrupleFamily::Right, 2, L, false, L, true, R),
        (QuadrupleFamily::Right, 3, L, false, L, false, L),
    ];
    rows.iter()
        .find(|r| r.2 == x.side && r.3 == x_odd && r.4 == y.side && r.5 == y_odd && r.6 == u.side)
        .map(|r| QuadrupleMember {
            family: r.0,
            member: r.1,
            m,
            n,
            prefix,
        })
}

/// Whether two itineraries have the shape of rays landing together: a
/// common prefix, one entry with equal `n` and complementary `k`, then
/// entries with `n` constantly 0 (or constantly -1) and complementary `k`.
pub fn itineraries_pinch(a: &Itinerary, b: &Itinerary) -> bool {
    let span = a.preperiod().len().max(b.preperiod().len())
        + lcm(a.period().len(), b.period().len());
    let Some(d) = (0..span).find(|&i| a.entry(i) != b.entry(i)) else {
        return false;
    };
    let (ea, eb) = (a.entry(d), b.entry(d));
    if ea.n != eb.n || ea.k + eb.k != 1 {
        return false;
    }
    let tail = a.entry(d + 1).n;
    if tail != 0 && tail != -1 {
        return false;
    }
    (d + 1..d + 1 + span).all(|i| {
        let (x, y) = (a.entry(i), b.entry(i));
        x.n == tail && y.n == tail && x.k + y.k == 1
    })
}

pub fn pinched(
    s1: &ExternalAddress,
    s2: &ExternalAddress,
    f: &CosineParams,
    depth: usize,
) -> Result<Pinch> {
    if s1 == s2 {
        return Err(Error::Precondition("pinching needs two distinct addresses".into()));
    }
    let minus1 = s1.zero_tail_start().is_some();
    let minus2 = s2.zero_tail_start().is_some();
    match (minus1, minus2) {
        (true, true) => {
            let (Some(q1), Some(q2)) = (quadruple_member(s1), quadruple_member(s2)) else {
                return Ok(Pinch::Unknown);
            };
            let same = q1.family == q2.family && q1.m == q2.m && q1.n == q2.n && q1.prefix == q2.prefix;
            Ok(if same { Pinch::Pinched } else { Pinch::Unknown })
        }
        (false, false) => {
            let a = itinerary_of_address(s1, f, depth)?;
            let b = itinerary_of_address(s2, f, depth)?;
            match (a, b) {
                (ItineraryResult::Assigned(a), ItineraryResult::Assigned(b)) => Ok(
                    if itineraries_pinch(&a, &b) {
                        Pinch::Pinched
                    } else {
                        Pinch::NotPinched
                    },
                ),
                _ => Ok(Pinch::Unknown),
            }
        }
        _ => Ok(Pinch::Unknown),
    }
}

/// All four members of a listed quadruple.
pub fn quadruple(family_left: bool, prefix: &[Symbol], m: i64, n: i64) -> Result<[ExternalAddress; 4]> {
    if n < 0 {
        return Err(Error::InvalidInput("quadruple parameter n must be non-negative".into()));
    }
    use Side::{L, R};
    let build = |x: Symbol, y: Symbol, u: Symbol, tail: Symbol| {
        let mut pre = prefix.to_vec();
        pre.extend([x, y, u]);
        ExternalAddress::new(pre, vec![tail])
    };
    let (e, o) = (2 * m, 2 * m + 1);
    let (ye, yo) = (2 * n, 2 * n + 1);
    let zr = Symbol::r(0);
    let zl = Symbol::l(0);
    let (one_l, one_r) = (Symbol::l(1), Symbol::r(1));
    let xs = if family_left {
        [Symbol::new(R, e), Symbol::new(R, e), Symbol::new(R, o), Symbol::new(R, o)]
    } else {
        [Symbol::new(L, o), Symbol::new(L, o), Symbol::new(L, e), Symbol::new(L, e)]
    };
    Ok([
        build(xs[0], Symbol::r(yo), one_l, zr)?,
        build(xs[1], Symbol::r(ye), one_r, zl)?,
        build(xs[2], Symbol::l(yo), one_r, zl)?,
        build(xs[3], Symbol::l(ye), one_l, zr)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> ExternalAddress {
        s.parse().unwrap()
    }

    #[test]
    fn symbol_order_and_text() {
        assert!(Symbol::l(0) < Symbol::r(0));
        assert!(Symbol::r(0) < Symbol::l(1));
        assert!(Symbol::r(-1) < Symbol::l(0));
        assert_eq!(Symbol::l(-3).abs(), 3);
        assert_eq!("-4R".parse::<Symbol>().unwrap(), Symbol::r(-4));
        assert_eq!(Symbol::l(2).to_string(), "2L");
        assert!("4X".parse::<Symbol>().is_err());
    }

    #[test]
    fn canonical_forms() {
        let a = ExternalAddress::new(vec![Symbol::r(0)], vec![Symbol::r(0), Symbol::r(0)]).unwrap();
        assert_eq!(a, ExternalAddress::constant(Symbol::r(0)));
        let b = ExternalAddress::new(
            vec![Symbol::r(1), Symbol::l(2)],
            vec![Symbol::r(3), Symbol::l(2)],
        )
        .unwrap();
        assert_eq!(b.preperiod(), &[Symbol::r(1)]);
        assert_eq!(b.period(), &[Symbol::l(2), Symbol::r(3)]);
        assert_eq!(b.to_string(), "1R|2L,3R");
        assert_eq!(addr("1R|2L,3R"), b);
        assert_eq!(addr("2R"), addr("|2R,2R"));
    }

    #[test]
    fn shift_and_entries() {
        let a = addr("1R,2L|3R,4L");
        assert_eq!(a.entry(0), Symbol::r(1));
        assert_eq!(a.entry(5), Symbol::l(4));
        assert_eq!(a.shift_by(3), addr("|4L,3R"));
        assert_eq!(a.shift().entry(0), Symbol::l(2));
    }

    #[test]
    fn model_map_examples() {
        let fixed = ModelPoint::new(addr("0R"), 0.0).unwrap();
        assert_eq!(apply_model_map(&fixed), ModelStep::Point(fixed.clone()));

        let p = ModelPoint::new(addr("0R,2L|0R"), 1.0).unwrap();
        match apply_model_map(&p) {
            ModelStep::Rejected(v) => {
                assert!((v - (std::f64::consts::E - 1.0 - 2.0 * PI)).abs() < 1e-12);
                assert!((v + 4.56491).abs() < 1e-5);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(ModelPoint::new(addr("0R"), -1.0).is_err());
    }

    #[test]
    fn endpoint_potentials() {
        assert_eq!(potential_boundary(&addr("0R"), 1e-12).unwrap(), 0.0);

        let mut t = 0.0f64;
        for _ in 0..200 {
            t = (1.0 + PI + t).ln();
        }
        let t1 = potential_boundary(&addr("1R"), 1e-12).unwrap();
        assert!((t1 - t).abs() < 1e-10);
        assert!((t1 - 1.7784).abs() < 1e-4);

        // s₀ never enters the model map
        assert_eq!(potential_boundary(&addr("1R|0R"), 1e-12).unwrap(), 0.0);
        let one_step = potential_boundary(&addr("0R,1R|0R"), 1e-12).unwrap();
        assert!((one_step - (1.0 + PI).ln()).abs() < 1e-12);
        assert!((one_step - 1.42108).abs() < 1e-5);
    }

    #[test]
    fn endpoint_is_sharp() {
        let s = addr("2R,-1L|3R,1L");
        let tol = 1e-9;
        let t_s = potential_boundary(&s, tol).unwrap();
        let above = potential_orbit(&s, t_s, 8);
        assert!(above.iter().all(|&t| t >= -tol), "{above:?}");
        let below = potential_orbit(&s, t_s - 10.0 * tol, 60);
        assert!(*below.last().unwrap() < 0.0);
    }

    #[test]
    fn membership_examples() {
        let m = brush_membership(&ModelPoint::new(addr("0R"), 0.0).unwrap(), 100).unwrap();
        assert_eq!(m.verdict, BrushVerdict::InXbarOnly);
        let m = brush_membership(&ModelPoint::new(addr("0R"), 1.0).unwrap(), 5).unwrap();
        assert_eq!(m.verdict, BrushVerdict::InX);
        let m = brush_membership(&ModelPoint::new(addr("1R"), 1.0).unwrap(), 3).unwrap();
        assert_eq!(m.verdict, BrushVerdict::NotInXbar);
        assert!(brush_membership(&ModelPoint::new(addr("1R"), 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(address_compare(&addr("0L"), &addr("0R")), Ordering::Less);
        let s = addr("3R,1L|2R");
        assert_eq!(address_compare(&s, &s), Ordering::Equal);
        assert_eq!(address_compare(&addr("1R|0R"), &addr("1R|0L")), Ordering::Greater);
    }

    #[test]
    fn quadruple_decoding() {
        for left in [true, false] {
            for (m, n) in [(0, 0), (-2, 1), (3, 4)] {
                let q = quadruple(left, &[Symbol::r(5)], m, n).unwrap();
                for (i, a) in q.iter().enumerate() {
                    let d = quadruple_member(a).unwrap();
                    assert_eq!(d.member as usize, i);
                    assert_eq!((d.m, d.n), (m, n));
                    assert_eq!(d.family == QuadrupleFamily::Left, left);
                }
            }
        }
        let q = quadruple(true, &[], 0, 0).unwrap();
        assert_eq!(q[0], addr("0R,1R,1L|0R"));
        assert_eq!(q[1], addr("0R,0R,1R|0L"));
        assert_eq!(q[2], addr("1R,1L,1R|0L"));
        assert_eq!(q[3], addr("1R,0L,1L|0R"));
    }

    #[test]
    fn pinched_on_quadruples() {
        let f = CosineParams::pi_sinh();
        let q = quadruple(true, &[], 0, 0).unwrap();
        assert_eq!(pinched(&q[0], &q[1], &f, 10).unwrap(), Pinch::Pinched);
        assert_eq!(pinched(&q[2], &q[0], &f, 10).unwrap(), Pinch::Pinched);
        assert!(pinched(&q[0], &q[0], &f, 10).is_err());
        let other = quadruple(true, &[], 1, 0).unwrap();
        assert_eq!(pinched(&q[0], &other[1], &f, 10).unwrap(), Pinch::Unknown);
        assert_eq!(pinched(&addr("0R"), &addr("0L"), &f, 10).unwrap(), Pinch::Unknown);
    }

    #[test]
    fn itinerary_shape_rule() {
        let e = |n, k| ItineraryEntry { n, k };
        let a = Itinerary::new(vec![e(2, 1), e(1, 0)], vec![e(0, 1)]).unwrap();
        let b = Itinerary::new(vec![e(2, 1), e(1, 1)], vec![e(0, 0)]).unwrap();
        assert!(itineraries_pinch(&a, &b));
        assert!(itineraries_pinch(&b, &a));
        let c = Itinerary::new(vec![e(2, 1), e(1, 1)], vec![e(-1, 0)]).unwrap();
        assert!(!itineraries_pinch(&a, &c));
        let d = Itinerary::new(vec![e(2, 1), e(3, 1)], vec![e(0, 0)]).unwrap();
        assert!(!itineraries_pinch(&a, &d));
        let g = Itinerary::new(vec![e(5, 0)], vec![e(-1, 0), e(-1, 1)]).unwrap();
        let h = Itinerary::new(vec![e(5, 1)], vec![e(-1, 1), e(-1, 0)]).unwrap();
        assert!(itineraries_pinch(&g, &h));
        assert!(!itineraries_pinch(&a, &a));
    }

    #[test]
    fn csv_export() {
        let rows = vec![BrushSample {
            address: addr("1R|0R"),
            t: 0.5,
            verdict: BrushVerdict::InX,
        }];
        assert_eq!(brush_csv(&rows), "address,t,verdict\n1R|0R,0.5,InX\n");
    }
}
