//! Escape-time pictures of `F_{a,b}` with ray overlays, as binary PPM.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{self, CosineParams, Escape};
use crate::error::{Error, Result};
use crate::model::{potential_boundary, ExternalAddress};

pub const MAX_SIDE: usize = 16384;

/// Grey levels cycled by escape time.
const PALETTE: [u8; 16] = [
    255, 238, 221, 204, 187, 170, 153, 136, 119, 102, 85, 68, 51, 34, 17, 8,
];
const BOUNDED: [u8; 3] = [0, 0, 0];
const UNDECIDED: [u8; 3] = [128, 128, 128];
const RAY: [u8; 3] = [230, 60, 20];
const MARK: [u8; 3] = [20, 120, 230];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderConfig {
    pub params: CosineParams,
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub resolution: (usize, usize),
    pub escape_radius: f64,
    pub maxiter: usize,
    pub overlays: Vec<ExternalAddress>,
    pub threads: usize,
}

impl RenderConfig {
    /// `π sinh` on `[-4, 4] × [-4, 4]` at 512².
    pub fn pi_sinh_default() -> Self {
        RenderConfig {
            params: CosineParams::pi_sinh(),
            center: Complex64::new(0.0, 0.0),
            width: 8.0,
            height: 8.0,
            resolution: (512, 512),
            escape_radius: 50.0,
            maxiter: 200,
            overlays: Vec::new(),
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.resolution;
        if w == 0 || h == 0 || w > MAX_SIDE || h > MAX_SIDE {
            return Err(Error::InvalidInput(format!("resolution {w}x{h} outside 1..={MAX_SIDE}")));
        }
        if !(self.width > 0.0 && self.height > 0.0) || !self.center.is_finite() {
            return Err(Error::InvalidInput("window must have positive finite size".into()));
        }
        let (v1, v2) = dynamics::singular_values(&self.params);
        if !(self.escape_radius > v1.norm().max(v2.norm()) + 1.0) {
            return Err(Error::InvalidInput(format!(
                "escape radius {} must exceed |v| + 1",
                self.escape_radius
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidInput("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Centre of pixel `(x, y)`, row 0 at the top.
    pub fn pixel(&self, x: usize, y: usize) -> Complex64 {
        let (w, h) = self.resolution;
        let fx = (2 * x as i64 + 1 - w as i64) as f64 / (2 * w) as f64;
        let fy = (2 * y as i64 + 1 - h as i64) as f64 / (2 * h) as f64;
        Complex64::new(self.center.re + self.width * fx, self.center.im - self.height * fy)
    }

    /// The pixel containing `z`, if inside the window.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let (w, h) = self.resolution;
        let fx = (z.re - self.center.re) / self.width + 0.5;
        let fy = 0.5 - (z.im - self.center.im) / self.height;
        if !(0.0..1.0).contains(&fx) || !(0.0..1.0).contains(&fy) {
            return None;
        }
        Some(((fx * w as f64) as usize, (fy * h as f64) as usize))
    }

    /// Every pixel whose closed cell contains `z`: one, or two or four on
    /// cell boundaries, so the set is symmetric under reflections.
    pub fn cells(&self, z: Complex64) -> Vec<(usize, usize)> {
        let (w, h) = self.resolution;
        let axis = |v: f64, n: usize| -> Vec<usize> {
            let v = v * n as f64;
            if !(0.0..=n as f64).contains(&v) {
                return Vec::new();
            }
            let k = v.floor();
            if k == v {
                let k = k as usize;
                [k.checked_sub(1), (k < n).then_some(k)].into_iter().flatten().collect()
            } else {
                vec![k as usize]
            }
        };
        let xs = axis((z.re - self.center.re) / self.width + 0.5, w);
        let ys = axis(0.5 - (z.im - self.center.im) / self.height, h);
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
    }

    /// The configuration of the window reflected in the real axis.
    pub fn mirrored(&self) -> Self {
        RenderConfig {
            center: self.center.conj(),
            overlays: self.overlays.iter().map(ExternalAddress::conjugate).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// RGB, row-major, top row first.
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn put(&mut self, (x, y): (usize, usize), c: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&c);
    }

    /// The image with its rows in reverse order.
    pub fn flipped(&self) -> Image {
        let row = 3 * self.width;
        let pixels = self.pixels.chunks(row).rev().flatten().copied().collect();
        Image { pixels, ..*self }
    }
}

fn colour(e: Escape) -> [u8; 3] {
    match e {
        Escape::Escaping(n) => {
            let g = PALETTE[n % PALETTE.len()];
            [g, g, g]
        }
        Escape::Bounded => BOUNDED,
        Escape::Undecided => UNDECIDED,
    }
}

fn render_rows(cfg: &RenderConfig) -> Vec<u8> {
    let (w, h) = cfg.resolution;
    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut row = Vec::with_capacity(3 * w);
            for x in 0..w {
                let e = dynamics::escape_time(&cfg.params, cfg.pixel(x, y), cfg.escape_radius, cfg.maxiter);
                row.extend_from_slice(&colour(e));
            }
            row
        })
        .collect();
    rows.concat()
}

/// Potentials at which overlay rays are sampled, above `t_s`.
fn overlay_potentials(t_s: f64) -> Vec<f64> {
    (0..48).map(|k| t_s + 0.05 * 1.08f64.powi(k)).collect()
}

fn draw_segment(img: &mut Image, cfg: &RenderConfig, a: Complex64, b: Complex64) {
    let (w, h) = cfg.resolution;
    let px = (cfg.width / w as f64).min(cfg.height / h as f64);
    let steps = (((b - a).norm() / px).ceil() as usize).clamp(1, 4 * (w + h));
    for k in 0..=steps {
        let z = a + (b - a) * (k as f64 / steps as f64);
        if let Some(p) = cfg.locate(z) {
            img.put(p, RAY);
        }
    }
}

/// Renders the escape-time picture with overlays and marks at the
/// singular values and `0`. The bytes do not depend on `threads`.
pub fn render(cfg: &RenderConfig) -> Result<Image> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let pixels = pool.install(|| render_rows(cfg));
    let (w, h) = cfg.resolution;
    let mut img = Image {
        width: w,
        height: h,
        pixels,
    };
    for s in &cfg.overlays {
        let t_s = potential_boundary(s, 1e-12)?;
        // the first sample must trace; closer to the landing point the
        // pullback may hit roundoff, and the polyline stops there
        let mut pts = Vec::new();
        for (k, t) in overlay_potentials(t_s).into_iter().rev().enumerate() {
            match dynamics::trace_ray(&cfg.params, s, t, 4, 1e-10) {
                Ok(p) => pts.push(p.z),
                Err(e) if k == 0 => return Err(e),
                Err(_) => break,
            }
        }
        for seg in pts.windows(2) {
            draw_segment(&mut img, cfg, seg[0], seg[1]);
        }
    }
    let (v1, v2) = dynamics::singular_values(&cfg.params);
    for m in [v1, v2, Complex64::new(0.0, 0.0)] {
        for p in cfg.cells(m) {
            img.put(p, MARK);
        }
    }
    Ok(img)
}
