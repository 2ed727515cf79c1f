//! Flat `key = value` configuration files for the renderer.
//!
//! ```text
//! # π sinh around the origin
//! params = pi_sinh
//! center = 0 0
//! width = 8
//! height = 8
//! resolution = 512x512
//! escape_radius = 50
//! maxiter = 200
//! overlays = 0R; 2R,1R|0R
//! threads = 4
//! ```
//!
//! `params` is `pi_sinh`, `disjoint_sinh <λ>` or `a <re> <im> b <re> <im>`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dynamics::CosineParams;
use crate::error::{Error, Result};
use crate::model::ExternalAddress;
use crate::render::RenderConfig;

pub const KEYS: [&str; 9] = [
    "params",
    "center",
    "width",
    "height",
    "resolution",
    "escape_radius",
    "maxiter",
    "overlays",
    "threads",
];

/// Parses `key = value` lines; `#` starts a comment, later keys win.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::Config(format!("{key}: {v:?} is not a number")))
}

fn complex(key: &str, v: &str) -> Result<Complex64> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(number(key, re)?, 0.0)),
        [re, im] => Ok(Complex64::new(number(key, re)?, number(key, im)?)),
        _ => Err(Error::Config(format!("{key}: expected \"re im\", got {v:?}"))),
    }
}

pub fn parse_params(v: &str) -> Result<CosineParams> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        ["pi_sinh"] => Ok(CosineParams::pi_sinh()),
        ["disjoint_sinh", l] => {
            let l = number("params", l)?;
            if !(l > 0.0) {
                return Err(Error::Config(format!("params: λ = {l} must be positive")));
            }
            Ok(CosineParams::disjoint_sinh(l))
        }
        ["a", ar, ai, "b", br, bi] => CosineParams::new(
            Complex64::new(number("params", ar)?, number("params", ai)?),
            Complex64::new(number("params", br)?, number("params", bi)?),
        ),
        _ => Err(Error::Config(format!("params: cannot read {v:?}"))),
    }
}

/// Starts from [`RenderConfig::pi_sinh_default`] and applies the entries.
pub fn render_config(entries: &BTreeMap<String, String>) -> Result<RenderConfig> {
    let mut cfg = RenderConfig::pi_sinh_default();
    for (k, v) in entries {
        match k.as_str() {
            "params" => cfg.params = parse_params(v)?,
            "center" => cfg.center = complex(k, v)?,
            "width" => cfg.width = number(k, v)?,
            "height" => cfg.height = number(k, v)?,
            "resolution" => {
                let (w, h) = v
                    .split_once('x')
                    .ok_or_else(|| Error::Config(format!("resolution: expected WxH, got {v:?}")))?;
                let side = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("resolution: {v:?}")))
                };
                cfg.resolution = (side(w)?, side(h)?);
            }
            "escape_radius" => cfg.escape_radius = number(k, v)?,
            "maxiter" => {
                cfg.maxiter = v.parse().map_err(|_| Error::Config(format!("maxiter: {v:?}")))?;
            }
            "overlays" => {
                cfg.overlays = v
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<ExternalAddress>)
                    .collect::<Result<_>>()?;
            }
            "threads" => {
                cfg.threads = v.parse().map_err(|_| Error::Config(format!("threads: {v:?}")))?;
            }
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The entries that determine the image; `threads` is left out.
pub fn canonical_inputs(entries: &BTreeMap<String, String>) -> String {
    entries
        .iter()
        .filter(|(k, _)| k.as_str() != "threads")
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
}
