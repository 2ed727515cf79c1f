use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use cosine_bouquet::config;
use cosine_bouquet::conjugacy;
use cosine_bouquet::dynamics::{self, CosineParams};
use cosine_bouquet::error::Error;
use cosine_bouquet::model::{self, BrushSample, ExternalAddress, ModelPoint};
use cosine_bouquet::orbifold::{self, Chain};
use cosine_bouquet::poincare;
use cosine_bouquet::render;
use cosine_bouquet::report::{self, Run};
use cosine_bouquet::verify;

#[derive(Parser)]
#[command(name = "bouquet", version, about = "Dynamics of a·e^z + b·e^-z: rays, model, orbifold bounds, semiconjugacy")]
struct Cli {
    /// Where to write the JSON run report.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Escape-time image with ray overlays (binary PPM).
    Render {
        /// key = value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides, e.g. --set resolution=256x256.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value = "render.ppm")]
        out: PathBuf,
    },
    /// Endpoint potentials and brush membership samples.
    Model {
        #[arg(long = "address", required = true)]
        addresses: Vec<ExternalAddress>,
        /// Samples per address, evenly spread over t_s ± span.
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        span: f64,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value = "brush.csv")]
        out: PathBuf,
    },
    /// Points of one dynamic ray of π sinh.
    Ray {
        #[arg(long)]
        address: ExternalAddress,
        /// Lowest potential; further samples at t + 0.5k.
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        landing: bool,
        #[arg(long, default_value = "ray.csv")]
        out: PathBuf,
    },
    /// The semiconjugacy between g(z) = f(μz) and f = π sinh.
    Conjugacy {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        jmax: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value = "conjugacy.json")]
        out: PathBuf,
    },
    /// Density bound tables and the expansion certificate.
    Orbifold {
        #[arg(long, default_value_t = 8.0)]
        k_disk: f64,
        #[arg(long, default_value = "bounds.csv")]
        bounds: PathBuf,
        #[arg(long, default_value = "expansion.json")]
        out: PathBuf,
    },
    /// The Poincaré function of z² - 1.
    Poincare {
        /// Largest n for ord(Φ - Φ(z_n)) at z_n = λⁿz̃.
        #[arg(long, default_value_t = 10)]
        orders: u32,
        #[arg(long, default_value_t = poincare::DEFAULT_TERMS)]
        terms: usize,
        #[arg(long, default_value = "poincare.json")]
        out: PathBuf,
    },
    /// Run a verification suite: acceptance, or one criterion by name.
    Verify {
        #[arg(long, default_value = "acceptance")]
        suite: String,
    },
}

/// Exit status 2 for bad input, 1 for everything that failed while running.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Config(_) | Error::Inadmissible { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report_path = cli.report.clone();
    match run(cli.command) {
        Ok(run) => {
            let passed = run.passed();
            let rep = run.finish();
            for f in &rep.failures {
                eprintln!("FAIL {f}");
            }
            if let Some(path) = report_path {
                match report::to_sorted_json(&rep).map(|s| fs::write(&path, s)) {
                    Ok(Ok(())) => {}
                    Ok(Err(e)) => {
                        eprintln!("error: {}", report::io_error(&path, e));
                        return ExitCode::from(1);
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
            }
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, Error> {
    report::to_sorted_json(v).map(String::into_bytes)
}

fn run(cmd: Command) -> Result<Run, Error> {
    match cmd {
        Command::Render {
            config: path,
            set,
            threads,
            out,
        } => {
            let mut entries = match &path {
                Some(p) => config::parse_kv(&fs::read_to_string(p).map_err(|e| report::io_error(p, e))?)?,
                None => BTreeMap::new(),
            };
            for kv in &set {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("--set {kv:?}: expected KEY=VALUE")))?;
                entries.insert(k.trim().to_string(), v.trim().to_string());
            }
            if let Some(t) = threads {
                entries.insert("threads".into(), t.to_string());
            }
            let cfg = config::render_config(&entries)?;
            let mut run = Run::new("render", config::canonical_inputs(&entries));
            let img = render::render(&cfg)?;
            run.write(&out, &img.to_ppm())?;
            Ok(run)
        }
        Command::Model {
            addresses,
            samples,
            span,
            depth,
            out,
        } => {
            let inputs = format!(
                "{}|{samples}|{span}|{depth}",
                addresses.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
            );
            let mut run = Run::new("model", inputs);
            let mut rows = Vec::new();
            for s in &addresses {
                let t_s = model::potential_boundary(s, 1e-12)?;
                println!("{s}\tt_s = {t_s}");
                for k in 0..samples {
                    let frac = if samples == 1 { 0.5 } else { k as f64 / (samples - 1) as f64 };
                    let t = t_s - span + 2.0 * span * frac;
                    if t < 0.0 {
                        continue;
                    }
                    let m = model::brush_membership(&ModelPoint::new(s.clone(), t)?, depth)?;
                    rows.push(BrushSample {
                        address: s.clone(),
                        t,
                        verdict: m.verdict,
                    });
                }
            }
            run.write(&out, model::brush_csv(&rows).as_bytes())?;
            Ok(run)
        }
        Command::Ray {
            address,
            t,
            samples,
            tol,
            landing,
            out,
        } => {
            let f = CosineParams::pi_sinh();
            let mut run = Run::new("ray", format!("{address}|{t}|{samples}|{tol}|{landing}"));
            let ts: Vec<f64> = (0..samples).map(|k| t + 0.5 * k as f64).collect();
            let trace = dynamics::trace_ray_samples(&f, &address, &ts, tol, landing)?;
            if let Some(z) = trace.landing {
                println!("landing point {z}");
            }
            let tail = trace.residuals.last().copied().unwrap_or(0.0);
            run.check(format!("residual at lowest potential {tail:e} < 1e-9"), tail < 1e-9);
            run.write(&out, trace.to_csv().as_bytes())?;
            Ok(run)
        }
        Command::Conjugacy {
            samples,
            jmax,
            seed,
            out,
        } => {
            let f = CosineParams::pi_sinh();
            let mut run = Run::new("conjugacy", format!("{samples}|{jmax}|{seed}"));
            let cfg = conjugacy::build_config(&f)?;
            let pts = conjugacy::generate_samples(&cfg, samples, jmax + 1, seed)?;
            let rep = conjugacy::convergence_report(&cfg, &pts, jmax)?;
            run.check("commutation residual < 1e-8", rep.max_commutation_residual < 1e-8);
            run.check(
                "fitted ratio < 0.9 on every sample",
                rep.samples.iter().all(|s| s.fitted_ratio.is_some_and(|r| r < 0.9)),
            );
            run.check("budget finite", rep.budget.is_finite() && rep.budget > 0.0);
            run.write(&out, &json_bytes(&rep)?)?;
            Ok(run)
        }
        Command::Orbifold { k_disk, bounds, out } => {
            let f = CosineParams::pi_sinh();
            let mut run = Run::new("orbifold", format!("{k_disk}"));
            let cert = orbifold::expansion_estimate(&f, k_disk)?;
            run.check("expansion bound > 1 on the grid", cert.min_bound > 1.0);
            run.check("expansion bound increasing", cert.bounds.windows(2).all(|w| w[1] > w[0]));
            // the ray arg(z) = 1 keeps clear of the real marks
            let dir = Complex64::from_polar(1.0, 1.0);
            let points: Vec<Complex64> = poincare::log_spaced(1.0, 1e6, 61).into_iter().map(|r| dir * r).collect();
            let mut rows = Vec::new();
            for chain in [Chain::Punctured01, Chain::O2, Chain::O0, Chain::Main2] {
                rows.extend(orbifold::bound_table(&points, chain));
            }
            run.check("lower ≤ upper", rows.iter().all(|r| r.lower <= r.upper));
            run.write(&bounds, orbifold::bounds_csv(&rows).as_bytes())?;
            run.write(&out, &json_bytes(&cert)?)?;
            Ok(run)
        }
        Command::Poincare { orders, terms, out } => {
            let mut run = Run::new("poincare", format!("{orders}|{terms}"));
            let rep = poincare::poincare_report(terms, orders)?;
            for (n, k) in &rep.orders {
                run.check(format!("ord at z_{n} = {k} ≥ {n}"), *k >= *n as usize);
            }
            run.write(&out, &json_bytes(&rep)?)?;
            Ok(run)
        }
        Command::Verify { suite } => {
            let mut run = Run::new("verify", suite.clone());
            for c in verify::run_suite(&suite)? {
                println!("{}", c.line());
                run.criterion(&c);
            }
            Ok(run)
        }
    }
}
