//! `ccmetric`: command-line front end for the Carnot–Carathéodory metric
//! library. One binary, subcommand per computation, shared JSON run
//! configuration, CSV/JSON output with a determinism contract: identical
//! argv + config + seed produce byte-identical output.

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ccmetric_core::control::{self, circle_control, ControlPair};
use ccmetric_core::cycle::{loop_integral, refine_and_decompose, signed_mass, PolyLoop};
use ccmetric_core::metric::MetricContext;
use ccmetric_core::stockyard::{self, Strategy};
use ccmetric_core::ugs;
use ccmetric_core::{BoundaryPoint, CcError, Complex64, Orientation, PotentialField, PotentialSpec};

/// Versioned run configuration shared by every subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    /// Must be "cc1".
    schema: String,
    potential: PotentialSpec,
    #[serde(default = "default_delta0")]
    delta0: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_budget")]
    eval_budget: u64,
    /// "csv" or "json".
    #[serde(default = "default_output")]
    output: String,
    /// Output file path; standard output when absent.
    #[serde(default)]
    out: Option<String>,
}

fn default_delta0() -> f64 {
    1.0
}
fn default_budget() -> u64 {
    1_000_000
}
fn default_output() -> String {
    "csv".into()
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: "cc1".into(),
            potential: PotentialSpec::Quadratic { c: 1.0 },
            delta0: 1.0,
            seed: 0,
            eval_budget: 1_000_000,
            output: "csv".into(),
            out: None,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ccmetric", version, about = "Carnot–Carathéodory metric quantities on model hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration ({"schema":"cc1","potential":{...},...});
    /// defaults to the quadratic field c = 1 when omitted.
    #[arg(long)]
    config: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Λ(p₀,δ) brackets over a δ ladder (CSV: delta, lower, upper).
    Lambda {
        #[command(flatten)]
        common: Common,
        /// Base point in z-plane units, "x,y".
        #[arg(long)]
        z0: String,
        /// Comma-separated δ ladder, z-plane units.
        #[arg(long)]
        deltas: String,
    },
    /// Optimize one stockyard and print it as JSON (pens + value + bounds).
    Stockyard {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        z0: String,
        #[arg(long)]
        delta: f64,
        /// single_circle | disc_chain | greedy_multi | best
        #[arg(long, default_value = "best")]
        strategy: String,
    },
    /// Twist functional of a control pair (CSV: twist).
    Twist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        z0: String,
        #[arg(long)]
        delta: f64,
        /// Control file: JSON array of [s_j, alpha_j, beta_j] segments.
        #[arg(long, conflicts_with = "circle")]
        control: Option<String>,
        /// K-gon clockwise circle control instead of a file.
        #[arg(long)]
        circle: Option<usize>,
    },
    /// Decompose a closed polyline into simple cycles with signed masses (JSON).
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Loop file: JSON array of [x, y] vertices.
        #[arg(long = "loop")]
        loop_path: String,
    },
    /// UGS certification over a window (JSON report, or CSV f_table).
    UgsCheck {
        #[command(flatten)]
        common: Common,
        /// Window "x0,y0,x1,y1" in z-plane units.
        #[arg(long)]
        window: String,
        /// Base scale δ₀; the fit ladder is δ₀·{1,2,4,8}.
        #[arg(long)]
        delta0: Option<f64>,
    },
    /// Large-scale distance between two boundary points (CSV: distance).
    Dist {
        #[command(flatten)]
        common: Common,
        /// "x,y,t" (t in Re z₂ units).
        #[arg(long)]
        p0: String,
        #[arg(long)]
        p1: String,
        /// Use the bounded-Hessian √ formula instead of the general one.
        #[arg(long)]
        sqrt: bool,
    },
    /// Sample the cylinder map and check reachability (CSV).
    Cyl {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p0: String,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Ball-volume brackets δ²Λ(p₀,δ) over a δ ladder (CSV).
    Volume {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        z0: String,
        #[arg(long)]
        deltas: String,
    },
}

/// 12 significant digits: below all stated tolerances, above float noise.
fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn parse_xy(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"x,y\", got {s:?}"));
    }
    let x: f64 = parts[0].trim().parse().map_err(|e| format!("bad x in {s:?}: {e}"))?;
    let y: f64 = parts[1].trim().parse().map_err(|e| format!("bad y in {s:?}: {e}"))?;
    Ok(Complex64::new(x, y))
}

fn parse_xyt(s: &str) -> Result<BoundaryPoint, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected \"x,y,t\", got {s:?}"));
    }
    let mut v = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.trim().parse().map_err(|e| format!("bad component in {s:?}: {e}"))?;
    }
    Ok(BoundaryPoint::new(v[0], v[1], v[2]))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number in {s:?}: {e}")))
        .collect()
}

fn load_config(path: &Option<String>) -> Result<RunConfig, String> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    if cfg.schema != "cc1" {
        return Err(format!("{path}: unsupported schema {:?} (expected \"cc1\")", cfg.schema));
    }
    if !(cfg.delta0 > 0.0) {
        return Err(format!("{path}: delta0 must be positive"));
    }
    match cfg.output.as_str() {
        "csv" | "json" => {}
        other => return Err(format!("{path}: output must be \"csv\" or \"json\", got {other:?}")),
    }
    Ok(cfg)
}

fn emit(cfg: &RunConfig, body: &str) -> Result<(), String> {
    match &cfg.out {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("stdout: {e}"))
        }
        Some(path) => fs::write(path, body).map_err(|e| format!("cannot write {path}: {e}")),
    }
}

/// Errors split by exit code: 2 = configuration, 3 = numeric failure.
enum RunError {
    Config(String),
    Numeric(String),
}

impl From<CcError> for RunError {
    fn from(e: CcError) -> Self {
        RunError::Numeric(e.to_string())
    }
}

impl From<String> for RunError {
    fn from(e: String) -> Self {
        RunError::Config(e)
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Lambda { common, z0, deltas } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let z0 = parse_xy(&z0)?;
            let deltas = parse_list(&deltas)?;
            let mut rows = Vec::new();
            for d in &deltas {
                let (lo, hi) = stockyard::lambda_estimate(&field, z0, *d, cfg.eval_budget, cfg.seed)?;
                rows.push((*d, lo, hi));
            }
            let body = if cfg.output == "json" {
                let items: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|(d, lo, hi)| serde_json::json!({"delta": d, "lower": lo, "upper": hi}))
                    .collect();
                format!("{}\n", serde_json::to_string_pretty(&items).unwrap())
            } else {
                let mut s = String::from("delta_zunits,lower,upper\n");
                for (d, lo, hi) in rows {
                    s += &format!("{},{},{}\n", fmt12(d), fmt12(lo), fmt12(hi));
                }
                s
            };
            emit(&cfg, &body)?;
        }
        Command::Stockyard { common, z0, delta, strategy } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let z0 = parse_xy(&z0)?;
            let strategy: Strategy = strategy.parse().map_err(|e: String| RunError::Config(e))?;
            if !(delta > 0.0) {
                return Err(RunError::Config("delta must be positive".into()));
            }
            let (yard, value) = stockyard::optimize(&field, z0, delta, strategy, cfg.eval_budget, cfg.seed)?;
            let (lower, upper) = stockyard::lambda_estimate(&field, z0, delta, cfg.eval_budget, cfg.seed)?;
            let doc = serde_json::json!({
                "stockyard": yard,
                "value": value,
                "lower": lower,
                "upper": upper,
            });
            emit(&cfg, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Command::Twist { common, z0, delta, control, circle } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let z0 = parse_xy(&z0)?;
            let u = match (control, circle) {
                (Some(path), None) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| RunError::Config(format!("cannot read {path}: {e}")))?;
                    let segs: Vec<[f64; 3]> = serde_json::from_str(&text)
                        .map_err(|e| RunError::Config(format!("{path}: {e}")))?;
                    control_from_segments(&segs)?
                }
                (None, Some(k)) => circle_control(k, Orientation::Cw)?,
                _ => {
                    return Err(RunError::Config(
                        "exactly one of --control and --circle is required".into(),
                    ))
                }
            };
            let value = control::twist(&field, z0, delta, &u)?;
            let body = if cfg.output == "json" {
                format!("{}\n", serde_json::json!({ "twist": value }))
            } else {
                format!("twist_tunits\n{}\n", fmt12(value))
            };
            emit(&cfg, &body)?;
        }
        Command::Decompose { common, loop_path } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let text = fs::read_to_string(&loop_path)
                .map_err(|e| RunError::Config(format!("cannot read {loop_path}: {e}")))?;
            let verts: Vec<[f64; 2]> = serde_json::from_str(&text)
                .map_err(|e| RunError::Config(format!("{loop_path}: {e}")))?;
            let poly = PolyLoop::new(verts.iter().map(|v| Complex64::new(v[0], v[1])).collect())?;
            let total = loop_integral(&field, &poly)?;
            let cycles = refine_and_decompose(&poly)?;
            let mut items = Vec::new();
            let mut mass_sum = 0.0;
            for c in &cycles {
                let m = signed_mass(&field, c)?;
                mass_sum += m;
                let vs: Vec<[f64; 2]> = c.vertices.iter().map(|z| [z.re, z.im]).collect();
                items.push(serde_json::json!({
                    "vertices": vs,
                    "orientation": format!("{:?}", c.orientation),
                    "signed_mass": m,
                }));
            }
            let doc = serde_json::json!({
                "cycles": items,
                "mass_sum": mass_sum,
                "loop_integral": total,
            });
            emit(&cfg, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Command::UgsCheck { common, window, delta0 } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let w = parse_list(&window)?;
            if w.len() != 4 || w[2] <= w[0] || w[3] <= w[1] {
                return Err(RunError::Config(format!(
                    "window must be \"x0,y0,x1,y1\" with x0<x1, y0<y1, got {window:?}"
                )));
            }
            let lo = Complex64::new(w[0], w[1]);
            let hi = Complex64::new(w[2], w[3]);
            let d0 = delta0.unwrap_or(cfg.delta0);
            if !(d0 > 0.0) {
                return Err(RunError::Config("delta0 must be positive".into()));
            }
            let deltas: Vec<f64> = (0..4).map(|k| d0 * 2f64.powi(k)).collect();
            let report = ugs::fit_ugs(&field, lo, hi, &deltas, cfg.eval_budget, cfg.seed)?;
            let body = if cfg.output == "json" {
                format!("{}\n", serde_json::to_string_pretty(&report).unwrap())
            } else {
                let mut s = String::from("delta_zunits,lower,upper\n");
                for (d, l, u) in &report.f_table {
                    s += &format!("{},{},{}\n", fmt12(*d), fmt12(*l), fmt12(*u));
                }
                s
            };
            emit(&cfg, &body)?;
        }
        Command::Dist { common, p0, p1, sqrt } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let p0 = parse_xyt(&p0)?;
            let p1 = parse_xyt(&p1)?;
            let mut ctx = MetricContext::new(field, cfg.delta0, 4);
            ctx.eval_budget = cfg.eval_budget;
            ctx.seed = cfg.seed;
            let d = if sqrt { ctx.distance_sqrt(p0, p1)? } else { ctx.distance(p0, p1)? };
            let body = if cfg.output == "json" {
                format!("{}\n", serde_json::json!({ "distance": d }))
            } else {
                format!("distance_zunits\n{}\n", fmt12(d))
            };
            emit(&cfg, &body)?;
        }
        Command::Cyl { common, p0, delta, samples } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let p0 = parse_xyt(&p0)?;
            if !(delta > 0.0) {
                return Err(RunError::Config("delta must be positive".into()));
            }
            let mut ctx = MetricContext::new(field, cfg.delta0, 4);
            ctx.eval_budget = cfg.eval_budget;
            ctx.seed = cfg.seed;
            let f_delta = ctx.lambda_lower(p0.z(), delta)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut s = String::from("a,b,c,x_zunits,y_zunits,t_tunits,reached\n");
            for _ in 0..samples {
                // interior of the unit cylinder, scaled to half radius so
                // the reach budget δ comfortably covers the sample
                let (a, b) = loop {
                    let a = rng.gen_range(-1.0..1.0);
                    let b = rng.gen_range(-1.0..1.0);
                    if a * a + b * b < 1.0 {
                        break (0.5 * a, 0.5 * b);
                    }
                };
                let c = 0.5 * rng.gen_range(-1.0..1.0);
                let p = ctx.cylinder_point(p0, delta, f_delta, a, b, c)?;
                let ok = ctx.reach_check(p0, p, delta)?;
                s += &format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt12(a), fmt12(b), fmt12(c), fmt12(p.x), fmt12(p.y), fmt12(p.t), ok
                );
            }
            emit(&cfg, &s)?;
        }
        Command::Volume { common, z0, deltas } => {
            let cfg = load_config(&common.config)?;
            let field = PotentialField::from_spec(&cfg.potential)?;
            let z0 = parse_xy(&z0)?;
            let deltas = parse_list(&deltas)?;
            let mut ctx = MetricContext::new(field, cfg.delta0, 4);
            ctx.eval_budget = cfg.eval_budget;
            ctx.seed = cfg.seed;
            let mut s = String::from("delta_zunits,volume_lower,volume_upper\n");
            for d in deltas {
                let (lo, hi) = ctx.ball_volume(z0, d)?;
                s += &format!("{},{},{}\n", fmt12(d), fmt12(lo), fmt12(hi));
            }
            emit(&cfg, &s)?;
        }
    }
    Ok(())
}

/// Build a control pair from [length, alpha, beta] segments; lengths are
/// normalized to span [0,1].
fn control_from_segments(segs: &[[f64; 3]]) -> Result<ControlPair, RunError> {
    if segs.is_empty() {
        return Err(RunError::Config("control file has no segments".into()));
    }
    let total: f64 = segs.iter().map(|s| s[0]).sum();
    if !(total > 0.0) || segs.iter().any(|s| s[0] <= 0.0) {
        return Err(RunError::Config("segment lengths must be positive".into()));
    }
    let mut breaks = Vec::with_capacity(segs.len() + 1);
    breaks.push(0.0);
    let mut acc = 0.0;
    for s in &segs[..segs.len() - 1] {
        acc += s[0] / total;
        breaks.push(acc);
    }
    breaks.push(1.0);
    let coeffs = segs.iter().map(|s| (s[1], s[2])).collect();
    Ok(ControlPair::new(breaks, coeffs, false)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("error: config: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("error: numeric: {msg}");
            ExitCode::from(3)
        }
    }
}
