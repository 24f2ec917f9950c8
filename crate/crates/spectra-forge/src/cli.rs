//! Command-line front end with four subcommands: `generate` samples a
//! potential to CSV or JSON, `spectrum` verifies the predicted levels with
//! the finite-difference solver, `sweep` repeats `generate` across a
//! parameter range, and `verify` runs the built-in acceptance checks.
//!
//! Exit codes: 0 on success, 1 on a domain failure (singular potential,
//! failed verification, a sweep frame walking out of the admissible region),
//! 2 on a usage error. Every failure prints exactly one machine-parsable
//! line to stderr; the leading token names the failure class.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::eigensolver::{verify_spectrum, Grid};
use crate::riccati::FactorizationConfig;
use crate::suite;
use crate::transforms::{
    build_potential, predict_spectrum, GeneratedPotential, ScalingParam, SpectrumPrediction,
    TransformError, TransformSpec,
};

#[derive(Parser)]
#[command(
    name = "spectra-forge",
    version,
    about = "Construct Schrödinger potentials with prescribed spectra and verify them"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a potential, write sampled (x, V) values, print predicted levels
    Generate(GenerateArgs),
    /// Predict the spectrum and check it against the FD eigensolver
    Spectrum(SpectrumArgs),
    /// Rebuild the potential across a parameter range, one frame per value
    Sweep(SweepArgs),
    /// Run the built-in acceptance checks and print a pass/fail table
    Verify,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum KindArg {
    FirstOrder,
    SecondOrder,
    ScaledFirst,
    ScaledSecond,
}

impl KindArg {
    fn token(self) -> &'static str {
        match self {
            KindArg::FirstOrder => "first-order",
            KindArg::SecondOrder => "second-order",
            KindArg::ScaledFirst => "scaled-first",
            KindArg::ScaledSecond => "scaled-second",
        }
    }

    fn is_two_step(self) -> bool {
        matches!(self, KindArg::SecondOrder | KindArg::ScaledSecond)
    }

    fn is_scaled(self) -> bool {
        matches!(self, KindArg::ScaledFirst | KindArg::ScaledSecond)
    }
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Construction kind
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Energy of the level inserted by step one (< 1/2)
    #[arg(long, allow_negative_numbers = true)]
    eps1: Option<f64>,
    /// Mixing parameter of step one
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    nu1: f64,
    /// Coordinate scale of step one (required for scaled kinds)
    #[arg(long)]
    q1: Option<f64>,
    /// Energy of the level inserted by step two (< eps1)
    #[arg(long, allow_negative_numbers = true)]
    eps2: Option<f64>,
    /// Mixing parameter of step two (|nu2| > 1)
    #[arg(long, allow_negative_numbers = true)]
    nu2: Option<f64>,
    /// Coordinate scale of step two
    #[arg(long, default_value_t = 1.0)]
    q2: f64,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Half-width of the sampling window [-L, L]
    #[arg(long = "grid-l", default_value_t = 10.0)]
    grid_l: f64,
    /// Number of grid points
    #[arg(long = "grid-n", default_value_t = 2001)]
    grid_n: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Inherited ladder levels to predict (default fills to five total)
    #[arg(long)]
    nmax: Option<usize>,
    /// Output file for the sampled potential
    #[arg(long, default_value = "potential.csv")]
    out: PathBuf,
    /// Sample encoding
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Inherited ladder levels to check (default fills to five total)
    #[arg(long)]
    nmax: Option<usize>,
    /// Per-level tolerance (default 2e-3, 4e-3 for stretched potentials)
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum ParamArg {
    Eps1,
    Nu1,
    Q1,
    Eps2,
    Nu2,
    Q2,
}

impl ParamArg {
    fn token(self) -> &'static str {
        match self {
            ParamArg::Eps1 => "eps1",
            ParamArg::Nu1 => "nu1",
            ParamArg::Q1 => "q1",
            ParamArg::Eps2 => "eps2",
            ParamArg::Nu2 => "nu2",
            ParamArg::Q2 => "q2",
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Parameter to sweep
    #[arg(long, value_enum)]
    param: ParamArg,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    /// Number of frames; values are evenly spaced, endpoints included
    #[arg(long)]
    steps: usize,
    /// Re-derive an energy from the current q1, e.g. "eps1=-q1^2/2"
    #[arg(long)]
    lock: Vec<String>,
    /// Output stem; frames land at <stem>_<param>_<value>.csv
    #[arg(long, default_value = "sweep")]
    out: String,
    /// Inherited ladder levels in each frame's prediction
    #[arg(long)]
    nmax: Option<usize>,
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(format!("usage_error: {}", msg.into()))
}

fn usage_from(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Parse `argv` and execute; returns the process exit code. `argv[0]` is the
/// program name, as with `std::env::args_os`.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    print!("{e}");
                    eprintln!("usage_error: a subcommand is required");
                    2
                }
                _ => {
                    let first = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or("bad arguments")
                        .trim_start_matches("error: ")
                        .to_string();
                    eprintln!("usage_error: {first}");
                    2
                }
            };
        }
    };
    let result = match &cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Verify => cmd_verify(),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Domain(m)) => {
            eprintln!("{m}");
            1
        }
        Err(CliError::Usage(m)) => {
            eprintln!("{m}");
            2
        }
    }
}

/// Flag presence and invariants are checked here so that a bad invocation is
/// reported before any numerics run.
fn build_spec(c: &ConfigArgs) -> Result<TransformSpec, CliError> {
    let eps1 = c
        .eps1
        .ok_or_else(|| usage(format!("--eps1 is required for --kind {}", c.kind.token())))?;
    let f1 = FactorizationConfig::new(eps1, c.nu1).map_err(usage_from)?;
    let s1 = if c.kind.is_scaled() {
        let q1 =
            c.q1.ok_or_else(|| usage(format!("--q1 is required for --kind {}", c.kind.token())))?;
        ScalingParam::new(q1).map_err(usage_from)?
    } else {
        ScalingParam::identity()
    };
    if !c.kind.is_two_step() {
        return Ok(match c.kind {
            KindArg::FirstOrder => TransformSpec::first_order(f1),
            _ => TransformSpec::scaled_first(f1, s1),
        });
    }
    let eps2 = c
        .eps2
        .ok_or_else(|| usage(format!("--eps2 is required for --kind {}", c.kind.token())))?;
    let nu2 = c
        .nu2
        .ok_or_else(|| usage(format!("--nu2 is required for --kind {}", c.kind.token())))?;
    let f2 = FactorizationConfig::new(eps2, nu2).map_err(usage_from)?;
    match c.kind {
        KindArg::SecondOrder => TransformSpec::second_order(f1, f2).map_err(usage_from),
        _ => {
            let s2 = ScalingParam::new(c.q2).map_err(usage_from)?;
            TransformSpec::scaled_second(f1, s1, f2, s2).map_err(usage_from)
        }
    }
}

fn build_grid(g: &GridArgs) -> Result<Grid, CliError> {
    if !g.grid_l.is_finite() || g.grid_l <= 0.0 {
        return Err(usage(format!(
            "--grid-l must be a positive number (got {})",
            g.grid_l
        )));
    }
    Grid::symmetric(g.grid_l, g.grid_n).map_err(usage_from)
}

/// Number of inherited ladder levels: the flag verbatim, otherwise enough to
/// make five levels in total.
fn inherited_levels(spec: &TransformSpec, nmax: Option<usize>) -> usize {
    let created = if spec.f2().is_some() { 2 } else { 1 };
    nmax.unwrap_or(5usize.saturating_sub(created))
}

fn levels_value(pred: &SpectrumPrediction) -> Value {
    Value::Array(
        pred.levels()
            .iter()
            .map(|l| json!({"value": l.value, "label": l.label.to_string(), "scale": l.scale}))
            .collect(),
    )
}

/// Sample `v` on `grid` as CSV with 17 significant digits per field; the
/// output is byte-deterministic for a given configuration.
pub fn potential_csv(v: &GeneratedPotential, grid: &Grid) -> Result<String, TransformError> {
    let mut text = String::with_capacity(grid.n_points() * 48 + 4);
    text.push_str("x,V\n");
    for i in 0..grid.n_points() {
        let x = grid.point(i);
        let val = v.value(x)?;
        let _ = writeln!(text, "{x:.16e},{val:.16e}");
    }
    Ok(text)
}

fn potential_json(v: &GeneratedPotential, grid: &Grid) -> Result<String, TransformError> {
    let mut xs = Vec::with_capacity(grid.n_points());
    let mut vals = Vec::with_capacity(grid.n_points());
    for i in 0..grid.n_points() {
        let x = grid.point(i);
        vals.push(v.value(x)?);
        xs.push(x);
    }
    let mut text = serde_json::to_string(&json!({"x": xs, "V": vals})).expect("serializable");
    text.push('\n');
    Ok(text)
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Domain(format!("io_error: {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Domain(format!("io_error: {}: {e}", path.display())))
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let spec = build_spec(&a.config)?;
    let grid = build_grid(&a.grid)?;
    let v = build_potential(spec).map_err(domain)?;
    let text = match a.format {
        Format::Csv => potential_csv(&v, &grid).map_err(domain)?,
        Format::Json => potential_json(&v, &grid).map_err(domain)?,
    };
    write_output(&a.out, &text)?;
    let pred = predict_spectrum(&spec, inherited_levels(&spec, a.nmax));
    let doc = json!({"file": a.out.display().to_string(), "levels": levels_value(&pred)});
    println!("{doc}");
    Ok(())
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let spec = build_spec(&a.config)?;
    let grid = build_grid(&a.grid)?;
    let v = build_potential(spec).map_err(domain)?;
    let pred = predict_spectrum(&spec, inherited_levels(&spec, a.nmax));
    let tol = a.tol.unwrap_or_else(|| suite::default_tolerance(&spec));
    let rep = verify_spectrum(&pred, &v, &grid, tol).map_err(domain)?;
    let doc = json!({
        "levels": levels_value(&pred),
        "computed": rep.computed,
        "errors": rep.abs_errors,
        "pass": rep.pass,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    match &a.out {
        Some(p) => write_output(p, &text)?,
        None => print!("{text}"),
    }
    if !rep.pass {
        let worst = rep.abs_errors.iter().cloned().fold(0.0, f64::max);
        return Err(CliError::Domain(format!(
            "verification_failed: max_abs_error={worst:.3e} tol={tol:.3e}"
        )));
    }
    Ok(())
}

fn cmd_verify() -> Result<(), CliError> {
    let results = suite::run_all();
    let mut failed = 0usize;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {} {}: {}", r.id, r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("verify: all {} criteria passed", results.len());
        Ok(())
    } else {
        Err(CliError::Domain(format!(
            "verification_failed: {failed} of {} criteria failed",
            results.len()
        )))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LockTarget {
    Eps1,
    Eps2,
}

#[derive(Clone)]
struct Lock {
    target: LockTarget,
    coeff: f64,
    text: String,
}

/// Accepted lock grammar: `(eps1|eps2) = [-] [c*] q1^2 [/d]` with numeric
/// literals c and d; whitespace is ignored.
fn parse_lock(s: &str) -> Result<Lock, CliError> {
    let bad = |why: &str| usage(format!("bad lock expression '{s}': {why}"));
    let compact: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let (lhs, rhs) = compact
        .split_once('=')
        .ok_or_else(|| bad("expected <eps1|eps2>=<expr>"))?;
    let target = match lhs {
        "eps1" => LockTarget::Eps1,
        "eps2" => LockTarget::Eps2,
        other => return Err(bad(&format!("target must be eps1 or eps2, got '{other}'"))),
    };
    let (sign, rest) = match rhs.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, rhs),
    };
    let (coeff, rest) = match rest.find('*') {
        Some(ix) => {
            let c: f64 = rest[..ix]
                .parse()
                .map_err(|_| bad(&format!("bad coefficient '{}'", &rest[..ix])))?;
            (c, &rest[ix + 1..])
        }
        None => (1.0, rest),
    };
    let rest = rest
        .strip_prefix("q1^2")
        .ok_or_else(|| bad("expected a q1^2 term"))?;
    let denom = if rest.is_empty() {
        1.0
    } else {
        let d: f64 = rest
            .strip_prefix('/')
            .ok_or_else(|| bad(&format!("unexpected trailing '{rest}'")))?
            .parse()
            .map_err(|_| bad("bad divisor"))?;
        if d == 0.0 {
            return Err(bad("divisor must be nonzero"));
        }
        d
    };
    if !(sign * coeff / denom).is_finite() {
        return Err(bad("coefficient does not evaluate to a finite number"));
    }
    Ok(Lock {
        target,
        coeff: sign * coeff / denom,
        text: s.to_string(),
    })
}

/// The inserted level must stay strictly below the ladder bottom; a locked
/// energy that reaches 1/2 is clamped just under it and the clamp recorded,
/// so a sweep across the boundary still produces every frame.
const EPS_CLAMP: f64 = 0.5 - 1e-9;

struct FramePlan {
    value: f64,
    cfg: ConfigArgs,
    path: PathBuf,
}

fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    let h = (to - from) / (steps - 1) as f64;
    (0..steps).map(|i| from + i as f64 * h).collect()
}

fn apply_param(cfg: &mut ConfigArgs, param: ParamArg, v: f64) {
    match param {
        ParamArg::Eps1 => cfg.eps1 = Some(v),
        ParamArg::Nu1 => cfg.nu1 = v,
        ParamArg::Q1 => cfg.q1 = Some(v),
        ParamArg::Eps2 => cfg.eps2 = Some(v),
        ParamArg::Nu2 => cfg.nu2 = Some(v),
        ParamArg::Q2 => cfg.q2 = v,
    }
}

fn thread_cap() -> usize {
    std::env::var("SPECTRA_FORGE_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    if a.steps < 1 {
        return Err(usage("--steps must be at least 1"));
    }
    if !a.from.is_finite() || !a.to.is_finite() {
        return Err(usage("--from and --to must be finite"));
    }
    let grid = build_grid(&a.grid)?;
    let locks: Vec<Lock> = a
        .lock
        .iter()
        .map(|s| parse_lock(s))
        .collect::<Result<_, _>>()?;
    for (i, l) in locks.iter().enumerate() {
        if locks[..i].iter().any(|p| p.target == l.target) {
            return Err(usage(format!("duplicate lock target in '{}'", l.text)));
        }
    }
    let locked = |t: LockTarget| locks.iter().any(|l| l.target == t);
    if (a.param == ParamArg::Eps1 && locked(LockTarget::Eps1))
        || (a.param == ParamArg::Eps2 && locked(LockTarget::Eps2))
    {
        return Err(usage("the swept parameter cannot also be locked"));
    }

    // Presence checks up front: a flag can be satisfied by the base value,
    // by being the swept parameter, or (for energies) by a lock.
    let c = &a.config;
    if c.eps1.is_none() && a.param != ParamArg::Eps1 && !locked(LockTarget::Eps1) {
        return Err(usage(format!(
            "--eps1 is required for --kind {}",
            c.kind.token()
        )));
    }
    if c.kind.is_scaled() && c.q1.is_none() && a.param != ParamArg::Q1 {
        return Err(usage(format!(
            "--q1 is required for --kind {}",
            c.kind.token()
        )));
    }
    if !locks.is_empty() && c.q1.is_none() && a.param != ParamArg::Q1 {
        return Err(usage(
            "a lock references q1 but --q1 is neither set nor swept",
        ));
    }
    if c.kind.is_two_step() {
        if c.eps2.is_none() && a.param != ParamArg::Eps2 && !locked(LockTarget::Eps2) {
            return Err(usage(format!(
                "--eps2 is required for --kind {}",
                c.kind.token()
            )));
        }
        if c.nu2.is_none() && a.param != ParamArg::Nu2 {
            return Err(usage(format!(
                "--nu2 is required for --kind {}",
                c.kind.token()
            )));
        }
    }

    let values = sweep_values(a.from, a.to, a.steps);
    let pname = a.param.token();
    let mut warnings: Vec<String> = Vec::new();
    let mut plans: Vec<FramePlan> = Vec::with_capacity(values.len());
    let mut names_seen: Vec<String> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let mut cfg = a.config.clone();
        apply_param(&mut cfg, a.param, v);
        if !locks.is_empty() {
            let q1 = cfg.q1.expect("checked above");
            for l in &locks {
                let mut eps = l.coeff * q1 * q1;
                if eps >= 0.5 {
                    warnings.push(format!(
                        "lock {} clamped to {EPS_CLAMP:.9} at {pname}={v:.9} (requested {eps:.9})",
                        l.text
                    ));
                    eps = EPS_CLAMP;
                }
                match l.target {
                    LockTarget::Eps1 => cfg.eps1 = Some(eps),
                    LockTarget::Eps2 => cfg.eps2 = Some(eps),
                }
            }
        }
        let mut name = format!("{}_{pname}_{v:.9}.csv", a.out);
        if names_seen.contains(&name) {
            name = format!("{}_{pname}_{v:.9}_{i}.csv", a.out);
        }
        names_seen.push(name.clone());
        plans.push(FramePlan {
            value: v,
            cfg,
            path: PathBuf::from(name),
        });
    }

    let n = plans.len();
    let workers = thread_cap().min(n).max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Value, String>>>> = Mutex::new(vec![None; n]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = run_frame(&plans[i], &grid, a.nmax);
                results.lock().expect("no panics hold this lock")[i] = Some(out);
            });
        }
    });

    let results = results.into_inner().expect("workers finished");
    let mut frames: Vec<Value> = Vec::with_capacity(n);
    for (plan, slot) in plans.iter().zip(results) {
        match slot.expect("every frame index was claimed") {
            Ok(frame) => frames.push(frame),
            Err(msg) => {
                return Err(CliError::Domain(format!(
                    "{msg} (frame {pname}={:.9})",
                    plan.value
                )));
            }
        }
    }

    let manifest = json!({
        "param": pname,
        "values": values,
        "fixed": {
            "kind": c.kind.token(),
            "eps1": c.eps1, "nu1": c.nu1, "q1": c.q1,
            "eps2": c.eps2, "nu2": c.nu2, "q2": c.q2,
            "grid_l": a.grid.grid_l, "grid_n": a.grid.grid_n,
            "locks": a.lock,
        },
        "frames": frames,
        "warnings": warnings,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
    text.push('\n');
    let manifest_path = PathBuf::from(format!("{}_manifest.json", a.out));
    write_output(&manifest_path, &text)?;
    println!("wrote {n} frames and {}", manifest_path.display());
    Ok(())
}

fn run_frame(plan: &FramePlan, grid: &Grid, nmax: Option<usize>) -> Result<Value, String> {
    let spec = build_spec(&plan.cfg).map_err(|e| e.message().to_string())?;
    let v = build_potential(spec).map_err(|e| e.to_string())?;
    let csv = potential_csv(&v, grid).map_err(|e| e.to_string())?;
    write_output(&plan.path, &csv).map_err(|e| e.message().to_string())?;
    let pred = predict_spectrum(&spec, inherited_levels(&spec, nmax));
    let file = plan
        .path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| plan.path.display().to_string());
    Ok(json!({"value": plan.value, "file": file, "levels": levels_value(&pred)}))
}
