//! `soapfilm` command-line front end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use soapfilm::access::{accessibility_report, fixtures, totally_accessible, BoundarySamples};
use soapfilm::catenoid::{enumerate_family_with_stability, SolutionKind, TwoCircleBoundary};
use soapfilm::check::{format_table, run_suite, DEFAULT_SEED, SUITES};
use soapfilm::deficits::surface_deficits;
use soapfilm::graph::graph_mean_curvature;
use soapfilm::io::{to_json17, write_atomic};
use soapfilm::lab::{bubbling_family, fit_estimate, flat_disk_base, logspace, run_sweep, stable_catenoid_base, write_sweep_csv, Norm};
use soapfilm::solver::{solve_flat_polar, solve_gravity_film_with, GravityParams, PolarTarget, SolveOptions};
use soapfilm::surface::{build_base, fmt17, BaseKind, BaseSurface, GridSpec, ProfileCurve};
use soapfilm::Error;

const EXIT_ERROR: u8 = 1;
const EXIT_EMPTY: u8 = 2;
const EXIT_CONTINUATION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "soapfilm", version, about = "Minimal and almost-minimal surfaces: catenoids, gravity films, deficits and estimate sweeps")]
struct Cli {
    /// Flat key=value configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Newton tolerance on max |H - f|.
    #[arg(long, global = true)]
    newton_tol: Option<f64>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Disks, catenoids and singular catenoids spanning two coaxial circles.
    Catenoids(CatenoidsArgs),
    /// Soap film with gravity over a disk, annulus or stable catenoid.
    Film(FilmArgs),
    /// Sweep of gravity films with a log-log fit of one estimate.
    Sweep(SweepArgs),
    /// Accessibility from infinity of a sampled boundary.
    Access(AccessArgs),
    /// Deficits of a surface of revolution or of the bubbling family.
    Deficits(DeficitsArgs),
    /// Invariant suite with a pass/fail table.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct CatenoidsArgs {
    #[arg(long, allow_negative_numbers = true)]
    r1: f64,
    #[arg(long, allow_negative_numbers = true)]
    r2: f64,
    #[arg(long, allow_negative_numbers = true)]
    sep: f64,
    /// Include singular catenoids; exit 2 if there are none.
    #[arg(long)]
    singular: bool,
    /// Write the solutions here instead of standard output.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Shape {
    Disk,
    Annulus,
    Catenoid,
}

#[derive(Args, Debug)]
struct FilmArgs {
    #[arg(long, value_enum)]
    shape: Shape,
    /// Disk or outer annulus radius, or the circle radius of the catenoid.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    size: f64,
    /// Inner annulus radius (default half the size).
    #[arg(long, allow_negative_numbers = true)]
    inner: Option<f64>,
    /// Catenoid separation.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    sep: f64,
    #[arg(long, allow_negative_numbers = true)]
    kappa2h: f64,
    /// Angle in degrees between gravity and the disk normal (disk only, polar solver).
    #[arg(long, allow_negative_numbers = true)]
    tilt: Option<f64>,
    /// Meridian nodes (rings for the polar solver).
    #[arg(long)]
    grid: Option<usize>,
    /// Solution CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve report JSON (default: standard output).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BaseChoice {
    Disk,
    Catenoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Estimate {
    /// ||u||_C0 against ||H||_inf, slope 1.
    C0,
    /// Area excess against ||H||_L2, slope 2.
    Area,
    /// ||u||_H1 against delta(u), slope 1.
    H1,
    /// delta(u) against ||H||_L2, slope 1.
    Weak,
}

impl Estimate {
    fn spec(self) -> (Norm, Norm, f64, f64) {
        match self {
            Estimate::C0 => (Norm::HLinf, Norm::UC0, 1.0, 0.05),
            Estimate::Area => (Norm::HL2, Norm::AreaExcess, 2.0, 0.10),
            Estimate::H1 => (Norm::DeltaWeak, Norm::UH1, 1.0, 0.05),
            Estimate::Weak => (Norm::HL2, Norm::DeltaWeak, 1.0, 0.05),
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    base: BaseChoice,
    #[arg(long, value_enum)]
    estimate: Estimate,
    /// Exponent of the reported L^p norm of H.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    p: f64,
    /// Log-spaced kappa2h values as `a:b:n`.
    #[arg(long, default_value = "1e-3:1e-1:9")]
    h: String,
    #[arg(long)]
    grid: Option<usize>,
    /// Sweep CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fit JSON (default: standard output).
    #[arg(long)]
    fit: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fixture {
    Nested,
    Coaxial,
    ThreeCircles,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "fixture"])))]
struct AccessArgs {
    /// Boundary CSV with header `component,x,y,z`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    /// Samples per component (fixtures are generated at this density, input is thinned to it).
    #[arg(long)]
    samples: Option<usize>,
    /// Report JSON (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["profile", "bubbling"])))]
struct DeficitsArgs {
    /// Meridian CSV with header `s,r,z`.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Bubbling family member with this epsilon.
    #[arg(long, allow_negative_numbers = true)]
    bubbling: Option<f64>,
    /// Boundary circle radius of the bubbling family.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    radius: f64,
    /// Meridian nodes of the base built from the profile (default: profile samples).
    #[arg(long)]
    grid: Option<usize>,
    /// Angular samples for the dual bounds.
    #[arg(long, default_value_t = 64)]
    ntheta: usize,
    /// Exponents of the integral deficits.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    p: Vec<f64>,
    /// Exponents of the dual lower bounds (`inf` allowed).
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, f64::INFINITY])]
    dual_p: Vec<f64>,
    /// Report JSON (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Also write the table here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Settings shared by all subcommands, merged from defaults, the config file and flags.
#[derive(Debug, Clone)]
struct RunConfig {
    newton_tol: f64,
    grid: Option<usize>,
    output_dir: PathBuf,
    seed: u64,
    threads: Option<usize>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Empty(String),
    Continuation(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::ContinuationFailure { reached, target, residual }) => Failure::Continuation(format!(
                "continuation failed: largest kappa2h reached {} of target {target} (last residual {residual:e})",
                fmt17(*reached)
            )),
            _ => Failure::Internal(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_config(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Failure> {
    v.parse().map_err(|_| usage(format!("invalid value for {key}: {v}")))
}

fn run_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig {
        newton_tol: SolveOptions::default().tol,
        grid: None,
        output_dir: PathBuf::from("."),
        seed: DEFAULT_SEED,
        threads: None,
    };
    if let Some(path) = &cli.config {
        for (k, v) in parse_config(path)? {
            match k.as_str() {
                "newton_tol" => cfg.newton_tol = parse_value(&k, &v)?,
                "grid" => cfg.grid = Some(parse_value(&k, &v)?),
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "seed" => cfg.seed = parse_value(&k, &v)?,
                "threads" => cfg.threads = Some(parse_value(&k, &v)?),
                _ => return Err(usage(format!("unknown config key '{k}'"))),
            }
        }
    }
    if let Ok(v) = std::env::var("SOAPFILM_THREADS") {
        cfg.threads = Some(parse_value("SOAPFILM_THREADS", &v)?);
    }
    if let Some(v) = cli.newton_tol {
        cfg.newton_tol = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.output_dir {
        cfg.output_dir = v.clone();
    }
    if !(cfg.newton_tol > 0.0 && cfg.newton_tol.is_finite()) {
        return Err(usage("newton_tol must be positive"));
    }
    if cfg.grid.is_some_and(|g| g < 5) {
        return Err(usage("grid needs at least 5 nodes"));
    }
    if cfg.threads == Some(0) {
        return Err(usage("thread count must be positive"));
    }
    if !cfg.output_dir.is_dir() {
        return Err(usage(format!("output_dir {} is not a directory", cfg.output_dir.display())));
    }
    Ok(cfg)
}

impl RunConfig {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.output_dir.join(p)
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.newton_tol,
            ..SolveOptions::default()
        }
    }

    /// Writes `text` to `target`, or prints it when no target was given.
    fn emit(&self, target: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
        match target {
            Some(p) => {
                let p = self.path(p);
                write_atomic(&p, text.as_bytes()).with_context(|| format!("writing {}", p.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn cmd_catenoids(cfg: &RunConfig, a: &CatenoidsArgs) -> CmdResult {
    positive("r1", a.r1)?;
    positive("r2", a.r2)?;
    positive("sep", a.sep)?;
    let b = TwoCircleBoundary::new(a.r1, a.r2, a.sep)?;
    let mut report = enumerate_family_with_stability(&b)?;
    if !a.singular {
        report.solutions.retain(|s| s.kind != SolutionKind::SingularCatenoid);
    }
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    if a.singular && report.singular().is_empty() {
        return Err(Failure::Empty(format!("no singular catenoid at separation {}", a.sep)));
    }
    cfg.emit(a.json.as_ref(), &to_json17(&report.solutions)?)?;
    Ok(())
}

fn film_base(a: &FilmArgs, nodes: usize) -> Result<BaseSurface, Failure> {
    let base = match a.shape {
        Shape::Disk => build_base(BaseKind::FlatDisk { radius: a.size }, GridSpec::new(nodes))?,
        Shape::Annulus => {
            let r_in = a.inner.unwrap_or(0.5 * a.size);
            if !(r_in > 0.0 && r_in < a.size) {
                return Err(usage("--inner must lie in (0, size)"));
            }
            build_base(BaseKind::FlatAnnulus { r_in, r_out: a.size }, GridSpec::new(nodes))?
        }
        Shape::Catenoid => stable_catenoid_base(a.size, a.sep, GridSpec::new(nodes))?,
    };
    Ok(base)
}

fn cmd_film(cfg: &RunConfig, a: &FilmArgs) -> CmdResult {
    positive("size", a.size)?;
    positive("sep", a.sep)?;
    if !(a.kappa2h >= 0.0 && a.kappa2h.is_finite()) {
        return Err(usage(format!("--kappa2h must be nonnegative, got {}", a.kappa2h)));
    }
    let grid = a.grid.or(cfg.grid);
    if grid.is_some_and(|g| g < 5) {
        return Err(usage("--grid needs at least 5 nodes"));
    }
    if let Some(deg) = a.tilt {
        if a.shape != Shape::Disk {
            return Err(usage("--tilt is only available for --shape disk"));
        }
        if !(0.0..=90.0).contains(&deg) {
            return Err(usage("--tilt must lie in [0, 90] degrees"));
        }
        let t = deg.to_radians();
        let params = GravityParams::with_direction(a.kappa2h, [t.sin(), 0.0, t.cos()])?;
        let nr = grid.unwrap_or(40);
        let sol = solve_flat_polar(a.size, nr, 32, PolarTarget::Gravity(params), &cfg.solve_options())?;
        if let Some(out) = &a.out {
            let mut csv = String::from("i,j,r,theta,u\n");
            for (i, j, r, th, u) in sol.grid_rows() {
                csv.push_str(&format!("{i},{j},{},{},{}\n", fmt17(r), fmt17(th), fmt17(u)));
            }
            let p = cfg.path(out);
            write_atomic(&p, csv.as_bytes())?;
        }
        let report = json!({
            "solver": "polar",
            "kappa2h": a.kappa2h,
            "tilt_deg": deg,
            "rings": nr,
            "angles": sol.ntheta,
            "center_deflection": sol.center,
            "residual_linf": sol.residual_linf,
            "newton_iters": sol.newton_iters,
        });
        cfg.emit(a.report.as_ref(), &to_json17(&report)?)?;
        return Ok(());
    }
    let base = Arc::new(film_base(a, grid.unwrap_or(201))?);
    let rep = solve_gravity_film_with(base.clone(), GravityParams::new(a.kappa2h)?, &cfg.solve_options())?;
    let u = &rep.graph.u;
    let h = graph_mean_curvature(&rep.graph);
    if let Some(out) = &a.out {
        let mut csv = String::from("s,r,z,u,H\n");
        for (i, g) in base.nodes.iter().enumerate() {
            csv.push_str(&format!("{},{},{},{},{}\n", fmt17(g.s), fmt17(g.r), fmt17(g.z), fmt17(u[i]), fmt17(h[i])));
        }
        write_atomic(&cfg.path(out), csv.as_bytes())?;
    }
    let report = json!({
        "solver": "axisymmetric",
        "shape": format!("{:?}", a.shape).to_lowercase(),
        "kappa2h": a.kappa2h,
        "nodes": base.len(),
        "residual_linf": rep.residual_linf,
        "newton_iters": rep.newton_iters,
        "continuation_steps": rep.continuation_steps,
        "max_deflection": u.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        "center_deflection": base.center_value(u),
        "area": rep.graph.area(),
    });
    cfg.emit(a.report.as_ref(), &to_json17(&report)?)?;
    Ok(())
}

fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("--h expects a:b:n with 0 < a < b and n >= 2, got {s}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(a > 0.0 && b > a && b.is_finite() && n >= 2) {
        return Err(bad());
    }
    Ok(logspace(a, b, n))
}

fn cmd_sweep(cfg: &RunConfig, a: &SweepArgs) -> CmdResult {
    if a.p.is_nan() || a.p < 1.0 {
        return Err(usage(format!("--p must be at least 1, got {}", a.p)));
    }
    let hs = parse_range(&a.h)?;
    let nodes = a.grid.or(cfg.grid).unwrap_or(201);
    if nodes < 5 {
        return Err(usage("--grid needs at least 5 nodes"));
    }
    let base = match a.base {
        BaseChoice::Disk => flat_disk_base(GridSpec::new(nodes))?,
        BaseChoice::Catenoid => stable_catenoid_base(1.0, 0.5, GridSpec::new(nodes))?,
    };
    let sweep = run_sweep(Arc::new(base), &hs, a.p)?;
    if sweep.records.is_empty() {
        return Err(Failure::Empty("every sweep value left the graph regime".into()));
    }
    if let Some(out) = &a.out {
        let mut buf = Vec::new();
        write_sweep_csv(&sweep.records, &mut buf)?;
        write_atomic(&cfg.path(out), &buf)?;
    }
    let (x, y, expected, tol) = a.estimate.spec();
    let fit = fit_estimate(&sweep.records, x, y)?;
    let pass = (fit.slope - expected).abs() <= tol && fit.r2 >= 0.99;
    let report = json!({
        "base": format!("{:?}", a.base).to_lowercase(),
        "estimate": format!("{:?}", a.estimate).to_lowercase(),
        "x": format!("{x:?}"),
        "y": format!("{y:?}"),
        "p": a.p,
        "nodes": nodes,
        "records": sweep.records.len(),
        "dropped": sweep.dropped,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r2": fit.r2,
        "window": fit.window,
        "expected_slope": expected,
        "tolerance": tol,
        "pass": pass,
    });
    cfg.emit(a.fit.as_ref(), &to_json17(&report)?)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Internal(anyhow!(
            "slope {:.6} outside {expected} +- {tol} (r2 {:.6})",
            fit.slope,
            fit.r2
        )))
    }
}

fn thin(b: BoundarySamples, k: usize) -> anyhow::Result<BoundarySamples> {
    let comps = b
        .components
        .into_iter()
        .map(|c| {
            let step = c.len().div_ceil(k).max(1);
            c.into_iter().step_by(step).collect()
        })
        .collect();
    Ok(BoundarySamples::new(comps)?)
}

fn cmd_access(cfg: &RunConfig, a: &AccessArgs) -> CmdResult {
    if a.samples == Some(0) {
        return Err(usage("--samples must be positive"));
    }
    let b = match (&a.input, a.fixture) {
        (Some(path), _) => {
            let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let b = BoundarySamples::read_csv(f)?;
            match a.samples {
                Some(k) => thin(b, k)?,
                None => b,
            }
        }
        (None, Some(fx)) => {
            let k = a.samples.unwrap_or(96);
            match fx {
                Fixture::Nested => fixtures::nested_circles(k),
                Fixture::Coaxial => fixtures::coaxial_circles(0.5, k),
                Fixture::ThreeCircles => fixtures::three_circles(k),
            }
        }
        (None, None) => return Err(usage("one of --input or --fixture is required")),
    };
    let rep = accessibility_report(&b);
    let out = json!({
        "dim": b.dim(),
        "components": rep,
        "totally_accessible": totally_accessible(&rep),
    });
    cfg.emit(a.out.as_ref(), &to_json17(&out)?)?;
    Ok(())
}

fn cmd_deficits(cfg: &RunConfig, a: &DeficitsArgs) -> CmdResult {
    if a.ntheta < 4 {
        return Err(usage("--ntheta must be at least 4"));
    }
    if a.p.iter().chain(&a.dual_p).any(|p| p.is_nan() || *p < 1.0) {
        return Err(usage("deficit exponents must be at least 1"));
    }
    let text = if let Some(eps) = a.bubbling {
        positive("radius", a.radius)?;
        if !(eps > 0.0 && eps <= 0.2 * a.radius) {
            return Err(usage(format!("--bubbling must lie in (0, 0.2 radius], got {eps}")));
        }
        let rep = bubbling_family(a.radius, eps)?;
        let out = json!({
            "eps": rep.eps,
            "circle_radius": rep.circle_radius,
            "separation": rep.separation,
            "delta_inf_away": rep.delta_inf_away,
            "deficits": rep.deficits,
            "area": rep.area,
            "limit_area": rep.limit_area,
            "crossing_radii": rep.crossing_radii,
            "crossing_length": rep.crossing_length,
        });
        to_json17(&out)?
    } else {
        let path = a.profile.as_ref().ok_or_else(|| usage("one of --profile or --bubbling is required"))?;
        let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let curve = ProfileCurve::read_csv(f)?;
        let nodes = a.grid.or(cfg.grid).unwrap_or(curve.len());
        let base = build_base(BaseKind::Revolution(curve), GridSpec::new(nodes))?;
        let rep = surface_deficits(&base, &a.p, &a.dual_p, a.ntheta)?;
        to_json17(&rep)?
    };
    cfg.emit(a.out.as_ref(), &text)?;
    Ok(())
}

fn cmd_check(cfg: &RunConfig, a: &CheckArgs) -> CmdResult {
    if a.suite != "all" && !SUITES.contains(&a.suite.as_str()) {
        return Err(usage(format!("unknown suite '{}'; expected all or one of {}", a.suite, SUITES.join(", "))));
    }
    let results = run_suite(&a.suite, cfg.seed)?;
    let table = format!("seed {}\n{}", cfg.seed, format_table(&results));
    print!("{table}");
    if let Some(out) = &a.out {
        write_atomic(&cfg.path(out), table.as_bytes())?;
    }
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Internal(anyhow!("{} checks failed", results.iter().filter(|r| !r.passed).count())))
    }
}

fn run(cli: &Cli) -> CmdResult {
    let cfg = run_config(cli)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(anyhow!("thread pool: {e}")))?;
    }
    match &cli.cmd {
        Command::Catenoids(a) => cmd_catenoids(&cfg, a),
        Command::Film(a) => cmd_film(&cfg, a),
        Command::Sweep(a) => cmd_sweep(&cfg, a),
        Command::Access(a) => cmd_access(&cfg, a),
        Command::Deficits(a) => cmd_deficits(&cfg, a),
        Command::Check(a) => cmd_check(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}\n\nRun with --help for usage.");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Empty(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_EMPTY)
        }
        Err(Failure::Continuation(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_CONTINUATION)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
