//! Command-line front end: argument types, config-file merging and the six
//! commands. The `pants` binary only parses and dispatches.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::collision_lab::{self, BoundReport, StopReason};
use crate::error::{Error, Result};
use crate::geodesic_flow::{self, GeodesicState};
use crate::jm_metric::{self, ScanOptions, ScanRegion};
use crate::output;
use crate::realizer::{self, ShortenOptions};
use crate::shape_geometry::{Letter, MassTriple, ShapePoint, SideTriple};
use crate::syzygy::{self, BiInfinite, SignedWord};

#[derive(Parser, Debug)]
#[command(name = "pants", version, about = "Geodesics, curvature and collisions of the 1/r^2 three-body problem on the shape sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scan the curvature of the Jacobi-Maupertuis metric.
    Curvature(CurvatureArgs),
    /// Integrate one geodesic and record its syzygies.
    Geodesic(GeodesicArgs),
    /// Find the closed geodesic of a tied syzygy word.
    Realize(RealizeArgs),
    /// Word combinatorics.
    Syzygy(SyzygyArgs),
    /// Binary-collision experiment in the unreduced problem.
    Collide(CollideArgs),
    /// Circumferential factor of a cylindrical end.
    Ends(EndsArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureArgs {
    #[arg(long, default_value = "1,1,1")]
    pub masses: String,
    /// Grid points per side.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Round radius of the excluded balls around the collisions.
    #[arg(long, default_value_t = 0.05)]
    pub exclusion: f64,
    /// Scan a ball around `phi,theta` instead of the whole sphere.
    #[arg(long)]
    pub ball_center: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    pub ball_radius: f64,
    /// Skip the per-point CSV.
    #[arg(long)]
    #[serde(default)]
    pub no_csv: bool,
    #[arg(long, default_value = "out/curvature")]
    pub out: PathBuf,
    /// TOML file whose keys override the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicArgs {
    #[arg(long, default_value = "1,1,1")]
    pub masses: String,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Launch direction, radians from the direction of increasing theta
    /// toward increasing phi.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub heading: f64,
    /// JM arclength to integrate (negative runs backwards).
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub length: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value = "out/geodesic")]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RealizeArgs {
    /// Signed periodic word such as 1+2-3+1-2+3-.
    #[arg(long)]
    pub word: String,
    #[arg(long, default_value = "1,1,1")]
    pub masses: String,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub per_letter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// For an untied word: end coordinates of the comparison curves.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub comparison_ells: Vec<f64>,
    #[arg(long, default_value = "out/realize")]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SyzygyArgs {
    #[command(subcommand)]
    pub op: SyzygyOp,
}

#[derive(Subcommand, Debug, Clone)]
pub enum SyzygyOp {
    /// Delete stutters.
    Reduce {
        word: String,
        /// Treat the word as finite rather than periodic.
        #[arg(long)]
        linear: bool,
    },
    /// Stutter and tied flags.
    Classify {
        word: String,
        #[arg(long)]
        linear: bool,
    },
    /// The two alternating sign patterns.
    Decorate {
        word: String,
        #[arg(long)]
        linear: bool,
    },
    /// Periodic word from a window of a bi-infinite word.
    Approximant {
        #[arg(long)]
        backward: String,
        #[arg(long, default_value = "")]
        core: String,
        #[arg(long)]
        forward: String,
        #[arg(short, long)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CollideArgs {
    #[arg(long, default_value = "1,1,1")]
    pub masses: String,
    /// Initial 1-2 distance of the collinear start.
    #[arg(long, default_value_t = 0.05)]
    pub r0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Use this constant instead of calibrating one.
    #[arg(long)]
    pub kstar: Option<f64>,
    /// Calibration radius and sample count.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub perturbations: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub perturbation_size: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out/collide")]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EndsArgs {
    #[arg(long, default_value = "1,1,1")]
    pub masses: String,
    /// Which end (the collision letter).
    #[arg(long, default_value_t = 3)]
    pub end: u8,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3,3.5,4,4.5,5,5.5,6")]
    pub ells: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    pub chi_samples: usize,
    #[arg(long, default_value = "out/ends")]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Overrides the fields of `args` with the keys of a TOML file.
pub fn merge_config<T: Serialize + DeserializeOwned>(args: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        let v = toml::Value::try_from(args).map_err(|e| Error::Invalid(e.to_string()))?;
        return v.try_into().map_err(|e: toml::de::Error| Error::Invalid(e.to_string()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let file: toml::Table = text.parse().map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let mut base = match toml::Value::try_from(args).map_err(|e| Error::Invalid(e.to_string()))? {
        toml::Value::Table(t) => t,
        _ => return Err(Error::Invalid("arguments are not a table".into())),
    };
    for (k, v) in file {
        let key = k.replace('-', "_");
        if !base.contains_key(&key) && !is_optional_key(&key) {
            return Err(Error::Invalid(format!("unknown config key {k:?}")));
        }
        base.insert(key, v);
    }
    toml::Value::Table(base).try_into().map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn is_optional_key(key: &str) -> bool {
    matches!(key, "ball_center" | "kstar")
}

fn masses(s: &str) -> Result<MassTriple> {
    s.parse()
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{name} must be positive, got {v}")))
    }
}

fn pair(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Invalid(format!("expected two comma-separated numbers, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok((parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?))
}

fn letter(d: u8) -> Result<Letter> {
    Letter::from_digit(d).ok_or_else(|| Error::Invalid(format!("end must be 1, 2 or 3, got {d}")))
}

/// Runs a command; the returned text goes to stdout.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Curvature(a) => {
            let a = merge_config(&a, a.config.as_deref())?;
            cmd_curvature(&a)
        }
        Command::Geodesic(a) => {
            let a = merge_config(&a, a.config.as_deref())?;
            cmd_geodesic(&a)
        }
        Command::Realize(a) => {
            let a = merge_config(&a, a.config.as_deref())?;
            cmd_realize(&a)
        }
        Command::Syzygy(a) => cmd_syzygy(&a),
        Command::Collide(a) => {
            let a = merge_config(&a, a.config.as_deref())?;
            cmd_collide(&a)
        }
        Command::Ends(a) => {
            let a = merge_config(&a, a.config.as_deref())?;
            cmd_ends(&a)
        }
    }
}

/// Exit status for an error: 1 for bad input, 2 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// Parses `argv`, runs, prints, and returns the process exit status.
pub fn main_with<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct CurvatureJson<'a> {
    masses: [f64; 3],
    grid: usize,
    exclusion: f64,
    region: ScanRegion,
    report: &'a jm_metric::ScanReport,
}

pub fn cmd_curvature(a: &CurvatureArgs) -> Result<String> {
    let m = masses(&a.masses)?;
    if a.grid < 2 {
        return Err(Error::Invalid(format!("grid must be at least 2, got {}", a.grid)));
    }
    let region = match &a.ball_center {
        Some(c) => {
            let (phi, theta) = pair(c)?;
            positive("ball radius", a.ball_radius)?;
            ScanRegion::Ball { center: ShapePoint::new(phi, theta), radius: a.ball_radius }
        }
        None => ScanRegion::Sphere,
    };
    let opts = ScanOptions { resolution: a.grid, exclusion: a.exclusion, region, ..Default::default() };
    let grid = jm_metric::curvature_grid(&m, &opts)?;
    let report = jm_metric::summarize_grid(&grid, &opts);
    if !a.no_csv {
        let rows = grid.points.iter().zip(&grid.values).filter_map(|(&p, v)| {
            v.map(|k| {
                let s = p.sides().s;
                let f = jm_metric::conformal_factor(p, &m).unwrap_or(f64::NAN);
                let kap = jm_metric::kappa(p, &m).unwrap_or(f64::NAN);
                vec![p.phi, p.theta, s[0], s[1], s[2], f, k, kap]
            })
        });
        let text = output::csv(&["phi", "theta", "s1", "s2", "s3", "conformal_factor", "curvature", "kappa"], rows);
        output::write_text(&a.out.join("curvature.csv"), &text)?;
    }
    if region == ScanRegion::Sphere {
        output::write_text(&a.out.join("curvature.svg"), &output::heatmap_svg(&grid, 360))?;
    }
    output::write_json(
        &a.out.join("curvature.json"),
        &CurvatureJson { masses: m.masses(), grid: a.grid, exclusion: a.exclusion, region, report: &report },
    )?;
    let verdict = serde_json::to_value(report.verdict).unwrap_or_default();
    Ok(format!(
        "verdict: {}\nmin curvature {:.6e} at phi={:.6} theta={:.6}\nmax curvature {:.6e} at phi={:.6} theta={:.6}\nevaluated {} points, excluded {}\n",
        verdict.as_str().unwrap_or("?"),
        report.min_curvature,
        report.min_at.phi,
        report.min_at.theta,
        report.max_curvature,
        report.max_at.phi,
        report.max_at.theta,
        report.evaluated,
        report.excluded
    ))
}

#[derive(Serialize)]
struct GeodesicJson {
    masses: [f64; 3],
    start: GeodesicState,
    fate: geodesic_flow::Fate,
    arclength: f64,
    newton_time: f64,
    word: String,
    reduced_word: String,
    speed_drift_per_length: f64,
    events: Vec<geodesic_flow::SyzygyEvent>,
}

pub fn cmd_geodesic(a: &GeodesicArgs) -> Result<String> {
    let m = masses(&a.masses)?;
    positive("tol", a.tol)?;
    let start = GeodesicState::launch(ShapePoint::new(a.phi, a.theta), a.heading, &m)?;
    let traj = geodesic_flow::integrate(&start, &m, a.length, a.tol)?;
    let rows = traj.samples.iter().map(|st| {
        let s = st.point.sides().s;
        vec![st.s, st.point.phi, st.point.theta, st.v_phi, st.v_theta, s[0], s[1], s[2]]
    });
    output::write_text(&a.out.join("trajectory.csv"), &output::csv(&["s", "phi", "theta", "v_phi", "v_theta", "s1", "s2", "s3"], rows))?;
    let pts: Vec<_> = traj.samples.iter().map(|s| s.point.to_unit()).collect();
    output::write_text(&a.out.join("trajectory.svg"), &output::trace_svg(&[(&pts, "#c03")], false))?;
    let word = traj.word();
    let json = GeodesicJson {
        masses: m.masses(),
        start,
        fate: traj.fate,
        arclength: traj.arclength(),
        newton_time: traj.newton_time.last().copied().unwrap_or(0.0),
        word: word.to_string(),
        reduced_word: syzygy::reduce_stutters(&word).to_string(),
        speed_drift_per_length: traj.drift_rate(),
        events: traj.events.clone(),
    };
    output::write_json(&a.out.join("events.json"), &json)?;
    Ok(format!("{} syzygies: {}\nfate: {:?}\narclength {:.6}\n", traj.events.len(), json.word, traj.fate, json.arclength))
}

#[derive(Serialize)]
struct RunJson {
    seed: u64,
    converged: bool,
    jm_length: Option<f64>,
    gradient_norm: Option<f64>,
    iterations: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize)]
struct RealizeJson {
    word: String,
    masses: [f64; 3],
    runs: Vec<RunJson>,
    converged_runs: usize,
    length_spread: Option<f64>,
    max_pairwise_hausdorff: Option<f64>,
    /// `(phi, theta)` samples of the first converged loop.
    vertices: Vec<[f64; 2]>,
}

pub fn cmd_realize(a: &RealizeArgs) -> Result<String> {
    let m = masses(&a.masses)?;
    positive("tol", a.tol)?;
    let word = SignedWord::parse(&a.word, true)?;
    if !syzygy::is_tied(&word) && !a.comparison_ells.is_empty() {
        let rep = realizer::untied_demo(&word, &m, &a.comparison_ells)?;
        output::write_json(&a.out.join("comparison.json"), &rep)?;
        let mut text = format!("untied word {word}: comparison curves around end {}\n  ell        total        anklet       bound\n", rep.end);
        for r in &rep.rows {
            let _ = writeln!(text, "  {:<10.4} {:<12.8} {:<12.8} {:.8}", r.ell, r.total_length, r.anklet_length, r.lower_bound);
        }
        if let Some(x) = rep.extrapolated_infimum {
            let _ = writeln!(text, "extrapolated infimum {x:.8}");
        }
        return Ok(text);
    }
    if a.restarts == 0 {
        return Err(Error::Invalid("need at least one restart".into()));
    }
    let opts = ShortenOptions { tol: a.tol, ..Default::default() };
    // Validate once so bad words fail fast with exit code 1.
    realizer::seed_loop(&word, &m, a.per_letter)?;
    let results: Vec<(u64, Result<realizer::RealizationResult>)> = (0..a.restarts as u64)
        .into_par_iter()
        .map(|i| (a.seed + i, realizer::realize(&word, &m, a.seed + i, a.per_letter, &opts)))
        .collect();
    let good: Vec<&realizer::RealizationResult> = results.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
    let lengths: Vec<f64> = good.iter().map(|r| r.jm_length).collect();
    let spread = (!lengths.is_empty()).then(|| {
        let lo = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = lengths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / lo
    });
    let mut haus: Option<f64> = None;
    for i in 0..good.len() {
        for j in i + 1..good.len() {
            let d = realizer::symmetric_hausdorff(&good[i].loop_.units(), &good[j].loop_.units()).0;
            haus = Some(haus.map_or(d, |h| h.max(d)));
        }
    }
    let json = RealizeJson {
        word: word.to_string(),
        masses: m.masses(),
        runs: results
            .iter()
            .map(|(seed, r)| match r {
                Ok(r) => RunJson {
                    seed: *seed,
                    converged: r.converged,
                    jm_length: Some(r.jm_length),
                    gradient_norm: Some(r.gradient_norm),
                    iterations: Some(r.iterations),
                    error: None,
                },
                Err(e) => RunJson { seed: *seed, converged: false, jm_length: None, gradient_norm: None, iterations: None, error: Some(e.to_string()) },
            })
            .collect(),
        converged_runs: good.len(),
        length_spread: spread,
        max_pairwise_hausdorff: haus,
        vertices: good.first().map(|r| r.loop_.vertices.iter().map(|p| [p.phi, p.theta]).collect()).unwrap_or_default(),
    };
    output::write_json(&a.out.join("realize.json"), &json)?;
    let units: Vec<Vec<_>> = good.iter().map(|r| r.loop_.units()).collect();
    let curves: Vec<(&[_], &str)> = units.iter().map(|u| (u.as_slice(), "#06c")).collect();
    output::write_text(&a.out.join("realize.svg"), &output::trace_svg(&curves, true))?;
    if good.is_empty() {
        let first = results.into_iter().find_map(|(_, r)| r.err());
        return Err(first.unwrap_or(Error::NoConvergence { iterations: 0, residual: f64::NAN }));
    }
    let mut text = format!("{word}: {}/{} restarts converged\n", good.len(), a.restarts);
    for (seed, r) in &results {
        match r {
            Ok(r) => {
                let _ = writeln!(text, "  seed {seed}: length {:.12}", r.jm_length);
            }
            Err(e) => {
                let _ = writeln!(text, "  seed {seed}: {e}");
            }
        }
    }
    if let Some(h) = haus {
        let _ = writeln!(text, "max pairwise Hausdorff distance {h:.3e}");
    }
    Ok(text)
}

pub fn cmd_syzygy(a: &SyzygyArgs) -> Result<String> {
    match &a.op {
        SyzygyOp::Reduce { word, linear } => {
            let w = SignedWord::parse(word, !linear)?;
            let r = syzygy::reduce_stutters(&w);
            let shown = r.to_string();
            if r.is_empty() {
                Ok(format!("\"{shown}\"\n(every letter cancels against a neighbour: the word is null-homotopic)\n"))
            } else {
                Ok(format!("\"{shown}\"\n"))
            }
        }
        SyzygyOp::Classify { word, linear } => {
            let w = SignedWord::parse(word, !linear)?;
            let c = syzygy::classify(&w);
            Ok(format!(
                "stutter-free: {}\ntied: {}\nreduced: \"{}\"\n",
                c.stutter_free,
                c.tied,
                syzygy::reduce_stutters(&w)
            ))
        }
        SyzygyOp::Decorate { word, linear } => {
            let w = SignedWord::parse(word, !linear)?;
            let (p, q) = syzygy::sign_decorations(&w)?;
            Ok(format!("{p}\n{q}\n"))
        }
        SyzygyOp::Approximant { backward, core, forward, n } => {
            let s = BiInfinite::parse(backward, core, forward)?;
            let c = s.classify();
            let w = syzygy::periodic_approximants(&s, *n)?;
            Ok(format!(
                "{w}\n(collision tails: forward {}, backward {})\n",
                c.collision_forward, c.collision_backward
            ))
        }
    }
}

#[derive(Serialize)]
struct CollideJson {
    masses: [f64; 3],
    kstar: f64,
    kstar_calibrated: bool,
    base: BoundReport,
    perturbations: usize,
    perturbed_passed: usize,
    perturbed_failures: Vec<String>,
    worst_lagrange_jacobi_residual: f64,
    pass: bool,
}

pub fn cmd_collide(a: &CollideArgs) -> Result<String> {
    use rand::SeedableRng;
    let m = masses(&a.masses)?;
    positive("r0", a.r0)?;
    positive("delta", a.delta)?;
    positive("epsilon", a.epsilon)?;
    let (kstar, calibrated) = match a.kstar {
        Some(k) => (k, false),
        None => (collision_lab::calibrate_kstar(&m, a.epsilon, a.samples, a.seed)?, true),
    };
    let start = collision_lab::collinear_start(&m, a.r0)?;
    let base = collision_lab::collision_bound_experiment(&start, &m, a.delta, kstar)?;
    let timeline = collision_lab::integrate_full(&start, &m, base.bound_time, 1e-12)?;
    let rows = timeline.rows.iter().map(|r| vec![r.t, r.r, r.j1, r.energy, r.inertia, r.inertia_ddot]);
    output::write_text(&a.out.join("timeline.csv"), &output::csv(&["t", "r", "J1", "H", "I", "Iddot"], rows))?;
    let outcomes: Vec<Result<BoundReport>> = (0..a.perturbations)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(1_000_003 * (i as u64 + 1)));
            let p = collision_lab::perturb(&start, &m, a.perturbation_size, &mut rng)?;
            collision_lab::collision_bound_experiment(&p, &m, a.delta, kstar)
        })
        .collect();
    let mut failures = Vec::new();
    let mut worst = base.max_lagrange_jacobi_residual;
    let mut passed = 0;
    for o in &outcomes {
        match o {
            Ok(r) if r.open_condition && r.collided_within_bound => {
                passed += 1;
                worst = worst.max(r.max_lagrange_jacobi_residual);
            }
            Ok(r) => failures.push(format!("open condition {}, collided in bound {}", r.open_condition, r.collided_within_bound)),
            Err(e) => failures.push(e.to_string()),
        }
    }
    let pass = base.open_condition && base.collided_within_bound && failures.is_empty();
    let json = CollideJson {
        masses: m.masses(),
        kstar,
        kstar_calibrated: calibrated,
        base,
        perturbations: a.perturbations,
        perturbed_passed: passed,
        perturbed_failures: failures,
        worst_lagrange_jacobi_residual: worst,
        pass,
    };
    output::write_json(&a.out.join("collide.json"), &json)?;
    let stop = if timeline.stop == StopReason::Collision { "collision" } else { "no collision" };
    Ok(format!(
        "K* = {kstar:.6}\nbase run: {stop} at t = {}, bound {:.6e}\nperturbed starts colliding within bound: {passed}/{}\n{}\n",
        base.collision_time.map_or("-".to_string(), |t| format!("{t:.6e}")),
        base.bound_time,
        a.perturbations,
        if pass { "pass" } else { "FAIL" }
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndRow {
    pub ell: f64,
    pub min_f: f64,
    pub max_f: f64,
}

#[derive(Serialize)]
struct EndsJson {
    masses: [f64; 3],
    end: Letter,
    limit: f64,
    rows: Vec<EndRow>,
    /// Smallest tabulated `ell` from which `|f - limit| < 1e-4` for every
    /// sampled angle.
    threshold_ell: Option<f64>,
}

/// `min` and `max` over `chi_samples` angles of the circumferential factor
/// at end coordinate `ell`.
pub fn end_table(m: &MassTriple, k: Letter, ells: &[f64], chi_samples: usize) -> Result<Vec<EndRow>> {
    if chi_samples == 0 {
        return Err(Error::Invalid("need at least one angle".into()));
    }
    ells.par_iter()
        .map(|&ell| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in 0..chi_samples {
                let chi = std::f64::consts::TAU * j as f64 / chi_samples as f64;
                let rho = jm_metric::end_rho_for_ell(m, k, ell, chi)?;
                let f = jm_metric::end_circumferential_factor(m, k, rho, chi)?;
                lo = lo.min(f);
                hi = hi.max(f);
            }
            Ok(EndRow { ell, min_f: lo, max_f: hi })
        })
        .collect()
}

pub fn cmd_ends(a: &EndsArgs) -> Result<String> {
    let m = masses(&a.masses)?;
    let k = letter(a.end)?;
    let rows = end_table(&m, k, &a.ells, a.chi_samples)?;
    let limit = m.cyl_radius(k);
    let threshold_ell = rows
        .iter()
        .enumerate()
        .find(|(i, _)| rows[*i..].iter().all(|r| (r.min_f - limit).abs().max((r.max_f - limit).abs()) < 1e-4))
        .map(|(_, r)| r.ell);
    output::write_text(&a.out.join("ends.csv"), &output::csv(&["ell", "min_f", "max_f"], rows.iter().map(|r| vec![r.ell, r.min_f, r.max_f])))?;
    output::write_json(&a.out.join("ends.json"), &EndsJson { masses: m.masses(), end: k, limit, rows: rows.clone(), threshold_ell })?;
    let mut text = format!("end {k}: limit {limit:.5}");
    if m.is_equal() {
        let _ = write!(text, " (1/sqrt 2 = {FRAC_1_SQRT_2:.5})");
    }
    text.push_str("\n  ell      min f      max f\n");
    for r in &rows {
        let _ = writeln!(text, "  {:<8.3} {:.7}  {:.7}", r.ell, r.min_f, r.max_f);
    }
    if let Some(t) = threshold_ell {
        let _ = writeln!(text, "within 1e-4 of the limit from ell = {t}");
    }
    Ok(text)
}

/// Side lengths as a quick sanity line for examples and logs.
pub fn describe_point(p: ShapePoint) -> String {
    let s: SideTriple = p.sides();
    format!("phi={:.6} theta={:.6} sides=({:.6}, {:.6}, {:.6})", p.phi, p.theta, s.s[0], s.s[1], s.s[2])
}
