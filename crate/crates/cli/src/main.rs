//! `qdiff-lab` command line front end.
//!
//! Every subcommand writes one JSON document, to stdout or to `--json PATH`.
//! Exit status: 0 on success, 1 when an input or a structural check fails,
//! 2 when a numerical routine fails or misses its tolerance.

mod svg;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use qdiff_lab::corpus;
use qdiff_lab::cuts::{find_matching, CutError, CutGraph};
use qdiff_lab::flatgeo::{strip_decomposition, FlatError, Foliation, PlainDifferential, TraceOptions};
use qdiff_lab::hurwitz::{self, CoverFile, HurwitzError, QDifferential};
use qdiff_lab::periods::{self, PeriodError, PeriodVector, SheetPath};
use qdiff_lab::qstab::{self, Mode, QStabError, StabilityDatum};
use qdiff_lab::quiver::{dga_from_arcs, n_reduce, GinzburgDga, QuiverError};
use qdiff_lab::suites::{self, SuiteConfig, SUITES};
use qdiff_lab::surface::{ArcSystem, ArcSystemFile, SurfaceError};
use qdiff_lab::winding::{angle_change, winding_number, Coefficient, LoopSpec, WindingError};
use qdiff_lab::C64;

#[derive(Parser)]
#[command(name = "qdiff-lab", version, about = "Graded surfaces, q-quadratic differentials and their flat geometry")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Settings shared by all subcommands.
#[derive(Args)]
struct RunConfig {
    /// Local error tolerance of trajectory integration.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Capture radius around zeros, in flat units.
    #[arg(long, global = true, default_value_t = 1e-5)]
    capture: f64,
    /// Flat length budget per trajectory.
    #[arg(long, global = true, default_value_t = 1e4)]
    budget: f64,
    /// Seed for randomized corpus suites.
    #[arg(long, global = true, default_value_t = 20240611)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Arc systems on graded marked surfaces.
    Surface {
        #[command(subcommand)]
        op: SurfaceOp,
    },
    /// Graded quivers and Ginzburg dg algebras of arc systems.
    Quiver {
        #[command(subcommand)]
        op: QuiverOp,
    },
    /// Hurwitz covers and their q-quadratic differentials.
    Hurwitz {
        #[command(subcommand)]
        op: HurwitzOp,
    },
    /// Horizontal foliation and strip decomposition at a phase.
    Foliate {
        cover: PathBuf,
        /// Phase in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
        /// Also draw the foliation as SVG.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Winding number of the horizontal field along a circle.
    Wind {
        cover: PathBuf,
        /// Circle as `re,im,radius`.
        #[arg(long = "loop", value_parser = parse_triple, allow_hyphen_values = true)]
        circle: (f64, f64, f64),
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Periods along sheet paths.
    Periods {
        cover: PathBuf,
        /// JSON array of sheet paths; defaults to paths between consecutive zeros.
        #[arg(long)]
        paths: Option<PathBuf>,
    },
    /// Matching for the cut construction of a bipartite graph.
    Cut { graph: PathBuf },
    /// Induce a q-stability datum from a stability datum.
    Induce {
        stab: PathBuf,
        /// `s` as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, value_enum, default_value_t = ModeArg::Open)]
        mode: ModeArg,
        /// Inclusive range of `X` powers as `k0,k1`.
        #[arg(long, value_parser = parse_window, default_value = "-2,2", allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Run corpus suites with known answers.
    Corpus {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Subcommand)]
enum SurfaceOp {
    /// Validate an arc system file.
    Check { file: PathBuf },
    /// Numerical data of the marked surface.
    Data { file: PathBuf },
}

#[derive(Subcommand)]
enum QuiverOp {
    /// Graded quiver, potential and differential.
    Build {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        truncation: usize,
    },
    /// Nonzero `d^2` residues.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        truncation: usize,
    },
    /// Collapse the bigrading to a single grading at `N`.
    Reduce {
        file: PathBuf,
        #[arg(long = "n", short = 'N')]
        n: i64,
        #[arg(long, default_value_t = 6)]
        truncation: usize,
    },
}

#[derive(Subcommand)]
enum HurwitzOp {
    /// Admissibility, singularities and zero count.
    Check { cover: PathBuf },
    /// Recover the cover from the coefficient of its differential.
    Recover { cover: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Open,
    Closed,
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let v = parse_floats(s, 2)?;
    Ok(C64::new(v[0], v[1]))
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64), String> {
    let v = parse_floats(s, 3)?;
    Ok((v[0], v[1], v[2]))
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok((a, b)),
        _ => Err("expected k0,k1".into()),
    }
}

/// Failure with its exit status.
struct Fail {
    code: u8,
    err: anyhow::Error,
}

impl Fail {
    fn validation(e: impl Display) -> Fail {
        Fail { code: 1, err: anyhow!("{e}") }
    }

    fn numeric(e: impl Display) -> Fail {
        Fail { code: 2, err: anyhow!("{e}") }
    }
}

impl From<anyhow::Error> for Fail {
    fn from(err: anyhow::Error) -> Fail {
        Fail { code: 1, err }
    }
}

impl From<SurfaceError> for Fail {
    fn from(e: SurfaceError) -> Fail {
        Fail::validation(e)
    }
}

impl From<QuiverError> for Fail {
    fn from(e: QuiverError) -> Fail {
        Fail::validation(e)
    }
}

impl From<CutError> for Fail {
    fn from(e: CutError) -> Fail {
        Fail::validation(e)
    }
}

impl From<QStabError> for Fail {
    fn from(e: QStabError) -> Fail {
        Fail::validation(e)
    }
}

impl From<HurwitzError> for Fail {
    fn from(e: HurwitzError) -> Fail {
        match e {
            HurwitzError::NotRegular { .. } | HurwitzError::Continuation(_) | HurwitzError::PolarType(_) => Fail::numeric(e),
            _ => Fail::validation(e),
        }
    }
}

impl From<FlatError> for Fail {
    fn from(e: FlatError) -> Fail {
        match e {
            FlatError::NonIntegerOrder(_) | FlatError::ZeroAtInfinity | FlatError::UnsupportedPole(_) | FlatError::Empty => Fail::validation(e),
            _ => Fail::numeric(e),
        }
    }
}

impl From<WindingError> for Fail {
    fn from(e: WindingError) -> Fail {
        match e {
            WindingError::NearSingularity(_) => Fail::numeric(e),
            _ => Fail::validation(e),
        }
    }
}

impl From<PeriodError> for Fail {
    fn from(e: PeriodError) -> Fail {
        match e {
            PeriodError::Branch(_) | PeriodError::Quadrature(_) => Fail::numeric(e),
            _ => Fail::validation(e),
        }
    }
}

/// Report plus the exit status it implies.
struct Outcome {
    report: Value,
    code: u8,
}

impl Outcome {
    fn ok(report: impl Serialize) -> Result<Outcome, Fail> {
        Outcome::with_code(report, 0)
    }

    fn with_code(report: impl Serialize, code: u8) -> Result<Outcome, Fail> {
        let report = serde_json::to_value(report).context("serializing report")?;
        Ok(Outcome { report, code })
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or_default();
        Fail::validation(format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column()))
    })
}

fn threads() -> usize {
    std::env::var("QDIFF_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

impl RunConfig {
    fn validate(&self) -> Result<(), Fail> {
        for (name, v) in [("--tol", self.tol), ("--capture", self.capture), ("--budget", self.budget)] {
            if !(v > 0.0) {
                return Err(Fail::validation(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn trace(&self) -> TraceOptions {
        TraceOptions {
            tol: self.tol,
            capture: self.capture,
            budget: self.budget,
            threads: threads(),
            ..TraceOptions::default()
        }
    }
}

fn load_arcs(path: &Path) -> Result<ArcSystem, Fail> {
    let file: ArcSystemFile = read_json(path)?;
    Ok(ArcSystem::try_from(&file)?)
}

fn load_qdiff(path: &Path) -> Result<QDifferential, Fail> {
    let file: CoverFile = read_json(path)?;
    Ok(file.qdiff()?)
}

/// PathSums are keyed by words, which JSON objects cannot carry.
fn dump_dga(dga: &GinzburgDga) -> Value {
    let arrows: Vec<Value> = dga
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(i, a)| {
            json!({
                "name": a.name,
                "source": a.source,
                "target": a.target,
                "bidegree": a.bidegree,
                "degree": dga.degree(i),
                "kind": a.kind,
            })
        })
        .collect();
    let differential: Vec<Value> = dga
        .differential
        .iter()
        .enumerate()
        .map(|(i, p)| json!({"arrow": dga.quiver.arrows[i].name, "image": dga.render(p)}))
        .collect();
    let potential: Vec<Value> = dga
        .potential
        .terms
        .iter()
        .map(|(w, c)| json!([c, w.iter().map(|&x| &dga.quiver.arrows[x].name).collect::<Vec<_>>()]))
        .collect();
    json!({
        "vertices": dga.quiver.n_vertices,
        "arrows": arrows,
        "potential": potential,
        "differential": differential,
        "grading": dga.grading,
        "truncation_length": dga.truncation_length,
    })
}

fn surface(op: SurfaceOp) -> Result<Outcome, Fail> {
    match op {
        SurfaceOp::Check { file } => {
            let sys = load_arcs(&file)?;
            let violations = sys.self_check();
            let data = if violations.is_empty() { sys.numerical_data().ok() } else { None };
            let valid = violations.is_empty() && data.is_some();
            Outcome::with_code(json!({"valid": valid, "violations": violations, "data": data}), if valid { 0 } else { 1 })
        }
        SurfaceOp::Data { file } => {
            let data = load_arcs(&file)?.numerical_data()?;
            Outcome::ok(json!({
                "genus": data.genus,
                "boundary_orders": data.boundary_orders,
                "boundary_indices": data.boundary_indices,
                "b": data.b(),
                "aleph": data.aleph(),
                "hat_rank": data.hat_rank(),
            }))
        }
    }
}

fn quiver(op: QuiverOp) -> Result<Outcome, Fail> {
    match op {
        QuiverOp::Build { file, truncation } => {
            let dga = dga_from_arcs(&load_arcs(&file)?, truncation)?;
            Outcome::ok(dump_dga(&dga))
        }
        QuiverOp::Verify { file, truncation } => {
            let dga = dga_from_arcs(&load_arcs(&file)?, truncation)?;
            let residues: Vec<Value> = dga
                .verify_d_squared()?
                .iter()
                .map(|(x, p)| json!({"arrow": dga.quiver.arrows[*x].name, "d_squared": dga.render(p)}))
                .collect();
            let code = if residues.is_empty() { 0 } else { 1 };
            Outcome::with_code(json!({"truncation_length": truncation, "residues": residues}), code)
        }
        QuiverOp::Reduce { file, n, truncation } => {
            let dga = dga_from_arcs(&load_arcs(&file)?, truncation)?;
            Outcome::ok(dump_dga(&n_reduce(&dga, n)?))
        }
    }
}

fn hurwitz_cmd(op: HurwitzOp) -> Result<Outcome, Fail> {
    match op {
        HurwitzOp::Check { cover } => {
            let q = load_qdiff(&cover)?;
            let k = q.cover.k_vector();
            let zeros = hurwitz::zero_count_check(&q)?;
            let code = if zeros.ok { 0 } else { 2 };
            Outcome::with_code(
                json!({
                    "k": k,
                    "hurwitz_dimension": hurwitz::hurwitz_dimension(0, &k),
                    "type_a": q.cover.is_type_a(),
                    "singularities": q.singularities,
                    "zero_count": zeros,
                }),
                code,
            )
        }
        HurwitzOp::Recover { cover } => {
            let file: CoverFile = read_json(&cover)?;
            let q = file.qdiff()?;
            let rec = hurwitz::recover_cover(|z| q.coefficient(z), &q.cover.poles, &q.l, q.s, file.base)?;
            // recovery is exact up to the cyclic action on the leading coefficient
            let n = q.cover.num.degree() as i64;
            let residual = (0..n.max(1))
                .filter_map(|m| {
                    let moved = hurwitz::cyclic_action(&q.cover, m).ok()?;
                    (moved.num.coef.len() == rec.cover.num.coef.len()).then(|| {
                        moved
                            .num
                            .coef
                            .iter()
                            .zip(&rec.cover.num.coef)
                            .map(|(a, b)| (a - b).norm())
                            .fold(0.0, f64::max)
                    })
                })
                .fold(f64::INFINITY, f64::min);
            let mut out = file.clone();
            out.num = rec.cover.num.coef.clone();
            out.den = rec.cover.den.coef.clone();
            out.base = None;
            let code = if residual <= 1e-8 { 0 } else { 2 };
            Outcome::with_code(
                json!({
                    "recovered": out,
                    "phase_power": rec.phase_power,
                    "normalization_residual": rec.normalization_residual,
                    "coefficient_residual": residual,
                }),
                code,
            )
        }
    }
}

fn foliate(cover: &Path, phase: f64, svg_out: Option<&Path>, run: &RunConfig) -> Result<Outcome, Fail> {
    let q = load_qdiff(cover)?;
    let pd = PlainDifferential::from_qdiff(&q)?;
    let opts = run.trace();
    let dec = strip_decomposition(&pd, phase, opts)?;
    let heart = if dec.saddle_free { Some(qstab::from_strips(&dec)?) } else { None };
    if let Some(path) = svg_out {
        let fol = Foliation::new(&pd, opts);
        let doc = svg::render(&pd, &fol, &dec, run.budget.min(20.0));
        std::fs::write(path, doc).with_context(|| format!("writing {}", path.display()))?;
    }
    Outcome::ok(json!({
        "phase": phase,
        "zeros": pd.zeros(),
        "poles": pd.poles(),
        "decomposition": dec,
        "heart": heart,
    }))
}

fn wind(cover: &Path, circle: (f64, f64, f64), samples: usize) -> Result<Outcome, Fail> {
    if !(circle.2 > 0.0) || samples < 16 {
        return Err(Fail::validation("the loop needs a positive radius and at least 16 samples"));
    }
    let q = load_qdiff(cover)?;
    let lp = LoopSpec::Circle {
        center: C64::new(circle.0, circle.1),
        radius: circle.2,
        samples,
    };
    let f = Coefficient::of(&q);
    let angle = angle_change(&f, &lp)?;
    let winding = winding_number(&f, &lp)?;
    Outcome::ok(json!({"loop": lp, "angle_change": angle, "winding": winding}))
}

fn periods_cmd(cover: &Path, paths: Option<&Path>) -> Result<Outcome, Fail> {
    let q = load_qdiff(cover)?;
    let paths: Vec<SheetPath> = match paths {
        Some(p) => read_json(p)?,
        None => corpus::sheet_paths(&q),
    };
    let values = paths.iter().map(|p| periods::period(&q, p)).collect::<Result<Vec<_>, _>>()?;
    Outcome::ok(json!({
        "periods": PeriodVector {
            labels: (0..paths.len()).map(|i| format!("path-{i}")).collect(),
            values,
            s: q.s,
        },
        "paths": paths,
    }))
}

fn cut(graph: &Path) -> Result<Outcome, Fail> {
    let g: CutGraph = read_json(graph)?;
    let out = find_matching(&g)?;
    Outcome::ok(out)
}

fn induce(stab: &Path, s: C64, mode: ModeArg, window: (i64, i64)) -> Result<Outcome, Fail> {
    let d: StabilityDatum = read_json(stab)?;
    let mode = match mode {
        ModeArg::Open => Mode::Open,
        ModeArg::Closed => Mode::Closed,
    };
    let q = qstab::induce(&d, s, mode, window)?;
    let gap = q.block_gap();
    let bound = q.minimal_xhom_bound();
    Outcome::ok(json!({"datum": q, "block_gap": gap, "minimal_xhom_bound": bound}))
}

fn corpus_cmd(suite: &str, run: &RunConfig) -> Result<Outcome, Fail> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Fail::validation(format!("unknown suite {suite:?}; expected one of {} or all", SUITES.join(", "))));
    };
    let cfg = SuiteConfig {
        seed: run.seed,
        threads: threads(),
        trace: run.trace(),
    };
    let reports: Vec<_> = names.iter().filter_map(|n| suites::run(n, &cfg)).collect();
    for r in &reports {
        eprintln!("{:>2} {:<13} {} {}", r.id, r.name, if r.pass { "PASS" } else { "FAIL" }, r.summary);
        for row in r.failures().take(5) {
            eprintln!("     {}: value {} expected {} residual {:.3e}", row.case, row.value, row.expected, row.residual);
        }
    }
    let code = if reports.iter().all(|r| r.pass) { 0 } else { 2 };
    Outcome::with_code(reports, code)
}

fn dispatch(cli: Cli) -> Result<Outcome, Fail> {
    cli.run.validate()?;
    match cli.cmd {
        Cmd::Surface { op } => surface(op),
        Cmd::Quiver { op } => quiver(op),
        Cmd::Hurwitz { op } => hurwitz_cmd(op),
        Cmd::Foliate { cover, phase, svg } => foliate(&cover, phase, svg.as_deref(), &cli.run),
        Cmd::Wind { cover, circle, samples } => wind(&cover, circle, samples),
        Cmd::Periods { cover, paths } => periods_cmd(&cover, paths.as_deref()),
        Cmd::Cut { graph } => cut(&graph),
        Cmd::Induce { stab, s, mode, window } => induce(&stab, s, mode, window),
        Cmd::Corpus { suite } => corpus_cmd(&suite, &cli.run),
    }
}

fn emit(report: &Value, json_path: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match json_path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let json_path = cli.run.json.clone();
    match dispatch(cli) {
        Ok(out) => match emit(&out.report, json_path.as_deref()) {
            Ok(()) => ExitCode::from(out.code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
