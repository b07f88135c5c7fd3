//! Command-line front end.
//!
//! `generate` writes a design as CSV plus a JSON sidecar, `evaluate` writes a
//! metrics report, `compare` tabulates the minimax distance of several
//! methods, and `plot` renders a 2-d design as SVG with its minimax witness.
//!
//! Exit codes: 0 on success, 2 for bad input, 3 when a numerical routine
//! fails.

mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;
use serde_json::{json, Value};

use crate::baselines::{fff_ward, greedy_cover, lloyd, COVER_BUDGET, WARD_BUDGET};
use crate::cqcenter::AgdConfig;
use crate::error::{Error, Result};
use crate::lds::{CandidateSet, RngSeed};
use crate::maxpro::{minimaxpro, MaxProConfig};
use crate::metrics::{evaluate, minimax_criterion};
use crate::mmc::{mmc, Design};
use crate::par;
use crate::points::PointSet;
use crate::pso::{initial_swarm, mmc_pso_on, PsoConfig};
use crate::region::{Polygon, Region};

pub use svg::render_svg;

/// Generation candidate count used when `--N` is not given.
pub const DEFAULT_CANDIDATES: usize = 10_000;
/// Evaluation candidate count used when `--eval-N` is not given.
pub const DEFAULT_EVAL_CANDIDATES: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "minimax", version, about = "Minimax space-filling designs")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, env = "MINIMAX_WORKERS", global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a design.
    Generate(GenerateArgs),
    /// Evaluate a design file.
    Evaluate(EvaluateArgs),
    /// Tabulate the minimax distance of several methods and design sizes.
    Compare(CompareArgs),
    /// Render a 2-d design as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Minimax clustering alone.
    Mmc,
    /// Minimax clustering with particle swarm optimization.
    MmcPso,
    /// mmc-pso followed by MaxPro refinement.
    Minimaxpro,
    /// Principal points (k-means).
    Lloyd,
    /// Ward hierarchical clustering centroids.
    Fff,
    /// Greedy set cover.
    BipApprox,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Mmc => "mmc",
            Method::MmcPso => "mmc-pso",
            Method::Minimaxpro => "minimaxpro",
            Method::Lloyd => "lloyd",
            Method::Fff => "fff",
            Method::BipApprox => "bip-approx",
        }
    }
}

#[derive(Clone, Debug, Args)]
struct RegionArgs {
    /// hypercube, simplex, ball, or polygon:<file>.
    #[arg(long, default_value = "hypercube")]
    region: String,
    /// Dimension (polygons are always 2-d).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Clone, Debug, Args)]
struct MethodArgs {
    /// Generation candidate count.
    #[arg(long = "N", default_value_t = DEFAULT_CANDIDATES)]
    candidates: usize,
    #[arg(long, default_value_t = 10.0)]
    q: f64,
    #[arg(long, default_value_t = 10)]
    swarm: usize,
    #[arg(long, default_value_t = 500)]
    t_mmc: usize,
    #[arg(long, default_value_t = 250)]
    t_pp: usize,
    #[arg(long, default_value_t = 1e-4)]
    eps_in: f64,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Method::MmcPso)]
    method: Method,
    #[command(flatten)]
    params: MethodArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Design CSV; the sidecar goes next to it with a .json extension.
    /// Without it the CSV is written to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Design CSV.
    design: PathBuf,
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long = "eval-N", default_value_t = DEFAULT_EVAL_CANDIDATES)]
    eval_candidates: usize,
    /// Projection dimensions, e.g. 1,2.
    #[arg(long, value_delimiter = ',')]
    proj_dims: Vec<usize>,
    /// Seeds the evaluation candidates of polygon regions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    methods: Vec<Method>,
    /// Design sizes, e.g. 20,40,60.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// One row per seed; required so tables can be reproduced.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    #[command(flatten)]
    params: MethodArgs,
    #[arg(long = "eval-N", default_value_t = DEFAULT_EVAL_CANDIDATES)]
    eval_candidates: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Design CSV.
    design: PathBuf,
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long = "eval-N", default_value_t = DEFAULT_EVAL_CANDIDATES)]
    eval_candidates: usize,
    /// Plot the projection onto two coordinates (1-based), e.g. 1,3.
    #[arg(long, value_delimiter = ',')]
    coords: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `hypercube`, `simplex`, `ball` or `polygon:<file>`.
pub fn parse_region(spec: &str, dim: Option<usize>) -> Result<Region> {
    if let Some(path) = spec.strip_prefix("polygon:") {
        if let Some(d) = dim.filter(|&d| d != 2) {
            return Err(Error::InvalidRegion(format!("polygons are 2-dimensional, got --dim {d}")));
        }
        return Ok(Region::Polygon(Polygon::from_file(path)?));
    }
    let p = dim.unwrap_or(2);
    match spec {
        "hypercube" => Region::hypercube(p),
        "simplex" => Region::simplex(p),
        "ball" => Region::ball(p),
        other => Err(Error::InvalidRegion(format!(
            "unknown region '{other}' (expected hypercube, simplex, ball or polygon:<file>)"
        ))),
    }
}

/// Everything needed to generate one design.
#[derive(Clone, Debug, Serialize)]
pub struct GenerateSpec {
    #[serde(skip)]
    pub region: Region,
    pub method: Method,
    pub n: usize,
    pub candidates: usize,
    pub seed: RngSeed,
    pub q: f64,
    pub swarm: usize,
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub t_mmc: usize,
    pub t_pp: usize,
    pub eps_in: f64,
}

impl GenerateSpec {
    /// Module defaults for `method` on `region`.
    pub fn new(region: Region, method: Method, n: usize, seed: u64) -> Self {
        let pso = PsoConfig::default();
        let agd = AgdConfig::default();
        Self {
            region,
            method,
            n,
            candidates: DEFAULT_CANDIDATES,
            seed: RngSeed(seed),
            q: agd.q,
            swarm: pso.swarm,
            w: pso.w,
            c1: pso.c1,
            c2: pso.c2,
            t_mmc: pso.t_mmc,
            t_pp: pso.t_pp,
            eps_in: agd.eps_in,
        }
    }

    fn with_params(mut self, a: &MethodArgs) -> Self {
        self.candidates = a.candidates;
        self.q = a.q;
        self.swarm = a.swarm;
        self.t_mmc = a.t_mmc;
        self.t_pp = a.t_pp;
        self.eps_in = a.eps_in;
        self
    }

    pub fn agd(&self) -> AgdConfig {
        AgdConfig { q: self.q, eps_in: self.eps_in, ..AgdConfig::default() }
    }

    pub fn pso(&self) -> PsoConfig {
        PsoConfig {
            swarm: self.swarm,
            w: self.w,
            c1: self.c1,
            c2: self.c2,
            t_mmc: self.t_mmc,
            t_pp: self.t_pp,
            seed: self.seed,
            agd: self.agd(),
            parallel_particles: false,
        }
    }
}

/// A generated design with a summary of how it was obtained.
#[derive(Clone, Debug)]
pub struct Generated {
    pub design: Design,
    /// The candidate set the method worked on.
    pub candidates: CandidateSet,
    /// Method-specific trace summary.
    pub summary: Value,
}

/// Runs one method.
pub fn generate(spec: &GenerateSpec) -> Result<Generated> {
    let count = match spec.method {
        Method::Fff => spec.candidates.min(WARD_BUDGET),
        Method::BipApprox => spec.candidates.min(COVER_BUDGET),
        _ => spec.candidates,
    };
    if spec.n == 0 || spec.n > count {
        return Err(Error::InvalidConfig(format!("--n must be in 1..={count}, got {}", spec.n)));
    }
    let cands = CandidateSet::generate(&spec.region, count, spec.seed)?;
    let init = || -> Result<Design> {
        let cfg = PsoConfig { swarm: 1, ..spec.pso() };
        Design::new(initial_swarm(&cands, spec.n, &cfg)?.remove(0))
    };
    let (design, summary) = match spec.method {
        Method::Mmc => {
            let run = mmc(&cands, &init()?, &spec.agd(), spec.t_mmc)?;
            let s = trace_summary("h_q", &run.trace, run.iterations, Some(run.converged));
            (run.design, s)
        }
        Method::Lloyd => {
            let run = lloyd(&cands, &init()?, spec.t_mmc, spec.eps_in)?;
            let s = trace_summary("mse", &run.trace, run.iterations, Some(run.converged));
            (run.design, s)
        }
        Method::MmcPso | Method::Minimaxpro => {
            let run = mmc_pso_on(&cands, spec.n, &spec.pso())?;
            let mut s = json!({
                "clustering": trace_summary("h_q", &run.hq_trace, spec.t_mmc, None),
                "post_processing": trace_summary("h", &run.h_trace, spec.t_pp, None),
            });
            let mut design = run.design;
            if spec.method == Method::Minimaxpro {
                let cfg = MaxProConfig { eps: spec.eps_in, seed: spec.seed, ..MaxProConfig::default() };
                let refined = minimaxpro(&design, &cands, &cfg)?;
                s["minimaxpro"] = json!({
                    "pre_minimax": refined.pre_minimax,
                    "post_minimax": refined.post_minimax,
                    "eps_prop": refined.eps_prop,
                    "sweeps": refined.sweeps,
                    "log_maxpro_initial": refined.log_criterion[0],
                    "log_maxpro_final": refined.log_criterion[refined.log_criterion.len() - 1],
                });
                design = refined.design;
            }
            (design, s)
        }
        Method::Fff => {
            let run = fff_ward(&cands, spec.n)?;
            let top = run.heights.len().saturating_sub(spec.n);
            (run.design, json!({ "merges": top, "last_merge_height": run.heights[..top].last() }))
        }
        Method::BipApprox => {
            let run = greedy_cover(&cands, spec.n)?;
            (run.design, json!({ "radius": run.radius, "cover_size": run.cover_size }))
        }
    };
    Ok(Generated { design, candidates: cands, summary })
}

fn trace_summary(name: &str, trace: &[f64], iterations: usize, converged: Option<bool>) -> Value {
    let mut v = json!({
        "objective": name,
        "initial": trace.first(),
        "final": trace.last(),
        "iterations": iterations,
    });
    if let Some(c) = converged {
        v["converged"] = json!(c);
    }
    v
}

/// Design CSV: header `x1,...,xp`, one point per row, 17 significant digits.
pub fn design_csv(points: &PointSet) -> String {
    let p = points.dim();
    let mut s = (1..=p).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for r in points.rows() {
        for (k, v) in r.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            write!(s, "{v:.16e}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Parses a design CSV; errors name the offending line.
pub fn parse_design_csv(text: &str, source: &str) -> Result<PointSet> {
    let err = |line: usize, msg: String| Error::Parse { path: source.to_string(), line, msg };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty design file".into()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    for (k, name) in names.iter().enumerate() {
        if *name != format!("x{}", k + 1) {
            return Err(err(hl + 1, format!("expected header x1,...,xp, found '{header}'")));
        }
    }
    let p = names.len();
    let mut data = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != p {
            return Err(err(i + 1, format!("expected {p} values, found {}", fields.len())));
        }
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| err(i + 1, format!("'{}' is not a number", f.trim())))?;
            if !v.is_finite() {
                return Err(err(i + 1, format!("'{}' is not finite", f.trim())));
            }
            data.push(v);
        }
    }
    if data.is_empty() {
        return Err(err(hl + 1, "design has no points".into()));
    }
    PointSet::new(p, data)
}

fn read_design(path: &Path, region: &Region) -> Result<Design> {
    let text = std::fs::read_to_string(path)?;
    let pts = parse_design_csv(&text, &path.display().to_string())?;
    if pts.dim() != region.dim() {
        return Err(Error::DimensionMismatch { expected: region.dim(), got: pts.dim() });
    }
    Design::new(pts)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let region = parse_region(&a.region.region, a.region.dim)?;
    let spec = GenerateSpec::new(region.clone(), a.method, a.n, a.seed).with_params(&a.params);
    let start = Instant::now();
    let g = generate(&spec)?;
    let runtime = start.elapsed().as_secs_f64();
    let (h, _) = minimax_criterion(&g.design, &g.candidates)?;
    info!("{}: n = {}, minimax over {} candidates = {h:.6}", a.method.label(), a.n, g.candidates.len());
    emit(a.out.as_deref(), &design_csv(g.design.points()))?;
    if let Some(out) = &a.out {
        let sidecar = json!({
            "method": a.method.label(),
            "region": region.to_string(),
            "dim": region.dim(),
            "config": spec,
            "seed": a.seed,
            "runtime_secs": runtime,
            "candidates_used": g.candidates.len(),
            "minimax": h,
            "summary": g.summary,
        });
        std::fs::write(out.with_extension("json"), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    }
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let region = parse_region(&a.region.region, a.region.dim)?;
    let design = read_design(&a.design, &region)?;
    let cands = CandidateSet::generate(&region, a.eval_candidates, RngSeed(a.seed))?;
    let report = evaluate(&design, &cands, &a.proj_dims)?;
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))
}

/// One row of a comparison table.
#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub method: Method,
    pub n: usize,
    pub seed: u64,
    pub minimax: f64,
    pub runtime_secs: f64,
}

/// Generates every (method, n, seed) design and measures its minimax
/// distance on `eval` candidates.
pub fn compare(
    region: &Region,
    methods: &[Method],
    sizes: &[usize],
    seeds: &[u64],
    params: impl Fn(GenerateSpec) -> GenerateSpec,
    eval: &CandidateSet,
) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for &method in methods {
        for &n in sizes {
            for &seed in seeds {
                let spec = params(GenerateSpec::new(region.clone(), method, n, seed));
                let start = Instant::now();
                let g = generate(&spec)?;
                let runtime_secs = start.elapsed().as_secs_f64();
                let (minimax, _) = minimax_criterion(&g.design, eval)?;
                info!("{} n = {n} seed = {seed}: {minimax:.6} in {runtime_secs:.2}s", method.label());
                rows.push(CompareRow { method, n, seed, minimax, runtime_secs });
            }
        }
    }
    Ok(rows)
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from("method,n,seed,minimax,runtime_secs\n");
    for r in rows {
        writeln!(s, "{},{},{},{:.16e},{:.3}", r.method.label(), r.n, r.seed, r.minimax, r.runtime_secs).unwrap();
    }
    s
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let region = parse_region(&a.region.region, a.region.dim)?;
    let eval = CandidateSet::generate(&region, a.eval_candidates, RngSeed(0))?;
    let rows = compare(&region, &a.methods, &a.sizes, &a.seeds, |s| s.with_params(&a.params), &eval)?;
    emit(a.out.as_deref(), &compare_csv(&rows))
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let region = parse_region(&a.region.region, a.region.dim)?;
    let design = read_design(&a.design, &region)?;
    let cands = CandidateSet::generate(&region, a.eval_candidates, RngSeed(a.seed))?;
    let svg = match &a.coords {
        None if region.dim() != 2 => {
            return Err(Error::InvalidConfig(format!(
                "plot needs a 2-d design, got {} dimensions; pass --coords i,j to plot a projection",
                region.dim()
            )))
        }
        None => render_svg(&design, &cands, None)?,
        Some(c) => {
            if c.len() != 2 || c.iter().any(|&k| k == 0 || k > region.dim()) || c[0] == c[1] {
                return Err(Error::InvalidConfig(format!(
                    "--coords takes two distinct coordinates in 1..={}",
                    region.dim()
                )));
            }
            render_svg(&design, &cands, Some([c[0] - 1, c[1] - 1]))?
        }
    };
    emit(a.out.as_deref(), &svg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}

/// Entry point of the `minimax` binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let workers = match cli.workers {
        Some(0) => {
            eprintln!("error: --workers must be at least 1");
            return 2;
        }
        Some(w) => w,
        None => par::workers(),
    };
    match par::with_workers(workers, || run(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
