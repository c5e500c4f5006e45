use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use trasdim::borst::{ord_truncated_a, SetSystem, TruncatedA};
use trasdim::covers::{build_lomega_cover, build_zn_cover, validate_cover, ColoredCover};
use trasdim::solver::{
    decide_cached, decide_cover, min_diameter_by, DecisionInstance, ResultCache, SearchMode,
    SolverConfig, Verdict, CACHE_ENV, DEFAULT_NODE_BUDGET,
};
use trasdim::spaces::{Window, WindowSpec};
use trasdim::verify::{run_suite, Suite, VerifyOptions};
use trasdim::Error;

const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "trasdim", version, about = "Colored-cover decisions and set-system ranks on integer windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one instance; exit 0 SAT, 1 UNSAT, 2 UNKNOWN.
    Decide(DecideArgs),
    /// Minimum diameter per window side, as CSV or JSON rows.
    Scan(ScanArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Build and validate a constructive cover.
    Build(BuildArgs),
    /// Rank of an explicit set system or of a solver-backed truncation.
    Ord(OrdArgs),
    /// Window utilities.
    Window {
        #[command(subcommand)]
        command: WindowCommand,
    },
}

#[derive(Subcommand)]
enum WindowCommand {
    /// Print the points (or the distance matrix) of a window.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Zn,
    Kzn,
    Lomega,
    Linf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, value_enum)]
    space: Option<Space>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    scale: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    side: Option<i64>,
    #[arg(long)]
    level_cap: Option<usize>,
    /// JSON file holding a window spec or an explicit point list.
    #[arg(long, conflicts_with = "space")]
    window: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET, value_parser = parse_budget)]
    budget: u64,
    /// Return any valid witness instead of the lexicographically first.
    #[arg(long)]
    fast: bool,
    #[arg(long, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<u64>,
    #[arg(long)]
    diam: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    window: WindowArgs,
    /// Inclusive side range `a..b`.
    #[arg(long)]
    sides: String,
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<u64>,
    /// Largest diameter tried; defaults to the window diameter.
    #[arg(long)]
    diam_cap: Option<u64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    diam_cap: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET, value_parser = parse_budget)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    window: WindowArgs,
    /// Lattice windows: one radius `r` (or `n+1` equal copies). Tower
    /// windows: `τ` followed by `n`.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrdArgs {
    /// JSON file with an explicit set system.
    #[arg(long, conflicts_with_all = ["space", "window", "diam", "r_max"])]
    system: Option<PathBuf>,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    diam: Option<u64>,
    #[arg(long)]
    r_max: Option<u32>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// CSV distance matrix instead of the point list.
    #[arg(long)]
    distances: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_budget(s: &str) -> Result<u64, String> {
    let v: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if v < 10_000 {
        return Err("node budget must be at least 10000".into());
    }
    Ok(v)
}

enum Fail {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::Io(_) | Error::Cache(_) | Error::BudgetExhausted { .. } => {
                Fail::Runtime(e.to_string())
            }
            _ => Fail::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Fail {
        Fail::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, Fail>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Decide(a) => decide(a),
        Command::Scan(a) => scan(a),
        Command::Verify(a) => verify(a),
        Command::Build(a) => build(a),
        Command::Ord(a) => ord(a),
        Command::Window {
            command: WindowCommand::Export(a),
        } => export(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Fail::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SOFTWARE)
        }
    }
}

impl WindowArgs {
    fn spec(&self, side: Option<i64>) -> CliResult<WindowSpec> {
        let space = self
            .space
            .ok_or_else(|| Fail::Usage("--space or --window is required".into()))?;
        let side = side
            .or(self.side)
            .ok_or_else(|| Fail::Usage("--side is required".into()))?;
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Fail::Usage(format!("--{flag} is required for this space")))
        };
        Ok(match space {
            Space::Zn => WindowSpec::Zn {
                dims: need(self.dims, "dims")?,
                side,
            },
            Space::Kzn => WindowSpec::Kzn {
                dims: need(self.dims, "dims")?,
                scale: self
                    .scale
                    .ok_or_else(|| Fail::Usage("--scale is required for kzn".into()))?,
                side,
            },
            Space::Lomega => WindowSpec::Lomega {
                side,
                level_cap: need(self.level_cap, "level-cap")?,
            },
            Space::Linf => WindowSpec::Linf {
                side,
                level_cap: need(self.level_cap, "level-cap")?,
            },
        })
    }

    fn load(&self) -> CliResult<Window> {
        match &self.window {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
                Ok(Window::from_json(&value)?)
            }
            None => Ok(Window::from_spec(&self.spec(None)?)?),
        }
    }
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            mode: if self.fast {
                SearchMode::Fast
            } else {
                SearchMode::Canonical
            },
            node_budget: self.budget,
        }
    }

    fn cache(&self) -> CliResult<Option<ResultCache>> {
        match &self.cache_dir {
            Some(dir) => Ok(Some(ResultCache::open(dir)?)),
            None => Ok(None),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json(value: &impl Serialize) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Fail::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn decide(a: DecideArgs) -> CliResult<u8> {
    let window = a.window.load()?;
    let inst = DecisionInstance::new(window, a.radii, a.diam)?;
    let cfg = a.solver.config();
    let mut cache = a.solver.cache()?;
    let cert = decide_cached(&inst, &cfg, cache.as_mut())?;
    if let Verdict::Sat { witness } = &cert.verdict {
        if !validate_cover(witness, &inst.window, inst.diameter).accepted() {
            return Err(Fail::Runtime("witness failed validation".into()));
        }
    }
    emit(a.out.as_deref(), &to_json(&cert)?)?;
    Ok(match cert.verdict {
        Verdict::Sat { .. } => 0,
        Verdict::Unsat => 1,
        Verdict::Unknown => 2,
    })
}

fn parse_range(s: &str) -> CliResult<(i64, i64)> {
    let bad = || Fail::Usage(format!("side range {s:?} is not of the form a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b || a < 0 {
        return Err(Fail::Usage(format!("side range {s:?} is empty")));
    }
    Ok((a, b))
}

#[derive(Serialize)]
struct ScanRow {
    side: i64,
    radii: Vec<u64>,
    /// `SAT`, `UNSAT` (nothing up to the cap) or `UNKNOWN`.
    status: &'static str,
    min_diameter: Option<u64>,
    diam_cap: u64,
    nodes: u64,
    /// Diameter of a constructive cover, when one applies.
    upper_bound: Option<u64>,
}

impl ScanRow {
    fn csv(&self) -> String {
        let radii: Vec<String> = self.radii.iter().map(|r| r.to_string()).collect();
        let value = match (self.status, self.min_diameter) {
            ("SAT", Some(d)) => d.to_string(),
            ("UNSAT", _) => format!("UNSAT-at-{}", self.diam_cap),
            _ => "UNKNOWN".into(),
        };
        let bound = self.upper_bound.map(|b| b.to_string()).unwrap_or_default();
        format!("{},{},{},{},{}", self.side, radii.join(" "), value, self.nodes, bound)
    }
}

/// Diameter of the matching constructive cover, validated, if the radii
/// have the shape it needs.
fn constructive_bound(window: &Window, radii: &[u64]) -> Option<u64> {
    let cover = constructive_cover(window, radii).ok()?;
    let d = cover.max_diameter(window);
    validate_cover(&cover, window, d).accepted().then_some(d)
}

fn constructive_cover(window: &Window, radii: &[u64]) -> CliResult<ColoredCover> {
    let spec = window
        .spec()
        .ok_or_else(|| Fail::Usage("constructive covers need a window spec".into()))?;
    match *spec {
        WindowSpec::Zn { dims, .. } | WindowSpec::Kzn { dims, .. } => {
            let r = radii[0];
            if radii.len() != 1 && (radii.len() != dims + 1 || radii.iter().any(|&x| x != r)) {
                return Err(Fail::Usage(format!(
                    "lattice covers take one radius or {} equal radii",
                    dims + 1
                )));
            }
            Ok(build_zn_cover(dims, r, window)?)
        }
        WindowSpec::Lomega { .. } => {
            let n = radii.len() - 1;
            if n == 0 || radii[n] != n as u64 {
                return Err(Fail::Usage(
                    "tower covers take radii tau followed by n = |tau|".into(),
                ));
            }
            Ok(build_lomega_cover(&radii[..n], n, window)?.cover)
        }
        WindowSpec::Linf { .. } => Err(Fail::Usage("no constructive cover for linf windows".into())),
    }
}

fn scan(a: ScanArgs) -> CliResult<u8> {
    let (lo, hi) = parse_range(&a.sides)?;
    if a.window.window.is_some() {
        return Err(Fail::Usage("scan needs --space; a window file has no side".into()));
    }
    let specs: Vec<WindowSpec> = (lo..=hi)
        .map(|s| a.window.spec(Some(s)))
        .collect::<CliResult<_>>()?;
    let windows: Vec<Window> = specs
        .iter()
        .map(Window::from_spec)
        .collect::<Result<_, _>>()?;
    DecisionInstance::new(windows[0].clone(), a.radii.clone(), 0)?;
    let cfg = a.solver.config();
    let cache = a.solver.cache()?.map(Mutex::new);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Fail::Runtime(e.to_string()))?;

    let row = |window: &Window| -> CliResult<ScanRow> {
        let all: Vec<usize> = (0..window.len()).collect();
        let cap = a.diam_cap.unwrap_or_else(|| window.diameter(&all));
        let side = window.spec().map(|s| s.side()).unwrap_or_default();
        let result = min_diameter_by(cap, cfg.node_budget, |d| {
            let inst = DecisionInstance::new(window.clone(), a.radii.clone(), d)?;
            let hash = inst.hash();
            if let Some(c) = &cache {
                let guard = c.lock().expect("cache lock");
                if let Some(hit) = guard.get(&hash, cfg.mode) {
                    return Ok(hit.clone());
                }
            }
            let cert = decide_cover(&inst, &cfg);
            if let Some(c) = &cache {
                if !matches!(cert.verdict, Verdict::Unknown) {
                    c.lock().expect("cache lock").put(&cert)?;
                }
            }
            Ok(cert)
        });
        let upper_bound = constructive_bound(window, &a.radii);
        let mut row = ScanRow {
            side,
            radii: a.radii.clone(),
            status: "UNKNOWN",
            min_diameter: None,
            diam_cap: cap,
            nodes: 0,
            upper_bound,
        };
        match result {
            Ok(md) => {
                row.nodes = md.nodes;
                if let (Some(d), Some(w)) = (md.diameter, &md.witness) {
                    if !validate_cover(w, window, d).accepted() {
                        return Err(Fail::Runtime(format!("side {side}: witness failed validation")));
                    }
                    row.status = "SAT";
                    row.min_diameter = Some(d);
                } else {
                    row.status = "UNSAT";
                }
            }
            Err(Error::BudgetExhausted { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        Ok(row)
    };
    let rows: Vec<ScanRow> = pool
        .install(|| windows.par_iter().map(row).collect::<Vec<_>>())
        .into_iter()
        .collect::<CliResult<_>>()?;

    let text = match a.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut s = String::from("side,radii,min_diameter,nodes,upper_bound\n");
            for r in &rows {
                s.push_str(&r.csv());
                s.push('\n');
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyDoc {
    passed: bool,
    options: VerifyOptions,
    suites: Vec<trasdim::verify::SuiteReport>,
}

fn verify(a: VerifyArgs) -> CliResult<u8> {
    let suite: Suite = a.suite.parse()?;
    let options = VerifyOptions {
        trials: a.trials,
        seed: a.seed,
        k: a.k,
        dims: a.dims,
        diam_cap: a.diam_cap,
        node_budget: a.budget,
    };
    let suites = run_suite(suite, &options);
    let passed = suites.iter().all(|s| s.passed);
    for s in &suites {
        for c in &s.checks {
            log::info!(
                "{}/{}: {} ({}/{})",
                s.suite,
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.trials - c.failures,
                c.trials
            );
        }
    }
    let doc = VerifyDoc {
        passed,
        options,
        suites,
    };
    emit(a.out.as_deref(), &to_json(&doc)?)?;
    Ok(if passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct BuildDoc {
    accepted: bool,
    diameter: u64,
    report: trasdim::covers::CoverReport,
    cover: ColoredCover,
}

fn build(a: BuildArgs) -> CliResult<u8> {
    let window = a.window.load()?;
    if a.radii.is_empty() {
        return Err(Fail::Usage("--radii is required".into()));
    }
    let cover = constructive_cover(&window, &a.radii)?;
    let diameter = cover.max_diameter(&window);
    let report = validate_cover(&cover, &window, diameter);
    let doc = BuildDoc {
        accepted: report.accepted(),
        diameter,
        report,
        cover,
    };
    emit(a.out.as_deref(), &to_json(&doc)?)?;
    Ok(if doc.accepted { 0 } else { 1 })
}

#[derive(Serialize)]
struct OrdDoc {
    ord: String,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<trasdim::borst::TruncatedOrd>,
}

fn ord(a: OrdArgs) -> CliResult<u8> {
    let doc = if let Some(path) = &a.system {
        let text = fs::read_to_string(path)
            .map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        let sys: SetSystem = serde_json::from_str(&text)
            .map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        OrdDoc {
            ord: sys.ord().to_string(),
            exact: true,
            truncated: None,
        }
    } else {
        let window = match &a.window.window {
            Some(_) => return Err(Fail::Usage("ord needs --space; window files are not supported".into())),
            None => a.window.spec(None)?,
        };
        let spec = TruncatedA {
            window,
            diameter: a
                .diam
                .ok_or_else(|| Fail::Usage("--diam is required".into()))?,
            r_max: a
                .r_max
                .ok_or_else(|| Fail::Usage("--r-max is required".into()))?,
        };
        let mut cache = a.solver.cache()?;
        let t = ord_truncated_a(&spec, a.solver.budget, cache.as_mut())?;
        OrdDoc {
            ord: t.ord.to_string(),
            exact: t.ord.is_exact(),
            truncated: Some(t),
        }
    };
    emit(a.out.as_deref(), &to_json(&doc)?)?;
    Ok(if doc.exact { 0 } else { 2 })
}

fn export(a: ExportArgs) -> CliResult<u8> {
    let window = a.window.load()?;
    let text = match (a.format, a.distances) {
        (_, true) => window.distance_matrix_csv(),
        (Format::Csv, false) => window.points_csv(),
        (Format::Json, false) => to_json(&window.to_doc())?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}
