//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or IO error, 2 infeasible or flagged rows
//! present, 3 solver failure.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use selftest_core::bell::{local_bound, GeneralBellExpression};
use selftest_core::lp::F64_EPS;
use selftest_core::moment::{npa_upper_bound, MomentMatrixStructure, SequenceLevel};
use selftest_core::sdp::SdpSettings;
use selftest_core::seesaw::SeesawConfig;
use selftest_core::swap::{BellConstraintMode, FidelityProblem, SwapTarget};
use selftest_core::synth::{linspace, synthesize, synthesize_exact, SynthesisOptions, SynthesisResult};
use selftest_core::Error as CoreError;

use crate::json::{self, JsonError};
use crate::output::{self, OutputSet, RunManifest};
use crate::parallel;
use crate::sdpa::export_sdpa;
use crate::svg::LineChart;
use crate::values::{parse_grid, parse_value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => EXIT_SOLVER,
            _ => EXIT_USAGE,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Infeasible | CoreError::Unbounded | CoreError::Numerical(_) => CliError::Solver(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Core(c) => c.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult = Result<i32, CliError>;

/// A `start:stop:count` grid.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

fn value_arg(s: &str) -> Result<f64, String> {
    parse_value(s).map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "selftest", version, about = "Bell inequalities for multipartite qubit states and robust self-testing bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a W-state Bell inequality at one angle or over a grid
    Synth(SynthArgs),
    /// Exact local bounds of built-in or user inequalities
    Bounds(BoundsArgs),
    /// See-saw lower bound on the quantum value
    Seesaw(SeesawArgs),
    /// Moment-matrix upper bound on the quantum value
    Npa(NpaArgs),
    /// Minimal SWAP fidelity as a function of the observed Bell value
    Selftest(SelftestArgs),
    /// Re-run a manifest and compare output digests
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    /// Measurement angle, e.g. 0.09275644pi or pi/4
    #[arg(long, value_parser = value_arg, allow_hyphen_values = true, required_unless_present = "scan", conflicts_with = "scan")]
    pub phi: Option<f64>,
    /// Angle grid start:stop:count
    #[arg(long, value_parser = grid_arg)]
    pub scan: Option<Grid>,
    #[arg(long)]
    pub no_marginals: bool,
    /// Impose invariance under exchanging the two settings
    #[arg(long)]
    pub setting_symmetric: bool,
    /// Solve in exact arithmetic (only at phi = pi/4)
    #[arg(long, conflicts_with = "scan")]
    pub exact: bool,
    /// Also write an SVG line chart of a scan
    #[arg(long)]
    pub svg: bool,
    #[arg(long, default_value = "selftest-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    /// Built-in name or JSON file; every built-in when omitted
    #[arg(long)]
    pub ineq: Option<String>,
    #[arg(long, default_value = "selftest-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SeesawArgs {
    #[arg(long)]
    pub ineq: String,
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
    /// Base RNG seed; start k uses rng + k
    #[arg(long, default_value_t = 0)]
    pub rng: u64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub convergence_tol: f64,
    #[arg(long, default_value = "selftest-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolverArgs {
    /// Tolerance 1e-8 and a larger iteration budget
    #[arg(long)]
    pub high_accuracy: bool,
    /// Relative residual tolerance (overrides --high-accuracy)
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl SolverArgs {
    pub fn settings(&self) -> SdpSettings {
        let mut s = if self.high_accuracy { SdpSettings::high_accuracy() } else { SdpSettings::default() };
        if let Some(t) = self.tol {
            s.tol = t;
        }
        if let Some(m) = self.max_iters {
            s.max_iters = m;
        }
        s
    }
}

#[derive(Args, Debug, Serialize)]
pub struct NpaArgs {
    #[arg(long)]
    pub ineq: String,
    /// local2, local2plus or local2_4party
    #[arg(long)]
    pub level: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub allow_heavy: bool,
    #[arg(long, default_value = "selftest-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    /// B(Γ) = Q
    Equality,
    /// B(Γ) ≥ Q
    AtLeast,
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// W, W2, W3, GHZ3, GHZ4 or CL
    #[arg(long)]
    pub target: String,
    /// Replaces the target's own inequality
    #[arg(long)]
    pub ineq: Option<String>,
    /// Bell-value grid start:stop:count; defaults to 33 points from the
    /// local bound to the reference value
    #[arg(long, value_parser = grid_arg)]
    pub qgrid: Option<Grid>,
    /// local2, local2plus or local2_4party
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Equality)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write one sparse SDPA file per grid point into this directory
    #[arg(long)]
    #[serde(skip)]
    pub export_sdpa: Option<PathBuf>,
    /// Permit four-party targets (hours per point)
    #[arg(long)]
    pub allow_heavy: bool,
    #[arg(long)]
    pub svg: bool,
    #[arg(long, default_value = "selftest-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Where the re-run writes; the original outputs are left untouched
    #[arg(long, default_value = "selftest-replay")]
    pub out: PathBuf,
}

/// Parses `argv` (without the program name), runs, and returns the exit code.
pub fn main_with(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("selftest".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command, argv: &[String]) -> CliResult {
    let started = Instant::now();
    let manifest = |name: &str, params: Value, tolerances: Value, code: i32| RunManifest {
        command: name.to_string(),
        argv: argv.to_vec(),
        params,
        version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        exit_code: code,
        outputs: Vec::new(),
    };
    match command {
        Command::Synth(a) => {
            let mut out = OutputSet::new(&a.out)?;
            let code = cmd_synth(&a, &mut out)?;
            let tol = json!({ "lp_pivot_tol": F64_EPS, "exact": a.exact });
            out.finish(manifest("synth", to_value(&a), tol, code))?;
            Ok(code)
        }
        Command::Bounds(a) => {
            let mut out = OutputSet::new(&a.out)?;
            let code = cmd_bounds(&a, &mut out)?;
            out.finish(manifest("bounds", to_value(&a), json!({ "arithmetic": "exact" }), code))?;
            Ok(code)
        }
        Command::Seesaw(a) => {
            let mut out = OutputSet::new(&a.out)?;
            let code = cmd_seesaw(&a, &mut out)?;
            let tol = json!({ "convergence_tol": a.convergence_tol, "max_iters": a.max_iters });
            out.finish(manifest("seesaw", to_value(&a), tol, code))?;
            Ok(code)
        }
        Command::Npa(a) => {
            let mut out = OutputSet::new(&a.out)?;
            let code = cmd_npa(&a, &mut out)?;
            out.finish(manifest("npa", to_value(&a), settings_value(&a.solver.settings()), code))?;
            Ok(code)
        }
        Command::Selftest(a) => {
            let mut out = OutputSet::new(&a.out)?;
            let code = cmd_selftest(&a, &mut out)?;
            out.finish(manifest("selftest", to_value(&a), settings_value(&a.solver.settings()), code))?;
            Ok(code)
        }
        Command::Replay(a) => cmd_replay(&a),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data")
}

pub fn settings_value(s: &SdpSettings) -> Value {
    json!({
        "tol": s.tol,
        "max_iters": s.max_iters,
        "rho": s.rho,
        "alpha": s.alpha,
        "check_every": s.check_every,
    })
}

fn flagged_if(flagged: bool) -> i32 {
    if flagged {
        EXIT_FLAGGED
    } else {
        EXIT_OK
    }
}

fn synthesis_line(r: &SynthesisResult) -> String {
    let flags: Vec<&str> = r.flags.iter().map(|f| json::flag_str(*f)).collect();
    let mut s = format!("phi = {:.8}pi  Q/L = {:.10}", r.phi / PI, r.q_over_l());
    if !flags.is_empty() {
        s.push_str(&format!("  [{}]", flags.join(", ")));
    }
    s
}

fn cmd_synth(a: &SynthArgs, out: &mut OutputSet) -> CliResult {
    let opts = SynthesisOptions { no_marginals: a.no_marginals, setting_symmetric: a.setting_symmetric, ..Default::default() };
    if let Some(phi) = a.phi {
        let r = if a.exact {
            if (phi - PI / 4.0).abs() > 1e-12 {
                return Err(CliError::Usage("--exact is available only at phi = pi/4".into()));
            }
            synthesize_exact(opts)?
        } else {
            synthesize(phi, opts)?
        };
        out.write_json("synth.json", &json::synthesis_to_value(&r))?;
        println!("{}", synthesis_line(&r));
        if let Some(e) = &r.exact {
            println!("exact Q/L = {}", e.q);
        }
        return Ok(flagged_if(r.is_flagged()));
    }
    let grid = &a.scan.as_ref().expect("clap enforces --phi or --scan").0;
    let points = parallel::scan(grid, opts)?;
    out.write("scan.csv", output::scan_csv(&points)?.as_bytes())?;
    let flagged: Vec<Value> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.flags.is_empty() || p.status != selftest_core::synth::SynthesisStatus::Feasible)
        .map(|(i, p)| json!({ "index": i, "phi": p.phi, "flags": p.flags.iter().map(|f| json::flag_str(*f)).collect::<Vec<_>>() }))
        .collect();
    let best = points.iter().enumerate().max_by(|x, y| x.1.q_over_l.total_cmp(&y.1.q_over_l));
    let meta = json!({
        "options": { "no_marginals": a.no_marginals, "setting_symmetric": a.setting_symmetric },
        "points": points.len(),
        "peak": best.map(|(i, p)| json!({ "index": i, "phi": p.phi, "phi_over_pi": p.phi / PI, "Q_over_L": p.q_over_l })),
        "flagged": flagged,
    });
    out.write_json("scan.meta.json", &meta)?;
    if a.svg {
        let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.phi / PI, p.q_over_l)).collect();
        let chart = LineChart { title: "largest Q/L against measurement angle", x_label: "phi / pi", y_label: "Q/L", points: &pts, baseline: Some(1.0) };
        out.write("scan.svg", chart.render().as_bytes())?;
    }
    if let Some((i, p)) = best {
        println!("{} points; peak Q/L = {:.10} at phi = {:.8}pi (index {i})", points.len(), p.q_over_l, p.phi / PI);
    }
    println!("{} flagged points (reported as Q/L = 1 when infeasible)", flagged.len());
    Ok(flagged_if(!flagged.is_empty()))
}

fn cmd_bounds(a: &BoundsArgs, out: &mut OutputSet) -> CliResult {
    let names: Vec<String> = match &a.ineq {
        Some(n) => vec![n.clone()],
        None => selftest_core::bell::builtin::NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let mut rows = Vec::new();
    println!("{:<12} {:>24} {:>16} {:>11}", "inequality", "local bound", "float", "maximizers");
    for name in names {
        let g = json::load_inequality(&name)?;
        let lb = local_bound(&g);
        let exact = lb.value.as_exact().map(json::rad2_to_value);
        println!("{:<12} {:>24} {:>16.10} {:>11}", name, lb.value.to_string(), lb.value.to_f64(), lb.maximizers.len());
        rows.push(json!({
            "inequality": name,
            "parties": g.parties(),
            "local_bound": lb.value.to_f64(),
            "local_bound_exact": exact,
            "maximizers": lb.maximizers.len(),
        }));
    }
    out.write_json("bounds.json", &Value::Array(rows))?;
    Ok(EXIT_OK)
}

fn cmd_seesaw(a: &SeesawArgs, out: &mut OutputSet) -> CliResult {
    let g = json::load_inequality(&a.ineq)?;
    let cfg = SeesawConfig { num_seeds: a.seeds, max_iters: a.max_iters, convergence_tol: a.convergence_tol, rng_seed: a.rng };
    // Reported in the canonical local frame so qubit observables read as angles.
    let run = parallel::seesaw(&g, &cfg)?.canonical_frame()?;
    let mut v = json::seesaw_to_value(&run, a.rng, a.seeds);
    v["inequality"] = json!(a.ineq);
    out.write_json("seesaw.json", &v)?;
    println!("{}: best value {:.12} (seed {}, {} iterations)", a.ineq, run.value, run.seed_index, run.iterations);
    Ok(EXIT_OK)
}

fn default_level(parties: usize) -> SequenceLevel {
    if parties == 4 {
        SequenceLevel::Local2FourParty
    } else {
        SequenceLevel::Local2
    }
}

fn check_heavy(parties: usize, allow: bool) -> Result<(), CliError> {
    if parties >= 4 && !allow {
        return Err(CliError::Usage("four-party problems take hours per point; pass --allow-heavy to run them".into()));
    }
    Ok(())
}

fn structure_for(level: &Option<String>, parties: usize) -> Result<MomentMatrixStructure, CliError> {
    let level = match level {
        Some(l) => SequenceLevel::parse(l)?,
        None => default_level(parties),
    };
    Ok(MomentMatrixStructure::for_level(level, parties)?)
}

fn cmd_npa(a: &NpaArgs, out: &mut OutputSet) -> CliResult {
    let g = json::load_inequality(&a.ineq)?;
    check_heavy(g.parties(), a.allow_heavy)?;
    let structure = structure_for(&a.level, g.parties())?;
    let bound = npa_upper_bound(&g, &structure, &a.solver.settings())?;
    let mut v = json::npa_to_value(&bound);
    v["inequality"] = json!(a.ineq);
    v["level"] = json!(structure.level().map(|l| l.name()));
    v["order"] = json!(structure.order());
    out.write_json("npa.json", &v)?;
    println!(
        "{}: upper bound {:.10} ({}, {}, order {})",
        a.ineq,
        bound.value,
        if bound.certified { "certified" } else { "uncertified" },
        bound.solution.status.as_str(),
        structure.order()
    );
    Ok(flagged_if(!bound.certified))
}

fn resolve_target(a: &SelftestArgs) -> Result<(SwapTarget, String), CliError> {
    let target = SwapTarget::builtin(&a.target).ok_or_else(|| {
        CliError::Usage(format!("unknown target `{}`; choose one of {}", a.target, SwapTarget::NAMES.join(", ")))
    })?;
    match &a.ineq {
        None => {
            let name = target.name().to_string();
            Ok((target, name))
        }
        Some(name) => {
            let g: GeneralBellExpression = json::load_inequality(name)?;
            let t = SwapTarget::new(target.name(), target.physical_state().clone(), target.settings().to_vec(), g, target.baseline())?;
            Ok((t, name.clone()))
        }
    }
}

fn cmd_selftest(a: &SelftestArgs, out: &mut OutputSet) -> CliResult {
    let (target, ineq_name) = resolve_target(a)?;
    check_heavy(target.parties(), a.allow_heavy)?;
    let structure = structure_for(&a.level, target.parties())?;
    let local = target.local_bound();
    let qmax = target.reference_value()?;
    let grid = a.qgrid.as_ref().map_or_else(|| linspace(local, qmax, 33), |g| g.0.clone());
    let settings = a.solver.settings();
    let mode = match a.mode {
        ModeArg::Equality => BellConstraintMode::Equality,
        ModeArg::AtLeast => BellConstraintMode::AtLeast,
    };
    let level_name = structure.level().map_or("custom", |l| l.name());
    if let Some(dir) = &a.export_sdpa {
        let mut problem = FidelityProblem::new(&target, &structure, mode)?;
        for (i, &q) in grid.iter().enumerate() {
            problem.set_bell_value(q)?;
            let note = format!("minimal SWAP fidelity, target {}, level {level_name}, {} Bell constraint, Q = {q:?}", target.name(), mode.as_str());
            let text = export_sdpa(problem.instance(), &[&note]);
            out.write_at(dir, &format!("point_{i:03}.dat-s"), text.as_bytes())?;
        }
    }
    let curve = parallel::curve(&target, &grid, &structure, mode, &settings)?;
    out.write("curve.csv", output::curve_csv(&curve)?.as_bytes())?;
    let meta = json!({
        "inequality": { "name": ineq_name, "expression": json::general_to_value(target.inequality()) },
        "target": target.name(),
        "baseline": target.baseline(),
        "level": level_name,
        "moment_matrix_order": structure.order(),
        "bell_constraint": mode.as_str(),
        "solver": settings_value(&settings),
        "local_bound": local,
        "reference_value": qmax,
        "certified_rows": curve.rows.iter().filter(|r| r.certified).count(),
        "flagged_rows": curve.rows.iter().filter(|r| r.is_flagged()).map(|r| r.q).collect::<Vec<_>>(),
        "baseline_crossing": curve.baseline_crossing(),
    });
    out.write_json("curve.meta.json", &meta)?;
    if a.svg {
        let pts: Vec<(f64, f64)> = curve.rows.iter().map(|r| (r.q, r.f)).collect();
        let title = format!("minimal fidelity with {}", target.name());
        let chart = LineChart { title: &title, x_label: "Bell value Q", y_label: "fidelity f", points: &pts, baseline: Some(target.baseline()) };
        out.write("curve.svg", chart.render().as_bytes())?;
    }
    println!("{:>14} {:>14} {:>15}", "Q", "f", "status");
    for r in &curve.rows {
        println!("{:>14.8} {:>14.8} {:>15}", r.q, r.f, r.status.as_str());
    }
    println!("baseline {} crossed at Q = {:?}", target.baseline(), curve.baseline_crossing());
    Ok(flagged_if(curve.has_flagged_rows()))
}

/// Drops `--flag value` and `--flag=value` occurrences.
fn strip_option(argv: &[String], flag: &str) -> (Vec<String>, bool) {
    let mut out = Vec::new();
    let mut found = false;
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == flag {
            found = true;
            skip = true;
        } else if a.starts_with(&format!("{flag}=")) {
            found = true;
        } else {
            out.push(a.clone());
        }
    }
    (out, found)
}

/// Float-mode outputs may differ in the last bits across platforms; CSV
/// tables are accepted when every number agrees to 1e-9.
fn cmd_replay(a: &ReplayArgs) -> CliResult {
    let original = RunManifest::read(&a.manifest)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let (argv, _) = strip_option(&original.argv, "--out");
    let (mut argv, had_sdpa) = strip_option(&argv, "--export-sdpa");
    argv.push("--out".into());
    argv.push(a.out.display().to_string());
    if had_sdpa {
        argv.push("--export-sdpa".into());
        argv.push(a.out.join("sdpa").display().to_string());
    }
    let cli = Cli::try_parse_from(std::iter::once("selftest".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| CliError::Usage(format!("manifest arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("a replay manifest cannot itself be replayed".into()));
    }
    let code = run(cli.command, &argv)?;
    let replayed = RunManifest::read(&a.out.join(RunManifest::file_name(&original.command)))?;
    let mut all_ok = code == original.exit_code;
    if !all_ok {
        println!("exit code {code} differs from recorded {}", original.exit_code);
    }
    for o in &original.outputs {
        let Some(new) = replayed.outputs.iter().find(|n| n.name == o.name) else {
            println!("{}: missing", o.name);
            all_ok = false;
            continue;
        };
        if new.sha256 == o.sha256 {
            println!("{}: identical", o.name);
            continue;
        }
        let close = o.name.ends_with(".csv") && csv_close(&original_path(base, &original, &o.name), &a.out.join(&o.name), 1e-9);
        println!("{}: {}", o.name, if close { "within 1e-9" } else { "differs" });
        all_ok &= close;
    }
    Ok(flagged_if(!all_ok))
}

fn original_path(base: &Path, m: &RunManifest, name: &str) -> PathBuf {
    match name.strip_prefix("sdpa/") {
        Some(file) => strip_option_value(&m.argv, "--export-sdpa").map_or_else(|| base.join(name), |d| PathBuf::from(d).join(file)),
        None => base.join(name),
    }
}

fn strip_option_value(argv: &[String], flag: &str) -> Option<String> {
    let prefix = format!("{flag}=");
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == flag {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix(&prefix).map(str::to_string)
        }
    })
}

fn csv_close(a: &Path, b: &Path, tol: f64) -> bool {
    let (Ok(x), Ok(y)) = (std::fs::read_to_string(a), std::fs::read_to_string(b)) else {
        return false;
    };
    let (Ok(x), Ok(y)) = (output::csv_numbers(&x), output::csv_numbers(&y)) else {
        return false;
    };
    x.len() == y.len()
        && x.iter().zip(&y).all(|(r, s)| {
            r.len() == s.len()
                && r.iter().zip(s).all(|(u, v)| match (u, v) {
                    (Some(u), Some(v)) => (u - v).abs() <= tol * u.abs().max(1.0),
                    (None, None) => true,
                    _ => false,
                })
        })
}
