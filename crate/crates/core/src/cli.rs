//! Command-line front end.
//!
//! Every command prints `{"config": ..., "result": ...}` as pretty JSON to
//! stdout, or to `--output`. Exit status: 0 on success, 1 when `selftest`
//! finds a failing check, 2 on invalid input, 3 when a solver stops short of
//! its tolerance (the best iterate is still written, with its gap). Errors go
//! to stderr as `{"error": {...}}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::DiscreteCurve;
use crate::error::Error;
use crate::families::{family_through, CurveFamily};
use crate::io::{FamilySpec, FunctionSpec, PlanSpec, Values};
use crate::lipschitz::{asymptotic_slope, path_relax};
use crate::modulus::{duality_product, modulus, optimal_plan, ExtReal, Lambda, ModulusOptions};
use crate::plans::{
    barycenter, derivation_norm_bound, is_test_plan, parametric_barycenter, plan_derivation, TimeGrid,
};
use crate::sobolev::{capacity, equivalence_report, n_gradient, EquivalenceOptions};
use crate::space::{build_space, MetricMeasureSpace, SpaceSpec};

#[derive(Debug, Parser, Serialize)]
#[command(name = "modcalc", version, about = "Modulus, plans, upper gradients and capacity on weighted graphs")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative duality gap at which solvers stop.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Newton step budget per solve.
    #[arg(long, global = true, default_value_t = 5000)]
    pub max_iterations: usize,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Also write a per-vertex CSV table here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Parse a space and report its metric summary.
    SpaceValidate(SpaceArgs),
    /// Modulus of a curve family and its optimal plan.
    Modulus(ModulusArgs),
    /// Barycenters, compression and energy of a plan.
    Plan(PlanArgs),
    /// Least-energy upper gradient of a function on a family.
    Gradient(GradientArgs),
    /// Sobolev capacity of a vertex set.
    Capacity(CapacityArgs),
    /// Discrete-path relaxation of a function.
    Relax(RelaxArgs),
    /// Compare the gradient estimators on one function.
    Equivalence(EquivalenceArgs),
    /// Run built-in checks on seeded random instances.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SpaceArgs {
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ModulusArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub lambda: u8,
}

#[derive(Debug, Args, Serialize)]
pub struct PlanArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Function for the induced derivation.
    #[arg(long)]
    pub f: Option<PathBuf>,
    /// Time grid size for compression; 0 evaluates every time exactly.
    #[arg(long, default_value_t = 0)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GradientArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    #[arg(long)]
    pub space: PathBuf,
    /// Vertex ids of the set, comma separated.
    #[arg(long = "E", value_delimiter = ',', num_args = 0..)]
    pub set: Vec<String>,
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub truncated: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RelaxArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub f: PathBuf,
    /// Density, in the function schema.
    #[arg(long)]
    pub g: PathBuf,
    /// Source vertex ids, comma separated; all vertices by default.
    #[arg(long, value_delimiter = ',')]
    pub sources: Option<Vec<String>>,
    /// Longest step; the longest edge of the space by default.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Cap; the maximum of `f` by default.
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct EquivalenceArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 3)]
    pub max_hops: usize,
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    /// Random instances per check.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

/// Failure of one command, with the exit status it maps to.
struct Failure {
    status: i32,
    error: Value,
    /// Best-effort artifact for non-convergence.
    partial: Option<Value>,
}

impl Failure {
    fn input(what: &str, err: Error) -> Self {
        let mut f = Self::from(err);
        if let Some(obj) = f.error.as_object_mut() {
            obj.insert("input".into(), json!(what));
        }
        f
    }
}

/// Name inside the first pair of backticks, as in serde's "missing field `m`".
fn quoted_name(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        let (kind, field): (&str, Option<String>) = match &err {
            Error::UnknownVertex(_) | Error::VertexIndex(_) => ("validation", Some("id".into())),
            Error::DuplicateVertex(_) => ("validation", Some("vertices".into())),
            Error::DuplicateEdge(..) | Error::SelfLoop(_) => ("validation", Some("edges".into())),
            Error::EdgeLength { .. } => ("validation", Some("len".into())),
            Error::VertexMeasure { .. } => ("validation", Some("m".into())),
            Error::InvalidCurve(_) => ("validation", Some("curve".into())),
            Error::InvalidDensity(_) => ("validation", Some("density".into())),
            Error::InvalidPlan(_) => ("validation", Some("support".into())),
            Error::InvalidArgument { field, .. } => ("validation", Some(field.to_string())),
            Error::Json(e) => ("parse", quoted_name(&e.to_string())),
            Error::Io(_) => ("io", None),
            Error::NotConverged(_) => ("not_converged", None),
        };
        let mut error = json!({ "kind": kind, "message": message });
        if let Some(field) = field {
            error["field"] = json!(field);
        }
        match err {
            Error::NotConverged(best) => {
                error["gap"] = json!(best.gap());
                Failure {
                    status: 3,
                    error,
                    partial: serde_json::to_value(&*best).ok(),
                }
            }
            _ => Failure {
                status: 2,
                error,
                partial: None,
            },
        }
    }
}

type Outcome = std::result::Result<Artifact, Failure>;

struct Artifact {
    result: Value,
    /// Header and rows of the per-vertex table.
    table: (Vec<String>, Vec<Vec<String>>),
    status: i32,
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(what, e.into()))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(what, e.into()))
}

fn load_space(path: &Path) -> std::result::Result<MetricMeasureSpace, Failure> {
    let spec: SpaceSpec = read_json(path, "space")?;
    build_space(&spec).map_err(|e| Failure::input("space", e))
}

fn load_function(space: &MetricMeasureSpace, path: &Path, what: &str) -> std::result::Result<Vec<f64>, Failure> {
    let spec: FunctionSpec = read_json(path, what)?;
    spec.build(space).map_err(|e| Failure::input(what, e))
}

fn load_family(space: &MetricMeasureSpace, path: &Path) -> std::result::Result<CurveFamily, Failure> {
    let spec: FamilySpec = read_json(path, "family")?;
    spec.build(space).map_err(|e| Failure::input("family", e))
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn vertex_table(space: &MetricMeasureSpace, columns: &[(&str, &[f64])]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["vertex".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    let rows = (0..space.len())
        .map(|v| {
            let mut row = vec![space.id(v).to_string()];
            row.extend(columns.iter().map(|(_, col)| fmt(col[v])));
            row
        })
        .collect();
    (header, rows)
}

fn ok(result: impl Serialize, table: (Vec<String>, Vec<Vec<String>>)) -> Outcome {
    Ok(Artifact {
        result: serde_json::to_value(result).map_err(|e| Failure::from(Error::from(e)))?,
        table,
        status: 0,
    })
}

fn options(cli: &Cli) -> ModulusOptions {
    ModulusOptions {
        tol: cli.tol,
        max_iterations: cli.max_iterations,
    }
}

fn space_validate(a: &SpaceArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let degree: Vec<f64> = (0..s.len()).map(|v| s.neighbors(v).len() as f64).collect();
    ok(
        json!({
            "vertices": s.len(),
            "edges": s.edges().len(),
            "total_mass": s.measure().iter().sum::<f64>(),
            "connected": s.is_connected(),
            "diameter": s.diameter(),
            "max_hop": s.max_hop(),
        }),
        vertex_table(&s, &[("m", s.measure()), ("degree", &degree)]),
    )
}

fn run_modulus(cli: &Cli, a: &ModulusArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let family = load_family(&s, &a.family)?;
    let lambda = Lambda::try_from(a.lambda).map_err(|r| Failure::from(Error::InvalidArgument { field: "lambda", reason: r }))?;
    let r = modulus(&s, &family, a.p, lambda, &options(cli))?;
    let mut result = serde_json::to_value(&r).map_err(|e| Failure::from(Error::from(e)))?;
    result["family_size"] = json!(family.len());
    if matches!(r.value, ExtReal::Finite(v) if v > 0.0) {
        let plan = optimal_plan(&r, &family)?;
        result["duality_product"] = json!(duality_product(&s, &plan, &r)?);
        result["plan"] = serde_json::to_value(PlanSpec::from_plan(&s, &plan)).map_err(|e| Failure::from(Error::from(e)))?;
    }
    Ok(Artifact {
        result,
        table: vertex_table(&s, &[("m", s.measure()), ("rho", &r.rho)]),
        status: 0,
    })
}

fn run_plan(a: &PlanArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let spec: PlanSpec = read_json(&a.plan, "plan")?;
    let plan = spec.build(&s).map_err(|e| Failure::input("plan", e))?;
    let grid = if a.grid == 0 { TimeGrid::Exact } else { TimeGrid::Uniform(a.grid) };
    let report = is_test_plan(&s, &plan, a.q, grid)?;
    let bar0 = barycenter(&s, &plan, Lambda::Zero);
    let bar1 = barycenter(&s, &plan, Lambda::One);
    let pbar = parametric_barycenter(&s, &plan, Lambda::Zero, grid);
    let mut result = json!({
        "test_plan": report,
        "bar0": Values(bar0.density.values()),
        "bar1": Values(bar1.density.values()),
        "bar0_norm_q": bar0.norm(&s, a.q),
        "bar1_norm_q": bar1.norm(&s, a.q),
        "parametric_bar0": Values(pbar.density.values()),
    });
    let mut columns: Vec<(&str, Vec<f64>)> = vec![
        ("bar0", bar0.density.values().to_vec()),
        ("bar1", bar1.density.values().to_vec()),
    ];
    if let Some(path) = &a.f {
        let f = load_function(&s, path, "f")?;
        let der = plan_derivation(&s, &plan, &f);
        result["derivation"] = json!({
            "b": der.b,
            "div": der.div,
            "integral": der.integral(&s),
            "divergence_pairing": der.divergence_pairing(&f),
            "norm_bound": derivation_norm_bound(&s, &plan, &f),
        });
        columns.push(("b", der.b));
    }
    let cols: Vec<(&str, &[f64])> = columns.iter().map(|(n, c)| (*n, &c[..])).collect();
    ok(result, vertex_table(&s, &cols))
}

fn run_gradient(cli: &Cli, a: &GradientArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let f = load_function(&s, &a.f, "f")?;
    let family = load_family(&s, &a.family)?;
    let r = n_gradient(&s, &f, &family, a.p, &options(cli))?;
    let table = vertex_table(&s, &[("f", &f), ("rho", &r.rho)]);
    ok(r, table)
}

fn run_capacity(cli: &Cli, a: &CapacityArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let set = s.vertex_set(&a.set).map_err(|e| Failure::input("E", e))?;
    let family = load_family(&s, &a.family)?;
    let r = capacity(&s, &set, &family, a.p, a.truncated, &options(cli))?;
    let table = vertex_table(&s, &[("f", &r.f), ("rho", &r.rho)]);
    ok(r, table)
}

fn run_relax(a: &RelaxArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let f = load_function(&s, &a.f, "f")?;
    let g = load_function(&s, &a.g, "g")?;
    let sources = match &a.sources {
        Some(ids) => s.vertex_set(ids).map_err(|e| Failure::input("sources", e))?,
        None => s.all_vertices(),
    };
    let delta = a.delta.unwrap_or_else(|| s.max_hop());
    let cap = a.cap.unwrap_or_else(|| f.iter().copied().fold(0.0, f64::max));
    let relaxed = path_relax(&s, &f, &g, &sources, delta, cap)?;
    let slope = asymptotic_slope(&s, &relaxed);
    let table = vertex_table(&s, &[("f", &f), ("g", &g), ("relaxed", &relaxed), ("slope", &slope)]);
    ok(
        json!({
            "delta": delta,
            "cap": cap,
            "relaxed": relaxed,
            "slope": Values(slope.values()),
            "fixed_point": relaxed == f,
        }),
        table,
    )
}

fn run_equivalence(cli: &Cli, a: &EquivalenceArgs) -> Outcome {
    let s = load_space(&a.space)?;
    let f = load_function(&s, &a.f, "f")?;
    let opts = EquivalenceOptions {
        max_hops: a.max_hops,
        n_steps: a.steps,
        solver: options(cli),
    };
    let r = equivalence_report(&s, &f, a.p, &opts)?;
    let header = ["vertex", "f", "rho_n", "slope", "f_h", "slope_h", "neighbor_bound"]
        .map(String::from)
        .to_vec();
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.vertex.clone(),
                fmt(row.f),
                fmt(row.rho_n),
                fmt(row.slope),
                fmt(row.f_h),
                fmt(row.slope_h),
                fmt(row.neighbor_bound),
            ]
        })
        .collect();
    ok(r, (header, rows))
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    worst: f64,
}

fn selftest(cli: &Cli, a: &SelftestArgs) -> Outcome {
    let opts = options(cli);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut checks = Vec::new();

    let edge = MetricMeasureSpace::path(2);
    let single = CurveFamily::new("edge", vec![DiscreteCurve::constant_speed(&edge, vec![0, 1])?]);
    let value = modulus(&edge, &single, 2.0, Lambda::Zero, &opts)?.value.finite().unwrap_or(f64::INFINITY);
    checks.push(Check {
        name: "single edge modulus is 2".into(),
        passed: (value - 2.0).abs() <= 1e-6,
        worst: (value - 2.0).abs(),
    });

    let path = MetricMeasureSpace::path(3);
    let subpaths = family_through(&path, &path.all_vertices(), 2);
    let g = n_gradient(&path, &[0.0, 1.0, 2.0], &subpaths, 2.0, &opts)?;
    checks.push(Check {
        name: "unit path gradient energy is 8/3".into(),
        passed: (g.energy - 8.0 / 3.0).abs() <= 1e-6,
        worst: (g.energy - 8.0 / 3.0).abs(),
    });

    // single-curve closed form (sum c^q m^(1-q))^(1-p) on random masses
    let mut worst = 0.0_f64;
    for _ in 0..a.trials {
        let n = rng.gen_range(2..=8);
        let m: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
        let s = MetricMeasureSpace::path(n).with_measure(m.clone())?;
        let p = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
        let q = p / (p - 1.0);
        let curve = DiscreteCurve::constant_speed(&s, (0..n).collect())?;
        let c = curve.arc_mass_by_vertex(n);
        let closed = c
            .iter()
            .zip(&m)
            .map(|(cv, mv)| cv.powf(q) * mv.powf(1.0 - q))
            .sum::<f64>()
            .powf(1.0 - p);
        let fam = CurveFamily::new("one", vec![curve]);
        let got = modulus(&s, &fam, p, Lambda::Zero, &opts)?.value.finite().unwrap_or(f64::INFINITY);
        worst = worst.max((got - closed).abs() / closed);
    }
    checks.push(Check {
        name: "single-curve modulus matches the closed form".into(),
        passed: worst <= 1e-6,
        worst,
    });

    // Abel summation on random walks
    let mut worst = 0.0_f64;
    let grid = MetricMeasureSpace::grid(3, 3);
    for _ in 0..a.trials {
        let mut walk = vec![rng.gen_range(0..grid.len())];
        for _ in 0..rng.gen_range(1..8) {
            let nb = grid.neighbors(*walk.last().unwrap());
            walk.push(nb[rng.gen_range(0..nb.len())].0);
        }
        let curve = DiscreteCurve::constant_speed(&grid, walk)?;
        let f1: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f2: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        worst = worst.max(curve.ibp_identity(&f1, &f2).defect());
    }
    checks.push(Check {
        name: "path integration by parts is exact".into(),
        passed: worst <= 1e-12,
        worst,
    });

    let lone = MetricMeasureSpace::from_parts(vec!["v".into()], vec![3.0], &[])?;
    let cap = capacity(&lone, &lone.all_vertices(), &CurveFamily::empty("none"), 2.0, false, &opts)?;
    checks.push(Check {
        name: "isolated vertex capacity is its mass".into(),
        passed: (cap.value - 3.0).abs() <= 1e-6,
        worst: (cap.value - 3.0).abs(),
    });

    let passed = checks.iter().all(|c| c.passed);
    let header = ["check", "passed", "worst"].map(String::from).to_vec();
    let rows = checks
        .iter()
        .map(|c| vec![c.name.clone(), c.passed.to_string(), fmt(c.worst)])
        .collect();
    Ok(Artifact {
        result: json!({ "passed": passed, "checks": checks }),
        table: (header, rows),
        status: if passed { 0 } else { 1 },
    })
}

fn dispatch(cli: &Cli) -> Outcome {
    if !(cli.tol > 0.0) {
        return Err(Error::InvalidArgument {
            field: "tol",
            reason: "tolerance must be positive".into(),
        }
        .into());
    }
    match &cli.command {
        Command::SpaceValidate(a) => space_validate(a),
        Command::Modulus(a) => run_modulus(cli, a),
        Command::Plan(a) => run_plan(a),
        Command::Gradient(a) => run_gradient(cli, a),
        Command::Capacity(a) => run_capacity(cli, a),
        Command::Relax(a) => run_relax(a),
        Command::Equivalence(a) => run_equivalence(cli, a),
        Command::Selftest(a) => selftest(cli, a),
    }
}

fn write_csv(path: &Path, (header, rows): &(Vec<String>, Vec<Vec<String>>)) -> std::result::Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::from(Error::Io(e.into())))?;
    w.write_record(header).map_err(|e| Failure::from(Error::Io(e.into())))?;
    for row in rows {
        w.write_record(row).map_err(|e| Failure::from(Error::Io(e.into())))?;
    }
    w.flush().map_err(|e| Failure::from(Error::Io(e)))
}

fn emit(cli: &Cli, result: Value, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let doc = json!({ "config": cli, "result": result });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::from(Error::from(e)))? + "\n";
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::from(Error::Io(e))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::from(Error::Io(e))),
    }
}

fn report(err: &Value, stderr: &mut dyn Write) {
    let text = serde_json::to_string(&json!({ "error": err })).unwrap_or_default();
    let _ = writeln!(stderr, "{text}");
}

/// Caps the global rayon pool at `MODCALC_THREADS` when set.
fn configure_threads(var: Option<String>) -> std::result::Result<(), Failure> {
    let Some(raw) = var else { return Ok(()) };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::from(Error::InvalidArgument {
            field: "MODCALC_THREADS",
            reason: format!("expected a positive integer, got `{raw}`"),
        })
    })?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` and runs one command; returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            report(&json!({ "kind": "usage", "message": e.to_string().trim() }), stderr);
            return 2;
        }
    };
    if let Err(f) = configure_threads(std::env::var("MODCALC_THREADS").ok()) {
        report(&f.error, stderr);
        return f.status;
    }
    let outcome = dispatch(&cli).and_then(|art| {
        if let Some(path) = &cli.csv {
            write_csv(path, &art.table)?;
        }
        emit(&cli, art.result, stdout)?;
        Ok(art.status)
    });
    match outcome {
        Ok(status) => status,
        Err(f) => {
            if let Some(partial) = f.partial.clone() {
                if let Err(g) = emit(&cli, partial, stdout) {
                    report(&g.error, stderr);
                }
            }
            report(&f.error, stderr);
            f.status
        }
    }
}

pub fn main_from_env() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
