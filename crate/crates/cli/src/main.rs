mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fuchsian_pick::blaschke::character_of;
use fuchsian_pick::kernel::{boundary_gram_quadrature, gram, KernelSpec};
use fuchsian_pick::linalg::psd_check;
use fuchsian_pick::orbit::{enumerate_orbit, stabilizer_order_origin, GroupPresentation, OrbitOptions, Word};
use fuchsian_pick::pick::{amenable_average, feasibility, orbit_feasibility, pick_norm, PickProblem, Targets};
use fuchsian_pick::schur::{interpolate_composed, interpolate_disk};
use fuchsian_pick::suite::{run_suite, SuiteOptions, DEFAULT_SEED};
use fuchsian_pick::{Complex64, DiskPoint, Error};
use serde_json::{json, Value};

use problem::{at, disk_point, disk_points, Failure, KernelChoice, ProblemFile};
use report::{cx, matrix, opt, psd};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const GRID_RADIUS: f64 = 0.999;
const DEFAULT_CHARACTER_TOL: f64 = 1e-6;

/// Nevanlinna–Pick interpolation for algebras of functions invariant under a
/// Fuchsian group.
///
/// Reports are JSON on stdout. Exit codes: 0 ok or feasible, 1 well posed but
/// infeasible, 2 input error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "fpick", version)]
struct Cli {
    /// PSD tolerance override (character tolerance for `character`).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Orbit truncation depth; overrides the problem file.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Number of circle points for sup-norm checks.
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    /// Seed for the random instances of `verify`.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate the orbit of `options.base` (default 0).
    Orbit { file: PathBuf },
    /// Evaluate the orbit Blaschke product of 0 at `options.points`.
    BlaschkeEval { file: PathBuf },
    /// Character of the orbit Blaschke product on each generator or on `options.words`.
    Character { file: PathBuf },
    /// Gram matrix of the kernel at the nodes.
    KernelGram { file: PathBuf },
    /// Pick matrix positivity for the problem's kernel.
    PickCheck { file: PathBuf },
    /// Positivity of the truncated orbit-Pick matrix.
    OrbitPickCheck { file: PathBuf },
    /// Least scaling of the targets that makes the problem solvable.
    PickNorm { file: PathBuf },
    /// Construct an interpolant by Schur recursion.
    Interpolate { file: PathBuf },
    /// Cesàro average of `z^power` over the cyclic orbit of `options.point`.
    AmenableAverage { file: PathBuf },
    /// Boundary Gram matrix of powers of the orbit Blaschke product.
    BoundaryGram { file: PathBuf },
    /// Run the built-in verification suite.
    Verify {
        /// Random instances per randomized check.
        #[arg(long, default_value_t = 100, hide = true)]
        instances: usize,
    },
}

/// A report and whether the verdict was positive.
struct Outcome {
    report: Value,
    ok: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, ok: true }
    }
}

fn load(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    problem::parse(&text).map_err(|e| match e {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn kernel(p: &ProblemFile, depth: usize) -> Result<KernelSpec, Failure> {
    match p.kernel.as_ref().unwrap_or(&KernelChoice::Szego) {
        KernelChoice::Szego => Ok(KernelSpec::Szego),
        KernelChoice::Composed { power } => {
            let inner = p.orbit_product(depth, Some(1))?;
            let power = match power {
                Some(k) => *k,
                None => stabilizer_order_origin(&p.group()?, 6) as u32,
            };
            KernelSpec::composed(inner, power).map_err(at("kernel"))
        }
        KernelChoice::Orbit { .. } => Ok(KernelSpec::OrbitGram { group: p.group()?, depth }),
    }
}

fn pick_problem(p: &ProblemFile, depth: usize) -> Result<PickProblem, Failure> {
    PickProblem::new(p.nodes()?, p.targets()?, kernel(p, depth)?).map_err(at("problem"))
}

fn header(command: &str, depth: Option<usize>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(VERSION));
    if let Some(d) = depth {
        m.insert("depth".into(), json!(d));
    }
    m
}

fn with(mut head: serde_json::Map<String, Value>, body: Value) -> Value {
    if let Value::Object(b) = body {
        head.extend(b);
    }
    Value::Object(head)
}

fn cmd_orbit(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let group = p.group()?;
    let base = p.options.base.map_or(Ok(DiskPoint::origin()), |b| disk_point(b, "options.base"))?;
    let o = enumerate_orbit(&group, base, OrbitOptions::new(depth)).map_err(at("group"))?;
    let points: Vec<Value> = o
        .entries
        .iter()
        .map(|e| json!({"word": e.word.to_string(), "level": e.level, "point": cx(e.point.value()), "weight": e.weight}))
        .collect();
    let certificate = if o.tail_bound.is_some() { "geometric tail bound" } else { "no convergence certificate" };
    Ok(Outcome::ok(with(
        header("orbit", Some(depth)),
        json!({
            "base": cx(base.value()),
            "points": points,
            "partial_sum": o.partial_sum,
            "tail_bound": opt(o.tail_bound),
            "convergence": certificate,
            "complete_depth": o.complete_depth,
            "saturated": o.saturated,
            "stabilizer_order": stabilizer_order_origin(&group, 6),
        }),
    )))
}

fn eval_points(p: &ProblemFile) -> Result<Vec<DiskPoint>, Failure> {
    match (&p.options.points, &p.nodes) {
        (Some(v), _) => disk_points(v, "options.points"),
        (None, Some(_)) => p.nodes(),
        (None, None) => Err(Failure::input("options.points: missing")),
    }
}

fn cmd_blaschke_eval(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let b = p.orbit_product(depth, p.options.multiplicity)?;
    let values = eval_points(p)?
        .into_iter()
        .enumerate()
        .map(|(i, z)| {
            let v = b.eval(z).map_err(at(&format!("options.points[{i}]")))?;
            Ok(json!({"point": cx(z.value()), "value": cx(v.value), "error_bound": opt(v.error_bound)}))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Outcome::ok(with(
        header("blaschke-eval", Some(depth)),
        json!({
            "origin_multiplicity": b.origin_multiplicity(),
            "zero_count": b.zeros().len(),
            "tail_weight": opt(b.tail_weight()),
            "values": values,
        }),
    )))
}

fn cmd_character(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let group = p.group()?;
    let b = p.orbit_product(depth, p.options.multiplicity)?;
    let tol = cli.tolerance.unwrap_or(DEFAULT_CHARACTER_TOL);
    let word_list: Vec<Word> = match &p.options.words {
        Some(ws) => ws
            .iter()
            .enumerate()
            .map(|(i, w)| Word::parse(w).map_err(at(&format!("options.words[{i}]"))))
            .collect::<Result<_, _>>()?,
        None => (0..group.generators().len()).map(|g| Word::parse(&((b'a' + g as u8) as char).to_string()).expect("generator letter")).collect(),
    };
    let mut out = Vec::with_capacity(word_list.len());
    for (i, w) in word_list.iter().enumerate() {
        let field = format!("options.words[{i}]");
        let map = group.word_map(w).map_err(at(&field))?;
        let r = character_of(&b, &map, tol).map_err(at(&field))?;
        out.push(json!({"word": w.to_string(), "value": cx(r.values[0]), "consistency_residual": r.consistency_residual}));
    }
    Ok(Outcome::ok(with(
        header("character", Some(depth)),
        json!({"tolerance": tol, "origin_multiplicity": b.origin_multiplicity(), "characters": out}),
    )))
}

fn cmd_kernel_gram(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let nodes = p.nodes()?;
    let k = kernel(p, depth)?;
    let (points, index) = match &k {
        KernelSpec::OrbitGram { group, depth } => {
            let mut points = Vec::new();
            let mut index = Vec::new();
            for (i, &z) in nodes.iter().enumerate() {
                let o = enumerate_orbit(group, z, OrbitOptions::new(*depth)).map_err(at(&format!("nodes[{i}]")))?;
                for e in o.entries {
                    index.push(json!([i, e.word.to_string()]));
                    points.push(e.point);
                }
            }
            (points, Some(index))
        }
        _ => (nodes, None),
    };
    let g_kernel = if matches!(k, KernelSpec::OrbitGram { .. }) { KernelSpec::Szego } else { k.clone() };
    let g = gram(&g_kernel, &points).map_err(at("nodes"))?;
    let r = psd_check(&g.entries, cli.tolerance).map_err(at("--tolerance"))?;
    Ok(Outcome::ok(with(
        header("kernel-gram", Some(depth)),
        json!({
            "kernel": k.name(),
            "index": index.map_or(Value::Null, Value::Array),
            "matrix": matrix(g.entries.matrix()),
            "positivity": psd(&r),
        }),
    )))
}

fn cmd_pick_check(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let problem = pick_problem(p, depth)?;
    if let KernelSpec::OrbitGram { group, depth } = problem.kernel() {
        return orbit_check("pick-check", &problem, group, *depth, cli.tolerance);
    }
    let f = feasibility(&problem, cli.tolerance).map_err(at("problem"))?;
    Ok(Outcome {
        ok: f.psd.is_psd,
        report: with(
            header("pick-check", Some(depth)),
            json!({
                "kernel": problem.kernel().name(),
                "feasible": f.psd.is_psd,
                "positivity": psd(&f.psd),
                "pick_matrix": matrix(f.matrix.matrix()),
            }),
        ),
    })
}

fn orbit_check(
    command: &str,
    problem: &PickProblem,
    group: &GroupPresentation,
    depth: usize,
    tol: Option<f64>,
) -> Result<Outcome, Failure> {
    let (op, r) = orbit_feasibility(problem, group, depth, tol).map_err(at("problem"))?;
    Ok(Outcome {
        ok: r.is_psd,
        report: with(
            header(command, Some(depth)),
            json!({
                "kernel": "orbit",
                "feasible": r.is_psd,
                "positivity": psd(&r),
                "size": op.normalized.n(),
                "complete_depth": op.complete_depth,
            }),
        ),
    })
}

fn cmd_orbit_pick_check(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let problem = PickProblem::new(p.nodes()?, p.targets()?, KernelSpec::Szego).map_err(at("problem"))?;
    orbit_check("orbit-pick-check", &problem, &p.group()?, depth, cli.tolerance)
}

fn cmd_pick_norm(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let problem = pick_problem(p, depth)?;
    let norm = pick_norm(&problem).map_err(at("problem"))?;
    Ok(Outcome::ok(with(
        header("pick-norm", Some(depth)),
        json!({"kernel": problem.kernel().name(), "pick_norm": norm}),
    )))
}

fn scalar_targets(problem: &PickProblem) -> Result<Vec<Complex64>, Failure> {
    match problem.targets() {
        Targets::Scalar(v) => Ok(v.clone()),
        Targets::Matrix(_) => Err(Failure::input("targets: interpolants are constructed for scalar targets only")),
    }
}

fn cmd_interpolate(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let problem = pick_problem(p, depth)?;
    let targets = scalar_targets(&problem)?;
    let nodes = problem.nodes();
    let built = match problem.kernel() {
        KernelSpec::Szego => interpolate_disk(nodes, &targets).map(|f| {
            let grid = f.grid_sup_norm(cli.grid, GRID_RADIUS);
            let residual = residual(nodes, &targets, |z| f.evaluate(z));
            (f.clone(), None, grid, residual)
        }),
        KernelSpec::ComposedInner { inner, power } => interpolate_composed(nodes, &targets, inner, *power).map(|f| {
            let grid = f.grid_sup_norm(cli.grid, GRID_RADIUS);
            let residual = residual(nodes, &targets, |z| f.evaluate(z));
            let composition = json!({
                "power": f.power,
                "inner_origin_multiplicity": f.inner.origin_multiplicity(),
                "inner_zero_count": f.inner.zeros().len(),
                "node_map": f.node_map,
            });
            (f.disk, Some(composition), grid, residual)
        }),
        KernelSpec::OrbitGram { .. } => Err(Error::UnsupportedVariant("interpolation with the orbit kernel")),
    };
    let (disk, composition, grid_norm, res) = match built {
        Ok(b) => b,
        Err(Error::Infeasible { min_eigenvalue }) => {
            return Ok(Outcome {
                ok: false,
                report: with(
                    header("interpolate", Some(depth)),
                    json!({"kernel": problem.kernel().name(), "feasible": false, "min_eigenvalue": min_eigenvalue}),
                ),
            })
        }
        Err(e) => return Err(at("problem")(e)),
    };
    Ok(Outcome::ok(with(
        header("interpolate", Some(depth)),
        json!({
            "kernel": problem.kernel().name(),
            "feasible": true,
            "interpolant": {
                "nodes": disk.nodes().iter().map(|z| cx(z.value())).collect::<Vec<_>>(),
                "schur_parameters": disk.schur_parameters().iter().map(|&r| cx(r)).collect::<Vec<_>>(),
                "degenerate_rank": disk.degenerate_rank(),
                "composition": composition,
            },
            "max_residual": res,
            "grid": cli.grid,
            "grid_radius": GRID_RADIUS,
            "grid_sup_norm": grid_norm,
        }),
    )))
}

fn residual(nodes: &[DiskPoint], targets: &[Complex64], f: impl Fn(Complex64) -> Complex64) -> f64 {
    nodes.iter().zip(targets).map(|(z, w)| (f(z.value()) - w).norm()).fold(0.0, f64::max)
}

fn cmd_amenable_average(p: &ProblemFile) -> Result<Outcome, Failure> {
    let group = p.group()?;
    let z = p.options.point.map_or(Ok(DiskPoint::origin()), |v| disk_point(v, "options.point"))?;
    let power = p.options.power.unwrap_or(1);
    let k_max = p.options.k_max.unwrap_or(10_000);
    let avg = amenable_average(&group, z, power, k_max).map_err(at("group"))?;
    Ok(Outcome::ok(with(
        header("amenable-average", None),
        json!({"point": cx(z.value()), "power": power, "k_max": k_max, "average": cx(avg)}),
    )))
}

fn cmd_boundary_gram(cli: &Cli, p: &ProblemFile) -> Result<Outcome, Failure> {
    let depth = p.depth(cli.depth);
    let b = p.orbit_product(depth, p.options.multiplicity)?;
    let max_power = p.options.max_power.unwrap_or(5);
    let n_quad = p.options.n_quad.unwrap_or(8192);
    let g = boundary_gram_quadrature(&b, max_power, n_quad).map_err(at("options"))?;
    let identity = fuchsian_pick::linalg::CMatrix::identity(max_power + 1);
    Ok(Outcome::ok(with(
        header("boundary-gram", Some(depth)),
        json!({
            "max_power": max_power,
            "n_quad": n_quad,
            "matrix": matrix(g.entries.matrix()),
            "max_deviation_from_identity": g.entries.matrix().max_diff(&identity),
        }),
    )))
}

fn cmd_verify(cli: &Cli, instances: usize) -> Result<Outcome, Failure> {
    let opts = SuiteOptions { seed: cli.seed, instances, grid: cli.grid };
    let checks = run_suite(opts).map_err(at("verify"))?;
    let ok = checks.iter().all(|c| c.passed);
    for c in &checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let list: Vec<Value> = checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect();
    Ok(Outcome {
        ok,
        report: with(
            header("verify", None),
            json!({"seed": cli.seed, "instances": instances, "grid": cli.grid, "passed": ok, "checks": list}),
        ),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.grid == 0 {
        return Err(Failure::input("--grid: must be positive"));
    }
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::input("--tolerance: must be a positive number"));
        }
    }
    match &cli.command {
        Command::Orbit { file } => cmd_orbit(cli, &load(file)?),
        Command::BlaschkeEval { file } => cmd_blaschke_eval(cli, &load(file)?),
        Command::Character { file } => cmd_character(cli, &load(file)?),
        Command::KernelGram { file } => cmd_kernel_gram(cli, &load(file)?),
        Command::PickCheck { file } => cmd_pick_check(cli, &load(file)?),
        Command::OrbitPickCheck { file } => cmd_orbit_pick_check(cli, &load(file)?),
        Command::PickNorm { file } => cmd_pick_norm(cli, &load(file)?),
        Command::Interpolate { file } => cmd_interpolate(cli, &load(file)?),
        Command::AmenableAverage { file } => cmd_amenable_average(&load(file)?),
        Command::BoundaryGram { file } => cmd_boundary_gram(cli, &load(file)?),
        Command::Verify { instances } => cmd_verify(cli, *instances),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{}", report::render(&out.report));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("fpick: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
