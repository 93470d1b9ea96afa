//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use semiflat_core::curvature::{asymptotic_target, curvature_scale, theta_norm_sq};
use semiflat_core::fiber::{cone_angles_of, multiplicity_n_of, Chart, FiberModel, JMultiplicity, PoleFlag};
use semiflat_core::ma::{solve_cma, solve_perturbed, Solution, TorusProblem};
use semiflat_core::semiflat::{default_step, fiber_flat_data, kahler_residual, metric_at, ricci_residual};
use semiflat_core::sl2z::{classify, invariant_vector_rank, order, representative, IntMatrix2, Order};
use semiflat_core::sobolev::{default_dilations, sobolev_probe, RadialProfile};
use semiflat_core::Complex64 as C;
use serde_json::{json, Value};

use crate::acceptance::{run_all, run_criterion, Suite, DEFAULT_SEED, CRITERIA};
use crate::error::{LabError, Result};
use crate::fixtures::{fixture_data, Fixture};
use crate::grid_io::{read_grid, sidecar_path, write_grid, write_sidecar, Grid};
use crate::model_file::read_model;
use crate::output::{emit, json_f64, pretty, Format, Table};
use crate::radii::parse_radii;
use crate::scan::{run_scan, tabulated_angle, ScanKind};
use crate::table::{filtered_rows, registry_table};

#[derive(Debug, Parser)]
#[command(name = "semiflat", version, about = "Semi-flat metrics near Kodaira fibers")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format for tabular commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Apply the built-in tolerance checks; exit 1 if one fails.
    #[arg(long, global = true)]
    pub check: bool,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for data-parallel work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a monodromy matrix (a b; c d).
    #[command(allow_negative_numbers = true)]
    Classify { a: i64, b: i64, c: i64, d: i64 },
    /// Dump the Kodaira table registry.
    Table {
        /// Keep rows of this type (`II*`, `I_b`, `I_3`, ...).
        #[arg(long = "type")]
        kind: Option<String>,
    },
    /// Summarize a model file.
    FiberInfo {
        #[arg(long)]
        model: PathBuf,
    },
    /// Evaluate the metric and its residuals at one point.
    MetricEval {
        #[arg(long)]
        model: PathBuf,
        /// Chart coordinate `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Fiber coordinate `re,im`.
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        w: String,
    },
    /// Radial scan of a model.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
        #[arg(long)]
        model: PathBuf,
        /// `start:stop:count:log|lin`; cylinder depths for `alh`.
        #[arg(long)]
        radii: String,
    },
    /// Solve the complex Monge-Ampere equation on a torus grid.
    MaSolve(MaArgs),
    /// Probe the weighted Sobolev inequality with radial profiles.
    SobolevProbe {
        #[arg(long)]
        beta: u32,
        #[arg(long)]
        alpha: f64,
        /// Comma-separated profile names (default: the standard family).
        #[arg(long, value_delimiter = ',')]
        profiles: Vec<String>,
        /// Dilations as `start:stop:count:log|lin` (default: 2^-4 .. 2^4).
        #[arg(long)]
        dilations: Option<String>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Emit JSON instead of one line per criterion.
        #[arg(long)]
        json: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Args)]
pub struct MaArgs {
    /// Right-hand side grid (binary, or CSV when the name ends in `.csv`).
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    pub input: Option<PathBuf>,
    /// Built-in right-hand side.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Complex dimension for fixtures.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Grid points per axis for fixtures.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Perturbation `ε`; 0 solves the unperturbed equation by continuation.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    /// Write the solution grid here, with a `.json` sidecar.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let g = cli.global;
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(LabError::input("--threads must be positive"));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = g.out.as_deref();
    match cli.command {
        Command::Classify { a, b, c, d } => emit(out, &pretty(&cmd_classify(a, b, c, d)?)),
        Command::Table { kind } => emit(out, &registry_table(&filtered_rows(kind.as_deref())).render(g.format)),
        Command::FiberInfo { model } => emit(out, &pretty(&cmd_fiber_info(&read_model(&model)?)?)),
        Command::MetricEval { model, z, w } => {
            let v = cmd_metric_eval(&read_model(&model)?, parse_complex(&z)?, parse_complex(&w)?)?;
            emit(out, &pretty(&v))?;
            check(g.check, v["checks_passed"].as_bool() == Some(true), "metric-eval")
        }
        Command::Scan { kind, model, radii } => {
            let res = run_scan(kind, &read_model(&model)?, &parse_radii(&radii)?)?;
            emit(out, &res.table.render(g.format))?;
            let failed: Vec<String> = res
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{} = {} (target {}, tol {})", c.name, c.value, c.target, c.tolerance))
                .collect();
            check(g.check, failed.is_empty(), &failed.join("; "))
        }
        Command::MaSolve(args) => {
            let v = cmd_ma(&args)?;
            emit(out, &pretty(&v))?;
            check(g.check, v["checks_passed"].as_bool() == Some(true), "ma-solve")
        }
        Command::SobolevProbe { beta, alpha, profiles, dilations } => {
            let (table, ok) = cmd_sobolev(beta, alpha, &profiles, dilations.as_deref())?;
            emit(out, &table.render(g.format))?;
            check(g.check, ok, "sobolev-probe")
        }
        Command::Verify { json, only } => cmd_verify(out, g.seed, json, &only),
    }
}

fn check(enabled: bool, ok: bool, what: &str) -> Result<()> {
    if enabled && !ok {
        Err(LabError::Check(what.to_string()))
    } else {
        Ok(())
    }
}

/// Parses `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<C> {
    let bad = || LabError::input(format!("{s:?} is not a complex number `re,im`"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    match parts.as_slice() {
        [re] => Ok(C::new(num(re)?, 0.0)),
        [re, im] => Ok(C::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn order_json(o: Order) -> Value {
    match o {
        Order::Finite(n) => json!(n),
        Order::Infinite => json!("inf"),
    }
}

fn matrix_json(m: &IntMatrix2) -> Value {
    let [a, b, c, d] = m.entries();
    json!([[a, b], [c, d]])
}

pub fn cmd_classify(a: i64, b: i64, c: i64, d: i64) -> Result<Value> {
    let m = IntMatrix2::new(a, b, c, d)?;
    let cl = classify(&m)?;
    let (rank, _) = invariant_vector_rank(&m);
    Ok(json!({
        "type": cl.kodaira_type.to_string(),
        "order": order_json(order(&m)),
        "conjugator": cl.conjugator.as_ref().map_or(Value::Null, matrix_json),
        "invariant_rank": rank,
        "bad_cycles": rank,
    }))
}

fn complex_json(z: C) -> Value {
    json!([json_f64(z.re), json_f64(z.im)])
}

pub fn cmd_fiber_info(m: &FiberModel) -> Result<Value> {
    let kind = m.kodaira_type();
    let rep = representative(kind)?;
    let (inc, comp) = cone_angles_of(kind);
    let (rank, _) = invariant_vector_rank(&rep);
    Ok(json!({
        "type": kind.to_string(),
        "matrix": matrix_json(&rep),
        "order": order_json(order(&rep)),
        "bad_cycles": rank,
        "N": multiplicity_n_of(kind),
        "j_multiplicity": match m.j_multiplicity() {
            JMultiplicity::Finite(j) => json!(j),
            JMultiplicity::Isotrivial => json!("inf"),
        },
        "pole_flag": match m.pole() { PoleFlag::Zero => "zero", PoleFlag::MinusD => "minus-D" },
        "epsilon": json_f64(m.epsilon()),
        "alpha": json_f64(m.alpha()),
        "k0": complex_json(m.k0()),
        "chart": match m.chart() { Chart::Z => "z", Chart::U => "u" },
        "flat": m.is_flat(),
        "theta_incomplete": inc.to_string(),
        "theta_complete": comp.to_string(),
        "theta": json_f64(tabulated_angle(m)),
        "complete": m.pole() == PoleFlag::MinusD,
    }))
}

pub fn cmd_metric_eval(m: &FiberModel, s: C, w: C) -> Result<Value> {
    let p = metric_at(m, s, w)?;
    let h = default_step(s);
    let kahler = kahler_residual(m, s, w, h)?.relative();
    let ricci = ricci_residual(m, s, h)?.relative();
    let theta = theta_norm_sq(m, s)?;
    let scale = curvature_scale(m, s)?;
    let flat = fiber_flat_data(m, s)?;
    let mx = &p.matrix;
    let ok = mx.is_positive() && kahler < 1e-6 && ricci < 1e-6;
    Ok(json!({
        "s": complex_json(s),
        "w": complex_json(w),
        "h_zz": json_f64(mx.h_zz),
        "h_ww": json_f64(mx.h_ww),
        "h_zw": complex_json(mx.h_zw),
        "det": json_f64(mx.det()),
        "min_eigenvalue": json_f64(mx.min_eigenvalue()),
        "a_coeff": json_f64(p.a_coeff),
        "b_coeff": json_f64(p.b_coeff),
        "gamma": complex_json(p.gamma),
        "g": complex_json(p.g),
        "fiber_area": json_f64(flat.area),
        "shortest_loop": json_f64(flat.shortest_vector),
        "theta_sq": json_f64(theta),
        "theta_sq_target": asymptotic_target(m, s).map_or(Value::Null, json_f64),
        "curvature_scale": json_f64(scale),
        "kahler_residual": json_f64(kahler),
        "ricci_residual": json_f64(ricci),
        "checks_passed": ok,
    }))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn solve(p: &TorusProblem) -> Result<Solution> {
    Ok(if p.epsilon_perturb > 0.0 { solve_perturbed(p)? } else { solve_cma(p)? })
}

fn mean_free_error(u: &[f64], exact: &[f64]) -> f64 {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    u.iter().zip(exact).map(|(a, b)| (a - mean - b).abs()).fold(0.0, f64::max)
}

pub fn cmd_ma(args: &MaArgs) -> Result<Value> {
    let (m, n, f, exact) = match (&args.input, args.fixture) {
        (Some(path), _) => {
            let g = read_grid(path)?;
            (g.m, g.n, g.data, None)
        }
        (None, Some(fx)) => {
            let (f, exact) = fixture_data(fx, args.m, args.n)?;
            (args.m, args.n, f, exact)
        }
        (None, None) => return Err(LabError::input("give --input or --fixture")),
    };
    let problem = TorusProblem::new(m, n, f)?.with_epsilon(args.epsilon).with_tolerance(args.tol, args.max_iters);
    let sol = solve(&problem)?;
    let (fmax, umax) = (sup(&problem.f), sup(&sol.u));
    let bound_ok = (args.epsilon > 0.0).then(|| umax <= fmax / args.epsilon + args.tol);
    let mut v = json!({
        "m": m,
        "n": n,
        "epsilon": json_f64(args.epsilon),
        "residual_inf": json_f64(sol.residual_inf),
        "iterations": sol.iterations,
        "positivity_margin": json_f64(sol.positivity_margin),
        "trace_min": json_f64(sol.trace_min),
        "shift": json_f64(sol.shift),
        "u_sup": json_f64(umax),
        "f_sup": json_f64(fmax),
        "bound_ok": bound_ok,
    });
    let mut ok = sol.residual_inf <= args.tol && bound_ok != Some(false);
    if let (Some(exact), Some(fx)) = (exact, args.fixture) {
        let err = mean_free_error(&sol.u, &exact);
        v["error_inf"] = json_f64(err);
        if n >= 8 {
            let (fc, ec) = fixture_data(fx, m, n / 2)?;
            let coarse = TorusProblem::new(m, n / 2, fc)?.with_epsilon(args.epsilon).with_tolerance(args.tol, args.max_iters);
            let ord = (mean_free_error(&solve(&coarse)?.u, &ec.unwrap_or_default()) / err).log2();
            v["order"] = json_f64(ord);
            ok &= (ord - 2.0).abs() <= 0.2;
        }
    }
    v["checks_passed"] = json!(ok);
    if let Some(path) = &args.solution {
        write_grid(path, &Grid::new(m, n, sol.u)?)?;
        write_sidecar(
            path,
            &json!({
                "residual_inf": json_f64(sol.residual_inf),
                "iterations": sol.iterations,
                "positivity_margin": json_f64(sol.positivity_margin),
            }),
        )?;
        v["solution"] = json!(path.display().to_string());
        v["sidecar"] = json!(sidecar_path(path).display().to_string());
    }
    Ok(v)
}

pub fn cmd_sobolev(beta: u32, alpha: f64, names: &[String], dilations: Option<&str>) -> Result<(Table, bool)> {
    let profiles: Vec<RadialProfile> = if names.is_empty() {
        RadialProfile::FAMILY.to_vec()
    } else {
        names
            .iter()
            .map(|n| RadialProfile::from_name(n).ok_or_else(|| LabError::input(format!("unknown profile {n:?}"))))
            .collect::<Result<_>>()?
    };
    let lambdas = match dilations {
        Some(spec) => parse_radii(spec)?,
        None => default_dilations(),
    };
    let rep = sobolev_probe(beta, alpha, &profiles, &lambdas)?;
    let mut t = Table::new(&["profile", "lambda", "lhs", "rhs", "ratio"]);
    for s in &rep.samples {
        t.push(vec![s.profile.name().into(), s.lambda.into(), s.lhs.into(), s.rhs.into(), s.ratio.into()]);
    }
    t.summarize("sup_ratio", json_f64(rep.sup_ratio));
    t.summarize("stability_factor", json_f64(rep.stability_factor));
    t.summarize("excluded", rep.excluded.iter().map(|p| p.name()).collect::<Vec<_>>().join(" "));
    let ok = rep.sup_ratio.is_finite() && rep.stability_factor <= 4.0;
    Ok((t, ok))
}

fn cmd_verify(out: Option<&Path>, seed: u64, json: bool, only: &[u8]) -> Result<()> {
    if let Some(bad) = only.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(LabError::input(format!("no criterion {bad}")));
    }
    let suite = Suite::with_seed(seed);
    let results = if only.is_empty() {
        run_all(&suite)
    } else {
        only.iter().filter_map(|&id| run_criterion(id, &suite)).collect()
    };
    let passed = results.iter().filter(|r| r.pass()).count();
    let text = if json {
        pretty(&json!({
            "seed": seed,
            "passed": passed,
            "total": results.len(),
            "criteria": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        }))
    } else {
        let mut s: String = results.iter().map(|r| r.line() + "\n").collect();
        s += &format!("{passed}/{} criteria passed\n", results.len());
        s
    };
    emit(out, &text)?;
    if passed == results.len() {
        Ok(())
    } else {
        Err(LabError::Check(format!("{} of {} criteria failed", results.len() - passed, results.len())))
    }
}
