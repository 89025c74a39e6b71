//! The `voronoi-maps` command line: reproducible, scriptable reports.
//!
//! Four subcommands: `law` extracts an exact finite-size cell-area
//! distribution, `mgf` tabulates its moment generating function against
//! the uniform-law limit, `verify` re-derives the library's internal
//! identities and reports machine-readable pass/fail results, and
//! `bijection` runs both corner constructions on a concrete map.
//!
//! Every command is deterministic: exact arithmetic inside, floats
//! rendered with 17 significant digits. CSV output carries `#`-prefixed
//! metadata lines with a schema tag; JSON reports carry a
//! `schema_version` field and never contain NaN or infinities. Exit
//! codes: 0 success, 1 verification failure, 2 input error. The
//! environment variable `VORONOI_MAPS_THREADS` caps the worker threads
//! used by the exhaustive checks (default: all available).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::enumerate::{self, rooted_iltfm};
use crate::exact::{Coeff, Rational};
use crate::law::{
    self, asym_ratio, f_all_even_odd, law_table, mgf, mgf_limit, uniformity_report, FSeries,
    LawTable, Variant,
};
use crate::maps::{
    ambjorn_budd, check_rebound, miermont_forward, miermont_inverse, parity_classify,
    parse_map_document, serialize_map_document, voronoi_areas, BipointedQuad, MapDocument,
    Parity, PlanarMap,
};
use crate::recursions::{closed_r, closed_r_stabilized, closed_x_diag, solve_r, solve_x};
use crate::scaling;

const EXIT_OK: i32 = 0;
const EXIT_VERIFY_FAILED: i32 = 1;
const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(
    name = "voronoi-maps",
    version,
    about = "Exact Voronoï-cell area laws for bi-pointed random planar maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distribution of the second cell's area at total area N.
    Law {
        /// Total map area (faces of the quadrangulation / edges of the
        /// two-face map).
        #[arg(long)]
        n: usize,
        /// Distance-parity sector: all, even, or odd.
        #[arg(long, default_value = "all")]
        variant: String,
        /// Truncation order in the total area (defaults to N).
        #[arg(long)]
        order: Option<usize>,
        /// Coefficient backend; `float` trades exactness for speed at
        /// large sizes.
        #[arg(long, value_enum, default_value_t = Backend::Exact)]
        backend: Backend,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Output path (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fixed-size moment generating function against the uniform limit.
    Mgf {
        #[arg(long)]
        n: usize,
        /// Evaluation points, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
        mu: Vec<f64>,
        #[arg(long, default_value = "all")]
        variant: String,
        #[arg(long, value_enum, default_value_t = Backend::Exact)]
        backend: Backend,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-run an internal consistency suite; exit 0 iff all checks pass.
    Verify {
        /// One of: recursions, closed-forms, oracle, parity, bijections,
        /// scaling.
        target: String,
        /// Series truncation order where applicable.
        #[arg(long)]
        order: Option<usize>,
        /// Deepest label index for the recursion tables.
        #[arg(long)]
        smax: Option<usize>,
        /// Edge bound for exhaustive enumeration targets.
        #[arg(long)]
        edges: Option<usize>,
        /// Grid preset for the scaling target.
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run both corner constructions on a map and report the images.
    Bijection {
        /// Built-in demo input (`path3`: the two-edge path with marked
        /// endpoints).
        #[arg(long, conflicts_with = "input")]
        demo: Option<String>,
        /// Map document with `mark v1` и `mark v2` lines.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT_ERROR
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Law {
            n,
            variant,
            order,
            backend,
            format,
            output,
        } => {
            let variant: Variant = variant.parse()?;
            let text = match backend {
                Backend::Exact => law_report::<Rational>(n, variant, order, format)?,
                Backend::Float => law_report::<f64>(n, variant, order, format)?,
            };
            write_output(output, &text)?;
            Ok(EXIT_OK)
        }
        Command::Mgf {
            n,
            mu,
            variant,
            backend,
            format,
            output,
        } => {
            let variant: Variant = variant.parse()?;
            let text = match backend {
                Backend::Exact => mgf_report::<Rational>(n, variant, &mu, format)?,
                Backend::Float => mgf_report::<f64>(n, variant, &mu, format)?,
            };
            write_output(output, &text)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            target,
            order,
            smax,
            edges,
            grid,
            output,
        } => {
            let report = match target.as_str() {
                "recursions" => verify_recursions(order.unwrap_or(16), smax),
                "closed-forms" => verify_closed_forms(order.unwrap_or(14)),
                "oracle" => verify_oracle(edges.unwrap_or(4)),
                "parity" => verify_parity(edges.unwrap_or(4)),
                "bijections" => verify_bijections(edges.unwrap_or(4)),
                "scaling" => verify_scaling(&grid),
                other => return Err(format!("unknown verify target `{other}`")),
            }?;
            let text =
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n";
            write_output(output, &text)?;
            Ok(if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Bijection {
            demo,
            input,
            output,
        } => {
            let (doc, source) = match (demo, input) {
                (Some(name), None) => (builtin_demo(&name)?, format!("demo:{name}")),
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let doc = parse_map_document(&text).map_err(|e| e.to_string())?;
                    (doc, path.display().to_string())
                }
                _ => return Err("provide exactly one of --demo or --input".into()),
            };
            let text = bijection_report(doc, &source)?;
            write_output(output, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn write_output(path: Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 17 significant digits: enough to round-trip any f64, and deterministic.
fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

fn build_f<C: Coeff>(order: usize, variant: Variant) -> Result<FSeries<C>, String> {
    law::f_series(2 * order, variant).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------
// law

#[derive(Serialize)]
struct LawRowJson {
    p: usize,
    n: f64,
    weight: String,
    probability: f64,
    scaled_deviation: f64,
}

#[derive(Serialize)]
struct LawJson {
    schema_version: u32,
    n: usize,
    variant: String,
    backend: String,
    normalization: String,
    rows: Vec<LawRowJson>,
    window: (usize, usize),
    max_dev_interior: f64,
    mean_dev_interior: f64,
    endpoint_devs: Vec<(usize, f64)>,
}

fn law_json<C: Coeff + 'static>(
    n: usize,
    variant: Variant,
    order: Option<usize>,
) -> Result<LawJson, String> {
    let order = order.unwrap_or(n);
    let f = build_f::<C>(order, variant)?;
    let table = law_table(&f, n).map_err(|e| e.to_string())?;
    let report = uniformity_report(&table);
    let rows = (0..=2 * n)
        .map(|p| LawRowJson {
            p,
            n: p as f64 / 2.0,
            weight: table.weights()[p].to_string(),
            probability: table.probabilities()[p].to_f64(),
            scaled_deviation: report.deviations[p],
        })
        .collect();
    Ok(LawJson {
        schema_version: 1,
        n,
        variant: variant.name().to_string(),
        backend: if std::any::TypeId::of::<C>() == std::any::TypeId::of::<f64>() {
            "float".into()
        } else {
            "exact".into()
        },
        normalization: table.normalization().to_string(),
        rows,
        window: report.window,
        max_dev_interior: report.max_dev_interior,
        mean_dev_interior: report.mean_dev_interior,
        endpoint_devs: report.endpoint_devs,
    })
}

fn law_report<C: Coeff + 'static>(
    n: usize,
    variant: Variant,
    order: Option<usize>,
    format: OutputFormat,
) -> Result<String, String> {
    let json = law_json::<C>(n, variant, order)?;
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(&json).unwrap() + "\n"),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# schema: voronoi-maps/law/1");
            let _ = writeln!(out, "# n: {}", json.n);
            let _ = writeln!(out, "# variant: {}", json.variant);
            let _ = writeln!(out, "# backend: {}", json.backend);
            let _ = writeln!(out, "# normalization: {}", json.normalization);
            let _ = writeln!(out, "p,n,weight,probability,scaled_deviation");
            for r in &json.rows {
                let _ = writeln!(
                    out,
                    "{},{:.1},{},{},{}",
                    r.p,
                    r.n,
                    r.weight,
                    float17(r.probability),
                    float17(r.scaled_deviation)
                );
            }
            let _ = writeln!(
                out,
                "# interior_window: {}..{}",
                json.window.0, json.window.1
            );
            let _ = writeln!(
                out,
                "# max_dev_interior: {}",
                float17(json.max_dev_interior)
            );
            let _ = writeln!(
                out,
                "# mean_dev_interior: {}",
                float17(json.mean_dev_interior)
            );
            for (p, d) in &json.endpoint_devs {
                let _ = writeln!(out, "# endpoint_dev: p={} {}", p, float17(*d));
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------
// mgf

#[derive(Serialize)]
struct MgfJson {
    schema_version: u32,
    n: usize,
    variant: String,
    backend: String,
    rows: Vec<MgfRowJson>,
}

#[derive(Serialize)]
struct MgfRowJson {
    mu: f64,
    expectation: f64,
    limit: f64,
    relative_gap: f64,
}

fn mgf_report<C: Coeff + 'static>(
    n: usize,
    variant: Variant,
    mus: &[f64],
    format: OutputFormat,
) -> Result<String, String> {
    let f = build_f::<C>(n, variant)?;
    let table = law_table(&f, n).map_err(|e| e.to_string())?;
    let rows: Vec<MgfRowJson> = mus
        .iter()
        .map(|&mu| {
            let e = mgf(&table, mu);
            let lim = mgf_limit(mu);
            MgfRowJson {
                mu,
                expectation: e,
                limit: lim,
                relative_gap: (e - lim).abs() / lim.abs(),
            }
        })
        .collect();
    let json = MgfJson {
        schema_version: 1,
        n,
        variant: variant.name().to_string(),
        backend: if std::any::TypeId::of::<C>() == std::any::TypeId::of::<f64>() {
            "float".into()
        } else {
            "exact".into()
        },
        rows,
    };
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(&json).unwrap() + "\n"),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# schema: voronoi-maps/mgf/1");
            let _ = writeln!(out, "# n: {}", json.n);
            let _ = writeln!(out, "# variant: {}", json.variant);
            let _ = writeln!(out, "# backend: {}", json.backend);
            let _ = writeln!(out, "mu,expectation,limit,relative_gap");
            for r in &json.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    float17(r.mu),
                    float17(r.expectation),
                    float17(r.limit),
                    float17(r.relative_gap)
                );
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------
// verify

#[derive(Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub target: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

struct Checker {
    checks: Vec<CheckResult>,
}

impl Checker {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn exact(&mut self, name: &str, ok: bool, counterexample: impl FnOnce() -> String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: ok,
            residual: None,
            tolerance: None,
            counterexample: if ok { None } else { Some(counterexample()) },
        });
    }

    fn bounded(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: residual <= tolerance,
            residual: Some(residual),
            tolerance: Some(tolerance),
            counterexample: None,
        });
    }

    fn finish(self, target: &str) -> VerifyReport {
        VerifyReport {
            schema_version: 1,
            target: target.to_string(),
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
        }
    }
}

fn verify_recursions(order: usize, smax: Option<usize>) -> Result<VerifyReport, String> {
    let smax = smax.unwrap_or(order + 2).max(order + 2);
    let mut c = Checker::new();
    let table = solve_r::<Rational>(smax, order).map_err(|e| e.to_string())?;
    let g = crate::exact::UniSeries::monomial(Rational::from_i64(1), 1, order);
    let mut residual_ok = true;
    let mut bad = String::new();
    for s in 1..smax {
        let sum = table
            .entry(s - 1)
            .add(table.entry(s))
            .add(table.entry(s + 1));
        let rhs = crate::exact::UniSeries::one(order).add(&g.mul(&table.entry(s).mul(&sum)));
        if table.entry(s) != &rhs {
            residual_ok = false;
            bad = format!("tree recursion residual nonzero at s={s}");
            break;
        }
    }
    c.exact("tree recursion residual zero", residual_ok, || bad.clone());
    c.exact(
        "tree entries stabilize beyond the order",
        table.entry(order + 1) == table.stabilized()
            && table.entry(order + 2) == table.stabilized(),
        || "deep entries differ from the stabilized series".into(),
    );
    let nonneg = (1..=smax).all(|s| {
        (0..=order).all(|k| !table.entry(s).coeff(k).map(|v| v.is_negative()).unwrap_or(true))
    });
    c.exact("tree coefficients are non-negative counts", nonneg, || {
        "negative coefficient".into()
    });

    let xorder = order.min(12);
    let xsmax = xorder / 2 + 2;
    let xt = solve_x::<Rational>(xsmax, xorder).map_err(|e| e.to_string())?;
    c.exact(
        "chain entries stabilize at every offset",
        xt.entry(xsmax, xsmax) == xt.stabilized()
            && xt.entry(xsmax - 1, xsmax) == xt.stabilized()
            && xt.entry(xsmax, xsmax - 1) == xt.stabilized(),
        || "deep chain entry differs from the stabilized series".into(),
    );
    let swaps = (0..xsmax).all(|s| &xt.entry(s, s + 1).swap_uv() == xt.entry(s + 1, s));
    c.exact("chain off-diagonals are weight swaps", swaps, || {
        "swap asymmetry".into()
    });
    Ok(c.finish("recursions"))
}

fn verify_closed_forms(order: usize) -> Result<VerifyReport, String> {
    let mut c = Checker::new();
    let r_order = order.max(20);
    let table = solve_r::<Rational>(r_order + 1, r_order).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut bad = String::new();
    for s in 1..=8 {
        if &closed_r(s, r_order) != table.entry(s) {
            ok = false;
            bad = format!("closed form differs from the recursion at s={s}");
            break;
        }
    }
    c.exact("tree closed form equals the recursion", ok, || bad.clone());
    c.exact(
        "stabilized closed form equals the recursion limit",
        &closed_r_stabilized(r_order) == table.stabilized(),
        || "stabilized mismatch".into(),
    );
    let xt = solve_x::<Rational>(order + 1, 2 * order).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut bad = String::new();
    'outer: for s in 0..=6usize {
        for t in [s.saturating_sub(1), s, s + 1] {
            if s.abs_diff(t) > 1 || s.max(t) > 6 {
                continue;
            }
            let diag = xt
                .entry(s, t)
                .diagonal_in_g()
                .map_err(|e| e.to_string())?;
            if diag != closed_x_diag(s, t, order) {
                ok = false;
                bad = format!("chain diagonal differs at ({s},{t})");
                break 'outer;
            }
        }
    }
    c.exact("chain closed form equals the solver on the diagonal", ok, || {
        bad.clone()
    });
    let f = law::f_series::<Rational>(2 * order, Variant::All).map_err(|e| e.to_string())?;
    let diag = f.series().diagonal_in_g().map_err(|e| e.to_string())?;
    c.exact(
        "two-face diagonal equals its logarithmic closed form",
        diag == law::f_diagonal_closed_form(order),
        || "diagonal mismatch".into(),
    );
    Ok(c.finish("closed-forms"))
}

fn verify_oracle(edges: usize) -> Result<VerifyReport, String> {
    let mut c = Checker::new();
    let oracle = enumerate::oracle_f(edges);
    let f = law::f_series::<Rational>(2 * edges, Variant::All).map_err(|e| e.to_string())?;
    for area in 1..=edges {
        let mut ok = true;
        let mut bad = String::new();
        for p in 0..=2 * area {
            let (i, j) = (2 * area - p, p);
            let lhs = oracle.coeff(i, j).map_err(|e| e.to_string())?;
            let rhs = f.series().coeff(i, j).map_err(|e| e.to_string())?;
            if lhs != rhs {
                ok = false;
                bad = format!("stratum {area}: coefficient ({i},{j}) is {lhs} vs {rhs}");
                break;
            }
        }
        c.exact(
            &format!("stratum {area} matches the enumeration"),
            ok,
            || bad.clone(),
        );
    }
    Ok(c.finish("oracle"))
}

fn verify_parity(edges: usize) -> Result<VerifyReport, String> {
    let mut c = Checker::new();
    let (all, even, odd) = f_all_even_odd::<Rational>(2 * edges).map_err(|e| e.to_string())?;
    c.exact(
        "even + odd equals the full series",
        even.series().add(odd.series()) == *all.series(),
        || "parity sum mismatch".into(),
    );
    let (oracle_even, oracle_odd) = enumerate::oracle_parity_split(edges);
    c.exact(
        "even sector matches the enumeration",
        &oracle_even == even.series(),
        || "even sector mismatch".into(),
    );
    c.exact(
        "odd sector matches the enumeration",
        &oracle_odd == odd.series(),
        || "odd sector mismatch".into(),
    );
    Ok(c.finish("parity"))
}

fn verify_bijections(edges: usize) -> Result<VerifyReport, String> {
    let mut c = Checker::new();
    let mut objects = Vec::new();
    for e in 1..=edges {
        objects.extend(rooted_iltfm(e));
    }
    let failures = parallel_collect_failures(&objects, |obj| {
        let m = &obj.iltfm;
        let q = miermont_inverse(m).map_err(|e| e.to_string())?;
        if q.map.faces().n_faces() != obj.edges() {
            return Err("face count not preserved".into());
        }
        if q.mark_distance() as i64 != 2 * m.min_loop_label() {
            return Err("mark distance is not twice the loop minimum".into());
        }
        let back = miermont_forward(&q).map_err(|e| e.to_string())?;
        if back.canonical_code() != m.canonical_code() {
            return Err("forward(inverse) is not the identity".into());
        }
        let (a1, a2) = voronoi_areas(m);
        if a1 + a2 != Rational::from_i64(obj.edges() as i64) {
            return Err("cell areas do not sum to the edge count".into());
        }
        let g = ambjorn_budd(&q).map_err(|e| e.to_string())?;
        if g.map.n_edges() != obj.edges() {
            return Err("general image edge count not preserved".into());
        }
        let (parity, _) = parity_classify(m);
        if (g.mark_distance() % 2 == 0) != (parity == Parity::Even) {
            return Err("parity class disagrees with the general-map distance".into());
        }
        let rebound = check_rebound(&q).map_err(|e| e.to_string())?;
        if !rebound.is_empty() {
            return Err(format!("rebound violations: {}", rebound.join("; ")));
        }
        Ok(())
    });
    c.exact(
        &format!(
            "round trips, distances, parity and rebound for all {} objects up to {} edges",
            objects.len(),
            edges
        ),
        failures.is_empty(),
        || failures.join("; "),
    );
    Ok(c.finish("bijections"))
}

fn verify_scaling(grid: &str) -> Result<VerifyReport, String> {
    if grid != "default" {
        return Err(format!("unknown grid preset `{grid}`"));
    }
    let mut c = Checker::new();
    let mut worst: f64 = 0.0;
    let ws = [0.7, 1.0, 1.3];
    let ss = [0.2, 0.5, 1.0, 2.0, 3.0];
    for &a in &ws {
        for &b in &ws {
            if a == b {
                continue;
            }
            let f = scaling::ScalingFn::two_weight(a, b).map_err(|e| e.to_string())?;
            for &s in &ss {
                for &t in &ss {
                    worst = worst.max(f.pde_residual_at(s, t));
                }
            }
        }
    }
    c.bounded("scaling PDE residual on the standard grid", worst, 1e-8);
    let eqf = scaling::ScalingFn::equal_weight(1.0);
    let mut worst_eq: f64 = 0.0;
    for &s in &ss {
        for &t in &ss {
            worst_eq = worst_eq.max(eqf.pde_residual_at(s, t));
        }
    }
    c.bounded("scaling PDE residual, equal weights", worst_eq, 1e-8);

    let (a, b) = (1.0, 1.3);
    c.exact(
        "primitive vanishes at zero",
        scaling::k_fn(0.0, a, b).map_err(|e| e.to_string())? == 0.0,
        || "K(0) != 0".into(),
    );
    let kp = scaling::KPrimitive::new(a, b).map_err(|e| e.to_string())?;
    let f = scaling::ScalingFn::two_weight(a, b).map_err(|e| e.to_string())?;
    let mut worst_fd: f64 = 0.0;
    for i in 1..=9 {
        let sigma = i as f64 / 10.0;
        let d = 1e-5;
        let fd = (kp.eval(sigma + d) - kp.eval(sigma - d)) / (2.0 * d);
        let tau = sigma.powf(b / a);
        let analytic = b * tau / 3.0 * f.d2xi_dsigma_dtau(sigma, tau);
        worst_fd = worst_fd.max(((fd - analytic) / analytic).abs());
    }
    c.bounded("primitive identity by central differences", worst_fd, 1e-5);

    let cc = (a * a - a * b + b * b) * (a * a + a * b + b * b) / (18.0 * (a * a + b * b));
    let kk = |eps: f64| kp.eval_from_complement(-(-a * eps).exp_m1()) - 0.25 / (eps * eps);
    let extrapolated = (4.0 * kk(1e-2) - kk(2e-2)) / 3.0;
    c.bounded(
        "primitive expansion constant",
        (extrapolated + cc).abs() / cc.abs(),
        1e-5,
    );
    let ident = (cc + scaling::singularity_coefficient(a, b)).abs() / cc.abs();
    c.bounded("singularity coefficient algebraic identity", ident, 1e-12);

    let mut worst_contour: f64 = 0.0;
    for &mu in &[0.1, 1.0, 4.0] {
        let cv = scaling::contour_value(mu).map_err(|e| e.to_string())?;
        worst_contour =
            worst_contour.max((cv.total - cv.closed_form).abs() / cv.closed_form.abs());
    }
    c.bounded("contour total equals the closed form", worst_contour, 1e-8);

    let fi = scaling::first_integral_check(1e-3, a, b).map_err(|e| e.to_string())?;
    c.bounded("first integral equals the primitive", fi, 1e-6);

    let mut worst_bridge: f64 = 0.0;
    for &eps in &[0.02, 0.01] {
        for &big_s in &[1.0, 2.0] {
            let rep = scaling::local_limit_bridge(big_s, eps, 1.0).map_err(|e| e.to_string())?;
            worst_bridge = worst_bridge.max(rep.rel_gap / (5.0 * eps));
        }
    }
    c.bounded(
        "local limit bridges to the scaling function within 5 epsilon (relative)",
        worst_bridge,
        1.0,
    );
    Ok(c.finish("scaling"))
}

/// Run per-object checks across worker threads (capped by
/// `VORONOI_MAPS_THREADS`), returning failure messages in object order.
fn parallel_collect_failures<T: Sync>(
    items: &[T],
    check: impl Fn(&T) -> Result<(), String> + Sync,
) -> Vec<String> {
    let threads = thread_count().min(items.len().max(1));
    let chunk = items.len().div_ceil(threads);
    let mut results: Vec<Vec<String>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk.max(1))
            .enumerate()
            .map(|(offset, slice)| {
                let check = &check;
                scope.spawn(move || {
                    slice
                        .iter()
                        .enumerate()
                        .filter_map(|(i, item)| {
                            check(item)
                                .err()
                                .map(|e| format!("object {}: {e}", offset * chunk + i))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("worker panicked"));
        }
    });
    results.into_iter().flatten().collect()
}

fn thread_count() -> usize {
    std::env::var("VORONOI_MAPS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

// ---------------------------------------------------------------------
// bijection

fn builtin_demo(name: &str) -> Result<MapDocument, String> {
    match name {
        "path3" => {
            let map = PlanarMap::from_rotations(
                vec![vec![0], vec![1, 2], vec![3]],
                vec![1, 0, 3, 2],
                None,
            )
            .expect("demo map is valid");
            Ok(MapDocument {
                map,
                v1: Some(0),
                v2: Some(2),
                f1_dart: None,
                f2_dart: None,
            })
        }
        other => Err(format!("unknown demo `{other}` (available: path3)")),
    }
}

fn bijection_report(doc: MapDocument, source: &str) -> Result<String, String> {
    let (v1, v2) = match (doc.v1, doc.v2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err("input must mark v1 and v2".into()),
    };
    let quad = BipointedQuad::new(doc.map, v1, v2).map_err(|e| e.to_string())?;
    let labelled = crate::maps::label_bipointed(&quad).map_err(|e| e.to_string())?;
    let m = miermont_forward(&quad).map_err(|e| e.to_string())?;
    let g = ambjorn_budd(&quad).map_err(|e| e.to_string())?;
    let (area1, area2) = voronoi_areas(&m);
    let (parity, s) = parity_classify(&m);
    let round_trip = {
        let q2 = miermont_inverse(&m).map_err(|e| e.to_string())?;
        let marks = |q: &BipointedQuad| crate::maps::CodeMarks {
            use_labels: false,
            f1_dart: None,
            v1: Some(q.v1),
            v2: Some(q.v2),
        };
        q2.map.canonical_code(&marks(&q2)) == quad.map.canonical_code(&marks(&quad))
    };

    let mut out = String::new();
    let _ = writeln!(out, "# voronoi-maps bijection report");
    let _ = writeln!(out, "# input: {source}");
    let _ = writeln!(out, "# labelled input (min-distance labels):");
    out.push_str(&serialize_map_document(&MapDocument {
        map: labelled,
        v1: Some(quad.v1),
        v2: Some(quad.v2),
        f1_dart: None,
        f2_dart: None,
    }));
    let _ = writeln!(out, "# two-face image:");
    out.push_str(&serialize_map_document(&MapDocument {
        map: m.map.clone(),
        v1: None,
        v2: None,
        f1_dart: Some(m.f1_dart),
        f2_dart: Some(m.f2_dart),
    }));
    let _ = writeln!(out, "# cell areas: {area1} {area2}");
    let _ = writeln!(
        out,
        "# parity: {} s={s}",
        match parity {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    );
    let _ = writeln!(out, "# mark distance in input: {}", quad.mark_distance());
    let _ = writeln!(out, "# general-map image:");
    out.push_str(&serialize_map_document(&MapDocument {
        map: g.map.clone(),
        v1: Some(g.v1),
        v2: Some(g.v2),
        f1_dart: None,
        f2_dart: None,
    }));
    let _ = writeln!(out, "# general mark distance: {}", g.mark_distance());
    let _ = writeln!(out, "# roundtrip identity: {round_trip}");
    Ok(out)
}

// ---------------------------------------------------------------------
// shared helpers for the acceptance suite and examples

/// Convenience: exact law plus flat-comparison statistics at size `n`.
pub fn law_with_report(
    f: &FSeries<Rational>,
    n: usize,
) -> Result<(LawTable<Rational>, law::UniformityReport, f64), String> {
    let table = law_table(f, n).map_err(|e| e.to_string())?;
    let report = uniformity_report(&table);
    let ratio = asym_ratio(&table);
    Ok((table, report, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_csv_matches_expected_values() {
        let text = law_report::<Rational>(2, Variant::All, None, OutputFormat::Csv).unwrap();
        assert!(text.contains("# schema: voronoi-maps/law/1"));
        assert!(text.contains("# normalization: 11/2"));
        // probabilities 0, 4/11, 3/11, 4/11, 0
        assert!(text.contains("1,0.5,2,3.6363636363636365e-1"));
        assert!(text.contains("2,1.0,3/2,2.7272727272727271e-1"));
        // deterministic output
        let again = law_report::<Rational>(2, Variant::All, None, OutputFormat::Csv).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn law_probabilities_sum_to_one() {
        let json = law_json::<Rational>(3, Variant::All, None).unwrap();
        let total: f64 = json.rows.iter().map(|r| r.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mgf_zero_row_is_exact() {
        let text = mgf_report::<Rational>(2, Variant::All, &[0.0, 1.0], OutputFormat::Csv)
            .unwrap();
        assert!(text.contains("0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0"));
        // e - 1 = 1.718281828...
        assert!(text.contains("1.7182818284590451e0"));
    }

    #[test]
    fn verify_targets_pass() {
        for (target, report) in [
            ("recursions", verify_recursions(8, None).unwrap()),
            ("closed-forms", verify_closed_forms(8).unwrap()),
            ("oracle", verify_oracle(3).unwrap()),
            ("parity", verify_parity(3).unwrap()),
            ("bijections", verify_bijections(3).unwrap()),
        ] {
            assert!(report.passed, "{target} failed: {:?}", report.checks.iter().filter(|c| !c.passed).map(|c| &c.name).collect::<Vec<_>>());
        }
    }

    #[test]
    fn bijection_demo_report() {
        let doc = builtin_demo("path3").unwrap();
        let text = bijection_report(doc, "demo:path3").unwrap();
        assert!(text.contains("# cell areas: 1/2 1/2"));
        assert!(text.contains("# parity: odd s=1"));
        assert!(text.contains("# roundtrip identity: true"));
        assert!(text.contains("# general mark distance: 1"));
    }
}
