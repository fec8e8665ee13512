//! Command-line front end: classification, basis evaluation, norms,
//! distribution reports, the cohomological-equation solver, ergodic-average
//! experiments, rate tables, and the verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use horomap::config::Config;
use horomap::dist::{DistKind, InvariantDistribution};
use horomap::error::{HoromapError, Result};
use horomap::harness::{
    ergodic_average, exponent_table, predict_ergodic_bound, AssemblyComponent, SpectralAssembly,
};
use horomap::models::{basis_eval, Chart, Model, SpectralFunction};
use horomap::report::{
    checks_to_csv, dist_rows_to_csv, render_check_table, DistReportRow, OutputFormat, SolveReport,
};
use horomap::sl2::{classify, BasisName, SeriesKind};
use horomap::solver::{solve_with_options, SolveMethod, SolveOptions};
use horomap::verify::{run_all, run_suite, SUITES};

#[derive(Parser)]
#[command(
    name = "horomap",
    version,
    about = "Horocycle-map cohomological equations in SL(2,R) representation models"
)]
struct Cli {
    /// TOML configuration file (grids, tolerances, windows).
    #[arg(long, global = true, value_name = "path.toml")]
    config: Option<PathBuf>,
    /// Seed for the random verification battery.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

/// `--output json|csv` for report-shaped subcommands.
#[derive(Args)]
struct Format {
    /// Report encoding.
    #[arg(long, value_name = "json|csv", default_value = "json")]
    output: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a Casimir parameter into its series and spectral parameter.
    Classify {
        /// Casimir parameter of the irreducible component.
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[command(flatten)]
        format: Format,
    },
    /// Evaluate a basis vector at a chart point, or print the Lie-algebra
    /// basis matrices.
    Basis {
        /// Print the five basis matrices U, V, X, Y, Theta and exit.
        #[arg(long, conflicts_with_all = ["mu", "k", "chart"])]
        algebra: bool,
        #[arg(long, required_unless_present = "algebra")]
        mu: Option<f64>,
        /// Basis index.
        #[arg(long, required_unless_present = "algebra", allow_hyphen_values = true)]
        k: Option<i64>,
        /// Chart: line, circle, halfplane, or disk.
        #[arg(long, default_value = "auto")]
        chart: String,
        /// Real part of the evaluation point.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        re: f64,
        /// Imaginary part of the evaluation point.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
        #[command(flatten)]
        format: Format,
    },
    /// Sobolev norms of a coefficient vector loaded from JSON.
    Norm {
        /// Input function as {mu, chart, k_min, coeffs} JSON.
        #[arg(long, value_name = "f.json")]
        input: PathBuf,
        /// Sobolev orders to report (repeatable).
        #[arg(long = "s", value_name = "order", allow_hyphen_values = true)]
        orders: Vec<f64>,
        #[command(flatten)]
        format: Format,
    },
    /// Evaluate the invariant-distribution family on a function.
    Dist {
        /// Input function as {mu, chart, k_min, coeffs} JSON.
        #[arg(long, value_name = "f.json")]
        input: PathBuf,
        /// Translation period for the frequency family.
        #[arg(long = "T", default_value_t = 1.0)]
        t_period: f64,
        /// Track frequencies k/T for |k| up to this bound.
        #[arg(long, default_value_t = 2)]
        k_max: i64,
        /// Highest derivative order of the boundary-jet family.
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Fixed evaluation height for the discrete-series family
        /// (default: a height adapted to each frequency).
        #[arg(long)]
        y: Option<f64>,
        #[command(flatten)]
        format: Format,
    },
    /// Solve u(. - T) - u = f and write the solve report.
    Solve {
        /// Casimir parameter; must match the input file.
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        /// Translation period.
        #[arg(long = "T")]
        t_shift: f64,
        /// Jet-removal order.
        #[arg(long)]
        order: Option<usize>,
        /// series, fourier, or auto.
        #[arg(long, default_value = "auto")]
        method: SolveMethod,
        /// Input function as {mu, chart, k_min, coeffs} JSON.
        #[arg(long, value_name = "f.json")]
        input: PathBuf,
        /// Report destination; the solution grid lands next to it.
        #[arg(long, value_name = "report.json")]
        output: PathBuf,
    },
    /// Ergodic averages along the translation orbit against the predicted
    /// equidistribution bound.
    Ergodic {
        /// Input function as {mu, chart, k_min, coeffs} JSON.
        #[arg(long, value_name = "f.json")]
        input: PathBuf,
        /// Translation period.
        #[arg(long = "T", default_value_t = 1.0)]
        t_period: f64,
        /// Orbit start (real part; discrete-series orbits run at height 1).
        #[arg(long, default_value_t = 0.37, allow_hyphen_values = true)]
        x: f64,
        /// Average lengths to report (repeatable).
        #[arg(long = "N", value_name = "N")]
        lengths: Vec<usize>,
        /// Spectral gap entering the bound formulas.
        #[arg(long)]
        mu0: Option<f64>,
        /// Sobolev regularity the bound assumes (>= 6; >= 14 adds the
        /// nonzero-frequency rows).
        #[arg(long, default_value_t = 6.0)]
        s: f64,
        #[command(flatten)]
        format: Format,
    },
    /// Equidistribution-rate exponent table for one component.
    Rate {
        /// Casimir parameter of the component.
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        /// Spectral gap of the ambient spectrum.
        #[arg(long)]
        mu0: f64,
        #[command(flatten)]
        format: Format,
    },
    /// Run a verification suite (or all of them) and print the check table.
    Verify {
        /// Suite name; omit to run every suite.
        suite: Option<String>,
        /// List the available suite names and exit.
        #[arg(long)]
        list: bool,
        /// Report encoding for the check rows (default: aligned table).
        #[arg(long, value_name = "json|csv")]
        output: Option<OutputFormat>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.seed.unwrap_or(cfg.verify.seed);
    match cli.command {
        Command::Classify { mu, format } => cmd_classify(mu, format.output),
        Command::Basis { algebra, mu, k, chart, re, im, format } => {
            if algebra {
                cmd_basis_algebra(format.output)
            } else {
                cmd_basis_eval(mu.unwrap(), k.unwrap(), &chart, C64::new(re, im), format.output)
            }
        }
        Command::Norm { input, orders, format } => cmd_norm(&cfg, &input, &orders, format.output),
        Command::Dist { input, t_period, k_max, order, y, format } => {
            cmd_dist(&cfg, &input, t_period, k_max, order, y, format.output)
        }
        Command::Solve { mu, t_shift, order, method, input, output } => {
            cmd_solve(&cfg, mu, t_shift, order, method, &input, &output)
        }
        Command::Ergodic { input, t_period, x, lengths, mu0, s, format } => {
            cmd_ergodic(&cfg, &input, t_period, x, &lengths, mu0, s, format.output)
        }
        Command::Rate { mu, mu0, format } => cmd_rate(mu, mu0, format.output),
        Command::Verify { suite, list, output } => cmd_verify(&cfg, seed, suite.as_deref(), list, output),
    }
}

fn parse_chart(name: &str, kind: SeriesKind) -> Result<Chart> {
    match name {
        "line" => Ok(Chart::Line),
        "circle" => Ok(Chart::Circle),
        "halfplane" => Ok(Chart::HalfPlane),
        "disk" => Ok(Chart::Disk),
        "auto" => Ok(Chart::default_for(kind)),
        other => Err(HoromapError::Config(format!(
            "unknown chart '{other}' (expected line, circle, halfplane, or disk)"
        ))),
    }
}

fn print_rows_csv(header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| HoromapError::Config(format!("csv flush: {e}")))?;
    print!("{}", String::from_utf8(bytes).map_err(|e| HoromapError::Config(format!("csv utf8: {e}")))?);
    Ok(())
}

fn cmd_classify(mu: f64, format: OutputFormat) -> Result<ExitCode> {
    let series = classify(mu)?;
    let kind = match series.kind {
        SeriesKind::Principal => "principal",
        SeriesKind::Complementary => "complementary",
        SeriesKind::Discrete => "discrete",
    };
    match format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "mu": series.mu,
                "kind": kind,
                "nu": [series.nu.re, series.nu.im],
                "lowest_weight": series.lowest_weight,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OutputFormat::Csv => {
            let lw = series.lowest_weight.map(|n| n.to_string()).unwrap_or_default();
            print_rows_csv(
                &["mu", "kind", "nu_re", "nu_im", "lowest_weight"],
                &[vec![
                    series.mu.to_string(),
                    kind.into(),
                    series.nu.re.to_string(),
                    series.nu.im.to_string(),
                    lw,
                ]],
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis_algebra(format: OutputFormat) -> Result<ExitCode> {
    match format {
        OutputFormat::Json => {
            let mut doc = serde_json::Map::new();
            for name in BasisName::ALL {
                let el = name.element();
                doc.insert(format!("{:?}", el.name), serde_json::json!(el.matrix));
            }
            println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(doc))?);
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = BasisName::ALL
                .into_iter()
                .map(|name| {
                    let el = name.element();
                    let m = el.matrix;
                    vec![
                        format!("{:?}", el.name),
                        m[0][0].to_string(),
                        m[0][1].to_string(),
                        m[1][0].to_string(),
                        m[1][1].to_string(),
                    ]
                })
                .collect();
            print_rows_csv(&["name", "a", "b", "c", "d"], &rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis_eval(
    mu: f64,
    k: i64,
    chart: &str,
    point: C64,
    format: OutputFormat,
) -> Result<ExitCode> {
    let series = classify(mu)?;
    let chart = parse_chart(chart, series.kind)?;
    let value = basis_eval(&series, k, point, chart)?;
    match format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "mu": mu,
                "k": k,
                "chart": chart,
                "point": [point.re, point.im],
                "value": [value.re, value.im],
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OutputFormat::Csv => print_rows_csv(
            &["mu", "k", "chart", "point_re", "point_im", "value_re", "value_im"],
            &[vec![
                mu.to_string(),
                k.to_string(),
                chart.to_string(),
                point.re.to_string(),
                point.im.to_string(),
                value.re.to_string(),
                value.im.to_string(),
            ]],
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn load_function(cfg: &Config, path: &Path) -> Result<(Model, SpectralFunction)> {
    let f = SpectralFunction::from_json(&std::fs::read_to_string(path)?)?;
    let spread = f.k_max().abs().max(f.k_min.abs());
    let model = Model::new(f.mu, cfg.model.window.max(spread), cfg.quad)?;
    Ok((model, f))
}

fn cmd_norm(cfg: &Config, input: &Path, orders: &[f64], format: OutputFormat) -> Result<ExitCode> {
    let (model, f) = load_function(cfg, input)?;
    let orders: Vec<f64> = if orders.is_empty() { vec![0.0, 1.0, 2.0] } else { orders.to_vec() };
    let mut rows = Vec::new();
    for &s in &orders {
        rows.push((s, model.sobolev_norm(&f, s)?));
    }
    match format {
        OutputFormat::Json => {
            let doc = serde_json::json!({ "mu": f.mu, "norms": rows });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> =
                rows.iter().map(|(s, v)| vec![s.to_string(), v.to_string()]).collect();
            print_rows_csv(&["s", "norm"], &rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dist(
    cfg: &Config,
    input: &Path,
    t_period: f64,
    k_max: i64,
    order: usize,
    y: Option<f64>,
    format: OutputFormat,
) -> Result<ExitCode> {
    let (model, f) = load_function(cfg, input)?;
    let mut kinds = vec![DistKind::Delta0];
    for r in 1..=order {
        kinds.push(DistKind::DeltaR(r));
    }
    let discrete = model.class().kind == SeriesKind::Discrete;
    let lo = if discrete { 1 } else { -k_max };
    for k in lo..=k_max {
        kinds.push(DistKind::DeltaHat { k, t_period, y });
    }
    let mut rows = Vec::new();
    for kind in kinds {
        let dist = InvariantDistribution::new(kind, f.mu)?;
        let est = dist.evaluate(&model, &f)?;
        rows.push(DistReportRow::new(&dist, &est));
    }
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        OutputFormat::Csv => print!("{}", dist_rows_to_csv(&rows)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(
    cfg: &Config,
    mu: f64,
    t_shift: f64,
    order: Option<usize>,
    method: SolveMethod,
    input: &Path,
    output: &Path,
) -> Result<ExitCode> {
    let (model, f) = load_function(cfg, input)?;
    if (f.mu - mu).abs() > 1e-12 * mu.abs().max(1.0) {
        return Err(HoromapError::Config(format!(
            "--mu {mu} disagrees with the input file's mu = {}",
            f.mu
        )));
    }
    let opts = SolveOptions {
        method,
        tol: cfg.solve.tol,
        grid_extent: cfg.solve.grid_extent,
        grid_step: cfg.solve.grid_step,
        recover: true,
    };
    let outcome = solve_with_options(&model, &f, t_shift, order.unwrap_or(cfg.solve.order), &opts)?;

    let grid_path = output.with_file_name(format!(
        "{}_grid.csv",
        output.file_stem().and_then(|s| s.to_str()).unwrap_or("solve")
    ));
    let grid_file = std::fs::File::create(&grid_path)?;
    outcome.grid.to_csv(grid_file)?;

    let report = SolveReport::from_outcome(&outcome, grid_path.display().to_string());
    std::fs::write(output, report.to_json()?)?;
    println!(
        "method {}  residual_sup {:.3e}  report {}",
        report.method,
        report.residual_sup,
        output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_ergodic(
    cfg: &Config,
    input: &Path,
    t_period: f64,
    x: f64,
    lengths: &[usize],
    mu0: Option<f64>,
    s: f64,
    format: OutputFormat,
) -> Result<ExitCode> {
    let (model, f) = load_function(cfg, input)?;
    let discrete = model.class().kind == SeriesKind::Discrete;
    let chart = Chart::default_for(model.class().kind);
    let start = if discrete { C64::new(x, 1.0) } else { C64::new(x, 0.0) };
    let mu0 = mu0.unwrap_or_else(|| {
        let bound = f.mu.abs();
        if bound > 0.0 { bound.min(1.0) } else { 1.0 }
    });
    let assembly = SpectralAssembly::new(
        vec![AssemblyComponent { mu: f.mu, f: f.clone() }],
        mu0,
        s,
        t_period,
    )?;
    let lengths: Vec<usize> =
        if lengths.is_empty() { vec![16, 64, 256, 1024] } else { lengths.to_vec() };
    let eval = |z: C64| model.eval(&f, z, chart);
    let mut sweep = Vec::new();
    for &n in &lengths {
        let avg = ergodic_average(&eval, start, t_period, n)?;
        let bound = predict_ergodic_bound(&assembly, n)?;
        sweep.push((n, avg, bound));
    }
    match format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "mu": f.mu,
                "mu0": mu0,
                "t_period": t_period,
                "x": [start.re, start.im],
                "sweep": sweep
                    .iter()
                    .map(|(n, avg, bound)| {
                        serde_json::json!({
                            "n": n,
                            "average": [avg.re, avg.im],
                            "predicted_bound": bound,
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = sweep
                .iter()
                .map(|(n, avg, bound)| {
                    vec![
                        n.to_string(),
                        avg.re.to_string(),
                        avg.im.to_string(),
                        bound.to_string(),
                    ]
                })
                .collect();
            print_rows_csv(&["n", "average_re", "average_im", "predicted_bound"], &rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rate(mu: f64, mu0: f64, format: OutputFormat) -> Result<ExitCode> {
    let table = exponent_table(mu, mu0)?;
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&table)?),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.kind.clone(),
                        r.exponent.to_string(),
                        r.log_factor.to_string(),
                        r.coefficient_bound.clone(),
                    ]
                })
                .collect();
            print_rows_csv(&["kind", "exponent", "log_factor", "coefficient_bound"], &rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    cfg: &Config,
    seed: u64,
    suite: Option<&str>,
    list: bool,
    output: Option<OutputFormat>,
) -> Result<ExitCode> {
    if list {
        for name in SUITES {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let checks = match suite {
        None | Some("all") => run_all(cfg, seed)?,
        Some(name) => run_suite(name, cfg, seed)?,
    };
    match output {
        None => print!("{}", render_check_table(&checks)),
        Some(OutputFormat::Json) => println!("{}", serde_json::to_string_pretty(&checks)?),
        Some(OutputFormat::Csv) => print!("{}", checks_to_csv(&checks)?),
    }
    if checks.iter().any(|c| !c.passed) {
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
