//! Command-line front end.
//!
//! Every subcommand builds its whole artifact in memory and then writes it in
//! one atomic step, so a failed run never leaves a partial file behind.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::analysis::{self, SpectrumReport};
use crate::assembly::{assemble_mass, oracle_deviation};
use crate::eig::{eval_eigenfunctions, solve};
use crate::error::{Error, Result};
use crate::output::{emit, fmt_f64, json_f64, json_f64s, json_object, json_text, Csv};
use crate::specfun::FractionalOrder;

pub const THREADS_ENV: &str = "RIESZ_EIG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "riesz-eig", version, about = "Eigenvalues of the Riesz fractional derivative on (-1, 1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues (and optionally coefficient vectors) for one degree.
    Eig(EigArgs),
    /// First-eigenvalue errors against a reference degree.
    Convergence(ConvergenceArgs),
    /// Weyl ratios λ_n / (nπ/2)^{2α} with reliability flags.
    Weyl(WeylArgs),
    /// Condition numbers over several degrees and their log-log slope.
    Condition(ConditionArgs),
    /// Eigenfunctions sampled on a uniform grid.
    Eigfun(EigfunArgs),
    /// The mass matrix, optionally checked against quadrature.
    Mass(MassArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Order 2α of the operator (> 0).
    #[arg(long = "two-alpha", allow_negative_numbers = true)]
    pub two_alpha: f64,
    /// Output file; stdout when omitted or `-`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub common: Common,
    /// Polynomial degree N (N + 1 unknowns).
    #[arg(long = "n")]
    pub n: usize,
    /// Also write the M-normalized coefficient vectors.
    #[arg(long)]
    pub vectors: bool,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Strictly ascending degrees, comma separated.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long = "reference-n", default_value_t = 200)]
    pub reference_n: usize,
}

#[derive(Debug, Args)]
pub struct WeylArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "n")]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ConditionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct EigfunArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "n")]
    pub n: usize,
    /// Write eigenfunctions 1..=k.
    #[arg(long, short, default_value_t = 1, conflicts_with = "indices")]
    pub k: usize,
    /// Explicit 1-based eigenfunction indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
    /// Grid points on [-1, 1], endpoints included.
    #[arg(long, default_value_t = 257)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct MassArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "n")]
    pub n: usize,
    /// Cross-check against the Gauss-Jacobi quadrature oracle.
    #[arg(long = "verify-oracle")]
    pub verify_oracle: bool,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Eig(a) => &a.common,
            Command::Convergence(a) => &a.common,
            Command::Weyl(a) => &a.common,
            Command::Condition(a) => &a.common,
            Command::Eigfun(a) => &a.common,
            Command::Mass(a) => &a.common,
        }
    }
}

/// Builds the artifact for `command` without writing it.
pub fn render(command: &Command) -> Result<String> {
    let common = command.common();
    let order = FractionalOrder::new(common.two_alpha)?;
    let format = common.format;
    match command {
        Command::Eig(a) => render_eig(order, a, format),
        Command::Convergence(a) => render_convergence(order, a, format),
        Command::Weyl(a) => render_weyl(order, a, format),
        Command::Condition(a) => render_condition(order, a, format),
        Command::Eigfun(a) => render_eigfun(order, a, format),
        Command::Mass(a) => render_mass(order, a, format),
    }
}

fn render_eig(order: FractionalOrder, a: &EigArgs, format: Format) -> Result<String> {
    let sol = solve(order, a.n)?;
    let report = SpectrumReport::from_solution(&sol);
    match format {
        Format::Json => {
            let mut o = json_object();
            o.insert("two_alpha".into(), json_f64(order.two_alpha()));
            o.insert("N".into(), Value::from(a.n));
            o.insert("lambdas".into(), json_f64s(&report.lambdas));
            o.insert("condition_number".into(), json_f64(report.condition_number));
            o.insert("poincare_bound".into(), json_f64(report.poincare_bound));
            o.insert("minmax_upper".into(), json_f64(report.minmax_upper));
            if a.vectors {
                o.insert(
                    "parities".into(),
                    Value::Array(sol.parities().iter().map(|p| Value::from(p.as_str())).collect()),
                );
                o.insert("vectors".into(), Value::Array(sol.vectors().iter().map(|v| json_f64s(v)).collect()));
            }
            Ok(json_text(o))
        }
        Format::Csv => {
            let mut header = vec!["n".to_string(), "lambda".into(), "parity".into()];
            if a.vectors {
                header.extend((0..=a.n).map(|j| format!("u_{j}")));
            }
            let mut csv = Csv::new(&header);
            for (i, l) in sol.lambdas().iter().enumerate() {
                let mut row = vec![(i + 1).to_string(), fmt_f64(*l), sol.parities()[i].as_str().to_string()];
                if a.vectors {
                    row.extend(sol.vectors()[i].iter().map(|&x| fmt_f64(x)));
                }
                csv.push_raw(row);
            }
            Ok(csv.into_string())
        }
    }
}

fn render_convergence(order: FractionalOrder, a: &ConvergenceArgs, format: Format) -> Result<String> {
    let table = analysis::convergence_table(order, &a.n_list, a.reference_n)?;
    match format {
        Format::Json => {
            let mut o = json_object();
            o.insert("two_alpha".into(), json_f64(order.two_alpha()));
            o.insert("reference_N".into(), Value::from(table.reference_n));
            o.insert("reference_lambda1".into(), json_f64(table.reference_lambda1));
            o.insert("N".into(), Value::from(table.rows.iter().map(|r| r.n).collect::<Vec<_>>()));
            o.insert("lambda1".into(), json_f64s(&table.rows.iter().map(|r| r.lambda1).collect::<Vec<_>>()));
            o.insert("error".into(), json_f64s(&table.rows.iter().map(|r| r.error).collect::<Vec<_>>()));
            Ok(json_text(o))
        }
        Format::Csv => {
            let mut csv = Csv::new(&["N", "lambda1", "error"]);
            for r in &table.rows {
                csv.push_raw([r.n.to_string(), fmt_f64(r.lambda1), fmt_f64(r.error)]);
            }
            Ok(csv.into_string())
        }
    }
}

fn render_weyl(order: FractionalOrder, a: &WeylArgs, format: Format) -> Result<String> {
    let sol = solve(order, a.n)?;
    let rho = analysis::weyl_ratios(&sol);
    let reliable = analysis::reliable_count(a.n);
    match format {
        Format::Json => {
            let mut o = json_object();
            o.insert("two_alpha".into(), json_f64(order.two_alpha()));
            o.insert("N".into(), Value::from(a.n));
            o.insert("reliable_count".into(), Value::from(reliable));
            o.insert("lambdas".into(), json_f64s(sol.lambdas()));
            o.insert("weyl_ratios".into(), json_f64s(&rho));
            Ok(json_text(o))
        }
        Format::Csv => {
            let mut csv = Csv::new(&["n", "lambda_n", "weyl_ratio", "reliable_flag"]);
            for (i, (l, r)) in sol.lambdas().iter().zip(&rho).enumerate() {
                let n = i + 1;
                csv.push_raw([n.to_string(), fmt_f64(*l), fmt_f64(*r), (n <= reliable).to_string()]);
            }
            Ok(csv.into_string())
        }
    }
}

fn render_condition(order: FractionalOrder, a: &ConditionArgs, format: Format) -> Result<String> {
    check_ascending(&a.n_list)?;
    let chi = analysis::condition_numbers(order, &a.n_list)?;
    let slope = (a.n_list.len() >= 3 && a.n_list[0] >= 1).then(|| analysis::slope_from(&a.n_list, &chi));
    let mut summary = json_object();
    summary.insert("two_alpha".into(), json_f64(order.two_alpha()));
    if let Some(s) = slope {
        summary.insert("slope".into(), json_f64(s));
        summary.insert("expected_slope".into(), json_f64(2.0 * order.two_alpha()));
    }
    match format {
        Format::Json => {
            summary.insert("N".into(), Value::from(a.n_list.clone()));
            summary.insert("chi_N".into(), json_f64s(&chi));
            Ok(json_text(summary))
        }
        Format::Csv => {
            let mut csv = Csv::new(&["N", "chi_N"]);
            for (n, c) in a.n_list.iter().zip(&chi) {
                csv.push_raw([n.to_string(), fmt_f64(*c)]);
            }
            csv.comment(&Value::Object(summary).to_string());
            Ok(csv.into_string())
        }
    }
}

fn render_eigfun(order: FractionalOrder, a: &EigfunArgs, format: Format) -> Result<String> {
    if a.samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {}", a.samples)));
    }
    let indices: Vec<usize> = match &a.indices {
        Some(list) => list.clone(),
        None => (1..=a.k).collect(),
    };
    let max = a.n + 1;
    if indices.is_empty() {
        return Err(Error::InvalidArgument("no eigenfunction requested".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > max) {
        return Err(Error::EigenIndex { index: bad, max });
    }
    let sol = solve(order, a.n)?;
    let last = (a.samples - 1) as f64;
    let xs: Vec<f64> = (0..a.samples)
        .map(|s| match s {
            0 => -1.0,
            s if s == a.samples - 1 => 1.0,
            s => -1.0 + 2.0 * s as f64 / last,
        })
        .collect();
    let u = eval_eigenfunctions(&sol, &indices, &xs)?;
    match format {
        Format::Json => {
            let mut o = json_object();
            o.insert("two_alpha".into(), json_f64(order.two_alpha()));
            o.insert("N".into(), Value::from(a.n));
            o.insert("indices".into(), Value::from(indices.clone()));
            o.insert("x".into(), json_f64s(&xs));
            o.insert("u".into(), Value::Array(u.iter().map(|c| json_f64s(c)).collect()));
            Ok(json_text(o))
        }
        Format::Csv => {
            let mut header = vec!["x".to_string()];
            header.extend(indices.iter().map(|i| format!("u_{i}")));
            let mut csv = Csv::new(&header);
            for (s, &x) in xs.iter().enumerate() {
                let mut row = vec![x];
                row.extend(u.iter().map(|col| col[s]));
                csv.push_floats(&row);
            }
            Ok(csv.into_string())
        }
    }
}

fn render_mass(order: FractionalOrder, a: &MassArgs, format: Format) -> Result<String> {
    let mass = assemble_mass(order, a.n);
    let check = a.verify_oracle.then(|| oracle_deviation(&mass));
    let m = mass.entries();
    match format {
        Format::Json => {
            let mut o = json_object();
            o.insert("two_alpha".into(), json_f64(order.two_alpha()));
            o.insert("N".into(), Value::from(a.n));
            o.insert("mass".into(), Value::Array((0..m.dim()).map(|i| json_f64s(m.row(i))).collect()));
            if let Some((dev, max)) = check {
                o.insert("oracle_max_deviation".into(), json_f64(dev));
                o.insert("max_entry".into(), json_f64(max));
            }
            Ok(json_text(o))
        }
        Format::Csv => {
            let mut header = vec!["i".to_string()];
            header.extend((0..m.dim()).map(|j| j.to_string()));
            let mut csv = Csv::new(&header);
            for i in 0..m.dim() {
                let mut row = vec![i.to_string()];
                row.extend(m.row(i).iter().map(|&x| fmt_f64(x)));
                csv.push_raw(row);
            }
            if let Some((dev, max)) = check {
                let mut o = json_object();
                o.insert("oracle_max_deviation".into(), json_f64(dev));
                o.insert("max_entry".into(), json_f64(max));
                csv.comment(&Value::Object(o).to_string());
            }
            Ok(csv.into_string())
        }
    }
}

fn check_ascending(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("degree list is empty".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("degree list must be strictly ascending".into()));
    }
    Ok(())
}

/// Sizes the global thread pool from `RIESZ_EIG_THREADS` (0 or unset: automatic).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV} must be a nonnegative integer, got {raw:?}")))?;
    if n > 0 {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Exit status for a failed run: 2 for bad input, 1 for everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidOrder(_) | Error::InvalidArgument(_) | Error::EigenIndex { .. } => 2,
        _ => 1,
    }
}

/// Parses `args`, runs the subcommand and writes its output. Returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = configure_threads()
        .and_then(|_| render(&cli.command))
        .and_then(|text| emit(cli.command.common().output.as_deref(), &text));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("riesz-eig: {e}");
            exit_code(&e)
        }
    }
}
