//! Command-line front end for `kdescent-core`.
//!
//! Exit codes: 0 success, 1 bad parameters or usage, 2 numerical failure,
//! 3 a verification check failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use kdescent_core::asymptotics::{phi_diagnostics, warlimont_bounds};
use kdescent_core::integrals::exact_ratio;
use kdescent_core::{
    build_triangle, c_constant, convergence_report, count_with_set, dasy_integral_direct,
    discrete_order_stat, dudu_table, enumerate, equidist_constant, growth_rate, parametrized_count,
    verify_gen_identity, DescentSpec, Error, Grouping, OrderStatSpec, PatternQuery, PhiEvaluator,
    PhiMode,
};

pub mod verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMETER: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

pub const OUT_DIR_ENV: &str = "KDESCENT_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// Comma-separated list of positive integers; the empty string is the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.is_empty() || s == "{}" || s == "[]" {
            return Ok(IndexList(Vec::new()));
        }
        s.trim_matches(|c| c == '{' || c == '}' || c == '[' || c == ']')
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("'{p}' is not a nonnegative integer"))
            })
            .collect::<Result<_, _>>()
            .map(IndexList)
    }
}

/// One-line notation: `3,2,1` or `321`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PatternArg(pub Vec<usize>);

impl FromStr for PatternArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.contains(',') {
            IndexList::from_str(s).map(|l| PatternArg(l.0))
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or(format!("bad pattern '{s}'"))
                })
                .collect::<Result<_, _>>()
                .map(PatternArg)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupingArg {
    BySet,
    BySetAndFirst,
    BySetAndFirstAndLast,
}

impl From<GroupingArg> for Grouping {
    fn from(g: GroupingArg) -> Self {
        match g {
            GroupingArg::BySet => Grouping::BySet,
            GroupingArg::BySetAndFirst => Grouping::BySetAndFirst,
            GroupingArg::BySetAndFirstAndLast => Grouping::BySetAndFirstAndLast,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiModeArg {
    Series,
    RootsOfUnity,
    ClosedFormK3,
}

impl From<PhiModeArg> for PhiMode {
    fn from(m: PhiModeArg) -> Self {
        match m {
            PhiModeArg::Series => PhiMode::Series,
            PhiModeArg::RootsOfUnity => PhiMode::RootsOfUnity,
            PhiModeArg::ClosedFormK3 => PhiMode::ClosedFormK3,
        }
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "kdescent",
    version,
    about = "Exact and asymptotic k-descent counts"
)]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Omit the configuration header.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_meta: bool,

    /// Write the output to this file instead of stdout (relative to the output directory).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Triangle f_k(m,n) for 1 <= m <= n <= N.
    Triangle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// d_k(I,n).
    Count {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        set: IndexList,
        #[arg(long)]
        n: usize,
    },
    /// d_k(I,m,n).
    ParamCount {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "")]
        set: IndexList,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Brute-force counts by occurrence set of a consecutive pattern.
    Oracle {
        #[arg(long, default_value = "321")]
        pattern: PatternArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "by-set")]
        grouping: GroupingArg,
        #[arg(long, default_value_t = kdescent_core::oracle::DEFAULT_CAP)]
        cap: usize,
    },
    /// Growth constants x1, r_k, c_k.
    Constants {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
    },
    /// The limiting density φ_k on a grid.
    Phi {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, value_enum, default_value = "series")]
        mode: PhiModeArg,
        #[arg(long, default_value_t = kdescent_core::asymptotics::phi::DEFAULT_TRUNCATION)]
        truncation: usize,
        /// Report ODE residuals, boundary values and normalization instead of the curve.
        #[arg(long)]
        diagnostics: bool,
    },
    /// The limit constant c_{I,k}.
    COfI {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        set: IndexList,
        /// Also evaluate the unregrouped sum by brute force.
        #[arg(long)]
        direct: bool,
    },
    /// c_{{i},k} for i = 1..=max-i and neighbour ratios.
    Ratios {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        max_i: usize,
    },
    /// The block constant C_{k,a}.
    Equidist {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Compare with exact d_k({i},n)/f_k(n) at this n.
        #[arg(long)]
        n: Option<usize>,
        /// Positions i for the exact comparison.
        #[arg(long, default_value = "")]
        positions: IndexList,
    },
    /// Exact law of the s-th smallest of a uniform t-subset of [n].
    Orderstat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        s: usize,
    },
    /// Check the k = 3 generating-function identity up to a degree cap.
    SeriesCheck {
        #[arg(long, default_value_t = 24)]
        cap: usize,
        /// Print the residual series instead of the summary.
        #[arg(long)]
        dump: bool,
    },
    /// Exact d_k(I,n)/f_k(n) against c_{I,k}.
    Converge {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        set: IndexList,
        #[arg(long, default_value = "50,100,200,400")]
        n_list: IndexList,
    },
    /// Run every cross-check.
    Verify {
        /// Largest n enumerated by brute force.
        #[arg(long, default_value_t = kdescent_core::oracle::DEFAULT_CAP)]
        oracle_cap: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<verify::Fault>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Numerical(_)) => EXIT_NUMERICAL,
            _ => EXIT_PARAMETER,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub enum Body {
    Json(Value),
    Text(String),
}

pub struct Outcome {
    pub body: Body,
    pub verified: bool,
}

impl From<Body> for Outcome {
    fn from(body: Body) -> Self {
        Outcome {
            body,
            verified: true,
        }
    }
}

fn spec(k: usize, set: &IndexList) -> Result<DescentSpec, CliError> {
    Ok(DescentSpec::new(k, set.0.iter().copied())?)
}

fn unsupported(format: Format) -> CliError {
    CliError::Usage(format!("this command has no {format:?} output"))
}

fn lines<I: IntoIterator<Item = String>>(header: &str, rows: I) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn default_format(command: &Command) -> Format {
    match command {
        Command::Triangle { .. }
        | Command::Converge { .. }
        | Command::Ratios { .. }
        | Command::Phi {
            diagnostics: false, ..
        } => Format::Csv,
        Command::Count { .. } | Command::ParamCount { .. } | Command::Verify { .. } => {
            Format::Plain
        }
        _ => Format::Json,
    }
}

fn execute(command: &Command, format: Format) -> Result<Outcome, CliError> {
    Ok(match command {
        Command::Triangle { k, n } => {
            let tri = build_triangle(*k, *n)?;
            match format {
                Format::Csv => Body::Text(tri.to_csv()),
                Format::Json => Body::Json(tri.to_json()),
                Format::Plain => Body::Text(
                    (1..=*n)
                        .map(|r| {
                            let row = tri.row(r).expect("row within range");
                            row.iter()
                                .map(|v| v.to_string())
                                .collect::<Vec<_>>()
                                .join(" ")
                                + "\n"
                        })
                        .collect(),
                ),
            }
            .into()
        }
        Command::Count { k, set, n } => {
            ensure_n(*n)?;
            let s = spec(*k, set)?;
            let count = count_with_set(&s, *n);
            match format {
                Format::Plain => Body::Text(format!("{count}\n")),
                Format::Json => {
                    Body::Json(json!({"k": k, "I": set, "n": n, "count": count.to_string()}))
                }
                Format::Csv => Body::Text(format!(
                    "k,I,n,count\n{k},\"{}\",{n},{count}\n",
                    join(&set.0)
                )),
            }
            .into()
        }
        Command::ParamCount { k, set, m, n } => {
            let s = spec(*k, set)?;
            let count = parametrized_count(&s, *m, *n)?;
            match format {
                Format::Plain => Body::Text(format!("{count}\n")),
                Format::Json => Body::Json(
                    json!({"k": k, "I": set, "m": m, "n": n, "count": count.to_string()}),
                ),
                Format::Csv => Body::Text(format!(
                    "k,I,m,n,count\n{k},\"{}\",{m},{n},{count}\n",
                    join(&set.0)
                )),
            }
            .into()
        }
        Command::Oracle {
            pattern,
            n,
            grouping,
            cap,
        } => {
            let query = PatternQuery::new(pattern.0.clone(), *n)?
                .with_grouping((*grouping).into())
                .with_cap(*cap);
            let report = enumerate(&query)?;
            match format {
                Format::Json => Body::Json(report.to_json()),
                Format::Csv | Format::Plain => Body::Text(lines(
                    "key,count",
                    report
                        .counts
                        .iter()
                        .map(|(key, c)| format!("\"{key}\",{c}")),
                )),
            }
            .into()
        }
        Command::Constants { k, tol } => {
            let p = growth_rate(*k, *tol)?;
            match format {
                Format::Json => Body::Json(p.to_json()),
                Format::Plain => {
                    let mut out = String::new();
                    for (name, v) in [("x1", p.x1), ("r_k", p.r_k), ("c_k", p.c_k)] {
                        writeln!(out, "{name} = {v:.15}").expect("writing to a String");
                    }
                    if let Some((lo, hi)) = warlimont_bounds(*k) {
                        writeln!(out, "warlimont = [{lo:.15}, {hi:.15}]")
                            .expect("writing to a String");
                    }
                    Body::Text(out)
                }
                Format::Csv => {
                    Body::Text(format!("k,x1,r_k,c_k\n{k},{},{},{}\n", p.x1, p.r_k, p.c_k))
                }
            }
            .into()
        }
        Command::Phi {
            k,
            grid,
            mode,
            truncation,
            diagnostics,
        } => {
            if *diagnostics {
                let d = phi_diagnostics(*k, *grid)?;
                match format {
                    Format::Json => Body::Json(serde_json::to_value(d).expect("plain data")),
                    other => return Err(unsupported(other)),
                }
                .into()
            } else {
                let phi = PhiEvaluator::new(*k, (*mode).into())?.with_truncation(*truncation);
                match format {
                    Format::Csv | Format::Plain => Body::Text(phi.curve_csv(*grid)?),
                    Format::Json => {
                        let points: Vec<Value> = (0..=*grid)
                            .map(|i| {
                                let x = i as f64 / *grid as f64;
                                json!({"x": x, "phi": phi.eval_unchecked(x)})
                            })
                            .collect();
                        Body::Json(json!({"k": k, "mode": mode, "points": points}))
                    }
                }
                .into()
            }
        }
        Command::COfI { k, set, direct } => {
            let s = spec(*k, set)?;
            let c = c_constant(&s)?;
            let mut value = c.to_json();
            if *direct {
                let d = dasy_integral_direct(&s)?;
                value["direct"] = d.to_json();
                value["agreement"] = json!((c.value - d.value).abs());
            }
            match format {
                Format::Json => Body::Json(value),
                Format::Plain => Body::Text(format!("{:.15}\n", c.value)),
                Format::Csv => Body::Text(format!(
                    "k,I,value,error\n{k},\"{}\",{},{}\n",
                    join(&set.0),
                    c.value,
                    c.estimated_error
                )),
            }
            .into()
        }
        Command::Ratios { k, max_i } => {
            let rows = dudu_table(*k, *max_i)?;
            match format {
                Format::Json => Body::Json(json!({"k": k, "rows": rows})),
                Format::Csv | Format::Plain => Body::Text(lines(
                    "i,constant,ratio_to_next",
                    rows.iter().map(|r| {
                        let ratio = r.ratio_to_next.map(|v| v.to_string()).unwrap_or_default();
                        format!("{},{},{}", r.i, r.constant, ratio)
                    }),
                )),
            }
            .into()
        }
        Command::Equidist {
            k,
            a,
            samples,
            seed,
            n,
            positions,
        } => {
            let report = equidist_constant(*k, *a, *samples, *seed)?;
            let (single, power) = report.predictions();
            let mut value = json!({
                "k": k,
                "a": a,
                "monte_carlo": report.monte_carlo.to_json(),
                "quadrature": report.quadrature.as_ref().map(|q| q.to_json()),
                "agreement_sigmas": report.agreement_sigmas(),
                "prefactor_single": report.prefactor_single,
                "prefactor_power": report.prefactor_power,
                "predicted_single": single,
                "predicted_power": power,
            });
            if let Some(n) = n {
                let exact: Vec<Value> = positions
                    .0
                    .iter()
                    .map(|&i| {
                        let s = DescentSpec::new(*k, [i])?;
                        Ok(json!({"i": i, "ratio": exact_ratio(&s, *n)?}))
                    })
                    .collect::<Result<_, Error>>()?;
                value["n"] = json!(n);
                value["exact"] = Value::Array(exact);
            }
            match format {
                Format::Json => Body::Json(value),
                other => return Err(unsupported(other)),
            }
            .into()
        }
        Command::Orderstat { n, t, s } => {
            let d = discrete_order_stat(OrderStatSpec::new(*n, *t, *s)?);
            match format {
                Format::Json => Body::Json(json!({
                    "n": n, "t": t, "s": s,
                    "pmf": d.pmf.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "mean": d.mean.to_string(),
                    "variance": d.variance.to_string(),
                    "mean_formula": d.mean_formula().to_string(),
                    "variance_formula": d.variance_formula().to_string(),
                    "variance_bound": d.variance_bound().to_string(),
                    "identities_hold": d.identities_hold(),
                })),
                Format::Csv => Body::Text(lines(
                    "l,pmf",
                    d.pmf
                        .iter()
                        .enumerate()
                        .map(|(i, p)| format!("{},{p}", i + 1)),
                )),
                Format::Plain => Body::Text(format!(
                    "mean = {}\nvariance = {}\nidentities_hold = {}\n",
                    d.mean,
                    d.variance,
                    d.identities_hold()
                )),
            }
            .into()
        }
        Command::SeriesCheck { cap, dump } => {
            let tri = build_triangle(3, *cap)?;
            let rep = verify_gen_identity(&tri, *cap)?;
            let body = if *dump {
                let (lhs, rhs) = kdescent_core::series::gen_identity_sides(&tri, *cap)?;
                Body::Text((&lhs - &rhs).to_csv())
            } else {
                match format {
                    Format::Json => Body::Json(json!({
                        "cap": rep.cap,
                        "checked_degree": rep.checked_degree,
                        "max_abs_residual": rep.max_abs_residual.to_string(),
                        "first_nonzero": rep.first_nonzero,
                        "holds": rep.holds(),
                    })),
                    _ => Body::Text(format!(
                        "cap {} checked degree {} max residual {}\n",
                        rep.cap, rep.checked_degree, rep.max_abs_residual
                    )),
                }
            };
            Outcome {
                body,
                verified: rep.holds(),
            }
        }
        Command::Converge { k, set, n_list } => {
            let rep = convergence_report(&spec(*k, set)?, &n_list.0)?;
            match format {
                Format::Json => Body::Json(serde_json::to_value(&rep).expect("plain data")),
                _ => Body::Text(rep.to_csv()),
            }
            .into()
        }
        Command::Verify {
            oracle_cap,
            inject_fault,
        } => {
            let report = verify::verify_suite(&verify::VerifyConfig {
                oracle_cap: *oracle_cap,
                fault: *inject_fault,
            });
            let verified = report.passed();
            let body = match format {
                Format::Json => Body::Json(report.to_json()),
                _ => Body::Text(report.to_plain()),
            };
            Outcome { body, verified }
        }
    })
}

fn ensure_n(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn render(cli: &Cli, format: Format, body: Body) -> String {
    let config = serde_json::to_value(cli).expect("plain data");
    match body {
        Body::Json(v) => {
            let v = if cli.no_meta {
                v
            } else {
                json!({"config": config, "result": v})
            };
            serde_json::to_string_pretty(&v).expect("plain data") + "\n"
        }
        Body::Text(t) => {
            if cli.no_meta {
                t
            } else {
                let mut config = config;
                config["format"] = json!(format);
                format!("# config: {config}\n{t}")
            }
        }
    }
}

fn destination(out: &PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if out.is_relative() => PathBuf::from(dir).join(out),
        _ => out.clone(),
    }
}

/// Parses `argv`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_PARAMETER
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let format = cli.format.unwrap_or_else(|| default_format(&cli.command));
    cli.format = Some(format);
    let outcome = match execute(&cli.command, format) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let text = render(&cli, format, outcome.body);
    let written = match &cli.out {
        Some(path) => {
            let path = destination(path);
            std::fs::write(&path, text.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_PARAMETER;
    }
    if outcome.verified {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

/// Convenience wrapper returning `(exit code, stdout, stderr)`.
pub fn run_captured<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}
