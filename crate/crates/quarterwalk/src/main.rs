//! Command-line frontend: exact count tables, generating-function
//! coefficients, the asymptotic report, and the self-verification suites.
//!
//! stdout carries data only; diagnostics go to stderr. Output is assembled
//! in full before anything is printed, so failed runs emit nothing partial.
//! Exit codes: 0 success, 1 failed verification or internal invariant,
//! 2 invalid arguments, 3 uncertifiable sign during bisection.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quarterwalk::compensation::{check_boundary_identities, XSolution};
use quarterwalk::numeric::{growth_table, table_csv, AsymptoticReport, NumericError};
use quarterwalk::series::{rat_string, TruncSeries};
use quarterwalk::variants::{build_bigstep, check_recursions, solve_rational};
use quarterwalk::verify::{run_suite, summary_json, Suite};
use quarterwalk::walk::{dp_counts, StepRule, WalkKind};

const KMAX_LIMIT: usize = 2000;
const ORDER_LIMIT: usize = 500;

#[derive(Parser)]
#[command(name = "quarterwalk", version, about = "Quarter-plane walk counting and asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkArg {
    Main,
    #[value(name = "rational_gf")]
    RationalGf,
    #[value(name = "big_step")]
    BigStep,
}

impl From<WalkArg> for WalkKind {
    fn from(w: WalkArg) -> Self {
        match w {
            WalkArg::Main => WalkKind::Main,
            WalkArg::RationalGf => WalkKind::RationalGf,
            WalkArg::BigStep => WalkKind::BigStep,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact walk counts q_{i,j,k} for all k <= kmax.
    Count {
        #[arg(long, value_enum, default_value = "main")]
        walk: WalkArg,
        #[arg(long)]
        kmax: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Taylor coefficients of the generating function at one endpoint.
    Coeffs {
        #[arg(long, value_enum, default_value = "main")]
        walk: WalkArg,
        #[arg(short)]
        i: usize,
        #[arg(short)]
        j: usize,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dominant singularity bracket, growth constants, and the ratio table.
    Asymptotics {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact-versus-approximation table over a range of lengths.
    Table {
        #[arg(long, default_value_t = 10)]
        kmin: usize,
        #[arg(long, default_value_t = 100)]
        kmax: usize,
        #[arg(long, default_value_t = 10)]
        step: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a named invariant suite; exit 0 only if every check passes.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

enum CliError {
    InvalidArgs(String),
    Numeric(NumericError),
    Io(std::io::Error),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::InvalidArgs(_) => ExitCode::from(2),
            CliError::Numeric(NumericError::SignAmbiguity { .. }) => ExitCode::from(3),
            CliError::Numeric(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(1),
            CliError::Internal(_) => ExitCode::from(1),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::InvalidArgs(m) => write!(f, "{m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal invariant violation: {m}"),
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Count { walk, kmax, output } => {
            if kmax > KMAX_LIMIT {
                return Err(CliError::InvalidArgs(format!("kmax {kmax} exceeds the {KMAX_LIMIT} guard")));
            }
            let table = dp_counts(&StepRule::builtin(walk.into()), kmax);
            let body = match output.format {
                Format::Csv => table.to_csv(),
                Format::Json => format!("{}\n", table.to_json()),
            };
            emit(&output, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs { walk, i, j, order, output } => {
            if order > ORDER_LIMIT {
                return Err(CliError::InvalidArgs(format!("order {order} exceeds the {ORDER_LIMIT} guard")));
            }
            let kind: WalkKind = walk.into();
            let (q, c, identities_ok) = coefficients_for(kind, i, j, order)?;
            let body = match output.format {
                Format::Csv => {
                    let mut out = String::from("i,j,k,coeff\n");
                    for (k, coeff) in q.coeffs().iter().enumerate() {
                        let _ = writeln!(out, "{i},{j},{k},{}", rat_string(coeff));
                    }
                    out
                }
                Format::Json => {
                    let mut json = serde_json::Map::new();
                    if kind != WalkKind::Main {
                        json.insert("walk".into(), kind.name().into());
                    }
                    json.insert("order".into(), order.into());
                    json.insert(
                        "q".into(),
                        serde_json::json!({
                            format!("{i},{j}"): q.coeffs().iter().map(rat_string).collect::<Vec<_>>()
                        }),
                    );
                    json.insert(
                        "c".into(),
                        c.coeffs().iter().map(rat_string).collect::<Vec<_>>().into(),
                    );
                    json.insert("identities_ok".into(), identities_ok.into());
                    format!("{}\n", serde_json::Value::Object(json))
                }
            };
            emit(&output, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Asymptotics { tol, output } => {
            if !(tol > 0.0) {
                return Err(CliError::InvalidArgs("tol must be positive".into()));
            }
            let report = AsymptoticReport::compute(tol, 10, 100, 10)?;
            let body = match output.format {
                Format::Json => format!("{}\n", report.to_json()),
                Format::Csv => report.to_csv(),
            };
            emit(&output, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { kmin, kmax, step, tol, output } => {
            if kmax > KMAX_LIMIT || kmin > kmax || step == 0 {
                return Err(CliError::InvalidArgs(format!(
                    "range {kmin}..={kmax} step {step} is invalid (kmax guard {KMAX_LIMIT})"
                )));
            }
            let rho = quarterwalk::numeric::find_rho(tol)?;
            let (c00, _) = quarterwalk::numeric::c00_from(&rho, 60)?;
            let counts = dp_counts(&StepRule::builtin(WalkKind::Main), kmax);
            let rows = growth_table(&counts, rho.mid(), c00, kmin, kmax, step);
            let body = match output.format {
                Format::Csv => table_csv(&rows),
                Format::Json => {
                    let rows: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "k": r.k,
                                "exact": r.exact.to_string(),
                                "approx": quarterwalk::numeric::round_sig(r.approx, 15),
                                "ratio": quarterwalk::numeric::round_sig(r.ratio, 15),
                            })
                        })
                        .collect();
                    format!("{}\n", serde_json::Value::Array(rows))
                }
            };
            emit(&output, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let suite = Suite::parse(&suite)
                .ok_or_else(|| CliError::InvalidArgs(format!("unknown suite `{suite}`")))?;
            let checks = run_suite(suite);
            for check in checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {}", check.name, check.detail);
            }
            println!("{}", summary_json(suite, &checks));
            if checks.iter().all(|c| c.passed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

/// Generating-function coefficients plus the walk's normalizing series and
/// its identity check at the same order.
fn coefficients_for(
    kind: WalkKind,
    i: usize,
    j: usize,
    order: usize,
) -> Result<(TruncSeries, TruncSeries, bool), CliError> {
    match kind {
        WalkKind::Main => {
            let sol = XSolution::compute(order.max(1), &[(i, j)]);
            let q = sol.q(i, j).expect("pair requested").truncate(order);
            let c = sol.c().truncate(order);
            let identities_ok = check_boundary_identities(order.max(1))
                .map_err(|e| CliError::Internal(e.to_string()))?;
            Ok((q, c, identities_ok))
        }
        WalkKind::RationalGf => {
            let sol = solve_rational(order.max(1));
            let q = sol.q(i, j).truncate(order);
            let c = sol.c0.truncate(order);
            let identities_ok = check_recursions(WalkKind::RationalGf, 4, order.clamp(1, 20));
            Ok((q, c, identities_ok))
        }
        WalkKind::BigStep => {
            let ladder = build_bigstep(order.max(1), order.max(1) + 1);
            let q = ladder
                .q(i, j, order.max(1))
                .map_err(|e| CliError::Internal(e.to_string()))?
                .truncate(order);
            let c = ladder.c(0).truncate(order);
            let identities_ok = check_recursions(WalkKind::BigStep, 4, order.clamp(1, 20));
            Ok((q, c, identities_ok))
        }
    }
}

fn emit(output: &OutputArgs, body: String) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(body.as_bytes())?;
        }
        None => {
            print!("{body}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}
