//! `gapprob`: gap probabilities of unitary ensembles from the command line.

mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gapprob::fredholm::KernelKind;
use gapprob::painleve::SeriesKind;
use gapprob::{Error, PrecisionContext};

use commands::{FiniteEnsemble, ResidualParams, RouteArg, Source, Suite};
use table::{Format, Table};

#[derive(Parser)]
#[command(
    name = "gapprob",
    version,
    about = "Gap probabilities, Painlevé residuals and their asymptotics"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,

    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Working precision in mantissa bits (defaults depend on the command).
    #[arg(long, env = "GAPPROB_PRECISION_BITS", global = true)]
    precision_bits: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact log P at finite n from Hankel determinants.
    #[command(after_help = "Columns: t (or a), log_p, p.")]
    Finite {
        #[arg(long, value_enum)]
        ensemble: FiniteEnsemble,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        n: usize,
        /// Gap edge for lue/jue: a list, each item a number or lo:hi:count.
        #[arg(long, value_delimiter = ',', conflicts_with = "a")]
        t: Vec<String>,
        /// Half-width of the gap for gue/symjue.
        #[arg(long, value_delimiter = ',')]
        a: Vec<String>,
        #[arg(long, value_enum, default_value = "auto")]
        route: RouteArg,
    },
    /// Truncated large-gap expansions, term by term.
    #[command(after_help = "Columns: s (or b), value, then one `term <shape>` column per tabulated term.")]
    Asympt {
        /// One of r_of_s, sigma_of_s, lue, jue, gue, symjue.
        #[arg(long)]
        kind: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, value_delimiter = ',', conflicts_with = "b")]
        s: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<String>,
        /// Highest tail order kept (defaults to everything tabulated).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Fredholm determinants of the sine and Bessel kernels.
    #[command(
        after_help = "Columns: b (or s), m, log_det, difference, converged; one row per Nyström order.\nWith --check-product the converged row also carries bessel_minus_half, bessel_plus_half, product_residual.\nOn failure the trace so far is printed and the exit code is 3."
    )]
    Fredholm {
        /// sine or bessel.
        #[arg(long)]
        kernel: String,
        #[arg(long, value_delimiter = ',', conflicts_with = "s")]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        s: Vec<String>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also split the sine determinant into the Bessel pair α = ∓½.
        #[arg(long)]
        check_product: bool,
    },
    /// Residual of a σ-form equation on numerically generated inputs.
    #[command(
        after_help = "Columns: equation, source, inputs, residual, scale, relative.\nSources: finite (pv_sigma, rn_ode, pvi_sigma, gue_ode, gue_difference, piii_sigma), fredholm (piii_sigma, jmms), series (piii_sigma, r_ode, jmms)."
    )]
    Residual {
        #[arg(long)]
        eq: String,
        #[arg(long, value_enum)]
        source: Source,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        /// Truncation order for the series source.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Built-in consistency suites.
    #[command(after_help = "Columns: suite, item, value, tolerance, status. Exit code 1 if any item fails.")]
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

enum Failure {
    Error(Error),
    /// Print what was computed before the failure, then exit with the error's code.
    Partial(Table, Error),
    /// A verification item missed its tolerance.
    Verify(Table),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn context(bits: Option<u32>, default: u32) -> Result<PrecisionContext, Error> {
    PrecisionContext::new(bits.unwrap_or(default))
}

fn pick(first: Vec<String>, second: Vec<String>) -> Vec<String> {
    if first.is_empty() {
        second
    } else {
        first
    }
}

fn run(cli: Cli) -> Result<Table, Failure> {
    let bits = cli.precision_bits;
    match cli.command {
        Command::Finite {
            ensemble,
            alpha,
            beta,
            n,
            t,
            a,
            route,
        } => {
            let flag = if matches!(ensemble, FiniteEnsemble::Lue | FiniteEnsemble::Jue) {
                "t"
            } else {
                "a"
            };
            let grid = commands::parse_grid(&pick(t, a))?;
            if grid.is_empty() {
                return Err(Error::Argument(format!("--{flag} needs at least one value")).into());
            }
            Ok(commands::finite(
                ensemble,
                alpha,
                beta,
                n,
                &grid,
                route.into(),
                &context(bits, 256)?,
            )?)
        }
        Command::Asympt {
            kind,
            alpha,
            beta,
            s,
            b,
            order,
        } => {
            let kind = SeriesKind::from_name(&kind, alpha, beta)?;
            let grid = commands::parse_grid(&pick(s, b))?;
            if grid.is_empty() {
                return Err(
                    Error::Argument("give the evaluation points with --s or --b".into()).into(),
                );
            }
            Ok(commands::asympt(kind, order, &grid, &context(bits, 53)?)?)
        }
        Command::Fredholm {
            kernel,
            b,
            s,
            alpha,
            tol,
            check_product,
        } => {
            let kind = KernelKind::from_name(&kernel, alpha)?;
            let grid = commands::parse_grid(&pick(b, s))?;
            if grid.is_empty() {
                return Err(Error::Argument("give the endpoints with --b or --s".into()).into());
            }
            let ctx = context(bits, 128)?;
            commands::fredholm(kind, &grid, tol, check_product, &ctx)
                .map_err(|f| Failure::Partial(f.partial, f.error))
        }
        Command::Residual {
            eq,
            source,
            n,
            alpha,
            beta,
            t,
            a,
            s,
            tau,
            order,
        } => {
            let prm = ResidualParams {
                n,
                alpha,
                beta,
                t,
                a,
                s,
                tau,
                order,
            };
            let default = if source == Source::Finite { 256 } else { 128 };
            Ok(commands::residual_table(
                &eq,
                source,
                &prm,
                &context(bits, default)?,
            )?)
        }
        Command::Verify { suite } => {
            let (table, ok) = commands::verify(suite, bits.unwrap_or(128))?;
            if ok {
                Ok(table)
            } else {
                Err(Failure::Verify(table))
            }
        }
    }
}

fn emit(table: &Table, format: Format, output: Option<&PathBuf>) -> io::Result<()> {
    match output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(format, &mut w)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, output) = (cli.format, cli.output.clone());
    let code = match run(cli) {
        Ok(table) => match emit(&table, format, output.as_ref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("gapprob: {e}");
                1
            }
        },
        Err(Failure::Error(e)) => {
            eprintln!("gapprob: {e}");
            e.exit_code()
        }
        Err(Failure::Partial(table, e)) => {
            let _ = emit(&table, format, output.as_ref());
            eprintln!("gapprob: {e}");
            e.exit_code()
        }
        Err(Failure::Verify(table)) => {
            let _ = emit(&table, format, output.as_ref());
            eprintln!("gapprob: verification failed");
            1
        }
        Err(Failure::Io(e)) => {
            eprintln!("gapprob: {e}");
            1
        }
    };
    ExitCode::from(code as u8)
}
