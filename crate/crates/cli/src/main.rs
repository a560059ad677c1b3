//! Command-line front end exposing the certification engine with stable
//! output formats.
//!
//! Exit codes: 0 = certified/ok, 1 = survivor or verification failure,
//! 2 = input error. The environment variable FANO72_THREADS caps internal
//! parallelism (0 = auto).

mod render;

use std::io::{self, Write};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use fano72_core::arith::{enumerate_j_with_budget, Rational, Strictness};
use fano72_core::basket::Basket;
use fano72_core::km::{threefold_coefficient, verify_threefold_coefficient};
use fano72_core::pipeline::{certify_all, Mode, PipelineConfig};
use fano72_core::rr::h0_anticanonical;
use fano72_core::wps::WpsWeights;
use render::Format;

#[derive(Parser)]
#[command(
    name = "fano72",
    version,
    about = "Exact-arithmetic case analysis certifying the degree bound (-K)^3 <= 72 \
             for Q-factorial canonical Fano 3-folds of Picard number 1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliMode {
    /// Reproduce the printed tables with their coarse pre-filters.
    Paper,
    /// Apply the exact sigma comparisons as early as possible.
    Strict,
}

impl From<CliMode> for Mode {
    fn from(mode: CliMode) -> Mode {
        match mode {
            CliMode::Paper => Mode::Paper,
            CliMode::Strict => Mode::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliFormat {
    #[value(alias = "md")]
    Markdown,
    Csv,
    Json,
}

impl From<CliFormat> for Format {
    fn from(format: CliFormat) -> Format {
        match format {
            CliFormat::Markdown => Format::Markdown,
            CliFormat::Csv => Format::Csv,
            CliFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render one of the five case-analysis tables.
    Tables {
        /// Table selector, 1 through 5.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        which: u8,
        #[arg(long, value_enum, default_value_t = CliMode::Paper)]
        mode: CliMode,
        #[arg(long, value_enum, default_value_t = CliFormat::Markdown)]
        format: CliFormat,
    },
    /// Run the full elimination pipeline and print the certificate.
    Certify {
        #[arg(long, value_enum, default_value_t = CliMode::Strict)]
        mode: CliMode,
        /// Relax both index-budget filters by this amount (testing aid);
        /// a positive slack is expected to produce survivors and exit 1.
        #[arg(long, default_value = "0")]
        j1_budget_slack: String,
    },
    /// Orbifold Riemann-Roch report for a basket and a degree.
    Basket {
        /// Basket as `r:b,r:b,...`, or `-` for the empty basket.
        #[arg(long)]
        entries: String,
        /// Anticanonical degree c1^3 as an exact rational, e.g. `145/2`.
        #[arg(long)]
        degree: String,
    },
    /// Degree and Weil index of a weighted projective 3-space.
    Wps {
        /// Weights as `a0,a1,a2,a3`.
        #[arg(long)]
        weights: String,
    },
    /// Kawamata-Miyaoka coefficient value or verification scan.
    Km {
        /// Print the 3-fold coefficient for this Q-Fano index.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        q: Option<u64>,
        /// Verify the coefficient against all admissible slope profiles for
        /// every index up to this value.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        verify_max: Option<u64>,
    },
    /// Enumerate the J values within a prime-power budget.
    Jset {
        /// Budget as an exact rational; `9.5` parses as 19/2.
        #[arg(long)]
        budget: String,
        /// Use the non-strict comparison sigma_j(J) <= budget.
        #[arg(long)]
        non_strict: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = init_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Writes to a standard stream, tolerating a consumer that closed the pipe
/// early so the exit code stays within the documented set.
fn emit(mut stream: impl Write, text: &str) {
    if let Err(error) = stream.write_all(text.as_bytes()) {
        if error.kind() != io::ErrorKind::BrokenPipe {
            panic!("write failed: {error}");
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("FANO72_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("FANO72_THREADS must be a nonnegative integer, got `{raw}`"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Tables { which, mode, format } => {
            let cfg = PipelineConfig::new(mode.into());
            let cert = certify_all(&cfg);
            emit(io::stdout().lock(), &render::render_table(&cert, which, format.into()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            mode,
            j1_budget_slack,
        } => {
            let slack = parse_rational(&j1_budget_slack, "budget slack")?;
            if slack.is_negative() {
                return Err("budget slack must be nonnegative".to_string());
            }
            let cfg = PipelineConfig::with_slack(mode.into(), slack);
            let cert = certify_all(&cfg);
            emit(io::stdout().lock(), &cert.to_canonical_json());
            if cert.survivors.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                let mut listing = format!("{} surviving case(s):\n", cert.survivors.len());
                for survivor in &cert.survivors {
                    listing.push_str(&format!("  survivor: {survivor}\n"));
                }
                emit(io::stderr().lock(), &listing);
                Ok(ExitCode::from(1))
            }
        }
        Command::Basket { entries, degree } => {
            let basket = Basket::from_str(&entries).map_err(|e| e.to_string())?;
            let degree = parse_rational(&degree, "degree")?;
            if !degree.is_positive() {
                return Err(format!("degree must be positive, got {degree}"));
            }
            let r = basket.index_multiset();
            let c2c1 = r.c2c1().map_err(|e| e.to_string())?;
            let h0 = h0_anticanonical(degree, &basket);
            let report = format!(
                "basket: {basket}\nr_X: {}\nc2c1: {c2c1}\ndegree: {degree}\nh0: {h0}\nintegral: {}\n",
                r.gorenstein_index(),
                h0.is_integer() && !h0.is_negative()
            );
            emit(io::stdout().lock(), &report);
            Ok(ExitCode::SUCCESS)
        }
        Command::Wps { weights } => {
            let weights = WpsWeights::from_str(&weights).map_err(|e| e.to_string())?;
            let index = weights.weil_index().map_err(|e| e.to_string())?;
            let degree = weights.degree().map_err(|e| e.to_string())?;
            let report = format!(
                "weights: {weights}\nwell_formed: true\nweil_index: {index}\ndegree: {degree}\n"
            );
            emit(io::stdout().lock(), &report);
            Ok(ExitCode::SUCCESS)
        }
        Command::Km { q, verify_max } => match (q, verify_max) {
            (_, Some(max)) => {
                let checks = verify_threefold_coefficient(max);
                let mut report = String::new();
                let mut failures = 0usize;
                for check in &checks {
                    let witness = check
                        .witness
                        .as_ref()
                        .map(|p| p.to_string())
                        .unwrap_or_else(|| "semistable".to_string());
                    report.push_str(&format!(
                        "q={} worst={} claimed={} witness=[{}] {}\n",
                        check.q,
                        check.worst,
                        check.claimed,
                        witness,
                        if check.ok { "ok" } else { "FAIL" }
                    ));
                    if !check.ok {
                        failures += 1;
                    }
                }
                let code = if failures == 0 {
                    report.push_str(&format!("all coefficients verified up to q={max}\n"));
                    ExitCode::SUCCESS
                } else {
                    report.push_str(&format!("{failures} failing indices up to q={max}\n"));
                    ExitCode::from(1)
                };
                emit(io::stdout().lock(), &report);
                Ok(code)
            }
            (Some(q), None) => {
                emit(io::stdout().lock(), &format!("{}\n", threefold_coefficient(q)));
                Ok(ExitCode::SUCCESS)
            }
            (None, None) => Err("provide --q or --verify-max".to_string()),
        },
        Command::Jset { budget, non_strict } => {
            let budget = parse_rational(&budget, "budget")?;
            if !budget.is_positive() {
                return Err(format!("budget must be positive, got {budget}"));
            }
            let strictness = if non_strict {
                Strictness::Inclusive
            } else {
                Strictness::Strict
            };
            let list = enumerate_j_with_budget(budget, strictness);
            let line = list
                .iter()
                .map(|j| j.to_string())
                .collect::<Vec<_>>()
                .join(",");
            emit(io::stdout().lock(), &format!("{line}\n"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_rational(raw: &str, what: &str) -> Result<Rational, String> {
    Rational::from_str(raw).map_err(|_| format!("cannot parse `{raw}` as {what}"))
}
