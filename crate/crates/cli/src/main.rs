use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tricorr::complementarity::{frontier_scan_with, FrontierMeasure};
use tricorr::discord::DmsConvention;
use tricorr::sweep::{
    run_verify, verify_state, with_workers, write_family, write_frontier, write_scan, FamilyKind, ScanOptions,
    SweepError, VerifyOptions,
};
use tricorr::{PureState3, RngSeed};

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Tripartite correlation measures and Bell-CHSH complementarity checks for three-qubit states.
#[derive(Parser, Debug)]
#[command(name = "tricorr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measures and slacks for Haar-random pure states, one CSV row each.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Measures to report; `dms` adds the discord monogamy column.
        #[arg(long, value_delimiter = ',', default_value = "tangle,ggm,bell")]
        measures: Vec<Measure>,
    },
    /// Numeric versus closed-form values over a parameter grid.
    Family {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: Family,
        /// Measures to report; `dms` appends the discord monogamy column.
        #[arg(long, value_delimiter = ',', default_value = "tangle,ggm,bell")]
        measures: Vec<Measure>,
        /// Points per parameter axis (family-specific default).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        grid: Option<u32>,
    },
    /// Theorem, lemma, no-go, convexity and mixed-state suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check a single pure state given as 8 comma-separated `re` or `re:im` amplitudes.
        #[arg(long)]
        state: Option<String>,
        /// Decomposition trials for the mixed-state tangle bound.
        #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
    },
    /// Binned maxima of the Bell violation against the MBV boundary.
    Frontier {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangle")]
        measures: FrontierChoice,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
        bins: u32,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Number of samples (defaults: scan 10000, verify 10000, frontier 100000).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inequality tolerance (defaults: 1e-9; family 1e-10; dms frontier 1e-3).
    #[arg(long, value_parser = positive_f64)]
    tol: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "TRICORR_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    #[arg(long, value_enum, default_value_t = Convention::MeasureSecond)]
    dms_convention: Convention,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Measure {
    Tangle,
    Ggm,
    Dms,
    Bell,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FrontierChoice {
    Tangle,
    Ggm,
    Dms,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Mbv,
    Ghzr,
    Ghz,
    W,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Convention {
    MeasureSecond,
    MeasureFirst,
}

impl From<Convention> for DmsConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::MeasureSecond => DmsConvention::MeasureSecond,
            Convention::MeasureFirst => DmsConvention::MeasureFirst,
        }
    }
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<SweepError> for Fail {
    fn from(e: SweepError) -> Self {
        Fail(EXIT_IO, e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail(EXIT_IO, format!("I/O error: {e}"))
    }
}

impl From<tricorr::Error> for Fail {
    fn from(e: tricorr::Error) -> Self {
        Fail(EXIT_IO, e.to_string())
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write + Send>, Fail> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Fail(EXIT_IO, format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn workers(common: &Common) -> usize {
    common.workers.map_or_else(
        || std::thread::available_parallelism().map_or(1, |n| n.get()),
        |w| w as usize,
    )
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.command {
        Command::Scan { common, measures } => {
            let opts = ScanOptions {
                samples: common.samples.unwrap_or(10_000),
                seed: RngSeed(common.seed),
                tol: common.tol.unwrap_or(1e-9),
                dms: measures.contains(&Measure::Dms).then(|| common.dms_convention.into()),
            };
            let mut out = open_out(&common.out)?;
            let summary = with_workers(workers(&common), || write_scan(&mut out, &opts))??;
            out.flush()?;
            eprintln!(
                "rows={} min_tau_slack={:e} min_ggm_slack={:e}",
                summary.rows, summary.min_tau_slack, summary.min_ggm_slack
            );
            if let Some(v) = summary.violation {
                eprintln!("slack below -{} at index {}", opts.tol, v.index);
                eprintln!("{}", v.header.join(","));
                eprintln!("{}", v.row.join(","));
                eprintln!("state: {}", v.state);
                return Ok(EXIT_FAILURE);
            }
            Ok(EXIT_OK)
        }
        Command::Family { common, family, measures, grid } => {
            let kind = match family {
                Family::Mbv => FamilyKind::Mbv,
                Family::Ghzr => FamilyKind::GhzReal,
                Family::Ghz => FamilyKind::Ghz,
                Family::W => FamilyKind::W,
            };
            let grid = grid.map_or(kind.default_grid(), |g| g as usize);
            let tol = common.tol.unwrap_or(1e-10);
            let dms = measures.contains(&Measure::Dms).then(|| common.dms_convention.into());
            let mut out = open_out(&common.out)?;
            let s = with_workers(workers(&common), || write_family(&mut out, kind, grid, tol, dms))??;
            out.flush()?;
            eprintln!(
                "rows={} max_tau_diff={:e} max_ggm_diff={:e} max_m_diff={:e} max_mbv_residual={:e} ordering_failures={}",
                s.rows, s.max_tau_diff, s.max_ggm_diff, s.max_m_diff, s.max_mbv_residual, s.ordering_failures
            );
            if let Some(p) = s.first_failure {
                eprintln!("closed form disagrees beyond {tol:e} at {p:?}");
            }
            Ok(if s.is_clean() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Verify { common, state, trials } => {
            let tol = common.tol.unwrap_or(1e-9);
            let report = match state {
                Some(text) => {
                    let psi = PureState3::parse(&text).map_err(|e| Fail(EXIT_IO, format!("--state: {e}")))?;
                    verify_state(&psi, tol)
                }
                None => {
                    let mut opts = VerifyOptions::new(common.samples.unwrap_or(10_000), RngSeed(common.seed), tol);
                    opts.roof_trials = trials as usize;
                    with_workers(workers(&common), || run_verify(&opts))??
                }
            };
            let text = report.render();
            print!("{text}");
            if let Some(p) = &common.out {
                std::fs::write(p, &text).map_err(|e| Fail(EXIT_IO, format!("cannot write {}: {e}", p.display())))?;
            }
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Frontier { common, measures, bins } => {
            let measure = match measures {
                FrontierChoice::Tangle => FrontierMeasure::Tangle,
                FrontierChoice::Ggm => FrontierMeasure::Ggm,
                FrontierChoice::Dms => FrontierMeasure::Dms,
            };
            let samples = common.samples.unwrap_or(100_000);
            let tol = common.tol.unwrap_or(if measure == FrontierMeasure::Dms { 1e-3 } else { 1e-9 });
            let seed = RngSeed(common.seed);
            let conv = common.dms_convention.into();
            let mut out = open_out(&common.out)?;
            let rows = with_workers(workers(&common), || {
                frontier_scan_with(samples, seed, measure, bins as usize, conv)
            })?
            .map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
            write_frontier(&mut out, &rows, measure, samples, seed)?;
            out.flush()?;
            let worst = rows.iter().filter_map(|b| b.excess()).fold(f64::NEG_INFINITY, f64::max);
            eprintln!("bins={} max_excess={worst:e}", rows.len());
            Ok(if worst > tol { EXIT_FAILURE } else { EXIT_OK })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
