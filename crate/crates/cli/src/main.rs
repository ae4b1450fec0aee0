use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ammtax::curves::CurveSpec;
use ammtax::presets;
use ammtax::probe::{self, MIN_TRIALS};
use ammtax::sim::{self, Scenario};
use ammtax::{OrderKind, PoolConfig, PoolState, TokenId};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Automated market maker engine, taxonomy probe and simulator.
#[derive(Debug, Parser)]
#[command(name = "ammtax", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price a single trade without executing it.
    Quote {
        /// Built-in spec name or pool spec file.
        #[arg(long)]
        pool: String,
        #[arg(long = "in")]
        token_in: String,
        #[arg(long = "out")]
        token_out: String,
        #[arg(long)]
        amount: f64,
        /// Treat `--amount` as the output wanted instead of the input paid.
        #[arg(long)]
        exact_out: bool,
    },
    /// Classify a pool along the taxonomy dimensions and emit CSV.
    Classify {
        #[arg(long)]
        pool: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = probe::DEFAULT_TRIALS)]
        trials: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario against a reference price series and emit metrics CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        prices: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quote log-spaced trade sizes and emit the resulting curve as CSV.
    CurveTable {
        #[arg(long)]
        pool: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in pool specs.
    Presets,
}

enum Failure {
    Usage(String),
    Engine(String),
}

impl Failure {
    fn engine(e: impl std::fmt::Display) -> Self {
        Failure::Engine(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Engine(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_pool(pool: &str) -> Result<PoolConfig, Failure> {
    presets::load(pool).map_err(Failure::engine)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Quote { pool, token_in, token_out, amount, exact_out } => {
            let cfg = load_pool(&pool)?;
            let state = PoolState::bootstrapped(&cfg).map_err(Failure::engine)?;
            let i = state.token_index(&TokenId::new(token_in)).map_err(Failure::engine)?;
            let o = state.token_index(&TokenId::new(token_out)).map_err(Failure::engine)?;
            let kind = if exact_out { OrderKind::ExactOut } else { OrderKind::ExactIn };
            let (_, q) = state.swap(i, o, amount, kind).map_err(Failure::engine)?;
            let mut text = String::new();
            for (k, v) in [
                ("amount_in", q.amount_in),
                ("amount_out", q.amount_out),
                ("fee_paid", q.fee_paid),
                ("surcharge_component", q.surcharge_component),
                ("spot_before", q.spot_before),
                ("spot_after", q.spot_after),
                ("mean_price", q.mean_price),
            ] {
                let _ = writeln!(text, "{k}: {v}");
            }
            let _ = writeln!(text, "fee_token: {}", state.tokens()[q.fee_token]);
            emit(&text, None)
        }
        Command::Classify { pool, seed, trials, out } => {
            if trials < MIN_TRIALS {
                return Err(Failure::Usage(format!("--trials must be at least {MIN_TRIALS}, got {trials}")));
            }
            let cfg = load_pool(&pool)?;
            let report = probe::classify_with_trials(&cfg, seed, trials).map_err(Failure::engine)?;
            emit(&report.to_csv(), out.as_deref())
        }
        Command::Simulate { scenario, prices, out } => {
            let mut sc = Scenario::load(&scenario).map_err(Failure::engine)?;
            if let Some(path) = prices {
                sc = sc.with_prices(sim::load_price_series(path).map_err(Failure::engine)?);
            }
            match sim::run_scenario(&sc, &Default::default()) {
                Ok(outcome) => emit(&outcome.metrics.to_csv(), out.as_deref()),
                Err(failure) => {
                    emit(&failure.partial.to_csv(), out.as_deref())?;
                    Err(Failure::engine(failure.error))
                }
            }
        }
        Command::CurveTable { pool, samples, out } => {
            if samples == 0 {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            let cfg = load_pool(&pool)?;
            emit(&curve_table(&cfg, samples)?, out.as_deref())
        }
        Command::Presets => {
            let mut text = String::new();
            for name in presets::NAMES {
                let _ = writeln!(text, "{name}");
            }
            emit(&text, None)
        }
    }
}

/// Buys of the pool's asset with its numeraire, sized log-uniformly from
/// 1e-4 to 1e-1 of the numeraire depth.
fn curve_table(cfg: &PoolConfig, samples: usize) -> Result<String, Failure> {
    let pool = PoolState::bootstrapped(cfg).map_err(Failure::engine)?;
    let (asset, numeraire) = pool.price_pair();
    let depth = match pool.curve() {
        CurveSpec::Lmsr { b } => *b,
        _ => pool.reserves()[numeraire],
    };
    let (lo, hi) = (1e-4f64.ln(), 1e-1f64.ln());
    let mut text = String::from("amount_in,amount_out,mean_price,spot_after\n");
    for k in 0..samples {
        let t = if samples == 1 { 0.0 } else { k as f64 / (samples - 1) as f64 };
        let dx = depth * (lo + t * (hi - lo)).exp();
        let (_, q) = pool.swap(numeraire, asset, dx, OrderKind::ExactIn).map_err(Failure::engine)?;
        let _ = writeln!(text, "{},{},{},{}", q.amount_in, q.amount_out, q.mean_price, q.spot_after);
    }
    Ok(text)
}
