//! `pooldesign`: pool sizes for two-stage group testing from the command line.

mod config;
mod failure;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pooldesign_core::golden;
use pooldesign_core::{
    bayes_optimal_k_with, generate_table, minimax_group_size_with, optimal_expected_tests,
    optimality_range, samuels_optimal_k, BayesOptions, GroupSize, Method, MinimaxOptions,
    Prevalence, PriorSpec, QuadratureOptions, ScanOptions, TableId, TableOptions,
};

use config::{OutputFormat, Overrides, RunConfig};
use failure::Failure;
use output::{json_line, render_record, render_table, Record};

#[derive(Debug, Parser)]
#[command(
    name = "pooldesign",
    version,
    about = "Pool sizes for Dorfman two-stage group testing"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format [default: markdown]
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// key=value file with defaults for the options below
    #[arg(long, global = true, env = "POOLDESIGN_CONFIG")]
    config: Option<PathBuf>,
    /// Absolute and relative quadrature tolerance [default: 1e-10]
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Consecutive non-improving group sizes before a k-scan stops [default: 10]
    #[arg(long, global = true)]
    patience: Option<u64>,
    /// Grid spacing for the grid minimax method [default: min(1e-6, U/1e5)]
    #[arg(long, global = true)]
    grid_step: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cost-optimal pool size for a known prevalence
    Optimal {
        #[arg(long)]
        p: f64,
    },
    /// Pool size minimising the worst-case regret for p in (0, U]
    Minimax {
        #[arg(long, default_value_t = 1.0)]
        upper_bound: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
    },
    /// Pool size minimising the prior-expected cost
    Bayes {
        #[arg(long, value_enum)]
        prior: PriorArg,
        /// First beta shape (beta prior only)
        #[arg(long)]
        a: Option<f64>,
        /// Second beta shape (beta prior only)
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        upper_bound: f64,
    },
    /// Prevalence range on which pool size k is optimal
    Range {
        #[arg(long)]
        k: u64,
    },
    /// Regenerate one of the design tables
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        table: u8,
        /// Compare against the reference values and exit 4 on mismatch
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Grid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PriorArg {
    Uniform,
    Jeffreys,
    Beta,
}

fn scan(cfg: &RunConfig) -> ScanOptions {
    ScanOptions {
        patience: cfg.k_scan_patience,
        ..ScanOptions::default()
    }
}

fn minimax_options(cfg: &RunConfig, method: Method) -> MinimaxOptions {
    MinimaxOptions {
        method,
        grid_step: cfg.grid_step,
        scan: scan(cfg),
    }
}

fn bayes_options(cfg: &RunConfig) -> BayesOptions {
    BayesOptions {
        quadrature: QuadratureOptions::with_tolerance(cfg.quad_tol),
        scan: scan(cfg),
    }
}

fn optimal(p: f64) -> Result<Record, Failure> {
    let prev = Prevalence::new(p)?;
    let k = samuels_optimal_k(prev);
    let range = optimality_range(k)?;
    Ok(Record::new()
        .field("p", p)
        .field("k_opt", k.get())
        .field("expected_tests", optimal_expected_tests(prev))
        .field("range_low", range.p_low)
        .field("range_high", range.p_high))
}

fn minimax(cfg: &RunConfig, upper: f64, method: MethodArg) -> Result<Record, Failure> {
    let method = match method {
        MethodArg::Analytic => Method::Analytic,
        MethodArg::Grid => Method::Grid,
    };
    let opts = minimax_options(cfg, method);
    let res = minimax_group_size_with(upper, &opts)?;
    let mut rec = Record::new()
        .field("upper_bound", upper)
        .field(
            "method",
            if method == Method::Grid {
                "grid"
            } else {
                "analytic"
            },
        )
        .field("k_minimax", res.k_minimax.get())
        .field("p_star", res.worst_point.p_star)
        .field("sup_loss", res.worst_point.sup_loss);
    if method == Method::Grid {
        let step = opts
            .grid_step
            .unwrap_or_else(|| pooldesign_core::default_grid_step(upper));
        rec = rec.field("grid_step", step);
    }
    Ok(rec)
}

fn bayes(
    cfg: &RunConfig,
    prior: PriorArg,
    a: Option<f64>,
    b: Option<f64>,
    upper: f64,
) -> Result<Record, Failure> {
    let (name, spec) = match prior {
        PriorArg::Uniform => ("uniform", PriorSpec::uniform(upper)?),
        PriorArg::Jeffreys => ("jeffreys", PriorSpec::jeffreys(upper)?),
        PriorArg::Beta => {
            let (Some(a), Some(b)) = (a, b) else {
                return Err(Failure::invalid("--prior beta needs both --a and --b"));
            };
            ("beta", PriorSpec::new(a, b, upper)?)
        }
    };
    if !matches!(prior, PriorArg::Beta) && (a.is_some() || b.is_some()) {
        return Err(Failure::invalid("--a and --b only apply to --prior beta"));
    }
    let res = bayes_optimal_k_with(&spec, &bayes_options(cfg))?;
    Ok(Record::new()
        .field("prior", name)
        .field("a", spec.a)
        .field("b", spec.b)
        .field("upper_bound", upper)
        .field("k_opt", res.k_opt.get())
        .field("expected_tests", res.expected_tests_at_opt))
}

fn range(k: u64) -> Result<Record, Failure> {
    let r = optimality_range(GroupSize::new(k)?)?;
    Ok(Record::new()
        .field("k", k)
        .field("p_low", r.p_low)
        .field("p_high", r.p_high))
}

fn table(cfg: &RunConfig, number: u8, check: bool) -> Result<(String, Option<Failure>), Failure> {
    let id = TableId::from_number(number).expect("clap limits the table number");
    let opts = TableOptions {
        minimax: minimax_options(cfg, Method::Analytic),
        bayes: bayes_options(cfg),
    };
    let report = generate_table(id, &opts)?;
    let text = render_table(cfg.output, &report);
    let mismatch = if check {
        let mismatches = golden::check(&report);
        (!mismatches.is_empty()).then_some(Failure::Golden {
            table: id,
            mismatches,
        })
    } else {
        None
    };
    Ok((text, mismatch))
}

fn run(cli: Cli) -> Result<String, (Failure, Option<String>, OutputFormat)> {
    let g = &cli.global;
    let flags = Overrides {
        grid_step: g.grid_step,
        quad_tol: g.quad_tol,
        k_scan_patience: g.patience,
        output: g.format,
    };
    let fallback = g.format.unwrap_or(OutputFormat::Markdown);
    let cfg = RunConfig::load(g.config.as_deref(), &flags).map_err(|e| (e, None, fallback))?;
    let fail = |e: Failure| (e, None, cfg.output);
    let rec = match cli.command {
        Command::Optimal { p } => optimal(p),
        Command::Minimax {
            upper_bound,
            method,
        } => minimax(&cfg, upper_bound, method),
        Command::Bayes {
            prior,
            a,
            b,
            upper_bound,
        } => bayes(&cfg, prior, a, b, upper_bound),
        Command::Range { k } => range(k),
        Command::Table { table: n, check } => {
            let (text, mismatch) = table(&cfg, n, check).map_err(fail)?;
            return match mismatch {
                None => Ok(text),
                Some(f) => Err((f, Some(text), cfg.output)),
            };
        }
    };
    rec.map(|r| render_record(cfg.output, &r)).map_err(fail)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            eprintln!("pooldesign: {first}");
            return ExitCode::from(failure::EXIT_INVALID);
        }
    };
    let stdout = std::io::stdout();
    match run(cli) {
        Ok(text) => {
            let _ = stdout.lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err((failure, partial, format)) => {
            let mut out = stdout.lock();
            if let Some(text) = partial {
                let _ = out.write_all(text.as_bytes());
            }
            if format == OutputFormat::Json {
                let _ = out.write_all(json_line(&failure.to_json()).as_bytes());
            }
            eprintln!("pooldesign: error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
