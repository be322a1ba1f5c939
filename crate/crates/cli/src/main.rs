use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pwroc_cli::bench::{run_bench, BenchConfig};
use pwroc_cli::compare::run_compare;
use pwroc_cli::config::{parse_alphas, EvalConfig, WindowSpec};
use pwroc_cli::evaluate::{run_evaluate, run_surface};
use pwroc_cli::io::{ensure_dir, write_events, write_scores};
use pwroc_cli::{CliError, Result};
use pwroc_core::synth::{generate_synthetic, DetectorModel, SyntheticSpec};
use pwroc_core::{AggregationKind, AggregationSpec, FilterSpec, WindowSweep};

#[derive(Parser)]
#[command(
    name = "pwroc",
    version,
    about = "Preceding-window ROC evaluation of anomaly scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ROC curve per window, surface, threshold metrics and summary.
    Evaluate(EvalArgs),
    /// ROC surface and summary only.
    Surface(EvalArgs),
    /// Range-based against pw precision/recall/F1 per (window, alpha).
    Compare(EvalArgs),
    /// Cost benchmark on synthetic data.
    Bench(BenchArgs),
    /// Write a synthetic scores/events pair.
    Synth(SynthArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    events: PathBuf,
    /// Single window length, or `auto`.
    #[arg(long, conflicts_with_all = ["window_min", "window_max", "window_step"])]
    window: Option<String>,
    #[arg(long, requires_all = ["window_max", "window_step"])]
    window_min: Option<f64>,
    #[arg(long, requires_all = ["window_min", "window_step"])]
    window_max: Option<f64>,
    #[arg(long, requires_all = ["window_min", "window_max"])]
    window_step: Option<f64>,
    /// mean | median | ccdf:<tau> | nab[:norm]
    #[arg(long, default_value = "mean")]
    agg: String,
    /// none | nontrigger:<w2>[:<thr>] | counter:<K>:<period>[:<thr>]
    #[arg(long, default_value = "none")]
    filter: String,
    #[arg(long, default_value = "0.2,0.5,0.8")]
    alpha: String,
    /// Also score alarms with the classic window scorer.
    #[arg(long)]
    nab: bool,
    /// Score at or above which a timestamp is an alarm for --nab.
    #[arg(long, default_value_t = pwroc_core::aggregation::DEFAULT_ALARM_THRESHOLD)]
    alarm_threshold: f64,
    /// Weight of the existence reward in range-based recall.
    #[arg(long, default_value_t = 0.0)]
    existence_weight: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EvalArgs {
    fn into_config(self) -> Result<EvalConfig> {
        let window = match (
            self.window,
            self.window_min,
            self.window_max,
            self.window_step,
        ) {
            (Some(w), ..) => w.parse()?,
            (None, Some(min), Some(max), Some(step)) => {
                WindowSpec::Sweep(WindowSweep::new(min, max, step)?)
            }
            _ => WindowSpec::Auto,
        };
        let kind: AggregationKind = self.agg.parse()?;
        let filter: FilterSpec = self.filter.parse()?;
        let mut cfg = EvalConfig::new(self.scores, self.events, self.out);
        cfg.window = window;
        cfg.aggregation = AggregationSpec::new(kind).with_filter(filter);
        cfg.alphas = parse_alphas(&self.alpha)?;
        cfg.nab = self.nab;
        cfg.alarm_threshold = self.alarm_threshold;
        cfg.existence_weight = self.existence_weight;
        cfg.seed = self.seed;
        Ok(cfg)
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated series lengths.
    #[arg(long, default_value = "10000,100000,1000000")]
    sizes: String,
    #[arg(long, default_value = "0.2,0.5,0.8")]
    alpha: String,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10_000.0)]
    duration: f64,
    #[arg(long, default_value_t = 1.0)]
    interval: f64,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 10)]
    events: usize,
    /// random | oracle:<lead>:<noise> | constant:<value>
    #[arg(long, default_value = "random")]
    detector: String,
    #[arg(long, default_value = "synthetic")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_detector(s: &str) -> Result<DetectorModel> {
    let bad = || CliError::Usage(format!("bad detector '{s}'"));
    let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        ["random"] => Ok(DetectorModel::Random),
        ["oracle", lead, noise] => Ok(DetectorModel::Oracle {
            lead: num(lead)?,
            noise: num(noise)?,
        }),
        ["constant", v] => Ok(DetectorModel::Constant { value: num(v)? }),
        _ => Err(bad()),
    }
}

/// Prints a line to stdout; a closed pipe is not an error.
fn say(line: impl Display) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate(args) => {
            let report = run_evaluate(&args.into_config()?)?;
            for f in &report.files {
                say(f.display());
            }
        }
        Command::Surface(args) => {
            let report = run_surface(&args.into_config()?)?;
            for f in &report.files {
                say(f.display());
            }
        }
        Command::Compare(args) => {
            let cfg = args.into_config()?;
            let report = run_compare(&cfg)?;
            let echo = serde_json::json!({ "config": cfg, "comparison": report.file });
            say(echo);
        }
        Command::Bench(args) => {
            let sizes = args
                .sizes
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(format!("bad sizes '{}': {e}", args.sizes)))?;
            let cfg = BenchConfig {
                sizes,
                alphas: parse_alphas(&args.alpha)?,
                repetitions: args.repetitions,
                seed: args.seed,
                out: Some(args.out),
                ..BenchConfig::default()
            };
            let report = run_bench(&cfg)?;
            say(format_args!(
                "pw-ROC slope {:.3}, doubling ratio {:.3}, min speedup {:.1}x, {:.1} s",
                report.slope, report.doubling_ratio, report.min_speedup, report.total_seconds
            ));
            report.check()?;
        }
        Command::Synth(args) => {
            let spec = SyntheticSpec {
                duration: args.duration,
                interval: args.interval,
                jitter: args.jitter,
                events: args.events,
                detector: parse_detector(&args.detector)?,
                seed: args.seed,
            };
            let (series, events) = generate_synthetic(&spec)?;
            ensure_dir(&args.out)?;
            let scores = args.out.join("scores.csv");
            let ev = args.out.join("events.csv");
            write_scores(&scores, &series)?;
            write_events(&ev, &events)?;
            say(scores.display());
            say(ev.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
