//! `bench`: wall-time of pw-ROC evaluation against the range-based evaluator.
//!
//! Both evaluators see the same synthetic series, window lengths and
//! label-map thresholds. The label thresholds are computed once outside the
//! timed regions.

use std::hint::black_box;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use pwroc_core::aggregation::aggregate_partition;
use pwroc_core::range_based::{
    events_to_ranges, labels_to_ranges, range_scores, RangeMetricConfig,
};
use pwroc_core::roc::{label_threshold, roc_curve, threshold_metrics};
use pwroc_core::synth::{generate_synthetic, DetectorModel, SyntheticSpec};
use pwroc_core::{compute_wmax, partition, AggregationSpec, EventLog, ScoredSeries};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::{ensure_dir, fmt_f64, write_json, CsvOut};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    /// Series lengths for the pw-ROC scaling fit.
    pub sizes: Vec<usize>,
    /// Largest size at which the range-based evaluator is also timed.
    pub range_based_max: usize,
    /// Window lengths as fractions of `W_max`.
    pub window_fractions: Vec<f64>,
    pub alphas: Vec<f64>,
    pub events: usize,
    pub noise: f64,
    /// Timed samples per measurement; the minimum is kept.
    pub repetitions: usize,
    pub seed: u64,
    /// Required pw-ROC speedup at the longest window.
    pub min_speedup: f64,
    /// Accepted range of the log-log slope.
    pub slope_range: (f64, f64),
    /// Upper bound on the time ratio when `n` doubles.
    pub max_doubling_ratio: f64,
    /// Size at which the doubling check runs (`n` and `2n`).
    pub doubling_size: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10_000, 100_000, 1_000_000],
            range_based_max: 100_000,
            window_fractions: vec![0.1, 0.5, 0.9],
            alphas: vec![0.2, 0.5, 0.8],
            events: 10,
            noise: 0.3,
            repetitions: 5,
            seed: 7,
            min_speedup: 10.0,
            slope_range: (0.7, 1.3),
            max_doubling_ratio: 2.5,
            doubling_size: 100_000,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub evaluator: &'static str,
    pub n: usize,
    pub window: f64,
    pub alpha: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub n: usize,
    pub window: f64,
    pub alpha: f64,
    pub pw_seconds: f64,
    pub range_based_seconds: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub timings: Vec<Timing>,
    /// Total pw-ROC seconds over the (window, α) grid, per size.
    pub pw_totals: Vec<(usize, f64)>,
    pub slope: f64,
    pub doubling_ratio: f64,
    /// Range-based over pw-ROC time at the longest window, sizes ≥ 1e5.
    pub speedups: Vec<SpeedupRow>,
    pub min_speedup: f64,
    pub slope_ok: bool,
    pub doubling_ok: bool,
    pub speedup_ok: bool,
    pub total_seconds: f64,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.slope_ok && self.doubling_ok && self.speedup_ok
    }

    pub fn check(&self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        Err(CliError::Bench(format!(
            "slope {:.3} (ok: {}), doubling ratio {:.3} (ok: {}), min speedup {:.1} (ok: {})",
            self.slope,
            self.slope_ok,
            self.doubling_ratio,
            self.doubling_ok,
            self.min_speedup,
            self.speedup_ok
        )))
    }
}

struct Dataset {
    series: ScoredSeries,
    events: EventLog,
    windows: Vec<f64>,
    thresholds: Vec<f64>,
}

fn dataset(cfg: &BenchConfig, n: usize) -> Result<Dataset> {
    let probe_wmax = n as f64 / cfg.events as f64;
    let spec = SyntheticSpec {
        duration: n as f64,
        interval: 1.0,
        jitter: 0.3,
        events: cfg.events,
        detector: DetectorModel::Oracle {
            lead: 0.5 * probe_wmax,
            noise: cfg.noise,
        },
        seed: cfg.seed,
    };
    let (series, events) = generate_synthetic(&spec)?;
    let w_max = compute_wmax(&events, &series)?;
    let windows = cfg.window_fractions.iter().map(|f| f * w_max).collect();
    let thresholds = cfg
        .alphas
        .iter()
        .map(|&a| label_threshold(series.scores(), a))
        .collect::<pwroc_core::Result<_>>()?;
    Ok(Dataset {
        series,
        events,
        windows,
        thresholds,
    })
}

fn pw_eval(d: &Dataset, w: f64, c: f64, spec: &AggregationSpec) -> Result<f64> {
    let part = partition(&d.series, &d.events, w)?;
    let samples = aggregate_partition(&part, &d.series, spec)?;
    let curve = roc_curve(&samples, w)?;
    let m = threshold_metrics(&samples, c);
    Ok(curve.auc + m.f1)
}

fn range_eval(d: &Dataset, w: f64, c: f64, cfg: &RangeMetricConfig) -> Result<f64> {
    let labels: Vec<bool> = d.series.scores().iter().map(|&s| s >= c).collect();
    let predicted = labels_to_ranges(&labels);
    let real = events_to_ranges(&d.events, &d.series, w);
    Ok(range_scores(&real, &predicted, cfg)?.f1)
}

/// Minimum per-call time. Calls are batched so each sample lasts at least a
/// few milliseconds.
fn time_it(reps: usize, mut f: impl FnMut() -> Result<f64>) -> Result<f64> {
    let start = Instant::now();
    black_box(f()?);
    let once = start.elapsed().max(Duration::from_nanos(100));
    let batch = (Duration::from_millis(5).as_secs_f64() / once.as_secs_f64()).ceil() as usize;
    let batch = batch.clamp(1, 10_000);
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        for _ in 0..batch {
            black_box(f()?);
        }
        best = best.min(start.elapsed().as_secs_f64() / batch as f64);
    }
    Ok(best)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn pw_grid(cfg: &BenchConfig, d: &Dataset, n: usize, timings: &mut Vec<Timing>) -> Result<f64> {
    let spec = AggregationSpec::default();
    let mut total = 0.0;
    for &w in &d.windows {
        for (&alpha, &c) in cfg.alphas.iter().zip(&d.thresholds) {
            let seconds = time_it(cfg.repetitions, || pw_eval(d, w, c, &spec))?;
            total += seconds;
            timings.push(Timing {
                evaluator: "pwroc",
                n,
                window: w,
                alpha,
                seconds,
            });
        }
    }
    Ok(total)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.sizes.len() < 2 || cfg.window_fractions.is_empty() || cfg.alphas.is_empty() {
        return Err(CliError::Usage(
            "bench needs at least two sizes, one window fraction and one alpha".into(),
        ));
    }
    if let Some(f) = cfg
        .window_fractions
        .iter()
        .find(|f| !(**f > 0.0 && **f <= 1.0))
    {
        return Err(CliError::Usage(format!(
            "window fraction {f} outside (0, 1]"
        )));
    }
    let started = Instant::now();
    let range_cfg = RangeMetricConfig::default();
    let mut timings = Vec::new();
    let mut pw_totals = Vec::new();
    let mut speedups = Vec::new();

    for &n in &cfg.sizes {
        let d = dataset(cfg, n)?;
        pw_totals.push((n, pw_grid(cfg, &d, n, &mut timings)?));
        if n > cfg.range_based_max {
            continue;
        }
        let longest = d.windows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for &w in &d.windows {
            for (&alpha, &c) in cfg.alphas.iter().zip(&d.thresholds) {
                let seconds = time_it(cfg.repetitions, || range_eval(&d, w, c, &range_cfg))?;
                timings.push(Timing {
                    evaluator: "range_based",
                    n,
                    window: w,
                    alpha,
                    seconds,
                });
                if w == longest && n >= 100_000.min(cfg.range_based_max) {
                    let pw_seconds = timings
                        .iter()
                        .find(|t| {
                            t.evaluator == "pwroc" && t.n == n && t.window == w && t.alpha == alpha
                        })
                        .map_or(f64::NAN, |t| t.seconds);
                    speedups.push(SpeedupRow {
                        n,
                        window: w,
                        alpha,
                        pw_seconds,
                        range_based_seconds: seconds,
                        ratio: seconds / pw_seconds,
                    });
                }
            }
        }
    }

    let doubled = {
        let n = cfg.doubling_size;
        let base = match pw_totals.iter().find(|(m, _)| *m == n) {
            Some(&(_, t)) => t,
            None => pw_grid(cfg, &dataset(cfg, n)?, n, &mut Vec::new())?,
        };
        let twice = pw_grid(cfg, &dataset(cfg, 2 * n)?, 2 * n, &mut timings)?;
        twice / base
    };

    let points: Vec<(f64, f64)> = pw_totals.iter().map(|&(n, t)| (n as f64, t)).collect();
    let slope = log_log_slope(&points);
    let min_speedup = speedups
        .iter()
        .map(|s| s.ratio)
        .fold(f64::INFINITY, f64::min);

    let report = BenchReport {
        config: cfg.clone(),
        slope_ok: (cfg.slope_range.0..=cfg.slope_range.1).contains(&slope),
        doubling_ok: doubled <= cfg.max_doubling_ratio,
        speedup_ok: !speedups.is_empty() && min_speedup >= cfg.min_speedup,
        timings,
        pw_totals,
        slope,
        doubling_ratio: doubled,
        speedups,
        min_speedup,
        total_seconds: started.elapsed().as_secs_f64(),
    };

    if let Some(dir) = &cfg.out {
        ensure_dir(dir)?;
        let mut out = CsvOut::create(dir.join("bench.csv"), "evaluator,n,window,alpha,seconds")?;
        for t in &report.timings {
            out.line(&format!(
                "{},{},{},{},{}",
                t.evaluator,
                t.n,
                fmt_f64(t.window),
                fmt_f64(t.alpha),
                fmt_f64(t.seconds)
            ))?;
        }
        out.finish()?;
        write_json(dir.join("bench.json"), &report)?;
    }
    Ok(report)
}
