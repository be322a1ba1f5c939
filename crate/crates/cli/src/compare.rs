//! `compare`: range-based and pw precision/recall/F1 side by side.

use std::collections::BTreeSet;
use std::path::PathBuf;

use pwroc_core::aggregation::aggregate_partition;
use pwroc_core::range_based::{
    events_to_ranges, labels_to_ranges, range_scores, RangeMetricConfig, RangeScores,
};
use pwroc_core::roc::{label_threshold, threshold_metrics};
use pwroc_core::{partition, EventLog, ScoredSeries, ThresholdMetrics};
use serde::Serialize;

use crate::config::EvalConfig;
use crate::error::{CliError, Result};
use crate::io::{ensure_dir, fmt_f64, load_events, load_scores, CsvOut};

pub const COMPARISON_HEADER: &str = "window,alpha,threshold,rb_precision,rb_recall,rb_f1,\
rb_existence_rate,pw_precision,pw_recall,pw_f1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub window: f64,
    pub alpha: f64,
    /// Label-map threshold of the raw scores, reused on aggregated values.
    pub threshold: f64,
    pub range_based: RangeScores,
    pub pw: ThresholdMetrics,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub file: PathBuf,
}

/// Runs the comparison grid and writes `comparison.csv` under `config.out`.
pub fn run_compare(config: &EvalConfig) -> Result<CompareReport> {
    config.validate()?;
    let series = load_scores(&config.scores)?;
    let events = load_events(&config.events)?;
    let rows = compare(config, &series, &events)?;
    ensure_dir(&config.out)?;
    let file = config.out.join("comparison.csv");
    let mut out = CsvOut::create(&file, COMPARISON_HEADER)?;
    for r in &rows {
        out.floats(&[
            r.window,
            r.alpha,
            r.threshold,
            r.range_based.precision,
            r.range_based.recall,
            r.range_based.f1,
            r.range_based.existence_rate,
            r.pw.precision,
            r.pw.recall,
            r.pw.f1,
        ])?;
    }
    out.finish()?;
    Ok(CompareReport { rows, file })
}

/// One row per (window, α), windows outermost.
pub fn compare(
    config: &EvalConfig,
    series: &ScoredSeries,
    events: &EventLog,
) -> Result<Vec<CompareRow>> {
    let windows = config.window.resolve(series, events)?;
    let cfg = RangeMetricConfig::with_existence_weight(config.existence_weight)?;
    let mut rows = Vec::with_capacity(windows.len() * config.alphas.len());
    for w in windows {
        let part = partition(series, events, w)?;
        let real = events_to_ranges(events, series, w);
        check_consistency(w, &part, &real)?;
        let samples = aggregate_partition(&part, series, &config.aggregation)?;
        for &alpha in &config.alphas {
            let threshold = label_threshold(series.scores(), alpha)?;
            let labels: Vec<bool> = series.scores().iter().map(|&s| s >= threshold).collect();
            let predicted = labels_to_ranges(&labels);
            rows.push(CompareRow {
                window: w,
                alpha,
                threshold,
                range_based: range_scores(&real, &predicted, &cfg)?,
                pw: threshold_metrics(&samples, threshold),
            });
        }
    }
    Ok(rows)
}

/// The positive intervals and the event ranges must cover the same indices.
fn check_consistency(
    w: f64,
    part: &pwroc_core::Partition,
    real: &pwroc_core::range_based::LabeledRanges,
) -> Result<()> {
    let from_partition: BTreeSet<usize> =
        part.positives().flat_map(|iv| iv.members.clone()).collect();
    let from_ranges: BTreeSet<usize> = real.indices().collect();
    if from_partition != from_ranges {
        let diff: Vec<usize> = from_partition
            .symmetric_difference(&from_ranges)
            .take(5)
            .copied()
            .collect();
        return Err(CliError::Consistency(format!(
            "window {}: event ranges and positive intervals disagree at indices {diff:?}",
            fmt_f64(w)
        )));
    }
    Ok(())
}
