//! `evaluate` and `surface`: ROC curves, surface and summary on disk.

use std::path::{Path, PathBuf};

use pwroc_core::aggregation::apply_filter;
use pwroc_core::nab::{score_alarms, NabOutcome, NabWeights};
use pwroc_core::roc::{label_threshold, roc_surface, threshold_metrics};
use pwroc_core::temporal::partition;
use pwroc_core::{
    aggregation::aggregate_partition, EventLog, PartitionCounts, RocCurve, RocSurface, ScoredSeries,
};
use serde::Serialize;

use crate::config::{EvalConfig, WindowSpec};
use crate::error::Result;
use crate::io::{ensure_dir, fmt_f64, load_events, load_scores, write_json, CsvOut};

pub const AUTO_WINDOW_NOTE: &str = "window chosen by the rule of thumb \
min(0.1 * observed span / number of events, W_max); it is a heuristic borrowed \
from supervised practice, not a tuned value";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSummary {
    pub window: f64,
    pub auc: f64,
    pub positives: usize,
    pub negatives: usize,
    pub counts: PartitionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    pub window: f64,
    pub positive_intervals: usize,
    pub negative_intervals: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NabSummary {
    pub window: f64,
    #[serde(flatten)]
    pub outcome: NabOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: EvalConfig,
    pub w_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_note: Option<&'static str>,
    pub series_length: usize,
    pub events: usize,
    pub windows: Vec<WindowSummary>,
    pub gaps: Vec<GapSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nab: Vec<NabSummary>,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub summary: Summary,
    pub surface: RocSurface,
    pub files: Vec<PathBuf>,
}

pub fn curve_file_name(w: f64) -> String {
    format!("curve_{w}.csv")
}

/// Full evaluation: per-window curves, surface, threshold metrics, summary.
pub fn run_evaluate(config: &EvalConfig) -> Result<EvalReport> {
    run(config, true)
}

/// Surface and summary only.
pub fn run_surface(config: &EvalConfig) -> Result<EvalReport> {
    run(config, false)
}

fn run(config: &EvalConfig, full: bool) -> Result<EvalReport> {
    config.validate()?;
    let series = load_scores(&config.scores)?;
    let events = load_events(&config.events)?;
    let (summary, surface) = compute(config, &series, &events)?;
    if summary.window_note.is_some() {
        eprintln!("note: {AUTO_WINDOW_NOTE}");
    }

    ensure_dir(&config.out)?;
    let mut files = Vec::new();
    if full {
        for curve in surface.curves() {
            let path = config.out.join(curve_file_name(curve.window_length));
            write_curve(&path, curve)?;
            files.push(path);
        }
        let path = config.out.join("threshold_metrics.csv");
        write_threshold_metrics(&path, config, &series, &events, &surface)?;
        files.push(path);
    }
    let path = config.out.join("surface.csv");
    write_surface(&path, &surface)?;
    files.push(path);
    let path = config.out.join("summary.json");
    write_json(&path, &summary)?;
    files.push(path);

    Ok(EvalReport {
        summary,
        surface,
        files,
    })
}

/// Surface and summary for in-memory data.
pub fn compute(
    config: &EvalConfig,
    series: &ScoredSeries,
    events: &EventLog,
) -> Result<(Summary, RocSurface)> {
    let windows = config.window.resolve(series, events)?;
    let surface = roc_surface(series, events, &windows, &config.aggregation)?;

    let mut summary_windows = Vec::new();
    let mut gaps = Vec::new();
    for entry in &surface.entries {
        match &entry.curve {
            Some(curve) => summary_windows.push(WindowSummary {
                window: entry.window,
                auc: curve.auc,
                positives: curve.positives,
                negatives: curve.negatives,
                counts: entry.counts,
            }),
            None => gaps.push(GapSummary {
                window: entry.window,
                positive_intervals: entry.counts.positive_intervals,
                negative_intervals: entry.counts.negative_intervals,
                reason: if entry.counts.negative_intervals == 0 {
                    "no negative intervals".into()
                } else {
                    "no positive intervals".into()
                },
            }),
        }
    }

    let nab = if config.nab {
        let filtered = apply_filter(series, &config.aggregation.filter);
        let scores = filtered.as_deref().unwrap_or(series.scores());
        let alarms: Vec<f64> = series
            .timestamps()
            .iter()
            .zip(scores)
            .filter(|(_, &s)| s >= config.alarm_threshold)
            .map(|(&t, _)| t)
            .collect();
        windows
            .iter()
            .map(|&w| {
                Ok(NabSummary {
                    window: w,
                    outcome: score_alarms(&alarms, events, w, &NabWeights::default())?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let summary = Summary {
        config: config.clone(),
        w_max: surface.w_max,
        window_note: matches!(config.window, WindowSpec::Auto).then_some(AUTO_WINDOW_NOTE),
        series_length: series.len(),
        events: events.len(),
        windows: summary_windows,
        gaps,
        nab,
    };
    Ok((summary, surface))
}

pub fn write_curve(path: &Path, curve: &RocCurve) -> Result<()> {
    let mut out = CsvOut::create(path, "threshold,fpr,tpr")?;
    for p in &curve.points {
        out.floats(&[p.threshold, p.fpr, p.tpr])?;
    }
    out.finish()
}

pub fn write_surface(path: &Path, surface: &RocSurface) -> Result<()> {
    let mut out = CsvOut::create(path, "window,threshold,fpr,tpr")?;
    for curve in surface.curves() {
        for p in &curve.points {
            out.floats(&[curve.window_length, p.threshold, p.fpr, p.tpr])?;
        }
    }
    out.finish()
}

/// Confusion metrics per (window, α). The threshold for α is the label-map
/// threshold of the raw scores, applied to the aggregated values.
fn write_threshold_metrics(
    path: &Path,
    config: &EvalConfig,
    series: &ScoredSeries,
    events: &EventLog,
    surface: &RocSurface,
) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        "window,alpha,threshold,tp,fp,tn,fn,precision,recall,f1",
    )?;
    for entry in surface.entries.iter().filter(|e| !e.is_gap()) {
        let part = partition(series, events, entry.window)?;
        let samples = aggregate_partition(&part, series, &config.aggregation)?;
        for &alpha in &config.alphas {
            let c = label_threshold(series.scores(), alpha)?;
            let m = threshold_metrics(&samples, c);
            out.line(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(entry.window),
                fmt_f64(alpha),
                fmt_f64(c),
                m.tp,
                m.fp,
                m.tn,
                m.fn_,
                fmt_f64(m.precision),
                fmt_f64(m.recall),
                fmt_f64(m.f1)
            ))?;
        }
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwroc_core::AggregationKind;

    fn data() -> (ScoredSeries, EventLog) {
        let ts: Vec<f64> = (1..=10).map(f64::from).collect();
        let scores = vec![0.1, 0.2, 0.3, 0.9, 0.8, 0.2, 0.1, 0.3, 0.7, 0.9];
        (
            ScoredSeries::new(ts, scores).unwrap(),
            EventLog::new(vec![5.0, 10.0]).unwrap(),
        )
    }

    #[test]
    fn summary_reports_gaps_without_failing() {
        let (series, events) = data();
        let mut cfg = EvalConfig::new("s.csv", "e.csv", "out");
        cfg.window = WindowSpec::Sweep(pwroc_core::WindowSweep::new(1.0, 5.0, 1.0).unwrap());
        cfg.aggregation = pwroc_core::AggregationSpec::new(AggregationKind::Median);
        let (summary, surface) = compute(&cfg, &series, &events).unwrap();
        assert_eq!(surface.entries.len(), 5);
        assert_eq!(summary.windows.len() + summary.gaps.len(), 5);
        // w = 5 leaves no room for a negative interval
        let gap = summary.gaps.iter().find(|g| g.window == 5.0).unwrap();
        assert_eq!(gap.negative_intervals, 0);
        assert_eq!(gap.reason, "no negative intervals");
    }

    #[test]
    fn auto_window_carries_note() {
        let (series, events) = data();
        let cfg = EvalConfig::new("s.csv", "e.csv", "out");
        let (summary, _) = compute(&cfg, &series, &events).unwrap();
        assert_eq!(summary.window_note, Some(AUTO_WINDOW_NOTE));
        let json = serde_json::to_value(&summary).unwrap();
        assert!(json["config"].get("out").is_none());
    }

    #[test]
    fn nab_toggle_adds_alarm_scores() {
        let (series, events) = data();
        let mut cfg = EvalConfig::new("s.csv", "e.csv", "out");
        cfg.window = WindowSpec::Single { window: 2.0 };
        cfg.nab = true;
        let (summary, _) = compute(&cfg, &series, &events).unwrap();
        assert_eq!(summary.nab.len(), 1);
        // alarms at 4, 5, 9, 10; windows (3, 5] and (8, 10]
        let o = &summary.nab[0].outcome;
        assert_eq!(o.detections, vec![-0.5, -0.5]);
        assert_eq!(o.missed_windows, 0);
        assert_eq!(o.false_alarms, 0);
    }
}
