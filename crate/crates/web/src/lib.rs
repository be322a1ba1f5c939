//! WebAssembly bindings for the browser demo.
//!
//! Every exported function takes a JSON parameter object and returns a JSON
//! string, so the page needs no generated type glue beyond the functions
//! themselves.

use pwroc_core::aggregation::aggregate_partition;
use pwroc_core::range_based::{
    events_to_ranges, labels_to_ranges, range_scores, RangeMetricConfig,
};
use pwroc_core::roc::{label_threshold, roc_curve, roc_surface, threshold_metrics};
use pwroc_core::synth::{generate_synthetic, DetectorModel, SyntheticSpec};
use pwroc_core::{
    compute_wmax, partition, AggregationKind, AggregationSpec, EventLog, RocCurve, ScoredSeries,
};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct DemoParams {
    pub duration: f64,
    pub interval: f64,
    pub jitter: f64,
    pub events: usize,
    /// `oracle`, `random` or `constant`.
    pub detector: String,
    pub lead: f64,
    pub noise: f64,
    pub seed: u64,
    /// `mean | median | ccdf:<τ> | nab[:norm]`
    pub agg: String,
    /// Number of windows in the surface sweep.
    pub windows: usize,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self {
            duration: 2000.0,
            interval: 1.0,
            jitter: 0.2,
            events: 5,
            detector: "oracle".into(),
            lead: 60.0,
            noise: 0.3,
            seed: 1,
            agg: "mean".into(),
            windows: 12,
        }
    }
}

struct Demo {
    params: DemoParams,
    series: ScoredSeries,
    events: EventLog,
    spec: AggregationSpec,
    w_max: f64,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn build(params: &str) -> Result<Demo, String> {
    let p: DemoParams = if params.trim().is_empty() {
        DemoParams::default()
    } else {
        serde_json::from_str(params).map_err(err)?
    };
    let detector = match p.detector.as_str() {
        "oracle" => DetectorModel::Oracle {
            lead: p.lead,
            noise: p.noise,
        },
        "random" => DetectorModel::Random,
        "constant" => DetectorModel::Constant { value: 0.5 },
        other => return Err(format!("unknown detector '{other}'")),
    };
    let (series, events) = generate_synthetic(&SyntheticSpec {
        duration: p.duration,
        interval: p.interval,
        jitter: p.jitter,
        events: p.events,
        detector,
        seed: p.seed,
    })
    .map_err(err)?;
    let kind: AggregationKind = p.agg.parse().map_err(err)?;
    let w_max = compute_wmax(&events, &series).map_err(err)?;
    Ok(Demo {
        params: p,
        series,
        events,
        spec: AggregationSpec::new(kind),
        w_max,
    })
}

#[derive(Serialize)]
struct CurveView {
    auc: f64,
    positives: usize,
    negatives: usize,
    points: Vec<(f64, f64)>,
}

impl From<&RocCurve> for CurveView {
    fn from(c: &RocCurve) -> Self {
        Self {
            auc: c.auc,
            positives: c.positives,
            negatives: c.negatives,
            points: c.points.iter().map(|p| (p.fpr, p.tpr)).collect(),
        }
    }
}

#[derive(Serialize)]
struct SurfaceWindow {
    window: f64,
    curve: Option<CurveView>,
}

#[derive(Serialize)]
struct SurfaceView {
    w_max: f64,
    windows: Vec<SurfaceWindow>,
}

/// ROC curves for evenly spaced windows up to `W_max`.
pub fn surface_json(params: &str) -> Result<String, String> {
    let demo = build(params)?;
    let n = demo.params.windows.clamp(1, 200);
    let sweep: Vec<f64> = (1..=n).map(|i| demo.w_max * i as f64 / n as f64).collect();
    let surface = roc_surface(&demo.series, &demo.events, &sweep, &demo.spec).map_err(err)?;
    let view = SurfaceView {
        w_max: surface.w_max,
        windows: surface
            .entries
            .iter()
            .map(|e| SurfaceWindow {
                window: e.window,
                curve: e.curve.as_ref().map(CurveView::from),
            })
            .collect(),
    };
    serde_json::to_string(&view).map_err(err)
}

#[derive(Serialize)]
struct IntervalView {
    start: f64,
    end: f64,
    positive: bool,
    value: f64,
}

#[derive(Serialize)]
struct PartitionView {
    window: f64,
    w_max: f64,
    timestamps: Vec<f64>,
    scores: Vec<f64>,
    events: Vec<f64>,
    intervals: Vec<IntervalView>,
    curve: Option<CurveView>,
}

/// Series, events, intervals with aggregated values, and the ROC curve for
/// one window.
pub fn partition_json(params: &str, window: f64) -> Result<String, String> {
    let demo = build(params)?;
    let part = partition(&demo.series, &demo.events, window).map_err(err)?;
    let samples = aggregate_partition(&part, &demo.series, &demo.spec).map_err(err)?;
    let view = PartitionView {
        window,
        w_max: demo.w_max,
        timestamps: demo.series.timestamps().to_vec(),
        scores: demo.series.scores().to_vec(),
        events: demo.events.events().to_vec(),
        intervals: part
            .intervals
            .iter()
            .zip(&samples)
            .map(|(iv, s)| IntervalView {
                start: iv.start,
                end: iv.end,
                positive: iv.label.is_positive(),
                value: s.value,
            })
            .collect(),
        curve: roc_curve(&samples, window)
            .ok()
            .as_ref()
            .map(CurveView::from),
    };
    serde_json::to_string(&view).map_err(err)
}

#[derive(Serialize)]
struct CompareView {
    alpha: f64,
    threshold: f64,
    rb_precision: f64,
    rb_recall: f64,
    rb_f1: f64,
    pw_precision: f64,
    pw_recall: f64,
    pw_f1: f64,
}

/// Range-based and pw precision/recall/F1 for α = 0, 0.1, ..., 1.
pub fn compare_json(params: &str, window: f64) -> Result<String, String> {
    let demo = build(params)?;
    let part = partition(&demo.series, &demo.events, window).map_err(err)?;
    let samples = aggregate_partition(&part, &demo.series, &demo.spec).map_err(err)?;
    let real = events_to_ranges(&demo.events, &demo.series, window);
    let cfg = RangeMetricConfig::default();
    let scores = demo.series.scores();
    let rows = (0..=10)
        .map(|i| {
            let alpha = f64::from(i) / 10.0;
            let threshold = label_threshold(scores, alpha).map_err(err)?;
            let labels: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
            let rb = range_scores(&real, &labels_to_ranges(&labels), &cfg).map_err(err)?;
            let pw = threshold_metrics(&samples, threshold);
            Ok(CompareView {
                alpha,
                threshold,
                rb_precision: rb.precision,
                rb_recall: rb.recall,
                rb_f1: rb.f1,
                pw_precision: pw.precision,
                pw_recall: pw.recall,
                pw_f1: pw.f1,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    serde_json::to_string(&rows).map_err(err)
}

#[wasm_bindgen]
pub fn surface(params: &str) -> Result<String, JsValue> {
    surface_json(params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = partitionView)]
pub fn partition_view(params: &str, window: f64) -> Result<String, JsValue> {
    partition_json(params, window).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compare(params: &str, window: f64) -> Result<String, JsValue> {
    compare_json(params, window).map_err(|e| JsValue::from_str(&e))
}
