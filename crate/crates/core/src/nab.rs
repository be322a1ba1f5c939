//! Classic window scorer from the Numenta Anomaly Benchmark.
//!
//! Positions are relative to a window of length `w` ending at an event:
//! `y = (t - s_i) / w`, so `y` runs over `(-1, 0]` inside the window, is 0 at
//! the event and positive afterwards.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::temporal::{in_preceding_window, EventLog};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NabWeights {
    pub true_positive: f64,
    pub true_negative: f64,
    pub false_positive: f64,
    pub false_negative: f64,
}

impl Default for NabWeights {
    fn default() -> Self {
        Self {
            true_positive: 1.0,
            true_negative: 1.0,
            false_positive: -1.0,
            false_negative: -1.0,
        }
    }
}

impl NabWeights {
    pub fn new(tp: f64, tn: f64, fp: f64, fn_: f64) -> Result<Self> {
        let positive = |v: f64| (0.0..=1.0).contains(&v);
        let negative = |v: f64| (-1.0..=0.0).contains(&v);
        if !(positive(tp) && positive(tn) && negative(fp) && negative(fn_)) {
            return Err(Error::parameter(format!(
                "NAB weights out of range: A_TP={tp}, A_TN={tn}, A_FP={fp}, A_FN={fn_}"
            )));
        }
        Ok(Self {
            true_positive: tp,
            true_negative: tn,
            false_positive: fp,
            false_negative: fn_,
        })
    }
}

/// `σ^A(y) = (A_TP - A_FP) / (1 + e^{5y}) - 1`.
pub fn sigma_a(y: f64, weights: &NabWeights) -> f64 {
    let spread = weights.true_positive - weights.false_positive;
    // logistic 1/(1+e^{5y}) without overflow for large |y|
    let z = 5.0 * y;
    let logistic = if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    };
    spread * logistic - 1.0
}

/// `Σ σ^A(y) + A_FN · f_d`.
pub fn nab_raw_score(detections: &[f64], missed_windows: usize, weights: &NabWeights) -> f64 {
    let detected: f64 = detections.iter().map(|&y| sigma_a(y, weights)).sum();
    detected + weights.false_negative * missed_windows as f64
}

/// Alarms sorted into window detections, missed windows and stray alarms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NabOutcome {
    /// Relative position of the first alarm in each detected window.
    pub detections: Vec<f64>,
    pub missed_windows: usize,
    /// Alarms in no window.
    pub false_alarms: usize,
    pub raw_score: f64,
    /// `raw_score` plus `A_FP` for every stray alarm.
    pub score: f64,
}

/// Scores alarm timestamps against windows `(s_i - w, s_i]`.
///
/// Only the earliest alarm of each window counts; later alarms inside the
/// same window are ignored. Alarms outside every window are charged a flat
/// `A_FP` each.
pub fn score_alarms(
    alarms: &[f64],
    events: &EventLog,
    w: f64,
    weights: &NabWeights,
) -> Result<NabOutcome> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::parameter(format!(
            "window length {w} must be positive"
        )));
    }
    let ev = events.events();
    let mut first_alarm: Vec<Option<f64>> = vec![None; ev.len()];
    let mut false_alarms = 0;
    for &t in alarms {
        let window = ev.partition_point(|&s| s < t);
        match ev.get(window) {
            Some(&s) if in_preceding_window(t, s, w) => {
                let slot = &mut first_alarm[window];
                if slot.is_none_or(|earliest| t < earliest) {
                    *slot = Some(t);
                }
            }
            _ => false_alarms += 1,
        }
    }
    let detections: Vec<f64> = first_alarm
        .iter()
        .zip(ev)
        .filter_map(|(a, &s)| a.map(|t| (t - s) / w))
        .collect();
    let missed_windows = ev.len() - detections.len();
    let raw_score = nab_raw_score(&detections, missed_windows, weights);
    Ok(NabOutcome {
        score: raw_score + weights.false_positive * false_alarms as f64,
        detections,
        missed_windows,
        false_alarms,
        raw_score,
    })
}
