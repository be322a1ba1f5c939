//! Range-based precision and recall with flat positional bias.
//!
//! Real and predicted anomalies are maximal runs of consecutive instance
//! indices. Recall scores every real range by `α·existence + (1-α)·overlap`;
//! precision scores every predicted range by its overlap alone.
//!
//! The evaluator visits every (real, predicted) pair and, for intersecting
//! pairs, walks the positions of the range being scored. This is the
//! reference cost profile the comparison harness measures, not an optimised
//! implementation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::temporal::{in_preceding_window, lower_bound, EventLog, ScoredSeries};

/// Inclusive index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl IndexRange {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "range start {start} after end {end}");
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos <= self.end
    }

    pub fn intersects(&self, other: &IndexRange) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl From<(usize, usize)> for IndexRange {
    fn from((start, end): (usize, usize)) -> Self {
        IndexRange::new(start, end)
    }
}

/// Sorted, pairwise disjoint ranges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabeledRanges {
    ranges: Vec<IndexRange>,
}

impl LabeledRanges {
    pub fn new(ranges: Vec<IndexRange>) -> Result<Self> {
        if ranges.windows(2).any(|w| w[0].end >= w[1].start) {
            return Err(Error::input("ranges must be sorted and disjoint"));
        }
        Ok(Self { ranges })
    }

    pub fn ranges(&self) -> &[IndexRange] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Indices covered by any range.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranges.iter().flat_map(|r| r.start..=r.end)
    }
}

impl TryFrom<&[(usize, usize)]> for LabeledRanges {
    type Error = Error;

    fn try_from(pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.iter().any(|&(s, e)| s > e) {
            return Err(Error::input("range start after end"));
        }
        Self::new(pairs.iter().copied().map(IndexRange::from).collect())
    }
}

/// Positional weighting inside a range. Only the flat profile is offered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionalBias {
    #[default]
    Flat,
}

impl PositionalBias {
    fn weight(self, _pos: usize, _range: &IndexRange) -> f64 {
        match self {
            PositionalBias::Flat => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeMetricConfig {
    /// Weight `α` of the existence reward in recall.
    pub existence_weight: f64,
    pub bias: PositionalBias,
    /// Multiply overlap by `1 / #intersecting ranges`.
    pub cardinality: bool,
}

impl Default for RangeMetricConfig {
    fn default() -> Self {
        Self {
            existence_weight: 0.0,
            bias: PositionalBias::Flat,
            cardinality: false,
        }
    }
}

impl RangeMetricConfig {
    pub fn with_existence_weight(existence_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&existence_weight) {
            return Err(Error::parameter(format!(
                "existence weight {existence_weight} outside [0, 1]"
            )));
        }
        Ok(Self {
            existence_weight,
            ..Self::default()
        })
    }
}

/// Maximal runs of `true` as ranges.
pub fn labels_to_ranges(labels: &[bool]) -> LabeledRanges {
    let mut ranges = Vec::new();
    let mut start = None;
    for (i, &l) in labels.iter().enumerate() {
        match (l, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                ranges.push(IndexRange::new(s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        ranges.push(IndexRange::new(s, labels.len() - 1));
    }
    LabeledRanges { ranges }
}

/// Whether any range of `other` touches `range`.
pub fn existence(range: &IndexRange, other: &LabeledRanges) -> bool {
    other.ranges.iter().any(|p| p.intersects(range))
}

/// Covered fraction of `range` by the ranges of `other`, position by position.
pub fn overlap(range: &IndexRange, other: &LabeledRanges, cfg: &RangeMetricConfig) -> f64 {
    let total: f64 = (range.start..=range.end)
        .map(|pos| cfg.bias.weight(pos, range))
        .sum();
    let mut covered = 0.0;
    let mut touching = 0usize;
    for p in &other.ranges {
        if !p.intersects(range) {
            continue;
        }
        touching += 1;
        for pos in range.start..=range.end {
            if p.contains(pos) {
                covered += cfg.bias.weight(pos, range);
            }
        }
    }
    let value = covered / total;
    if cfg.cardinality && touching > 0 {
        value / touching as f64
    } else {
        value
    }
}

/// Mean over real ranges of `α·E + (1-α)·O`.
pub fn range_recall(
    real: &LabeledRanges,
    predicted: &LabeledRanges,
    cfg: &RangeMetricConfig,
) -> Result<f64> {
    if real.is_empty() {
        return Err(Error::UndefinedMetric(
            "recall needs at least one real anomalous range".into(),
        ));
    }
    let alpha = cfg.existence_weight;
    let sum: f64 = real
        .ranges
        .iter()
        .map(|r| {
            let e = if existence(r, predicted) { 1.0 } else { 0.0 };
            alpha * e + (1.0 - alpha) * overlap(r, predicted, cfg)
        })
        .sum();
    Ok(sum / real.len() as f64)
}

/// Fraction of real ranges touched by a prediction.
pub fn existence_rate(real: &LabeledRanges, predicted: &LabeledRanges) -> Result<f64> {
    if real.is_empty() {
        return Err(Error::UndefinedMetric(
            "existence rate needs at least one real anomalous range".into(),
        ));
    }
    let hit = real
        .ranges
        .iter()
        .filter(|r| existence(r, predicted))
        .count();
    Ok(hit as f64 / real.len() as f64)
}

/// Mean over predicted ranges of their overlap with the real ranges; 0 when
/// nothing is predicted.
pub fn range_precision(
    real: &LabeledRanges,
    predicted: &LabeledRanges,
    cfg: &RangeMetricConfig,
) -> f64 {
    if predicted.is_empty() {
        return 0.0;
    }
    let sum: f64 = predicted.ranges.iter().map(|p| overlap(p, real, cfg)).sum();
    sum / predicted.len() as f64
}

pub fn range_f1(precision: f64, recall: f64) -> f64 {
    crate::roc::f1_score(precision, recall)
}

/// Real anomalous ranges: runs of timestamps with `0 <= s_i - t_j < w` for
/// some event, restricted to the event's region `(s_{i-1}, s_i]`.
pub fn events_to_ranges(events: &EventLog, series: &ScoredSeries, w: f64) -> LabeledRanges {
    let ts = series.timestamps();
    let mut labels = vec![false; ts.len()];
    for (i, &s) in events.events().iter().enumerate() {
        let lo = lower_bound(events, series, i);
        let mut j = ts.partition_point(|&t| t <= s);
        while j > 0 {
            let t = ts[j - 1];
            if t <= lo || !in_preceding_window(t, s, w) {
                break;
            }
            labels[j - 1] = true;
            j -= 1;
        }
    }
    labels_to_ranges(&labels)
}

/// Precision, recall and F1 of one labelling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub existence_rate: f64,
}

pub fn range_scores(
    real: &LabeledRanges,
    predicted: &LabeledRanges,
    cfg: &RangeMetricConfig,
) -> Result<RangeScores> {
    let recall = range_recall(real, predicted, cfg)?;
    let precision = range_precision(real, predicted, cfg);
    Ok(RangeScores {
        precision,
        recall,
        f1: range_f1(precision, recall),
        existence_rate: existence_rate(real, predicted)?,
    })
}
