//! Per-interval summaries of anomaly scores, with optional alarm filters.
//!
//! A filter `g` rewrites the whole score stream once; an aggregator `f` then
//! reduces every interval of a [`Partition`] to one value, giving `f ∘ g`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::temporal::{Label, Partition, ScoredSeries};

/// Alarm threshold used by filters when none is given. Filters target
/// detectors that emit 0/1 labels.
pub const DEFAULT_ALARM_THRESHOLD: f64 = 0.5;

/// Distance scale of the logistic earliness weight.
const NAB_WEIGHT_SCALE: f64 = 15.0;

/// Partitions covering fewer timestamps are aggregated on the calling thread.
#[cfg(feature = "parallel")]
const PARALLEL_MIN_COVERED: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AggregationKind {
    Mean,
    Median,
    /// Fraction of scores strictly above `threshold`.
    Ccdf {
        threshold: f64,
    },
    /// Earliness-weighted sum. `window: None` uses the partition's window.
    Nab {
        window: Option<f64>,
        normalized: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FilterSpec {
    None,
    NonTrigger {
        window: f64,
        threshold: f64,
    },
    Counter {
        count: usize,
        period: f64,
        threshold: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregationSpec {
    pub kind: AggregationKind,
    pub filter: FilterSpec,
}

impl AggregationSpec {
    pub fn new(kind: AggregationKind) -> Self {
        Self {
            kind,
            filter: FilterSpec::None,
        }
    }

    pub fn with_filter(mut self, filter: FilterSpec) -> Self {
        self.filter = filter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            AggregationKind::Ccdf { threshold } if threshold.is_nan() => {
                return Err(Error::parameter("ccdf threshold must not be NaN"))
            }
            AggregationKind::Nab {
                window: Some(w), ..
            } if !(w.is_finite() && w > 0.0) => {
                return Err(Error::parameter(format!("nab window {w} must be positive")))
            }
            _ => {}
        }
        match self.filter {
            FilterSpec::NonTrigger { window, threshold } => {
                if !(window.is_finite() && window >= 0.0) || !threshold.is_finite() {
                    return Err(Error::parameter("non-trigger filter needs window >= 0"));
                }
            }
            FilterSpec::Counter {
                count,
                period,
                threshold,
            } => {
                if count == 0 || !(period.is_finite() && period > 0.0) || !threshold.is_finite() {
                    return Err(Error::parameter(
                        "counter filter needs K >= 1 and a positive period",
                    ));
                }
            }
            FilterSpec::None => {}
        }
        Ok(())
    }
}

impl Default for AggregationSpec {
    fn default() -> Self {
        Self::new(AggregationKind::Mean)
    }
}

impl FromStr for AggregationKind {
    type Err = Error;

    /// `mean | median | ccdf:<τ> | nab[:norm]`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parameter(format!("unrecognised aggregation '{s}'"));
        let mut parts = s.split(':');
        let head = parts.next().ok_or_else(bad)?;
        let rest: Vec<&str> = parts.collect();
        match (head, rest.as_slice()) {
            ("mean", []) => Ok(AggregationKind::Mean),
            ("median", []) => Ok(AggregationKind::Median),
            ("ccdf", [tau]) => {
                let threshold = parse_f64(tau)?;
                if threshold.is_nan() {
                    return Err(bad());
                }
                Ok(AggregationKind::Ccdf { threshold })
            }
            ("nab", []) => Ok(AggregationKind::Nab {
                window: None,
                normalized: false,
            }),
            ("nab", ["norm"]) => Ok(AggregationKind::Nab {
                window: None,
                normalized: true,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for AggregationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregationKind::Mean => write!(f, "mean"),
            AggregationKind::Median => write!(f, "median"),
            AggregationKind::Ccdf { threshold } => write!(f, "ccdf:{threshold}"),
            AggregationKind::Nab { normalized, .. } => {
                write!(f, "nab{}", if *normalized { ":norm" } else { "" })
            }
        }
    }
}

impl FromStr for FilterSpec {
    type Err = Error;

    /// `none | nontrigger:<w2>[:<thr>] | counter:<K>:<period>[:<thr>]`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parameter(format!("unrecognised filter '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts.as_slice() {
            ["none"] => FilterSpec::None,
            ["nontrigger", w2, thr @ ..] if thr.len() <= 1 => FilterSpec::NonTrigger {
                window: parse_f64(w2)?,
                threshold: thr
                    .first()
                    .map_or(Ok(DEFAULT_ALARM_THRESHOLD), |t| parse_f64(t))?,
            },
            ["counter", k, period, thr @ ..] if thr.len() <= 1 => FilterSpec::Counter {
                count: k.parse().map_err(|_| bad())?,
                period: parse_f64(period)?,
                threshold: thr
                    .first()
                    .map_or(Ok(DEFAULT_ALARM_THRESHOLD), |t| parse_f64(t))?,
            },
            _ => return Err(bad()),
        };
        AggregationSpec::new(AggregationKind::Mean)
            .with_filter(spec)
            .validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::None => write!(f, "none"),
            FilterSpec::NonTrigger { window, threshold } => {
                write!(f, "nontrigger:{window}:{threshold}")
            }
            FilterSpec::Counter {
                count,
                period,
                threshold,
            } => write!(f, "counter:{count}:{period}:{threshold}"),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parameter(format!("'{s}' is not a number")))
}

/// One interval reduced to a single value, ready for ROC computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregatedSample {
    pub value: f64,
    pub label: Label,
    pub event_index: usize,
    pub k: usize,
}

impl AggregatedSample {
    pub fn new(value: f64, label: Label) -> Self {
        Self {
            value,
            label,
            event_index: 0,
            k: 0,
        }
    }
}

/// Arithmetic mean, accumulated as deviations from the first score so that a
/// constant interval reproduces its value exactly.
pub fn aggregate_mean(scores: &[f64]) -> Result<f64> {
    let Some(&anchor) = scores.first() else {
        return Err(Error::EmptyInterval);
    };
    let deviation: f64 = scores.iter().map(|&s| s - anchor).sum();
    Ok(anchor + deviation / scores.len() as f64)
}

/// Lower median: element `(n-1)/2` of the sorted scores.
pub fn aggregate_median(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInterval);
    }
    let mut sorted = scores.to_vec();
    let mid = (sorted.len() - 1) / 2;
    let (_, median, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    Ok(*median)
}

/// Fraction of scores strictly greater than `threshold`.
pub fn aggregate_ccdf(scores: &[f64], threshold: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInterval);
    }
    let above = scores.iter().filter(|&&s| s > threshold).count();
    Ok(above as f64 / scores.len() as f64)
}

/// Earliness weight `σ_w(t) = 2 / (1 + e^{15 t / w}) - 1`.
///
/// `t` is the signed offset `t_j - s_next`, so it is non-positive before the
/// event. The weight is 0 at the event and close to 1 a full window earlier.
/// Evaluated as `-tanh(7.5 t / w)`, which is the same function.
pub fn nab_weight(t: f64, w: f64) -> f64 {
    -(0.5 * NAB_WEIGHT_SCALE * t / w).tanh()
}

/// Earliness-weighted aggregation of `(timestamp, score)` members preceding
/// `next_event`.
pub fn aggregate_nab(
    members: &[(f64, f64)],
    next_event: f64,
    w: f64,
    normalized: bool,
) -> Result<f64> {
    aggregate_weighted(members, |t| nab_weight(t - next_event, w), normalized)
}

/// `Σ weight(t_j) · score_j`, optionally divided by `Σ weight(t_j)` with
/// `0/0 = 0`.
pub(crate) fn aggregate_weighted(
    members: &[(f64, f64)],
    weight: impl Fn(f64) -> f64,
    normalized: bool,
) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyInterval);
    }
    let mut weighted = 0.0;
    let mut total = 0.0;
    for &(t, score) in members {
        let wt = weight(t);
        weighted += wt * score;
        total += wt;
    }
    if !normalized {
        return Ok(weighted);
    }
    Ok(if total == 0.0 { 0.0 } else { weighted / total })
}

/// Non-trigger window filter.
///
/// Scanning left to right, each score `>= threshold` that survives is kept and
/// every later score with `t - t_kept <= w2` is replaced by 0.
pub fn filter_non_trigger(alarms: &[(f64, f64)], w2: f64, threshold: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(alarms.len());
    let mut quiet_until = f64::NEG_INFINITY;
    for &(t, score) in alarms {
        if t <= quiet_until {
            out.push((t, 0.0));
            continue;
        }
        if score >= threshold {
            quiet_until = t + w2;
        }
        out.push((t, score));
    }
    out
}

/// Counter filter.
///
/// A timestamp emits 1 when its score is `>= threshold` and at least `count`
/// threshold crossings (itself included) fall in the trailing period
/// `(t - period, t]`; everything else becomes 0.
pub fn filter_counter(
    alarms: &[(f64, f64)],
    count: usize,
    period: f64,
    threshold: f64,
) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(alarms.len());
    let mut crossings: std::collections::VecDeque<f64> = Default::default();
    for &(t, score) in alarms {
        while crossings.front().is_some_and(|&c| c <= t - period) {
            crossings.pop_front();
        }
        let crossed = score >= threshold;
        if crossed {
            crossings.push_back(t);
        }
        let fire = crossed && crossings.len() >= count;
        out.push((t, if fire { 1.0 } else { 0.0 }));
    }
    out
}

/// Applies a filter to the full score stream. Returns `None` for
/// [`FilterSpec::None`].
pub fn apply_filter(series: &ScoredSeries, filter: &FilterSpec) -> Option<Vec<f64>> {
    let pairs: Vec<(f64, f64)> = match filter {
        FilterSpec::None => return None,
        _ => series.iter().collect(),
    };
    let filtered = match *filter {
        FilterSpec::None => unreachable!(),
        FilterSpec::NonTrigger { window, threshold } => {
            filter_non_trigger(&pairs, window, threshold)
        }
        FilterSpec::Counter {
            count,
            period,
            threshold,
        } => filter_counter(&pairs, count, period, threshold),
    };
    Some(filtered.into_iter().map(|(_, s)| s).collect())
}

/// Reduces every interval of `partition` to one [`AggregatedSample`].
///
/// The filter runs once over the whole series before windowing, so alarm
/// suppression crosses interval boundaries.
pub fn aggregate_partition(
    partition: &Partition,
    series: &ScoredSeries,
    spec: &AggregationSpec,
) -> Result<Vec<AggregatedSample>> {
    spec.validate()?;
    let filtered = apply_filter(series, &spec.filter);
    let scores = filtered.as_deref().unwrap_or(series.scores());
    let times = series.timestamps();

    let reduce = |iv: &crate::temporal::IntervalInstance| -> Result<AggregatedSample> {
        let members = iv.members.clone();
        if members.end > scores.len() {
            return Err(Error::input("partition does not belong to this series"));
        }
        let value = match spec.kind {
            AggregationKind::Mean => aggregate_mean(&scores[members])?,
            AggregationKind::Median => aggregate_median(&scores[members])?,
            AggregationKind::Ccdf { threshold } => aggregate_ccdf(&scores[members], threshold)?,
            AggregationKind::Nab { window, normalized } => {
                let w = window.unwrap_or(partition.window_length);
                let pairs: Vec<(f64, f64)> = members.map(|j| (times[j], scores[j])).collect();
                aggregate_nab(&pairs, iv.event_time, w, normalized)?
            }
        };
        Ok(AggregatedSample {
            value,
            label: iv.label,
            event_index: iv.event_index,
            k: iv.k,
        })
    };

    #[cfg(feature = "parallel")]
    if partition.counts.covered >= PARALLEL_MIN_COVERED {
        use rayon::prelude::*;
        return partition.intervals.par_iter().map(reduce).collect();
    }
    partition.intervals.iter().map(reduce).collect()
}
