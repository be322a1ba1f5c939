//! Timestamped inputs and their transformation into preceding-window intervals.
//!
//! For an event at `s_i` and a window length `w`, the timestamps preceding the
//! event are cut into consecutive intervals `(s_i - (k+1)w, s_i - kw]`,
//! `k = 0, 1, 2, ...`, truncated at the previous event `s_{i-1}`. The `k = 0`
//! interval is the positive instance for that event; every other interval is a
//! negative instance. For the first event the lower bound is
//! `s_0 = min(s_1, t_1)`, so a series that starts before the first event loses
//! its very first timestamp. Timestamps after the last event belong to no
//! interval and are only counted.
//!
//! Membership is decided on the offset `d = s_i - t_j`: a timestamp belongs to
//! interval `k` iff `k*w <= d < (k+1)*w`. This is the literal set definition
//! rearranged, and it makes the positive interval coincide bit-for-bit with
//! [`in_preceding_window`].

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Detector output: strictly increasing timestamps (seconds) with one finite
/// anomaly score each.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSeries {
    timestamps: Vec<f64>,
    scores: Vec<f64>,
}

impl ScoredSeries {
    pub fn new(timestamps: Vec<f64>, scores: Vec<f64>) -> Result<Self> {
        if timestamps.is_empty() {
            return Err(Error::input("scored series is empty"));
        }
        if timestamps.len() != scores.len() {
            return Err(Error::input(format!(
                "{} timestamps but {} scores",
                timestamps.len(),
                scores.len()
            )));
        }
        check_strictly_increasing(&timestamps, "series timestamps")?;
        if let Some(pos) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::input(format!("score at index {pos} is not finite")));
        }
        Ok(Self { timestamps, scores })
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn first_timestamp(&self) -> f64 {
        self.timestamps[0]
    }

    pub fn last_timestamp(&self) -> f64 {
        self.timestamps[self.timestamps.len() - 1]
    }

    /// `t_N - t_1`.
    pub fn span(&self) -> f64 {
        self.last_timestamp() - self.first_timestamp()
    }

    /// Same timestamps, new scores.
    pub fn with_scores(&self, scores: Vec<f64>) -> Result<Self> {
        Self::new(self.timestamps.clone(), scores)
    }

    pub fn map_scores(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_scores(self.scores.iter().map(|&s| f(s)).collect())
    }

    /// `(timestamp, score)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.timestamps
            .iter()
            .copied()
            .zip(self.scores.iter().copied())
    }
}

/// Strictly increasing timestamps of the annotated events.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    events: Vec<f64>,
}

impl EventLog {
    pub fn new(events: Vec<f64>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::input("event log is empty"));
        }
        check_strictly_increasing(&events, "event timestamps")?;
        Ok(Self { events })
    }

    pub fn events(&self) -> &[f64] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.events[self.events.len() - 1]
    }
}

fn check_strictly_increasing(values: &[f64], what: &str) -> Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::input(format!(
            "{what}: value at index {pos} is not finite"
        )));
    }
    if let Some(pos) = values.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::input(format!(
            "{what} are not strictly increasing at index {}",
            pos + 1
        )));
    }
    Ok(())
}

/// Largest admissible window length.
///
/// With two or more events this is the smallest gap between consecutive
/// events. With a single event it is `s_1 - t_1`, the longest window that
/// still lies entirely inside the series.
pub fn compute_wmax(events: &EventLog, series: &ScoredSeries) -> Result<f64> {
    let ev = events.events();
    if ev.len() >= 2 {
        let gap = ev
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        return Ok(gap);
    }
    let span = ev[0] - series.first_timestamp();
    if span <= 0.0 {
        return Err(Error::NoAdmissibleWindow(format!(
            "the only event ({}) does not come after the first timestamp ({})",
            ev[0],
            series.first_timestamp()
        )));
    }
    Ok(span)
}

/// Rule-of-thumb window: a tenth of the observed period split across the
/// events, capped at `W_max`.
pub fn default_window(events: &EventLog, series: &ScoredSeries) -> Result<f64> {
    let span = series.span();
    if span <= 0.0 {
        return Err(Error::input("series must span a positive duration"));
    }
    let wmax = compute_wmax(events, series)?;
    let w = 0.1 * span / events.len() as f64;
    Ok(w.min(wmax))
}

/// Lower (exclusive) time bound of the region governed by event `i`.
pub fn lower_bound(events: &EventLog, series: &ScoredSeries, i: usize) -> f64 {
    let ev = events.events();
    if i == 0 {
        ev[0].min(series.first_timestamp())
    } else {
        ev[i - 1]
    }
}

/// Positive-window membership: `0 <= event - t < w`.
#[inline]
pub fn in_preceding_window(t: f64, event: f64, w: f64) -> bool {
    let d = event - t;
    d >= 0.0 && d < w
}

/// Index `k` with `k*w <= offset < (k+1)*w` for a non-negative offset.
fn window_offset_index(offset: f64, w: f64) -> usize {
    debug_assert!(offset >= 0.0);
    let mut k = (offset / w).floor() as usize;
    while k > 0 && k as f64 * w > offset {
        k -= 1;
    }
    while (k + 1) as f64 * w <= offset {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// One interval instance of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalInstance {
    /// Exclusive start; `s_i - (k+1)w`, or the governing lower bound for a
    /// truncated remainder interval.
    pub start: f64,
    /// Inclusive end, `s_i - kw`.
    pub end: f64,
    /// Contiguous indices into the series.
    pub members: Range<usize>,
    pub event_index: usize,
    /// `s_i`, the event this interval precedes.
    pub event_time: f64,
    pub k: usize,
    pub label: Label,
}

impl IntervalInstance {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PartitionCounts {
    pub positive_intervals: usize,
    pub negative_intervals: usize,
    /// Timestamps that belong to some interval.
    pub covered: usize,
    /// Timestamps at or before `s_0`.
    pub excluded_before_first: usize,
    /// Timestamps after the last event.
    pub excluded_after_last: usize,
}

impl PartitionCounts {
    pub fn excluded(&self) -> usize {
        self.excluded_before_first + self.excluded_after_last
    }
}

/// The interval instances `I_w` for one window length, ordered by time.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub intervals: Vec<IntervalInstance>,
    pub window_length: f64,
    pub counts: PartitionCounts,
}

impl Partition {
    pub fn positives(&self) -> impl Iterator<Item = &IntervalInstance> {
        self.intervals.iter().filter(|iv| iv.label.is_positive())
    }

    pub fn negatives(&self) -> impl Iterator<Item = &IntervalInstance> {
        self.intervals.iter().filter(|iv| !iv.label.is_positive())
    }

    /// Number of timestamps inside negative intervals.
    pub fn negative_timestamps(&self) -> usize {
        self.negatives().map(IntervalInstance::len).sum()
    }

    pub fn positive_timestamps(&self) -> usize {
        self.positives().map(IntervalInstance::len).sum()
    }
}

/// Splits the series into preceding-window interval instances.
///
/// Empty intervals are dropped; intervals cut short by the previous event are
/// kept with their own `k`. Runs in `O(n + M log n)`.
pub fn partition(series: &ScoredSeries, events: &EventLog, w: f64) -> Result<Partition> {
    let wmax = compute_wmax(events, series)?;
    if !(w.is_finite() && w > 0.0 && w <= wmax) {
        return Err(Error::parameter(format!(
            "window length {w} outside (0, {wmax}]"
        )));
    }

    let ts = series.timestamps();
    let ev = events.events();
    let mut intervals = Vec::new();
    let mut counts = PartitionCounts::default();

    let s0 = lower_bound(events, series, 0);
    let mut j = ts.partition_point(|&t| t <= s0);
    counts.excluded_before_first = j;

    for (i, &s) in ev.iter().enumerate() {
        let lo = lower_bound(events, series, i);
        let region_end = j + ts[j..].partition_point(|&t| t <= s);

        let mut a = j;
        while a < region_end {
            let k = window_offset_index(s - ts[a], w);
            let kw = k as f64 * w;
            let b = a + ts[a..region_end].partition_point(|&t| s - t >= kw);
            let label = if k == 0 {
                Label::Positive
            } else {
                Label::Negative
            };
            match label {
                Label::Positive => counts.positive_intervals += 1,
                Label::Negative => counts.negative_intervals += 1,
            }
            counts.covered += b - a;
            intervals.push(IntervalInstance {
                start: (s - (k + 1) as f64 * w).max(lo),
                end: s - kw,
                members: a..b,
                event_index: i,
                event_time: s,
                k,
                label,
            });
            a = b;
        }
        j = region_end;
    }
    counts.excluded_after_last = ts.len() - j;

    Ok(Partition {
        intervals,
        window_length: w,
        counts,
    })
}

/// Window lengths `min, min + step, ...` up to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSweep {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl WindowSweep {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let finite = min.is_finite() && max.is_finite() && step.is_finite();
        if !finite || min <= 0.0 || step <= 0.0 || max < min {
            return Err(Error::parameter(format!(
                "malformed sweep: min={min}, max={max}, step={step}"
            )));
        }
        Ok(Self { min, max, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let slack = 1e-9 * self.step;
        let mut out = Vec::new();
        for i in 0.. {
            let v = self.min + i as f64 * self.step;
            if v > self.max + slack {
                break;
            }
            out.push(v.min(self.max));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(ts: &[f64]) -> ScoredSeries {
        ScoredSeries::new(ts.to_vec(), vec![0.0; ts.len()]).unwrap()
    }

    fn one_to(n: usize) -> ScoredSeries {
        series(&(1..=n).map(|v| v as f64).collect::<Vec<_>>())
    }

    fn member_times(p: &Partition, s: &ScoredSeries) -> Vec<(Label, Vec<f64>)> {
        p.intervals
            .iter()
            .map(|iv| (iv.label, s.timestamps()[iv.members.clone()].to_vec()))
            .collect()
    }

    #[test]
    fn wmax_is_min_gap() {
        let s = one_to(10);
        let e = EventLog::new(vec![100.0, 160.0, 300.0]).unwrap();
        assert_eq!(compute_wmax(&e, &s).unwrap(), 60.0);
        let e = EventLog::new(vec![5.0, 10.0, 15.0, 40.0]).unwrap();
        assert_eq!(compute_wmax(&e, &s).unwrap(), 5.0);
    }

    #[test]
    fn wmax_single_event_fallback() {
        let s = series(&[10.0, 20.0, 50.0]);
        let e = EventLog::new(vec![100.0]).unwrap();
        assert_eq!(compute_wmax(&e, &s).unwrap(), 90.0);

        let e = EventLog::new(vec![10.0]).unwrap();
        assert!(matches!(
            compute_wmax(&e, &s),
            Err(Error::NoAdmissibleWindow(_))
        ));
    }

    #[test]
    fn default_window_rule_of_thumb() {
        // 1000 s span, two events 400 apart
        let s = series(&[0.0, 1000.0]);
        let e = EventLog::new(vec![500.0, 900.0]).unwrap();
        assert_eq!(default_window(&e, &s).unwrap(), 50.0);

        // single event, W_max = 30 caps 100
        let s = series(&[0.0, 1000.0]);
        let e = EventLog::new(vec![30.0]).unwrap();
        assert_eq!(default_window(&e, &s).unwrap(), 30.0);

        let s = series(&[0.0, 480.0]);
        let e = EventLog::new(vec![100.0, 200.0, 300.0, 400.0]).unwrap();
        assert_eq!(default_window(&e, &s).unwrap(), 12.0);
    }

    #[test]
    fn golden_ten_point_partition() {
        // Hand enumeration, w = 2, events {5, 10}, s_0 = min(5, 1) = 1:
        //   event 5, lower bound 1:  k=0 (3,5] -> {4,5}; k=1 (1,3] -> {2,3};
        //                             t=1 is not > s_0 and is excluded.
        //   event 10, lower bound 5: k=0 (8,10] -> {9,10}; k=1 (6,8] -> {7,8};
        //                             k=2 (4,6] cut at 5 -> (5,6] -> {6}.
        let s = one_to(10);
        let e = EventLog::new(vec![5.0, 10.0]).unwrap();
        let p = partition(&s, &e, 2.0).unwrap();
        use Label::*;
        assert_eq!(
            member_times(&p, &s),
            vec![
                (Negative, vec![2.0, 3.0]),
                (Positive, vec![4.0, 5.0]),
                (Negative, vec![6.0]),
                (Negative, vec![7.0, 8.0]),
                (Positive, vec![9.0, 10.0]),
            ]
        );
        let ks: Vec<_> = p
            .intervals
            .iter()
            .map(|iv| (iv.event_index, iv.k))
            .collect();
        assert_eq!(ks, vec![(0, 1), (0, 0), (1, 2), (1, 1), (1, 0)]);
        assert_eq!(p.intervals[2].start, 5.0);
        assert_eq!(p.intervals[2].end, 6.0);
        assert_eq!(
            p.counts,
            PartitionCounts {
                positive_intervals: 2,
                negative_intervals: 3,
                covered: 9,
                excluded_before_first: 1,
                excluded_after_last: 0,
            }
        );
    }

    #[test]
    fn single_event_window_bounded_by_wmax() {
        let s = series(&[1.0, 2.0, 3.0]);
        let e = EventLog::new(vec![3.0]).unwrap();
        // W_max = 3 - 1 = 2
        assert!(matches!(partition(&s, &e, 3.0), Err(Error::Parameter(_))));
        let p = partition(&s, &e, 2.0).unwrap();
        assert_eq!(
            member_times(&p, &s),
            vec![(Label::Positive, vec![2.0, 3.0])]
        );
        assert_eq!(p.counts.excluded_before_first, 1);
    }

    #[test]
    fn timestamps_after_last_event_are_excluded() {
        let s = one_to(10);
        let e = EventLog::new(vec![5.0]).unwrap();
        let p = partition(&s, &e, 2.0).unwrap();
        assert_eq!(p.counts.excluded_after_last, 5);
        assert!(p.intervals.iter().all(|iv| iv.members.end <= 5));
    }

    #[test]
    fn event_timestamp_is_positive() {
        let s = series(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let e = EventLog::new(vec![2.0, 4.0]).unwrap();
        let p = partition(&s, &e, 1.0).unwrap();
        let pos: Vec<_> = p
            .positives()
            .flat_map(|iv| s.timestamps()[iv.members.clone()].to_vec())
            .collect();
        assert_eq!(pos, vec![2.0, 4.0]);
    }

    #[test]
    fn sparse_sampling_drops_empty_intervals() {
        let s = series(&[0.0, 0.5, 9.7, 10.0]);
        let e = EventLog::new(vec![10.0]).unwrap();
        let p = partition(&s, &e, 1.0).unwrap();
        assert_eq!(p.intervals.len(), 2);
        assert_eq!(p.intervals[0].k, 9);
        assert_eq!(p.intervals[1].k, 0);
    }

    #[test]
    fn rejects_bad_window() {
        let s = one_to(10);
        let e = EventLog::new(vec![5.0, 10.0]).unwrap();
        for w in [0.0, -1.0, 5.5, f64::NAN] {
            assert!(matches!(partition(&s, &e, w), Err(Error::Parameter(_))));
        }
        assert!(partition(&s, &e, 5.0).is_ok());
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(ScoredSeries::new(vec![], vec![]).is_err());
        assert!(ScoredSeries::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(ScoredSeries::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(ScoredSeries::new(vec![1.0, 2.0], vec![0.0, f64::NAN]).is_err());
        assert!(EventLog::new(vec![]).is_err());
        assert!(EventLog::new(vec![3.0, 2.0]).is_err());
    }

    #[test]
    fn offset_index_respects_half_open_bounds() {
        assert_eq!(window_offset_index(0.0, 2.0), 0);
        assert_eq!(window_offset_index(1.999, 2.0), 0);
        assert_eq!(window_offset_index(2.0, 2.0), 1);
        // 0.3 / 0.1 rounds to 2.9999999999999996
        let k = window_offset_index(0.3, 0.1);
        assert!(k as f64 * 0.1 <= 0.3 && 0.3 < (k + 1) as f64 * 0.1);
    }

    #[test]
    fn sweep_values_include_max() {
        let sw = WindowSweep::new(0.1, 0.5, 0.1).unwrap();
        let v = sw.values();
        assert_eq!(v.len(), 5);
        assert_eq!(*v.last().unwrap(), 0.5);
        assert!(WindowSweep::new(1.0, 0.5, 0.1).is_err());
        assert!(WindowSweep::new(1.0, 2.0, 0.0).is_err());
    }
}
