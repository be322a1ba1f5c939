//! Preceding-window ROC curves, AUC, threshold metrics and ROC surfaces.
//!
//! The false positive rate is taken over negative intervals and the true
//! positive rate over positive intervals, with an interval predicted positive
//! when its aggregated value is strictly greater than the threshold.

use serde::Serialize;

use crate::aggregation::{aggregate_partition, AggregatedSample, AggregationSpec};
use crate::error::{Error, Result};
use crate::temporal::{compute_wmax, partition, EventLog, PartitionCounts, ScoredSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    /// Operating point for `value > threshold`.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub window_length: f64,
    pub positives: usize,
    pub negatives: usize,
}

/// ROC curve over aggregated samples.
///
/// The first point sits at threshold `+inf`, followed by one point per
/// distinct sample value below the maximum, and `-inf` for `(1, 1)`. Equal
/// values move the operating point in a single step, so ties contribute half
/// a unit of area. The attached AUC is computed from integer counts.
pub fn roc_curve(samples: &[AggregatedSample], w: f64) -> Result<RocCurve> {
    if let Some(pos) = samples.iter().position(|s| !s.value.is_finite()) {
        return Err(Error::input(format!("sample {pos} has a non-finite value")));
    }
    let positives = samples.iter().filter(|s| s.label.is_positive()).count();
    let negatives = samples.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateClasses {
            positives,
            negatives,
        });
    }

    let mut sorted: Vec<&AggregatedSample> = samples.iter().collect();
    sorted.sort_by(|a, b| b.value.total_cmp(&a.value));

    let (p, n) = (positives as f64, negatives as f64);
    let mut points = Vec::with_capacity(sorted.len() + 2);
    points.push(RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    });

    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area in units of one positive-negative pair
    let mut doubled_area: u128 = 0;
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i].value;
        let (tp_before, fp_before) = (tp, fp);
        while i < sorted.len() && sorted[i].value == value {
            if sorted[i].label.is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += u128::from(fp - fp_before) * u128::from(tp_before + tp);
        let threshold = sorted.get(i).map_or(f64::NEG_INFINITY, |next| next.value);
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / n,
            tpr: tp as f64 / p,
        });
    }

    let auc = doubled_area as f64 / (2.0 * p * n);
    Ok(RocCurve {
        points,
        auc,
        window_length: w,
        positives,
        negatives,
    })
}

/// Trapezoidal area under the curve's points.
pub fn auc(curve: &RocCurve) -> f64 {
    trapezoid(curve.points.iter().map(|pt| (pt.fpr, pt.tpr)))
}

/// Trapezoidal area under `(fpr, tpr)` points given in curve order.
pub fn trapezoid(points: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut iter = points.into_iter();
    let Some(mut prev) = iter.next() else {
        return 0.0;
    };
    let mut area = 0.0;
    for cur in iter {
        area += (cur.0 - prev.0) * (cur.1 + prev.1) * 0.5;
        prev = cur;
    }
    area
}

/// Confusion counts and derived scores at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdMetrics {
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Predicts positive iff `value > c`. Undefined ratios are 0.
pub fn threshold_metrics(samples: &[AggregatedSample], c: f64) -> ThresholdMetrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for s in samples {
        match (s.value > c, s.label.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    ThresholdMetrics {
        threshold: c,
        tp,
        fp,
        tn,
        fn_,
        precision,
        recall,
        f1: f1_score(precision, recall),
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Quantile by linear interpolation between order statistics of `sorted`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `q_0.05 + α (q_0.95 - q_0.05)` of the scores.
pub fn label_threshold(scores: &[f64], alpha: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::input(
            "cannot map labels for an empty score sequence",
        ));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::parameter(format!("alpha {alpha} outside [0, 1]")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q05 = quantile(&sorted, 0.05);
    let q95 = quantile(&sorted, 0.95);
    Ok(q05 + alpha * (q95 - q05))
}

/// Binary labels `score >= label_threshold(scores, α)`.
pub fn label_map(scores: &[f64], alpha: f64) -> Result<Vec<bool>> {
    let thr = label_threshold(scores, alpha)?;
    Ok(scores.iter().map(|&s| s >= thr).collect())
}

/// One window of a surface. `curve` is `None` when the window's partition
/// has no positive or no negative interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceEntry {
    pub window: f64,
    pub counts: PartitionCounts,
    pub curve: Option<RocCurve>,
}

impl SurfaceEntry {
    pub fn is_gap(&self) -> bool {
        self.curve.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocSurface {
    pub w_max: f64,
    pub entries: Vec<SurfaceEntry>,
}

impl RocSurface {
    pub fn sweep(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.window)
    }

    pub fn curves(&self) -> impl Iterator<Item = &RocCurve> {
        self.entries.iter().filter_map(|e| e.curve.as_ref())
    }

    pub fn gaps(&self) -> impl Iterator<Item = &SurfaceEntry> {
        self.entries.iter().filter(|e| e.is_gap())
    }

    /// `(window, auc)` with `None` for gaps.
    pub fn auc_table(&self) -> Vec<(f64, Option<f64>)> {
        self.entries
            .iter()
            .map(|e| (e.window, e.curve.as_ref().map(|c| c.auc)))
            .collect()
    }
}

/// Evaluates one window: partition, aggregation and ROC curve.
pub fn evaluate_window(
    series: &ScoredSeries,
    events: &EventLog,
    w: f64,
    spec: &AggregationSpec,
) -> Result<SurfaceEntry> {
    let part = partition(series, events, w)?;
    let samples = aggregate_partition(&part, series, spec)?;
    let curve = match roc_curve(&samples, w) {
        Ok(curve) => Some(curve),
        Err(Error::DegenerateClasses { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(SurfaceEntry {
        window: w,
        counts: part.counts,
        curve,
    })
}

/// pw-ROC curves over a sweep of window lengths.
///
/// The sweep must be non-empty, strictly increasing and inside `(0, W_max]`.
/// Windows with a single class become gaps instead of errors.
pub fn roc_surface(
    series: &ScoredSeries,
    events: &EventLog,
    sweep: &[f64],
    spec: &AggregationSpec,
) -> Result<RocSurface> {
    if sweep.is_empty() {
        return Err(Error::parameter("window sweep is empty"));
    }
    if sweep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parameter("window sweep must be strictly increasing"));
    }
    let w_max = compute_wmax(events, series)?;
    if let Some(&w) = sweep.iter().find(|&&w| !(w > 0.0 && w <= w_max)) {
        return Err(Error::parameter(format!(
            "window length {w} outside (0, {w_max}]"
        )));
    }
    spec.validate()?;

    let run = |&w: &f64| evaluate_window(series, events, w, spec);
    #[cfg(feature = "parallel")]
    let entries = {
        use rayon::prelude::*;
        sweep.par_iter().map(run).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let entries = sweep.iter().map(run).collect::<Result<Vec<_>>>()?;

    Ok(RocSurface { w_max, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::AggregationKind;
    use crate::temporal::Label;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn samples(pos: &[f64], neg: &[f64]) -> Vec<AggregatedSample> {
        pos.iter()
            .map(|&v| AggregatedSample::new(v, Label::Positive))
            .chain(
                neg.iter()
                    .map(|&v| AggregatedSample::new(v, Label::Negative)),
            )
            .collect()
    }

    /// Pairwise comparison count: P(pos > neg) + P(tie) / 2.
    fn mann_whitney(pos: &[f64], neg: &[f64]) -> f64 {
        let mut wins = 0.0;
        for &p in pos {
            for &n in neg {
                if p > n {
                    wins += 1.0;
                } else if p == n {
                    wins += 0.5;
                }
            }
        }
        wins / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn auc_examples() {
        let c = roc_curve(&samples(&[0.9, 0.8], &[0.1, 0.2]), 1.0).unwrap();
        assert_eq!(c.auc, 1.0);
        let c = roc_curve(&samples(&[0.3, 0.7], &[0.3, 0.7]), 1.0).unwrap();
        assert_eq!(c.auc, 0.5);
        // pairs: 0.8>0.6, 0.8>0.1, 0.3<0.6, 0.3>0.1 -> 3/4
        assert_eq!(mann_whitney(&[0.8, 0.3], &[0.6, 0.1]), 0.75);
        let c = roc_curve(&samples(&[0.8, 0.3], &[0.6, 0.1]), 1.0).unwrap();
        assert_eq!(c.auc, 0.75);
        assert_eq!(auc(&c), 0.75);
    }

    #[test]
    fn curve_shape_and_thresholds() {
        let c = roc_curve(&samples(&[0.8, 0.3], &[0.6, 0.1]), 2.0).unwrap();
        let pts: Vec<(f64, f64, f64)> = c
            .points
            .iter()
            .map(|p| (p.threshold, p.fpr, p.tpr))
            .collect();
        assert_eq!(
            pts,
            vec![
                (f64::INFINITY, 0.0, 0.0),
                (0.6, 0.0, 0.5),
                (0.3, 0.5, 0.5),
                (0.1, 0.5, 1.0),
                (f64::NEG_INFINITY, 1.0, 1.0),
            ]
        );
        assert_eq!((c.positives, c.negatives, c.window_length), (2, 2, 2.0));
    }

    #[test]
    fn ties_collapse_into_one_step() {
        let c = roc_curve(&samples(&[0.5, 0.5], &[0.5]), 1.0).unwrap();
        assert_eq!(c.points.len(), 2);
        assert_eq!(c.auc, 0.5);
    }

    #[test]
    fn diagonal_and_perfect_curves() {
        let diag = RocCurve {
            points: vec![
                RocPoint {
                    threshold: 1.0,
                    fpr: 0.0,
                    tpr: 0.0,
                },
                RocPoint {
                    threshold: 0.0,
                    fpr: 1.0,
                    tpr: 1.0,
                },
            ],
            auc: 0.5,
            window_length: 1.0,
            positives: 1,
            negatives: 1,
        };
        assert_eq!(auc(&diag), 0.5);
        let c = roc_curve(&samples(&[2.0], &[1.0]), 1.0).unwrap();
        assert_eq!(auc(&c), 1.0);
    }

    #[test]
    fn single_class_is_degenerate() {
        let err = roc_curve(&samples(&[0.1, 0.2], &[]), 1.0).unwrap_err();
        assert_eq!(
            err,
            Error::DegenerateClasses {
                positives: 2,
                negatives: 0
            }
        );
        assert!(roc_curve(&samples(&[], &[0.3]), 1.0).is_err());
        assert!(roc_curve(&samples(&[f64::NAN], &[0.3]), 1.0).is_err());
    }

    #[test]
    fn random_scores_give_half_auc() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pos: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let neg: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let c = roc_curve(&samples(&pos, &neg), 1.0).unwrap();
        assert!((c.auc - 0.5).abs() <= 0.02, "auc {}", c.auc);
        assert_abs_diff_eq!(auc(&c), c.auc, epsilon = 1e-12);
    }

    #[test]
    fn threshold_metrics_examples() {
        let s = samples(&[0.8, 0.3], &[0.6, 0.1]);
        let m = threshold_metrics(&s, 0.5);
        assert_eq!((m.tp, m.fn_, m.fp, m.tn), (1, 1, 1, 1));
        assert_eq!(m.f1, 0.5);

        let m = threshold_metrics(&s, 0.0);
        assert_eq!(m.recall, 1.0);

        let m = threshold_metrics(&s, 1.0);
        assert_eq!((m.tp, m.fp), (0, 0));
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn label_map_quantiles() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let labels = label_map(&grid, 0.5).unwrap();
        assert_eq!(labels.iter().filter(|&&l| l).count(), 51);
        assert_abs_diff_eq!(label_threshold(&grid, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(label_threshold(&grid, 0.0).unwrap(), 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(label_threshold(&grid, 1.0).unwrap(), 0.95, epsilon = 1e-15);
        assert_eq!(
            label_map(&grid, 0.0)
                .unwrap()
                .iter()
                .filter(|&&l| l)
                .count(),
            96
        );
        assert!(label_map(&grid, 1.5).is_err());
        assert!(label_map(&[], 0.5).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile(&[7.0], 0.95), 7.0);
    }

    #[test]
    fn surface_rejects_bad_sweeps() {
        let s = ScoredSeries::new((0..20).map(f64::from).collect(), vec![0.0; 20]).unwrap();
        let e = EventLog::new(vec![9.0, 19.0]).unwrap();
        let spec = AggregationSpec::default();
        assert!(roc_surface(&s, &e, &[], &spec).is_err());
        assert!(roc_surface(&s, &e, &[2.0, 1.0], &spec).is_err());
        assert!(roc_surface(&s, &e, &[1.0, 11.0], &spec).is_err());
    }

    #[test]
    fn constant_scores_give_half_or_gap() {
        let s = ScoredSeries::new((0..40).map(f64::from).collect(), vec![0.3; 40]).unwrap();
        let e = EventLog::new(vec![19.0, 39.0]).unwrap();
        let sweep = [1.0, 2.5, 5.0, 19.0, 20.0];
        let surf = roc_surface(&s, &e, &sweep, &AggregationSpec::default()).unwrap();
        assert_eq!(surf.entries.len(), 5);
        for e in &surf.entries {
            if let Some(c) = &e.curve {
                assert_eq!(c.auc, 0.5);
            }
        }
        // w = 20 turns both event regions into single positive intervals
        assert!(surf.entries[4].is_gap());
        assert_eq!(surf.gaps().count(), 1);
    }

    #[test]
    fn perfect_detector_reaches_one_at_its_lead() {
        let ts: Vec<f64> = (0..100).map(f64::from).collect();
        let events = EventLog::new(vec![30.0, 60.0, 90.0]).unwrap();
        let lead = 4.0;
        let scores = ts
            .iter()
            .map(|&t| {
                let near = events
                    .events()
                    .iter()
                    .any(|&s| crate::temporal::in_preceding_window(t, s, lead));
                if near {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let series = ScoredSeries::new(ts, scores).unwrap();
        let surf = roc_surface(
            &series,
            &events,
            &[2.0, 4.0, 8.0],
            &AggregationSpec::new(AggregationKind::Median),
        )
        .unwrap();
        assert_eq!(surf.entries[1].curve.as_ref().unwrap().auc, 1.0);
    }

    proptest! {
        #[test]
        fn auc_equals_pairwise_oracle(
            pos in prop::collection::vec(0u8..20, 1..60),
            neg in prop::collection::vec(0u8..20, 1..60),
        ) {
            // small integer alphabet forces plenty of ties
            let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
            let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
            let c = roc_curve(&samples(&pos, &neg), 1.0).unwrap();
            let oracle = mann_whitney(&pos, &neg);
            prop_assert!((c.auc - oracle).abs() <= 1e-12);
            prop_assert!((auc(&c) - oracle).abs() <= 1e-12);
            prop_assert_eq!((c.points[0].fpr, c.points[0].tpr), (0.0, 0.0));
            let last = c.points.last().unwrap();
            prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
            for pair in c.points.windows(2) {
                prop_assert!(pair[0].fpr <= pair[1].fpr && pair[0].tpr <= pair[1].tpr);
                prop_assert!(pair[0].threshold > pair[1].threshold);
            }
        }

        #[test]
        fn monotone_transform_keeps_points(
            pos in prop::collection::vec(0.01f64..3.0, 1..40),
            neg in prop::collection::vec(0.01f64..3.0, 1..40),
        ) {
            let a = roc_curve(&samples(&pos, &neg), 1.0).unwrap();
            let cube = |v: &Vec<f64>| v.iter().map(|x| x * x * x).collect::<Vec<_>>();
            let b = roc_curve(&samples(&cube(&pos), &cube(&neg)), 1.0).unwrap();
            let pts = |c: &RocCurve| c.points.iter().map(|p| (p.fpr, p.tpr)).collect::<Vec<_>>();
            prop_assert_eq!(pts(&a), pts(&b));
            prop_assert_eq!(a.auc, b.auc);
        }

        #[test]
        fn threshold_metrics_counts_add_up(
            pos in prop::collection::vec(0.0f64..1.0, 0..30),
            neg in prop::collection::vec(0.0f64..1.0, 0..30),
            c in -0.1f64..1.1,
        ) {
            prop_assume!(!pos.is_empty() || !neg.is_empty());
            let m = threshold_metrics(&samples(&pos, &neg), c);
            prop_assert_eq!(m.tp + m.fn_, pos.len());
            prop_assert_eq!(m.fp + m.tn, neg.len());
            prop_assert!((0.0..=1.0).contains(&m.f1));
        }
    }
}
