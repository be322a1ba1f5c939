//! Evaluation of temporal unsupervised anomaly detectors with preceding windows.
//!
//! The pipeline turns a [`ScoredSeries`] and an [`EventLog`] into interval
//! instances ([`partition`]), summarises each interval's scores into one value
//! ([`aggregation`]) and sweeps a threshold over those values to obtain a
//! preceding-window ROC curve ([`roc`]). Repeating this for several window
//! lengths produces a ROC surface.
//!
//! Two baselines live alongside: range-based precision/recall
//! ([`range_based`]) and the classic window scorer from the Numenta benchmark
//! ([`nab`]).

#![forbid(unsafe_code)]

pub mod aggregation;
mod error;
pub mod nab;
pub mod range_based;
pub mod roc;
pub mod synth;
pub mod temporal;

pub use aggregation::{AggregatedSample, AggregationKind, AggregationSpec, FilterSpec};
pub use error::{Error, Result};
pub use roc::{RocCurve, RocPoint, RocSurface, SurfaceEntry, ThresholdMetrics};
pub use temporal::{
    compute_wmax, default_window, partition, EventLog, IntervalInstance, Label, Partition,
    PartitionCounts, ScoredSeries, WindowSweep,
};
