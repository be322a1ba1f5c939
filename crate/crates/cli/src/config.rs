//! Run configuration shared by the subcommands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use pwroc_core::aggregation::DEFAULT_ALARM_THRESHOLD;
use pwroc_core::{
    compute_wmax, default_window, AggregationSpec, EventLog, ScoredSeries, WindowSweep,
};
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DEFAULT_ALPHAS: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowSpec {
    Single {
        window: f64,
    },
    Sweep(WindowSweep),
    /// Rule of thumb: a tenth of the period per event, capped at `W_max`.
    Auto,
}

impl WindowSpec {
    /// Concrete window lengths for the given data.
    pub fn resolve(&self, series: &ScoredSeries, events: &EventLog) -> Result<Vec<f64>> {
        let w_max = compute_wmax(events, series)?;
        let windows = match *self {
            WindowSpec::Single { window } => vec![window],
            WindowSpec::Sweep(sweep) => sweep.values(),
            WindowSpec::Auto => vec![default_window(events, series)?],
        };
        if let Some(&w) = windows.iter().find(|&&w| !(w > 0.0 && w <= w_max)) {
            return Err(CliError::Core(pwroc_core::Error::Parameter(format!(
                "window length {w} outside (0, {w_max}]"
            ))));
        }
        Ok(windows)
    }
}

impl FromStr for WindowSpec {
    type Err = CliError;

    /// `auto` or a single positive length.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(WindowSpec::Auto);
        }
        match s.parse::<f64>() {
            Ok(window) if window.is_finite() && window > 0.0 => Ok(WindowSpec::Single { window }),
            _ => Err(CliError::Usage(format!(
                "bad window '{s}', expected a positive number or 'auto'"
            ))),
        }
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Single { window } => write!(f, "{window}"),
            WindowSpec::Sweep(s) => write!(f, "{}..={} step {}", s.min, s.max, s.step),
            WindowSpec::Auto => f.write_str("auto"),
        }
    }
}

/// Comma-separated α values in `[0, 1]`.
pub fn parse_alphas(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.parse::<f64>() {
            Ok(a) if (0.0..=1.0).contains(&a) => out.push(a),
            _ => {
                return Err(CliError::Usage(format!(
                    "alpha '{part}' is not a number in [0, 1]"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("at least one alpha is required".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub scores: PathBuf,
    pub events: PathBuf,
    pub window: WindowSpec,
    pub aggregation: AggregationSpec,
    pub alphas: Vec<f64>,
    /// Adds the classic window scorer to the summary.
    pub nab: bool,
    /// Score at or above which a timestamp counts as an alarm for `nab`.
    pub alarm_threshold: f64,
    /// Existence weight of range-based recall.
    pub existence_weight: f64,
    #[serde(skip)]
    pub out: PathBuf,
    pub seed: u64,
}

impl EvalConfig {
    pub fn new(
        scores: impl Into<PathBuf>,
        events: impl Into<PathBuf>,
        out: impl Into<PathBuf>,
    ) -> Self {
        Self {
            scores: scores.into(),
            events: events.into(),
            window: WindowSpec::Auto,
            aggregation: AggregationSpec::default(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            nab: false,
            alarm_threshold: DEFAULT_ALARM_THRESHOLD,
            existence_weight: 0.0,
            out: out.into(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.aggregation.validate()?;
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(CliError::Usage(format!("alpha {a} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&self.existence_weight) {
            return Err(CliError::Usage(format!(
                "existence weight {} outside [0, 1]",
                self.existence_weight
            )));
        }
        if !self.alarm_threshold.is_finite() {
            return Err(CliError::Usage("alarm threshold must be finite".into()));
        }
        Ok(())
    }
}
