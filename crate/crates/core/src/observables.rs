//! Scalar diagnostics sampled along trajectories.

use std::f64::consts::PI;

use crate::circle::{Configuration, IncrementField};
use crate::dynamics::{EventLog, Observer, SimState};
use crate::error::Result;
use crate::table::{num, CsvRecord};

/// Corridor threshold `2 pi / 3`: below it no update can cross the branch.
pub const CORRIDOR: f64 = 2.0 * PI / 3.0;

/// `sum |delta(e)|`.
pub fn l1_lyapunov(field: &IncrementField) -> f64 {
    field.deltas().iter().map(|d| d.abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorMargin {
    pub max_abs: f64,
    pub ok: bool,
}

pub fn corridor_margin(field: &IncrementField) -> CorridorMargin {
    let max_abs = field.deltas().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    CorridorMargin {
        max_abs,
        ok: max_abs < CORRIDOR,
    }
}

/// Circular order parameter `(1/N) sum exp(i theta_j)` as `(re, im)`.
pub fn order_parameter(cfg: &Configuration) -> (f64, f64) {
    let n = cfg.n() as f64;
    let (re, im) = cfg
        .angles()
        .iter()
        .fold((0.0, 0.0), |(re, im), &a| (re + a.cos(), im + a.sin()));
    (re / n, im / n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSample {
    pub step: u64,
    pub l1_lyapunov: f64,
    pub max_abs_delta: f64,
    pub corridor_ok: bool,
    /// Integer winding on the ring.
    pub winding: Option<i64>,
    /// `m / 2pi`; only meaningful on its own for the open path.
    pub winding_raw: f64,
    pub order_parameter_re: f64,
    pub order_parameter_im: f64,
}

impl ObservableSample {
    pub fn of(step: u64, cfg: &Configuration) -> Result<Self> {
        let field = cfg.increment_field();
        let margin = corridor_margin(&field);
        let w = field.winding_number()?;
        let (re, im) = order_parameter(cfg);
        Ok(ObservableSample {
            step,
            l1_lyapunov: l1_lyapunov(&field),
            max_abs_delta: margin.max_abs,
            corridor_ok: margin.ok,
            winding: w.integer,
            winding_raw: w.raw,
            order_parameter_re: re,
            order_parameter_im: im,
        })
    }

    pub fn order_parameter_abs(&self) -> f64 {
        self.order_parameter_re.hypot(self.order_parameter_im)
    }
}

impl CsvRecord for ObservableSample {
    fn header() -> &'static [&'static str] {
        &[
            "step",
            "l1_lyapunov",
            "max_abs_delta",
            "corridor_ok",
            "winding",
            "r_re",
            "r_im",
            "r_abs",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let winding = match self.winding {
            Some(w) => w.to_string(),
            None => num(self.winding_raw),
        };
        vec![
            self.step.to_string(),
            num(self.l1_lyapunov),
            num(self.max_abs_delta),
            self.corridor_ok.to_string(),
            winding,
            num(self.order_parameter_re),
            num(self.order_parameter_im),
            num(self.order_parameter_abs()),
        ]
    }
}

/// Collects an [`ObservableSample`] at every sampling point.
#[derive(Debug, Default)]
pub struct TimeSeries {
    pub samples: Vec<ObservableSample>,
}

impl Observer for TimeSeries {
    fn on_sample(&mut self, state: &SimState) -> Result<()> {
        if self.samples.last().map(|s| s.step) == Some(state.step_count()) {
            return Ok(());
        }
        self.samples
            .push(ObservableSample::of(state.step_count(), state.config())?);
        Ok(())
    }
}

/// Aggregates over a ring event log.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossingStatistics {
    /// Events with `m- + m+ != 0`.
    pub crossing_count: u64,
    pub first_crossing_step: Option<u64>,
    pub last_crossing_step: Option<u64>,
    /// `(step, winding)` at the start of the log and after every change.
    /// The step is the time of the state carrying that winding.
    pub winding_trace: Vec<(u64, i64)>,
}

pub fn crossing_statistics(log: &EventLog) -> CrossingStatistics {
    let mut stats = CrossingStatistics::default();
    for ev in log.iter() {
        let Some(after) = ev.winding_after else {
            continue;
        };
        if stats.winding_trace.is_empty() {
            stats
                .winding_trace
                .push((ev.step, after - ev.winding_jump()));
        }
        if ev.crossing_sum() != 0 {
            stats.crossing_count += 1;
            stats.first_crossing_step.get_or_insert(ev.step);
            stats.last_crossing_step = Some(ev.step);
        }
        let current = stats.winding_trace.last().map(|&(_, w)| w);
        if current != Some(after) {
            stats.winding_trace.push((ev.step + 1, after));
        }
    }
    stats
}

/// Row form of a winding trace entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingChange {
    pub step: u64,
    pub winding: i64,
}

impl CsvRecord for WindingChange {
    fn header() -> &'static [&'static str] {
        &["step", "winding"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.step.to_string(), self.winding.to_string()]
    }
}

impl CrossingStatistics {
    pub fn trace_rows(&self) -> Vec<WindingChange> {
        self.winding_trace
            .iter()
            .map(|&(step, winding)| WindingChange { step, winding })
            .collect()
    }

    pub fn final_winding(&self) -> Option<i64> {
        self.winding_trace.last().map(|&(_, w)| w)
    }
}
