//! Linear increment transport and the cyclic sweep that unwinds a twist.
//!
//! Vectors are 0-based; the closing edge is index `n - 1`.

use std::f64::consts::{PI, TAU};

use crate::circle::Topology;
use crate::dynamics::{run, EdgeSchedule, EventLog, SimState, StepFn, Stride};
use crate::error::{Error, Result};
use crate::init::perfect_twist;
use crate::observables::crossing_statistics;
use crate::rng::RandomStream;
use crate::table::{num, opt, CsvRecord};

/// Unwrapped increments evolving under the linear redistribution rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearIncrementState {
    deltas: Vec<f64>,
    total: f64,
}

impl LinearIncrementState {
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() < 3 {
            return Err(Error::TooFewVertices {
                kind: "linear sweep ring",
                n: deltas.len(),
                min: 3,
            });
        }
        if let Some(&bad) = deltas.iter().find(|d| !d.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        let total = deltas.iter().sum();
        Ok(LinearIncrementState { deltas, total })
    }

    /// Constant increments `beta = 2 pi w / n`.
    pub fn uniform_twist(n: usize, w: i64) -> Result<Self> {
        Self::new(vec![TAU * w as f64 / n as f64; n])
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Total at construction; the rule conserves it.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn current_sum(&self) -> f64 {
        self.deltas.iter().sum()
    }

    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn closing(&self) -> f64 {
        self.deltas[self.n() - 1]
    }

    /// In place: `delta[k] = 0`, each cyclic neighbour gains half of it.
    pub fn update(&mut self, k: usize) -> Result<()> {
        let n = self.n();
        if k >= n {
            return Err(Error::EdgeOutOfRange {
                edge: k + 1,
                edges: n,
            });
        }
        let half = 0.5 * self.deltas[k];
        self.deltas[k] = 0.0;
        self.deltas[(k + n - 1) % n] += half;
        self.deltas[(k + 1) % n] += half;
        Ok(())
    }

    /// One pass over edges `0..n-1` in order, skipping the closing edge.
    pub fn sweep(&mut self) {
        for k in 0..self.n() - 1 {
            self.update(k).expect("sweep edge in range");
        }
    }

    /// `max |S+-|` over the two sides of edges `n-2`, `n-1` and `0`.
    pub fn max_abs_s_near_closing(&self) -> f64 {
        let n = self.n();
        let d = |i: usize| self.deltas[i % n];
        [n - 2, n - 1, 0]
            .into_iter()
            .flat_map(|k| {
                let half = 0.5 * d(k);
                [d(k + n - 1) + half, d(k + 1) + half]
            })
            .fold(0.0f64, |m, s| m.max(s.abs()))
    }
}

pub fn linear_increment_update(
    state: &LinearIncrementState,
    k: usize,
) -> Result<LinearIncrementState> {
    let mut out = state.clone();
    out.update(k)?;
    Ok(out)
}

pub fn cyclic_sweep(state: &LinearIncrementState) -> LinearIncrementState {
    let mut out = state.clone();
    out.sweep();
    out
}

/// Closed-form closing entry after one sweep:
/// `delta[n-1] + (1/2 + 2^-(n-1)) delta[0] + sum_{j=1}^{n-2} 2^-(n-1-j) delta[j]`,
/// evaluated by halving an accumulator so no power of two is formed.
pub fn closing_edge_prediction(delta0: &[f64]) -> Result<f64> {
    let n = delta0.len();
    if n < 3 {
        return Err(Error::TooFewVertices {
            kind: "linear sweep ring",
            n,
            min: 3,
        });
    }
    let mut acc = 0.5 * delta0[0];
    for &d in &delta0[1..n - 1] {
        acc = 0.5 * (acc + d);
    }
    Ok(delta0[n - 1] + 0.5 * delta0[0] + acc)
}

/// Per-sweep record of the closing-edge accumulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sweep_index: u64,
    pub closing_delta: f64,
    /// `total - closing_delta`.
    pub gap: f64,
    /// `(1 - 2^-(n-2))^m` times the initial gap.
    pub geometric_bound: f64,
    pub max_abs_s_near_closing: f64,
}

impl CsvRecord for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "sweep_index",
            "closing_delta",
            "gap",
            "geometric_bound",
            "max_abs_s_near_closing",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.sweep_index.to_string(),
            num(self.closing_delta),
            num(self.gap),
            num(self.geometric_bound),
            num(self.max_abs_s_near_closing),
        ]
    }
}

/// Contraction factor `c = 2^-(n-2)` of the gap bound.
pub fn sweep_contraction(n: usize) -> f64 {
    0.5f64.powi(n as i32 - 2)
}

/// Rows for sweeps `0..=sweeps`, row 0 being the initial state.
pub fn iterate_sweeps(state: &LinearIncrementState, sweeps: u64) -> Vec<SweepRow> {
    let mut st = state.clone();
    let c = sweep_contraction(st.n());
    let gap0 = st.total - st.closing();
    let row = |m: u64, st: &LinearIncrementState| SweepRow {
        sweep_index: m,
        closing_delta: st.closing(),
        gap: st.total - st.closing(),
        geometric_bound: (1.0 - c).powi(m.min(i32::MAX as u64) as i32) * gap0,
        max_abs_s_near_closing: st.max_abs_s_near_closing(),
    };
    let mut rows = Vec::with_capacity(sweeps as usize + 1);
    rows.push(row(0, &st));
    for m in 1..=sweeps {
        st.sweep();
        rows.push(row(m, &st));
    }
    rows
}

/// The wrapped replay of a cyclic-sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReplay {
    pub steps: u64,
    pub initial_winding: i64,
    pub final_winding: i64,
    pub first_crossing_step: Option<u64>,
    /// `(step, winding)` at the start and after every change.
    pub winding_trace: Vec<(u64, i64)>,
    /// Steps of every event that changed the winding.
    pub crossing_steps: Vec<u64>,
}

impl EscapeReplay {
    pub fn reached_zero(&self) -> bool {
        self.final_winding == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReport {
    pub n: usize,
    pub w0: i64,
    /// First sweep after which the linear model has `max |S+-| >= pi`
    /// around the closing edge.
    pub predicted_sweep: Option<u64>,
    pub rows: Vec<SweepRow>,
    pub replay: EscapeReplay,
}

impl EscapeReport {
    /// Sweep index in which the first wrapped crossing happened.
    pub fn replay_sweep(&self) -> Option<u64> {
        self.replay
            .first_crossing_step
            .map(|s| s / (self.n as u64 - 1) + 1)
    }
}

/// Summary line of an escape run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeSummary {
    pub n: usize,
    pub w0: i64,
    pub predicted_sweep: Option<u64>,
    pub replay_first_crossing_step: Option<u64>,
    pub replay_sweep: Option<u64>,
    pub replay_steps: u64,
    pub final_winding: i64,
}

impl CsvRecord for EscapeSummary {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "w0",
            "predicted_sweep",
            "replay_first_crossing_step",
            "replay_sweep",
            "replay_steps",
            "final_winding",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.w0.to_string(),
            opt(self.predicted_sweep),
            opt(self.replay_first_crossing_step),
            opt(self.replay_sweep),
            self.replay_steps.to_string(),
            self.final_winding.to_string(),
        ]
    }
}

impl EscapeReport {
    pub fn summary(&self) -> EscapeSummary {
        EscapeSummary {
            n: self.n,
            w0: self.w0,
            predicted_sweep: self.predicted_sweep,
            replay_first_crossing_step: self.replay.first_crossing_step,
            replay_sweep: self.replay_sweep(),
            replay_steps: self.replay.steps,
            final_winding: self.replay.final_winding,
        }
    }
}

/// Linear prediction plus wrapped replay, both started from the uniform
/// twist of winding `w0` on `n` vertices.
///
/// The replay runs the genuine dynamics with the cyclic schedule until the
/// winding reaches 0 or `step_budget` steps elapse. `seed` only feeds the
/// fair bits of antipodal edges.
pub fn escape_scenario(
    n: usize,
    w0: i64,
    sweep_budget: u64,
    step_budget: u64,
    seed: u64,
) -> Result<EscapeReport> {
    let linear = LinearIncrementState::uniform_twist(n, w0)?;
    let rows = iterate_sweeps(&linear, sweep_budget);
    let predicted_sweep = rows
        .iter()
        .find(|r| r.max_abs_s_near_closing >= PI)
        .map(|r| r.sweep_index);

    let topo = Topology::ring(n)?;
    let mut stream = RandomStream::new(seed, 0);
    let cfg = perfect_twist(topo, w0, 0.0, &mut stream)?;
    let mut state = SimState::new(cfg, stream)?
        .with_schedule(EdgeSchedule::cyclic())
        .with_event_log(EventLog::unbounded().crossings_only());
    let initial_winding = state.winding().expect("ring");

    let mut steps = 0;
    const CHUNK: u64 = 1 << 12;
    while state.winding() != Some(0) && steps < step_budget {
        let len = CHUNK.min(step_budget - steps);
        let mut hit_zero = None;
        let mut stop = StepFn(|st: &SimState, _ev: &_| {
            if hit_zero.is_none() && st.winding() == Some(0) {
                hit_zero = Some(st.step_count());
            }
            Ok(())
        });
        run(&mut state, len, Stride::Endpoints, &mut [&mut stop])?;
        steps += len;
        if hit_zero.is_some() {
            break;
        }
    }

    let log = state.take_event_log().expect("log attached");
    let stats = crossing_statistics(&log);
    let mut winding_trace = vec![(0, initial_winding)];
    winding_trace.extend(stats.winding_trace.iter().skip(1).copied());
    let replay = EscapeReplay {
        steps: state.step_count(),
        initial_winding,
        final_winding: state.winding().expect("ring"),
        first_crossing_step: stats.first_crossing_step,
        winding_trace,
        crossing_steps: log
            .iter()
            .filter(|e| e.winding_jump() != 0)
            .map(|e| e.step)
            .collect(),
    };

    Ok(EscapeReport {
        n,
        w0,
        predicted_sweep,
        rows,
        replay,
    })
}
