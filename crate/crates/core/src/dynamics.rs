//! The asynchronous midpoint kernel.
//!
//! One step picks an edge (uniformly, or from a deterministic schedule),
//! moves both endpoints to the midpoint of the shortest arc between them,
//! and records the branch-crossing integers `m-` and `m+` that account for
//! any change in the ring winding number.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circle::{in_open_principal, ring_winding, wrap, Configuration, Topology};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::table::{num, opt, opt_num, CsvRecord};

/// Slack allowed on the local L1 Lyapunov check.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-12;

/// Default stride of the winding recomputation in release builds.
pub const RELEASE_WINDING_CHECK_STRIDE: u64 = 1024;

/// Which of the two shortest-arc midpoints an antipodal update takes.
///
/// `Plus` is `wrap(theta(k) + delta/2)`, the value the update formula gives
/// directly; `Minus` is the antipodal point `wrap(theta(k) + delta/2 + pi)`.
/// For `theta(k) = pi/2`, `theta(k+1) = -pi/2` these are `0` and `-pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MidpointChoice {
    Plus,
    Minus,
}

impl MidpointChoice {
    fn from_bit(bit: bool) -> Self {
        if bit {
            MidpointChoice::Plus
        } else {
            MidpointChoice::Minus
        }
    }

    fn sign(self) -> i8 {
        match self {
            MidpointChoice::Plus => 1,
            MidpointChoice::Minus => -1,
        }
    }
}

#[inline]
pub fn is_antipodal(delta: f64, eps_ant: f64) -> bool {
    (delta + PI).abs() <= eps_ant
}

/// Increment actually transported by the update: `delta`, or `delta + 2pi`
/// when the antipodal `Minus` midpoint is taken.
#[inline]
fn effective_increment(delta: f64, choice: Option<MidpointChoice>) -> f64 {
    match choice {
        Some(MidpointChoice::Minus) => delta + TAU,
        _ => delta,
    }
}

/// Returns a copy of `cfg` with `edge` averaged along the shortest arc.
///
/// Both endpoints receive the same stored value, so they are bit-equal
/// afterwards. `choice` is required when the edge is antipodal within
/// `eps_ant` and ignored otherwise.
pub fn midpoint_update(
    cfg: &Configuration,
    edge: usize,
    choice: Option<MidpointChoice>,
    eps_ant: f64,
) -> Result<Configuration> {
    let topo = cfg.topology();
    topo.check_edge(edge)?;
    let delta = cfg.delta(edge);
    let choice = if is_antipodal(delta, eps_ant) {
        Some(choice.ok_or(Error::AntipodalWithoutChoice { edge: edge + 1 })?)
    } else {
        None
    };
    let mut out = cfg.clone();
    out.set_edge_pair(
        edge,
        wrap(cfg.angle(edge) + 0.5 * effective_increment(delta, choice)),
    );
    Ok(out)
}

/// Corridor sums `S-(k) = delta(k-1) + delta(k)/2` and
/// `S+(k) = delta(k+1) + delta(k)/2`. A side is `None` where the neighbouring
/// edge does not exist (ends of an open path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corridor {
    pub minus: Option<f64>,
    pub plus: Option<f64>,
}

impl Corridor {
    /// `true` when every present side lies in `(-pi, pi)`.
    pub fn is_clear(&self) -> bool {
        self.minus.is_none_or(in_open_principal) && self.plus.is_none_or(in_open_principal)
    }
}

fn corridor_with(cfg: &Configuration, edge: usize, transported: f64) -> Corridor {
    let topo = cfg.topology();
    let half = 0.5 * transported;
    Corridor {
        minus: topo.prev_edge(edge).map(|e| cfg.delta(e) + half),
        plus: topo.next_edge(edge).map(|e| cfg.delta(e) + half),
    }
}

pub fn s_corridor(cfg: &Configuration, edge: usize) -> Result<Corridor> {
    cfg.topology().check_edge(edge)?;
    Ok(corridor_with(cfg, edge, cfg.delta(edge)))
}

/// The integer `m` with `s - 2 pi m` in `[-pi, pi)`, for `s` in
/// `[-3pi/2, 3pi/2)`.
pub fn crossing_integer(s: f64) -> Result<i8> {
    const SLACK: f64 = 1e-9;
    if !s.is_finite() {
        return Err(Error::NonFinite(s));
    }
    if !(-1.5 * PI - SLACK..1.5 * PI + SLACK).contains(&s) {
        return Err(Error::CrossingDomain(s));
    }
    Ok(if s >= PI {
        1
    } else if s < -PI {
        -1
    } else {
        0
    })
}

/// Record of one update at time `step` (producing the state at `step + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateEvent {
    pub step: u64,
    /// 0-based edge index.
    pub edge: usize,
    pub delta_before: f64,
    pub antipodal: bool,
    pub antipodal_choice: Option<MidpointChoice>,
    pub s_minus: Option<f64>,
    pub s_plus: Option<f64>,
    pub m_minus: i8,
    pub m_plus: i8,
    /// Ring only.
    pub winding_after: Option<i64>,
}

impl UpdateEvent {
    pub fn crossing_sum(&self) -> i8 {
        self.m_minus + self.m_plus
    }

    pub fn is_crossing(&self) -> bool {
        self.m_minus != 0 || self.m_plus != 0
    }

    /// Winding change this event implies: `-(m- + m+)`, plus one when the
    /// antipodal `Minus` midpoint carried the edge around the long way.
    pub fn winding_jump(&self) -> i64 {
        let shift = i64::from(self.antipodal_choice == Some(MidpointChoice::Minus));
        shift - i64::from(self.crossing_sum())
    }
}

impl CsvRecord for UpdateEvent {
    fn header() -> &'static [&'static str] {
        &[
            "step",
            "edge",
            "delta_before",
            "antipodal",
            "s_minus",
            "s_plus",
            "m_minus",
            "m_plus",
            "winding_after",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let antipodal = match self.antipodal_choice {
            Some(c) => c.sign().to_string(),
            None => "0".to_string(),
        };
        vec![
            self.step.to_string(),
            (self.edge + 1).to_string(),
            num(self.delta_before),
            antipodal,
            opt_num(self.s_minus),
            opt_num(self.s_plus),
            self.m_minus.to_string(),
            self.m_plus.to_string(),
            opt(self.winding_after),
        ]
    }
}

/// Event buffer. Bounded logs keep the most recent events.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: VecDeque<UpdateEvent>,
    capacity: Option<usize>,
    crossings_only: bool,
    dropped: u64,
}

impl EventLog {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn bounded(capacity: usize) -> Self {
        EventLog {
            capacity: Some(capacity),
            ..Self::default()
        }
    }

    /// Keeps only events with a nonzero crossing integer or an antipodal
    /// midpoint.
    pub fn crossings_only(mut self) -> Self {
        self.crossings_only = true;
        self
    }

    pub fn push(&mut self, event: UpdateEvent) {
        if self.crossings_only && !event.is_crossing() && !event.antipodal {
            return;
        }
        if let Some(cap) = self.capacity {
            if cap == 0 {
                self.dropped += 1;
                return;
            }
            if self.events.len() == cap {
                self.events.pop_front();
                self.dropped += 1;
            }
        }
        self.events.push_back(event);
    }

    pub fn iter(&self) -> impl Iterator<Item = &UpdateEvent> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events evicted by the capacity bound.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn is_filtered(&self) -> bool {
        self.crossings_only
    }
}

impl FromIterator<UpdateEvent> for EventLog {
    fn from_iter<I: IntoIterator<Item = UpdateEvent>>(iter: I) -> Self {
        EventLog {
            events: iter.into_iter().collect(),
            ..Self::default()
        }
    }
}

/// Source of the edge updated at each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeSchedule {
    /// Uniform over all edges, drawn from the state's stream.
    Uniform,
    /// Edges `0, 1, ..., n-2` in order, repeating; the ring's closing edge
    /// is never selected.
    CyclicSweep { next: usize },
}

impl EdgeSchedule {
    pub fn cyclic() -> Self {
        EdgeSchedule::CyclicSweep { next: 0 }
    }

    fn next_edge(&mut self, topo: Topology, stream: &mut RandomStream) -> usize {
        match self {
            EdgeSchedule::Uniform => stream.edge(topo.edge_count()),
            EdgeSchedule::CyclicSweep { next } => {
                let e = *next;
                *next = (e + 1) % (topo.n() - 1);
                e
            }
        }
    }
}

/// How often `step` recomputes the ring winding from scratch to check the
/// jump identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindingCheck {
    EveryStep,
    Every(u64),
    Off,
}

impl Default for WindingCheck {
    fn default() -> Self {
        if cfg!(debug_assertions) {
            WindingCheck::EveryStep
        } else {
            WindingCheck::Every(RELEASE_WINDING_CHECK_STRIDE)
        }
    }
}

impl WindingCheck {
    fn due(self, step: u64) -> bool {
        match self {
            WindingCheck::EveryStep => true,
            WindingCheck::Every(k) => k > 0 && step % k == 0,
            WindingCheck::Off => false,
        }
    }
}

/// One trajectory of the process.
#[derive(Debug, Clone)]
pub struct SimState {
    config: Configuration,
    step: u64,
    stream: RandomStream,
    schedule: EdgeSchedule,
    eps_ant: f64,
    winding: Option<i64>,
    winding_check: WindingCheck,
    lyapunov_check: bool,
    log: Option<EventLog>,
}

impl SimState {
    /// Starts a trajectory at `config` with the uniform edge law.
    ///
    /// Rings need at least three vertices so that the two corridor sums of
    /// every edge refer to distinct neighbours.
    pub fn new(config: Configuration, stream: RandomStream) -> Result<Self> {
        let topo = config.topology();
        let winding = if topo.is_ring() {
            if topo.n() < 3 {
                return Err(Error::TooFewVertices {
                    kind: "ring",
                    n: topo.n(),
                    min: 3,
                });
            }
            Some(ring_winding(&config)?)
        } else {
            None
        };
        Ok(SimState {
            config,
            step: 0,
            stream,
            schedule: EdgeSchedule::Uniform,
            eps_ant: 0.0,
            winding,
            winding_check: WindingCheck::default(),
            lyapunov_check: cfg!(debug_assertions),
            log: None,
        })
    }

    pub fn with_schedule(mut self, schedule: EdgeSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_antipodal_tolerance(mut self, eps_ant: f64) -> Self {
        self.eps_ant = eps_ant;
        self
    }

    pub fn with_winding_check(mut self, check: WindingCheck) -> Self {
        self.winding_check = check;
        self
    }

    pub fn with_lyapunov_check(mut self, on: bool) -> Self {
        self.lyapunov_check = on;
        self
    }

    pub fn with_event_log(mut self, log: EventLog) -> Self {
        self.log = Some(log);
        self
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn topology(&self) -> Topology {
        self.config.topology()
    }

    /// Number of updates applied so far.
    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Tracked integer winding (ring only).
    pub fn winding(&self) -> Option<i64> {
        self.winding
    }

    pub fn eps_ant(&self) -> f64 {
        self.eps_ant
    }

    pub fn event_log(&self) -> Option<&EventLog> {
        self.log.as_ref()
    }

    pub fn take_event_log(&mut self) -> Option<EventLog> {
        self.log.take()
    }

    pub fn stream(&self) -> &RandomStream {
        &self.stream
    }

    /// Applies one update and returns its record.
    ///
    /// Draw order: the edge (uniform schedule only), then one fair bit if
    /// and only if the edge is antipodal.
    pub fn step(&mut self) -> Result<UpdateEvent> {
        let topo = self.config.topology();
        let edge = self.schedule.next_edge(topo, &mut self.stream);
        let delta = self.config.delta(edge);
        let antipodal = is_antipodal(delta, self.eps_ant);
        let choice = antipodal.then(|| MidpointChoice::from_bit(self.stream.fair_bit()));
        let transported = effective_increment(delta, choice);

        let corridor = corridor_with(&self.config, edge, transported);
        let m_minus = corridor
            .minus
            .map(crossing_integer)
            .transpose()?
            .unwrap_or(0);
        let m_plus = corridor
            .plus
            .map(crossing_integer)
            .transpose()?
            .unwrap_or(0);

        let prev = topo.prev_edge(edge);
        let next = topo.next_edge(edge);
        let local_l1 = |cfg: &Configuration| {
            cfg.delta(edge).abs()
                + prev.map_or(0.0, |e| cfg.delta(e).abs())
                + next.map_or(0.0, |e| cfg.delta(e).abs())
        };
        let l1_before = self.lyapunov_check.then(|| local_l1(&self.config));

        let value = wrap(self.config.angle(edge) + 0.5 * transported);
        self.config.set_edge_pair(edge, value);

        if let Some(before) = l1_before {
            let after = local_l1(&self.config);
            if after > before + LYAPUNOV_TOLERANCE {
                return Err(Error::LyapunovIncrease {
                    step: self.step,
                    before,
                    after,
                });
            }
        }

        let mut event = UpdateEvent {
            step: self.step,
            edge,
            delta_before: delta,
            antipodal,
            antipodal_choice: choice,
            s_minus: corridor.minus,
            s_plus: corridor.plus,
            m_minus,
            m_plus,
            winding_after: None,
        };

        if let Some(before) = self.winding {
            let expected = before + event.winding_jump();
            if self.winding_check.due(self.step) {
                let actual = ring_winding(&self.config)?;
                if actual != expected {
                    return Err(Error::WindingJump {
                        step: self.step,
                        before,
                        after: actual,
                        expected: event.winding_jump(),
                    });
                }
            }
            self.winding = Some(expected);
            event.winding_after = Some(expected);
        }

        self.step += 1;
        if let Some(log) = self.log.as_mut() {
            log.push(event.clone());
        }
        Ok(event)
    }
}

/// Instantaneous values of the two stopping-time predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingStatus {
    /// Some edge has a corridor sum outside `(-pi, pi)`.
    pub branch_possible: bool,
    /// Some edge has `|delta + pi| <= eps_ant`.
    pub antipodal_present: bool,
}

impl StoppingStatus {
    pub fn stopped(&self) -> bool {
        self.branch_possible || self.antipodal_present
    }
}

pub fn stopping_status(cfg: &Configuration, eps_ant: f64) -> StoppingStatus {
    let topo = cfg.topology();
    let mut status = StoppingStatus {
        branch_possible: false,
        antipodal_present: false,
    };
    for e in 0..topo.edge_count() {
        let delta = cfg.delta(e);
        status.antipodal_present |= is_antipodal(delta, eps_ant);
        status.branch_possible |= !corridor_with(cfg, e, delta).is_clear();
    }
    status
}

/// When observers are sampled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stride {
    /// Steps `0, 1, 2, 4, 8, ...` plus the final step.
    #[default]
    Geometric,
    /// Every `k` steps plus the final step.
    Every(u64),
    /// Only the initial and final steps.
    Endpoints,
}

impl Stride {
    pub fn due(&self, step: u64) -> bool {
        match *self {
            Stride::Geometric => step == 0 || step.is_power_of_two(),
            Stride::Every(k) => k > 0 && step % k == 0,
            Stride::Endpoints => step == 0,
        }
    }
}

/// Callbacks driven by [`run`] on the trajectory's own thread.
pub trait Observer {
    /// Called after every step.
    fn on_step(&mut self, _state: &SimState, _event: &UpdateEvent) -> Result<()> {
        Ok(())
    }

    /// Called at the initial state, on the stride, and at the final state.
    fn on_sample(&mut self, _state: &SimState) -> Result<()> {
        Ok(())
    }
}

/// Adapter turning a closure into a sampling observer.
pub struct SampleFn<F>(pub F);

impl<F: FnMut(&SimState) -> Result<()>> Observer for SampleFn<F> {
    fn on_sample(&mut self, state: &SimState) -> Result<()> {
        (self.0)(state)
    }
}

/// Adapter turning a closure into a per-step observer.
pub struct StepFn<F>(pub F);

impl<F: FnMut(&SimState, &UpdateEvent) -> Result<()>> Observer for StepFn<F> {
    fn on_step(&mut self, state: &SimState, event: &UpdateEvent) -> Result<()> {
        (self.0)(state, event)
    }
}

/// Advances `state` by `horizon` steps.
///
/// Samples fire on absolute step counts, so a run split into pieces samples
/// the same steps as one long run, except that every call also samples its
/// own first and last state.
pub fn run(
    state: &mut SimState,
    horizon: u64,
    stride: Stride,
    observers: &mut [&mut dyn Observer],
) -> Result<()> {
    for obs in observers.iter_mut() {
        obs.on_sample(state)?;
    }
    for i in 0..horizon {
        let event = state.step()?;
        for obs in observers.iter_mut() {
            obs.on_step(state, &event)?;
        }
        if stride.due(state.step_count()) || i + 1 == horizon {
            for obs in observers.iter_mut() {
                obs.on_sample(state)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::iid_uniform;
    use std::f64::consts::FRAC_PI_2;

    fn ring(angles: Vec<f64>) -> Configuration {
        Configuration::new(Topology::ring(angles.len()).unwrap(), angles).unwrap()
    }

    fn path(angles: Vec<f64>) -> Configuration {
        Configuration::new(Topology::path(angles.len()).unwrap(), angles).unwrap()
    }

    #[test]
    fn midpoint_examples() {
        let out = midpoint_update(&path(vec![0.1, 0.3]), 0, None, 0.0).unwrap();
        assert!((out.angle(0) - 0.2).abs() < 1e-15);
        assert_eq!(out.angle(0), out.angle(1));

        let out = midpoint_update(&path(vec![0.9 * PI, -0.9 * PI]), 0, None, 0.0).unwrap();
        assert!((out.angle(0) + PI).abs() < 1e-14 || (out.angle(0) - PI).abs() < 1e-14);
        assert_eq!(out.angle(0), out.angle(1));
    }

    #[test]
    fn antipodal_choices() {
        let cfg = path(vec![FRAC_PI_2, -FRAC_PI_2]);
        assert_eq!(
            midpoint_update(&cfg, 0, None, 0.0),
            Err(Error::AntipodalWithoutChoice { edge: 1 })
        );
        let plus = midpoint_update(&cfg, 0, Some(MidpointChoice::Plus), 0.0).unwrap();
        assert_eq!(plus.angles(), &[0.0, 0.0]);
        let minus = midpoint_update(&cfg, 0, Some(MidpointChoice::Minus), 0.0).unwrap();
        assert_eq!(minus.angles(), &[-PI, -PI]);
    }

    #[test]
    fn corridor_examples() {
        let c = s_corridor(&ring(vec![0.0; 5]), 2).unwrap();
        assert_eq!(
            c,
            Corridor {
                minus: Some(0.0),
                plus: Some(0.0)
            }
        );

        // delta(1) = delta(2) = 0.9 pi on a 3-ring.
        let cfg = ring(vec![-0.9 * PI, 0.0, 0.9 * PI]);
        let c = s_corridor(&cfg, 1).unwrap();
        assert!((c.minus.unwrap() - 1.35 * PI).abs() < 1e-12);

        let c = s_corridor(&path(vec![0.0, 0.1, 0.2]), 0).unwrap();
        assert!(c.minus.is_none());
        assert!((c.plus.unwrap() - 0.15).abs() < 1e-15);
        assert!(s_corridor(&path(vec![0.0, 0.1]), 1).is_err());
    }

    #[test]
    fn crossing_integer_examples() {
        assert_eq!(crossing_integer(0.0), Ok(0));
        assert_eq!(crossing_integer(1.35 * PI), Ok(1));
        assert_eq!(crossing_integer(-1.2 * PI), Ok(-1));
        assert_eq!(crossing_integer(PI), Ok(1));
        assert_eq!(crossing_integer(-PI), Ok(0));
        assert!(matches!(
            crossing_integer(1.6 * PI),
            Err(Error::CrossingDomain(_))
        ));
    }

    #[test]
    fn forced_crossing_drops_winding() {
        // theta = (-0.9pi, 0, 0.9pi); edge 2 (0-based 1) has S-(2) = 1.35 pi.
        let cfg = ring(vec![-0.9 * PI, 0.0, 0.9 * PI]);
        let w0 = ring_winding(&cfg).unwrap();
        let after = midpoint_update(&cfg, 1, None, 0.0).unwrap();
        let w1 = ring_winding(&after).unwrap();
        let c = s_corridor(&cfg, 1).unwrap();
        let m = crossing_integer(c.minus.unwrap()).unwrap()
            + crossing_integer(c.plus.unwrap()).unwrap();
        assert_eq!(crossing_integer(c.minus.unwrap()).unwrap(), 1);
        assert_eq!(w1, w0 - i64::from(m));
        assert_eq!(w1, w0 - 1);
    }

    #[test]
    fn scheduled_step_records_crossing() {
        let cfg = ring(vec![-0.9 * PI, 0.0, 0.9 * PI]);
        let mut st = SimState::new(cfg, RandomStream::new(0, 0))
            .unwrap()
            .with_schedule(EdgeSchedule::CyclicSweep { next: 1 })
            .with_winding_check(WindingCheck::EveryStep);
        let w0 = st.winding().unwrap();
        let ev = st.step().unwrap();
        assert_eq!(ev.edge, 1);
        assert_eq!(ev.m_minus, 1);
        assert_eq!(ev.winding_after, Some(w0 - 1));
    }

    #[test]
    fn consensus_is_absorbing() {
        let mut st = SimState::new(ring(vec![0.4; 6]), RandomStream::new(3, 0)).unwrap();
        for _ in 0..100 {
            let ev = st.step().unwrap();
            assert_eq!(ev.delta_before, 0.0);
            assert_eq!((ev.m_minus, ev.m_plus), (0, 0));
        }
        assert!(st.config().angles().iter().all(|&a| a == 0.4));
    }

    #[test]
    fn corridor_step_keeps_winding() {
        let n = 40;
        let topo = Topology::ring(n).unwrap();
        let cfg = crate::init::perfect_twist(topo, 3, 0.1, &mut RandomStream::new(1, 1)).unwrap();
        let mut st = SimState::new(cfg, RandomStream::new(1, 2)).unwrap();
        for _ in 0..5000 {
            let ev = st.step().unwrap();
            assert!(!ev.is_crossing());
        }
        assert_eq!(st.winding(), Some(3));
    }

    #[test]
    fn antipodal_minus_branch_keeps_jump_identity() {
        // Two antipodal neighbours on a 4-ring; force the edge between them
        // with a wide tolerance so both branches get exercised.
        for seed in 0..32 {
            let cfg = ring(vec![
                FRAC_PI_2,
                -FRAC_PI_2,
                -FRAC_PI_2 + 0.3,
                FRAC_PI_2 - 0.2,
            ]);
            let mut st = SimState::new(cfg, RandomStream::new(seed, 0))
                .unwrap()
                .with_schedule(EdgeSchedule::cyclic())
                .with_winding_check(WindingCheck::EveryStep);
            let ev = st.step().unwrap();
            assert!(ev.antipodal);
            assert!(ev.antipodal_choice.is_some());
        }
    }

    #[test]
    fn cyclic_schedule_skips_closing_edge() {
        let cfg = ring(vec![0.0, 0.1, 0.2, 0.3]);
        let mut st = SimState::new(cfg, RandomStream::new(0, 0))
            .unwrap()
            .with_schedule(EdgeSchedule::cyclic());
        let edges: Vec<usize> = (0..7).map(|_| st.step().unwrap().edge).collect();
        assert_eq!(edges, vec![0, 1, 2, 0, 1, 2, 0]);
    }

    #[test]
    fn stopping_status_examples() {
        let s = stopping_status(&ring(vec![0.1; 5]), 0.0);
        assert!(!s.branch_possible && !s.antipodal_present);

        let n = 100;
        let topo = Topology::ring(n).unwrap();
        let twist = crate::init::perfect_twist(topo, 4, 0.0, &mut RandomStream::new(0, 0)).unwrap();
        let s = stopping_status(&twist, 0.0);
        assert!(!s.branch_possible && !s.antipodal_present);

        let s = stopping_status(&ring(vec![FRAC_PI_2, -FRAC_PI_2, 0.0]), 0.0);
        assert!(s.antipodal_present);
    }

    #[test]
    fn run_with_zero_horizon_is_identity() {
        let topo = Topology::ring(8).unwrap();
        let cfg = iid_uniform(topo, &mut RandomStream::new(5, 0)).unwrap();
        let mut st = SimState::new(cfg.clone(), RandomStream::new(5, 1)).unwrap();
        let mut samples = 0;
        let mut obs = SampleFn(|_: &SimState| {
            samples += 1;
            Ok(())
        });
        run(&mut st, 0, Stride::Geometric, &mut [&mut obs]).unwrap();
        assert_eq!(st.config(), &cfg);
        assert_eq!(st.step_count(), 0);
        assert_eq!(samples, 1);
    }

    #[test]
    fn runs_are_deterministic() {
        let topo = Topology::ring(16).unwrap();
        let go = || {
            let cfg = iid_uniform(topo, &mut RandomStream::new(11, 0)).unwrap();
            let mut st = SimState::new(cfg, RandomStream::new(11, 1))
                .unwrap()
                .with_event_log(EventLog::unbounded());
            run(&mut st, 10_000, Stride::Geometric, &mut []).unwrap();
            st.take_event_log().unwrap()
        };
        assert_eq!(go(), go());
    }

    #[test]
    fn geometric_stride_samples() {
        let due: Vec<u64> = (0..20).filter(|&t| Stride::Geometric.due(t)).collect();
        assert_eq!(due, vec![0, 1, 2, 4, 8, 16]);
    }

    #[test]
    fn bounded_log_keeps_latest() {
        let topo = Topology::ring(5).unwrap();
        let cfg = iid_uniform(topo, &mut RandomStream::new(2, 0)).unwrap();
        let mut st = SimState::new(cfg, RandomStream::new(2, 1))
            .unwrap()
            .with_event_log(EventLog::bounded(10));
        run(&mut st, 25, Stride::Endpoints, &mut []).unwrap();
        let log = st.event_log().unwrap();
        assert_eq!(log.len(), 10);
        assert_eq!(log.dropped(), 15);
        assert_eq!(log.iter().next().unwrap().step, 15);
    }

    #[test]
    fn small_ring_rejected() {
        let cfg = ring(vec![0.0, 1.0]);
        assert!(SimState::new(cfg, RandomStream::new(0, 0)).is_err());
    }
}
