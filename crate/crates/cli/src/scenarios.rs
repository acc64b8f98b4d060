//! Scenario runners. Each writes its data files into an [`OutputDir`].

use std::f64::consts::TAU;

use acca_core::crossing::crossing_probability_mc;
use acca_core::dynamics::run;
use acca_core::lift::{ComovingFrame, FrameAudit};
use acca_core::observables::{crossing_statistics, ObservableSample, TimeSeries, WindingChange};
use acca_core::replica::map_replicas;
use acca_core::sweep::escape_scenario;
use acca_core::table::num;
use acca_core::{CsvRecord, EventLog, RandomStream, SimState, Topology};
use anyhow::{ensure, Result};
use serde::Serialize;

use crate::config::{ExperimentConfig, Scenario};
use crate::output::OutputDir;

/// Human-readable `key: value` lines describing a finished run.
pub type Summary = Vec<(String, String)>;

pub fn run_scenario(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Summary> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::PathConsensus | Scenario::RingConsensus | Scenario::WindingFreeze => {
            trajectories(cfg, out)
        }
        Scenario::CrossingProbMc => crossing(cfg, out),
        Scenario::SweepEscape => sweep(cfg, out),
        Scenario::CompensatorBound => compensator(cfg, out),
    }
}

fn replica_file(stem: &str, r: u64) -> String {
    format!("{stem}_{r:04}.csv")
}

fn start_state(cfg: &ExperimentConfig, replica: u64) -> Result<SimState> {
    let topo = if cfg.scenario.is_ring() {
        Topology::ring(cfg.n)?
    } else {
        Topology::path(cfg.n)?
    };
    let mut stream = RandomStream::new(cfg.seed, replica);
    let theta = cfg.initial_condition().build(topo, &mut stream)?;
    Ok(SimState::new(theta, stream)?.with_antipodal_tolerance(cfg.tolerances().eps_ant))
}

struct Trajectory {
    samples: Vec<ObservableSample>,
    log: Option<EventLog>,
    steps: u64,
}

/// Per-replica summary row of a trajectory scenario.
struct TrajectoryRow {
    replica: u64,
    steps: u64,
    first: ObservableSample,
    last: ObservableSample,
    crossings: Option<u64>,
    last_crossing_step: Option<u64>,
}

fn winding_text(s: &ObservableSample) -> String {
    s.winding
        .map(|w| w.to_string())
        .unwrap_or_else(|| num(s.winding_raw))
}

impl CsvRecord for TrajectoryRow {
    fn header() -> &'static [&'static str] {
        &[
            "replica",
            "steps",
            "l1_initial",
            "l1_final",
            "winding_initial",
            "winding_final",
            "crossings",
            "last_crossing_step",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.replica.to_string(),
            self.steps.to_string(),
            num(self.first.l1_lyapunov),
            num(self.last.l1_lyapunov),
            winding_text(&self.first),
            winding_text(&self.last),
            opt(self.crossings),
            opt(self.last_crossing_step),
        ]
    }
}

fn trajectories(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Summary> {
    let results = map_replicas(cfg.replicas, |r| -> Result<Trajectory> {
        let mut state = start_state(cfg, r)?;
        if cfg.scenario.is_ring() {
            state = state.with_event_log(EventLog::unbounded().crossings_only());
        }
        let mut series = TimeSeries::default();
        run(
            &mut state,
            cfg.horizon,
            cfg.sample_stride,
            &mut [&mut series],
        )?;
        Ok(Trajectory {
            samples: series.samples,
            steps: state.step_count(),
            log: state.take_event_log(),
        })
    })?;

    let mut rows = Vec::with_capacity(results.len());
    for (r, t) in results.iter().enumerate() {
        let r = r as u64;
        out.csv(&replica_file("timeseries", r), &t.samples)?;
        let stats = t.log.as_ref().map(crossing_statistics);
        if let (Some(log), Some(stats)) = (&t.log, &stats) {
            let crossings: Vec<_> = log.iter().filter(|e| e.winding_jump() != 0).collect();
            out.csv(&replica_file("crossings", r), crossings)?;
            let w0 = t.samples[0].winding.expect("ring sample");
            let mut trace = vec![WindingChange {
                step: 0,
                winding: w0,
            }];
            trace.extend(stats.trace_rows().into_iter().skip(1));
            out.csv(&replica_file("winding_trace", r), &trace)?;
        }
        rows.push(TrajectoryRow {
            replica: r,
            steps: t.steps,
            first: t.samples[0].clone(),
            last: t.samples.last().expect("final sample").clone(),
            crossings: stats.as_ref().map(|s| s.crossing_count),
            last_crossing_step: stats.as_ref().and_then(|s| s.last_crossing_step),
        });
    }
    out.csv("summary.csv", &rows)?;

    let max_l1 = rows.iter().map(|r| r.last.l1_lyapunov).fold(0.0, f64::max);
    let mut summary = vec![
        ("replicas".into(), cfg.replicas.to_string()),
        ("steps".into(), cfg.horizon.to_string()),
        ("max final l1".into(), num(max_l1)),
    ];
    if cfg.scenario.is_ring() {
        let finals: Vec<String> = rows.iter().map(|r| winding_text(&r.last)).collect();
        summary.push(("final windings".into(), finals.join(" ")));
    }
    Ok(summary)
}

#[derive(Serialize)]
struct CrossingSummary {
    n: usize,
    edges_per_replica: usize,
    replicas: u64,
    mean: f64,
    standard_error: f64,
    reference: f64,
    z_score: f64,
    within_tolerance: bool,
}

fn crossing(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Summary> {
    let res = crossing_probability_mc(
        cfg.n,
        cfg.edges_per_replica,
        cfg.replicas as usize,
        cfg.seed,
    )?;
    out.csv("replicas.csv", &res.rows())?;
    let z_max = cfg.tolerances().crossing_z;
    let s = CrossingSummary {
        n: cfg.n,
        edges_per_replica: cfg.edges_per_replica,
        replicas: cfg.replicas,
        mean: res.mean,
        standard_error: res.standard_error,
        reference: res.reference,
        z_score: res.z_score(),
        within_tolerance: res.within(z_max),
    };
    out.json("summary.json", &s)?;
    Ok(vec![
        ("no-crossing mean".into(), format!("{:.6}", s.mean)),
        ("standard error".into(), format!("{:.6}", s.standard_error)),
        ("reference 37/48".into(), format!("{:.6}", s.reference)),
        ("z".into(), format!("{:.3} (limit {z_max})", s.z_score)),
    ])
}

fn sweep(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Summary> {
    let report = escape_scenario(cfg.n, cfg.winding, cfg.sweeps, cfg.horizon, cfg.seed)?;
    out.csv("sweeps.csv", &report.rows)?;
    let trace: Vec<WindingChange> = report
        .replay
        .winding_trace
        .iter()
        .map(|&(step, winding)| WindingChange { step, winding })
        .collect();
    out.csv("winding_trace.csv", &trace)?;
    out.csv("escape.csv", [&report.summary()])?;
    let text = |v: Option<u64>| v.map_or("none".to_string(), |x| x.to_string());
    Ok(vec![
        (
            "predicted escape sweep".into(),
            text(report.predicted_sweep),
        ),
        (
            "first wrapped crossing step".into(),
            text(report.replay.first_crossing_step),
        ),
        ("replay steps".into(), report.replay.steps.to_string()),
        (
            "final winding".into(),
            report.replay.final_winding.to_string(),
        ),
    ])
}

#[derive(Serialize)]
struct FrameSummary {
    replica: u64,
    winding: i64,
    beta: f64,
    alpha_star: f64,
    updates: u64,
    checkpoints: u64,
    max_lift_projection_error: f64,
    max_lift_increment_error: f64,
    max_lift_closing_error: f64,
    max_zeta_midpoint_error: f64,
    max_variance_identity_error: f64,
    max_variance_increase: f64,
    max_diameter_increase: f64,
    max_zeta_mean_drift: f64,
    max_abs_compensator_sum: f64,
    max_s_l2_per_site: f64,
    s_l2_bound: f64,
    final_d_tilde: f64,
}

fn compensator(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Summary> {
    let tol = cfg.tolerances();
    let frames = map_replicas(cfg.replicas, |r| -> Result<ComovingFrame> {
        let mut state = start_state(cfg, r)?;
        let mut frame = ComovingFrame::new(state.config())?
            .with_resync_interval(tol.resync_interval)
            .audited();
        run(
            &mut state,
            cfg.horizon,
            cfg.sample_stride,
            &mut [&mut frame],
        )?;
        Ok(frame)
    })?;

    let mut lines = Vec::new();
    let mut summaries = Vec::new();
    for (r, frame) in frames.iter().enumerate() {
        let r = r as u64;
        out.csv(&replica_file("frame", r), frame.samples())?;
        let audit: &FrameAudit = frame.audit().expect("audited frame");
        let w = frame.winding();
        let s = FrameSummary {
            replica: r,
            winding: w,
            beta: frame.beta(),
            alpha_star: frame.alpha_star(),
            updates: audit.updates,
            checkpoints: audit.checkpoints,
            max_lift_projection_error: audit.lift_errors.projection,
            max_lift_increment_error: audit.lift_errors.increment,
            max_lift_closing_error: audit.lift_errors.closing,
            max_zeta_midpoint_error: audit.midpoint_error,
            max_variance_identity_error: audit.variance_identity_error,
            max_variance_increase: audit.variance_increase,
            max_diameter_increase: audit.diameter_increase,
            max_zeta_mean_drift: audit.mean_drift,
            max_abs_compensator_sum: audit.compensator_sum,
            max_s_l2_per_site: audit.max_s_l2_per_site,
            s_l2_bound: (TAU * w as f64).powi(2),
            final_d_tilde: frame.samples().last().map_or(f64::NAN, |s| s.d_tilde),
        };
        ensure!(
            s.max_s_l2_per_site <= s.s_l2_bound || w == 0,
            "replica {r}: per-site compensator L2 {} exceeds {}",
            s.max_s_l2_per_site,
            s.s_l2_bound
        );
        lines.push((
            format!("replica {r}"),
            format!(
                "W={w} final D~={:.3e} max (1/N)|s|^2={:.4} max identity error={:.2e}",
                s.final_d_tilde, s.max_s_l2_per_site, s.max_variance_identity_error
            ),
        ));
        summaries.push(s);
    }
    out.json("summary.json", &summaries)?;
    Ok(lines)
}
