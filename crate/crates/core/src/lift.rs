//! Universal-cover representation of ring trajectories.
//!
//! While the winding number is frozen, the lifted profile `eta` evolves by
//! plain arithmetic midpoints. Subtracting the linear trend `beta (i-1)` and
//! the compensator `s` leaves the detrended field `zeta`, which performs
//! exact Euclidean midpoint averaging and contracts to a constant.
//!
//! All vectors here are 0-based: `eta[0..=n]` has `n + 1` entries, with
//! `eta[n]` the copy of vertex 0 after one turn around the ring.

use std::f64::consts::TAU;

use crate::circle::{circular_distance, ring_winding, wrap, Configuration, IncrementField};
use crate::dynamics::{Observer, SimState, UpdateEvent};
use crate::error::{Error, Result};
use crate::table::{num, CsvRecord};

/// Tolerance for the projection and closing checks at resync points.
pub const LIFT_TOLERANCE: f64 = 1e-9;

/// Tolerance for the increment relation `eta[i+1] - eta[i] = delta[i]`.
pub const INCREMENT_TOLERANCE: f64 = 1e-10;

/// Default number of updates between lift rebuilds.
pub const DEFAULT_RESYNC_INTERVAL: u64 = 1 << 16;

fn sector_check(event: &UpdateEvent) -> Result<()> {
    if event.is_crossing() || event.antipodal {
        return Err(Error::SectorViolation {
            step: event.step,
            edge: event.edge + 1,
            m_minus: event.m_minus,
            m_plus: event.m_plus,
            antipodal: event.antipodal,
        });
    }
    Ok(())
}

/// A lift `eta` of a ring configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedProfile {
    values: Vec<f64>,
    winding: i64,
}

/// Worst deviations found by [`LiftedProfile::check`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LiftErrors {
    pub projection: f64,
    pub increment: f64,
    pub closing: f64,
}

impl LiftErrors {
    pub fn max(self, other: LiftErrors) -> LiftErrors {
        LiftErrors {
            projection: self.projection.max(other.projection),
            increment: self.increment.max(other.increment),
            closing: self.closing.max(other.closing),
        }
    }
}

impl LiftedProfile {
    /// `eta[0] = theta[0]`, then accumulate wrapped increments.
    pub fn initial(cfg: &Configuration) -> Result<Self> {
        Self::anchored(cfg, cfg.angle(0))
    }

    /// Lift with `eta[0] = start`, which must project onto `theta[0]`.
    fn anchored(cfg: &Configuration, start: f64) -> Result<Self> {
        if !cfg.topology().is_ring() {
            return Err(Error::RequiresRing);
        }
        let winding = ring_winding(cfg)?;
        let mut values = Vec::with_capacity(cfg.n() + 1);
        let mut acc = start;
        values.push(acc);
        for e in 0..cfg.n() {
            acc += cfg.delta(e);
            values.push(acc);
        }
        Ok(LiftedProfile { values, winding })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    /// Applies a no-crossing update: both endpoints take the arithmetic
    /// midpoint of their lifted values; the copy of vertex 0 at the other
    /// end of the cover follows.
    pub fn apply(&mut self, event: &UpdateEvent) -> Result<()> {
        sector_check(event)?;
        let n = self.n();
        let k = event.edge;
        if k >= n {
            return Err(Error::EdgeOutOfRange {
                edge: k + 1,
                edges: n,
            });
        }
        let mid = 0.5 * (self.values[k] + self.values[k + 1]);
        self.values[k] = mid;
        self.values[k + 1] = mid;
        let turn = TAU * self.winding as f64;
        if k == 0 {
            self.values[n] = mid + turn;
        } else if k + 1 == n {
            self.values[0] = mid - turn;
        }
        Ok(())
    }

    /// Measures the projection, increment and closing relations against
    /// `cfg`.
    pub fn errors(&self, cfg: &Configuration) -> LiftErrors {
        let n = self.n();
        let mut out = LiftErrors::default();
        for i in 0..=n {
            let target = cfg.angle(i % n);
            out.projection = out
                .projection
                .max(circular_distance(wrap(self.values[i]), target));
        }
        for e in 0..n {
            let d = self.values[e + 1] - self.values[e] - cfg.delta(e);
            out.increment = out.increment.max(d.abs());
        }
        out.closing = (self.values[n] - self.values[0] - TAU * self.winding as f64).abs();
        out
    }

    pub fn check(&self, cfg: &Configuration) -> Result<LiftErrors> {
        let err = self.errors(cfg);
        let checks = [
            ("projection", err.projection, LIFT_TOLERANCE),
            ("increment", err.increment, INCREMENT_TOLERANCE),
            ("closing", err.closing, LIFT_TOLERANCE),
        ];
        for (invariant, e, tol) in checks {
            if e > tol {
                return Err(Error::LiftInvariant {
                    invariant,
                    site: 0,
                    error: e,
                });
            }
        }
        Ok(err)
    }

    /// Rebuilds from `cfg`, keeping the integer number of turns between
    /// `eta[0]` and `theta[0]`.
    pub fn resync(&mut self, cfg: &Configuration) -> Result<()> {
        let turns = ((self.values[0] - cfg.angle(0)) / TAU).round();
        let rebuilt = Self::anchored(cfg, cfg.angle(0) + TAU * turns)?;
        if rebuilt.winding != self.winding {
            return Err(Error::LiftInvariant {
                invariant: "winding",
                site: 0,
                error: (rebuilt.winding - self.winding) as f64,
            });
        }
        *self = rebuilt;
        Ok(())
    }
}

pub fn initial_lift(cfg: &Configuration) -> Result<LiftedProfile> {
    LiftedProfile::initial(cfg)
}

/// `lift` advanced by one event; the input is left untouched.
pub fn lift_step(lift: &LiftedProfile, event: &UpdateEvent) -> Result<LiftedProfile> {
    let mut out = lift.clone();
    out.apply(event)?;
    Ok(out)
}

/// The zero-sum field absorbing the `+-beta/2` shifts each update exerts on
/// a linear profile of slope `beta = 2 pi W0 / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Compensator {
    values: Vec<f64>,
    beta: f64,
}

impl Compensator {
    /// `s = 0` on a ring of `n` vertices in winding sector `w0`.
    pub fn new(n: usize, w0: i64) -> Self {
        Compensator {
            values: vec![0.0; n],
            beta: TAU * w0 as f64 / n as f64,
        }
    }

    pub fn from_values(values: Vec<f64>, beta: f64) -> Self {
        Compensator { values, beta }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `s[i]` with the periodic extension `s[n] = s[0]`.
    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.values[i % self.values.len()]
    }

    pub fn step(&mut self, edge: usize) -> Result<()> {
        let n = self.n();
        if edge >= n {
            return Err(Error::EdgeOutOfRange {
                edge: edge + 1,
                edges: n,
            });
        }
        let head = (edge + 1) % n;
        let mean = 0.5 * (self.values[edge] + self.values[head]);
        self.values[edge] = mean + 0.5 * self.beta;
        self.values[head] = mean - 0.5 * self.beta;
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }

    /// `(1/N) ||s||^2`.
    pub fn per_site_l2(&self) -> f64 {
        self.norm_sq() / self.n() as f64
    }

    /// `G = sum (s[i] - s[i+1])^2`, cyclic.
    pub fn gradient_energy(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                let d = self.at(i) - self.at(i + 1);
                d * d
            })
            .sum()
    }

    /// Closed-form conditional drift of `||s||^2` under a uniform edge:
    /// `-G/(2N) + beta^2/2`.
    pub fn drift_formula(&self) -> f64 {
        -self.gradient_energy() / (2.0 * self.n() as f64) + 0.5 * self.beta * self.beta
    }
}

pub fn compensator_step(comp: &Compensator, edge: usize) -> Result<Compensator> {
    let mut out = comp.clone();
    out.step(edge)?;
    Ok(out)
}

/// `zeta[i] = eta[i] - beta i - s[i]` for `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetrendedProfile {
    values: Vec<f64>,
    mean: f64,
}

impl DetrendedProfile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean over the `n` physical sites.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    fn sites(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }
}

#[inline]
fn zeta_at(lift: &LiftedProfile, comp: &Compensator, i: usize) -> f64 {
    lift.values[i] - comp.beta * i as f64 - comp.at(i)
}

pub fn detrend(lift: &LiftedProfile, comp: &Compensator) -> Result<DetrendedProfile> {
    if lift.n() != comp.n() {
        return Err(Error::LengthMismatch {
            expected: lift.n(),
            actual: comp.n(),
        });
    }
    let values: Vec<f64> = (0..=lift.n()).map(|i| zeta_at(lift, comp, i)).collect();
    let n = lift.n() as f64;
    let mean = values[..lift.n()].iter().sum::<f64>() / n;
    Ok(DetrendedProfile { values, mean })
}

/// `sum_i (zeta[i] - mean)^2` over the physical sites.
pub fn variance_functional(zeta: &DetrendedProfile) -> f64 {
    zeta.sites()
        .iter()
        .map(|z| (z - zeta.mean) * (z - zeta.mean))
        .sum()
}

pub fn zeta_diameter(zeta: &DetrendedProfile) -> f64 {
    let (lo, hi) = zeta
        .sites()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &z| {
            (lo.min(z), hi.max(z))
        });
    hi - lo
}

/// Mean squared distance of the increments from the co-moving profile
/// `beta + s[i+1] - s[i]`.
pub fn comoving_distance(field: &IncrementField, comp: &Compensator) -> f64 {
    let n = field.deltas().len();
    field
        .deltas()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let r = d - comp.beta - (comp.at(i + 1) - comp.at(i));
            r * r
        })
        .sum::<f64>()
        / n as f64
}

/// `delta[i] = beta + drift + fluctuation` with `drift = s[i+1] - s[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementParts {
    pub beta: f64,
    pub drift: f64,
    pub fluctuation: f64,
}

pub fn decompose_increment(field: &IncrementField, comp: &Compensator) -> Vec<IncrementParts> {
    field
        .deltas()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let drift = comp.at(i + 1) - comp.at(i);
            IncrementParts {
                beta: comp.beta,
                drift,
                fluctuation: d - comp.beta - drift,
            }
        })
        .collect()
}

/// One sampled row of the frame diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSample {
    pub step: u64,
    pub psi_variance: f64,
    pub zeta_diameter: f64,
    pub d_tilde: f64,
    pub s_l2_per_site: f64,
    pub zeta_mean: f64,
}

impl CsvRecord for FrameSample {
    fn header() -> &'static [&'static str] {
        &[
            "step",
            "psi_variance",
            "zeta_diameter",
            "d_tilde",
            "s_l2_per_site",
            "zeta_mean",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.step.to_string(),
            num(self.psi_variance),
            num(self.zeta_diameter),
            num(self.d_tilde),
            num(self.s_l2_per_site),
            num(self.zeta_mean),
        ]
    }
}

/// Worst per-step deviations seen by an audited frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameAudit {
    pub updates: u64,
    /// `|zeta'[k] - (zeta[k] + zeta[k+1])/2|`, both sites.
    pub midpoint_error: f64,
    /// `|(Psi' - Psi) + (zeta[k+1] - zeta[k])^2 / 2|`.
    pub variance_identity_error: f64,
    /// Largest increase of `Psi` between consecutive steps (0 if none).
    pub variance_increase: f64,
    /// Largest increase of the diameter between consecutive steps.
    pub diameter_increase: f64,
    /// Largest `|zeta_mean - zeta_mean_0|`.
    pub mean_drift: f64,
    /// Largest `|sum s|`.
    pub compensator_sum: f64,
    /// Largest `(1/N) ||s||^2`.
    pub max_s_l2_per_site: f64,
    /// Resync checkpoints passed and the worst lift errors at them.
    pub checkpoints: u64,
    pub lift_errors: LiftErrors,
}

/// Lift, compensator and detrended field bound to one ring trajectory.
///
/// Feed it every event of the trajectory (it implements [`Observer`]); it
/// errors as soon as the winding sector is left.
#[derive(Debug, Clone)]
pub struct ComovingFrame {
    lift: LiftedProfile,
    comp: Compensator,
    initial_mean: f64,
    resync_interval: u64,
    since_resync: u64,
    audit: Option<FrameAudit>,
    last_psi: f64,
    last_diameter: f64,
    samples: Vec<FrameSample>,
}

impl ComovingFrame {
    pub fn new(cfg: &Configuration) -> Result<Self> {
        let lift = LiftedProfile::initial(cfg)?;
        let comp = Compensator::new(cfg.n(), lift.winding());
        let zeta = detrend(&lift, &comp)?;
        Ok(ComovingFrame {
            initial_mean: zeta.mean(),
            last_psi: variance_functional(&zeta),
            last_diameter: zeta_diameter(&zeta),
            lift,
            comp,
            resync_interval: DEFAULT_RESYNC_INTERVAL,
            since_resync: 0,
            audit: None,
            samples: Vec::new(),
        })
    }

    pub fn with_resync_interval(mut self, interval: u64) -> Self {
        self.resync_interval = interval.max(1);
        self
    }

    /// Enables the O(N)-per-step exactness audit.
    pub fn audited(mut self) -> Self {
        self.audit = Some(FrameAudit::default());
        self
    }

    pub fn lift(&self) -> &LiftedProfile {
        &self.lift
    }

    pub fn compensator(&self) -> &Compensator {
        &self.comp
    }

    pub fn beta(&self) -> f64 {
        self.comp.beta
    }

    pub fn winding(&self) -> i64 {
        self.lift.winding
    }

    /// Conserved detrended mean, the limit value of `zeta`.
    pub fn alpha_star(&self) -> f64 {
        self.initial_mean
    }

    pub fn detrended(&self) -> DetrendedProfile {
        detrend(&self.lift, &self.comp).expect("frame keeps matching lengths")
    }

    pub fn audit(&self) -> Option<&FrameAudit> {
        self.audit.as_ref()
    }

    pub fn samples(&self) -> &[FrameSample] {
        &self.samples
    }

    pub fn sample(&self, step: u64, cfg: &Configuration) -> FrameSample {
        let zeta = self.detrended();
        FrameSample {
            step,
            psi_variance: variance_functional(&zeta),
            zeta_diameter: zeta_diameter(&zeta),
            d_tilde: comoving_distance(&cfg.increment_field(), &self.comp),
            s_l2_per_site: self.comp.per_site_l2(),
            zeta_mean: zeta.mean(),
        }
    }

    /// Advances lift and compensator by `event`; `cfg` is the configuration
    /// after the event, used for resync checkpoints.
    pub fn apply(&mut self, event: &UpdateEvent, cfg: &Configuration) -> Result<()> {
        let k = event.edge;
        let before = self.audit.is_some().then(|| {
            (
                zeta_at(&self.lift, &self.comp, k),
                zeta_at(&self.lift, &self.comp, k + 1),
            )
        });

        self.lift.apply(event)?;
        self.comp.step(k)?;

        self.since_resync += 1;
        if self.since_resync >= self.resync_interval {
            self.checkpoint(cfg)?;
        }

        if let Some((a, b)) = before {
            let target = 0.5 * (a + b);
            let za = zeta_at(&self.lift, &self.comp, k);
            let zb = zeta_at(&self.lift, &self.comp, k + 1);
            let zeta = self.detrended();
            let psi = variance_functional(&zeta);
            let diameter = zeta_diameter(&zeta);
            let audit = self.audit.as_mut().expect("audit enabled");
            audit.updates += 1;
            audit.midpoint_error = audit
                .midpoint_error
                .max((za - target).abs())
                .max((zb - target).abs());
            let identity = (psi - self.last_psi) + 0.5 * (b - a) * (b - a);
            audit.variance_identity_error = audit.variance_identity_error.max(identity.abs());
            audit.variance_increase = audit.variance_increase.max(psi - self.last_psi);
            audit.diameter_increase = audit.diameter_increase.max(diameter - self.last_diameter);
            audit.mean_drift = audit
                .mean_drift
                .max((zeta.mean() - self.initial_mean).abs());
            audit.compensator_sum = audit.compensator_sum.max(self.comp.sum().abs());
            audit.max_s_l2_per_site = audit.max_s_l2_per_site.max(self.comp.per_site_l2());
            self.last_psi = psi;
            self.last_diameter = diameter;
        }
        Ok(())
    }

    /// Verifies the lift against `cfg` and rebuilds it.
    pub fn checkpoint(&mut self, cfg: &Configuration) -> Result<LiftErrors> {
        let errors = self.lift.check(cfg)?;
        self.lift.resync(cfg)?;
        self.since_resync = 0;
        if let Some(audit) = self.audit.as_mut() {
            audit.checkpoints += 1;
            audit.lift_errors = audit.lift_errors.max(errors);
        }
        Ok(errors)
    }
}

impl Observer for ComovingFrame {
    fn on_step(&mut self, state: &SimState, event: &UpdateEvent) -> Result<()> {
        self.apply(event, state.config())
    }

    fn on_sample(&mut self, state: &SimState) -> Result<()> {
        if self.samples.last().map(|s| s.step) == Some(state.step_count()) {
            return Ok(());
        }
        let sample = self.sample(state.step_count(), state.config());
        self.samples.push(sample);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Topology;
    use crate::dynamics::{midpoint_update, s_corridor};
    use crate::init::{iid_uniform, perfect_twist};
    use crate::rng::RandomStream;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn twist4() -> Configuration {
        Configuration::new(
            Topology::ring(4).unwrap(),
            vec![0.0, FRAC_PI_2, -PI, -FRAC_PI_2],
        )
        .unwrap()
    }

    fn quiet_event(step: u64, edge: usize) -> UpdateEvent {
        UpdateEvent {
            step,
            edge,
            delta_before: 0.0,
            antipodal: false,
            antipodal_choice: None,
            s_minus: Some(0.0),
            s_plus: Some(0.0),
            m_minus: 0,
            m_plus: 0,
            winding_after: None,
        }
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn initial_lift_examples() {
        let consensus = Configuration::new(Topology::ring(5).unwrap(), vec![0.0; 5]).unwrap();
        assert_eq!(initial_lift(&consensus).unwrap().values(), &[0.0; 6]);

        let lift = initial_lift(&twist4()).unwrap();
        assert_close(lift.values(), &[0.0, FRAC_PI_2, PI, 1.5 * PI, TAU], 1e-14);
        assert_eq!(lift.winding(), 1);

        let open = Configuration::new(Topology::path(3).unwrap(), vec![0.0; 3]).unwrap();
        assert_eq!(initial_lift(&open), Err(Error::RequiresRing));
    }

    #[test]
    fn lift_step_examples() {
        let lift = initial_lift(&twist4()).unwrap();
        let after = lift_step(&lift, &quiet_event(0, 0)).unwrap();
        assert!((after.values()[0] - PI / 4.0).abs() < 1e-15);
        assert_eq!(after.values()[0], after.values()[1]);
        // Re-derive from theta' independently.
        let theta1 = midpoint_update(&twist4(), 0, None, 0.0).unwrap();
        let rebuilt = initial_lift(&theta1).unwrap();
        assert_close(after.values(), rebuilt.values(), 1e-12);
        after.check(&theta1).unwrap();

        let closing = lift_step(&lift, &quiet_event(0, 3)).unwrap();
        assert!((closing.values()[3] - 1.75 * PI).abs() < 1e-14);
        assert!((closing.values()[4] - 1.75 * PI).abs() < 1e-14);
        let theta1 = midpoint_update(&twist4(), 3, None, 0.0).unwrap();
        closing.check(&theta1).unwrap();
    }

    #[test]
    fn lift_rejects_crossings() {
        let lift = initial_lift(&twist4()).unwrap();
        let mut ev = quiet_event(7, 2);
        ev.m_plus = -1;
        assert!(matches!(
            lift_step(&lift, &ev),
            Err(Error::SectorViolation {
                step: 7,
                edge: 3,
                ..
            })
        ));
    }

    #[test]
    fn projection_holds_for_random_configurations() {
        let mut s = RandomStream::new(17, 0);
        for n in 3..40 {
            let cfg = iid_uniform(Topology::ring(n).unwrap(), &mut s).unwrap();
            let lift = initial_lift(&cfg).unwrap();
            let err = lift.check(&cfg).unwrap();
            assert!(err.projection < 1e-12);
        }
    }

    #[test]
    fn compensator_examples() {
        let n = 6;
        let mut c = Compensator::new(n, 1);
        let beta = c.beta();
        c.step(2).unwrap();
        assert_eq!(c.values(), &[0.0, 0.0, beta / 2.0, -beta / 2.0, 0.0, 0.0]);

        let c = compensator_step(&Compensator::new(n, 1), n - 1).unwrap();
        assert_eq!(c.values()[n - 1], beta / 2.0);
        assert_eq!(c.values()[0], -beta / 2.0);

        let mut zero = Compensator::new(n, 0);
        let mut s = RandomStream::new(1, 0);
        for _ in 0..1000 {
            zero.step(s.edge(n)).unwrap();
        }
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert!(Compensator::new(n, 0).step(n).is_err());
    }

    #[test]
    fn drift_formula_matches_exhaustive_average() {
        let mut s = RandomStream::new(23, 0);
        for trial in 0..100 {
            let n = 3 + trial % 40;
            let mut vals: Vec<f64> = (0..n).map(|_| s.uniform(-2.0, 2.0)).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            vals.iter_mut().for_each(|v| *v -= mean);
            let comp = Compensator::from_values(vals, s.uniform(-1.0, 1.0));
            let base = comp.norm_sq();
            let avg = (0..n)
                .map(|e| compensator_step(&comp, e).unwrap().norm_sq() - base)
                .sum::<f64>()
                / n as f64;
            assert!((avg - comp.drift_formula()).abs() < 1e-10);
        }
    }

    #[test]
    fn detrend_examples() {
        let n = 8;
        let twist = perfect_twist(
            Topology::ring(n).unwrap(),
            1,
            0.0,
            &mut RandomStream::new(0, 0),
        )
        .unwrap();
        let zeta = detrend(&initial_lift(&twist).unwrap(), &Compensator::new(n, 1)).unwrap();
        assert!(zeta.values().iter().all(|z| z.abs() < 1e-14));

        let flat =
            Configuration::new(Topology::ring(4).unwrap(), vec![0.2, 0.3, 0.1, 0.25]).unwrap();
        let lift = initial_lift(&flat).unwrap();
        let zeta = detrend(&lift, &Compensator::new(4, 0)).unwrap();
        assert_eq!(zeta.values(), lift.values());
        assert_eq!(zeta.values()[0], zeta.values()[4]);
    }

    #[test]
    fn variance_and_diameter_examples() {
        let z = DetrendedProfile {
            values: vec![3.0, 3.0, 3.0, 3.0],
            mean: 3.0,
        };
        assert_eq!(variance_functional(&z), 0.0);
        assert_eq!(zeta_diameter(&z), 0.0);

        let (a, b) = (0.3, -1.1);
        let z = DetrendedProfile {
            values: vec![a, b, a],
            mean: 0.5 * (a + b),
        };
        assert!((variance_functional(&z) - (a - b) * (a - b) / 2.0).abs() < 1e-15);

        let z = DetrendedProfile {
            values: vec![0.0, 1.0, 0.5, 0.0],
            mean: 0.5,
        };
        assert_eq!(zeta_diameter(&z), 1.0);
    }

    #[test]
    fn decomposition_and_comoving_distance() {
        let n = 24;
        let topo = Topology::ring(n).unwrap();
        let mut s = RandomStream::new(5, 0);
        let mut cfg = perfect_twist(topo, 2, 0.1, &mut s).unwrap();
        let mut lift = initial_lift(&cfg).unwrap();
        let mut comp = Compensator::new(n, 2);
        for t in 0..500 {
            let e = s.edge(n);
            assert!(s_corridor(&cfg, e).unwrap().is_clear());
            cfg = midpoint_update(&cfg, e, None, 0.0).unwrap();
            lift.apply(&quiet_event(t, e)).unwrap();
            comp.step(e).unwrap();
        }
        let field = cfg.increment_field();
        let zeta = detrend(&lift, &comp).unwrap();
        let parts = decompose_increment(&field, &comp);
        let mut sq = 0.0;
        for (i, p) in parts.iter().enumerate() {
            let dz = zeta.values()[i + 1] - zeta.values()[i];
            assert!((p.beta + p.drift + p.fluctuation - field.deltas()[i]).abs() < 1e-10);
            assert!((p.fluctuation - dz).abs() < 1e-10);
            sq += dz * dz;
        }
        assert!((comoving_distance(&field, &comp) - sq / n as f64).abs() < 1e-10);

        let twist = perfect_twist(topo, 2, 0.0, &mut s).unwrap();
        assert!(comoving_distance(&twist.increment_field(), &Compensator::new(n, 2)) < 1e-28);
        let p = decompose_increment(&twist.increment_field(), &Compensator::new(n, 2));
        assert!(p
            .iter()
            .all(|p| p.drift == 0.0 && p.fluctuation.abs() < 1e-14));

        let flat = Configuration::new(topo, vec![0.1; 24]).unwrap();
        let p = decompose_increment(&flat.increment_field(), &Compensator::new(n, 0));
        assert!(p
            .iter()
            .all(|p| p.beta == 0.0 && p.drift == 0.0 && p.fluctuation == 0.0));
    }

    #[test]
    fn resync_preserves_offset() {
        let cfg = twist4();
        let mut lift = LiftedProfile::anchored(&cfg, cfg.angle(0) + 2.0 * TAU).unwrap();
        let before = lift.values().to_vec();
        lift.resync(&cfg).unwrap();
        assert_close(lift.values(), &before, 1e-12);
    }

    /// Rebuilds eta from `cfg` with `eta[k] = anchor`, walking increments in
    /// both directions from `k`.
    fn reanchor(cfg: &Configuration, k: usize, anchor: f64) -> Vec<f64> {
        let n = cfg.n();
        let mut eta = vec![0.0; n + 1];
        eta[k] = anchor;
        for i in k + 1..=n {
            eta[i] = eta[i - 1] + cfg.delta(i - 1);
        }
        for i in (0..k).rev() {
            eta[i] = eta[i + 1] - cfg.delta(i);
        }
        eta
    }

    #[test]
    fn local_update_matches_reanchored_rebuild() {
        let ring = Topology::ring(20).unwrap();
        let mut s = RandomStream::new(5, 0);
        let cfg = perfect_twist(ring, 1, 0.1, &mut s).unwrap();
        let mut st = crate::dynamics::SimState::new(cfg, s).unwrap();
        let mut lift = initial_lift(st.config()).unwrap();
        for _ in 0..5000 {
            let ev = st.step().unwrap();
            let k = ev.edge;
            let mid = 0.5 * (lift.values()[k] + lift.values()[k + 1]);
            lift.apply(&ev).unwrap();
            let rebuilt = reanchor(st.config(), k, mid);
            assert_close(lift.values(), &rebuilt, 1e-9);
        }
    }
}
