//! Wrapped arithmetic on the circle `[-pi, pi)`.
//!
//! Vertices and edges are indexed from 0 in code. Edge `e` joins vertex `e`
//! to vertex `e + 1`; on a ring the closing edge `n - 1` joins vertex `n - 1`
//! back to vertex 0. Logs and CSV output add 1 to both.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative integrality tolerance for ring winding numbers; the
/// absolute tolerance is this times `n`.
pub const INTEGRALITY_TOLERANCE_PER_VERTEX: f64 = 1e-9;

/// Maps any finite real to its representative in `[-pi, pi)`.
///
/// Uses the true floor so that `wrap(pi) == -pi` and negative inputs land on
/// the right branch. The two correction branches absorb the case where
/// `(a + pi) / 2pi` rounds across an integer.
#[inline]
pub fn wrap(a: f64) -> f64 {
    debug_assert!(a.is_finite(), "wrap of non-finite {a}");
    let mut r = a - TAU * ((a + PI) / TAU).floor();
    if r >= PI {
        r -= TAU;
    } else if r < -PI {
        r += TAU;
    }
    r
}

/// `true` when `x` lies in the open interval `(-pi, pi)`.
///
/// This is the no-crossing predicate; `wrap` itself uses the half-open range
/// and the two are deliberately kept apart.
#[inline]
pub fn in_open_principal(x: f64) -> bool {
    x > -PI && x < PI
}

/// Shortest distance between two points on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// An angle in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Checked wrap: rejects non-finite input.
pub fn wrap_pi(a: f64) -> Result<Angle> {
    if !a.is_finite() {
        return Err(Error::NonFinite(a));
    }
    Ok(Angle(wrap(a)))
}

/// `1 + ((i - 1) mod n)`: maps any integer onto the 1-based vertex range.
///
/// # Panics
/// If `n < 2`.
pub fn index_mod(i: i64, n: usize) -> usize {
    assert!(n >= 2, "index_mod needs n >= 2");
    1 + (i - 1).rem_euclid(n as i64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Path graph: edges `(i, i+1)` for `i < n - 1`.
    OpenPath,
    /// Cycle graph: the path plus the closing edge `(n-1, 0)`.
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    boundary: Boundary,
    n: usize,
}

impl Topology {
    pub fn new(boundary: Boundary, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices {
                kind: "graph",
                n,
                min: 2,
            });
        }
        Ok(Topology { boundary, n })
    }

    pub fn ring(n: usize) -> Result<Self> {
        Self::new(Boundary::Ring, n)
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(Boundary::OpenPath, n)
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_ring(&self) -> bool {
        self.boundary == Boundary::Ring
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        match self.boundary {
            Boundary::OpenPath => self.n - 1,
            Boundary::Ring => self.n,
        }
    }

    pub fn check_edge(&self, edge: usize) -> Result<()> {
        if edge < self.edge_count() {
            Ok(())
        } else {
            Err(Error::EdgeOutOfRange {
                edge: edge + 1,
                edges: self.edge_count(),
            })
        }
    }

    /// Head vertex of `edge`, wrapping to 0 on the closing edge.
    #[inline]
    pub fn head(&self, edge: usize) -> usize {
        if edge + 1 == self.n {
            0
        } else {
            edge + 1
        }
    }

    /// Edge preceding `edge`, if it exists.
    #[inline]
    pub fn prev_edge(&self, edge: usize) -> Option<usize> {
        match (self.boundary, edge) {
            (Boundary::Ring, 0) => Some(self.n - 1),
            (_, 0) => None,
            (_, e) => Some(e - 1),
        }
    }

    /// Edge following `edge`, if it exists.
    #[inline]
    pub fn next_edge(&self, edge: usize) -> Option<usize> {
        let m = self.edge_count();
        match self.boundary {
            Boundary::Ring => Some(if edge + 1 == m { 0 } else { edge + 1 }),
            Boundary::OpenPath => (edge + 1 < m).then_some(edge + 1),
        }
    }
}

/// Angles `theta(0..n)` on a path or ring, each in `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    topology: Topology,
    angles: Vec<f64>,
}

impl Configuration {
    /// Validates that every angle is already wrapped.
    pub fn new(topology: Topology, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != topology.n() {
            return Err(Error::LengthMismatch {
                expected: topology.n(),
                actual: angles.len(),
            });
        }
        for (i, &a) in angles.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFinite(a));
            }
            if !(-PI..PI).contains(&a) {
                return Err(Error::AngleOutOfRange {
                    vertex: i + 1,
                    value: a,
                });
            }
        }
        Ok(Configuration { topology, angles })
    }

    /// Wraps arbitrary finite reals into a configuration.
    pub fn from_unwrapped(topology: Topology, values: &[f64]) -> Result<Self> {
        let angles = values
            .iter()
            .map(|&v| wrap_pi(v).map(f64::from))
            .collect::<Result<Vec<_>>>()?;
        Self::new(topology, angles)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, vertex: usize) -> f64 {
        self.angles[vertex]
    }

    /// Sets both endpoints of `edge` to the same wrapped value.
    pub(crate) fn set_edge_pair(&mut self, edge: usize, value: f64) {
        debug_assert!((-PI..PI).contains(&value));
        let head = self.topology.head(edge);
        self.angles[edge] = value;
        self.angles[head] = value;
    }

    /// Unchecked `wrap(theta(head) - theta(tail))`.
    #[inline]
    pub(crate) fn delta(&self, edge: usize) -> f64 {
        wrap(self.angles[self.topology.head(edge)] - self.angles[edge])
    }

    /// Shortest signed difference across `edge`.
    pub fn wrapped_increment(&self, edge: usize) -> Result<Angle> {
        self.topology.check_edge(edge)?;
        Ok(Angle(self.delta(edge)))
    }

    pub fn increment_field(&self) -> IncrementField {
        let deltas = (0..self.topology.edge_count())
            .map(|e| self.delta(e))
            .collect();
        IncrementField {
            topology: self.topology,
            deltas,
        }
    }
}

/// Per-edge increments in orientation order.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementField {
    topology: Topology,
    deltas: Vec<f64>,
}

impl IncrementField {
    /// Builds a field from raw values, which may lie outside `[-pi, pi)`.
    pub fn new(topology: Topology, deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() != topology.edge_count() {
            return Err(Error::LengthMismatch {
                expected: topology.edge_count(),
                actual: deltas.len(),
            });
        }
        Ok(IncrementField { topology, deltas })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn total_increment(&self) -> f64 {
        total_increment(self)
    }

    pub fn winding_number(&self) -> Result<Winding> {
        winding_number(self)
    }
}

pub fn total_increment(field: &IncrementField) -> f64 {
    field.deltas.iter().sum()
}

/// Winding number: the raw `m / 2pi` and, on the ring, its integer value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub raw: f64,
    pub integer: Option<i64>,
}

pub fn winding_number(field: &IncrementField) -> Result<Winding> {
    let tol = INTEGRALITY_TOLERANCE_PER_VERTEX * field.topology.n() as f64;
    winding_number_with_tolerance(field, tol)
}

/// As [`winding_number`] with an explicit absolute integrality tolerance.
pub fn winding_number_with_tolerance(field: &IncrementField, tolerance: f64) -> Result<Winding> {
    let raw = total_increment(field) / TAU;
    if !field.topology.is_ring() {
        return Ok(Winding { raw, integer: None });
    }
    let rounded = raw.round();
    if (raw - rounded).abs() > tolerance {
        return Err(Error::Integrality { raw, tolerance });
    }
    Ok(Winding {
        raw,
        integer: Some(rounded as i64),
    })
}

/// Integer winding of a ring configuration.
pub fn ring_winding(cfg: &Configuration) -> Result<i64> {
    if !cfg.topology().is_ring() {
        return Err(Error::RequiresRing);
    }
    Ok(winding_number(&cfg.increment_field())?
        .integer
        .expect("ring winding is integral"))
}
