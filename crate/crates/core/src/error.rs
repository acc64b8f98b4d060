use thiserror::Error;

/// Errors raised by the dynamics and its diagnostics.
///
/// Edge and vertex indices carried by these variants are 1-based, matching
/// the event logs and CSV output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("a {kind} needs at least {min} vertices, got {n}")]
    TooFewVertices {
        kind: &'static str,
        n: usize,
        min: usize,
    },

    #[error("angle {value} at vertex {vertex} is outside [-pi, pi)")]
    AngleOutOfRange { vertex: usize, value: f64 },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("edge {edge} out of range (1..={edges})")]
    EdgeOutOfRange { edge: usize, edges: usize },

    #[error("operation requires ring topology")]
    RequiresRing,

    #[error("winding {raw} is not an integer within {tolerance}")]
    Integrality { raw: f64, tolerance: f64 },

    #[error("edge {edge} is antipodal but no midpoint choice was supplied")]
    AntipodalWithoutChoice { edge: usize },

    #[error("corridor sum {0} lies outside [-3pi/2, 3pi/2)")]
    CrossingDomain(f64),

    #[error("step {step}: winding went {before} -> {after}, expected jump {expected}")]
    WindingJump {
        step: u64,
        before: i64,
        after: i64,
        expected: i64,
    },

    #[error("step {step}: L1 Lyapunov functional rose from {before} to {after}")]
    LyapunovIncrease { step: u64, before: f64, after: f64 },

    #[error("step {step}: edge {edge} left the winding sector (m- = {m_minus}, m+ = {m_plus}, antipodal = {antipodal})")]
    SectorViolation {
        step: u64,
        edge: usize,
        m_minus: i8,
        m_plus: i8,
        antipodal: bool,
    },

    #[error("lift invariant `{invariant}` violated at site {site}: error {error:e}")]
    LiftInvariant {
        invariant: &'static str,
        site: usize,
        error: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
