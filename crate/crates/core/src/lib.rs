//! Asynchronous short-arc midpoint gossip on circle-valued paths and rings.
//!
//! Each step picks one edge and moves both endpoints to the midpoint of the
//! shorter arc between them. On a ring the winding number of the
//! configuration changes only at branch-crossing updates; this crate
//! simulates the process and tracks the quantities that control it: the
//! winding number, the L1 increment functional, the lifted and detrended
//! frame of a fixed winding sector, and the deterministic sweep that
//! transports winding onto the closing edge.

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod circle;
pub mod crossing;
pub mod dynamics;
pub mod error;
pub mod init;
pub mod lift;
pub mod observables;
pub mod replica;
pub mod rng;
pub mod sweep;
pub mod table;

pub use circle::{
    circular_distance, ring_winding, total_increment, winding_number, wrap, wrap_pi, Angle,
    Boundary, Configuration, IncrementField, Topology, Winding,
};
pub use crossing::{crossing_probability_mc, CrossingMcResult};
pub use dynamics::{
    crossing_integer, midpoint_update, run, s_corridor, stopping_status, Corridor, EdgeSchedule,
    EventLog, MidpointChoice, Observer, SimState, Stride, UpdateEvent, WindingCheck,
};
pub use error::{Error, Result};
pub use init::InitialCondition;
pub use lift::{ComovingFrame, Compensator, DetrendedProfile, FrameSample, LiftedProfile};
pub use observables::{ObservableSample, TimeSeries};
pub use rng::RandomStream;
pub use sweep::{escape_scenario, EscapeReport, LinearIncrementState, SweepRow};
pub use table::{write_csv, CsvRecord};
