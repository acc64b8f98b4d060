//! Fixtures shared by the benchmarks.

use acca_core::init::{iid_uniform, perfect_twist};
use acca_core::{RandomStream, SimState, Topology, WindingCheck};

/// Ring trajectory from iid uniform angles with the per-step checks
/// disabled, as a release run would use.
pub fn random_ring(n: usize, seed: u64) -> SimState {
    let topo = Topology::ring(n).expect("ring size");
    let cfg = iid_uniform(topo, &mut RandomStream::new(seed, 0)).expect("valid angles");
    SimState::new(cfg, RandomStream::new(seed, 1))
        .expect("ring state")
        .with_winding_check(WindingCheck::Off)
        .with_lyapunov_check(false)
}

/// Noisy twist of winding `w` on `n` vertices.
pub fn twisted_ring(n: usize, w: i64, seed: u64) -> SimState {
    let topo = Topology::ring(n).expect("ring size");
    let mut stream = RandomStream::new(seed, 0);
    let cfg = perfect_twist(topo, w, 0.05, &mut stream).expect("valid twist");
    SimState::new(cfg, RandomStream::new(seed, 1))
        .expect("ring state")
        .with_winding_check(WindingCheck::Off)
        .with_lyapunov_check(false)
}
