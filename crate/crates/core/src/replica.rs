//! Independent replicas on the rayon pool.

use rayon::prelude::*;

use crate::error::Result;

/// Runs `f(r)` for `r in 0..replicas` in parallel and returns the results
/// in replica order. The first error, by replica index, wins.
pub fn map_replicas<T, E, F>(replicas: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    (0..replicas).into_par_iter().map(f).collect()
}
