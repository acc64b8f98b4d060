//! First-update branch-crossing probability: closed forms and Monte Carlo.

use std::f64::consts::PI;

use crate::circle::Topology;
use crate::dynamics::s_corridor;
use crate::error::{Error, Result};
use crate::init::iid_uniform;
use crate::replica::map_replicas;
use crate::rng::RandomStream;
use crate::table::{num, CsvRecord};

/// Probability that the first update on iid uniform data crosses a branch.
pub const FIRST_CROSSING_PROBABILITY: f64 = 11.0 / 48.0;

/// Its complement, the no-crossing probability.
pub const NO_CROSSING_PROBABILITY: f64 = 37.0 / 48.0;

/// `P(no crossing | Y = y) = (1 - |y| / 4 pi)^2` for `y` in `[-pi, pi]`.
pub fn no_crossing_prob_given_y(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::NonFinite(y));
    }
    if y.abs() > PI {
        return Err(Error::InvalidParameter(format!(
            "y = {y} outside [-pi, pi]"
        )));
    }
    let q = 1.0 - y.abs() / (4.0 * PI);
    Ok(q * q)
}

/// Density of the difference of two independent uniforms on `[-pi, pi)`.
pub fn triangular_difference_density(w: f64) -> f64 {
    if w.abs() < 2.0 * PI {
        (2.0 * PI - w.abs()) / (4.0 * PI * PI)
    } else {
        0.0
    }
}

/// Pooled outcome of [`crossing_probability_mc`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingMcResult {
    /// Per-replica fraction of sampled edges whose first update would not
    /// cross, in replica order.
    pub fractions: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of the fractions over `sqrt(replicas)`.
    pub standard_error: f64,
    pub reference: f64,
}

impl CrossingMcResult {
    /// `|mean - reference| / standard_error`.
    pub fn z_score(&self) -> f64 {
        let d = (self.mean - self.reference).abs();
        if self.standard_error > 0.0 {
            d / self.standard_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, standard_errors: f64) -> bool {
        self.z_score() <= standard_errors
    }

    pub fn rows(&self) -> Vec<ReplicaFraction> {
        self.fractions
            .iter()
            .enumerate()
            .map(|(replica, &fraction)| ReplicaFraction {
                replica: replica as u64,
                fraction,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicaFraction {
    pub replica: u64,
    pub fraction: f64,
}

impl CsvRecord for ReplicaFraction {
    fn header() -> &'static [&'static str] {
        &["replica", "no_crossing_fraction"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.replica.to_string(), num(self.fraction)]
    }
}

/// No-crossing fraction for one replica driven by `stream`.
///
/// Draws `n` uniform ring angles, then `edges` distinct edges, and counts
/// those whose corridor sums both stay in `(-pi, pi)`.
pub fn replica_no_crossing_fraction(
    n: usize,
    edges: usize,
    stream: &mut RandomStream,
) -> Result<f64> {
    let cfg = iid_uniform(Topology::ring(n)?, stream)?;
    let picked = rand::seq::index::sample(stream.rng_mut(), n, edges);
    let mut clear = 0usize;
    for e in picked.iter() {
        if s_corridor(&cfg, e)?.is_clear() {
            clear += 1;
        }
    }
    Ok(clear as f64 / edges as f64)
}

/// Monte Carlo estimate of the first-update no-crossing probability.
///
/// Replica `r` uses substream `r` of `seed`, so results do not depend on the
/// thread pool.
pub fn crossing_probability_mc(
    n: usize,
    edges: usize,
    replicas: usize,
    seed: u64,
) -> Result<CrossingMcResult> {
    if n < 3 {
        return Err(Error::TooFewVertices {
            kind: "crossing ring",
            n,
            min: 3,
        });
    }
    if edges == 0 || edges > n {
        return Err(Error::InvalidParameter(format!(
            "edges per replica must be in 1..={n}, got {edges}"
        )));
    }
    if replicas == 0 {
        return Err(Error::InvalidParameter(
            "replicas must be at least 1".into(),
        ));
    }
    let fractions = map_replicas(replicas as u64, |r| {
        replica_no_crossing_fraction(n, edges, &mut RandomStream::new(seed, r))
    })?;

    let count = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / count;
    let standard_error = if fractions.len() > 1 {
        let var = fractions
            .iter()
            .map(|f| (f - mean) * (f - mean))
            .sum::<f64>()
            / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(CrossingMcResult {
        fractions,
        mean,
        standard_error,
        reference: NO_CROSSING_PROBABILITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn conditional_examples() {
        assert_eq!(no_crossing_prob_given_y(0.0), Ok(1.0));
        let at_pi = no_crossing_prob_given_y(PI).unwrap();
        assert!((at_pi - 9.0 / 16.0).abs() < 1e-15);
        assert!(no_crossing_prob_given_y(3.5).is_err());
        assert!(no_crossing_prob_given_y(f64::NAN).is_err());
        let avg = simpson(
            |y| no_crossing_prob_given_y(y).unwrap() / (2.0 * PI),
            -PI,
            PI,
            2000,
        );
        assert!((avg - 37.0 / 48.0).abs() < 1e-9);
        assert!((FIRST_CROSSING_PROBABILITY + NO_CROSSING_PROBABILITY - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangular_examples() {
        assert!((triangular_difference_density(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(triangular_difference_density(2.0 * PI), 0.0);
        assert_eq!(triangular_difference_density(-2.0 * PI), 0.0);
        let total = simpson(triangular_difference_density, -2.0 * PI, 2.0 * PI, 4000);
        assert!((total - 1.0).abs() < 1e-9);
        for i in 0..50 {
            let y = -PI + i as f64 * (2.0 * PI / 50.0);
            let wrapped: f64 = [-1.0, 0.0, 1.0]
                .iter()
                .map(|m| triangular_difference_density(y + 2.0 * PI * m))
                .sum();
            assert!((wrapped - 1.0 / (2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn single_replica_is_reproducible() {
        let a = crossing_probability_mc(50, 1, 1, 99).unwrap();
        let b = crossing_probability_mc(50, 1, 1, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.fractions[0] == 0.0 || a.fractions[0] == 1.0);
        assert_eq!(a.standard_error, 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(crossing_probability_mc(2, 1, 1, 0).is_err());
        assert!(crossing_probability_mc(10, 11, 1, 0).is_err());
        assert!(crossing_probability_mc(10, 0, 1, 0).is_err());
        assert!(crossing_probability_mc(10, 5, 0, 0).is_err());
    }

    #[test]
    fn small_run_near_reference() {
        let r = crossing_probability_mc(500, 50, 200, 7).unwrap();
        assert!(r.fractions.iter().all(|f| (0.0..=1.0).contains(f)));
        assert!(r.within(4.0), "mean {} se {}", r.mean, r.standard_error);
    }
}
