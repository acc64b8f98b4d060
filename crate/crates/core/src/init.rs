//! Initial-condition generators.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::circle::{wrap, Configuration, Topology};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// How to build `theta_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// Independent uniform angles.
    IidUniform,
    /// `theta(i) = wrap(2 pi w (i-1)/n + U(-noise, noise))`.
    PerfectTwist {
        winding: i64,
        #[serde(default)]
        noise: f64,
    },
    /// Every vertex at `alpha`.
    Consensus {
        #[serde(default)]
        alpha: f64,
    },
    /// Explicit angles, wrapped on load.
    Explicit { angles: Vec<f64> },
    /// Angles read from a text file; see [`parse_angles`].
    File { path: PathBuf },
}

impl InitialCondition {
    pub fn build(&self, topology: Topology, stream: &mut RandomStream) -> Result<Configuration> {
        match self {
            InitialCondition::IidUniform => iid_uniform(topology, stream),
            InitialCondition::PerfectTwist { winding, noise } => {
                perfect_twist(topology, *winding, *noise, stream)
            }
            InitialCondition::Consensus { alpha } => consensus(topology, *alpha),
            InitialCondition::Explicit { angles } => {
                Configuration::from_unwrapped(topology, angles)
            }
            InitialCondition::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidParameter(format!("reading {}: {e}", path.display()))
                })?;
                Configuration::from_unwrapped(topology, &parse_angles(&text)?)
            }
        }
    }
}

pub fn iid_uniform(topology: Topology, stream: &mut RandomStream) -> Result<Configuration> {
    let angles = (0..topology.n()).map(|_| stream.uniform_angle()).collect();
    Configuration::new(topology, angles)
}

/// Twisted profile of winding `w`, optionally jittered. With `noise == 0`
/// the stream is not touched.
pub fn perfect_twist(
    topology: Topology,
    w: i64,
    noise: f64,
    stream: &mut RandomStream,
) -> Result<Configuration> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!("twist noise {noise}")));
    }
    let n = topology.n() as f64;
    let angles = (0..topology.n())
        .map(|i| {
            let base = TAU * w as f64 * i as f64 / n;
            let jitter = if noise > 0.0 {
                stream.uniform(-noise, noise)
            } else {
                0.0
            };
            wrap(base + jitter)
        })
        .collect();
    Configuration::new(topology, angles)
}

pub fn consensus(topology: Topology, alpha: f64) -> Result<Configuration> {
    Configuration::from_unwrapped(topology, &vec![alpha; topology.n()])
}

/// Parses a whitespace-, comma- or newline-separated list of reals.
/// Lines starting with `#` are skipped.
pub fn parse_angles(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| Error::InvalidParameter(format!("angle `{tok}`: {e}")))
        })
        .collect()
}
