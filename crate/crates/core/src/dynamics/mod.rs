//! Survival probabilities: exact lattice propagation, spectral (branch-cut)
//! integration, the Bessel-integral form near an EP2A, and analytic
//! approximants.

mod approximants;
mod bessel;
mod lattice;
pub mod quad;
mod spectral;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eppoints::EpRecord;
use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};

pub use approximants::{evaluate_approximant, ApproximantForm};
pub use bessel::{bessel_amplitude, bessel_j1, bessel_survival_amplitude};
pub use lattice::{lattice_survival, required_sites, LatticePropagator, REFLECTION_MARGIN};
pub use spectral::{spectral_survival, SpectralPropagator, REAL_AXIS_MAX_T};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lattice,
    Spectral,
    Bessel,
    Approximant(String),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Lattice => f.write_str("lattice"),
            Method::Spectral => f.write_str("spectral"),
            Method::Bessel => f.write_str("bessel"),
            Method::Approximant(name) => f.write_str(name),
        }
    }
}

/// `P(t)` on an increasing time grid (units of `1/J`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub model: ModelSpec,
    /// Named scalars produced along the way, e.g. fitted anchor constants.
    pub metadata: Vec<(String, f64)>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, method: Method, model: ModelSpec) -> Self {
        Self { times, values, method, model, metadata: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Sub-series with `t_min <= t <= t_max`.
    pub fn window(&self, t_min: f64, t_max: f64) -> TimeSeries {
        let (times, values) = self.iter().filter(|&(t, _)| t >= t_min && t <= t_max).unzip();
        TimeSeries { times, values, method: self.method.clone(), model: self.model, metadata: self.metadata.clone() }
    }

    pub fn meta(&self, key: &str) -> Option<f64> {
        self.metadata.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput("time grid must be finite and non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `n` equally spaced points from `t0` to `t1` inclusive.
pub fn linear_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Log-spaced grid from `t0 > 0` to `t1` with at least 20 points per decade.
pub fn log_grid(t0: f64, t1: f64, per_decade: usize) -> Vec<f64> {
    let per_decade = per_decade.max(20);
    let decades = (t1 / t0).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    let mut out: Vec<f64> = (0..n).map(|i| t0 * 10f64.powf(decades * i as f64 / (n - 1) as f64)).collect();
    out[n - 1] = t1;
    out
}

/// Zeno and exceptional-point time scales of a model near `ep`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timescales {
    pub t_zeno: f64,
    pub t_ep: f64,
    /// `t_ep < t_zeno` taken literally.
    pub ep_before_zeno: bool,
    /// The intermediate fractional-power window `[t_zeno, t_ep]` spans less
    /// than one decade.
    pub squeezed: bool,
}

/// Ratio `t_ep / t_zeno` below which the intermediate window is considered squeezed out.
pub const SQUEEZE_RATIO: f64 = 10.0;

pub fn timescales(model: &ModelSpec, ep: &EpRecord) -> Timescales {
    let t_zeno = match model.family {
        Family::Qubit => 1.0 / (2.0_f64.sqrt() * model.v.abs()),
        Family::EndDot | Family::SideDot => 1.0 / model.eps_d.abs(),
    };
    let t_ep = ep.time_scale();
    Timescales { t_zeno, t_ep, ep_before_zeno: t_ep < t_zeno, squeezed: t_ep < SQUEEZE_RATIO * t_zeno }
}
