use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::spectral::SpectralPropagator;
use super::{check_grid, Method, TimeSeries};
use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};

/// Closed-form survival laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ApproximantForm {
    /// `1 - V^2 t^2` (qubit).
    ZenoQ,
    /// `1 - g^2 t^2` (dots).
    ZenoD,
    /// `[1 + D1 t + D2 t^2] e^{-Gamma_B t}` at the qubit EP2B.
    Ep2bIntermediate,
    /// `C t^-3 cos^2(2t + pi/4)`; `C` is matched to the spectral survival at
    /// the maximum of `cos^2` nearest `anchor_time`.
    Ep2bLong { anchor_time: f64 },
    /// `1 - 4 sqrt(2 t D / pi) + 16 t D / pi` with `D = -2 - E_A`.
    Ep2aBandEdge,
    /// `g^4 / (4 pi (1 - sqrt(1 - g^2))^8 t^3)`.
    Ep2aLong,
    /// `64 g^4 / (pi (2 + eps_d - 4 g^2)^4 t^3)` evaluated at the model parameters.
    Ep3aLong,
    /// `1 + sum_i C_i t^{i/2}`.
    Ep3aHalfPower { coefficients: Vec<f64> },
}

impl ApproximantForm {
    pub fn name(&self) -> &'static str {
        match self {
            ApproximantForm::ZenoQ => "ZENO_Q",
            ApproximantForm::ZenoD => "ZENO_D",
            ApproximantForm::Ep2bIntermediate => "EP2B_INTERMEDIATE",
            ApproximantForm::Ep2bLong { .. } => "EP2B_LONG",
            ApproximantForm::Ep2aBandEdge => "EP2A_BANDEDGE",
            ApproximantForm::Ep2aLong => "EP2A_LONG",
            ApproximantForm::Ep3aLong => "EP3A_LONG",
            ApproximantForm::Ep3aHalfPower { .. } => "EP3A_HALFPOWER",
        }
    }

    fn families(&self) -> &'static [Family] {
        match self {
            ApproximantForm::ZenoQ | ApproximantForm::Ep2bIntermediate | ApproximantForm::Ep2bLong { .. } => &[Family::Qubit],
            ApproximantForm::ZenoD => &[Family::EndDot, Family::SideDot],
            ApproximantForm::Ep2aBandEdge | ApproximantForm::Ep2aLong => &[Family::EndDot],
            ApproximantForm::Ep3aLong | ApproximantForm::Ep3aHalfPower { .. } => &[Family::SideDot],
        }
    }

    fn is_long_time(&self) -> bool {
        matches!(self, ApproximantForm::Ep2bLong { .. } | ApproximantForm::Ep2aLong | ApproximantForm::Ep3aLong)
    }
}

impl fmt::Display for ApproximantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses the form names; `EP2B_LONG` anchors at `t = 100` and
/// `EP3A_HALFPOWER` takes comma-separated coefficients after a colon,
/// e.g. `EP3A_HALFPOWER:-0.01,0.009`.
impl FromStr for ApproximantForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let form = match name.to_ascii_uppercase().as_str() {
            "ZENO_Q" => ApproximantForm::ZenoQ,
            "ZENO_D" => ApproximantForm::ZenoD,
            "EP2B_INTERMEDIATE" => ApproximantForm::Ep2bIntermediate,
            "EP2B_LONG" => {
                let anchor_time = match arg {
                    Some(a) => a.parse().map_err(|_| Error::InvalidInput(format!("bad anchor time `{a}`")))?,
                    None => 100.0,
                };
                ApproximantForm::Ep2bLong { anchor_time }
            }
            "EP2A_BANDEDGE" => ApproximantForm::Ep2aBandEdge,
            "EP2A_LONG" => ApproximantForm::Ep2aLong,
            "EP3A_LONG" => ApproximantForm::Ep3aLong,
            "EP3A_HALFPOWER" => {
                let coefficients = arg
                    .unwrap_or("")
                    .split(',')
                    .filter(|c| !c.trim().is_empty())
                    .map(|c| c.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad coefficient `{c}`"))))
                    .collect::<Result<Vec<_>>>()?;
                ApproximantForm::Ep3aHalfPower { coefficients }
            }
            _ => return Err(Error::InvalidInput(format!("unknown approximant `{s}`"))),
        };
        Ok(form)
    }
}

/// `(D1, D2, Gamma_B)` of the EP2B intermediate law.
pub(crate) fn ep2b_constants(g: f64) -> (f64, f64, f64) {
    let g2 = g * g;
    let r = (1.0 - g2).sqrt();
    let d1 = g2 * (1.0 + r) / (2.0 * (1.0 - g2).powf(0.75));
    let d2 = g2 * g2 * (2.0 - g2 + 2.0 * r) / (16.0 * (1.0 - g2).powf(1.5));
    let gamma = 2.0 * ((2.0 - g2) / r - 2.0).sqrt();
    (d1, d2, gamma)
}

pub fn evaluate_approximant(form: &ApproximantForm, model: &ModelSpec, t_grid: &[f64]) -> Result<TimeSeries> {
    model.validate()?;
    check_grid(t_grid)?;
    if !form.families().contains(&model.family) {
        return Err(Error::ApproximantMismatch { form: form.name(), family: model.family });
    }
    if form.is_long_time() && t_grid.first().is_some_and(|&t| t <= 0.0) {
        return Err(Error::InvalidInput(format!("{} is a long-time law; t must be > 0", form.name())));
    }
    let g = model.g;
    let g2 = g * g;
    let mut metadata = Vec::new();
    let law: Box<dyn Fn(f64) -> f64> = match form {
        ApproximantForm::ZenoQ => {
            let v2 = model.v * model.v;
            Box::new(move |t| 1.0 - v2 * t * t)
        }
        ApproximantForm::ZenoD => Box::new(move |t| 1.0 - g2 * t * t),
        ApproximantForm::Ep2bIntermediate => {
            if g >= 1.0 {
                return Err(Error::EpNotReal(g));
            }
            let (d1, d2, gamma) = ep2b_constants(g);
            metadata.extend([("D1".to_string(), d1), ("D2".to_string(), d2), ("Gamma_B".to_string(), gamma)]);
            Box::new(move |t| (1.0 + d1 * t + d2 * t * t) * (-gamma * t).exp())
        }
        ApproximantForm::Ep2bLong { anchor_time } => {
            // maxima of cos^2(2t + pi/4) sit at t = (m pi - pi/4) / 2
            let m = ((2.0 * anchor_time + FRAC_PI_4) / PI).round().max(1.0);
            let t_a = (m * PI - FRAC_PI_4) / 2.0;
            let p_a = SpectralPropagator::new(model)?.amplitude(t_a)?.norm_sqr();
            let c = p_a * t_a.powi(3);
            metadata.extend([("anchor_time".to_string(), t_a), ("constant".to_string(), c)]);
            Box::new(move |t| c * (2.0 * t + FRAC_PI_4).cos().powi(2) / t.powi(3))
        }
        ApproximantForm::Ep2aBandEdge => {
            if g >= 1.0 {
                return Err(Error::EpNotReal(g));
            }
            let delta = -2.0 + (2.0 - g2) / (1.0 - g2).sqrt();
            metadata.push(("Delta_EP".to_string(), delta));
            Box::new(move |t| 1.0 - 4.0 * (2.0 * t * delta / PI).sqrt() + 16.0 * t * delta / PI)
        }
        ApproximantForm::Ep2aLong => {
            if g >= 1.0 {
                return Err(Error::EpNotReal(g));
            }
            let c = g2 * g2 / (4.0 * PI * (1.0 - (1.0 - g2).sqrt()).powi(8));
            metadata.push(("constant".to_string(), c));
            Box::new(move |t| c / t.powi(3))
        }
        ApproximantForm::Ep3aLong => {
            let c = 64.0 * g2 * g2 / (PI * (2.0 + model.eps_d - 4.0 * g2).powi(4));
            metadata.push(("constant".to_string(), c));
            Box::new(move |t| c / t.powi(3))
        }
        ApproximantForm::Ep3aHalfPower { coefficients } => {
            let c = coefficients.clone();
            Box::new(move |t| 1.0 + c.iter().enumerate().map(|(i, ci)| ci * t.powf((i + 1) as f64 / 2.0)).sum::<f64>())
        }
    };
    let values = t_grid.iter().map(|&t| law(t)).collect();
    let mut ts = TimeSeries::new(t_grid.to_vec(), values, Method::Approximant(form.name().to_string()), *model);
    ts.metadata = metadata;
    Ok(ts)
}
