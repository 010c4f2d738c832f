//! The three open tight-binding models and their self-energies.
//!
//! All models share a semi-infinite chain with hopping `-1` (energy unit `J = 1`)
//! and continuum `E(k) = -2 cos k`. Discrete physics is expressed through
//! `lambda = e^{ik}`, which uniformises the two Riemann sheets of the energy
//! plane: `|lambda| < 1` is the physical sheet, `|lambda| > 1` the second sheet.
//!
//! * [`Family::Qubit`]: two sites `d1 - d2` with coupling `-V`, `d2` attached to
//!   the chain end with `-g`.
//! * [`Family::EndDot`]: one level at `eps_d` attached to the chain end with `-g`.
//! * [`Family::SideDot`]: one level at `eps_d` side-coupled to chain site `n`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `H_q`
    Qubit,
    /// `H_d`
    EndDot,
    /// `H_n`
    SideDot,
}

impl Family {
    pub fn short_name(self) -> &'static str {
        match self {
            Family::Qubit => "hq",
            Family::EndDot => "hd",
            Family::SideDot => "hn",
        }
    }

    /// Name of the parameter swept in spectra and EP searches.
    pub fn param_name(self) -> &'static str {
        match self {
            Family::Qubit => "V",
            Family::EndDot | Family::SideDot => "eps_d",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hq" | "qubit" => Ok(Family::Qubit),
            "hd" | "end-dot" | "enddot" => Ok(Family::EndDot),
            "hn" | "side-dot" | "sidedot" => Ok(Family::SideDot),
            other => Err(Error::InvalidModel(format!("unknown family `{other}`"))),
        }
    }
}

/// Model family plus parameters.
///
/// `v` is only meaningful for [`Family::Qubit`], `eps_d` for the dot families
/// and `n` for [`Family::SideDot`]; unused fields are kept at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub g: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub eps_d: f64,
    #[serde(default)]
    pub n: u32,
}

impl ModelSpec {
    pub fn qubit(g: f64, v: f64) -> Self {
        Self { family: Family::Qubit, g, v, eps_d: 0.0, n: 0 }
    }

    pub fn end_dot(g: f64, eps_d: f64) -> Self {
        Self { family: Family::EndDot, g, v: 0.0, eps_d, n: 0 }
    }

    pub fn side_dot(n: u32, g: f64, eps_d: f64) -> Self {
        Self { family: Family::SideDot, g, v: 0.0, eps_d, n }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.g.is_finite() || self.g < 0.0 {
            return Err(Error::InvalidModel(format!("coupling g must be >= 0, got {}", self.g)));
        }
        if !self.v.is_finite() || !self.eps_d.is_finite() {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        if self.family == Family::SideDot && self.n == 0 {
            return Err(Error::InvalidModel("side-coupling site n must be >= 1".into()));
        }
        Ok(())
    }

    /// Even `n > 6` is accepted but has no published reference behaviour.
    pub fn is_unvalidated(&self) -> bool {
        self.family == Family::SideDot && self.n > 6
    }

    /// The swept parameter: `V` for the qubit, `eps_d` otherwise.
    pub fn param(&self) -> f64 {
        match self.family {
            Family::Qubit => self.v,
            _ => self.eps_d,
        }
    }

    pub fn with_param(mut self, p: f64) -> Self {
        match self.family {
            Family::Qubit => self.v = p,
            _ => self.eps_d = p,
        }
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    /// Chain site the impurity couples to (1-based).
    pub fn attachment_site(&self) -> usize {
        match self.family {
            Family::SideDot => self.n as usize,
            _ => 1,
        }
    }
}

/// `E(k) = -2 cos k`, valid for complex `k`.
pub fn continuum_dispersion(k: Complex64) -> Complex64 {
    -2.0 * k.cos()
}

/// `E = -lambda - 1/lambda`.
pub fn energy_from_lambda(lambda: Complex64) -> Complex64 {
    -lambda - lambda.inv()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// Physical sheet, `|lambda| < 1`; on the band itself the `E + i0` limit.
    First,
    /// Unphysical sheet, `|lambda| > 1`.
    Second,
}

impl Sheet {
    pub fn of(lambda: Complex64) -> Self {
        if lambda.norm() < 1.0 {
            Sheet::First
        } else {
            Sheet::Second
        }
    }
}

/// Inverts `E = -lambda - 1/lambda` on the requested sheet.
///
/// This is the only place where the square root `sqrt(E^2 - 4)` is taken.
pub fn lambda_from_energy(energy: Complex64, sheet: Sheet) -> Complex64 {
    let s = (energy * energy - 4.0).sqrt();
    let a = (-energy + s) * 0.5;
    let b = (-energy - s) * 0.5;
    let (inner, outer) = match a.norm().partial_cmp(&b.norm()) {
        Some(std::cmp::Ordering::Less) => (a, b),
        Some(std::cmp::Ordering::Greater) => (b, a),
        _ => {
            // on the band: the E + i0 limit is the root with Im lambda >= 0
            if a.im >= b.im {
                (a, b)
            } else {
                (b, a)
            }
        }
    };
    match sheet {
        Sheet::First => inner,
        Sheet::Second => outer,
    }
}

/// `V_k = -sqrt(2/pi) sin(n k)` for the side-coupled dot.
pub fn form_factor(model: &ModelSpec, k: f64) -> Result<f64> {
    if model.family != Family::SideDot {
        return Err(Error::UnsupportedFamily { op: "form_factor", family: model.family });
    }
    Ok(-(2.0 / PI).sqrt() * (model.n as f64 * k).sin())
}

const EDGE_TOL: f64 = 1e-13;

/// Self-energy of the impurity site as a function of `lambda`.
///
/// For the qubit this is the self-energy seen by `d2`. Rational in `lambda`,
/// hence free of branch ambiguity; `lambda = +-1` (band edges) is rejected for
/// the side-coupled dot where the closed form has removable `0/0` structure.
pub fn self_energy(model: &ModelSpec, lambda: Complex64) -> Result<Complex64> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidInput("self-energy needs lambda != 0".into()));
    }
    let g2 = model.g * model.g;
    match model.family {
        Family::Qubit | Family::EndDot => Ok(-g2 * lambda),
        Family::SideDot => {
            if (lambda - 1.0).norm() < EDGE_TOL {
                return Err(Error::BandEdge(1.0));
            }
            if (lambda + 1.0).norm() < EDGE_TOL {
                return Err(Error::BandEdge(-1.0));
            }
            let l2 = lambda * lambda;
            let l2n = l2.powu(model.n);
            Ok(g2 * lambda * (1.0 - l2n) / (l2 - 1.0))
        }
    }
}

/// Self-energy evaluated directly in the energy plane on the given sheet,
/// using `sqrt(E^2 - 4)` rather than `lambda`.
pub fn self_energy_at_energy(model: &ModelSpec, energy: Complex64, sheet: Sheet) -> Result<Complex64> {
    let g2 = model.g * model.g;
    let lambda = lambda_from_energy(energy, sheet);
    match model.family {
        Family::Qubit | Family::EndDot => Ok(-g2 * lambda),
        Family::SideDot => {
            // sqrt(E^2-4) with the sign that makes (-E + s)/2 the chosen lambda
            let s = 2.0 * lambda + energy;
            if s.norm() < EDGE_TOL {
                return Err(Error::BandEdge(-energy.re / 2.0));
            }
            let half = (-energy + s) * 0.5;
            Ok(g2 / s * (1.0 - half.powu(2 * model.n)))
        }
    }
}

/// `lambda`-space dispersion polynomial whose roots are the discrete states.
///
/// * qubit: `(1-g^2) l^4 + (2 - g^2 - V^2) l^2 + 1`
/// * end dot: `(1-g^2) l^2 + eps_d l + 1`
/// * side dot: `1 + eps_d l + l^2 - g^2 (l^2 + l^4 + ... + l^{2n})`
pub fn lambda_polynomial(model: &ModelSpec) -> Poly {
    let g2 = model.g * model.g;
    match model.family {
        Family::Qubit => Poly::new(vec![1.0, 0.0, 2.0 - g2 - model.v * model.v, 0.0, 1.0 - g2]),
        Family::EndDot => Poly::new(vec![1.0, model.eps_d, 1.0 - g2]),
        Family::SideDot => {
            let n = model.n as usize;
            let mut c = vec![0.0; 2 * n + 1];
            c[0] = 1.0;
            c[1] = model.eps_d;
            c[2] = 1.0;
            for j in 1..=n {
                c[2 * j] -= g2;
            }
            Poly::new(c)
        }
    }
}

/// Impurity Green's function `<d|(E - H)^-1|d>` written as `num(lambda) / den(lambda)`
/// with `den` the [`lambda_polynomial`]. For the qubit the initial site is `d1`.
#[derive(Debug, Clone)]
pub struct GreensRational {
    pub num: Poly,
    pub den: Poly,
}

impl GreensRational {
    pub fn new(model: &ModelSpec) -> Self {
        let g2 = model.g * model.g;
        let num = match model.family {
            Family::Qubit => Poly::new(vec![0.0, -1.0, 0.0, -(1.0 - g2)]),
            Family::EndDot | Family::SideDot => Poly::new(vec![0.0, -1.0]),
        };
        Self { num, den: lambda_polynomial(model) }
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.num.eval_c(lambda) / self.den.eval_c(lambda)
    }

    /// Residue in `lambda` at a simple root of the denominator.
    pub fn residue(&self, lambda: Complex64) -> Complex64 {
        let (_, dden) = self.den.eval_with_derivative(lambda);
        self.num.eval_c(lambda) / dden
    }
}

/// Relative residual of the nonlinear eigenvalue condition at `lambda`:
/// `E - eps_d - Sigma` for the dots, `det(E - H_eff)` for the qubit.
pub fn characteristic_residual(model: &ModelSpec, lambda: Complex64) -> Result<f64> {
    let e = energy_from_lambda(lambda);
    let sigma = self_energy(model, lambda)?;
    Ok(match model.family {
        Family::Qubit => {
            let v2 = model.v * model.v;
            let r = e * (e - sigma) - v2;
            r.norm() / (e.norm() * (e - sigma).norm() + v2).max(f64::MIN_POSITIVE)
        }
        _ => {
            let r = e - model.eps_d - sigma;
            r.norm() / (e.norm() + model.eps_d.abs() + sigma.norm()).max(f64::MIN_POSITIVE)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dispersion_band_edges() {
        assert_abs_diff_eq!(continuum_dispersion(c(0.0)).re, -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(continuum_dispersion(c(PI / 2.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dispersion_matches_lambda_form() {
        let k = Complex64::new(0.7, -0.3);
        let lambda = (Complex64::i() * k).exp();
        assert!((continuum_dispersion(k) - energy_from_lambda(lambda)).norm() < 1e-14);
    }

    #[test]
    fn coalesced_lambda_energy_for_weak_coupling() {
        let g: f64 = 0.1;
        let lambda = 1.0 / (1.0 - g * g).sqrt();
        let e = energy_from_lambda(c(lambda));
        assert_abs_diff_eq!(e.re, -2.0000253, epsilon = 5e-8);
    }

    #[test]
    fn form_factor_values() {
        let m4 = ModelSpec::side_dot(4, 0.1, 0.0);
        let m6 = ModelSpec::side_dot(6, 0.1, 0.0);
        let amp = (2.0 / PI).sqrt();
        assert_abs_diff_eq!(form_factor(&m4, PI / 4.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(form_factor(&m4, PI / 8.0).unwrap(), -amp, epsilon = 1e-15);
        // sin(6 * pi/12) = 1
        assert_abs_diff_eq!(form_factor(&m6, PI / 12.0).unwrap(), -amp, epsilon = 1e-15);
        assert!(form_factor(&ModelSpec::end_dot(0.1, 0.0), 0.3).is_err());
    }

    #[test]
    fn end_dot_self_energy() {
        assert_eq!(self_energy(&ModelSpec::end_dot(0.0, -1.0), c(0.3)).unwrap(), c(0.0));
        assert_abs_diff_eq!(
            self_energy(&ModelSpec::end_dot(0.5, -1.0), c(2.0)).unwrap().re,
            -0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn side_dot_band_edge_is_rejected() {
        let m = ModelSpec::side_dot(4, 0.1, -1.9);
        assert!(matches!(self_energy(&m, c(1.0)), Err(Error::BandEdge(_))));
        assert!(matches!(self_energy(&m, c(-1.0)), Err(Error::BandEdge(_))));
    }

    #[test]
    fn side_dot_with_n1_is_end_dot() {
        let lambda = Complex64::new(0.4, 0.7);
        let a = self_energy(&ModelSpec::side_dot(1, 0.3, 0.0), lambda).unwrap();
        let b = self_energy(&ModelSpec::end_dot(0.3, 0.0), lambda).unwrap();
        assert!((a - b).norm() < 1e-15);
        let pa = lambda_polynomial(&ModelSpec::side_dot(1, 0.3, -0.4));
        let pb = lambda_polynomial(&ModelSpec::end_dot(0.3, -0.4));
        assert_eq!(pa, pb);
    }

    #[test]
    fn first_sheet_inversion() {
        let e = c(-3.0);
        let l = lambda_from_energy(e, Sheet::First);
        assert!(l.norm() < 1.0);
        assert!((energy_from_lambda(l) - e).norm() < 1e-14);
        // inside the band the physical sheet gives the retarded limit
        let l = lambda_from_energy(c(0.5), Sheet::First);
        assert!(l.im > 0.0);
    }

    #[test]
    fn polynomial_roots_satisfy_characteristic_equation() {
        for m in [
            ModelSpec::qubit(0.75, 0.5),
            ModelSpec::end_dot(0.4, -1.2),
            ModelSpec::side_dot(4, 0.2, -1.5),
        ] {
            for z in lambda_polynomial(&m).roots().unwrap() {
                assert!(characteristic_residual(&m, z).unwrap() < 1e-10, "{m:?} {z}");
            }
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("hq".parse::<Family>().unwrap(), Family::Qubit);
        assert_eq!("HN".parse::<Family>().unwrap(), Family::SideDot);
        assert!("hx".parse::<Family>().is_err());
    }
}
