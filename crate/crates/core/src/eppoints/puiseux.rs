use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lambda_roots, EpRecord, EpType};
use crate::error::{Error, Result};
use crate::models::{energy_from_lambda, Family, GreensRational};
use crate::spectra::COALESCENCE_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PuiseuxVariable {
    Energy,
    Lambda,
    Norm,
}

impl fmt::Display for PuiseuxVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PuiseuxVariable::Energy => "E",
            PuiseuxVariable::Lambda => "lambda",
            PuiseuxVariable::Norm => "norm",
        })
    }
}

/// Power `num / den` of the detuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponent {
    pub num: i32,
    pub den: u32,
}

impl Exponent {
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Expansion in fractional powers of `delta = p - p_bar`, with `p` the swept
/// parameter (V or eps_d) at fixed coupling.
///
/// Branch `k` of an order-`m` point takes `delta^{1/m}` times the `k`-th
/// `m`-th root of unity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxExpansion {
    pub center: EpRecord,
    pub variable: PuiseuxVariable,
    pub terms: Vec<(Exponent, Complex64)>,
    pub truncation: u32,
    /// Ladder rungs dropped because the roots were numerically clustered.
    pub warnings: Vec<String>,
}

impl PuiseuxExpansion {
    pub fn branches(&self) -> usize {
        self.center.order as usize
    }

    pub fn coefficient(&self, num: i32) -> Option<Complex64> {
        self.terms.iter().find(|(e, _)| e.num == num).map(|&(_, c)| c)
    }

    pub fn value(&self, delta: f64, branch: usize) -> Complex64 {
        let m = self.center.order as f64;
        let root = Complex64::new(delta, 0.0).powf(1.0 / m)
            * Complex64::from_polar(1.0, 2.0 * PI * branch as f64 / m);
        self.terms
            .iter()
            .map(|&(e, c)| if e.num == 0 { c } else { c * root.powi(e.num) })
            .sum()
    }
}

fn ep_values(ep: &EpRecord, delta: f64, variable: PuiseuxVariable) -> Result<Vec<(Complex64, Complex64)>> {
    let model = ep.model.with_param(ep.param() + delta);
    let mut roots = lambda_roots(&model)?;
    roots.sort_by(|a, b| (a - ep.lambda).norm().total_cmp(&(b - ep.lambda).norm()));
    roots.truncate(ep.order as usize);
    let greens = GreensRational::new(&model);
    Ok(roots
        .into_iter()
        .map(|l| {
            let x = match variable {
                PuiseuxVariable::Lambda => l,
                PuiseuxVariable::Energy => energy_from_lambda(l),
                PuiseuxVariable::Norm => greens.residue(l) / (l * l),
            };
            (l, x)
        })
        .collect())
}

/// Intercept and higher coefficients of a least-squares polynomial fit.
fn poly_fit(xs: &[f64], ys: &[Complex64], degree: usize) -> Vec<Complex64> {
    let scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let a = DMatrix::<Complex64>::from_fn(xs.len(), degree + 1, |i, j| Complex64::new((xs[i] / scale).powi(j as i32), 0.0));
    let b = DVector::from_column_slice(ys);
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("svd with vectors");
    (0..=degree).map(|j| sol[j] / scale.powi(j as i32)).collect()
}

/// Hint for the sign of the leading `lambda` coefficient so numerical branches
/// line up with the printed closed forms.
fn lambda_sign_hint(ep: &EpRecord) -> Option<Complex64> {
    if ep.order != 2 {
        return None;
    }
    match (ep.model.family, ep.ep_type) {
        (Family::EndDot, _) => Some(Complex64::i() * ep.lambda.powf(1.5)),
        (Family::Qubit, Some(EpType::B)) => {
            let dedl = -1.0 + 1.0 / (ep.lambda * ep.lambda);
            Some(Complex64::new(qubit_b_energy_slope(ep), 0.0) / dedl)
        }
        _ => None,
    }
}

/// Leading energy coefficient at the qubit EP2B per unit `delta^{1/2}`,
/// `delta = V - V_B`.
fn qubit_b_energy_slope(ep: &EpRecord) -> f64 {
    let g2 = ep.model.g * ep.model.g;
    let root = (1.0 - g2).sqrt();
    let c = g2 / (2.0 * ((1.0 - g2) * (2.0 - g2 - 2.0 * root)).sqrt());
    c * (2.0 * ep.param()).sqrt()
}

fn canonical_sign(a: Complex64, hint: Option<Complex64>) -> Complex64 {
    match hint {
        Some(h) => {
            if (a - h).norm() <= (a + h).norm() {
                a
            } else {
                -a
            }
        }
        None => {
            if a.re > 1e-12 * a.norm() || (a.re.abs() <= 1e-12 * a.norm() && a.im >= 0.0) {
                a
            } else {
                -a
            }
        }
    }
}

const LADDER_RUNGS: usize = 8;

fn ladder(ep: &EpRecord) -> Vec<f64> {
    let start = if ep.order == 2 { 1e-3 } else { 1e-5 } * ep.param().abs().max(1.0);
    (0..LADDER_RUNGS).map(|k| start * 0.5_f64.powi(k as i32)).collect()
}

fn center_value(ep: &EpRecord, variable: PuiseuxVariable) -> Complex64 {
    match variable {
        PuiseuxVariable::Lambda => ep.lambda,
        PuiseuxVariable::Energy => ep.energy,
        PuiseuxVariable::Norm => Complex64::new(0.0, 0.0),
    }
}

/// Coefficients extracted purely from exact roots on a log-spaced ladder in
/// `delta`, without substituting any closed form.
pub fn puiseux_numeric(ep: &EpRecord, variable: PuiseuxVariable, order: u32) -> Result<PuiseuxExpansion> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidInput(format!("Puiseux order must be 1..=3, got {order}")));
    }
    if ep.order == 3 && variable == PuiseuxVariable::Norm {
        return Err(Error::InvalidInput("norm expansion is only available at order-2 points".into()));
    }
    let mut warnings = Vec::new();
    let mut rungs: Vec<(f64, Vec<(Complex64, Complex64)>)> = Vec::new();
    for delta in ladder(ep) {
        let vals = ep_values(ep, delta, variable)?;
        let mut min_split = f64::INFINITY;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                min_split = min_split.min((vals[i].0 - vals[j].0).norm());
            }
        }
        if min_split < 1e3 * COALESCENCE_TOL * (1.0 + ep.lambda.norm()) {
            warnings.push(format!("dropped delta = {delta:e}: roots split by only {min_split:e}"));
            continue;
        }
        rungs.push((delta, vals));
    }
    if rungs.len() < 4 {
        return Err(Error::PuiseuxLadder(format!("only {} usable rungs", rungs.len())));
    }

    let den = ep.order;
    let ex = |num: i32| Exponent { num, den };
    let deltas: Vec<f64> = rungs.iter().map(|r| r.0).collect();

    if den == 3 {
        let center = center_value(ep, variable);
        let (mut s1, mut s2, mut s3) = (Vec::new(), Vec::new(), Vec::new());
        for (delta, vals) in &rungs {
            let y: Vec<Complex64> = vals.iter().map(|v| v.1 - center).collect();
            s1.push((y[0] + y[1] + y[2]) / delta);
            s2.push((y[0] * y[1] + y[0] * y[2] + y[1] * y[2]) / delta);
            s3.push(y[0] * y[1] * y[2] / delta);
        }
        let s: Vec<f64> = deltas.iter().map(|d| d.cbrt()).collect();
        let a3 = poly_fit(&s, &s3, 3)[0];
        let a = canonical_sign(a3.powf(1.0 / 3.0), None);
        let b = -poly_fit(&s, &s2, 3)[0] / (3.0 * a);
        let cc = poly_fit(&s, &s1, 3)[0] / 3.0;
        let mut terms = vec![(ex(0), center), (ex(1), a), (ex(2), b), (ex(3), cc)];
        terms.truncate(order as usize + 1);
        return Ok(PuiseuxExpansion { center: *ep, variable, terms, truncation: order, warnings });
    }

    // order 2: branch + is the lambda root with (l - l_bar) ~ +a sqrt(delta)
    let split_sq: Vec<Complex64> = rungs
        .iter()
        .map(|(d, v)| {
            let h = 0.5 * (v[0].0 - v[1].0);
            h * h / d
        })
        .collect();
    let fit = poly_fit(&deltas, &split_sq, 2);
    let a_lambda = canonical_sign(fit[0].sqrt(), lambda_sign_hint(ep));
    let plus_first: Vec<bool> = rungs
        .iter()
        .map(|(d, v)| ((v[0].0 - v[1].0) / (a_lambda * d.sqrt())).re > 0.0)
        .collect();
    let ordered: Vec<(Complex64, Complex64)> = rungs
        .iter()
        .zip(&plus_first)
        .map(|((_, v), &pf)| if pf { (v[0].1, v[1].1) } else { (v[1].1, v[0].1) })
        .collect();

    let terms = match variable {
        PuiseuxVariable::Lambda | PuiseuxVariable::Energy => {
            let center = center_value(ep, variable);
            let odd: Vec<Complex64> = ordered
                .iter()
                .zip(&deltas)
                .map(|((p, m), d)| 0.5 * (p - m) / d.sqrt())
                .collect();
            let even: Vec<Complex64> = ordered
                .iter()
                .zip(&deltas)
                .map(|((p, m), d)| (0.5 * (p + m) - center) / d)
                .collect();
            let o = poly_fit(&deltas, &odd, 2);
            let e = poly_fit(&deltas, &even, 2);
            let mut t = vec![(ex(0), center), (ex(1), o[0]), (ex(2), e[0]), (ex(3), o[1])];
            t.truncate(order as usize + 1);
            t
        }
        PuiseuxVariable::Norm => {
            let odd: Vec<Complex64> = ordered
                .iter()
                .zip(&deltas)
                .map(|((p, m), d)| 0.5 * (p - m) * d.sqrt())
                .collect();
            let even: Vec<Complex64> = ordered.iter().map(|(p, m)| 0.5 * (p + m)).collect();
            let o = poly_fit(&deltas, &odd, 2);
            let e = poly_fit(&deltas, &even, 2);
            let mut t = vec![(ex(-1), o[0]), (ex(0), e[0]), (ex(1), o[1])];
            t.truncate(order as usize);
            t
        }
    };
    Ok(PuiseuxExpansion { center: *ep, variable, terms, truncation: order, warnings })
}

/// Puiseux expansion about `ep`. Closed-form coefficients replace the
/// numerical ones for the end-dot `lambda` and norm series and the leading
/// qubit EP2B energy coefficient; every other coefficient is extracted from
/// exact roots.
pub fn puiseux(ep: &EpRecord, variable: PuiseuxVariable, order: u32) -> Result<PuiseuxExpansion> {
    let mut out = puiseux_numeric(ep, variable, order)?;
    let set = |out: &mut PuiseuxExpansion, num: i32, value: Complex64| {
        if let Some(t) = out.terms.iter_mut().find(|(e, _)| e.num == num) {
            t.1 = value;
        }
    };
    let l = ep.lambda;
    match (ep.model.family, ep.order, variable) {
        (Family::EndDot, 2, PuiseuxVariable::Lambda) => {
            set(&mut out, 1, l * Complex64::i() * l.sqrt());
            set(&mut out, 2, -0.5 * l * l);
        }
        (Family::EndDot, 2, PuiseuxVariable::Norm) => {
            set(&mut out, -1, Complex64::i() / (2.0 * l.sqrt()));
            set(&mut out, 0, Complex64::new(0.5, 0.0));
        }
        (Family::Qubit, 2, PuiseuxVariable::Energy) if ep.ep_type == Some(EpType::B) => {
            set(&mut out, 1, Complex64::new(qubit_b_energy_slope(ep), 0.0));
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eppoints::{closed_form_eps, locate_ep3, Ep3Window};
    use crate::models::ModelSpec;

    fn exact_pair(ep: &EpRecord, delta: f64, variable: PuiseuxVariable) -> Vec<Complex64> {
        ep_values(ep, delta, variable).unwrap().into_iter().map(|v| v.1).collect()
    }

    fn matches_some(x: Complex64, set: &[Complex64], tol: f64) -> bool {
        set.iter().any(|y| (x - y).norm() < tol)
    }

    #[test]
    fn end_dot_lambda_numeric_matches_closed_form() {
        let ep = closed_form_eps(&ModelSpec::end_dot(0.3, 0.0)).unwrap()[0];
        let num = puiseux_numeric(&ep, PuiseuxVariable::Lambda, 3).unwrap();
        let closed = puiseux(&ep, PuiseuxVariable::Lambda, 3).unwrap();
        for k in 0..3 {
            let (a, b) = (num.terms[k].1, closed.terms[k].1);
            assert!((a - b).norm() < 1e-7 * b.norm().max(1.0), "term {k}: {a} vs {b}");
        }
    }

    #[test]
    fn end_dot_norm_expansion() {
        let ep = closed_form_eps(&ModelSpec::end_dot(0.3, 0.0)).unwrap()[0];
        let num = puiseux_numeric(&ep, PuiseuxVariable::Norm, 2).unwrap();
        let closed = puiseux(&ep, PuiseuxVariable::Norm, 2).unwrap();
        for k in 0..2 {
            let (a, b) = (num.terms[k].1, closed.terms[k].1);
            assert!((a - b).norm() < 1e-6, "term {k}: {a} vs {b}");
        }
    }

    #[test]
    fn qubit_b_energy_leading_coefficient() {
        let ep = closed_form_eps(&ModelSpec::qubit(0.75, 1.0)).unwrap()[0];
        let num = puiseux_numeric(&ep, PuiseuxVariable::Energy, 1).unwrap();
        let want = qubit_b_energy_slope(&ep);
        let got = num.coefficient(1).unwrap();
        assert!((got - want).norm() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn expansion_reproduces_roots() {
        let ep = closed_form_eps(&ModelSpec::qubit(0.75, 1.0)).unwrap()[0];
        let ex = puiseux(&ep, PuiseuxVariable::Energy, 3).unwrap();
        for delta in [1e-3, 1e-4, -1e-4] {
            let exact = exact_pair(&ep, delta, PuiseuxVariable::Energy);
            for b in 0..2 {
                let err = delta.abs().powf(2.0);
                assert!(matches_some(ex.value(delta, b), &exact, 50.0 * err), "delta {delta}");
            }
        }
        assert_eq!(ex.value(0.0, 0), ep.energy);
    }

    #[test]
    fn ep3_cube_root_expansion() {
        let ep = locate_ep3(4, Ep3Window::default_for(4)).unwrap();
        let ex = puiseux(&ep, PuiseuxVariable::Lambda, 3).unwrap();
        assert_eq!(ex.terms[1].0, Exponent { num: 1, den: 3 });
        let delta = 1e-6;
        let exact = exact_pair(&ep, delta, PuiseuxVariable::Lambda);
        for b in 0..3 {
            assert!(matches_some(ex.value(delta, b), &exact, 1e-6), "{b}");
        }
    }

    #[test]
    fn rejects_bad_order() {
        let ep = closed_form_eps(&ModelSpec::end_dot(0.3, 0.0)).unwrap()[0];
        assert!(puiseux(&ep, PuiseuxVariable::Lambda, 0).is_err());
        assert!(puiseux(&ep, PuiseuxVariable::Lambda, 4).is_err());
    }
}
