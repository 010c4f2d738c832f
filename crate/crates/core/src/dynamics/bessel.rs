use std::f64::consts::PI;

use num_complex::Complex64;

use super::check_grid;
use super::quad::gk15;
use crate::error::{Error, Result};

/// `J_1(x)` from its integral representation, summed with the trapezoid rule
/// over a full period (exponentially convergent once the node count exceeds `x`).
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let n = (ax + 40.0 + 10.0 * ax.cbrt()).ceil() as usize;
    let h = 2.0 * PI / n as f64;
    let s: f64 = (0..n).map(|j| {
        let tau = h * j as f64;
        (tau - ax * tau.sin()).cos()
    }).sum();
    let j1 = s / n as f64;
    if x < 0.0 { -j1 } else { j1 }
}

/// `J_1(2t)/t`, with the series used near the origin.
fn j1_ratio(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 2.0 + t2 * t2 / 12.0
    } else {
        bessel_j1(2.0 * t) / t
    }
}

fn check_lambda(lambda_bar: Complex64) -> Result<f64> {
    if lambda_bar.im != 0.0 || lambda_bar.re <= 1.0 {
        return Err(Error::InvalidInput(format!("lambda_bar must be real and > 1, got {lambda_bar}")));
    }
    Ok(lambda_bar.re)
}

/// Cumulative `int_0^t e^{iEt'} f(t') dt'` on the grid, panels no wider than 0.25.
fn cumulative(t_grid: &[f64], e_bar: f64, f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let mut g = |s: f64| Complex64::from_polar(f(s), e_bar * s);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let panels = ((t - prev) / 0.25).ceil().max(1.0) as usize;
        let h = (t - prev) / panels as f64;
        for p in 0..panels {
            let a = prev + h * p as f64;
            acc += gk15(&mut g, a, a + h).0;
        }
        prev = t;
        out.push(acc);
    }
    out
}

/// `I(lambda_bar, t) = e^{-iEt} [1/lambda_bar - i int_0^t e^{iEt'} J_1(2t')/t' dt']`
/// with `E = -lambda_bar - 1/lambda_bar`.
pub fn bessel_amplitude(lambda_bar: Complex64, t_grid: &[f64]) -> Result<Vec<Complex64>> {
    let l = check_lambda(lambda_bar)?;
    check_grid(t_grid)?;
    let e = -l - 1.0 / l;
    let j = cumulative(t_grid, e, j1_ratio);
    Ok(t_grid
        .iter()
        .zip(j)
        .map(|(&t, j)| Complex64::from_polar(1.0, -e * t) * (1.0 / l - Complex64::i() * j))
        .collect())
}

/// Survival amplitude at the EP2A, `A = -lambda_bar^2 dI/dlambda_bar`, with the
/// derivative taken analytically under the integral.
pub fn bessel_survival_amplitude(lambda_bar: Complex64, t_grid: &[f64]) -> Result<Vec<Complex64>> {
    let l = check_lambda(lambda_bar)?;
    let e = -l - 1.0 / l;
    let de = -1.0 + 1.0 / (l * l);
    let i_vals = bessel_amplitude(lambda_bar, t_grid)?;
    let k = cumulative(t_grid, e, |s| bessel_j1(2.0 * s));
    Ok(t_grid
        .iter()
        .zip(i_vals.iter().zip(k))
        .map(|(&t, (&i, k))| {
            let di = -Complex64::i() * t * de * i + Complex64::from_polar(1.0, -e * t) * (-1.0 / (l * l) + de * k);
            -l * l * di
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j1_reference_values() {
        // scipy.special.j1
        for (x, want) in [
            (0.5, 0.242_268_457_674_873_9),
            (2.0, 0.576_724_807_756_873_4),
            (10.0, 0.043_472_746_168_861_41),
            (200.0, -0.054_304_538_182_378_35),
        ] {
            assert!((bessel_j1(x) - want).abs() < 1e-14, "J1({x}) = {}", bessel_j1(x));
        }
        assert_eq!(bessel_j1(-2.0), -bessel_j1(2.0));
    }

    #[test]
    fn empty_integral_at_origin() {
        let l = 1.0 / (0.99_f64).sqrt();
        let i = bessel_amplitude(Complex64::new(l, 0.0), &[0.0]).unwrap();
        assert!((i[0] - 1.0 / l).norm() < 1e-15);
        let a = bessel_survival_amplitude(Complex64::new(l, 0.0), &[0.0]).unwrap();
        assert!((a[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn rejects_physical_sheet() {
        assert!(bessel_amplitude(Complex64::new(0.5, 0.0), &[1.0]).is_err());
    }
}
