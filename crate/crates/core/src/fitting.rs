//! Linear least-squares fits of survival series to power-law expansions and
//! log-log slope extraction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{linear_grid, TimeSeries};
use crate::error::{Error, Result};

/// `t^{1/2}, t, ..., t^3`.
pub const HALF_POWERS: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// Scaled design matrices above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Samples per unit time on the default fit grid.
pub const DEFAULT_SAMPLES_PER_UNIT: f64 = 20.0;

/// Minimum ratio of samples to fitted coefficients.
pub const MIN_SAMPLES_PER_COEFFICIENT: usize = 4;

/// `P(t) - 1 = sum_i C_i t^{e_i}` over the fitted window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// First and last time actually fitted.
    pub t_min: f64,
    pub t_max: f64,
    pub n_samples: usize,
    pub rms: f64,
    /// 2-norm condition number of the column-scaled design matrix.
    pub condition: f64,
}

impl FitResult {
    pub fn evaluate(&self, t: f64) -> f64 {
        1.0 + self.exponents.iter().zip(&self.coefficients).map(|(&e, &c)| c * t.powf(e)).sum::<f64>()
    }

    /// `P(t) - fit(t)` on the samples of `series` inside the fitted window.
    pub fn residuals(&self, series: &TimeSeries) -> Vec<(f64, f64)> {
        series.window(self.t_min, self.t_max).iter().map(|(t, p)| (t, p - self.evaluate(t))).collect()
    }
}

/// Uniform grid on `[0, t_ep]` with 20 samples per unit time.
pub fn default_fit_grid(t_ep: f64) -> Vec<f64> {
    let n = (DEFAULT_SAMPLES_PER_UNIT * t_ep).round().max(1.0) as usize + 1;
    linear_grid(0.0, t_ep, n)
}

fn windowed(series: &TimeSeries, window: Option<(f64, f64)>) -> Result<TimeSeries> {
    let (first, last) = match (series.times.first(), series.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InvalidInput("empty series".into())),
    };
    let (lo, hi) = window.unwrap_or((first, last));
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty fit window [{lo}, {hi}]")));
    }
    // tolerate rounding in the end points of a grid
    let slack = 1e-9 * last.abs().max(1.0);
    if lo < first - slack || hi > last + slack {
        return Err(Error::InvalidInput(format!("fit window [{lo}, {hi}] exceeds the series support [{first}, {last}]")));
    }
    Ok(series.window(lo - slack, hi + slack))
}

/// Least squares of `P(t) - 1` on the basis `t^{e}` by Householder QR of the
/// column-scaled design matrix.
pub fn fit_powers(series: &TimeSeries, window: Option<(f64, f64)>, exponents: &[f64]) -> Result<FitResult> {
    if exponents.is_empty() {
        return Err(Error::InvalidInput("no basis exponents".into()));
    }
    if exponents.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidInput("basis exponents must be positive".into()));
    }
    let data = windowed(series, window)?;
    let m = data.len();
    let n = exponents.len();
    if m < MIN_SAMPLES_PER_COEFFICIENT * n {
        return Err(Error::InvalidInput(format!(
            "{m} samples for {n} coefficients; need at least {}",
            MIN_SAMPLES_PER_COEFFICIENT * n
        )));
    }
    let mut a = DMatrix::from_fn(m, n, |i, j| data.times[i].powf(exponents[j]));
    let scales: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if scales.contains(&0.0) {
        return Err(Error::IllPosedFit("a basis column vanishes on the window".into()));
    }
    for (j, &s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let sv = a.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllPosedFit(format!(
            "condition number {condition:e} of the scaled design matrix exceeds {MAX_CONDITION:e} \
             ({m} samples on [{}, {}])",
            data.times[0],
            data.times[m - 1]
        )));
    }
    let b = DVector::from_iterator(m, data.values.iter().map(|p| p - 1.0));
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * &b;
    let y = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::IllPosedFit("singular triangular factor".into()))?;
    let residual = &b - &a * &y;
    let rms = (residual.norm_squared() / m as f64).sqrt();
    let coefficients = y.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(FitResult {
        exponents: exponents.to_vec(),
        coefficients,
        t_min: data.times[0],
        t_max: data.times[m - 1],
        n_samples: m,
        rms,
        condition,
    })
}

/// Fit to `1 + sum_i C_i t^{e_i}` with half-integer exponents, by default
/// [`HALF_POWERS`].
pub fn fit_half_powers(series: &TimeSeries, window: Option<(f64, f64)>, exponents: Option<&[f64]>) -> Result<FitResult> {
    let exps = exponents.unwrap_or(&HALF_POWERS);
    if exps.iter().any(|e| (2.0 * e).fract() != 0.0) {
        return Err(Error::InvalidInput("exponents must be multiples of 1/2".into()));
    }
    fit_powers(series, window, exps)
}

/// Fit to `1 + sum_{k=1}^{max_degree} C_k t^k`.
pub fn fit_integer_powers(series: &TimeSeries, window: Option<(f64, f64)>, max_degree: usize) -> Result<FitResult> {
    let exps: Vec<f64> = (1..=max_degree).map(|k| k as f64).collect();
    fit_powers(series, window, &exps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMode {
    /// Every sample in the window.
    Direct,
    /// Local maxima only (three-point comparison), for oscillating decays.
    Envelope,
}

/// Least-squares slope of `ln P` against `ln t`.
pub fn loglog_slope(series: &TimeSeries, window: Option<(f64, f64)>, mode: SlopeMode) -> Result<f64> {
    let data = windowed(series, window)?;
    if data.iter().any(|(t, p)| t <= 0.0 || p <= 0.0) {
        return Err(Error::InvalidInput("log-log slope needs t > 0 and P > 0 throughout the window".into()));
    }
    let points: Vec<(f64, f64)> = match mode {
        SlopeMode::Direct => data.iter().collect(),
        SlopeMode::Envelope => (1..data.len().saturating_sub(1))
            .filter(|&i| data.values[i] > data.values[i - 1] && data.values[i] >= data.values[i + 1])
            .map(|i| (data.times[i], data.values[i]))
            .collect(),
    };
    if points.len() < 2 {
        return Err(Error::InvalidInput(format!("{} usable points in the window; need at least 2", points.len())));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(t, p)| (t.ln(), p.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("degenerate time window".into()));
    }
    Ok(sxy / sxx)
}
