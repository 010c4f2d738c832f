//! Adaptive Gauss-Kronrod (7, 15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    /// Initial panels are no wider than this.
    pub max_width: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, max_width: f64::INFINITY, max_panels: 200_000 }
    }
}

/// Integral of `f` over `[a, b]`, refining panels until each local error
/// estimate is below its share of `abs_tol`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let len = (b - a).abs();
    let initial = ((len / opts.max_width).ceil() as usize).max(1);
    let step = (b - a) / initial as f64;
    let mut stack: Vec<(f64, f64, f64)> =
        (0..initial).rev().map(|i| (a + step * i as f64, a + step * (i + 1) as f64, f64::INFINITY)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut panels = 0usize;
    let mut unresolved = 0.0;
    while let Some((lo, hi, parent_err)) = stack.pop() {
        let (val, err) = gk15(&mut f, lo, hi);
        panels += 1;
        // below roundoff of the panel value no refinement can help
        let share = (opts.abs_tol * (hi - lo).abs() / len).max(64.0 * f64::EPSILON * val.norm());
        let mid = 0.5 * (lo + hi);
        // an error that stopped shrinking under bisection while already
        // negligible against the total is noise in the integrand
        let noisy = err > 0.25 * parent_err && err < 0.01 * opts.abs_tol;
        if err <= share || noisy || mid == lo || mid == hi {
            total += val;
            if err > share {
                unresolved += err;
            }
            continue;
        }
        if panels >= opts.max_panels {
            return Err(Error::Quadrature { estimate: err + unresolved });
        }
        stack.push((mid, hi, err));
        stack.push((lo, mid, err));
    }
    if unresolved > 1e3 * opts.abs_tol {
        return Err(Error::Quadrature { estimate: unresolved });
    }
    Ok(total)
}
