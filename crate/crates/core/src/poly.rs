//! Real-coefficient polynomials and a companion-matrix root finder.
//!
//! Coefficients are stored in ascending degree. Roots come from the
//! eigenvalues of a balanced companion matrix (real Schur form), followed by
//! a few guarded Newton steps on the original polynomial. Real roots stay
//! exactly real and complex roots are returned in exact conjugate pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, trimming exact trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Sum of |c_i| |z|^i, the natural scale for residuals at `z`.
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// The reversed polynomial `z^d p(1/z)`.
    pub fn reversed(&self) -> Poly {
        Poly::new(self.coeffs.iter().rev().copied().collect())
    }

    /// Returns `self` divided by its leading coefficient.
    pub fn monic(&self) -> Poly {
        let lead = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c / lead).collect())
    }

    /// Rewrites `p(z) * z^d p(1/z) / z^d`, a Laurent polynomial symmetric under
    /// `z -> 1/z`, as an ordinary polynomial in `w = z + 1/z`.
    ///
    /// Every root `z_j` of `p` (and its reciprocal) maps to the single root
    /// `w_j = z_j + 1/z_j` of the result, which therefore has the same degree as `p`.
    pub fn symmetrized_in_w(&self) -> Poly {
        let d = self.degree();
        let h = self.mul(&self.reversed());
        let hc = h.coeffs();
        // q_m(w) = z^m + z^-m via q_{m+1} = w q_m - q_{m-1}
        let mut q_prev = vec![2.0];
        let mut q_cur = vec![0.0, 1.0];
        let mut out = vec![0.0; d + 1];
        let centre = hc.get(d).copied().unwrap_or(0.0);
        out[0] += centre;
        for m in 1..=d {
            let c = hc.get(d + m).copied().unwrap_or(0.0);
            for (i, &q) in q_cur.iter().enumerate() {
                out[i] += c * q;
            }
            let mut next = vec![0.0; q_cur.len() + 1];
            for (i, &q) in q_cur.iter().enumerate() {
                next[i + 1] += q;
            }
            for (i, &q) in q_prev.iter().enumerate() {
                next[i] -= q;
            }
            q_prev = std::mem::replace(&mut q_cur, next);
        }
        Poly::new(out)
    }

    /// Substitutes `z -> -z`.
    pub fn reflected(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| if i % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    /// All complex roots, with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        if !lead.is_finite() || self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::RootFinding("non-finite coefficient".into()));
        }
        if d == 1 {
            return Ok(vec![Complex64::new(-self.coeffs[0] / lead, 0.0)]);
        }
        // The Francis iteration can stall on companion matrices with
        // symmetric structure (even polynomials); a real shift of the
        // variable breaks the symmetry and the roots are polished afterwards.
        let scale = self
            .coeffs
            .iter()
            .take(d)
            .enumerate()
            .map(|(i, c)| (c.abs() / lead.abs()).powf(1.0 / (d - i) as f64))
            .fold(0.0_f64, f64::max)
            .max(1e-3);
        let mut raw = None;
        for shift in [0.0, 0.1234, -0.2718, 0.5772] {
            let shifted = self.shifted(shift * scale);
            if let Ok(eigs) = eigenvalues(shifted.companion()) {
                raw = Some(eigs.into_iter().map(|z| z + shift * scale).collect::<Vec<_>>());
                break;
            }
        }
        let raw = raw.ok_or_else(|| Error::RootFinding("Schur iteration did not converge".into()))?;

        let mut roots = Vec::with_capacity(d);
        for z in raw {
            if z.im > 0.0 {
                let p = self.polish(z);
                roots.push(p);
                roots.push(p.conj());
            } else if z.im == 0.0 {
                roots.push(self.polish(z));
            }
        }
        if roots.len() != d {
            return Err(Error::RootFinding(format!(
                "expected {d} roots, eigen-solver returned {}",
                roots.len()
            )));
        }
        Ok(roots)
    }

    /// `p(z + s)` by repeated synthetic division.
    fn shifted(&self, s: f64) -> Poly {
        if s == 0.0 {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += s * c[j + 1];
            }
        }
        Poly::new(c)
    }

    fn companion(&self) -> DMatrix<f64> {
        let d = self.degree();
        let lead = self.leading();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            m[(i, d - 1)] = -self.coeffs[i] / lead;
        }
        balance(&mut m);
        m
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        let (mut p, _) = self.eval_with_derivative(z);
        for _ in 0..8 {
            let (_, dp) = self.eval_with_derivative(z);
            if dp.norm() == 0.0 || p.norm() == 0.0 {
                break;
            }
            let candidate = z - p / dp;
            let (pc, _) = self.eval_with_derivative(candidate);
            if !(pc.norm() < p.norm()) {
                break;
            }
            z = candidate;
            p = pc;
        }
        z
    }
}

/// Eigenvalues of a general real matrix via the real Schur form.
pub(crate) fn eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::RootFinding("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Diagonal similarity scaling (radix 2) to even out row and column norms
/// before the eigenvalue iteration.
pub(crate) fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= inv;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Largest distance from a point of `a` to its nearest neighbour in `b`, and vice versa.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Greedy one-to-one matching distance between two root multisets of equal size.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for p in a {
        let mut best = None;
        for (j, q) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (p - q).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
