//! Discrete spectra: dispersion polynomials, the linearised pencil, state
//! classification and eigenstate norms.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{characteristic_residual, energy_from_lambda, lambda_polynomial, Family, GreensRational, ModelSpec};
use crate::poly::{self, Poly};

/// Two roots are flagged near-coalescent when `|l_i - l_j| < COALESCENCE_TOL (1 + |l_i|)`.
pub const COALESCENCE_TOL: f64 = 1e-6;
/// Roots failing the unreduced characteristic equation at this relative level are dropped.
pub const SPURIOUS_TOL: f64 = 1e-8;
/// `|Im lambda|` below this (relative) counts as a real root.
const REAL_TOL: f64 = 1e-12;

/// Dispersion polynomial in both the `lambda` and the energy variable.
///
/// The energy form is generated from the `lambda` form by symmetrising under
/// `lambda -> 1/lambda`; it has the same degree and one root per discrete state.
#[derive(Debug, Clone)]
pub struct DispersionPolynomial {
    pub model: ModelSpec,
    pub lambda: Poly,
    pub energy: Poly,
}

pub fn dispersion_polynomial(model: &ModelSpec) -> Result<DispersionPolynomial> {
    model.validate()?;
    let lambda = lambda_polynomial(model);
    // P(w) with w = lambda + 1/lambda = -E
    let energy = lambda.symmetrized_in_w().reflected();
    Ok(DispersionPolynomial { model: *model, lambda, energy })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    Bound,
    Virtual,
    Resonance,
    AntiResonance,
}

impl StateClass {
    pub fn of(energy: Complex64, lambda: Complex64) -> Self {
        if energy.im < 0.0 {
            StateClass::Resonance
        } else if energy.im > 0.0 {
            StateClass::AntiResonance
        } else if lambda.norm() <= 1.0 {
            StateClass::Bound
        } else {
            StateClass::Virtual
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, StateClass::Bound | StateClass::Virtual)
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateClass::Bound => "bound",
            StateClass::Virtual => "virtual",
            StateClass::Resonance => "resonance",
            StateClass::AntiResonance => "anti_resonance",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteState {
    pub energy: Complex64,
    pub lambda: Complex64,
    pub class: StateClass,
    /// `<d|psi><psi~|d>` in the pencil normalisation; `None` when the state is
    /// near-coalescent and the norm diverges.
    pub norm: Option<Complex64>,
}

impl DiscreteState {
    /// Residue of `<d|(E-H)^-1|d>` in the energy plane, `(1 - lambda^2) * norm`.
    /// For a bound state this is the physical weight `|<d|psi>|^2`.
    pub fn spectral_weight(&self) -> Option<Complex64> {
        self.norm.map(|n| (1.0 - self.lambda * self.lambda) * n)
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteSpectrum {
    pub model: ModelSpec,
    /// Sorted by `(Re E, Im E)`.
    pub states: Vec<DiscreteState>,
    /// Index pairs (into `states`) closer than the coalescence tolerance.
    pub near_coalescent: Vec<(usize, usize)>,
}

impl DiscreteSpectrum {
    pub fn lambdas(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.lambda).collect()
    }

    pub fn energies(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    pub fn count(&self, class: StateClass) -> usize {
        self.states.iter().filter(|s| s.class == class).count()
    }

    pub fn bound_states(&self) -> impl Iterator<Item = &DiscreteState> {
        self.states.iter().filter(|s| s.class == StateClass::Bound)
    }
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < COALESCENCE_TOL * (1.0 + a.norm())
}

/// All discrete solutions of the model, classified, with norms.
pub fn discrete_states(model: &ModelSpec) -> Result<DiscreteSpectrum> {
    model.validate()?;
    let greens = GreensRational::new(model);
    let roots = greens.den.roots()?;

    let mut lambdas: Vec<Complex64> = Vec::with_capacity(roots.len());
    for mut z in roots {
        if z.im.abs() <= REAL_TOL * z.norm().max(1.0) {
            z.im = 0.0;
        }
        match characteristic_residual(model, z) {
            Ok(r) if r <= SPURIOUS_TOL => lambdas.push(z),
            _ => {}
        }
    }

    let mut states: Vec<DiscreteState> = lambdas
        .iter()
        .map(|&lambda| {
            let mut energy = energy_from_lambda(lambda);
            if lambda.im == 0.0 {
                energy.im = 0.0;
            }
            DiscreteState { energy, lambda, class: StateClass::of(energy, lambda), norm: None }
        })
        .collect();
    states.sort_by(|a, b| {
        a.energy
            .re
            .total_cmp(&b.energy.re)
            .then(a.energy.im.total_cmp(&b.energy.im))
    });

    let mut near_coalescent = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            if near(states[i].lambda, states[j].lambda) {
                near_coalescent.push((i, j));
            }
        }
    }
    for (i, state) in states.iter_mut().enumerate() {
        let clustered = near_coalescent.iter().any(|&(a, b)| a == i || b == i);
        if !clustered {
            state.norm = Some(norm_from_residue(&greens, state.lambda));
        }
    }
    Ok(DiscreteSpectrum { model: *model, states, near_coalescent })
}

fn norm_from_residue(greens: &GreensRational, lambda: Complex64) -> Complex64 {
    greens.residue(lambda) / (lambda * lambda)
}

/// `<d|psi><psi~|d>` for one state, normalised by `<Psi~|G|Psi> = 1`.
///
/// Computed from the residue of the impurity Green's function in `lambda`,
/// which equals the printed closed forms for the qubit and end-dot models.
pub fn eigenstate_norm(model: &ModelSpec, state: &DiscreteState) -> Result<Complex64> {
    let greens = GreensRational::new(model);
    let (value, dden) = greens.den.eval_with_derivative(state.lambda);
    let scale = greens.den.magnitude_at(state.lambda);
    if value.norm() > 1e-8 * scale {
        return Err(Error::InvalidInput(format!(
            "lambda = {} is not a root of the dispersion polynomial",
            state.lambda
        )));
    }
    // the derivative vanishes linearly with the splitting of a coalescing pair
    if dden.norm() * (1.0 + state.lambda.norm()) <= COALESCENCE_TOL * scale {
        return Err(Error::EpDegenerate(dden.norm()));
    }
    Ok(norm_from_residue(&greens, state.lambda))
}

/// Generalised eigenvalue pencil `(F - lambda G) Psi = 0`.
#[derive(Debug, Clone)]
pub struct PencilPair {
    pub f: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

impl PencilPair {
    pub fn dimension(&self) -> usize {
        self.f.nrows()
    }

    /// Eigenvalues of `G^-1 F` (G is diagonal).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.dimension();
        let mut m = self.f.clone();
        for i in 0..n {
            let gi = self.g[(i, i)];
            if gi == 0.0 {
                return Err(Error::InvalidInput("singular G (g = 1)".into()));
            }
            for j in 0..n {
                m[(i, j)] /= gi;
            }
        }
        poly::balance(&mut m);
        poly::eigenvalues(m)
    }

    /// `det(F - lambda G)` evaluated by cofactor-free LU on a complex copy.
    pub fn determinant_at(&self, lambda: Complex64) -> Complex64 {
        let n = self.dimension();
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            Complex64::new(self.f[(i, j)], 0.0) - lambda * self.g[(i, j)]
        });
        m.determinant()
    }
}

/// Linearisation of the quadratic eigenvalue problem (qubit: 4x4, end dot: 2x2).
pub fn build_pencil(model: &ModelSpec) -> Result<PencilPair> {
    model.validate()?;
    let g2 = model.g * model.g;
    match model.family {
        Family::Qubit => {
            let v = model.v;
            #[rustfmt::skip]
            let f = DMatrix::from_row_slice(4, 4, &[
                0.0, 0.0, 1.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
                1.0, 0.0, 0.0, -v,
                0.0, 1.0, -v, 0.0,
            ]);
            let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, g2 - 1.0]));
            Ok(PencilPair { f, g })
        }
        Family::EndDot => {
            let f = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, model.eps_d]);
            let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, g2 - 1.0]));
            Ok(PencilPair { f, g })
        }
        Family::SideDot => Err(Error::UnsupportedFamily { op: "build_pencil", family: model.family }),
    }
}

/// Product of squared pairwise differences of the `lambda` roots, normalised by
/// the leading coefficient. Vanishes exactly when two roots coalesce.
pub fn root_discriminant(roots: &[Complex64]) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let diff = roots[i] - roots[j];
            d *= diff * diff;
        }
    }
    d
}
