use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{check_grid, Method, TimeSeries};
use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};

/// Extra chain sites beyond the light cone `2 v_g t_max` with `v_g = 2`.
pub const REFLECTION_MARGIN: usize = 20;

/// Chain length needed so that nothing reflected from the far end returns to
/// the impurity before `t_max`.
pub fn required_sites(model: &ModelSpec, t_max: f64) -> usize {
    (4.0 * t_max).ceil() as usize + REFLECTION_MARGIN + model.attachment_site()
}

/// Finite-chain Hamiltonian diagonalised once; amplitudes at any time follow
/// from the spectral sum.
#[derive(Debug, Clone)]
pub struct LatticePropagator {
    pub model: ModelSpec,
    pub n_sites: usize,
    energies: Vec<f64>,
    /// Eigenvectors as columns.
    vectors: DMatrix<f64>,
}

impl LatticePropagator {
    pub fn new(model: &ModelSpec, n_sites: usize) -> Result<Self> {
        model.validate()?;
        if n_sites < model.attachment_site() + 1 {
            return Err(Error::InvalidInput(format!("chain of {n_sites} sites is shorter than the attachment site")));
        }
        let h = hamiltonian(model, n_sites);
        let eig = SymmetricEigen::new(h);
        Ok(Self { model: *model, n_sites, energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    /// `<0|e^{-iHt}|0>` for the initial impurity site.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, &e) in self.energies.iter().enumerate() {
            let w = self.vectors[(0, k)] * self.vectors[(0, k)];
            sum += w * Complex64::from_polar(1.0, -e * t);
        }
        sum
    }

    /// Full state `e^{-iHt}|0>` over all sites.
    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let dim = self.dimension();
        let coeffs: Vec<Complex64> = (0..dim)
            .map(|k| self.vectors[(0, k)] * Complex64::from_polar(1.0, -self.energies[k] * t))
            .collect();
        (0..dim)
            .map(|site| (0..dim).map(|k| coeffs[k] * self.vectors[(site, k)]).sum())
            .collect()
    }

    /// `| ||psi(t)||^2 - 1 |`.
    pub fn norm_drift(&self, t: f64) -> f64 {
        (self.state(t).iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs()
    }
}

fn hamiltonian(model: &ModelSpec, n_sites: usize) -> DMatrix<f64> {
    let dots = if model.family == Family::Qubit { 2 } else { 1 };
    let dim = dots + n_sites;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for j in dots..dim - 1 {
        h[(j, j + 1)] = -1.0;
        h[(j + 1, j)] = -1.0;
    }
    let mut couple = |a: usize, b: usize, v: f64| {
        h[(a, b)] = v;
        h[(b, a)] = v;
    };
    match model.family {
        Family::Qubit => {
            couple(0, 1, -model.v);
            couple(1, 2, -model.g);
        }
        Family::EndDot => couple(0, 1, -model.g),
        Family::SideDot => couple(0, model.n as usize, -model.g),
    }
    if model.family != Family::Qubit {
        h[(0, 0)] = model.eps_d;
    }
    h
}

/// Survival probability from exact diagonalisation of a finite chain.
///
/// Refuses chains short enough for the reflected wavefront to return to the
/// impurity within the time grid.
pub fn lattice_survival(model: &ModelSpec, t_grid: &[f64], n_sites: usize) -> Result<TimeSeries> {
    check_grid(t_grid)?;
    let t_max = t_grid.last().copied().unwrap_or(0.0);
    let need = required_sites(model, t_max);
    if n_sites < need {
        return Err(Error::LatticeTooShort { have: n_sites, need, t_max });
    }
    let prop = LatticePropagator::new(model, n_sites)?;
    let values = t_grid.iter().map(|&t| prop.amplitude(t).norm_sqr()).collect();
    let mut ts = TimeSeries::new(t_grid.to_vec(), values, Method::Lattice, *model);
    ts.metadata.push(("n_sites".into(), n_sites as f64));
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::linear_grid;

    #[test]
    fn decoupled_dot_never_decays() {
        let ts = lattice_survival(&ModelSpec::end_dot(0.0, -1.3), &linear_grid(0.0, 10.0, 11), 80).unwrap();
        assert!(ts.values.iter().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn refuses_short_chain() {
        let m = ModelSpec::end_dot(0.3, -1.0);
        let err = lattice_survival(&m, &[0.0, 50.0], 100).unwrap_err();
        assert_eq!(err, Error::LatticeTooShort { have: 100, need: 221, t_max: 50.0 });
    }

    #[test]
    fn zeno_short_time() {
        // 1 - P = g^2 t^2 + O(t^4) for the end dot
        let m = ModelSpec::end_dot(0.1, -1.989974);
        let prop = LatticePropagator::new(&m, 60).unwrap();
        let t = 0.01 / 1.989974;
        let p = prop.amplitude(t).norm_sqr();
        assert!(((1.0 - p) / (t * t) - 0.01).abs() < 1e-4 * 0.01);
    }

    #[test]
    fn unitarity() {
        let prop = LatticePropagator::new(&ModelSpec::side_dot(4, 0.3, -1.5), 200).unwrap();
        for t in [0.0, 10.0, 45.0] {
            assert!(prop.norm_drift(t) < 1e-10);
        }
        assert!((prop.amplitude(0.0).norm_sqr() - 1.0).abs() < 1e-12);
    }
}
