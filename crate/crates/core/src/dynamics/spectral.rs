use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::quad::{integrate, QuadOptions};
use super::{check_grid, Method, TimeSeries};
use crate::error::{Error, Result};
use crate::models::{GreensRational, ModelSpec};
use crate::spectra::{discrete_states, StateClass};

/// Times up to this use the real-axis integral over the band; later times
/// use the steepest-descent contour.
pub const REAL_AXIS_MAX_T: f64 = 20.0;

/// Poles closer than this in `k` are summed together by a contour integral.
const CLUSTER_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
enum PoleTerm {
    /// Isolated pole: `weight * e^{-iEt}`.
    Simple { energy: Complex64, weight: Complex64 },
    /// Residue sum of a pole cluster by the trapezoid rule on a circle.
    Cluster { center: Complex64, radius: f64 },
}

/// Survival amplitude of a model from its impurity Green's function.
///
/// `A(t) = sum_b w_b e^{-i E_b t} + int dE rho(E) e^{-iEt}` with the continuum
/// written in `k` (`E = -2 cos k`). Long times deform the `k` contour along
/// steepest-descent rays from the band edges `k = 0, +-pi`, picking up the
/// resonance poles swept over.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub model: ModelSpec,
    greens: GreensRational,
    bound: Vec<(f64, f64)>,
    crossed: Vec<PoleTerm>,
    /// Depth of the contour vertices `pi/2 - iY` and `-pi/2 + iY`.
    vertex_y: f64,
    pub abs_tol: f64,
}

fn k_of_lambda(lambda: Complex64) -> Complex64 {
    Complex64::new(lambda.arg(), -lambda.norm().ln())
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

fn path_segments(y: f64) -> [(Complex64, Complex64); 4] {
    let v = Complex64::new(FRAC_PI_2, -y);
    let w = Complex64::new(-FRAC_PI_2, y);
    let c = |x: f64| Complex64::new(x, 0.0);
    [(c(0.0), v), (c(PI), v), (c(-PI), w), (c(0.0), w)]
}

fn distance_to_path(k: Complex64, y: f64) -> f64 {
    let mut best = f64::INFINITY;
    for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
        let p = k + shift;
        for (a, b) in path_segments(y) {
            best = best.min(segment_distance(p, a, b));
        }
    }
    best
}

/// Strictly inside the region between `(0, pi)` and the lower contour.
fn inside_lower_triangle(k: Complex64, y: f64) -> bool {
    let x = k.re;
    x > 0.0 && x < PI && k.im < 0.0 && -k.im < y * x.min(PI - x) / FRAC_PI_2
}

impl SpectralPropagator {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        let spectrum = discrete_states(model)?;
        let greens = GreensRational::new(model);

        let mut bound = Vec::new();
        for s in spectrum.bound_states() {
            let w = s.spectral_weight().ok_or(Error::EpDegenerate(0.0))?;
            bound.push((s.energy.re, w.re));
        }

        let poles: Vec<(Complex64, &crate::spectra::DiscreteState)> = spectrum
            .states
            .iter()
            .filter(|s| s.class == StateClass::Resonance)
            .map(|s| (k_of_lambda(s.lambda), s))
            .collect();
        let all_k: Vec<Complex64> = spectrum.states.iter().map(|s| k_of_lambda(s.lambda)).collect();

        // vertex depth keeping every pole well away from the contour
        let mut vertex_y = FRAC_PI_2;
        let mut best_gap = -1.0;
        for y in [FRAC_PI_2, 0.45 * PI, 0.55 * PI, 0.4 * PI, 0.6 * PI, 0.35 * PI, 0.3 * PI] {
            let gap = all_k.iter().map(|&k| distance_to_path(k, y)).fold(f64::INFINITY, f64::min);
            if gap > best_gap + 1e-12 {
                best_gap = gap;
                vertex_y = y;
            }
            if gap > 0.05 {
                break;
            }
        }

        let inside: Vec<(Complex64, &crate::spectra::DiscreteState)> =
            poles.into_iter().filter(|(k, _)| inside_lower_triangle(*k, vertex_y)).collect();
        let mut crossed = Vec::new();
        let mut used = vec![false; inside.len()];
        for i in 0..inside.len() {
            if used[i] {
                continue;
            }
            let mut members = vec![i];
            for j in i + 1..inside.len() {
                if !used[j] && (inside[j].0 - inside[i].0).norm() < CLUSTER_RADIUS {
                    members.push(j);
                }
            }
            members.iter().for_each(|&m| used[m] = true);
            let singleton_weight = if members.len() == 1 { inside[i].1.spectral_weight() } else { None };
            match singleton_weight {
                Some(weight) => crossed.push(PoleTerm::Simple { energy: inside[i].1.energy, weight }),
                None => {
                    let center = members.iter().map(|&m| inside[m].0).sum::<Complex64>() / members.len() as f64;
                    let span = members.iter().map(|&m| (inside[m].0 - center).norm()).fold(0.0, f64::max);
                    let others = all_k
                        .iter()
                        .filter(|k| members.iter().all(|&m| (inside[m].0 - **k).norm() > 0.0))
                        .map(|k| (k - center).norm())
                        .fold(f64::INFINITY, f64::min);
                    let room = others.min(distance_to_path(center, vertex_y));
                    let radius = (4.0 * span).max(CLUSTER_RADIUS).min(0.5 * room);
                    if radius <= 1.5 * span {
                        return Err(Error::InvalidInput("resonance cluster too close to other poles".into()));
                    }
                    crossed.push(PoleTerm::Cluster { center, radius });
                }
            }
        }
        Ok(Self { model: *model, greens, bound, crossed, vertex_y, abs_tol: 1e-13 })
    }

    /// Bound-state energies and weights `|<d|psi_b>|^2`.
    pub fn bound_states(&self) -> &[(f64, f64)] {
        &self.bound
    }

    fn h(&self, k: Complex64, t: f64) -> Complex64 {
        let lambda = (Complex64::i() * k).exp();
        2.0 * k.sin() * (Complex64::i() * 2.0 * t * k.cos()).exp() * self.greens.eval(lambda)
    }

    pub fn amplitude(&self, t: f64) -> Result<Complex64> {
        if t <= REAL_AXIS_MAX_T {
            self.amplitude_real_axis(t)
        } else {
            self.amplitude_deformed(t)
        }
    }

    fn bound_part(&self, t: f64) -> Complex64 {
        self.bound.iter().map(|&(e, w)| w * Complex64::from_polar(1.0, -e * t)).sum()
    }

    /// Integral over the band on the real `k` axis.
    pub fn amplitude_real_axis(&self, t: f64) -> Result<Complex64> {
        let opts = QuadOptions { abs_tol: self.abs_tol, max_width: PI / (16.0 * t.max(1.0)), ..Default::default() };
        let cont = integrate(
            |k| {
                let rho = -self.greens.eval(Complex64::from_polar(1.0, k)).im / PI;
                2.0 * k.sin() * rho * Complex64::from_polar(1.0, 2.0 * t * k.cos())
            },
            0.0,
            PI,
            opts,
        )?;
        Ok(self.bound_part(t) + cont)
    }

    /// Contour through the band edges along steepest-descent rays plus the
    /// residues of the resonances between the band and the contour.
    pub fn amplitude_deformed(&self, t: f64) -> Result<Complex64> {
        if t <= 0.0 {
            return self.amplitude_real_axis(t);
        }
        let y = self.vertex_y;
        let v = Complex64::new(FRAC_PI_2, -y);
        let w = Complex64::new(-FRAC_PI_2, y);
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut path = Complex64::new(0.0, 0.0);
        for (start, end, sign) in [(c(0.0), v, 1.0), (c(PI), v, -1.0), (c(-PI), w, 1.0), (c(0.0), w, -1.0)] {
            path += sign * self.ray(start, end, t)?;
        }
        let mut poles = Complex64::new(0.0, 0.0);
        for term in &self.crossed {
            poles += match *term {
                PoleTerm::Simple { energy, weight } => weight * (-Complex64::i() * energy * t).exp(),
                PoleTerm::Cluster { center, radius } => self.circle_residues(center, radius, t),
            };
        }
        Ok(self.bound_part(t) - path / (2.0 * PI * Complex64::i()) + poles)
    }

    fn ray(&self, start: Complex64, end: Complex64, t: f64) -> Result<Complex64> {
        let d = end - start;
        // |e^{2it cos k}| = exp(2t sin x sinh y), monotone along each ray
        let decay = |u: f64| {
            let k = start + d * u;
            2.0 * t * k.re.sin() * k.im.sinh()
        };
        let mut u_max = 1.0;
        if decay(1.0) < -60.0 {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if decay(mid) < -60.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            u_max = hi;
        }
        let opts = QuadOptions { abs_tol: self.abs_tol, max_width: u_max / 8.0, ..Default::default() };
        integrate(|u| self.h(start + d * u, t) * d, 0.0, u_max, opts)
    }

    fn circle_residues(&self, center: Complex64, radius: f64, t: f64) -> Complex64 {
        let m = 64 + (8.0 * t * radius * center.sin().norm().max(1.0)).ceil() as usize;
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
            sum += self.h(center + z, t) * z;
        }
        sum / m as f64
    }
}

/// Survival probability by spectral integration, valid for arbitrarily long times.
pub fn spectral_survival(model: &ModelSpec, t_grid: &[f64]) -> Result<TimeSeries> {
    check_grid(t_grid)?;
    let prop = SpectralPropagator::new(model)?;
    let values = t_grid
        .iter()
        .map(|&t| prop.amplitude(t).map(|a| a.norm_sqr()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries::new(t_grid.to_vec(), values, Method::Spectral, *model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::LatticePropagator;

    #[test]
    fn completeness_sum_rule() {
        for m in [
            ModelSpec::end_dot(0.4, -2.5),
            ModelSpec::end_dot(0.1, -1.989974),
            ModelSpec::qubit(0.75, 0.3385622),
            ModelSpec::side_dot(4, 0.3, -1.0),
        ] {
            let a0 = SpectralPropagator::new(&m).unwrap().amplitude(0.0).unwrap_or_else(|e| panic!("{m:?}: {e}"));
            assert!((a0 - 1.0).norm() < 1e-8, "{m:?}: {a0}");
        }
    }

    #[test]
    fn bound_state_weight_survives() {
        // a deep bound state keeps its weight forever
        let m = ModelSpec::end_dot(0.5, -3.0);
        let prop = SpectralPropagator::new(&m).unwrap();
        assert_eq!(prop.bound_states().len(), 1);
        let w = prop.bound_states()[0].1;
        let p = prop.amplitude(2000.0).unwrap().norm_sqr();
        assert!((p - w * w).abs() < 1e-6, "{p} vs {}", w * w);
    }

    #[test]
    fn routes_agree_in_overlap() {
        for m in [ModelSpec::end_dot(0.3, -1.2), ModelSpec::qubit(0.75, 0.5), ModelSpec::side_dot(4, 0.2, -1.9)] {
            let prop = SpectralPropagator::new(&m).unwrap();
            for t in [0.5, 5.0, 20.0, 40.0] {
                let a = prop.amplitude_real_axis(t).unwrap();
                let b = prop.amplitude_deformed(t).unwrap();
                assert!((a - b).norm() < 1e-10, "{m:?} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn matches_lattice() {
        let m = ModelSpec::qubit(0.75, 0.3385622);
        let prop = SpectralPropagator::new(&m).unwrap();
        let lat = LatticePropagator::new(&m, 250).unwrap();
        for t in [1.0, 7.5, 25.0, 50.0] {
            let a = prop.amplitude(t).unwrap();
            let b = lat.amplitude(t);
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-9, "t={t}: {a} vs {b}");
        }
    }
}
