//! Exceptional points: closed forms, numerical searches, A/B classification
//! and Puiseux expansions.

mod puiseux;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{energy_from_lambda, lambda_from_energy, lambda_polynomial, Family, ModelSpec, Sheet};
use crate::spectra::{discrete_states, StateClass, COALESCENCE_TOL};

pub use puiseux::{puiseux, puiseux_numeric, Exponent, PuiseuxExpansion, PuiseuxVariable};

/// Number of grid points used by [`locate_ep2`] to seed refinements.
pub const SCAN_POINTS: usize = 400;
/// Relative side-sampling offset for classification.
pub const SIDE_OFFSET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EpType {
    A,
    B,
}

impl fmt::Display for EpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpType::A => "A",
            EpType::B => "B",
        })
    }
}

/// One coalescence of `order` discrete states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpRecord {
    /// Model evaluated at the exceptional point (`param()` is V-bar or eps-bar,
    /// `g` is g-bar for EP3 searches).
    pub model: ModelSpec,
    pub energy: Complex64,
    pub lambda: Complex64,
    pub order: u32,
    /// `None` when side sampling was ambiguous.
    pub ep_type: Option<EpType>,
    /// `|threshold - E|` with the nearer band edge `-2` or `+2` as threshold.
    pub gap: f64,
}

impl EpRecord {
    pub fn new(model: ModelSpec, energy: Complex64, lambda: Complex64, order: u32, ep_type: Option<EpType>) -> Self {
        Self { model, energy, lambda, order, ep_type, gap: gap_to_threshold(energy) }
    }

    pub fn param(&self) -> f64 {
        self.model.param()
    }

    /// `1 / gap`, the time after which the threshold dominates.
    pub fn time_scale(&self) -> f64 {
        1.0 / self.gap
    }
}

fn gap_to_threshold(energy: Complex64) -> f64 {
    let threshold = if energy.re > 0.0 { 2.0 } else { -2.0 };
    (Complex64::new(threshold, 0.0) - energy).norm()
}

/// Exceptional points with printed closed forms (qubit and end dot).
pub fn closed_form_eps(model: &ModelSpec) -> Result<Vec<EpRecord>> {
    let g = model.g;
    if g >= 1.0 {
        return Err(Error::EpNotReal(g));
    }
    model.validate()?;
    let g2 = g * g;
    let root = (1.0 - g2).sqrt();
    match model.family {
        Family::Qubit => {
            let mut out = Vec::with_capacity(4);
            for (v, ep_type) in [(1.0 - root, EpType::B), (1.0 + root, EpType::A)] {
                let e2 = ((2.0 - g2) * v * v - g2 * g2) / (2.0 * (1.0 - g2));
                let e = Complex64::new(e2, 0.0).sqrt();
                let at = model.with_param(v);
                // V-bar_B: -i Gamma/2 then +i Gamma/2; V-bar_A: -E then +E
                for mut energy in [-e, e] {
                    if e2 >= 0.0 {
                        energy.im = 0.0;
                    } else {
                        energy.re = 0.0;
                    }
                    let lambda = lambda_from_energy(energy, Sheet::Second);
                    out.push(EpRecord::new(at, energy, lambda, 2, Some(ep_type)));
                }
            }
            Ok(out)
        }
        Family::EndDot => {
            let e_bar = (2.0 - g2) / root;
            let l_bar = 1.0 / root;
            Ok(vec![
                EpRecord::new(
                    model.with_param(-2.0 * root),
                    Complex64::new(-e_bar, 0.0),
                    Complex64::new(l_bar, 0.0),
                    2,
                    Some(EpType::A),
                ),
                EpRecord::new(
                    model.with_param(2.0 * root),
                    Complex64::new(e_bar, 0.0),
                    Complex64::new(-l_bar, 0.0),
                    2,
                    Some(EpType::A),
                ),
            ])
        }
        Family::SideDot => Err(Error::UnsupportedFamily { op: "closed_form_eps", family: model.family }),
    }
}

fn lambda_roots(model: &ModelSpec) -> Result<Vec<Complex64>> {
    lambda_polynomial(model).roots()
}

fn rel_dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + 0.5 * (a + b).norm())
}

fn min_pair_distance(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min(rel_dist(roots[i], roots[j]));
        }
    }
    best
}

/// The pair of roots that is both close together and close to `center`.
fn pair_near(roots: &[Complex64], center: Option<Complex64>) -> Option<(Complex64, Complex64)> {
    let mut best: Option<(f64, Complex64, Complex64)> = None;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let (a, b) = (roots[i], roots[j]);
            let mut score = rel_dist(a, b);
            if let Some(c) = center {
                score += (0.5 * (a + b) - c).norm();
            }
            if best.is_none_or(|(s, _, _)| score < s) {
                best = Some((score, a, b));
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
}

fn count_real(roots: &[Complex64]) -> usize {
    roots.iter().filter(|z| z.im == 0.0).count()
}

fn bisect_real_count(base: &ModelSpec, mut a: f64, mut b: f64, count_a: usize) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if count_real(&lambda_roots(&base.with_param(mid))?) == count_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Refines a two-root coalescence in the swept parameter by a secant iteration
/// on the squared splitting `(l_1 - l_2)^2`, which is analytic and vanishes
/// linearly at the exceptional point.
fn refine_ep2(base: &ModelSpec, p0: f64, p1: f64) -> Result<Option<(f64, Complex64)>> {
    let eval = |p: f64, center: Option<Complex64>| -> Result<Option<(Complex64, Complex64)>> {
        let roots = lambda_roots(&base.with_param(p))?;
        Ok(pair_near(&roots, center).map(|(a, b)| ((a - b) * (a - b), 0.5 * (a + b))))
    };
    let Some((mut q0, c0)) = eval(p0, None)? else { return Ok(None) };
    let Some((mut q1, mut center)) = eval(p1, Some(c0))? else { return Ok(None) };
    let (mut a, mut b) = (p0, p1);
    for _ in 0..80 {
        let dq = q1 - q0;
        if dq.norm() == 0.0 {
            break;
        }
        let step = (q1 * (b - a) / dq).re;
        let next = b - step;
        if !next.is_finite() {
            return Ok(None);
        }
        a = b;
        q0 = q1;
        b = next;
        let Some((q, c)) = eval(b, Some(center))? else { return Ok(None) };
        q1 = q;
        center = c;
        if step.abs() <= 1e-15 * b.abs().max(1.0) {
            break;
        }
    }
    let scale = 1.0 + center.norm();
    if q1.norm().sqrt() > 1e-5 * scale {
        return Ok(None);
    }
    Ok(Some((b, center)))
}

/// Scans `window` in the family's swept parameter (V or eps_d) at the fixed
/// coupling of `base` and returns every two-state coalescence found.
pub fn locate_ep2(base: &ModelSpec, window: (f64, f64)) -> Result<Vec<EpRecord>> {
    locate_ep2_with(base, window, SCAN_POINTS)
}

pub fn locate_ep2_with(base: &ModelSpec, window: (f64, f64), points: usize) -> Result<Vec<EpRecord>> {
    base.validate()?;
    let (lo, hi) = window;
    if !(lo < hi) || points < 3 {
        return Err(Error::InvalidInput(format!("bad scan window [{lo}, {hi}]")));
    }
    let h = (hi - lo) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| lo + h * i as f64).collect();
    let mut dist = Vec::with_capacity(points);
    let mut real_count = Vec::with_capacity(points);
    for &p in &grid {
        let roots = lambda_roots(&base.with_param(p))?;
        dist.push(min_pair_distance(&roots));
        real_count.push(count_real(&roots));
    }

    // Two seed sources: a change in the number of real roots brackets every
    // real double root, even when another pair is globally closer; local
    // minima of the closest-pair distance catch complex coalescences.
    let mut located: Vec<f64> = Vec::new();
    for i in 0..points - 1 {
        if real_count[i] != real_count[i + 1] {
            located.push(bisect_real_count(base, grid[i], grid[i + 1], real_count[i])?);
        }
    }
    for i in 1..points - 1 {
        if dist[i] < dist[i - 1] && dist[i] <= dist[i + 1] {
            if let Some((p_bar, _)) = refine_ep2(base, grid[i - 1], grid[i + 1])? {
                if p_bar >= lo - h && p_bar <= hi + h {
                    located.push(p_bar);
                }
            }
        }
    }

    let mut found: Vec<EpRecord> = Vec::new();
    for p_bar in located {
        let at = base.with_param(p_bar);
        let roots = lambda_roots(&at)?;
        for j in 0..roots.len() {
            for k in j + 1..roots.len() {
                let (a, b) = (roots[j], roots[k]);
                if rel_dist(a, b) > 1e-5 {
                    continue;
                }
                let mut lambda = 0.5 * (a + b);
                if lambda.im.abs() < 1e-9 * lambda.norm().max(1.0) {
                    lambda.im = 0.0;
                }
                let duplicate = found
                    .iter()
                    .any(|r| (r.param() - p_bar).abs() < 1e-8 * p_bar.abs().max(1.0) && rel_dist(r.lambda, lambda) < 1e-4);
                if duplicate {
                    continue;
                }
                let mut energy = energy_from_lambda(lambda);
                if lambda.im == 0.0 {
                    energy.im = 0.0;
                }
                let mut rec = EpRecord::new(at, energy, lambda, 2, None);
                rec.ep_type = classify_ep(&rec).ok();
                found.push(rec);
            }
        }
    }
    found.sort_by(|a, b| a.param().total_cmp(&b.param()).then(a.energy.im.total_cmp(&b.energy.im)));
    Ok(found)
}

/// Classes of the `order` states nearest `lambda` for the model at `p`.
fn group_classes(ep: &EpRecord, p: f64) -> Result<Option<Vec<StateClass>>> {
    let spectrum = discrete_states(&ep.model.with_param(p))?;
    let mut states = spectrum.states.clone();
    states.sort_by(|a, b| (a.lambda - ep.lambda).norm().total_cmp(&(b.lambda - ep.lambda).norm()));
    let k = ep.order as usize;
    if states.len() < k {
        return Ok(None);
    }
    let group = &states[..k];
    // still inside the numerical clustering regime
    for i in 0..k {
        for j in i + 1..k {
            if (group[i].lambda - group[j].lambda).norm() < 10.0 * COALESCENCE_TOL * (1.0 + group[i].lambda.norm()) {
                return Ok(None);
            }
        }
    }
    Ok(Some(group.iter().map(|s| s.class).collect()))
}

fn side_type(left: &[StateClass], right: &[StateClass]) -> Option<EpType> {
    let all = |s: &[StateClass], c: StateClass| s.iter().all(|&x| x == c);
    let has = |s: &[StateClass], c: StateClass| s.contains(&c);
    let b_like = |s: &[StateClass]| all(s, StateClass::Resonance) || all(s, StateClass::AntiResonance);
    if b_like(left) && b_like(right) && left[0] == right[0] {
        return Some(EpType::B);
    }
    let mixed = |s: &[StateClass]| has(s, StateClass::Resonance) && has(s, StateClass::AntiResonance);
    let real = |s: &[StateClass]| s.iter().all(|c| c.is_real());
    let a_side = |s: &[StateClass]| mixed(s) || real(s);
    if a_side(left) && a_side(right) && (mixed(left) || mixed(right)) {
        let reals = |s: &[StateClass]| s.iter().filter(|c| c.is_real()).count();
        if left.len() == 3 || reals(left) != reals(right) {
            return Some(EpType::A);
        }
    }
    None
}

/// A/B classification by sampling the coalescing states on both sides of the
/// exceptional point in the swept parameter.
pub fn classify_ep(ep: &EpRecord) -> Result<EpType> {
    let p = ep.param();
    let mut offset = SIDE_OFFSET * p.abs().max(1.0);
    for _ in 0..2 {
        let left = group_classes(ep, p - offset)?;
        let right = group_classes(ep, p + offset)?;
        if let (Some(l), Some(r)) = (left, right) {
            if let Some(t) = side_type(&l, &r) {
                return Ok(t);
            }
        }
        offset *= 10.0;
    }
    Err(Error::Unclassified(format!(
        "{} exceptional point at {} = {p}",
        ep.model.family,
        ep.model.family.param_name()
    )))
}

/// Search window for [`locate_ep3`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ep3Window {
    pub g: (f64, f64),
    pub eps: (f64, f64),
}

impl Ep3Window {
    /// A window that brackets the lower-edge merger for `n` in 2..=6.
    pub fn default_for(n: u32) -> Self {
        match n {
            0..=2 => Ep3Window { g: (0.15, 0.5), eps: (-2.4, -1.5) },
            3..=4 => Ep3Window { g: (0.04, 0.2), eps: (-2.3, -1.85) },
            _ => Ep3Window { g: (0.015, 0.12), eps: (-2.2, -1.9) },
        }
    }
}

/// The two A-type lower-edge coalescences of virtual states at coupling `g`.
fn ep2a_pair(base: &ModelSpec, g: f64, eps: (f64, f64), points: usize) -> Result<Option<(EpRecord, EpRecord)>> {
    let model = base.with_g(g);
    let eps_list: Vec<EpRecord> = locate_ep2_with(&model, eps, points)?
        .into_iter()
        // near the triple point the cluster is conditioned like eps^(1/3)
        .filter(|r| r.lambda.im.abs() < 1e-5 && r.lambda.re > 1.0)
        .collect();
    if eps_list.len() < 2 {
        return Ok(None);
    }
    // the adjacent pair with the smallest separation
    let mut best = None;
    for w in eps_list.windows(2) {
        let d = w[1].param() - w[0].param();
        if best.as_ref().is_none_or(|(bd, _, _): &(f64, EpRecord, EpRecord)| d < *bd) {
            best = Some((d, w[0], w[1]));
        }
    }
    Ok(best.map(|(_, a, b)| (a, b)))
}

/// Solves `F = F' = F'' = 0` for the side dot, where `F` is the lambda
/// polynomial. For fixed lambda the first two conditions are linear in
/// `(eps_d, g^2)`; the third is then a scalar equation in lambda.
fn triple_root(n: u32, lambda0: f64) -> Option<(f64, f64, f64)> {
    let n = n as i32;
    // S = sum_{j=1..n} l^{2j} and its derivatives
    let s = |l: f64| -> (f64, f64, f64) {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for j in 1..=n {
            let e = 2 * j;
            s0 += l.powi(e);
            s1 += e as f64 * l.powi(e - 1);
            s2 += (e * (e - 1)) as f64 * l.powi(e - 2);
        }
        (s0, s1, s2)
    };
    let solve = |l: f64| -> Option<(f64, f64, f64)> {
        let (s0, s1, s2) = s(l);
        // eps l - G s0 = -(1 + l^2);  eps - G s1 = -2 l
        let det = l * s1 - s0;
        if det.abs() < 1e-300 {
            return None;
        }
        let big_g = (l * l - 1.0) / det;
        let eps = -2.0 * l + big_g * s1;
        Some((eps, big_g, 2.0 - big_g * s2))
    };
    let (mut a, mut b) = (lambda0, lambda0 * (1.0 + 1e-4));
    let mut fa = solve(a)?.2;
    let mut fb = solve(b)?.2;
    for _ in 0..100 {
        if fb == fa {
            break;
        }
        let next = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = next;
        fb = solve(b)?.2;
        if (b - a).abs() < 1e-15 * b.abs() {
            break;
        }
    }
    let (eps, big_g, resid) = solve(b)?;
    if resid.abs() > 1e-9 || big_g <= 0.0 || b <= 1.0 {
        return None;
    }
    Some((b, eps, big_g.sqrt()))
}

/// Locates the order-3 coalescence of the side-coupled dot where the two
/// lower-edge EP2As merge.
///
/// The pair is tracked by continuation in `g` with step halving; once the
/// merger is bracketed to `1e-8` in `g`, the triple root is solved for
/// directly from the merger estimate.
pub fn locate_ep3(n: u32, window: Ep3Window) -> Result<EpRecord> {
    let base = ModelSpec::side_dot(n, window.g.0, window.eps.0);
    base.validate()?;
    if n % 2 == 1 {
        return Err(Error::InvalidModel(format!("EP3 search requires even n, got {n}")));
    }
    let not_found = |reason: &str, lo: f64, hi: f64| Error::Ep3NotFound { reason: reason.into(), g_lo: lo, g_hi: hi };

    let (g_lo, g_hi) = window.g;
    let Some(mut pair) = ep2a_pair(&base, g_lo, window.eps, SCAN_POINTS)? else {
        return Err(not_found("no EP2A pair at the lower end of the g window", g_lo, g_hi));
    };
    let mut g = g_lo;
    let mut step = (g_hi - g_lo) / 40.0;
    let mut history: Vec<(f64, f64, f64)> = vec![(g, pair.0.param(), pair.1.param())];
    let mut g_fail = f64::NAN;
    while step > 1e-8 {
        let g_try = g + step;
        if g_try > g_hi {
            step *= 0.5;
            if g + step >= g_hi {
                break;
            }
            continue;
        }
        let sep = pair.1.param() - pair.0.param();
        let local = (pair.0.param() - 2.0 * sep - 0.02, pair.1.param() + 2.0 * sep + 0.02);
        let local = (local.0.max(window.eps.0), local.1.min(window.eps.1));
        match ep2a_pair(&base, g_try, local, 200)? {
            Some(next) => {
                g = g_try;
                pair = next;
                history.push((g, pair.0.param(), pair.1.param()));
            }
            None => {
                g_fail = g_try;
                step *= 0.5;
            }
        }
    }
    if g_fail.is_nan() {
        return Err(not_found("EP2A branches do not merge inside the g window", g_lo, g_hi));
    }
    let lambda0 = 0.5 * (pair.0.lambda.re + pair.1.lambda.re);
    let Some((lambda, eps, g_bar)) = triple_root(n, lambda0) else {
        return Err(not_found("triple-root refinement failed", g, g_fail));
    };
    // the tracked pair is lost slightly before the merger once the two
    // coalescences are closer than the local scan can resolve
    if (g_bar - g).abs() > 5e-3 * g_bar || eps < window.eps.0 || eps > window.eps.1 {
        return Err(not_found("refined triple root left the tracked bracket", g, g_fail));
    }
    let model = ModelSpec::side_dot(n, g_bar, eps);
    let lam = Complex64::new(lambda, 0.0);
    let mut rec = EpRecord::new(model, energy_from_lambda(lam), lam, 3, None);
    rec.energy.im = 0.0;
    rec.ep_type = classify_ep(&rec).ok();
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn qubit_closed_form_locations() {
        let eps = closed_form_eps(&ModelSpec::qubit(0.75, 1.0)).unwrap();
        assert_eq!(eps.len(), 4);
        assert_abs_diff_eq!(eps[0].param(), 0.33856, epsilon = 1e-5);
        assert_abs_diff_eq!(eps[2].param(), 1.66144, epsilon = 1e-5);
        assert_eq!(eps[0].ep_type, Some(EpType::B));
        assert_eq!(eps[3].ep_type, Some(EpType::A));
        // sqrt((2 - g^2)/sqrt(1 - g^2) - 2) at g = 0.75
        assert_abs_diff_eq!(eps[0].energy.im, -0.4162880250536, epsilon = 1e-12);
        assert_abs_diff_eq!(eps[0].energy.re, 0.0);
    }

    #[test]
    fn end_dot_closed_form() {
        let eps = closed_form_eps(&ModelSpec::end_dot(0.1, 0.0)).unwrap();
        assert_abs_diff_eq!(eps[0].param(), -1.989975, epsilon = 1e-6);
        assert_abs_diff_eq!(eps[0].energy.re, -2.0000253, epsilon = 1e-7);
        let eps = closed_form_eps(&ModelSpec::end_dot(0.9, 0.0)).unwrap();
        assert_abs_diff_eq!(eps[0].energy.re, -2.73005, epsilon = 1e-5);
        assert_abs_diff_eq!(eps[0].param(), -0.87178, epsilon = 1e-5);
        assert_abs_diff_eq!(eps[1].param(), 0.87178, epsilon = 1e-5);
        assert!(matches!(closed_form_eps(&ModelSpec::end_dot(1.2, 0.0)), Err(Error::EpNotReal(_))));
    }

    #[test]
    fn closed_form_lambda_is_double_root() {
        for m in [ModelSpec::qubit(0.75, 1.0), ModelSpec::end_dot(0.4, 0.0)] {
            for ep in closed_form_eps(&m).unwrap() {
                let p = lambda_polynomial(&ep.model);
                let (v, d) = p.eval_with_derivative(ep.lambda);
                let s = p.magnitude_at(ep.lambda);
                assert!(v.norm() < 1e-12 * s && d.norm() < 1e-7 * s, "{ep:?}");
                assert!((energy_from_lambda(ep.lambda) - ep.energy).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_search_recovers_closed_forms() {
        let m = ModelSpec::qubit(0.75, 1.0);
        let found = locate_ep2(&m, (0.1, 2.0)).unwrap();
        let want = closed_form_eps(&m).unwrap();
        assert_eq!(found.len(), 4, "{found:#?}");
        for w in &want {
            let hit = found
                .iter()
                .find(|f| (f.energy - w.energy).norm() < 1e-6)
                .unwrap_or_else(|| panic!("missing {w:?}"));
            assert_abs_diff_eq!(hit.param(), w.param(), epsilon = 1e-8);
            assert_eq!(hit.ep_type, w.ep_type);
        }
    }

    #[test]
    fn end_dot_search() {
        let found = locate_ep2(&ModelSpec::end_dot(0.5, 0.0), (-2.0, -1.5)).unwrap();
        assert_eq!(found.len(), 1);
        assert_abs_diff_eq!(found[0].param(), -1.73205, epsilon = 1e-5);
        assert_eq!(found[0].ep_type, Some(EpType::A));
    }

    #[test]
    fn empty_window_gives_no_eps() {
        assert!(locate_ep2(&ModelSpec::end_dot(0.5, 0.0), (-1.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn side_dot_ep2a_pair() {
        let found = locate_ep2(&ModelSpec::side_dot(4, 0.06, 0.0), (-2.2, -1.9)).unwrap();
        let lower: Vec<_> = found.iter().filter(|r| r.lambda.im == 0.0 && r.lambda.re > 1.0).collect();
        assert_eq!(lower.len(), 2, "{found:#?}");
        assert!((lower[0].param() + 2.07).abs() < 0.01, "{}", lower[0].param());
        assert!((lower[1].param() + 1.985).abs() < 0.01, "{}", lower[1].param());
        assert!(lower.iter().all(|r| r.ep_type == Some(EpType::A)));
    }

    #[test]
    fn ep3_n4() {
        let ep = locate_ep3(4, Ep3Window::default_for(4)).unwrap();
        assert_abs_diff_eq!(ep.model.g, 0.0914264, epsilon = 1e-7);
        assert_abs_diff_eq!(ep.param(), -1.958109, epsilon = 1e-6);
        assert_abs_diff_eq!(ep.energy.re, -2.030646, epsilon = 1e-6);
        assert_abs_diff_eq!(ep.gap, 0.030646, epsilon = 1e-6);
        assert_eq!(ep.order, 3);
        assert_eq!(ep.ep_type, Some(EpType::A));
    }

    #[test]
    fn ep3_n6() {
        let ep = locate_ep3(6, Ep3Window::default_for(6)).unwrap();
        assert_abs_diff_eq!(ep.model.g, 0.04946448, epsilon = 1e-7);
        assert_abs_diff_eq!(ep.param(), -1.9816623, epsilon = 1e-7);
        assert_abs_diff_eq!(ep.energy.re, -2.0131867, epsilon = 1e-7);
    }

    #[test]
    fn ep3_not_found_outside_window() {
        let w = Ep3Window { g: (0.02, 0.05), eps: (-2.3, -1.85) };
        assert!(matches!(locate_ep3(4, w), Err(Error::Ep3NotFound { .. })));
    }
}
