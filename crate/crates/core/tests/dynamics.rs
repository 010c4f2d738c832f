use std::f64::consts::PI;

use epdyn::dynamics::{
    bessel_amplitude, bessel_survival_amplitude, evaluate_approximant, lattice_survival, linear_grid, spectral_survival,
    SpectralPropagator,
};
use epdyn::dynamics::quad::{integrate, QuadOptions};
use epdyn::eppoints::closed_form_eps;
use epdyn::fitting::{loglog_slope, SlopeMode};
use epdyn::{ApproximantForm, EpType, ModelSpec};
use num_complex::Complex64;

#[test]
fn bessel_form_matches_spectral_at_ep2a() {
    let ep = closed_form_eps(&ModelSpec::end_dot(0.1, 0.0)).unwrap()[0];
    let prop = SpectralPropagator::new(&ep.model).unwrap();
    let grid = linear_grid(0.0, 100.0, 201);
    let bessel = bessel_survival_amplitude(ep.lambda, &grid).unwrap();
    for (&t, b) in grid.iter().zip(bessel) {
        let s = prop.amplitude(t).unwrap();
        assert!((s - b).norm() < 1e-6, "t = {t}: {s} vs {b}");
    }
}

#[test]
fn bessel_integral_matches_branch_cut_quadrature() {
    // I = (1/2 pi) int_{-2}^{2} dE sqrt(4 - E^2) e^{-iEt} / (E - E_bar), written in k with E = -2 cos k
    let ep = closed_form_eps(&ModelSpec::end_dot(0.1, 0.0)).unwrap()[0];
    let l = ep.lambda.re;
    let t = 10.0;
    let i = bessel_amplitude(ep.lambda, &[t]).unwrap()[0];
    let opts = QuadOptions { abs_tol: 1e-12, max_width: 0.05, ..Default::default() };
    let direct = integrate(
        |k| {
            let z = Complex64::from_polar(1.0, k);
            let den = (l - z) * (l - z.conj());
            2.0 * l * k.sin().powi(2) * Complex64::new(0.0, 2.0 * t * k.cos()).exp() / den / PI
        },
        0.0,
        PI,
        opts,
    )
    .unwrap();
    assert!((i - direct).norm() < 1e-9, "{i} vs {direct}");
}

#[test]
fn long_time_slopes() {
    let q = closed_form_eps(&ModelSpec::qubit(0.75, 1.0)).unwrap();
    let b = q.iter().find(|e| e.ep_type == Some(EpType::B)).unwrap();
    let grid = linear_grid(100.0, 300.0, 4001);
    let s = spectral_survival(&b.model, &grid).unwrap();
    let slope = loglog_slope(&s, None, SlopeMode::Envelope).unwrap();
    assert!((slope + 3.0).abs() < 0.15, "{slope}");

    let a = ModelSpec::end_dot(0.1, -1.989974);
    let grid: Vec<f64> = (0..=20).map(|i| 1e6 * 10f64.powf(i as f64 / 20.0)).collect();
    let s = spectral_survival(&a, &grid).unwrap();
    let slope = loglog_slope(&s, None, SlopeMode::Direct).unwrap();
    assert!((slope + 3.0).abs() < 0.15, "{slope}");
}

#[test]
fn ep2b_long_anchor_is_reported() {
    let q = closed_form_eps(&ModelSpec::qubit(0.75, 1.0)).unwrap();
    let m = q.iter().find(|e| e.ep_type == Some(EpType::B)).unwrap().model;
    let ts = evaluate_approximant(&ApproximantForm::Ep2bLong { anchor_time: 200.0 }, &m, &[150.0, 250.0]).unwrap();
    let t_a = ts.meta("anchor_time").unwrap();
    assert!((t_a - 200.0).abs() <= PI / 2.0);
    assert!(ts.meta("constant").unwrap() > 0.0);
}

#[test]
fn short_time_is_zeno() {
    let m = ModelSpec::end_dot(0.1, -1.989974);
    let t_z = 1.0 / m.eps_d.abs();
    let grid = linear_grid(0.0, 0.1 * t_z, 11);
    let exact = lattice_survival(&m, &grid, 60).unwrap();
    let zeno = evaluate_approximant(&ApproximantForm::ZenoD, &m, &grid).unwrap();
    for (a, b) in exact.values.iter().zip(&zeno.values) {
        assert!((a - b).abs() < 1e-6);
    }
}
