use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use epdyn::dynamics::{required_sites, LatticePropagator, SpectralPropagator};
use epdyn::eppoints::{locate_ep3, Ep3Window};
use epdyn::fitting::{default_fit_grid, fit_half_powers};
use epdyn::models::lambda_polynomial;
use epdyn::spectra::discrete_states;
use epdyn::{Method, ModelSpec, TimeSeries};

fn spectra(c: &mut Criterion) {
    let side = ModelSpec::side_dot(6, 0.1, -1.95);
    c.bench_function("roots_side_dot_n6", |b| b.iter(|| lambda_polynomial(black_box(&side)).roots().unwrap()));
    c.bench_function("discrete_states_side_dot_n6", |b| b.iter(|| discrete_states(black_box(&side)).unwrap()));
    c.bench_function("locate_ep3_n4", |b| b.iter(|| locate_ep3(4, Ep3Window::default_for(4)).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let end = ModelSpec::end_dot(0.3, -1.5);
    let spectral = SpectralPropagator::new(&end).unwrap();
    c.bench_function("spectral_amplitude_t50", |b| b.iter(|| spectral.amplitude(black_box(50.0)).unwrap()));
    let lattice = LatticePropagator::new(&end, required_sites(&end, 50.0)).unwrap();
    c.bench_function("lattice_amplitude_t50", |b| b.iter(|| lattice.amplitude(black_box(50.0))));
}

fn fitting(c: &mut Criterion) {
    let times = default_fit_grid(32.63);
    let values = times.iter().map(|&t| 1.0 - 0.01 * t.sqrt() + 0.01 * t - 1e-4 * t * t).collect();
    let series = TimeSeries::new(times, values, Method::Lattice, ModelSpec::side_dot(4, 0.0914, -1.958));
    c.bench_function("fit_half_powers_653", |b| b.iter(|| fit_half_powers(black_box(&series), None, None).unwrap()));
}

criterion_group!(benches, spectra, dynamics, fitting);
criterion_main!(benches);
