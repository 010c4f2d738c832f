//! Exceptional points and decay dynamics of impurity models coupled to a
//! semi-infinite tight-binding chain.

pub mod dynamics;
pub mod eppoints;
pub mod error;
pub mod fitting;
pub mod models;
pub mod poly;
pub mod spectra;

pub use error::{Error, Result};
pub use models::{Family, ModelSpec, Sheet};
pub use spectra::{DiscreteSpectrum, DiscreteState, DispersionPolynomial, PencilPair, StateClass};
pub use eppoints::{EpRecord, EpType, PuiseuxExpansion, PuiseuxVariable};
pub use dynamics::{ApproximantForm, Method, TimeSeries, Timescales};
pub use fitting::{FitResult, SlopeMode};
