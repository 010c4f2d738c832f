use thiserror::Error;

use crate::models::Family;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("operation `{op}` does not support the {family} family")]
    UnsupportedFamily { op: &'static str, family: Family },

    #[error("band edge: lambda = {0} is a branch point of the self-energy")]
    BandEdge(f64),

    #[error("exceptional points are not real-valued for g = {0} (requires g < 1)")]
    EpNotReal(f64),

    #[error("state is at an exceptional point; its norm diverges (|dp/dlambda| = {0:e})")]
    EpDegenerate(f64),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("no exceptional point found in window [{lo}, {hi}]")]
    NoEpInWindow { lo: f64, hi: f64 },

    #[error("EP3 not found: {reason} (last bracket g in [{g_lo}, {g_hi}])")]
    Ep3NotFound { reason: String, g_lo: f64, g_hi: f64 },

    #[error("cannot classify exceptional point: {0}")]
    Unclassified(String),

    #[error("Puiseux ladder entered the root clustering regime: {0}")]
    PuiseuxLadder(String),

    #[error("lattice too short: {have} chain sites cannot reach t = {t_max} without reflections; need at least {need}")]
    LatticeTooShort { have: usize, need: usize, t_max: f64 },

    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("approximant {form} is not defined for the {family} family")]
    ApproximantMismatch { form: &'static str, family: Family },

    #[error("ill-posed fit: {0}")]
    IllPosedFit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
