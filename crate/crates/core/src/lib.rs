//! Energy of one-dimensional chains built from two alternating particle
//! species, together with the machinery needed to decide when the
//! equidistant arrangement is the ground state at fixed density.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] - zeta/eta evaluation, bisection, an oscillatory cosine
//!   transform and difference quotients, all generic over the scalar type.
//! * [`potentials`] - pair potentials (power law, Gaussian, Morse), the
//!   three-potential species table and its split into convex parts.
//! * [`chain`] - periodic configurations at fixed density and their
//!   per-particle energy with certified truncation bounds.
//! * [`optimize`] - projected gradient descent over the gap simplex and a
//!   seeded multi-start scan.
//! * [`criteria`] - the checkable crystallization criteria (convexity
//!   route, coefficient positivity, coupling window, Fourier necessary
//!   condition, stability spectrum).
//!
//! Everything numeric is generic over [`Scalar`]; `f64` is the default
//! type parameter everywhere and the aliases below pin the concrete
//! double-precision types used by the CLI and the test suite.

pub mod chain;
pub mod criteria;
pub mod numerics;
pub mod optimize;
pub mod potentials;

pub use chain::{energy, energy_and_gradient, energy_gradient, ChainError, Configuration, EnergyReport};
pub use criteria::{
    check_mass_ratio_window, check_riesz_coefficients, check_sufficient_convexity,
    check_sufficient_convexity_at_scale, combined_transform, composite_f, fourier_condition,
    mass_ratio_window, riesz_coefficients, riesz_threshold_exponent, spectrum_values,
    stability_spectrum, window_threshold_exponent, CriteriaError, Criterion, CriterionReport,
    Verdict,
};
pub use numerics::{DecayCertificate, Tolerance};
pub use optimize::{basin_scan, minimize, MinimizeResult, Termination};
pub use potentials::{decompose, ConvexDecomposition, ConvexPart, Potential, PotentialTriple};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented by `f32` and `f64`. Tolerances below the scalar's epsilon
/// are unreachable, so the tight default tolerances only make sense for
/// `f64`; callers instantiating `f32` must loosen them.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + num_traits::NumAssign
        + std::fmt::Debug
        + std::fmt::Display
        + std::iter::Sum
        + Send
        + Sync
        + 'static
{
}

/// Converts an exactly representable `f64` constant into `T`.
pub(crate) fn flt<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant must be representable in the scalar type")
}

/// Double-precision aliases for the main public types.
pub type Tolerance64 = numerics::Tolerance<f64>;
pub type Potential64 = potentials::Potential<f64>;
pub type Triple64 = potentials::PotentialTriple<f64>;
pub type Decomposition64 = potentials::ConvexDecomposition<f64>;
pub type Configuration64 = chain::Configuration<f64>;
pub type EnergyReport64 = chain::EnergyReport<f64>;
pub type MinimizeResult64 = optimize::MinimizeResult<f64>;
