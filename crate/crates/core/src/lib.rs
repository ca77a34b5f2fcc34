//! Spectral Magnus–Zassenhaus propagators for the semiclassical Schrödinger
//! equation `u_t = i eps u_xx - i V(x, t) u / eps` on a periodic interval.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar type. The dense oracle and the benchmark harness are
//! `f64` only.

pub mod algebra;
pub mod bench;
pub mod error;
pub mod integrals;
pub mod krylov;
pub mod oracle;
pub mod propagators;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid64 = spectral::Grid<f64>;
pub type Grid32 = spectral::Grid<f32>;
pub type Wavefunction64 = spectral::Wavefunction<f64>;
pub type Wavefunction32 = spectral::Wavefunction<f32>;
pub type GridFunction64 = spectral::GridFunction<f64>;
pub type GridFunction32 = spectral::GridFunction<f32>;
pub type SymOpSum64 = algebra::SymOpSum<f64>;
pub type SymOpSum32 = algebra::SymOpSum<f32>;
pub type Propagator64 = propagators::Propagator<f64>;
pub type Propagator32 = propagators::Propagator<f32>;
pub type PropagatorConfig64 = propagators::PropagatorConfig<f64>;
pub type PropagatorConfig32 = propagators::PropagatorConfig<f32>;
