//! Numerical toolkit for secrecy-outage analysis of wiretap channels with
//! unstable plant dynamics.
//!
//! The crate is organised around the quantities that show up in that
//! analysis:
//!
//! - [`channel`]: network geometry, link budgets, Rayleigh fading draws and
//!   secrecy-rate sampling, plus the linear plant dynamics driving the
//!   observations.
//! - [`volume`]: empirical secrecy-outage probabilities, moment-generating
//!   bounds, entropy-based "volumes" of sample sets, and threshold search.
//! - [`pencil`]: matrix pencils `(B, A)`, contour-integral eigenvalue
//!   counting, a direct generalized eigensolver used as cross-check, Finsler
//!   definiteness certificates, and eigenvector perturbation reports.
//! - [`projection`]: a smooth element-wise projection operator for bounded
//!   parameter updates, random-subspace tail experiments, and projected
//!   diameter checks.
//! - [`policy`]: a two-time-scale tabular natural actor-critic, a value
//!   iteration oracle, and an eigenvalue-ensemble environment.
//! - [`possibilistic`]: possibility distributions, conditioning, max-product
//!   chaining, possibilistic graphs, and a two-mode semi-Markov simulator.
//!
//! All scalar numerics are generic over [`scalar::Real`] (`f32` or `f64`);
//! the `*64` aliases at the crate root fix the common double-precision
//! instantiations. Every sampling routine takes an explicit seed or RNG and
//! is bit-reproducible for a fixed `(inputs, seed)` pair.

pub mod channel;
pub mod linalg;
pub mod pencil;
pub mod policy;
pub mod possibilistic;
pub mod projection;
pub mod rng;
pub mod scalar;
pub mod volume;

pub use scalar::Real;

pub type C<T> = num_complex::Complex<T>;

pub type NetworkGeometry64 = channel::NetworkGeometry<f64>;
pub type LinkBudget64 = channel::LinkBudget<f64>;
pub type LinearDynamics64 = channel::LinearDynamics<f64>;
pub type EmpiricalDistribution64 = volume::EmpiricalDistribution<f64>;
pub type BoundReport64 = volume::BoundReport<f64>;
pub type MatrixPencil64 = pencil::MatrixPencil<f64>;
pub type Contour64 = pencil::Contour<f64>;
pub type ProjectionBounds64 = projection::ProjectionBounds<f64>;
pub type EigenEnsemble64 = policy::EigenEnsemble<f64>;
pub type MdpSpec64 = policy::MdpSpec<f64>;
pub type PossibilityDistribution64 = possibilistic::PossibilityDistribution<f64>;
pub type PossibilisticKernel64 = possibilistic::PossibilisticKernel<f64>;
