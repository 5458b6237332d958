//! Random integral mappings on infinitely divisible laws.
//!
//! * [`coefficients`]: the Lagrange-type coefficient families and identities.
//! * [`product_law`]: exact laws of products of powers of independent uniforms,
//!   whose CDFs are the time changes of composed random integral mappings.
//! * [`levy`]: Lévy–Khintchine triples and their transforms.
//! * [`integral`]: quadrature of log-characteristic functions, composition
//!   checks and path simulation.
//!
//! The algebraic parts are generic over [`Scalar`] and run on `f32`, `f64` and
//! exact [`BigRational`](num_rational::BigRational).

pub mod coefficients;
pub mod error;
pub mod integral;
pub mod interp;
pub mod levy;
pub mod multiset;
pub mod product_law;
pub mod quadrature;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use levy::{LevyMeasure, LevyTriple};
pub use multiset::BetaMultiset;
pub use product_law::{build_law, ClosedFormLaw, Term};
pub use scalar::{Real, Scalar};

pub type Exact = num_rational::BigRational;
pub type Multiset64 = BetaMultiset<f64>;
pub type ExactMultiset = BetaMultiset<Exact>;
pub type Law64 = ClosedFormLaw<f64>;
pub type ExactLaw = ClosedFormLaw<Exact>;
pub type Triple64 = LevyTriple<f64>;
