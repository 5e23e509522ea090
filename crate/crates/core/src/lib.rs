//! Singularity and finiteness structure of the Szego kernel for polynomial
//! tube domains in C^2 whose defining function b is an even-degree
//! polynomial with positive leading coefficient, convex or not.
//!
//! The layers build on each other:
//!
//! - [`poly`] / [`roots`]: polynomial arithmetic, root extraction, and the
//!   nonnegative quadratic factorization;
//! - [`legendre`]: global minimizers of the tilted family, the Legendre
//!   transform, gap intervals and the convex envelope (biconjugate);
//! - [`singular`]: classification of point pairs against the singular set
//!   and the convergence margin;
//! - [`quad`]: the Laplace-type normalization integrals and the analytic
//!   comparators bounding them;
//! - [`kernel`]: the kernel integrals themselves, their derivative variants,
//!   and the delta-halving divergence probe.
//!
//! Everything is generic over the scalar type through [`real::Real`];
//! `f64` aliases are exported at the crate root.

pub mod error;
pub mod kernel;
pub mod legendre;
pub mod poly;
pub mod quad;
pub mod real;
pub mod roots;
pub mod singular;
pub mod special;

pub use error::{Error, Result};
pub use real::Real;

/// Concrete `f64` aliases; the intended production scalar type.
pub type Polynomial = poly::Polynomial<f64>;
pub type RootList = roots::RootList<f64>;
pub type QuadraticFactorization = roots::QuadraticFactorization<f64>;
pub type MinimizerSet = legendre::MinimizerSet<f64>;
pub type EnvelopeTable = legendre::EnvelopeTable<f64>;
pub type Gap = legendre::Gap<f64>;
pub type KernelQuery = singular::KernelQuery<f64>;
pub type PairClassification = singular::PairClassification<f64>;
pub type ShiftedPolynomial = quad::ShiftedPolynomial<f64>;
pub type QuadratureResult = quad::QuadratureResult<f64>;
pub type KernelEvaluation = kernel::KernelEvaluation<f64>;
pub type DivergenceProbe = kernel::DivergenceProbe<f64>;

/// `f32` aliases for the algebraic layers (the kernel integrals need `f64`).
pub type Polynomial32 = poly::Polynomial<f32>;
pub type EnvelopeTable32 = legendre::EnvelopeTable<f32>;
