use thiserror::Error;

/// Errors surfaced by the analysis and evaluation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("polynomial is not a valid domain function: {0}")]
    InvalidDomainPolynomial(String),

    #[error("polynomial text is malformed: {0}")]
    ParseError(String),

    #[error("input polynomial is negative at x = {witness}: p(x) = {value}")]
    NegativeWitness { witness: f64, value: f64 },

    #[error("vanishing order {order} at the origin is odd")]
    OddVanishingOrder { order: usize },

    #[error("tau must be positive, got {0}")]
    NonPositiveTau(f64),

    #[error("eta must be nonzero for asymptotic ratios")]
    ZeroEta,

    #[error("eta = {eta} must exceed eta0 = {eta0}")]
    EtaNotAbove { eta: f64, eta0: f64 },

    #[error("x = {x} is not a global minimizer at eta0 = {eta0} (A_x = {a_x})")]
    NotMinimizer { x: f64, eta0: f64, a_x: f64 },

    #[error("delta + A = {0} is not positive")]
    NonPositiveExponentGap(f64),

    #[error("margin and minimizer-set classification disagree: margin = {margin}, in_sigma = {in_sigma}")]
    InconsistentClassification { margin: f64, in_sigma: bool },

    #[error("all comparator coefficients are zero")]
    AllZeroCoefficients,

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("evaluation budget exhausted after {0} integrand evaluations")]
    BudgetExhausted(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
