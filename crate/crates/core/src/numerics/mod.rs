//! Numerical kernel shared by the solvers: bracketed root finding, polynomial
//! helpers, adaptive Gauss-Kronrod quadrature, integrals with an integrable
//! endpoint singularity, probabilists' Hermite polynomials, Kummer functions
//! and Bromwich-contour Laplace inversion.

pub mod bromwich;
pub mod hermite;
pub mod kummer;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod singular;

pub use bromwich::{bromwich_invert, BromwichConfig, BromwichRule, Inversion};
pub use hermite::{hermite_prob, hermite_prob_all};
pub use kummer::{kummer_m, kummer_u, kummer_u_prime};
pub use quad::{QuadConfig, QuadResult, QuadValue};
pub use roots::find_root_monotone;
pub use singular::{singular_integral, SingularWeightIntegral, WeightSign};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("quadrature tolerance not met: estimate {estimate:e}, error {error:e}")]
    QuadratureTolerance { estimate: f64, error: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
