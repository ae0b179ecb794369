pub mod constant_omega;
pub mod dist;
pub mod error;
pub mod exec;
pub mod linear_omega;
pub mod numerics;
pub mod residual;
pub mod simulate;

pub use error::SolveError;
