//! Exact and extended-range number types plus quadrature.

pub mod dyadic;
pub mod exp_bracket;
pub mod logscale;
pub mod quad;
pub mod scaled;

pub use dyadic::Dyadic;
pub use logscale::LogScale;
pub use quad::{TailOptions, TailOutcome};
pub use scaled::Scaled;
