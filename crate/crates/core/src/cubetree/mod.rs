//! Nested dyadic cube families.
//!
//! `Q_0 = [-1, 1]^N`. A level-`n` cube `Q` with center `a` is cut into
//! subcubes of half-side `2^{-j_{n+1}}`; a subcube with center `a'` is selected
//! when
//!
//! ```text
//! 2 * 2^{-l_n} + 2^{-j_{n+1}} <= ‖a - a'‖_∞ <= 2^{-j_n} - 2^{-l_n} - 2^{-j_{n+1}}
//! ```
//!
//! which keeps it at `ℓ∞` distance at least `2^{-l_n}` both from the inner
//! cube `I_Q` (half-side `2^{-l_n}`) and from `∂Q`. Generations are never
//! materialized: cubes are addressed by chains of integer offsets, and all
//! comparisons are exact.

use thiserror::Error;

pub mod geometry;
pub mod measure;
pub mod params;

pub use geometry::{
    children_count, inner_cube, is_selected_child, locate, selected_offsets, Classification, CubeChain,
    DyadicBox, DyadicCube, Location,
};
pub use measure::{generation_measure, generation_measure_by_count, inner_set_lower_bound, MeasureBound};
pub use params::{auto_j, choose_a, validate_params, Mode, ParamSequence, Validation, Violation, DEFAULT_J};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("invalid parameters: {0}")]
    Config(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
}
