//! Discretized maximal operators and radial Fourier multipliers.
//!
//! The crate samples functions on uniform cell-centered grids over `[-L, L]^d`
//! and provides:
//!
//! * [`grid`]: grids, sampling and a Plancherel-faithful discrete Fourier transform,
//! * [`norms`]: `L^p`, pointwise `l^q` and mixed `L^p(l^q)` norms, level-set measures,
//! * [`euclidean_max`]: centered Hardy–Littlewood, weighted and one-dimensional maximal operators,
//! * [`multiplier`]: the sphere multiplier, its smooth dyadic pieces, multiplier maximal
//!   operators, kernels and decay-constant sweeps,
//! * [`squarefn`]: square functions over dilations with `dt/t` weights,
//! * [`rotations`]: Haar rotations and the rotation-descent operator,
//! * [`grushin`]: the Koranyi gauge on `R^d x R` and its maximal operators,
//! * [`scan`]: experiment sweeps producing norm-ratio tables.

pub mod checks;
pub mod error;
pub mod euclidean_max;
pub mod grid;
pub mod grushin;
pub mod multiplier;
pub mod norms;
pub mod quadrature;
pub mod rotations;
pub mod scan;
pub mod squarefn;

pub use error::{Error, Result};
pub use euclidean_max::{default_radii, hl_maximal, maximal_1d, weighted_maximal, RadiiSet};
pub use grid::{Domain, GridFunction, GridSpec, VectorField};
pub use norms::{level_measure, lp_norm, lq_pointwise, mixed_norm, Exponent};
