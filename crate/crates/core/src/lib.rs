//! Finite-depth dyadic harmonic analysis on the N-torus.
//!
//! The crate realizes Haar-basis operators (paraproducts, martingale
//! projections, dyadic shifts, commutators) as exact linear maps on
//! truncated tensor Haar expansions, computes dyadic oscillation norms
//! (little bmo, product BMO, logarithmic mean oscillation and variants),
//! and drives desk-scale experiments that probe the norm equivalences those
//! operators satisfy.
//!
//! Everything is a pure function over immutable values; results are
//! deterministic given the inputs (and seeds, where randomness is used).

pub mod error;
pub mod expansion;
pub mod geometry;
pub mod io;
pub mod norms;
pub mod opnorm;
pub mod para;
pub mod projection;
pub mod rng;
pub mod shifts;
pub mod signal;

pub use error::{Error, Result};
pub use expansion::{haar_forward, haar_inverse, AxisIndex, HaarExpansion};
pub use geometry::{DyadicInterval, DyadicRectangle, OpenSet, Shape};
pub use signal::{partial_mean, pointwise_product, rect_mean, GridSignal};
