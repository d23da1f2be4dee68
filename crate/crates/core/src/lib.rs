//! Remez constants, covering invariants and smooth-rigidity bounds for
//! finite point sets in the closed Euclidean unit ball.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: multivariate polynomials, Chebyshev polynomials and
//!   lower-bound maximization over the ball;
//! - [`geometry`]: point sets, example families, separation and l∞ covering
//!   numbers;
//! - [`vitushkin`]: Vitushkin polynomials and the covering invariant `ω_d`;
//! - [`remez`]: the Remez constant through linear programming, an exact
//!   vertex oracle, and measure- and `ω`-based upper bounds;
//! - [`rigidity`]: lower and upper bounds on the smooth rigidity constant,
//!   including the explicit bump-function witness.

pub mod error;
pub mod format;
pub mod geometry;
pub mod poly;
pub mod remez;
pub mod rigidity;
pub mod vitushkin;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/point-sets.md")]
    mod point_sets {}
    #[doc = include_str!("../../../book/src/remez.md")]
    mod remez {}
    #[doc = include_str!("../../../book/src/covering-invariant.md")]
    mod covering_invariant {}
    #[doc = include_str!("../../../book/src/rigidity.md")]
    mod rigidity {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
