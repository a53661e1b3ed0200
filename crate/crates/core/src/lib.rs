//! Spread approximations for `t`-intersecting families in simplicial
//! complexes.
//!
//! The crate covers set families and their derived families, complexes
//! given by facets, exact spreadness measurement, the iterative peeling
//! decomposition into dense traces plus a remainder, an exact branch-and-bound
//! search for maximum `t`-intersecting subfamilies, and Monte Carlo
//! experiments for random-set containment.

pub mod complex;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod face;
pub mod family;
pub mod ingest;
pub mod oracle;
pub mod prob;
pub mod rational;
pub mod rng;
pub mod spreadness;

pub use complex::{BestStar, Complex};
pub use error::{Error, Result};
pub use face::Face;
pub use family::{Derived, SetFamily, TIntersection};
pub use rational::Rational;
