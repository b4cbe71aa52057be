//! Computational toolkit for finite approximations of monoids.
//!
//! The crate computes Green's relations and Schützenberger groups of finite
//! monoids, searches Følner sets in amenable groups, and assembles explicit
//! finite `(K, ε)`-actions for monoids whose unit group is sofic and acts
//! locally amenably on the non-units. Every witness can be re-measured by an
//! exact rational defect checker that is independent of the builder.

pub mod builder;
pub mod error;
pub mod fixtures;
pub mod green;
pub mod groups;
pub mod monoid;
pub mod rational;
pub mod witness;

pub use error::{Error, Result};
pub use rational::Rational;
