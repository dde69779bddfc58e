//! Exact additive combinatorics in finite groups.
//!
//! Groups are dense Cayley tables, subsets are bit vectors, and every
//! quantitative claim (growth ratios, Ruzsa distances, stabilizer sizes, Bohr
//! set bounds, regularity postconditions) is decided in exact integer or
//! rational arithmetic.

pub mod bogolyubov;
pub mod bohr;
pub mod error;
pub mod group;
pub mod rational;
pub mod report;
pub mod rng;
pub mod set;
pub mod setops;
pub mod setspec;
pub mod suites;
pub mod torus;
pub mod vcdim;

pub use error::{Error, Result};
pub use group::{build_group, BuildOptions, Elem, Group, GroupSpec, Subgroup};
pub use rational::Rational;
pub use set::GroupSet;
