//! Exact computations with G-lattices: permutation groups, integer normal forms,
//! permutation and norm-one lattices, Tate cohomology, flasque resolutions, and a
//! `p`-invertibility engine classifying when norm one tori of `S_n` and `A_n`
//! extensions are `p`-retract rational.

pub mod classify;
pub mod cohomology;
pub mod error;
pub mod group;
pub mod invertibility;
pub mod lattice;
pub mod linalg;
pub mod perm;
pub mod resolution;

pub use error::{Error, Result};
pub use group::{Family, FiniteGroup, Subgroup};
pub use lattice::GLattice;
pub use linalg::IntMatrix;
pub use perm::Permutation;
