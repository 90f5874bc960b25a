//! Group-sparse signal recovery toolkit.
//!
//! Building blocks for recovering group-sparse vectors from linear
//! measurements and for certifying how well the recovery can do:
//!
//! - [`group`]: partitions, group k-sparse sets, support primitives;
//! - [`norms`]: l1 / group LASSO / sparse group LASSO / tree-structured
//!   norms and decomposability checks;
//! - [`decomposition`]: group k-sparsity index and greedy optimal
//!   decompositions;
//! - [`constants`]: norm-equivalence constants, closed-form and empirical;
//! - [`grip`]: exact restricted-isometry constants over group-sparse
//!   supports on desk-scale matrices;
//! - [`bounds`]: compressibility threshold and recovery error-bound
//!   coefficients;
//! - [`sampling`]: sub-Gaussian sample-complexity estimates and random
//!   measurement matrices;
//! - [`solver`]: constrained norm minimization by Douglas-Rachford
//!   splitting;
//! - [`harness`]: batch experiments that check the error bounds trial by
//!   trial;
//! - [`io`]: file formats (CSV matrices/vectors, JSON descriptors) with
//!   1-based indices on disk.

pub mod bounds;
pub mod constants;
pub mod decomposition;
pub mod error;
pub mod grip;
pub mod group;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod rng;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
