//! Quantum state comparison.
//!
//! Given one copy each of `N` quantum systems, decide whether their states are
//! all identical. This crate builds and simulates the strategies for that task:
//!
//! - [`comparison`]: error-free comparison by projecting onto subspaces that
//!   are invariant under permutations of the systems and under collective
//!   unitaries (the symmetric subspace and the Young-diagram isotypic blocks).
//! - [`discrimination`]: minimum-error and minimum-cost comparison when prior
//!   information about the states is available, via the sign decomposition of
//!   a weighted difference of density matrices.
//! - [`multiport`]: a linear-optics realization with a balanced `N`-port
//!   interferometer and particle counting, including which click patterns
//!   certify a difference.
//!
//! [`hilbert`] and [`symmetry`] provide the dense linear algebra and the
//! symmetric-group machinery underneath. [`reproduce`] bundles the numeric
//! acceptance checks used by the CLI and the `acceptance` test target.
//!
//! All tensor products use the leftmost-slowest Kronecker ordering.

#![forbid(unsafe_code)]

pub mod comparison;
pub mod discrimination;
mod error;
pub mod hilbert;
pub mod multiport;
pub mod reproduce;
pub mod rng;
pub mod symmetry;

pub use error::{Error, Result};
pub use hilbert::{Operator, PureState, C64};
