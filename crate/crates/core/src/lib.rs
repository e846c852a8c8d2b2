//! Operational multipartite entanglement measures for multi-qubit states.
//!
//! The crate computes the total entanglement up to degree `k` (the best sum of
//! bipartite entanglement-of-formation terms over admissible cluster
//! sequences) and the genuine `k`-partite entanglement obtained by
//! differencing consecutive degrees.

pub mod bipartite;
pub mod cli;
pub mod error;
pub mod loccsim;
pub mod multipartite;
pub mod qcore;
pub mod random;
pub mod states;

pub use error::{EntError, Result};
pub use qcore::{ComplexMatrix, RegisterLayout, StateObject};
pub use states::StateSpec;
