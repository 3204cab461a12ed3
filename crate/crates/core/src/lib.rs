//! Numerical companion to the semiclassical reduction of BCS theory to
//! Gross–Pitaevskii theory for strongly bound fermion pairs.

pub mod cli;
pub mod coupling;
pub mod crossover;
pub mod error;
pub mod exec;
pub mod gap;
pub mod gp;
pub mod quad;
pub mod semiclassics;
pub mod special;
pub mod twobody;

pub use error::{Error, Result};
pub use exec::Execution;
