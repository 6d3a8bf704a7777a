//! Mutually unbiased bases, purity-based uncertainty conservation relations
//! for bipartite states, and a density-matrix simulation of the five-qubit
//! swap-test experiment that measures them.
//!
//! * [`linalg`]: dense complex matrices, partial trace/transpose, Jacobi
//!   eigensolver.
//! * [`mub`]: MUB construction for prime dimensions, validation, JSON I/O.
//! * [`relations`]: bipartite basis states, the completion projector, the
//!   Γ operator and the conservation relation report.
//! * [`states`]: the `ρ(α, x)` family, random states, pseudo-pure deviations.
//! * [`expsim`]: circuit-level register simulation with depolarizing noise
//!   and rescaling.
//! * [`sweep`]: parameter grids and CSV/JSON rows.
//! * [`cli`]: the `purity` command line.

pub mod cli;
pub mod error;
pub mod expsim;
pub mod linalg;
pub mod mub;
pub mod relations;
pub mod states;
pub mod sweep;
pub mod tol;

pub use error::{Error, Result};
