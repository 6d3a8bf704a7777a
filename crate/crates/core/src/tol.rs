//! Numerical tolerances shared by the library and its tests.

/// Structural checks: Hermiticity, unit trace, normalization, orthonormality,
/// unbiasedness, exact identities.
pub const STRUCTURAL: f64 = 1e-12;

/// Slack allowed below zero when checking positive semidefiniteness.
pub const PSD: f64 = 1e-10;

/// Spectral quantities: eigenvalue sums, traces of projectors, relation gaps.
pub const SPECTRAL: f64 = 1e-9;

/// Hermiticity required of eigensolver input.
pub const HERMITIAN_INPUT: f64 = 1e-10;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// (scaled by the matrix norm when that exceeds one).
pub const JACOBI_OFF: f64 = 1e-13;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Gram-Schmidt candidates with a smaller residual are discarded.
pub const NULLSPACE_RESIDUAL: f64 = 1e-8;
