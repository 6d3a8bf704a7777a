//! State families: `ρ(α, x) = x|ψ_α><ψ_α| + (1−x) I₄/4` with
//! `|ψ_α> = cos(α/2)|01> − sin(α/2)|10>`, seeded random states, and the
//! labeled pseudo-pure deviation `σ_z ⊗ |0…0><0…0|`.
//!
//! Qubit order: the leftmost label is the most significant index, so
//! `|01>` is basis index 1.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState, C64};

const RANGE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerFamilyParams {
    alpha: f64,
    x: f64,
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !(-RANGE_SLACK..=FRAC_PI_2 + RANGE_SLACK).contains(&alpha) {
        return Err(Error::ParameterRange(format!("alpha = {alpha} outside [0, pi/2]")));
    }
    Ok(alpha.clamp(0.0, FRAC_PI_2))
}

fn check_weight(x: f64) -> Result<f64> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&x) {
        return Err(Error::ParameterRange(format!("x = {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

impl WernerFamilyParams {
    pub fn new(alpha: f64, x: f64) -> Result<Self> {
        Ok(Self {
            alpha: check_alpha(alpha)?,
            x: check_weight(x)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

pub fn psi_alpha(alpha: f64) -> Result<PureState> {
    let alpha = check_alpha(alpha)?;
    let (s, c) = (alpha / 2.0).sin_cos();
    let zero = C64::new(0.0, 0.0);
    PureState::new(vec![zero, C64::new(c, 0.0), C64::new(-s, 0.0), zero])
}

/// `ρ(α, x)` with dims `[2, 2]`.
pub fn rho_family(params: WernerFamilyParams) -> DensityMatrix {
    let psi = psi_alpha(params.alpha).expect("validated alpha");
    let x = params.x;
    let m = &psi.projector().scale_real(x) + &ComplexMatrix::identity(4).scale_real((1.0 - x) / 4.0);
    DensityMatrix::from_trusted(vec![2, 2], m)
}

/// Deterministic generator for sweep point `stream` under a run seed.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn ginibre(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| gaussian_complex(rng));
    (&g * &g.adjoint()).hermitian_part()
}

/// `G G† / Tr(G G†)` with `G` a `dim × rank` matrix of standard complex
/// Gaussians. Dims `[dim]`; refactor with [`DensityMatrix::with_dims`].
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dim, rank, &mut rng_for(seed, 0))
}

pub fn random_density_with(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let w = ginibre(dim, rank, rng);
    let tr = w.trace().re;
    Ok(DensityMatrix::from_trusted(vec![dim], w.scale_real(1.0 / tr)))
}

/// Normalized complex Gaussian vector.
pub fn random_pure_with(dim: usize, rng: &mut ChaCha8Rng) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

pub fn random_pure(dim: usize, seed: u64) -> PureState {
    random_pure_with(dim, &mut rng_for(seed, 0))
}

/// Unnormalized PSD matrix `G G†`.
pub fn random_psd(dim: usize, rank: usize, seed: u64) -> ComplexMatrix {
    ginibre(dim, rank, &mut rng_for(seed, 0))
}

/// `σ_z ⊗ |0…0><0…0|` on `n_qubits`, qubit 0 carrying `σ_z`.
pub fn lpps_deviation(n_qubits: usize) -> Result<ComplexMatrix> {
    if !(2..=16).contains(&n_qubits) {
        return Err(Error::ParameterRange(format!("n_qubits = {n_qubits} outside 2..=16")));
    }
    let n = 1usize << n_qubits;
    let mut m = ComplexMatrix::zeros(n, n);
    m[(0, 0)] = C64::new(1.0, 0.0);
    m[(n / 2, n / 2)] = C64::new(-1.0, 0.0);
    Ok(m)
}
