//! Mutually unbiased bases.
//!
//! For prime `d` the full set of `d + 1` bases is built from the
//! computational basis plus the quadratic-phase bases
//! `<s|j_a> = ω^{a s² + j s} / √d`; `d = 2` uses the Pauli eigenbases since
//! the quadratic family degenerates there. Other dimensions can be supplied
//! as JSON files and are accepted only after validation.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{PureState, C64};
use crate::tol;

/// `M` orthonormal bases of `C^d`. Basis `θ` (1-based at the API) is
/// `bases[θ - 1]`; basis 1 is the computational basis for constructed sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    d: usize,
    bases: Vec<Vec<PureState>>,
}

#[derive(Serialize, Deserialize)]
struct MubWire {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    bases: Vec<Vec<Vec<C64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MubReport {
    pub d: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// max |<i_θ|j_θ> − δ_ij|
    pub max_orthonormality_deviation: f64,
    /// max | |<i_θ|j_τ>|² − 1/d | over θ ≠ τ
    pub max_unbiasedness_deviation: f64,
    /// 1-based (θ, i, j) of the worst orthonormality entry.
    pub worst_orthonormality: (usize, usize, usize),
    /// 1-based (θ, i, τ, j) of the worst cross-basis overlap.
    pub worst_unbiasedness: Option<(usize, usize, usize, usize)>,
    pub pass: bool,
}

impl fmt::Display for MubReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MUB set d = {}, M = {}", self.d, self.m)?;
        let (t, i, j) = self.worst_orthonormality;
        writeln!(
            f,
            "  max orthonormality deviation: {:.3e} (basis {t}, vectors {i},{j})",
            self.max_orthonormality_deviation
        )?;
        match self.worst_unbiasedness {
            Some((t, i, u, j)) => writeln!(
                f,
                "  max unbiasedness deviation:   {:.3e} (basis {t} vector {i} vs basis {u} vector {j})",
                self.max_unbiasedness_deviation
            )?,
            None => writeln!(f, "  max unbiasedness deviation:   n/a")?,
        }
        write!(
            f,
            "  {} (tolerance {:e})",
            if self.pass { "PASS" } else { "FAIL" },
            tol::STRUCTURAL
        )
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Rotates the global phase so the first non-negligible amplitude is real
/// and positive.
fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    if let Some(first) = v.iter().find(|a| a.norm() > 1e-14) {
        let phase = first.conj() / first.norm();
        v.iter_mut().for_each(|a| *a *= phase);
    }
    v
}

fn computational_basis(d: usize) -> Vec<PureState> {
    (0..d).map(|i| PureState::basis(d, i)).collect()
}

fn qubit_bases() -> Vec<Vec<PureState>> {
    let h = 1.0 / 2f64.sqrt();
    let re = |v: f64| C64::new(v, 0.0);
    let x = vec![vec![re(h), re(h)], vec![re(h), re(-h)]];
    let y = vec![vec![re(h), C64::new(0.0, h)], vec![re(h), C64::new(0.0, -h)]];
    let mk = |b: Vec<Vec<C64>>| b.into_iter().map(|v| PureState::new(v).unwrap()).collect();
    vec![computational_basis(2), mk(x), mk(y)]
}

fn quadratic_basis(d: usize, a: usize) -> Vec<PureState> {
    let scale = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|j| {
            let amps = (0..d)
                .map(|s| {
                    let k = (a * s * s + j * s) % d;
                    C64::from_polar(scale, 2.0 * PI * k as f64 / d as f64)
                })
                .collect();
            PureState::normalized(fix_phase(amps)).expect("nonzero vector")
        })
        .collect()
}

/// Builds the first `m` bases of the complete set for prime `d`.
pub fn construct_mubs(d: usize, m: usize) -> Result<MubSet> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if !(2..=d + 1).contains(&m) {
        return Err(Error::BasisCount { d, m, max: d + 1 });
    }
    let bases = if d == 2 {
        qubit_bases().into_iter().take(m).collect()
    } else {
        std::iter::once(computational_basis(d))
            .chain((0..m - 1).map(|a| quadratic_basis(d, a)))
            .collect()
    };
    Ok(MubSet { d, bases })
}

pub fn validate_mubs(set: &MubSet) -> MubReport {
    let d = set.d;
    let target = 1.0 / d as f64;
    let mut max_orth = 0.0f64;
    let mut worst_orth = (1, 1, 1);
    let mut max_unb = 0.0f64;
    let mut worst_unb = None;

    for (t, basis) in set.bases.iter().enumerate() {
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                let dev = (u.inner(v) - C64::new(delta, 0.0)).norm();
                if dev > max_orth {
                    max_orth = dev;
                    worst_orth = (t + 1, i + 1, j + 1);
                }
            }
        }
        for (tau, other) in set.bases.iter().enumerate().skip(t + 1) {
            for (i, u) in basis.iter().enumerate() {
                for (j, v) in other.iter().enumerate() {
                    let dev = (u.inner(v).norm_sqr() - target).abs();
                    if worst_unb.is_none() || dev > max_unb {
                        max_unb = dev;
                        worst_unb = Some((t + 1, i + 1, tau + 1, j + 1));
                    }
                }
            }
        }
    }

    MubReport {
        d,
        m: set.bases.len(),
        max_orthonormality_deviation: max_orth,
        max_unbiasedness_deviation: max_unb,
        worst_orthonormality: worst_orth,
        worst_unbiasedness: worst_unb,
        pass: max_orth <= tol::STRUCTURAL && max_unb <= tol::STRUCTURAL,
    }
}

impl MubSet {
    /// Builds and validates a set of bases given as amplitude lists.
    pub fn new(d: usize, bases: Vec<Vec<Vec<C64>>>) -> Result<Self> {
        let set = Self::new_unvalidated(d, bases)?;
        let report = validate_mubs(&set);
        if !report.pass {
            return Err(Error::MubValidation(report.to_string()));
        }
        Ok(set)
    }

    /// Checks shape, count and per-vector normalization only. Unbiasedness
    /// is left to [`validate_mubs`].
    pub fn new_unvalidated(d: usize, bases: Vec<Vec<Vec<C64>>>) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionMismatch(format!("dimension d = {d} < 2")));
        }
        let m = bases.len();
        if !(2..=d + 1).contains(&m) {
            return Err(Error::BasisCount { d, m, max: d + 1 });
        }
        let mut out = Vec::with_capacity(m);
        for (t, basis) in bases.into_iter().enumerate() {
            if basis.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "basis {} has {} vectors, expected {d}",
                    t + 1,
                    basis.len()
                )));
            }
            let mut vecs = Vec::with_capacity(d);
            for (i, amps) in basis.into_iter().enumerate() {
                if amps.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "basis {} vector {} has {} amplitudes, expected {d}",
                        t + 1,
                        i + 1,
                        amps.len()
                    )));
                }
                let state = PureState::new(amps).map_err(|e| {
                    Error::NotNormalized(format!("basis {} vector {}: {e}", t + 1, i + 1))
                })?;
                vecs.push(state);
            }
            out.push(vecs);
        }
        Ok(Self { d, bases: out })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.bases.len()
    }

    /// The θ-th basis, 1-based.
    pub fn basis(&self, theta: usize) -> Result<&[PureState]> {
        if theta == 0 || theta > self.bases.len() {
            return Err(Error::ThetaOutOfRange {
                theta,
                m: self.bases.len(),
            });
        }
        Ok(&self.bases[theta - 1])
    }

    pub fn bases(&self) -> &[Vec<PureState>] {
        &self.bases
    }

    /// Whether basis 1 is the computational basis (up to `tol::STRUCTURAL`).
    pub fn first_is_computational(&self) -> bool {
        self.bases[0].iter().enumerate().all(|(i, v)| {
            v.amplitudes().iter().enumerate().all(|(s, a)| {
                let e = if s == i { 1.0 } else { 0.0 };
                (a - C64::new(e, 0.0)).norm() <= tol::STRUCTURAL
            })
        })
    }

    pub fn to_json(&self) -> String {
        let wire = MubWire {
            d: self.d,
            m: self.bases.len(),
            bases: self
                .bases
                .iter()
                .map(|b| b.iter().map(|v| v.amplitudes().to_vec()).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("MUB JSON serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: MubWire = serde_json::from_str(text)?;
        if wire.m != wire.bases.len() {
            return Err(Error::DimensionMismatch(format!(
                "header says M = {} but {} bases are listed",
                wire.m,
                wire.bases.len()
            )));
        }
        Self::new(wire.d, wire.bases)
    }
}

pub fn save_mubs(set: &MubSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, set.to_json() + "\n")?;
    Ok(())
}

/// Reads a MUB JSON file; the set must pass [`validate_mubs`].
pub fn load_mubs(path: impl AsRef<Path>) -> Result<MubSet> {
    MubSet::from_json(&std::fs::read_to_string(path)?)
}
