//! Bipartite basis states built from a MUB set, the completion projector,
//! the Γ operator and the purity conservation relation.
//!
//! For a state `ρ_AB` on `C^d ⊗ C^D` and `M` MUBs on `A`:
//!
//! ```text
//! Γ_AB = I_A ⊗ ρ_B + (M−1)/d · ρ_AB − Σ_θ ρ_θB
//! Σ_θ (Tr ρ_B² − Tr ρ_θB²)  ≥  (M−1)(Tr ρ_B² − Tr ρ_AB² / d)
//! ```
//!
//! with Γ ≥ 0 for `M ≤ d`, Γ = 0 and equality for `M = d + 1`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, partial_trace, partial_transpose, purity, tensor, ComplexMatrix,
    DensityMatrix, PureState, C64,
};
use crate::mub::{validate_mubs, MubSet};
use crate::tol;

/// `|Φ>`, the `M(d−1)` states `|φ_{θ,k}>`, an orthonormal completion
/// `|φ_α>` and the projector onto the completion.
#[derive(Clone, Debug)]
pub struct BipartiteBasis {
    mubs: MubSet,
    phi: PureState,
    /// `phis[θ−1][k−1]`
    phis: Vec<Vec<PureState>>,
    complement: Vec<PureState>,
    projector: ComplexMatrix,
}

/// `(1/√d) Σ_i ω^{k i} |i_θ> ⊗ |i_θ>^*` with conjugation in the computational
/// basis. `k = 0` gives `|Φ>` for any basis.
fn phased_pair_state(basis: &[PureState], k: usize) -> PureState {
    let d = basis.len();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    let scale = 1.0 / (d as f64).sqrt();
    for (i, v) in basis.iter().enumerate() {
        let w = C64::from_polar(scale, 2.0 * PI * ((k * i) % d) as f64 / d as f64);
        for (a, x) in amps.iter_mut().zip(v.tensor(&v.conj()).amplitudes()) {
            *a += w * x;
        }
    }
    PureState::normalized(amps).expect("pair state is nonzero")
}

/// Orthonormal basis of the orthogonal complement of `span`, found by
/// projecting the computational basis vectors out of it in order.
fn orthonormal_completion(span: &[PureState], dim: usize, want: usize) -> Result<Vec<PureState>> {
    let mut accepted: Vec<Vec<C64>> = Vec::with_capacity(want);
    for c in 0..dim {
        if accepted.len() == want {
            break;
        }
        let mut v = PureState::basis(dim, c).amplitudes().to_vec();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for q in span.iter().map(|s| s.amplitudes()).chain(accepted.iter().map(|a| a.as_slice())) {
                let ov = crate::linalg::inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= ov * y;
                }
            }
        }
        let norm = crate::linalg::vec_norm(&v);
        if norm < tol::NULLSPACE_RESIDUAL {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        accepted.push(v);
    }
    if accepted.len() != want {
        return Err(Error::DimensionMismatch(format!(
            "completion found {} states, expected {want}",
            accepted.len()
        )));
    }
    accepted.into_iter().map(PureState::new).collect()
}

pub fn build_bipartite_basis(mubs: &MubSet) -> Result<BipartiteBasis> {
    let report = validate_mubs(mubs);
    if !report.pass {
        return Err(Error::MubValidation(report.to_string()));
    }
    let d = mubs.d();
    let m = mubs.m();
    let phi = phased_pair_state(&mubs.bases()[0], 0);
    let phis: Vec<Vec<PureState>> = mubs
        .bases()
        .iter()
        .map(|basis| (1..d).map(|k| phased_pair_state(basis, k)).collect())
        .collect();

    let constructed: Vec<PureState> = std::iter::once(phi.clone())
        .chain(phis.iter().flatten().cloned())
        .collect();
    let p = (d - 1) * (d + 1 - m);
    let complement = orthonormal_completion(&constructed, d * d, p)?;

    let projector = constructed
        .iter()
        .fold(ComplexMatrix::identity(d * d), |acc, s| &acc - &s.projector());

    Ok(BipartiteBasis {
        mubs: mubs.clone(),
        phi,
        phis,
        complement,
        projector,
    })
}

/// Gram matrix `G_ab = <s_a|s_b>`.
pub fn gram_matrix(states: &[&PureState]) -> ComplexMatrix {
    let n = states.len();
    ComplexMatrix::from_fn(n, n, |a, b| states[a].inner(states[b]))
}

impl BipartiteBasis {
    pub fn d(&self) -> usize {
        self.mubs.d()
    }

    pub fn m(&self) -> usize {
        self.mubs.m()
    }

    pub fn mubs(&self) -> &MubSet {
        &self.mubs
    }

    pub fn phi(&self) -> &PureState {
        &self.phi
    }

    /// `|φ_{θ,k}>` with 1-based θ and k ∈ 1..d.
    pub fn phi_theta_k(&self, theta: usize, k: usize) -> Result<&PureState> {
        self.mubs.basis(theta)?;
        if k == 0 || k >= self.d() {
            return Err(Error::ParameterRange(format!("k = {k} outside 1..{}", self.d())));
        }
        Ok(&self.phis[theta - 1][k - 1])
    }

    pub fn complement(&self) -> &[PureState] {
        &self.complement
    }

    /// `P = I⊗I − |Φ><Φ| − Σ_{θ,k} |φ_{θ,k}><φ_{θ,k}|`
    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    /// The `M(d−1)+1` states `|Φ>, |φ_{1,1}>, …, |φ_{M,d−1}>`.
    pub fn constructed_states(&self) -> Vec<&PureState> {
        std::iter::once(&self.phi).chain(self.phis.iter().flatten()).collect()
    }

    /// Constructed states followed by the completion; `d²` in total.
    pub fn all_states(&self) -> Vec<&PureState> {
        let mut v = self.constructed_states();
        v.extend(self.complement.iter());
        v
    }

    /// Largest entrywise deviation of the constructed states' Gram matrix
    /// from the identity.
    pub fn constructed_gram_deviation(&self) -> f64 {
        let g = gram_matrix(&self.constructed_states());
        g.max_abs_diff(&ComplexMatrix::identity(g.rows()))
    }

    pub fn full_gram_deviation(&self) -> f64 {
        let g = gram_matrix(&self.all_states());
        g.max_abs_diff(&ComplexMatrix::identity(g.rows()))
    }

    /// `Σ_α |φ_α><φ_α|`
    pub fn projector_from_complement(&self) -> ComplexMatrix {
        let n = self.d() * self.d();
        self.complement
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, s| &acc + &s.projector())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PtIdentityReport {
    /// ‖(|Φ><Φ|)^{T₂} − (1/d) Σ_ij |i><j| ⊗ |j><i|‖_F
    pub phi_deviation: f64,
    /// Per θ: ‖(Σ_k |φ_θk><φ_θk|)^{T₂} − (Σ_i |ii><ii| − (1/d) Σ_ij |i><j|⊗|j><i|)‖_F
    pub theta_deviations: Vec<f64>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// `Σ_ij |i><j| ⊗ |j><i|` over one basis.
fn swap_like(basis: &[PureState]) -> ComplexMatrix {
    let d = basis.len();
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for u in basis {
        for v in basis {
            let a = ComplexMatrix::outer(u.amplitudes(), v.amplitudes());
            let b = ComplexMatrix::outer(v.amplitudes(), u.amplitudes());
            out = &out + &tensor(&a, &b);
        }
    }
    out
}

pub fn check_pt_identities(basis: &BipartiteBasis) -> PtIdentityReport {
    let d = basis.d();
    let inv_d = 1.0 / d as f64;
    let dims = [d, d];

    let lhs = partial_transpose(&basis.phi.projector(), &dims, 1).expect("square d²");
    let rhs = swap_like(&basis.mubs.bases()[0]).scale_real(inv_d);
    let phi_deviation = lhs.frobenius_distance(&rhs);

    let theta_deviations: Vec<f64> = basis
        .mubs
        .bases()
        .iter()
        .zip(&basis.phis)
        .map(|(mub, phis)| {
            let sum = phis
                .iter()
                .fold(ComplexMatrix::zeros(d * d, d * d), |acc, s| &acc + &s.projector());
            let lhs = partial_transpose(&sum, &dims, 1).expect("square d²");
            let diag = mub.iter().fold(ComplexMatrix::zeros(d * d, d * d), |acc, v| {
                &acc + &tensor(&v.projector(), &v.projector())
            });
            let rhs = &diag - &swap_like(mub).scale_real(inv_d);
            lhs.frobenius_distance(&rhs)
        })
        .collect();

    let max_deviation = theta_deviations.iter().copied().fold(phi_deviation, f64::max);
    PtIdentityReport {
        phi_deviation,
        theta_deviations,
        max_deviation,
        pass: max_deviation <= tol::STRUCTURAL,
    }
}

fn check_bipartite(rho: &DensityMatrix, d: usize) -> Result<usize> {
    match rho.dims() {
        [a, big_d] if *a == d => Ok(*big_d),
        dims => Err(Error::DimensionMismatch(format!(
            "expected state dims [{d}, D], got {dims:?}"
        ))),
    }
}

/// `ρ_θB = Σ_i |i_θ><i_θ| ⊗ <i_θ|ρ_AB|i_θ>`, θ 1-based.
pub fn post_measurement_state(rho: &DensityMatrix, mubs: &MubSet, theta: usize) -> Result<DensityMatrix> {
    let basis = mubs.basis(theta)?;
    let big_d = check_bipartite(rho, mubs.d())?;
    Ok(measure_a(rho, basis, big_d))
}

fn measure_a(rho: &DensityMatrix, basis: &[PureState], big_d: usize) -> DensityMatrix {
    let id_b = ComplexMatrix::identity(big_d);
    let n = rho.dim();
    let out = basis.iter().fold(ComplexMatrix::zeros(n, n), |acc, v| {
        let k = tensor(&v.projector(), &id_b);
        &acc + &(&(&k * rho.matrix()) * &k)
    });
    DensityMatrix::from_trusted(rho.dims().to_vec(), out)
}

/// Γ from its definition.
pub fn gamma_direct(rho: &DensityMatrix, mubs: &MubSet) -> Result<ComplexMatrix> {
    let d = mubs.d();
    let big_d = check_bipartite(rho, d)?;
    let rho_b = partial_trace(rho.matrix(), rho.dims(), &[1])?;
    let mut gamma = &tensor(&ComplexMatrix::identity(d), &rho_b)
        + &rho.matrix().scale_real((mubs.m() as f64 - 1.0) / d as f64);
    for basis in mubs.bases() {
        gamma = &gamma - measure_a(rho, basis, big_d).matrix();
    }
    Ok(gamma)
}

/// Γ as `Tr_C{ P_AC^{T_C} ρ_CB }`, evaluated on `H_A ⊗ H_C ⊗ H_B`.
pub fn gamma_via_projector(rho: &DensityMatrix, basis: &BipartiteBasis) -> Result<ComplexMatrix> {
    let d = basis.d();
    let big_d = check_bipartite(rho, d)?;
    let p_tc = partial_transpose(basis.projector(), &[d, d], 1)?;
    let left = tensor(&p_tc, &ComplexMatrix::identity(big_d));
    let right = tensor(&ComplexMatrix::identity(d), rho.matrix());
    partial_trace(&(&left * &right), &[d, d, big_d], &[0, 2])
}

#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct RelationReport {
    pub d: usize,
    pub D: usize,
    pub M: usize,
    pub purity_AB: f64,
    pub purity_B: f64,
    /// Tr ρ_θB², indexed by θ − 1.
    pub purity_thetaB: Vec<f64>,
    /// Tr (Tr_A ρ_θB)², indexed by θ − 1.
    pub purity_B_given_theta: Vec<f64>,
    /// Σ_θ (Tr ρ_B² − Tr ρ_θB²)
    pub lhs: f64,
    /// (M−1)(Tr ρ_B² − Tr ρ_AB² / d)
    pub rhs: f64,
    pub gap: f64,
    /// Tr(Γ ρ) by matrix contraction.
    pub gamma_expectation: f64,
    pub gamma_min_eig: f64,
    pub gamma_frobenius: f64,
    pub equality_expected: bool,
}

impl RelationReport {
    /// The relation holds at `tol::SPECTRAL`: `gap ≥ −tol`, and `|gap| ≤ tol`
    /// when `M = d + 1`.
    pub fn holds(&self) -> bool {
        self.gap >= -tol::SPECTRAL && (!self.equality_expected || self.gap.abs() <= tol::SPECTRAL)
    }

    /// `Tr ρ_B² + (M−1)/d · Tr ρ_AB² − Σ_θ Tr ρ_θB²`
    pub fn gamma_expectation_from_purities(&self) -> f64 {
        self.purity_B + (self.M as f64 - 1.0) / self.d as f64 * self.purity_AB
            - self.purity_thetaB.iter().sum::<f64>()
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d = {}, D = {}, M = {}", self.d, self.D, self.M)?;
        writeln!(f, "  Tr rho_AB^2 = {:.12}", self.purity_AB)?;
        writeln!(f, "  Tr rho_B^2  = {:.12}", self.purity_B)?;
        for (t, (p, q)) in self.purity_thetaB.iter().zip(&self.purity_B_given_theta).enumerate() {
            writeln!(f, "  theta = {}: Tr rho_thetaB^2 = {p:.12}, Tr rho_B|theta^2 = {q:.12}", t + 1)?;
        }
        writeln!(f, "  lhs = {:.12}, rhs = {:.12}, gap = {:.3e}", self.lhs, self.rhs, self.gap)?;
        writeln!(
            f,
            "  Tr(Gamma rho) = {:.12}, min eig(Gamma) = {:.3e}, |Gamma|_F = {:.3e}",
            self.gamma_expectation, self.gamma_min_eig, self.gamma_frobenius
        )?;
        write!(
            f,
            "  {} ({})",
            if self.holds() { "HOLDS" } else { "VIOLATED" },
            if self.equality_expected { "equality expected" } else { "inequality" }
        )
    }
}

pub fn relation_report(rho: &DensityMatrix, mubs: &MubSet) -> Result<RelationReport> {
    let d = mubs.d();
    let big_d = check_bipartite(rho, d)?;
    let m = mubs.m();

    let purity_ab = purity(rho);
    let purity_b = purity(&rho.partial_trace(&[1])?);
    let measured: Vec<DensityMatrix> = mubs.bases().iter().map(|b| measure_a(rho, b, big_d)).collect();
    let purity_theta_b: Vec<f64> = measured.iter().map(purity).collect();
    let purity_b_given: Vec<f64> = measured
        .iter()
        .map(|s| s.partial_trace(&[1]).map(|b| purity(&b)))
        .collect::<Result<_>>()?;

    let lhs: f64 = purity_theta_b.iter().map(|p| purity_b - p).sum();
    let rhs = (m as f64 - 1.0) * (purity_b - purity_ab / d as f64);

    let gamma = gamma_direct(rho, mubs)?;
    let gamma_expectation = gamma.trace_product(rho.matrix()).re;
    let gamma_min_eig = hermitian_eigenvalues(&gamma.hermitian_part())?[0];

    Ok(RelationReport {
        d,
        D: big_d,
        M: m,
        purity_AB: purity_ab,
        purity_B: purity_b,
        purity_thetaB: purity_theta_b,
        purity_B_given_theta: purity_b_given,
        lhs,
        rhs,
        gap: lhs - rhs,
        gamma_expectation,
        gamma_min_eig,
        gamma_frobenius: gamma.frobenius_norm(),
        equality_expected: m == d + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DensityMatrix;
    use crate::mub::construct_mubs;
    use crate::states::{random_density, random_psd, rho_family, WernerFamilyParams};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> DensityMatrix {
        let h = 1.0 / 2f64.sqrt();
        let psi = PureState::new(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        DensityMatrix::from_pure(&psi).with_dims(vec![2, 2]).unwrap()
    }

    #[test]
    fn qubit_complete_basis() {
        let b = build_bipartite_basis(&construct_mubs(2, 3).unwrap()).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expected_phi = [c(h), c(0.0), c(0.0), c(h)];
        for (a, e) in b.phi().amplitudes().iter().zip(expected_phi) {
            assert!((a - e).norm() < 1e-15);
        }
        assert!(b.complement().is_empty());
        assert!(b.projector().frobenius_norm() < 1e-12);

        // ω = −1: (|00> − |11>)/√2
        let phi11 = b.phi_theta_k(1, 1).unwrap();
        let expected = [c(h), c(0.0), c(0.0), c(-h)];
        for (a, e) in phi11.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn qutrit_two_bases_completion() {
        let b = build_bipartite_basis(&construct_mubs(3, 2).unwrap()).unwrap();
        assert_eq!(b.constructed_states().len(), 5);
        assert_eq!(b.complement().len(), 4);
        assert_eq!(b.all_states().len(), 9);
        assert!(b.full_gram_deviation() <= 1e-12);
    }

    #[test]
    fn projector_invariants() {
        for (d, m) in [(2, 2), (3, 2), (3, 3), (5, 3)] {
            let b = build_bipartite_basis(&construct_mubs(d, m).unwrap()).unwrap();
            let p = b.projector();
            let p_sq = p * p;
            assert!(p_sq.frobenius_distance(p) <= 1e-10);
            let rank = ((d - 1) * (d + 1 - m)) as f64;
            assert!((p.trace().re - rank).abs() <= 1e-9);
            assert!(p.max_abs_diff(&b.projector_from_complement()) <= 1e-12);
        }
    }

    #[test]
    fn pt_identities_hold_and_hand_entry() {
        for (d, m) in [(2, 3), (3, 4)] {
            let b = build_bipartite_basis(&construct_mubs(d, m).unwrap()).unwrap();
            let r = check_pt_identities(&b);
            assert!(r.pass, "{r:?}");
            assert_eq!(r.theta_deviations.len(), m);
        }
        let b = build_bipartite_basis(&construct_mubs(2, 3).unwrap()).unwrap();
        let lhs = partial_transpose(&b.phi_theta_k(1, 1).unwrap().projector(), &[2, 2], 1).unwrap();
        assert!((lhs[(0, 0)] - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn bell_z_measurement() {
        let mubs = construct_mubs(2, 3).unwrap();
        let out = post_measurement_state(&bell(), &mubs, 1).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);
        assert!((out.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn measurement_in_eigenbasis_is_non_disturbing() {
        let mubs = construct_mubs(3, 4).unwrap();
        let rho_b = random_density(2, 2, 5).unwrap();
        // ρ_A diagonal in basis θ = 3.
        let basis = mubs.basis(3).unwrap();
        let weights = [0.5, 0.3, 0.2];
        let rho_a = basis
            .iter()
            .zip(weights)
            .fold(ComplexMatrix::zeros(3, 3), |acc, (v, w)| &acc + &v.projector().scale_real(w));
        let rho = DensityMatrix::new(vec![3], rho_a).unwrap().tensor(&rho_b);
        let out = post_measurement_state(&rho, &mubs, 3).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn post_measurement_errors() {
        let mubs = construct_mubs(2, 2).unwrap();
        assert!(matches!(
            post_measurement_state(&bell(), &mubs, 3),
            Err(Error::ThetaOutOfRange { .. })
        ));
        assert!(post_measurement_state(&bell(), &mubs, 0).is_err());
        let wrong = random_density(6, 6, 1).unwrap().with_dims(vec![3, 2]).unwrap();
        assert!(matches!(
            post_measurement_state(&wrong, &mubs, 1),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(gamma_direct(&wrong, &mubs).is_err());
        let flat = random_density(4, 4, 1).unwrap();
        assert!(relation_report(&flat, &mubs).is_err());
    }

    #[test]
    fn werner_singlet_is_isotropic() {
        let mubs = construct_mubs(2, 3).unwrap();
        for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let rho = rho_family(WernerFamilyParams::new(PI / 2.0, x).unwrap());
            for theta in 1..=3 {
                let p = post_measurement_state(&rho, &mubs, theta).unwrap().purity();
                assert!((p - (1.0 + x * x) / 4.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gamma_vanishes_for_complete_sets() {
        let mubs = construct_mubs(2, 3).unwrap();
        for seed in 0..20 {
            let rho = random_density(4, 4, seed).unwrap().with_dims(vec![2, 2]).unwrap();
            assert!(gamma_direct(&rho, &mubs).unwrap().frobenius_norm() <= 1e-10);
        }
        let mubs = construct_mubs(3, 4).unwrap();
        for seed in 0..20 {
            let rho = random_density(9, 9, seed).unwrap().with_dims(vec![3, 3]).unwrap();
            assert!(gamma_direct(&rho, &mubs).unwrap().frobenius_norm() <= 1e-9);
        }
    }

    #[test]
    fn gamma_is_psd_for_two_qubit_bases() {
        let mubs = construct_mubs(2, 2).unwrap();
        for seed in 0..100 {
            let rho = random_density(4, 4, seed).unwrap().with_dims(vec![2, 2]).unwrap();
            let g = gamma_direct(&rho, &mubs).unwrap();
            assert!(g.is_hermitian(1e-12));
            assert!(hermitian_eigenvalues(&g).unwrap()[0] >= -1e-10);
        }
    }

    #[test]
    fn projector_route_matches_definition() {
        for (d, big_d, m) in [(2, 2, 2), (2, 2, 3), (3, 3, 2), (3, 3, 4), (2, 3, 2)] {
            let mubs = construct_mubs(d, m).unwrap();
            let basis = build_bipartite_basis(&mubs).unwrap();
            for seed in 0..10 {
                let rho = random_density(d * big_d, d * big_d, seed)
                    .unwrap()
                    .with_dims(vec![d, big_d])
                    .unwrap();
                let direct = gamma_direct(&rho, &mubs).unwrap();
                let via = gamma_via_projector(&rho, &basis).unwrap();
                assert!(direct.frobenius_distance(&via) <= 1e-10, "d={d} D={big_d} M={m}");
            }
        }
    }

    #[test]
    fn report_closed_forms() {
        let mubs = construct_mubs(2, 3).unwrap();

        let r = relation_report(&bell(), &mubs).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12 && r.gap.abs() < 1e-12);
        assert!((r.purity_AB - 1.0).abs() < 1e-15);

        let zero_zero = DensityMatrix::from_pure(&PureState::basis(4, 0)).with_dims(vec![2, 2]).unwrap();
        let r = relation_report(&zero_zero, &mubs).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert!((r.purity_thetaB[0] - 1.0).abs() < 1e-15);
        assert!((r.purity_thetaB[1] - 0.5).abs() < 1e-15);

        let rho = rho_family(WernerFamilyParams::new(PI / 2.0, 0.5).unwrap());
        let r = relation_report(&rho, &mubs).unwrap();
        assert!((r.purity_AB - 0.4375).abs() < 1e-12);
        for p in &r.purity_thetaB {
            assert!((p - 0.3125).abs() < 1e-12);
        }
        assert!((r.lhs - 0.5625).abs() < 1e-12 && (r.rhs - 0.5625).abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn marginal_unchanged_by_measurement() {
        let mubs = construct_mubs(3, 4).unwrap();
        let rho = random_density(12, 12, 9).unwrap().with_dims(vec![3, 4]).unwrap();
        let before = rho.partial_trace(&[1]).unwrap();
        for theta in 1..=4 {
            let after = post_measurement_state(&rho, &mubs, theta).unwrap().partial_trace(&[1]).unwrap();
            assert!(after.matrix().max_abs_diff(before.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn gamma_pairs_nonnegatively_with_psd_operators() {
        // Tr(Γ Π) ≥ 0 for PSD Π when M ≤ d.
        let mubs = construct_mubs(3, 3).unwrap();
        for seed in 0..20 {
            let rho = random_density(9, 9, seed).unwrap().with_dims(vec![3, 3]).unwrap();
            let g = gamma_direct(&rho, &mubs).unwrap();
            let pi = random_psd(9, 9, 1000 + seed);
            assert!(g.trace_product(&pi).re >= -1e-10);
        }
    }
}
