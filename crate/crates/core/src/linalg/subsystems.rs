//! Tensor products and operations on individual tensor factors.
//!
//! Subsystem 0 is the leftmost factor; multi-indices are flattened row-major,
//! so the last subsystem varies fastest.

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

fn check_square(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!("invalid dims {dims:?}")));
    }
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on subsystems {dims:?} (expected {n}x{n})",
            m.rows(),
            m.cols()
        )));
    }
    Ok(n)
}

/// Digits of `index` in the mixed radix given by `dims`.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn flatten(digits: impl IntoIterator<Item = usize>, dims: impl IntoIterator<Item = usize>) -> usize {
    digits
        .into_iter()
        .zip(dims)
        .fold(0, |acc, (digit, d)| acc * d + digit)
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems
/// appear in their original order regardless of the order of `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = check_square(m, dims)?;
    if keep.is_empty() {
        return Err(Error::DimensionMismatch("keep set is empty".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidSubsystem {
            index: bad,
            count: dims.len(),
        });
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|i| keep.contains(i)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dim: usize = kept.iter().map(|&i| dims[i]).product();

    let mut keep_idx = Vec::with_capacity(n);
    let mut trace_idx = Vec::with_capacity(n);
    for r in 0..n {
        let dg = digits(r, dims);
        keep_idx.push(flatten(kept.iter().map(|&i| dg[i]), kept.iter().map(|&i| dims[i])));
        trace_idx.push(flatten(
            traced.iter().map(|&i| dg[i]),
            traced.iter().map(|&i| dims[i]),
        ));
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for r in 0..n {
        for c in 0..n {
            if trace_idx[r] == trace_idx[c] {
                out[(keep_idx[r], keep_idx[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Transposes the given tensor factor in the computational basis:
/// `(.., i_s, .. ; .., j_s, ..) ↦ (.., j_s, .. ; .., i_s, ..)`.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
    let n = check_square(m, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            count: dims.len(),
        });
    }
    let stride: usize = dims[subsystem + 1..].iter().product();
    let d = dims[subsystem];
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let dr = (r / stride) % d;
        for c in 0..n {
            let dc = (c / stride) % d;
            let r2 = r - dr * stride + dc * stride;
            let c2 = c - dc * stride + dr * stride;
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Embeds an operator acting on consecutive subsystems `first..first+k`
/// (whose dimensions multiply to `op.rows()`) into the full space.
pub fn embed(op: &ComplexMatrix, dims: &[usize], first: usize) -> Result<ComplexMatrix> {
    let mut span = 1;
    let mut last = first;
    while span < op.rows() && last < dims.len() {
        span *= dims[last];
        last += 1;
    }
    if span != op.rows() || !op.is_square() || first >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot embed {}x{} operator at subsystem {first} of {dims:?}",
            op.rows(),
            op.cols()
        )));
    }
    let before: usize = dims[..first].iter().product();
    let after: usize = dims[last..].iter().product();
    Ok(tensor(
        &tensor(&ComplexMatrix::identity(before), op),
        &ComplexMatrix::identity(after),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{C64, ZERO};

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn basis_projector_tensor() {
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let t = tensor(&p0, &p1);
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(1, 1)] = C64::new(1.0, 0.0);
        assert_eq!(t, expected);
    }

    #[test]
    fn zz_is_diag() {
        assert_eq!(
            tensor(&pauli_z(), &pauli_z()),
            ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn rectangular_tensor() {
        let a = ComplexMatrix::from_real(1, 2, &[1.0, 2.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 1, &[3.0, 4.0]).unwrap();
        let t = tensor(&a, &b);
        assert_eq!((t.rows(), t.cols()), (2, 2));
        assert_eq!(t, ComplexMatrix::from_real(2, 2, &[3.0, 6.0, 4.0, 8.0]).unwrap());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let h = 1.0 / 2f64.sqrt();
        let bell = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let rho = ComplexMatrix::outer(&bell, &bell);
        let rb = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(rb.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_three_factors_keeps_order() {
        let a = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        let b = ComplexMatrix::from_real_diag(&[0.5, 0.2, 0.3]);
        let c = ComplexMatrix::from_real(2, 2, &[0.6, 0.1, 0.1, 0.4]).unwrap();
        let abc = tensor_all([&a, &b, &c]);
        let ac = partial_trace(&abc, &[2, 3, 2], &[2, 0]).unwrap();
        assert!(ac.max_abs_diff(&tensor(&a, &c)) < 1e-15);
        let only_b = partial_trace(&abc, &[2, 3, 2], &[1]).unwrap();
        assert!(only_b.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[2]),
            Err(Error::InvalidSubsystem { index: 2, count: 2 })
        ));
        assert!(partial_trace(&m, &[2, 3], &[0]).is_err());
        assert!(partial_trace(&m, &[2, 2], &[]).is_err());
    }

    #[test]
    fn partial_transpose_moves_entries() {
        // |0><1| ⊗ |0><1|: transposing the second factor gives |0><1| ⊗ |1><0|.
        let e01 = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let m = tensor(&e01, &e01);
        let pt = partial_transpose(&m, &[2, 2], 1).unwrap();
        assert_eq!(pt, tensor(&e01, &e01.transpose()));
        let pt0 = partial_transpose(&m, &[2, 2], 0).unwrap();
        assert_eq!(pt0, tensor(&e01.transpose(), &e01));
        assert!(partial_transpose(&m, &[2, 2], 2).is_err());
        assert!(partial_transpose(&m, &[3, 2], 0).is_err());
    }

    #[test]
    fn embed_matches_explicit_tensor() {
        let z = pauli_z();
        let e = embed(&z, &[2, 3, 2], 1).err();
        assert!(e.is_some(), "dimension 2 operator cannot sit on a qutrit");
        let e = embed(&z, &[2, 2, 2], 1).unwrap();
        let expected = tensor_all([&ComplexMatrix::identity(2), &z, &ComplexMatrix::identity(2)]);
        assert_eq!(e, expected);
    }
}
