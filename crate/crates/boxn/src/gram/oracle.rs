//! Brute-force oracles on finite groups through the left regular
//! representation: exact positivity, the order-unit criterion on the
//! complement of the constants, and a floating-point eigenvalue gap.

use std::sync::Arc;

use num_traits::Zero;

use crate::family::laplacian;
use crate::gram::exact::{psd_check_exact, scalar_to_f64, PsdOutcome};
use crate::gram::solve::jacobi_eigen;
use crate::groups::GroupModel;
use crate::ringalg::{RingElement, Scalar};
use crate::{Error, Result};

/// The matrix of left multiplication by `f` on the group algebra of a
/// finite model: entry `(i, j)` is `f(b_i b_j^-1)`.
pub fn regular_representation(f: &RingElement) -> Result<Vec<Vec<Scalar>>> {
    let group = f.group().clone();
    let elements = group.all_elements()?;
    let n = elements.len();
    let mut m = vec![vec![Scalar::zero(); n]; n];
    for (j, bj) in elements.iter().enumerate() {
        let bj_inv = group.invert(bj)?;
        for (i, bi) in elements.iter().enumerate() {
            let g = group.multiply(bi, &bj_inv)?;
            let c = f.coefficient(&g);
            if !c.is_zero() {
                m[i][j] = c;
            }
        }
    }
    Ok(m)
}

/// Exact PSD verdict on the regular representation of a hermitian
/// element. For finite groups this decides membership in the cone of
/// sums of hermitian squares.
pub fn finite_positivity_oracle(f: &RingElement) -> Result<PsdOutcome> {
    if !f.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "positivity oracle needs a hermitian element".into(),
        ));
    }
    Ok(psd_check_exact(&regular_representation(f)?))
}

/// Exact order-unit criterion for a hermitian element of the
/// augmentation ideal of a finite model: the regular representation
/// restricted to the orthogonal complement of the all-ones vector must
/// be positive definite.
pub fn finite_order_unit_oracle(u: &RingElement) -> Result<bool> {
    let group = u.group().clone();
    if !group.is_finite_model() {
        return Err(Error::UnsupportedModel(
            "order-unit oracle needs a finite model".into(),
        ));
    }
    if !u.is_hermitian() || !u.augmentation().is_zero() {
        return Err(Error::MalformedCertificate(
            "order-unit oracle needs a hermitian element of the augmentation ideal".into(),
        ));
    }
    let m = regular_representation(u)?;
    let n = m.len();
    if n == 1 {
        // trivial group: the complement is zero-dimensional
        return Ok(true);
    }
    // restriction to span{e_i - e_{i+1}}
    let mut b = vec![vec![Scalar::zero(); n - 1]; n - 1];
    for (a, row) in b.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = m[a][c].clone() - m[a][c + 1].clone() - m[a + 1][c].clone()
                + m[a + 1][c + 1].clone();
        }
    }
    match psd_check_exact(&b) {
        PsdOutcome::Psd(f) => Ok(f.rank() == n - 1),
        PsdOutcome::NotPsd { .. } => Ok(false),
    }
}

/// Floating-point spectral gap of the Laplacian on a finite model: the
/// smallest nonzero eigenvalue of its regular representation.
pub fn eigen_gap_oracle(group: &Arc<GroupModel>) -> Result<f64> {
    let delta = laplacian(group);
    let m = regular_representation(&delta)?;
    let numeric: Vec<Vec<f64>> = m
        .iter()
        .map(|row| row.iter().map(scalar_to_f64).collect())
        .collect();
    let (eig, _) = jacobi_eigen(&numeric);
    let gap = eig
        .into_iter()
        .filter(|x| *x > 1e-8)
        .fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        Ok(gap)
    } else {
        Err(Error::UnsupportedModel(
            "Laplacian has no nonzero eigenvalue".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{standard, Word};

    #[test]
    fn square_is_psd() {
        let g = standard::symmetric3();
        let w = Word::parse("(12)", &g.alphabet).unwrap();
        let x = RingElement::one_minus(&g, &w).unwrap();
        let sq = x.star().mul(&x).unwrap();
        assert!(finite_positivity_oracle(&sq).unwrap().is_psd());
    }

    #[test]
    fn negative_identity_is_not_psd() {
        let g = standard::symmetric3();
        let f = RingElement::one(&g).neg();
        assert!(!finite_positivity_oracle(&f).unwrap().is_psd());
    }

    #[test]
    fn laplacian_is_order_unit_on_connected_cayley_graph() {
        for g in [
            standard::symmetric3(),
            standard::dihedral4(),
            standard::quaternion8(),
        ] {
            assert!(finite_order_unit_oracle(&laplacian(&g)).unwrap());
        }
    }

    #[test]
    fn zero_is_not_an_order_unit() {
        let g = standard::symmetric3();
        assert!(!finite_order_unit_oracle(&RingElement::zero(&g)).unwrap());
    }

    #[test]
    fn eigen_gap_values() {
        let c2 = standard::cyclic(2);
        assert!((eigen_gap_oracle(&c2).unwrap() - 4.0).abs() < 1e-9);
        let s3 = standard::symmetric3_transpositions();
        assert!((eigen_gap_oracle(&s3).unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn regular_representation_is_multiplicative_on_laplacian_square() {
        let g = standard::cyclic(3);
        let delta = laplacian(&g);
        let m1 = regular_representation(&delta).unwrap();
        let m2 = regular_representation(&delta.mul(&delta).unwrap()).unwrap();
        // m1 * m1 == m2
        let n = m1.len();
        for i in 0..n {
            for j in 0..n {
                let mut s = Scalar::zero();
                for k in 0..n {
                    s += m1[i][k].clone() * m1[k][j].clone();
                }
                assert_eq!(s, m2[i][j]);
            }
        }
    }
}
