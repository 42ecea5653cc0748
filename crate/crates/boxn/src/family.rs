//! The codifferential, the positive map `D(m) = d* m d`, the recursive
//! family it generates from the identity, and explicit preimages.
//!
//! With `d = [1 - s]_{s in S}` as a column over the generating set, the
//! element `box(1) = D(identity)` is the Laplacian and
//! `box(n) = D(diag(box(n-1)))` unfolds to the closed-form sum of
//! conjugated generator products over n-tuples.

use std::sync::Arc;

use num_traits::One;

use crate::augmentation::{generator_decompose, idempotence_decompose, Side};
use crate::groups::{FiniteAbelianizationWitness, GroupModel, Word};
use crate::ringalg::{RingElement, RingMatrix, Scalar};
use crate::{Error, Result};

/// The column matrix of the degree-zero codifferential: entry `s` is
/// `1 - s`, in the alphabet's fixed generator order.
#[derive(Debug, Clone)]
pub struct Codifferential {
    matrix: RingMatrix,
}

impl Codifferential {
    pub fn new(group: &Arc<GroupModel>) -> Self {
        let rows = (0..group.alphabet.len() as u32)
            .map(|i| vec![RingElement::one_minus(group, &Word::single(i)).expect("generator")])
            .collect();
        Codifferential {
            matrix: RingMatrix::from_rows(rows).expect("nonempty alphabet"),
        }
    }

    pub fn matrix(&self) -> &RingMatrix {
        &self.matrix
    }

    /// `d* d`, the Laplacian of the generating set.
    pub fn laplacian(&self) -> RingElement {
        let prod = self
            .matrix
            .matrix_star()
            .matrix_mul(&self.matrix)
            .expect("shape |S|x1");
        prod.at(0, 0).clone()
    }
}

/// The Laplacian `sum_s (1-s)*(1-s)`.
pub fn laplacian(group: &Arc<GroupModel>) -> RingElement {
    Codifferential::new(group).laplacian()
}

/// `D(m) = d* m d` for an `|S| x |S|` matrix.
pub fn d_map(group: &Arc<GroupModel>, m: &RingMatrix) -> Result<RingElement> {
    let k = group.alphabet.len();
    if m.rows() != k || m.cols() != k {
        return Err(Error::ShapeMismatch(format!(
            "D needs {k}x{k}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let d = Codifferential::new(group);
    let out = d
        .matrix()
        .matrix_star()
        .matrix_mul(m)?
        .matrix_mul(d.matrix())?;
    Ok(out.at(0, 0).clone())
}

/// The recursive family: `box(0) = 1`, `box(n) = D(diag(box(n-1)))`.
pub fn box_element(group: &Arc<GroupModel>, n: usize) -> Result<RingElement> {
    let mut x = RingElement::one(group);
    for _ in 0..n {
        x = d_map(group, &RingMatrix::diag_k(&x, group.alphabet.len()))?;
    }
    Ok(x)
}

/// An ordered tuple of generators, with the associated product
/// `alpha = (1 - s_1) ... (1 - s_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GeneratorTuple(pub Vec<u32>);

impl GeneratorTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn alpha(&self, group: &Arc<GroupModel>) -> Result<RingElement> {
        let mut prod = RingElement::one(group);
        for &s in &self.0 {
            prod = prod.mul(&RingElement::one_minus(group, &Word::single(s))?)?;
        }
        Ok(prod)
    }

    pub fn render(&self, group: &Arc<GroupModel>) -> String {
        if self.0.is_empty() {
            return "()".into();
        }
        self.0
            .iter()
            .map(|&i| group.alphabet.name(i))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// All generator n-tuples in lexicographic alphabet order.
pub fn all_tuples(group: &Arc<GroupModel>, n: usize) -> Vec<GeneratorTuple> {
    let k = group.alphabet.len() as u32;
    let mut out = vec![GeneratorTuple(Vec::new())];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for t in &out {
            for s in 0..k {
                let mut v = t.0.clone();
                v.push(s);
                next.push(GeneratorTuple(v));
            }
        }
        out = next;
    }
    out
}

/// Closed form of the family: the sum over n-tuples of
/// `alpha* alpha = (1-s_n)* ... (1-s_1)* (1-s_1) ... (1-s_n)`.
pub fn box_closed(group: &Arc<GroupModel>, n: usize) -> Result<RingElement> {
    let mut acc = RingElement::zero(group);
    for t in all_tuples(group, n) {
        let alpha = t.alpha(group)?;
        acc = acc.add(&alpha.star().mul(&alpha)?)?;
    }
    Ok(acc)
}

/// The conjugated family seeded at an arbitrary element:
/// `sum over n-tuples of alpha* u alpha`. Seeding with 1 gives the
/// closed form of `box(n)`.
pub fn u_n(u: &RingElement, n: usize) -> Result<RingElement> {
    let group = u.group().clone();
    let mut acc = RingElement::zero(&group);
    for t in all_tuples(&group, n) {
        let alpha = t.alpha(&group)?;
        acc = acc.add(&alpha.star().mul(u)?.mul(&alpha)?)?;
    }
    Ok(acc)
}

/// Sign of the off-diagonal entry in [`e_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn scalar(&self) -> Scalar {
        match self {
            Sign::Plus => Scalar::one(),
            Sign::Minus => -Scalar::one(),
        }
    }
}

/// The hermitian 2x2 matrix with zero diagonal and off-diagonal entries
/// `+- alpha_s g alpha_t` and `+- alpha_t* g^-1 alpha_s*`.
pub fn e_matrix(
    group: &Arc<GroupModel>,
    s: &GeneratorTuple,
    t: &GeneratorTuple,
    g: &Word,
    sign: Sign,
) -> Result<RingMatrix> {
    if s.len() != t.len() {
        return Err(Error::ShapeMismatch(format!(
            "tuple lengths differ: {} vs {}",
            s.len(),
            t.len()
        )));
    }
    let alpha_s = s.alpha(group)?;
    let alpha_t = t.alpha(group)?;
    let g_mono = RingElement::monomial(group, g, sign.scalar())?;
    let top = alpha_s.mul(&g_mono)?.mul(&alpha_t)?;
    let bottom = top.star();
    RingMatrix::from_rows(vec![
        vec![RingElement::zero(group), top],
        vec![bottom, RingElement::zero(group)],
    ])
}

/// The diagonal companion of [`e_matrix`]:
/// `diag(alpha_s alpha_s*, alpha_t* alpha_t)`.
pub fn box_st(
    group: &Arc<GroupModel>,
    s: &GeneratorTuple,
    t: &GeneratorTuple,
) -> Result<RingMatrix> {
    if s.len() != t.len() {
        return Err(Error::ShapeMismatch(format!(
            "tuple lengths differ: {} vs {}",
            s.len(),
            t.len()
        )));
    }
    let alpha_s = s.alpha(group)?;
    let alpha_t = t.alpha(group)?;
    RingMatrix::from_rows(vec![
        vec![alpha_s.mul(&alpha_s.star())?, RingElement::zero(group)],
        vec![RingElement::zero(group), alpha_t.star().mul(&alpha_t)?],
    ])
}

/// `d d*`: the `|S| x |S|` matrix with `(s,t)` entry `(1-s)(1-t)*`.
/// Its image under `D` is the square of the Laplacian.
pub fn laplacian_squared_preimage(group: &Arc<GroupModel>) -> RingMatrix {
    let d = Codifferential::new(group);
    d.matrix()
        .matrix_mul(&d.matrix().matrix_star())
        .expect("column times row")
}

/// The diagonal matrix with `(1-s)(1-s)*` in the `(s,s)` entry.
pub fn sq_preimage(group: &Arc<GroupModel>) -> RingMatrix {
    let k = group.alphabet.len();
    let mut m = RingMatrix::zero(group, k, k);
    for i in 0..k as u32 {
        let x = RingElement::one_minus(group, &Word::single(i)).expect("generator");
        *m.at_mut(i as usize, i as usize) = x.mul(&x.star()).expect("same group");
    }
    m
}

/// Constructive preimage under `D`: a matrix `m` over the augmentation
/// ideal with `D(m) = xi`, valid for witnessed groups.
///
/// The element is first exhibited as a sum of products of three
/// augmentation-ideal factors; the leading factor of each product is
/// decomposed against the starred generators (using that the generating
/// set is symmetric) and the trailing factor against the plain
/// generators, which assembles the matrix entries.
pub fn d_preimage(xi: &RingElement, witness: &FiniteAbelianizationWitness) -> Result<RingMatrix> {
    let group = xi.group().clone();
    let k = group.alphabet.len();
    let expr = idempotence_decompose(xi, witness, 3)?;
    let mut m = RingMatrix::zero(&group, k, k);
    for (lambda, factors) in &expr.terms {
        debug_assert_eq!(factors.len(), 3);
        // leading factor: sum_s (1-s)* a_s, realized as a right
        // decomposition over the inverse generators
        let lead = generator_decompose(&factors[0], Side::Right)?;
        let trail = generator_decompose(&factors[2], Side::Left)?;
        for (&sprime, a) in &lead.coefficients {
            let row = group.alphabet.inverse(sprime) as usize;
            let partial = a.mul(&factors[1])?.scale(lambda);
            for (&t, b) in &trail.coefficients {
                let col = t as usize;
                let add = partial.mul(b)?;
                let cur = m.at(row, col).add(&add)?;
                *m.at_mut(row, col) = cur;
            }
        }
    }
    Ok(m)
}
