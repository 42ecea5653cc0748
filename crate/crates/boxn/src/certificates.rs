//! Sums-of-hermitian-squares certificates: the data model, bit-exact
//! verification, and the constructive builders that realize matrix
//! order-unit certificates and push them down to ring elements through
//! the codifferential.
//!
//! Soundness rests entirely on [`SosCertificate::verify`], which expands
//! the claimed identity in exact rational arithmetic and accepts only a
//! zero residual.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::augmentation::{generator_decompose, idempotence_decompose, Side};
use crate::family::{
    all_tuples, box_element, box_st, d_map, e_matrix, laplacian, Codifferential, GeneratorTuple,
    Sign,
};
use crate::groups::{FiniteAbelianizationWitness, GroupModel, Word};
use crate::ringalg::{format_scalar, RingElement, RingMatrix, Scalar};
use crate::{Error, Result};

/// The order unit named in a certificate claim. An element stands for
/// its diagonal embedding `diag_k(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderUnit {
    Element(RingElement),
    Matrix(RingMatrix),
}

impl OrderUnit {
    fn expanded(&self, k: usize) -> Result<RingMatrix> {
        match self {
            OrderUnit::Element(u) => Ok(RingMatrix::diag_k(u, k)),
            OrderUnit::Matrix(m) => {
                if m.rows() != k || m.cols() != k {
                    return Err(Error::MalformedCertificate(format!(
                        "order unit is {}x{}, certificate is {k}x{k}",
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(m.clone())
            }
        }
    }
}

/// A weighted sum-of-hermitian-squares certificate: the claim is
/// `target + lambda * diag_k(order_unit) = sum_i w_i a_i* a_i`
/// with nonnegative rational weights. `lambda = 0` with no order unit is
/// a plain membership claim.
#[derive(Debug, Clone)]
pub struct SosCertificate {
    pub k: usize,
    pub weights: Vec<Scalar>,
    /// Each summand is a `1 x k` row.
    pub summands: Vec<Vec<RingElement>>,
    pub target: RingMatrix,
    pub lambda: Scalar,
    pub order_unit: Option<OrderUnit>,
}

/// Outcome of exact verification.
#[derive(Debug, Clone)]
pub enum Verification {
    Verified,
    Falsified { residual: RingMatrix },
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified)
    }
}

impl SosCertificate {
    /// Plain scalar claim `target = sum w_i a_i* a_i`.
    pub fn scalar(
        target: RingElement,
        weights: Vec<Scalar>,
        summands: Vec<RingElement>,
    ) -> Result<Self> {
        let group = target.group().clone();
        Ok(SosCertificate {
            k: 1,
            weights,
            summands: summands.into_iter().map(|a| vec![a]).collect(),
            target: RingMatrix::from_rows(vec![vec![target]])
                .map_err(|e| Error::MalformedCertificate(e.to_string()))?,
            lambda: Scalar::zero(),
            order_unit: None,
        })
        .map(|c| {
            let _ = group;
            c
        })
    }

    /// Scalar claim with an order unit:
    /// `target + lambda * u = sum w_i a_i* a_i`.
    pub fn scalar_with_order_unit(
        target: RingElement,
        lambda: Scalar,
        order_unit: RingElement,
        weights: Vec<Scalar>,
        summands: Vec<RingElement>,
    ) -> Result<Self> {
        let mut cert = Self::scalar(target, weights, summands)?;
        cert.lambda = lambda;
        cert.order_unit = Some(OrderUnit::Element(order_unit));
        Ok(cert)
    }

    pub fn group(&self) -> &Arc<GroupModel> {
        self.target.group()
    }

    /// The scalar target for `k = 1` certificates.
    pub fn target_element(&self) -> Option<&RingElement> {
        if self.k == 1 {
            Some(self.target.at(0, 0))
        } else {
            None
        }
    }

    /// The claimed left-hand side `target + lambda * diag_k(order_unit)`.
    pub fn claimed_lhs(&self) -> Result<RingMatrix> {
        let mut lhs = self.target.clone();
        if !self.lambda.is_zero() {
            let u = self
                .order_unit
                .as_ref()
                .ok_or_else(|| Error::MalformedCertificate("lambda without an order unit".into()))?
                .expanded(self.k)?;
            lhs = lhs.add(&u.scale(&self.lambda))?;
        }
        Ok(lhs)
    }

    /// The right-hand side `sum_i w_i a_i* a_i`, expanded exactly.
    pub fn expanded_sum(&self) -> Result<RingMatrix> {
        let group = self.group().clone();
        let mut acc = RingMatrix::zero(&group, self.k, self.k);
        for (w, row) in self.weights.iter().zip(&self.summands) {
            if row.len() != self.k {
                return Err(Error::MalformedCertificate(format!(
                    "summand row has length {}, expected {}",
                    row.len(),
                    self.k
                )));
            }
            let a = RingMatrix::from_rows(vec![row.clone()])
                .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
            let square = a.matrix_star().matrix_mul(&a)?;
            acc = acc.add(&square.scale(w))?;
        }
        Ok(acc)
    }

    /// Exact verification: expands both sides symbolically and compares.
    pub fn verify(&self) -> Result<Verification> {
        if self.target.rows() != self.k || self.target.cols() != self.k {
            return Err(Error::MalformedCertificate(format!(
                "target is {}x{}, expected {}x{}",
                self.target.rows(),
                self.target.cols(),
                self.k,
                self.k
            )));
        }
        if self.weights.len() != self.summands.len() {
            return Err(Error::MalformedCertificate(format!(
                "{} weights for {} summands",
                self.weights.len(),
                self.summands.len()
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| w.is_negative()) {
            return Err(Error::MalformedCertificate(format!(
                "negative weight {}",
                format_scalar(w)
            )));
        }
        if self.lambda.is_negative() {
            return Err(Error::MalformedCertificate(format!(
                "negative lambda {}",
                format_scalar(&self.lambda)
            )));
        }
        let residual = self.claimed_lhs()?.sub(&self.expanded_sum()?)?;
        if residual.is_zero() {
            Ok(Verification::Verified)
        } else {
            Ok(Verification::Falsified { residual })
        }
    }

    /// Rewrites every weighted summand `(w, a)` with `w = p/q` as `p*q`
    /// repetitions of the unweighted summand `a/q`. Verification is
    /// preserved; intended for small certificates.
    pub fn with_unit_weights(&self, repetition_guard: usize) -> Result<Self> {
        let mut weights = Vec::new();
        let mut summands = Vec::new();
        for (w, row) in self.weights.iter().zip(&self.summands) {
            if w.is_zero() {
                continue;
            }
            let p = w.numer().clone();
            let q = w.denom().clone();
            let reps = (p.clone() * q.clone())
                .to_string()
                .parse::<usize>()
                .map_err(|_| Error::MalformedCertificate("weight too large to expand".into()))?;
            if reps > repetition_guard {
                return Err(Error::MalformedCertificate(format!(
                    "unit-weight expansion needs {reps} repetitions"
                )));
            }
            let inv_q = Scalar::new(One::one(), q);
            let scaled: Vec<RingElement> = row.iter().map(|a| a.scale(&inv_q)).collect();
            for _ in 0..reps {
                weights.push(Scalar::one());
                summands.push(scaled.clone());
            }
        }
        Ok(SosCertificate {
            k: self.k,
            weights,
            summands,
            target: self.target.clone(),
            lambda: self.lambda.clone(),
            order_unit: self.order_unit.clone(),
        })
    }
}

/// The one-summand certificate for `E_{s,t}(+-g) + box_{s,t}`: the
/// square of the row `[+- g^-1 alpha_s*, alpha_t]`.
pub fn lemma21_certificate(
    group: &Arc<GroupModel>,
    s: &GeneratorTuple,
    t: &GeneratorTuple,
    g: &Word,
    sign: Sign,
) -> Result<SosCertificate> {
    if s.len() != t.len() {
        return Err(Error::ShapeMismatch(format!(
            "tuple lengths differ: {} vs {}",
            s.len(),
            t.len()
        )));
    }
    let target = e_matrix(group, s, t, g, sign)?.add(&box_st(group, s, t)?)?;
    let g_inv = group.invert(g)?;
    let left = RingElement::monomial(group, &g_inv, sign.scalar())?.mul(&s.alpha(group)?.star())?;
    let right = t.alpha(group)?;
    Ok(SosCertificate {
        k: 2,
        weights: vec![Scalar::one()],
        summands: vec![vec![left, right]],
        target,
        lambda: Scalar::zero(),
        order_unit: None,
    })
}

/// A positive combination of matrices `E_{s,t}(+-g)` equal to a
/// hermitian matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct OffDiagDecomposition {
    pub terms: Vec<(GeneratorTuple, GeneratorTuple, Word, Sign, Scalar)>,
}

impl OffDiagDecomposition {
    pub fn recompose(&self, group: &Arc<GroupModel>) -> Result<RingMatrix> {
        let mut acc = RingMatrix::zero(group, 2, 2);
        for (s, t, g, sign, lambda) in &self.terms {
            acc = acc.add(&e_matrix(group, s, t, g, *sign)?.scale(lambda))?;
        }
        Ok(acc)
    }
}

/// Writes products of augmentation-ideal factors in the form
/// `sum_s alpha_s rho_s` with leading generator-tuple products:
/// peel one factor at a time, decomposing the accumulated remainder
/// over the generators on the right.
fn alpha_decompose_right(
    group: &Arc<GroupModel>,
    factors: &[RingElement],
    n: usize,
) -> Result<Vec<(GeneratorTuple, RingElement)>> {
    if n == 0 {
        let mut prod = RingElement::one(group);
        for f in factors {
            prod = prod.mul(f)?;
        }
        return Ok(vec![(GeneratorTuple(Vec::new()), prod)]);
    }
    debug_assert!(factors.len() >= n);
    let sub = alpha_decompose_right(group, &factors[..factors.len() - 1], n - 1)?;
    let last = &factors[factors.len() - 1];
    let mut out: BTreeMap<GeneratorTuple, RingElement> = BTreeMap::new();
    for (tuple, rho) in sub {
        let remainder = rho.mul(last)?;
        if remainder.is_zero() {
            continue;
        }
        let d = generator_decompose(&remainder, Side::Right)?;
        for (gi, a) in d.coefficients {
            let mut letters = tuple.0.clone();
            letters.push(gi);
            let key = GeneratorTuple(letters);
            match out.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(a);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&a)?;
                    *e.get_mut() = sum;
                }
            }
        }
    }
    Ok(out.into_iter().filter(|(_, a)| !a.is_zero()).collect())
}

/// Mirror image of [`alpha_decompose_right`]: trailing tuple products,
/// `sum_t sigma_t alpha_t`.
fn alpha_decompose_left(
    group: &Arc<GroupModel>,
    factors: &[RingElement],
    n: usize,
) -> Result<Vec<(GeneratorTuple, RingElement)>> {
    if n == 0 {
        let mut prod = RingElement::one(group);
        for f in factors {
            prod = prod.mul(f)?;
        }
        return Ok(vec![(GeneratorTuple(Vec::new()), prod)]);
    }
    debug_assert!(factors.len() >= n);
    let sub = alpha_decompose_left(group, &factors[1..], n - 1)?;
    let first = &factors[0];
    let mut out: BTreeMap<GeneratorTuple, RingElement> = BTreeMap::new();
    for (tuple, sigma) in sub {
        let remainder = first.mul(&sigma)?;
        if remainder.is_zero() {
            continue;
        }
        let d = generator_decompose(&remainder, Side::Left)?;
        for (gi, a) in d.coefficients {
            let mut letters = vec![gi];
            letters.extend_from_slice(&tuple.0);
            let key = GeneratorTuple(letters);
            match out.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(a);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&a)?;
                    *e.get_mut() = sum;
                }
            }
        }
    }
    Ok(out.into_iter().filter(|(_, a)| !a.is_zero()).collect())
}

/// Decomposes a single augmentation-power element as a positive-free
/// combination `sum c alpha_s g alpha_t` over n-tuples; the witness
/// supplies the 2n-factor products.
fn entry_alpha_decompose(
    xi: &RingElement,
    n: usize,
    witness: &FiniteAbelianizationWitness,
) -> Result<BTreeMap<(GeneratorTuple, GeneratorTuple, Word), Scalar>> {
    let group = xi.group().clone();
    let mut coeffs: BTreeMap<(GeneratorTuple, GeneratorTuple, Word), Scalar> = BTreeMap::new();
    if xi.is_zero() {
        return Ok(coeffs);
    }
    let expr = idempotence_decompose(xi, witness, 2 * n)?;
    for (lambda, factors) in &expr.terms {
        debug_assert_eq!(factors.len(), 2 * n);
        let lead = alpha_decompose_right(&group, &factors[..n], n)?;
        let trail = alpha_decompose_left(&group, &factors[n..], n)?;
        for (s, rho) in &lead {
            for (t, sigma) in &trail {
                let middle = rho.mul(sigma)?;
                for (g, c) in middle.terms() {
                    let key = (s.clone(), t.clone(), g.clone());
                    let add = lambda.clone() * c.clone();
                    let cur = coeffs.entry(key).or_insert_with(Scalar::zero);
                    *cur = cur.clone() + add;
                }
            }
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(coeffs)
}

/// Expresses a hermitian 2x2 matrix with zero diagonal and entries in
/// the 2n-th augmentation power as a positive combination of the
/// matrices `E_{s,t}(+-g)`. Tuples are enumerated in lexicographic
/// generator order; signs are normalized so every coefficient is
/// positive.
pub fn offdiag_decompose(
    m: &RingMatrix,
    n: usize,
    witness: Option<&FiniteAbelianizationWitness>,
) -> Result<OffDiagDecomposition> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::ShapeMismatch(
            "off-diagonal decomposition works on 2x2 blocks".into(),
        ));
    }
    if !m.at(0, 0).is_zero() || !m.at(1, 1).is_zero() {
        return Err(Error::MalformedCertificate("nonzero diagonal".into()));
    }
    if !m.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "matrix is not hermitian".into(),
        ));
    }
    let group = m.group().clone();
    let entry = m.at(0, 1);
    let coeffs = match witness {
        Some(w) => entry_alpha_decompose(entry, n, w)?,
        None => entry_alpha_solve(entry, n)?,
    };
    let terms = coeffs
        .into_iter()
        .map(|((s, t, g), c)| {
            let sign = if c.is_negative() {
                Sign::Minus
            } else {
                Sign::Plus
            };
            (s, t, g, sign, c.abs())
        })
        .collect();
    let decomposition = OffDiagDecomposition { terms };
    debug_assert_eq!(&decomposition.recompose(&group)?, m);
    Ok(decomposition)
}

/// Witness-free route: solve the linear system
/// `xi = sum c_{s,t,g} alpha_s g alpha_t` exactly over a support ball.
/// Fails with `NotInPower` when no combination exists there.
fn entry_alpha_solve(
    xi: &RingElement,
    n: usize,
) -> Result<BTreeMap<(GeneratorTuple, GeneratorTuple, Word), Scalar>> {
    let group = xi.group().clone();
    if xi.is_zero() {
        return Ok(BTreeMap::new());
    }
    let radius = xi
        .terms()
        .keys()
        .map(|w| w.len())
        .max()
        .unwrap_or(0)
        .max(2 * n);
    let ball = group.ball(radius, 4000)?;
    let tuples = all_tuples(&group, n);
    // columns: (s, t, g) products; rows: support of the expansion
    let mut columns: Vec<((GeneratorTuple, GeneratorTuple, Word), RingElement)> = Vec::new();
    for s in &tuples {
        let alpha_s = s.alpha(&group)?;
        for t in &tuples {
            let alpha_t = t.alpha(&group)?;
            for g in &ball {
                let prod = alpha_s
                    .mul(&RingElement::monomial(&group, g, Scalar::one())?)?
                    .mul(&alpha_t)?;
                if !prod.is_zero() {
                    columns.push(((s.clone(), t.clone(), g.clone()), prod));
                }
            }
        }
    }
    // index the union of supports
    let mut support: BTreeMap<Word, usize> = BTreeMap::new();
    for (_, e) in &columns {
        for w in e.terms().keys() {
            let next = support.len();
            support.entry(w.clone()).or_insert(next);
        }
    }
    for w in xi.terms().keys() {
        if !support.contains_key(w) {
            return Err(Error::NotInPower);
        }
    }
    let rows = support.len();
    // Gaussian elimination on the (rows x columns) system
    let mut matrix: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); columns.len() + 1]; rows];
    for (j, (_, e)) in columns.iter().enumerate() {
        for (w, c) in e.terms() {
            matrix[support[w]][j] = c.clone();
        }
    }
    for (w, c) in xi.terms() {
        matrix[support[w]][columns.len()] = c.clone();
    }
    let ncols = columns.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut r = 0usize;
    for j in 0..ncols {
        if r >= rows {
            break;
        }
        if let Some(p) = (r..rows).find(|&i| !matrix[i][j].is_zero()) {
            matrix.swap(r, p);
            let lead = matrix[r][j].clone();
            for x in matrix[r].iter_mut() {
                *x = x.clone() / lead.clone();
            }
            for i in 0..rows {
                if i != r && !matrix[i][j].is_zero() {
                    let f = matrix[i][j].clone();
                    for jj in 0..=ncols {
                        let delta = f.clone() * matrix[r][jj].clone();
                        matrix[i][jj] = matrix[i][jj].clone() - delta;
                    }
                }
            }
            pivot_of_col[j] = Some(r);
            r += 1;
        }
    }
    // consistency: no pivot in the rhs column
    for i in r..rows {
        if !matrix[i][ncols].is_zero() {
            return Err(Error::NotInPower);
        }
    }
    let mut out = BTreeMap::new();
    for (j, piv) in pivot_of_col.iter().enumerate() {
        if let Some(i) = piv {
            let c = matrix[*i][ncols].clone();
            if !c.is_zero() {
                out.insert(columns[j].0.clone(), c);
            }
        }
    }
    Ok(out)
}

/// Pluggable certifier for the base case of the inductive chain: for a
/// hermitian `v` in the augmentation ideal, produce `lambda` and a
/// verifying certificate that `v + lambda * box(1)` is a sum of
/// hermitian squares.
pub trait BaseCertifier {
    fn certify(&self, v: &RingElement) -> Result<(Scalar, SosCertificate)>;
    fn describe(&self) -> String;
}

/// Base certifier backed by the explicit identity-order-unit chain;
/// needs only a finite-abelianization witness.
pub struct WitnessBaseCertifier<'a> {
    pub witness: &'a FiniteAbelianizationWitness,
}

impl BaseCertifier for WitnessBaseCertifier<'_> {
    fn certify(&self, v: &RingElement) -> Result<(Scalar, SosCertificate)> {
        let cert = delta_order_unit_certificate(v, self.witness)?;
        Ok((cert.lambda.clone(), cert))
    }

    fn describe(&self) -> String {
        "identity-order-unit chain".into()
    }
}

fn embed_row(
    group: &Arc<GroupModel>,
    k: usize,
    slots: &[(usize, RingElement)],
) -> Vec<RingElement> {
    let mut row = vec![RingElement::zero(group); k];
    for (i, e) in slots {
        row[*i] = e.clone();
    }
    row
}

/// Reversed-and-inverted tuple: `alpha_{revinv(s)} = alpha_s*`.
fn revinv(group: &Arc<GroupModel>, s: &GeneratorTuple) -> GeneratorTuple {
    GeneratorTuple(
        s.0.iter()
            .rev()
            .map(|&i| group.alphabet.inverse(i))
            .collect(),
    )
}

struct WeightedRows {
    weights: Vec<Scalar>,
    rows: Vec<Vec<RingElement>>,
}

impl WeightedRows {
    fn new() -> Self {
        WeightedRows {
            weights: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, w: Scalar, row: Vec<RingElement>) {
        if !w.is_zero() && row.iter().any(|e| !e.is_zero()) {
            self.weights.push(w);
            self.rows.push(row);
        }
    }
}

/// Matrix-level certificate for `m + lambda * diag_k(box(level))` being
/// a sum of hermitian squares, for hermitian `m` over the augmentation
/// ideal. Off-diagonal blocks go through the two-by-two decomposition;
/// diagonal entries recurse through the scalar chain.
fn certify_matrix_diag_box(
    m: &RingMatrix,
    level: usize,
    witness: &FiniteAbelianizationWitness,
    base: &dyn BaseCertifier,
) -> Result<(Scalar, WeightedRows)> {
    let group = m.group().clone();
    let k = m.rows();
    if !m.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "matrix order-unit chain needs a hermitian matrix".into(),
        ));
    }
    let tuples = all_tuples(&group, level);
    let mut out = WeightedRows::new();
    // diagonal bookkeeping: per slot, weight of alpha_u* alpha_u pieces
    let mut used: Vec<BTreeMap<GeneratorTuple, Scalar>> = vec![BTreeMap::new(); k];
    let mut lambda_off = Scalar::zero();
    for i in 0..k {
        for j in (i + 1)..k {
            let entry = m.at(i, j);
            if entry.is_zero() {
                continue;
            }
            let coeffs = entry_alpha_decompose(entry, level, witness)?;
            for ((s, t, g), c) in coeffs {
                let lambda = c.abs();
                let sign = if c.is_negative() {
                    Sign::Minus
                } else {
                    Sign::Plus
                };
                let g_inv = group.invert(&g)?;
                let left = RingElement::monomial(&group, &g_inv, sign.scalar())?
                    .mul(&s.alpha(&group)?.star())?;
                let right = t.alpha(&group)?;
                out.push(
                    lambda.clone(),
                    embed_row(&group, k, &[(i, left), (j, right)]),
                );
                // the square adds alpha_s alpha_s* at (i,i) and
                // alpha_t* alpha_t at (j,j)
                let key_i = revinv(&group, &s);
                *used[i].entry(key_i).or_insert_with(Scalar::zero) += lambda.clone();
                *used[j].entry(t).or_insert_with(Scalar::zero) += lambda.clone();
                lambda_off += lambda;
            }
        }
    }
    // top the extra diagonal up to lambda_off * box(level) in each slot
    for (i, used_i) in used.iter().enumerate() {
        for u in &tuples {
            let w = used_i.get(u).cloned().unwrap_or_else(Scalar::zero);
            let topup = lambda_off.clone() - w;
            if topup.is_negative() {
                return Err(Error::MalformedCertificate(
                    "diagonal completion underflow".into(),
                ));
            }
            if !topup.is_zero() {
                out.push(topup, embed_row(&group, k, &[(i, u.alpha(&group)?)]));
            }
        }
    }
    // diagonal entries: scalar certificates against box(level)
    let mut lambdas: Vec<Scalar> = Vec::with_capacity(k);
    let mut diag_summands: Vec<(usize, Scalar, RingElement)> = Vec::new();
    for i in 0..k {
        let v = m.at(i, i);
        let cert = certify_scalar_box(v, level, witness, base)?;
        for (w, row) in cert.weights.iter().zip(&cert.summands) {
            diag_summands.push((i, w.clone(), row[0].clone()));
        }
        lambdas.push(cert.lambda.clone());
    }
    let lambda_diag = lambdas.iter().cloned().max().unwrap_or_else(Scalar::zero);
    for (i, w, a) in diag_summands {
        out.push(w, embed_row(&group, k, &[(i, a)]));
    }
    for (i, li) in lambdas.iter().enumerate() {
        let topup = lambda_diag.clone() - li.clone();
        if !topup.is_zero() {
            for u in &tuples {
                out.push(
                    topup.clone(),
                    embed_row(&group, k, &[(i, u.alpha(&group)?)]),
                );
            }
        }
    }
    Ok((lambda_off + lambda_diag, out))
}

/// Scalar certificate `v + lambda * box(n)` through the inductive
/// chain: take a preimage under `D`, average it hermitian, certify the
/// matrix against `diag(box(n-1))`, and compose with the codifferential.
fn certify_scalar_box(
    v: &RingElement,
    n: usize,
    witness: &FiniteAbelianizationWitness,
    base: &dyn BaseCertifier,
) -> Result<SosCertificate> {
    let group = v.group().clone();
    if !v.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "order-unit chain needs a hermitian element".into(),
        ));
    }
    let boxn = box_element(&group, n)?;
    if v.is_zero() {
        return SosCertificate::scalar_with_order_unit(
            v.clone(),
            Scalar::zero(),
            boxn,
            vec![],
            vec![],
        );
    }
    if v.add(&boxn)?.is_zero() {
        return SosCertificate::scalar_with_order_unit(
            v.clone(),
            Scalar::one(),
            boxn,
            vec![],
            vec![],
        );
    }
    if n == 1 {
        let (lambda, cert) = base.certify(v).map_err(|e| match e {
            Error::SearchFailed => Error::DiagonalUncertified(format!(
                "base certifier ({}) failed on a diagonal entry",
                base.describe()
            )),
            other => other,
        })?;
        // normalize the shape: target v, order unit box(1)
        let summands = cert
            .summands
            .iter()
            .map(|row| row[0].clone())
            .collect::<Vec<_>>();
        return SosCertificate::scalar_with_order_unit(
            v.clone(),
            lambda,
            boxn,
            cert.weights.clone(),
            summands,
        );
    }
    let preimage = crate::family::d_preimage(v, witness)?;
    let averaged = preimage.hermitian_part()?;
    let (lambda, rows) = certify_matrix_diag_box(&averaged, n - 1, witness, base)?;
    // compose with the codifferential: row a becomes the scalar a . d
    let d = Codifferential::new(&group);
    let mut summands = Vec::with_capacity(rows.rows.len());
    for row in &rows.rows {
        let as_matrix = RingMatrix::from_rows(vec![row.clone()])?;
        let composed = as_matrix.matrix_mul(d.matrix())?;
        summands.push(composed.at(0, 0).clone());
    }
    SosCertificate::scalar_with_order_unit(v.clone(), lambda, boxn, rows.weights, summands)
}

/// Order-unit certificate for a hermitian element of the augmentation
/// ideal against `box(n)`, built through the inductive chain with the
/// given base certifier for the Laplacian level.
pub fn theorem_main_certificate(
    eta: &RingElement,
    n: usize,
    witness: &FiniteAbelianizationWitness,
    base: &dyn BaseCertifier,
) -> Result<SosCertificate> {
    if n == 0 {
        return Err(Error::MalformedCertificate("chain starts at n = 1".into()));
    }
    let aug = eta.augmentation();
    if !aug.is_zero() {
        return Err(Error::NotInAugmentationIdeal(format_scalar(&aug)));
    }
    eta.group()
        .clone()
        .validate_witness(witness)
        .map_err(|e| match e {
            Error::InvalidWitness(v) => Error::InvalidWitness(v),
            other => other,
        })?;
    certify_scalar_box(eta, n, witness, base)
}

/// Diagonal order-unit certificate for a hermitian matrix over the
/// augmentation ideal: `m + lambda * diag_k(box(n))` as a sum of
/// hermitian squares.
pub fn diag_order_unit_certificate(
    m: &RingMatrix,
    n: usize,
    witness: &FiniteAbelianizationWitness,
    base: &dyn BaseCertifier,
) -> Result<SosCertificate> {
    let group = m.group().clone();
    let (lambda, rows) = certify_matrix_diag_box(m, n, witness, base)?;
    Ok(SosCertificate {
        k: m.rows(),
        weights: rows.weights,
        summands: rows.rows,
        target: m.clone(),
        lambda,
        order_unit: Some(OrderUnit::Element(box_element(&group, n)?)),
    })
}

/// Explicit scalar certificate `v + lambda * 1` for a hermitian group
/// ring element, using the squares `(e +- g)*(e +- g)`.
fn scalar_identity_certificate(v: &RingElement) -> Result<(Scalar, WeightedRows)> {
    let group = v.group().clone();
    if !v.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "identity-order-unit certificate needs a hermitian element".into(),
        ));
    }
    let mut out = WeightedRows::new();
    let mut identity_excess = v.coefficient(&Word::identity());
    let mut handled: std::collections::BTreeSet<Word> = std::collections::BTreeSet::new();
    let two = Scalar::from_integer(2.into());
    for (g, c) in v.terms() {
        if g.is_identity() || handled.contains(g) {
            continue;
        }
        let g_inv = group.invert(g)?;
        handled.insert(g.clone());
        handled.insert(g_inv.clone());
        let self_paired = g_inv == *g;
        // c (g + g^-1) = |c| (e +- g)*(e +- g) - 2|c| e, halved when
        // g is its own inverse
        let weight = if self_paired {
            c.abs() / two.clone()
        } else {
            c.abs()
        };
        let sign = if c.is_negative() {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        let summand = RingElement::one(&group).add(&RingElement::monomial(&group, g, sign)?)?;
        identity_excess -= two.clone() * weight.clone();
        out.push(weight, vec![summand]);
    }
    // identity_excess = coefficient of e remaining after the squares;
    // fold a positive excess into a square of e, a deficit into lambda
    let lambda = if identity_excess.is_negative() {
        -identity_excess
    } else {
        if !identity_excess.is_zero() {
            out.push(identity_excess, vec![RingElement::one(&group)]);
        }
        Scalar::zero()
    };
    Ok((lambda, out))
}

/// Matrix certificate `m + lambda * I` over the full group ring, built
/// from monomial squares. This realizes the identity matrix as an
/// order unit, constructively.
fn certify_matrix_identity(m: &RingMatrix) -> Result<(Scalar, WeightedRows)> {
    let group = m.group().clone();
    let k = m.rows();
    if !m.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "identity-order-unit chain needs a hermitian matrix".into(),
        ));
    }
    let mut out = WeightedRows::new();
    let mut used_diag = vec![Scalar::zero(); k];
    let mut lambda_off = Scalar::zero();
    for i in 0..k {
        for j in (i + 1)..k {
            for (g, c) in m.at(i, j).terms() {
                let lambda = c.abs();
                let sign = if c.is_negative() {
                    -Scalar::one()
                } else {
                    Scalar::one()
                };
                // row [.., +-g^-1 at i, .., e at j, ..]
                let g_inv = group.invert(g)?;
                let left = RingElement::monomial(&group, &g_inv, sign)?;
                out.push(
                    lambda.clone(),
                    embed_row(&group, k, &[(i, left), (j, RingElement::one(&group))]),
                );
                used_diag[i] += lambda.clone();
                used_diag[j] += lambda.clone();
                lambda_off += lambda;
            }
        }
    }
    for (i, w) in used_diag.iter().enumerate() {
        let topup = lambda_off.clone() - w.clone();
        if !topup.is_zero() {
            out.push(
                topup,
                embed_row(&group, k, &[(i, RingElement::one(&group))]),
            );
        }
    }
    // diagonal entries against the scalar identity
    let mut lambdas = Vec::with_capacity(k);
    for i in 0..k {
        let (li, rows) = scalar_identity_certificate(m.at(i, i))?;
        for (w, row) in rows.weights.into_iter().zip(rows.rows) {
            out.push(w, embed_row(&group, k, &[(i, row[0].clone())]));
        }
        lambdas.push(li);
    }
    let lambda_diag = lambdas.iter().cloned().max().unwrap_or_else(Scalar::zero);
    for (i, li) in lambdas.iter().enumerate() {
        let topup = lambda_diag.clone() - li.clone();
        if !topup.is_zero() {
            out.push(
                topup,
                embed_row(&group, k, &[(i, RingElement::one(&group))]),
            );
        }
    }
    Ok((lambda_off + lambda_diag, out))
}

/// Order-unit certificate with the Laplacian as the order unit:
/// `eta + lambda * Delta` as a sum of hermitian squares. Uses a
/// preimage under `D` over the full group ring (a depth-2
/// decomposition suffices) and the identity matrix as the matrix-level
/// order unit.
pub fn delta_order_unit_certificate(
    eta: &RingElement,
    witness: &FiniteAbelianizationWitness,
) -> Result<SosCertificate> {
    let group = eta.group().clone();
    let aug = eta.augmentation();
    if !aug.is_zero() {
        return Err(Error::NotInAugmentationIdeal(format_scalar(&aug)));
    }
    if !eta.is_hermitian() {
        return Err(Error::MalformedCertificate(
            "order-unit certificates need hermitian targets".into(),
        ));
    }
    let delta = laplacian(&group);
    if eta.is_zero() {
        return SosCertificate::scalar_with_order_unit(
            eta.clone(),
            Scalar::zero(),
            delta,
            vec![],
            vec![],
        );
    }
    if eta.add(&delta)?.is_zero() {
        return SosCertificate::scalar_with_order_unit(
            eta.clone(),
            Scalar::one(),
            delta,
            vec![],
            vec![],
        );
    }
    // preimage over the full group ring: eta = sum (1-s)* a f b (1-t)
    // from a depth-2 expression, assembled entrywise
    let k = group.alphabet.len();
    let expr = idempotence_decompose(eta, witness, 2)?;
    let mut preimage = RingMatrix::zero(&group, k, k);
    for (lambda, factors) in &expr.terms {
        debug_assert_eq!(factors.len(), 2);
        let lead = generator_decompose(&factors[0], Side::Right)?;
        let trail = generator_decompose(&factors[1], Side::Left)?;
        for (&sprime, a) in &lead.coefficients {
            let row = group.alphabet.inverse(sprime) as usize;
            let scaled = a.scale(lambda);
            for (&t, b) in &trail.coefficients {
                let add = scaled.mul(b)?;
                let cur = preimage.at(row, t as usize).add(&add)?;
                *preimage.at_mut(row, t as usize) = cur;
            }
        }
    }
    debug_assert_eq!(&d_map(&group, &preimage)?, eta);
    let averaged = preimage.hermitian_part()?;
    let (lambda, rows) = certify_matrix_identity(&averaged)?;
    let d = Codifferential::new(&group);
    let mut summands = Vec::with_capacity(rows.rows.len());
    for row in &rows.rows {
        let as_matrix = RingMatrix::from_rows(vec![row.clone()])?;
        summands.push(as_matrix.matrix_mul(d.matrix())?.at(0, 0).clone());
    }
    SosCertificate::scalar_with_order_unit(eta.clone(), lambda, delta, rows.weights, summands)
}
