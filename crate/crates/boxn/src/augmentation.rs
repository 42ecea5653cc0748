//! Constructive structure of the augmentation ideal and its powers:
//! generator decompositions, torsion and commutator witnesses, nested
//! idempotence decompositions, brute-force filtration computations on
//! finite groups, and the exponent-sum functional that falsifies
//! idempotence for free models.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::groups::{FiniteAbelianizationWitness, GroupKind, GroupModel, Word};
use crate::ringalg::{RingElement, Scalar};
use crate::{Error, Result};

/// Which side the ring coefficients multiply on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `xi = sum_s a_s * (1 - s)`
    Left,
    /// `xi = sum_s (1 - s) * a_s`
    Right,
}

/// A decomposition of an augmentation-ideal element over the generators.
#[derive(Debug, Clone)]
pub struct GeneratorDecomposition {
    pub side: Side,
    /// Keyed by alphabet index of the generator.
    pub coefficients: BTreeMap<u32, RingElement>,
}

impl GeneratorDecomposition {
    /// Multiplies the decomposition back out.
    pub fn recompose(&self, group: &Arc<GroupModel>) -> Result<RingElement> {
        let mut acc = RingElement::zero(group);
        for (&gi, a) in &self.coefficients {
            let one_minus_s = RingElement::one_minus(group, &Word::single(gi))?;
            let term = match self.side {
                Side::Left => a.mul(&one_minus_s)?,
                Side::Right => one_minus_s.mul(a)?,
            };
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// True iff the element lies in the augmentation ideal.
pub fn augmentation_check(xi: &RingElement) -> bool {
    xi.augmentation().is_zero()
}

fn require_augmentation_zero(xi: &RingElement) -> Result<()> {
    let a = xi.augmentation();
    if a.is_zero() {
        Ok(())
    } else {
        Err(Error::NotInAugmentationIdeal(
            crate::ringalg::format_scalar(&a),
        ))
    }
}

/// Writes `xi` in the augmentation ideal as a combination of the
/// generators `1 - s`, telescoping along each support element's
/// canonical word. Deterministic for a fixed group model.
pub fn generator_decompose(xi: &RingElement, side: Side) -> Result<GeneratorDecomposition> {
    require_augmentation_zero(xi)?;
    let group = xi.group().clone();
    let mut coefficients: BTreeMap<u32, RingElement> = BTreeMap::new();
    for (g, c) in xi.terms() {
        if g.is_identity() {
            continue;
        }
        // xi(g) * (g - e) = -xi(g) * (1 - g), telescoped over the word of g
        let letters = &g.0;
        for (i, &s) in letters.iter().enumerate() {
            let fragment = match side {
                Side::Left => Word(letters[..i].to_vec()),
                Side::Right => Word(letters[i + 1..].to_vec()),
            };
            let piece = RingElement::monomial(&group, &fragment, -c.clone())?;
            coefficients
                .entry(s)
                .and_modify(|a| *a = a.add(&piece).expect("same group"))
                .or_insert(piece);
        }
    }
    coefficients.retain(|_, a| !a.is_zero());
    let decomposition = GeneratorDecomposition { side, coefficients };
    debug_assert_eq!(&decomposition.recompose(&group)?, xi);
    Ok(decomposition)
}

/// A sum `sum_i lambda_i * f_{i,1} * ... * f_{i,n}` of products of
/// augmentation-ideal factors. Depth 2 witnesses membership in the
/// square of the augmentation ideal.
#[derive(Debug, Clone, Default)]
pub struct SquareExpression {
    pub terms: Vec<(Scalar, Vec<RingElement>)>,
}

impl SquareExpression {
    pub fn new(terms: Vec<(Scalar, Vec<RingElement>)>) -> Result<Self> {
        for (_, factors) in &terms {
            for f in factors {
                require_augmentation_zero(f)?;
            }
        }
        Ok(SquareExpression { terms })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies every term out and sums.
    pub fn expand(&self, group: &Arc<GroupModel>) -> Result<RingElement> {
        let mut acc = RingElement::zero(group);
        for (lambda, factors) in &self.terms {
            let mut prod = RingElement::one(group);
            for f in factors {
                prod = prod.mul(f)?;
            }
            acc = acc.add(&prod.scale(lambda))?;
        }
        Ok(acc)
    }

    /// Drops zero terms and reduces scalars (they are always reduced,
    /// so this only prunes).
    pub fn prune(mut self) -> Self {
        self.terms
            .retain(|(l, fs)| !l.is_zero() && fs.iter().all(|f| !f.is_zero()));
        self
    }
}

/// Witness that `m * (1 - g)` is in the square of the augmentation
/// ideal when `g^m = e`: the telescoping identity
/// `sum_{i=0}^{m-1} (1 - g^i)(1 - g) = m(1 - g) - (1 - g^m)`.
pub fn torsion_square_witness(
    group: &Arc<GroupModel>,
    g: &Word,
    m: u64,
) -> Result<SquareExpression> {
    let g = group.normalize(g)?;
    let mut power = Word::identity();
    let mut factors = Vec::new();
    for _ in 1..m {
        power = group.multiply(&power, &g)?;
        factors.push(RingElement::one_minus(group, &power)?);
    }
    // final check g^m = e
    power = group.multiply(&power, &g)?;
    if !power.is_identity() {
        return Err(Error::InvalidTorsion);
    }
    let one_minus_g = RingElement::one_minus(group, &g)?;
    let terms = factors
        .into_iter()
        .filter(|f| !f.is_zero())
        .map(|f| (Scalar::one(), vec![f, one_minus_g.clone()]))
        .collect();
    Ok(SquareExpression { terms })
}

/// Witness that `1 - b^-1 a^-1 b a` is in the square of the
/// augmentation ideal:
/// `1 - b^-1 a^-1 b a = (ab)^-1 ((1-a)(1-b) - (1-b)(1-a))`,
/// with `(ab)^-1` distributed into the left factors so that each factor
/// has augmentation zero.
pub fn commutator_square_witness(
    group: &Arc<GroupModel>,
    a: &Word,
    b: &Word,
) -> Result<SquareExpression> {
    let commutator = group.multiply(
        &group.multiply(&group.invert(b)?, &group.invert(a)?)?,
        &group.multiply(b, a)?,
    )?;
    if commutator.is_identity() {
        return Ok(SquareExpression::default());
    }
    let ab = group.multiply(a, b)?;
    let ab_inv = group.invert(&ab)?;
    let b_inv = group.invert(b)?;
    // (ab)^-1 (1-a) = (ab)^-1 - b^-1
    let left1 = RingElement::monomial(group, &ab_inv, Scalar::one())?
        .sub(&RingElement::monomial(group, &b_inv, Scalar::one())?)?;
    // (ab)^-1 (1-b) = (ab)^-1 - b^-1 a^-1 b
    let conj = group.multiply(&group.multiply(&b_inv, &group.invert(a)?)?, b)?;
    let left2 = RingElement::monomial(group, &ab_inv, Scalar::one())?
        .sub(&RingElement::monomial(group, &conj, Scalar::one())?)?;
    let one_minus_a = RingElement::one_minus(group, a)?;
    let one_minus_b = RingElement::one_minus(group, b)?;
    SquareExpression::new(vec![
        (Scalar::one(), vec![left1, one_minus_b]),
        (-Scalar::one(), vec![left2, one_minus_a]),
    ])
}

/// Witness lookup: the entry for a generator, mirroring an inverse
/// generator's entry if needed.
fn witness_entry(
    group: &Arc<GroupModel>,
    witness: &FiniteAbelianizationWitness,
    gi: u32,
) -> Result<(u64, Vec<(Word, Word)>)> {
    if let Some(e) = witness.entries.get(&gi) {
        return Ok((e.exponent, e.commutators.clone()));
    }
    let inv = group.alphabet.inverse(gi);
    if let Some(e) = witness.entries.get(&inv) {
        let mirrored = e
            .commutators
            .iter()
            .rev()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        return Ok((e.exponent, mirrored));
    }
    Err(Error::WitnessRequired)
}

/// One application of the idempotence step to a single factor in the
/// augmentation ideal: returns a depth-2 expression equal to it, whose
/// trailing factors are all of the form `1 - g`.
fn expand_factor(
    group: &Arc<GroupModel>,
    witness: &FiniteAbelianizationWitness,
    factor: &RingElement,
) -> Result<Vec<(Scalar, RingElement, RingElement)>> {
    let mut out: Vec<(Scalar, RingElement, RingElement)> = Vec::new();
    let decomposition = generator_decompose(factor, Side::Left)?;
    for (gi, a_s) in decomposition.coefficients {
        let (m, commutators) = witness_entry(group, witness, gi)?;
        let s = Word::single(gi);
        let inv_m = Scalar::new(1.into(), (m as i64).into());
        let one_minus_s = RingElement::one_minus(group, &s)?;
        // (1-s) = (1/m) [ sum_{i=1}^{m-1} (1-s^i)(1-s) + (1-s^m) ]
        let mut p = Word::identity();
        for _ in 1..m {
            p = group.multiply(&p, &s)?;
            let f1 = a_s.mul(&RingElement::one_minus(group, &p)?)?;
            if !f1.is_zero() {
                out.push((inv_m.clone(), f1, one_minus_s.clone()));
            }
        }
        p = group.multiply(&p, &s)?; // s^m
        if !p.is_identity() {
            // telescope 1 - c_1 ... c_r over the commutator factorization
            let mut prefix = Word::identity();
            let mut product_check = Word::identity();
            for (ca, cb) in &commutators {
                let c = group.multiply(
                    &group.multiply(&group.invert(cb)?, &group.invert(ca)?)?,
                    &group.multiply(cb, ca)?,
                )?;
                let sub = commutator_square_witness(group, ca, cb)?;
                let carried = a_s.mul(&RingElement::monomial(group, &prefix, Scalar::one())?)?;
                for (mu, factors) in sub.terms {
                    debug_assert_eq!(factors.len(), 2);
                    let f1 = carried.mul(&factors[0])?;
                    if !f1.is_zero() {
                        out.push((inv_m.clone() * mu, f1, factors[1].clone()));
                    }
                }
                prefix = group.multiply(&prefix, &c)?;
                product_check = group.multiply(&product_check, &c)?;
            }
            if product_check != p {
                return Err(Error::InvalidWitness(vec![group
                    .alphabet
                    .name(gi)
                    .to_string()]));
            }
        }
    }
    Ok(out)
}

/// Exhibits `xi` as an element of the n-th augmentation power: a fully
/// expanded sum of products of `depth` augmentation-ideal factors,
/// built from the witness by torsion substitution and commutator
/// telescoping.
pub fn idempotence_decompose(
    xi: &RingElement,
    witness: &FiniteAbelianizationWitness,
    depth: usize,
) -> Result<SquareExpression> {
    assert!(depth >= 2, "idempotence decomposition needs depth >= 2");
    let group = xi.group().clone();
    require_augmentation_zero(xi)?;
    if xi.is_zero() {
        return Ok(SquareExpression::default());
    }
    // depth 2
    let mut terms: Vec<(Scalar, Vec<RingElement>)> = expand_factor(&group, witness, xi)?
        .into_iter()
        .map(|(l, f1, f2)| (l, vec![f1, f2]))
        .collect();
    // one more factor per round: expand the trailing factor again
    for _ in 2..depth {
        let mut next = Vec::new();
        for (lambda, mut factors) in terms {
            let last = factors.pop().expect("nonempty factor list");
            for (mu, f1, f2) in expand_factor(&group, witness, &last)? {
                let mut fs = factors.clone();
                fs.push(f1);
                fs.push(f2);
                next.push((lambda.clone() * mu, fs));
            }
        }
        terms = next;
    }
    Ok(SquareExpression { terms }.prune())
}

fn finite_basis_data(group: &Arc<GroupModel>) -> Result<usize> {
    match &group.kind {
        GroupKind::Finite { elements, .. } => Ok(elements.len()),
        _ => Err(Error::UnsupportedModel(
            "brute-force filtration needs a finite model".into(),
        )),
    }
}

fn element_vector(group: &Arc<GroupModel>, xi: &RingElement, n: usize) -> Result<Vec<Scalar>> {
    let mut v = vec![Scalar::zero(); n];
    for (g, c) in xi.terms() {
        v[group.eval_finite(g)?] = c.clone();
    }
    Ok(v)
}

/// Incremental exact row reduction over the rationals.
struct SpanBasis {
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl SpanBasis {
    fn new() -> Self {
        SpanBasis {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place; returns the residual.
    fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.clone() - f.clone() * r;
                }
            }
        }
        v
    }

    /// Returns true if the vector enlarged the span.
    fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let mut r = self.reduce(v);
        match r.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let lead = r[p].clone();
                for x in r.iter_mut() {
                    *x = x.clone() / lead.clone();
                }
                self.rows.push(r);
                self.pivots.push(p);
                true
            }
        }
    }

    fn contains(&self, v: Vec<Scalar>) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

/// Span bases of the powers `I, I^2, ..., I^{n_max}` for a finite model.
fn power_span_bases(group: &Arc<GroupModel>, n_max: usize) -> Result<Vec<SpanBasis>> {
    let n = finite_basis_data(group)?;
    if n > 24 || n_max > 5 {
        return Err(Error::UnsupportedModel(format!(
            "filtration guard: |G| <= 24 and n <= 5 (got |G| = {n}, n = {n_max})"
        )));
    }
    let elements = group.all_elements()?;
    let one_minus: Vec<RingElement> = elements
        .iter()
        .filter(|w| !w.is_identity())
        .map(|w| RingElement::one_minus(group, w))
        .collect::<Result<_>>()?;
    let mut bases: Vec<SpanBasis> = Vec::new();
    // level 1: the elements 1 - g themselves; deeper levels multiply the
    // previous level's spanning elements by each 1 - g on the right
    let mut level_elems: Vec<RingElement> = one_minus.clone();
    for _ in 0..n_max {
        let mut basis = SpanBasis::new();
        let mut kept: Vec<RingElement> = Vec::new();
        for x in &level_elems {
            if basis.insert(element_vector(group, x, n)?) {
                kept.push(x.clone());
            }
            if basis.dim() == n - 1 {
                break;
            }
        }
        bases.push(basis);
        let mut next = Vec::new();
        for x in &kept {
            for y in &one_minus {
                next.push(x.mul(y)?);
            }
        }
        level_elems = next;
    }
    Ok(bases)
}

/// Exact membership of `xi` in the span of n-fold products
/// `prod (1 - g_i)`. Finite models only.
pub fn power_membership(xi: &RingElement, n: usize) -> Result<bool> {
    let group = xi.group().clone();
    let size = finite_basis_data(&group)?;
    if n == 0 {
        return Ok(true);
    }
    let bases = power_span_bases(&group, n)?;
    Ok(bases[n - 1].contains(element_vector(&group, xi, size)?))
}

/// Dimensions of the augmentation quotients `I^n / I^{n+1}` for
/// `n = 1..n_max`. Finite models only.
pub fn quotient_dims(group: &Arc<GroupModel>, n_max: usize) -> Result<Vec<usize>> {
    let bases = power_span_bases(group, n_max + 1)?;
    Ok((0..n_max)
        .map(|i| bases[i].dim() - bases[i + 1].dim())
        .collect())
}

/// The n-th dimension subgroup: all g with `1 - g` in the n-th
/// augmentation power. Finite models only.
pub fn dimension_subgroup(group: &Arc<GroupModel>, n: usize) -> Result<Vec<Word>> {
    let size = finite_basis_data(group)?;
    let bases = power_span_bases(group, n.max(1))?;
    let mut out = Vec::new();
    for w in group.all_elements()? {
        if w.is_identity() {
            out.push(w);
            continue;
        }
        let v = element_vector(group, &RingElement::one_minus(group, &w)?, size)?;
        if n == 0 || bases[n - 1].contains(v) {
            out.push(w);
        }
    }
    Ok(out)
}

/// The exponent-sum pairing `L_s(xi) = sum_g xi(g) * expsum_s(g)` on a
/// free model. It annihilates the square of the augmentation ideal and
/// takes the value -1 on `1 - s`, so a nonzero value certifies that an
/// element is not in `I^2`.
pub fn abelianization_functional(xi: &RingElement, s: u32) -> Result<Scalar> {
    let group = xi.group();
    if !matches!(group.kind, GroupKind::Free { .. }) {
        return Err(Error::UnsupportedModel(
            "exponent sums need a free model".into(),
        ));
    }
    let inv = group.alphabet.inverse(s);
    let mut acc = Scalar::zero();
    for (g, c) in xi.terms() {
        let mut expsum = 0i64;
        for &l in &g.0 {
            if l == s {
                expsum += 1;
            } else if l == inv {
                expsum -= 1;
            }
        }
        acc += c.clone() * Scalar::from_integer(expsum.into());
    }
    Ok(acc)
}
