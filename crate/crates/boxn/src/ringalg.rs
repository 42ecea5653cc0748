//! Exact sparse arithmetic in the rational group ring and in matrices
//! over it, with the `*`-involution and the augmentation map.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::groups::{GroupModel, Word};
use crate::{Error, Result};

/// Exact rational scalar. Always stored in canonical reduced form with
/// positive denominator.
pub type Scalar = BigRational;

/// Parses a rational written as `p/q` or `p`, with optional sign.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let t = text.trim();
    BigRational::from_str(t)
        .or_else(|_| BigInt::from_str(t).map(BigRational::from))
        .map_err(|_| Error::Parse(format!("invalid rational {text:?}")))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn scalar_int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn scalar_ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Sparse exact-rational group-ring element. Keys are normalized words;
/// zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    group: Arc<GroupModel>,
    terms: BTreeMap<Word, Scalar>,
}

impl RingElement {
    pub fn zero(group: &Arc<GroupModel>) -> Self {
        RingElement {
            group: group.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(group: &Arc<GroupModel>) -> Self {
        Self::monomial(group, &Word::identity(), Scalar::one())
            .expect("identity is always normalizable")
    }

    /// `c * g` for a single group element.
    pub fn monomial(group: &Arc<GroupModel>, g: &Word, c: Scalar) -> Result<Self> {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(group.normalize(g)?, c);
        }
        Ok(RingElement {
            group: group.clone(),
            terms,
        })
    }

    /// `1 - g`.
    pub fn one_minus(group: &Arc<GroupModel>, g: &Word) -> Result<Self> {
        let mut x = Self::one(group);
        x.add_term(group.normalize(g)?, -Scalar::one());
        Ok(x)
    }

    pub fn from_terms<I>(group: &Arc<GroupModel>, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Scalar)>,
    {
        let mut x = Self::zero(group);
        for (w, c) in it {
            x.add_term(group.normalize(&w)?, c);
        }
        Ok(x)
    }

    pub fn group(&self) -> &Arc<GroupModel> {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, g: &Word) -> Scalar {
        self.terms.get(g).cloned().unwrap_or_else(Scalar::zero)
    }

    fn add_term(&mut self, key: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_group(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_group(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.group);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_group(other)?;
        let mut out = Self::zero(&self.group);
        for (g, c) in &self.terms {
            for (h, d) in &other.terms {
                let key = self.group.multiply(g, h)?;
                out.add_term(key, c.clone() * d.clone());
            }
        }
        Ok(out)
    }

    /// The involution: linear extension of `g -> g^-1`.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(&self.group);
        for (g, c) in &self.terms {
            let key = self.group.invert(g).expect("stored keys are normalizable");
            out.add_term(key, c.clone());
        }
        out
    }

    /// Sum of coefficients (the augmentation map).
    pub fn augmentation(&self) -> Scalar {
        self.terms.values().fold(Scalar::zero(), |a, c| a + c)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.star()
    }

    /// Evaluates `self` raised to a small power by repeated convolution.
    pub fn pow(&self, n: usize) -> Result<Self> {
        let mut out = Self::one(&self.group);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

/// Dense matrix over [`RingElement`] with the `*`-involution given by
/// transposition plus entrywise star.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RingElement>,
}

impl RingMatrix {
    pub fn zero(group: &Arc<GroupModel>, rows: usize, cols: usize) -> Self {
        RingMatrix {
            rows,
            cols,
            entries: vec![RingElement::zero(group); rows * cols],
        }
    }

    pub fn identity(group: &Arc<GroupModel>, k: usize) -> Self {
        let mut m = Self::zero(group, k, k);
        for i in 0..k {
            *m.at_mut(i, i) = RingElement::one(group);
        }
        m
    }

    /// Diagonal `k x k` matrix with `xi` in each diagonal entry.
    pub fn diag_k(xi: &RingElement, k: usize) -> Self {
        let mut m = Self::zero(xi.group(), k, k);
        for i in 0..k {
            *m.at_mut(i, i) = xi.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RingElement>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::ShapeMismatch("empty matrix".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let group = rows[0][0].group().clone();
        for row in &rows {
            for e in row {
                if !(Arc::ptr_eq(e.group(), &group) || **e.group() == *group) {
                    return Err(Error::GroupMismatch);
                }
            }
        }
        Ok(RingMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn group(&self) -> &Arc<GroupModel> {
        self.entries[0].group()
    }

    pub fn at(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut RingElement {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.neg();
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(c);
        }
        out
    }

    pub fn matrix_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let group = self.group().clone();
        let mut out = Self::zero(&group, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RingElement::zero(&group);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(other.at(k, j))?)?;
                }
                *out.at_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    /// Transpose combined with entrywise star.
    pub fn matrix_star(&self) -> Self {
        let group = self.group().clone();
        let mut out = Self::zero(&group, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).star();
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.matrix_star()
    }

    /// Hermitian part `(m + m*) / 2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        let half = Scalar::new(BigInt::from(1), BigInt::from(2));
        Ok(self.add(&self.matrix_star())?.scale(&half))
    }
}
