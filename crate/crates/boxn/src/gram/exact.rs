//! Exact rational linear algebra for the Gram pipeline: pivoted LDL
//! factorization with a PSD verdict, rational rounding, simplest
//! rationals in an interval, and exact affine projection.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ringalg::Scalar;

/// Result of the exact PSD check.
#[derive(Debug, Clone)]
pub enum PsdOutcome {
    Psd(LdlFactorization),
    /// A rational vector `v` with `v^T P v < 0`.
    NotPsd {
        witness: Vec<Scalar>,
    },
}

impl PsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Psd(_))
    }
}

/// `P = sum_k d_k l_k l_k^T` with `d_k > 0`; `l_k` carries a 1 at its
/// pivot index.
#[derive(Debug, Clone)]
pub struct LdlFactorization {
    pub pivots: Vec<Scalar>,
    pub columns: Vec<Vec<Scalar>>,
    pub size: usize,
}

impl LdlFactorization {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Exact PSD check of a symmetric rational matrix by symmetric Gaussian
/// elimination with greatest-diagonal pivoting. PSD iff the elimination
/// completes with nonnegative pivots and a vanishing residue.
pub fn psd_check_exact(p: &[Vec<Scalar>]) -> PsdOutcome {
    let n = p.len();
    let mut s: Vec<Vec<Scalar>> = p.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<Scalar> = Vec::new();
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    let mut pivot_indices: Vec<usize> = Vec::new();
    loop {
        if active.is_empty() {
            return PsdOutcome::Psd(LdlFactorization {
                pivots,
                columns,
                size: n,
            });
        }
        // greatest remaining diagonal entry, lowest index on ties
        let mut imax = active[0];
        for &i in &active[1..] {
            if s[i][i] > s[imax][imax] {
                imax = i;
            }
        }
        let dmax = s[imax][imax].clone();
        if dmax.is_negative() {
            let y = unit_vector(n, imax);
            let witness = lift_witness(&pivot_indices, &columns, y);
            debug_assert!(quadratic_form(p, &witness).is_negative());
            return PsdOutcome::NotPsd { witness };
        }
        if dmax.is_zero() {
            // all remaining diagonal entries are <= 0, hence == 0;
            // any nonzero off-diagonal entry makes the block indefinite
            let mut bad: Option<(usize, usize)> = None;
            'search: for (ai, &i) in active.iter().enumerate() {
                for &j in active.iter().skip(ai + 1) {
                    if !s[i][j].is_zero() {
                        bad = Some((i, j));
                        break 'search;
                    }
                }
            }
            match bad {
                None => {
                    return PsdOutcome::Psd(LdlFactorization {
                        pivots,
                        columns,
                        size: n,
                    })
                }
                Some((i, j)) => {
                    let mut y = vec![Scalar::zero(); n];
                    y[i] = if s[i][j].is_positive() {
                        -Scalar::one()
                    } else {
                        Scalar::one()
                    };
                    y[j] = Scalar::one();
                    let witness = lift_witness(&pivot_indices, &columns, y);
                    debug_assert!(quadratic_form(p, &witness).is_negative());
                    return PsdOutcome::NotPsd { witness };
                }
            }
        }
        // eliminate the pivot
        let d = dmax;
        let mut col = vec![Scalar::zero(); n];
        col[imax] = Scalar::one();
        for &j in &active {
            if j != imax {
                col[j] = s[j][imax].clone() / d.clone();
            }
        }
        let remaining: Vec<usize> = active.iter().copied().filter(|&j| j != imax).collect();
        for &j in &remaining {
            for &l in &remaining {
                let delta = col[j].clone() * s[imax][l].clone();
                s[j][l] = s[j][l].clone() - delta;
            }
        }
        pivots.push(d);
        columns.push(col);
        pivot_indices.push(imax);
        active = remaining;
    }
}

fn unit_vector(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

/// Lifts a witness on the Schur complement back through the recorded
/// elimination columns so that `v^T P v` equals the complement's value.
fn lift_witness(
    pivot_indices: &[usize],
    columns: &[Vec<Scalar>],
    mut v: Vec<Scalar>,
) -> Vec<Scalar> {
    for (m, &p) in pivot_indices.iter().enumerate().rev() {
        // choose v[p] so that l_m . v = 0
        let mut dot = Scalar::zero();
        for (i, x) in v.iter().enumerate() {
            if i != p && !x.is_zero() && !columns[m][i].is_zero() {
                dot += columns[m][i].clone() * x.clone();
            }
        }
        v[p] = -dot;
    }
    v
}

pub fn quadratic_form(p: &[Vec<Scalar>], v: &[Scalar]) -> Scalar {
    let n = p.len();
    let mut acc = Scalar::zero();
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if !v[j].is_zero() {
                acc += v[i].clone() * p[i][j].clone() * v[j].clone();
            }
        }
    }
    acc
}

/// Best rational approximation with denominator at most `max_den`,
/// computed from the continued-fraction expansion.
pub fn rational_approx(x: f64, max_den: u64) -> Scalar {
    assert!(max_den >= 1);
    if !x.is_finite() {
        return Scalar::zero();
    }
    let negative = x < 0.0;
    let target = x.abs();
    let mut v = target;
    // convergents h/k
    let (mut h0, mut k0) = (BigInt::from(0), BigInt::from(1));
    let (mut h1, mut k1) = (BigInt::from(1), BigInt::from(0));
    let bound = BigInt::from(max_den);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let h2 = ai.clone() * &h1 + &h0;
        let k2 = ai.clone() * &k1 + &k0;
        if k2 > bound {
            // best semiconvergent that still fits
            let t = (&bound - &k0) / &k1;
            let h = &t * &h1 + &h0;
            let k = &t * &k1 + &k0;
            let cand1 = Scalar::new(h, k.max(BigInt::one()));
            let cand2 = Scalar::new(h1.clone(), k1.clone().max(BigInt::one()));
            let xr = Scalar::from_float(target).unwrap_or_else(Scalar::zero);
            let pick = if (cand1.clone() - xr.clone()).abs() < (cand2.clone() - xr).abs() {
                cand1
            } else {
                cand2
            };
            return if negative { -pick } else { pick };
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let out = Scalar::new(h1, k1.max(BigInt::one()));
    if negative {
        -out
    } else {
        out
    }
}

/// The unique simplest rational strictly between `lo` and `hi`
/// (smallest denominator, then smallest numerator magnitude).
pub fn simplest_in_open_interval(lo: &Scalar, hi: &Scalar) -> Scalar {
    assert!(lo < hi, "empty interval");
    if lo.is_negative() {
        if hi.is_positive() {
            return Scalar::zero();
        }
        // hi <= 0: mirror into the nonnegative half-line
        return -simplest_in_open_interval(&-hi.clone(), &-lo.clone());
    }
    simplest_nonneg(lo, hi)
}

fn simplest_nonneg(lo: &Scalar, hi: &Scalar) -> Scalar {
    let floor_lo = lo.floor();
    let candidate = floor_lo.clone() + Scalar::one();
    if &candidate < hi {
        return candidate;
    }
    // both strictly inside (floor_lo, floor_lo + 1]
    let u = lo - floor_lo.clone();
    let v = hi - floor_lo.clone();
    if u.is_zero() {
        // interval (0, v): simplest is 1/(floor(1/v) + 1)
        let m = (Scalar::one() / v).floor() + Scalar::one();
        return floor_lo + Scalar::one() / m;
    }
    let inner = simplest_nonneg(&(Scalar::one() / v), &(Scalar::one() / u));
    floor_lo + Scalar::one() / inner
}

/// Solves `mat * x = rhs` exactly; free variables are set to zero.
/// Returns `None` when the system is inconsistent.
pub fn solve_rational_system(
    mut mat: Vec<Vec<Scalar>>,
    mut rhs: Vec<Scalar>,
) -> Option<Vec<Scalar>> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        if let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) {
            mat.swap(r, p);
            rhs.swap(r, p);
            let lead = mat[r][c].clone();
            for x in mat[r].iter_mut() {
                *x = x.clone() / lead.clone();
            }
            rhs[r] = rhs[r].clone() / lead;
            for i in 0..rows {
                if i != r && !mat[i][c].is_zero() {
                    let f = mat[i][c].clone();
                    for j in 0..cols {
                        let delta = f.clone() * mat[r][j].clone();
                        mat[i][j] = mat[i][j].clone() - delta;
                    }
                    let delta = f * rhs[r].clone();
                    rhs[i] = rhs[i].clone() - delta;
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
    }
    for i in r..rows {
        if !rhs[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![Scalar::zero(); cols];
    for (row, &c) in pivot_cols.iter().enumerate() {
        x[c] = rhs[row].clone();
    }
    Some(x)
}

pub fn scalar_to_f64(x: &Scalar) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ringalg::{scalar_int, scalar_ratio};
    use rand::{Rng, SeedableRng};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| scalar_int(x)).collect())
            .collect()
    }

    #[test]
    fn identity_is_psd() {
        let outcome = psd_check_exact(&mat(&[&[1, 0], &[0, 1]]));
        assert!(outcome.is_psd());
    }

    #[test]
    fn zero_matrix_is_psd() {
        assert!(psd_check_exact(&mat(&[&[0, 0], &[0, 0]])).is_psd());
    }

    #[test]
    fn indefinite_detected_with_witness() {
        let p = mat(&[&[1, 2], &[2, 1]]);
        match psd_check_exact(&p) {
            PsdOutcome::NotPsd { witness } => {
                assert!(quadratic_form(&p, &witness).is_negative());
            }
            PsdOutcome::Psd(_) => panic!("[[1,2],[2,1]] is not PSD"),
        }
    }

    #[test]
    fn zero_diagonal_offdiag_detected() {
        let p = mat(&[&[0, 3], &[3, 0]]);
        match psd_check_exact(&p) {
            PsdOutcome::NotPsd { witness } => {
                assert!(quadratic_form(&p, &witness).is_negative());
            }
            _ => panic!("hyperbolic block is not PSD"),
        }
    }

    #[test]
    fn factorization_reconstructs() {
        let p = mat(&[&[4, 2, 0], &[2, 5, 3], &[0, 3, 6]]);
        match psd_check_exact(&p) {
            PsdOutcome::Psd(f) => {
                let n = f.size;
                let mut recon = vec![vec![Scalar::zero(); n]; n];
                for (d, col) in f.pivots.iter().zip(&f.columns) {
                    for i in 0..n {
                        for j in 0..n {
                            recon[i][j] += d.clone() * col[i].clone() * col[j].clone();
                        }
                    }
                }
                assert_eq!(recon, p);
            }
            _ => panic!("matrix is PSD"),
        }
    }

    #[test]
    fn psd_agrees_with_principal_minors_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(83);
        for _ in 0..40 {
            // random symmetric 5x5 with small integer entries
            let n = 5;
            let mut p = vec![vec![Scalar::zero(); n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let v = scalar_int(rng.gen_range(-3..4));
                    p[i][j] = v.clone();
                    p[j][i] = v;
                }
            }
            let by_ldl = psd_check_exact(&p).is_psd();
            let by_eigen = min_eig_sign(&p);
            assert_eq!(by_ldl, by_eigen, "{p:?}");
        }
    }

    /// Slow reference: checks PSD through all principal minors of the
    /// symmetric matrix (Sylvester-style, using every subset).
    fn min_eig_sign(p: &[Vec<Scalar>]) -> bool {
        let n = p.len();
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vec<Scalar>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| p[i][j].clone()).collect())
                .collect();
            if determinant(sub).is_negative() {
                return false;
            }
        }
        true
    }

    fn determinant(mut m: Vec<Vec<Scalar>>) -> Scalar {
        let n = m.len();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= m[c][c].clone();
            let lead = m[c][c].clone();
            for i in (c + 1)..n {
                if !m[i][c].is_zero() {
                    let f = m[i][c].clone() / lead.clone();
                    for j in c..n {
                        let delta = f.clone() * m[c][j].clone();
                        m[i][j] = m[i][j].clone() - delta;
                    }
                }
            }
        }
        det
    }

    #[test]
    fn rational_approx_recovers_simple_fractions() {
        assert_eq!(rational_approx(0.5, 100), scalar_ratio(1, 2));
        assert_eq!(rational_approx(-1.25, 100), scalar_ratio(-5, 4));
        assert_eq!(rational_approx(1.0 / 3.0 + 1e-13, 1000), scalar_ratio(1, 3));
        assert_eq!(rational_approx(2.0, 10), scalar_int(2));
    }

    #[test]
    fn simplest_rational_in_intervals() {
        let s = simplest_in_open_interval(&scalar_ratio(1, 3), &scalar_ratio(1, 2));
        assert_eq!(s, scalar_ratio(2, 5));
        let s = simplest_in_open_interval(&scalar_int(4), &scalar_ratio(9, 2));
        assert_eq!(s, scalar_ratio(13, 3));
        let s = simplest_in_open_interval(&scalar_ratio(7, 2), &scalar_int(5));
        assert_eq!(s, scalar_int(4));
        let s = simplest_in_open_interval(&scalar_int(-1), &scalar_int(1));
        assert_eq!(s, scalar_int(0));
        let s = simplest_in_open_interval(&scalar_ratio(-7, 2), &scalar_ratio(-10, 3));
        assert_eq!(s, scalar_ratio(-17, 5));
    }

    #[test]
    fn simplest_rational_is_inside_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(89);
        for _ in 0..200 {
            let a = scalar_ratio(rng.gen_range(-50..50), rng.gen_range(1..30));
            let b = scalar_ratio(rng.gen_range(-50..50), rng.gen_range(1..30));
            if a == b {
                continue;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let s = simplest_in_open_interval(&lo, &hi);
            assert!(lo < s && s < hi, "{lo} < {s} < {hi} violated");
        }
    }

    #[test]
    fn linear_solver_handles_dependent_rows() {
        // x + y = 2 twice, consistent
        let m = mat(&[&[1, 1], &[1, 1]]);
        let rhs = vec![scalar_int(2), scalar_int(2)];
        let x = solve_rational_system(m, rhs).unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), scalar_int(2));
        // inconsistent
        let m = mat(&[&[1, 1], &[1, 1]]);
        let rhs = vec![scalar_int(2), scalar_int(3)];
        assert!(solve_rational_system(m, rhs).is_none());
    }
}
