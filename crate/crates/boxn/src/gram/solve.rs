//! Floating-point side of the Gram search: a cyclic Jacobi
//! eigendecomposition for symmetric matrices and alternating
//! projections between the PSD cone and the affine constraint set,
//! with the Dykstra correction on the cone side.

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![0.0; n]; n]
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns eigenvalues and the matrix of eigenvectors as columns
/// (`v[i][k]` = component `i` of eigenvector `k`).
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut m = a.clone();
    let mut v = zeros(n);
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p][q].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= 1e-16 * scale {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m[i][p];
                    let miq = m[i][q];
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for j in 0..n {
                    let mpj = m[p][j];
                    let mqj = m[q][j];
                    m[p][j] = c * mpj - s * mqj;
                    m[q][j] = s * mpj + c * mqj;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| m[i][i]).collect();
    (eig, v)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Mat) -> f64 {
    let (eig, _) = jacobi_eigen(a);
    eig.into_iter().fold(f64::INFINITY, f64::min)
}

/// Projection onto the PSD cone: clamp negative eigenvalues to zero.
pub fn project_psd(a: &Mat) -> Mat {
    let n = a.len();
    // symmetrize first to wash out drift
    let mut sym = zeros(n);
    for i in 0..n {
        for j in 0..n {
            sym[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    let (eig, v) = jacobi_eigen(&sym);
    let mut out = zeros(n);
    for k in 0..n {
        let lam = eig[k].max(0.0);
        if lam == 0.0 {
            continue;
        }
        for i in 0..n {
            if v[i][k] == 0.0 {
                continue;
            }
            let vik = lam * v[i][k];
            for j in 0..n {
                out[i][j] += vik * v[j][k];
            }
        }
    }
    out
}

/// One affine constraint class: the listed entries must sum to `value`.
#[derive(Debug, Clone)]
pub struct NumericClass {
    pub pairs: Vec<(usize, usize)>,
    pub value: f64,
}

/// Orthogonal projection onto the constraint classes (they partition
/// the entries, so spreading each correction equally is exact).
pub fn project_affine(a: &Mat, classes: &[NumericClass]) -> Mat {
    let mut out = a.clone();
    for class in classes {
        let sum: f64 = class.pairs.iter().map(|&(i, j)| a[i][j]).sum();
        let delta = (class.value - sum) / class.pairs.len() as f64;
        for &(i, j) in &class.pairs {
            out[i][j] += delta;
        }
    }
    out
}

fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    let mut m = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            m = m.max((x - y).abs());
        }
    }
    m
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    /// A matrix on the affine set with smallest eigenvalue above `-tol`.
    Feasible(Mat),
    Infeasible,
}

/// Final state of the iteration, converged or not. Boundary-touching
/// feasible sets make alternating projections sublinear, so callers
/// that can verify exactly should consume the best iterate even when
/// the tolerance was not reached.
#[derive(Debug, Clone)]
pub struct IterateOutcome {
    pub converged: bool,
    pub matrix: Mat,
    pub residual: f64,
}

/// Alternating projections with the Dykstra correction on the cone
/// side; the affine set needs no correction. Stops on convergence,
/// iteration exhaustion, or a long residual plateau.
pub fn alternating_projections_iterate(
    n: usize,
    classes: &[NumericClass],
    tol: f64,
    max_iter: usize,
) -> IterateOutcome {
    let mut x = project_affine(&zeros(n), classes);
    let mut correction = zeros(n);
    let mut residual = f64::INFINITY;
    let mut best_residual = f64::INFINITY;
    let mut last_check = f64::INFINITY;
    const WINDOW: usize = 3000;
    for iter in 0..max_iter {
        let mut shifted = x.clone();
        for i in 0..n {
            for j in 0..n {
                shifted[i][j] += correction[i][j];
            }
        }
        let y = project_psd(&shifted);
        for i in 0..n {
            for j in 0..n {
                correction[i][j] = shifted[i][j] - y[i][j];
            }
        }
        x = project_affine(&y, classes);
        residual = max_abs_diff(&x, &y);
        if residual <= tol {
            return IterateOutcome {
                converged: true,
                matrix: x,
                residual,
            };
        }
        best_residual = best_residual.min(residual);
        if iter % WINDOW == WINDOW - 1 {
            // residual plateau well above tolerance: stop iterating
            if best_residual > 1e3 * tol && best_residual > 0.999 * last_check {
                break;
            }
            last_check = best_residual;
        }
    }
    IterateOutcome {
        converged: false,
        matrix: x,
        residual,
    }
}

/// Strict feasibility interface: converged iterates only.
pub fn alternating_projections(
    n: usize,
    classes: &[NumericClass],
    tol: f64,
    max_iter: usize,
) -> SolveOutcome {
    let out = alternating_projections_iterate(n, classes, tol, max_iter);
    if out.converged {
        SolveOutcome::Feasible(out.matrix)
    } else {
        SolveOutcome::Infeasible
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let a = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let (eig, v) = jacobi_eigen(&a);
        // reconstruct
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += v[i][k] * eig[k] * v[j][k];
                }
                assert!((s - a[i][j]).abs() < 1e-10);
            }
        }
        let mut sorted = eig.clone();
        sorted.sort_by(f64::total_cmp);
        // known spectrum: 2, (5 +- sqrt(8+1...)) check against trace/det
        let trace: f64 = eig.iter().sum();
        assert!((trace - 7.0).abs() < 1e-10);
    }

    #[test]
    fn psd_projection_fixes_negative_modes() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        let p = project_psd(&a);
        assert!(min_eigenvalue(&p) > -1e-12);
        // projection of a PSD matrix is itself
        let b = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let q = project_psd(&b);
        for i in 0..2 {
            for j in 0..2 {
                assert!((q[i][j] - b[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn alternating_projection_rank_one() {
        // target (1-g)*(1-g) over basis {e, g}: unique Gram
        // [[1, -1], [-1, 1]]
        let classes = vec![
            NumericClass {
                pairs: vec![(0, 0), (1, 1)],
                value: 2.0,
            },
            NumericClass {
                pairs: vec![(0, 1)],
                value: -1.0,
            },
            NumericClass {
                pairs: vec![(1, 0)],
                value: -1.0,
            },
        ];
        match alternating_projections(2, &classes, 1e-10, 100_000) {
            SolveOutcome::Feasible(p) => {
                assert!((p[0][0] - 1.0).abs() < 1e-6);
                assert!((p[0][1] + 1.0).abs() < 1e-6);
            }
            SolveOutcome::Infeasible => panic!("feasible problem"),
        }
    }

    #[test]
    fn alternating_projection_detects_infeasible() {
        // trace must be -1 but PSD needs trace >= 0
        let classes = vec![
            NumericClass {
                pairs: vec![(0, 0), (1, 1)],
                value: -1.0,
            },
            NumericClass {
                pairs: vec![(0, 1)],
                value: 0.0,
            },
            NumericClass {
                pairs: vec![(1, 0)],
                value: 0.0,
            },
        ];
        match alternating_projections(2, &classes, 1e-10, 50_000) {
            SolveOutcome::Infeasible => {}
            SolveOutcome::Feasible(_) => panic!("infeasible problem"),
        }
    }
}
