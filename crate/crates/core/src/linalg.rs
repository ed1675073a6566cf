//! Dense symmetric linear algebra kernels.
//!
//! Everything downstream works with explicit dense operators of desk-scale
//! order (a few hundred at most), so the kernels favour robustness over speed:
//! eigenvalues come from cyclic Jacobi rotations, generalized problems are
//! reduced through a Cholesky factor of the positive definite side, and every
//! symmetric-by-construction result is explicitly symmetrized.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Relative (max-norm) symmetry tolerance.
pub const SYM_TOL: f64 = 1e-10;
/// Cholesky pivots must exceed this multiple of the largest diagonal entry.
pub const SPD_TOL: f64 = 1e-12;
/// Semidefiniteness slack, relative to the spectral norm.
pub const SPSD_TOL: f64 = 1e-10;
/// Eigen-reconstruction tolerance, relative to the spectral norm.
pub const EIG_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-14;

pub fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest entry of `|M - M^T|`.
pub fn asymmetry(m: &DenseMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn check_finite(m: &DenseMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::BadDimension("matrix has an empty dimension".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadParameter("matrix has non-finite entries".into()));
    }
    Ok(())
}

pub fn check_square(m: &DenseMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::BadDimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn check_symmetric(m: &DenseMatrix) -> Result<()> {
    check_square(m)?;
    let scale = max_abs(m);
    let asym = asymmetry(m);
    if asym > SYM_TOL * scale {
        return Err(Error::NonSymmetric {
            asymmetry: if scale > 0.0 { asym / scale } else { asym },
            tol: SYM_TOL,
        });
    }
    Ok(())
}

/// `(M + M^T) / 2`.
pub fn symmetrize(m: &DenseMatrix) -> DenseMatrix {
    (m + m.transpose()) * 0.5
}

/// Spectral norm (largest singular value).
pub fn norm2(m: &DenseMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Ascending eigenvalues with optional orthonormal eigenvectors (as columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<DenseMatrix>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `V diag(f(lambda)) V^T`; requires eigenvectors.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let v = self
            .vectors
            .as_ref()
            .expect("spectrum was computed without eigenvectors");
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).scale_mut(fj);
        }
        symmetrize(&(scaled * v.transpose()))
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eig(s: &DenseMatrix) -> Result<Spectrum> {
    check_symmetric(s)?;
    let (values, vectors) = jacobi(s, true)?;
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only.
pub fn sym_eigvals(s: &DenseMatrix) -> Result<Vec<f64>> {
    check_symmetric(s)?;
    Ok(jacobi(s, false)?.0)
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for j in 0..n {
        for i in (j + 1)..n {
            sum += a[(i, j)] * a[(i, j)];
        }
    }
    (2.0 * sum).sqrt()
}

fn jacobi(s: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    let n = s.nrows();
    let mut a = symmetrize(s);
    let mut v = want_vectors.then(|| DenseMatrix::identity(n, n));
    let target = JACOBI_OFF_TOL * a.norm();

    let mut converged = false;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Negligible against both diagonal entries: drop it.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - sn * vkq;
                        v[(k, q)] = sn * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = v.map(|v| DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok((values, vectors))
}

/// Lower Cholesky factor `L` with `S = L L^T`.
///
/// Every pivot must exceed `SPD_TOL` times the largest diagonal entry.
pub fn cholesky_lower(s: &DenseMatrix) -> Result<DenseMatrix> {
    check_square(s)?;
    let n = s.nrows();
    let max_diag = (0..n).fold(0.0_f64, |acc, i| acc.max(s[(i, i)]));
    if max_diag <= 0.0 {
        return Err(Error::NotSpd("no positive diagonal entry".into()));
    }
    let floor = SPD_TOL * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) {
            return Err(Error::NotSpd(format!(
                "Cholesky pivot {j} is {d:.3e} (threshold {floor:.3e})"
            )));
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut x = s[(i, j)];
            for k in 0..j {
                x -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = x / djj;
        }
    }
    Ok(l)
}

/// A symmetric positive definite matrix with its Cholesky factor.
///
/// The stored matrix is exactly symmetric. Eigen-data (and the square root
/// built from it) is computed lazily and cached.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    m: DenseMatrix,
    chol: DenseMatrix,
    spectrum: OnceLock<Spectrum>,
    roots: OnceLock<(DenseMatrix, DenseMatrix)>,
}

impl SpdMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        check_finite(&m)?;
        check_symmetric(&m)?;
        let m = symmetrize(&m);
        let chol = cholesky_lower(&m)?;
        Ok(Self {
            m,
            chol,
            spectrum: OnceLock::new(),
            roots: OnceLock::new(),
        })
    }

    /// Symmetrizes first, for operators symmetric only up to roundoff.
    pub fn from_symmetrized(m: &DenseMatrix) -> Result<Self> {
        Self::new(symmetrize(m))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DenseMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.m
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn cholesky_factor(&self) -> &DenseMatrix {
        &self.chol
    }

    /// `S^{-1} B`.
    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let y = self
            .chol
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a positive diagonal");
        self.chol
            .tr_solve_lower_triangular(&y)
            .expect("Cholesky factor has a positive diagonal")
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        let y = self
            .chol
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a positive diagonal");
        self.chol
            .tr_solve_lower_triangular(&y)
            .expect("Cholesky factor has a positive diagonal")
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.order();
        symmetrize(&self.solve(&DenseMatrix::identity(n, n)))
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = sym_eig(&self.m)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    fn roots(&self) -> Result<&(DenseMatrix, DenseMatrix)> {
        if let Some(r) = self.roots.get() {
            return Ok(r);
        }
        let spec = self.spectrum()?;
        let sqrt = spec.apply_fn(|x| x.max(0.0).sqrt());
        let inv_sqrt = spec.apply_fn(|x| 1.0 / x.max(f64::MIN_POSITIVE).sqrt());
        Ok(self.roots.get_or_init(|| (sqrt, inv_sqrt)))
    }

    /// `S^{1/2}` as a plain matrix.
    pub fn sqrt_matrix(&self) -> Result<&DenseMatrix> {
        Ok(&self.roots()?.0)
    }

    /// `S^{-1/2}`.
    pub fn inv_sqrt_matrix(&self) -> Result<&DenseMatrix> {
        Ok(&self.roots()?.1)
    }
}

/// Square root of an SPD matrix: the SPD `R` with `R R = S`.
pub fn spd_sqrt(s: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(s.sqrt_matrix()?.clone())
}

/// Square root of a symmetric positive semidefinite matrix; eigenvalues
/// within roundoff below zero are clamped.
pub fn spsd_sqrt(s: &DenseMatrix) -> Result<DenseMatrix> {
    let spec = sym_eig(s)?;
    let scale = spec.spectral_radius();
    if spec.min() < -SPSD_TOL * scale {
        return Err(Error::NotSpd(format!(
            "matrix is indefinite (lambda_min = {:.3e})",
            spec.min()
        )));
    }
    Ok(spec.apply_fn(|x| x.max(0.0).sqrt()))
}

pub fn is_spsd(s: &DenseMatrix) -> Result<bool> {
    let vals = sym_eigvals(s)?;
    let scale = vals[0].abs().max(vals[vals.len() - 1].abs());
    Ok(vals[0] >= -SPSD_TOL * scale)
}

/// Semidefiniteness of a difference `S = X - Y` judged on the scale of its
/// operands: `lambda_min(S) >= -spsd_tol * scale`.
pub fn is_spsd_against(s: &DenseMatrix, scale: f64) -> Result<bool> {
    let vals = sym_eigvals(s)?;
    let own = vals[0].abs().max(vals[vals.len() - 1].abs());
    Ok(vals[0] >= -SPSD_TOL * own.max(scale))
}

/// Eigenvalues of the pencil `A v = lambda B v` with `B` SPD and `A` symmetric.
pub fn gen_eigvals(a: &DenseMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    if a.nrows() != b.order() {
        return Err(Error::BadDimension(format!(
            "pencil orders differ: {} vs {}",
            a.nrows(),
            b.order()
        )));
    }
    let l = b.cholesky_factor();
    let x = l
        .solve_lower_triangular(a)
        .expect("Cholesky factor has a positive diagonal");
    let c = l
        .solve_lower_triangular(&x.transpose())
        .expect("Cholesky factor has a positive diagonal");
    sym_eigvals(&symmetrize(&c))
}

/// `(lambda_min, lambda_max)` of `B^{-1} A`.
pub fn gen_eig_extremes(a: &DenseMatrix, b: &SpdMatrix) -> Result<(f64, f64)> {
    let vals = gen_eigvals(a, b)?;
    Ok((vals[0], vals[vals.len() - 1]))
}

/// Eigenvalues of `A^{1/2} E A^{-1/2}`, which must be symmetric.
///
/// The symmetry tolerance is scaled by `max(|T|_max, 1)`: iteration matrices
/// are perturbations of the identity, so near-zero operators are judged on
/// the identity's scale.
pub fn energy_spectrum(e: &DenseMatrix, a: &SpdMatrix) -> Result<Vec<f64>> {
    check_square(e)?;
    if e.nrows() != a.order() {
        return Err(Error::BadDimension(format!(
            "operator order {} does not match A of order {}",
            e.nrows(),
            a.order()
        )));
    }
    let t = a.sqrt_matrix()? * e * a.inv_sqrt_matrix()?;
    let scale = max_abs(&t).max(1.0);
    let asym = asymmetry(&t);
    if asym > SYM_TOL * scale {
        return Err(Error::SimilarityNotSymmetric {
            asymmetry: asym / scale,
        });
    }
    sym_eigvals(&symmetrize(&t))
}

/// `||E||_A`, the spectral radius of `A^{1/2} E A^{-1/2}`.
pub fn operator_energy_norm(e: &DenseMatrix, a: &SpdMatrix) -> Result<f64> {
    let vals = energy_spectrum(e, a)?;
    Ok(vals[0].abs().max(vals[vals.len() - 1].abs()))
}

/// Inverse of a general square matrix by LU with partial pivoting.
pub fn general_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    check_square(m)?;
    let lu = m.clone().lu();
    let u = lu.u();
    let diag = u.diagonal();
    let big = diag.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let small = diag.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    if !(small > 1e-14 * big) {
        return Err(Error::Singular(format!(
            "LU pivot ratio {:.3e}",
            if big > 0.0 { small / big } else { 0.0 }
        )));
    }
    lu.try_inverse()
        .ok_or_else(|| Error::Singular("LU inverse failed".into()))
}

/// Orthogonal `Q` (n x n) from a Householder QR of `P` (n x m, m <= n).
///
/// For full-rank `P` the first `m` columns span `range(P)` and the rest span
/// its orthogonal complement.
pub fn householder_q(p: &DenseMatrix) -> DenseMatrix {
    let n = p.nrows();
    let m = p.ncols().min(n);
    let mut r = p.clone();
    let mut q = DenseMatrix::identity(n, n);
    for j in 0..m {
        let x = r.view((j, j), (n - j, 1)).clone_owned();
        let alpha = x.norm();
        if alpha == 0.0 {
            continue;
        }
        let mut v = x;
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            continue;
        }
        v /= vnorm;
        let block = r.view((j, 0), (n - j, r.ncols())).clone_owned();
        let update = &v * (v.transpose() * &block) * 2.0;
        let mut rv = r.view_mut((j, 0), (n - j, r.ncols()));
        rv -= update;
        let qblock = q.view((0, j), (n, n - j)).clone_owned();
        let qupdate = (&qblock * &v) * v.transpose() * 2.0;
        let mut qv = q.view_mut((0, j), (n, n - j));
        qv -= qupdate;
    }
    q
}

pub fn identity(n: usize) -> DenseMatrix {
    DenseMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lap1d(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        let s = sym_eig(&identity(3)).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0, 1.0]);
        let d = DenseMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        assert_eq!(sym_eigvals(&d).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn laplacian_spectrum_matches_closed_form_and_char_poly() {
        let a = lap1d(4);
        let s = sym_eig(&a).unwrap();
        for (k, lam) in s.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 5.0).cos();
            assert!((lam - exact).abs() < 1e-13, "{lam} vs {exact}");
            // characteristic polynomial vanishes at each eigenvalue
            let det = (&a - identity(4) * *lam).determinant();
            assert!(det.abs() < 1e-12, "det = {det}");
        }
        let v = s.vectors.as_ref().unwrap();
        let recon = v * DenseMatrix::from_diagonal(&DVector::from_vec(s.values.clone())) * v.transpose();
        assert!(norm2(&(recon - &a)) <= EIG_TOL * norm2(&a));
    }

    #[test]
    fn jacobi_agrees_with_independent_solver() {
        let n = 12;
        let g = DenseMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.5);
        let s = symmetrize(&g);
        let ours = sym_eigvals(&s).unwrap();
        let mut theirs: Vec<f64> = s.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonsymmetric() {
        let m = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&m), Err(Error::NonSymmetric { .. })));
        assert!(matches!(is_spsd(&m), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn pencil_extremes() {
        let b = SpdMatrix::new(lap1d(3)).unwrap();
        let (lo, hi) = gen_eig_extremes(b.matrix(), &b).unwrap();
        assert!((lo - 1.0).abs() < 1e-13 && (hi - 1.0).abs() < 1e-13);
        let (lo, hi) = gen_eig_extremes(&(b.matrix() * 2.0), &b).unwrap();
        assert!((lo - 2.0).abs() < 1e-13 && (hi - 2.0).abs() < 1e-13);
        let a = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let b = SpdMatrix::new(DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0])).unwrap();
        let (lo, hi) = gen_eig_extremes(&a, &b).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pencil_cross_oracle() {
        let b = SpdMatrix::new(lap1d(6) + identity(6)).unwrap();
        let a = DenseMatrix::from_fn(6, 6, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let ours = gen_eigvals(&a, &b).unwrap();
        let bi = b.inv_sqrt_matrix().unwrap();
        let oracle = sym_eigvals(&symmetrize(&(bi * &a * bi))).unwrap();
        for (x, y) in ours.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn not_spd_detected() {
        let m = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(SpdMatrix::new(m.clone()), Err(Error::NotSpd(_))));
        let b = SpdMatrix::identity(2);
        assert!(gen_eig_extremes(&m, &b).is_ok());
    }

    #[test]
    fn spsd_checks() {
        assert!(is_spsd(&DenseMatrix::zeros(3, 3)).unwrap());
        let d = |a: f64, b: f64| DenseMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b]);
        assert!(is_spsd(&d(1.0, 0.0)).unwrap());
        assert!(!is_spsd(&d(1.0, -1.0)).unwrap());
    }

    #[test]
    fn square_roots() {
        let id = SpdMatrix::identity(3);
        assert!(max_abs(&(spd_sqrt(&id).unwrap().into_matrix() - identity(3))) < 1e-15);
        let d = SpdMatrix::new(DenseMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0])).unwrap();
        let r = spd_sqrt(&d).unwrap();
        assert!((r.matrix()[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((r.matrix()[(1, 1)] - 3.0).abs() < 1e-14);
        let w = SpdMatrix::new(lap1d(8)).unwrap();
        let r = spd_sqrt(&w).unwrap();
        assert!(norm2(&(r.matrix() * r.matrix() - w.matrix())) < 1e-10);
    }

    #[test]
    fn energy_norm_basics() {
        let a = SpdMatrix::new(lap1d(5)).unwrap();
        assert_eq!(operator_energy_norm(&DenseMatrix::zeros(5, 5), &a).unwrap(), 0.0);
        // E = I - D^{-1} A / 2 (damped Jacobi) is A-self-adjoint
        let e = identity(5) - a.matrix() * 0.25;
        let nrm = operator_energy_norm(&e, &a).unwrap();
        let expected = (1.0 - 0.25 * (2.0 - 2.0 * (PI / 6.0).cos()))
            .abs()
            .max((1.0 - 0.25 * (2.0 + 2.0 * (PI / 6.0).cos())).abs());
        assert!((nrm - expected).abs() < 1e-13);
    }

    #[test]
    fn energy_norm_rejects_non_self_adjoint() {
        let a = SpdMatrix::new(lap1d(3)).unwrap();
        let e = DenseMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            operator_energy_norm(&e, &a),
            Err(Error::SimilarityNotSymmetric { .. })
        ));
    }

    #[test]
    fn householder_complement() {
        let p = DenseMatrix::from_fn(6, 2, |i, j| (i + 2 * j) as f64 + 0.5 * (i * j) as f64);
        let q = householder_q(&p);
        assert!(max_abs(&(q.transpose() * &q - identity(6))) < 1e-14);
        let s = q.columns(2, 4).clone_owned();
        assert!(max_abs(&(p.transpose() * s)) < 1e-12);
    }

    #[test]
    fn singular_general_inverse() {
        let m = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(general_inverse(&m), Err(Error::Singular(_))));
        let m = DenseMatrix::from_row_slice(2, 2, &[2.0, 0.0, -1.0, 2.0]);
        let inv = general_inverse(&m).unwrap();
        assert!(max_abs(&(inv * m - identity(2))) < 1e-15);
    }
}
