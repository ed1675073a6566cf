//! Smoothing operators and their symmetrized variants.
//!
//! A smoother `M` drives the relaxation `u <- u + M^{-1}(f - A u)` and is
//! A-convergent iff `M + M^T - A` is SPD. Construction rejects anything else.
//! The two symmetrizations
//!
//! ```text
//! Mbar   = M (M + M^T - A)^{-1} M^T      I - Mbar^{-1} A   = (I - M^{-T} A)(I - M^{-1} A)
//! Mtilde = M^T (M + M^T - A)^{-1} M      I - Mtilde^{-1} A = (I - M^{-1} A)(I - M^{-T} A)
//! ```
//!
//! are cached on the [`Smoother`].

use crate::error::{Error, Result};
use crate::hierarchy::BlockPartition;
use crate::linalg::{check_square, general_inverse, identity, norm2, sym_eigvals, symmetrize, DenseMatrix, SpdMatrix};

/// How to build a smoother from a level matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmootherKind {
    /// `M = diag(A) / omega`.
    Jacobi { omega: f64 },
    /// Forward sweep: `M` is the lower triangle of `A` including the diagonal.
    GaussSeidel,
}

impl SmootherKind {
    pub fn build(&self, a: &SpdMatrix) -> Result<Smoother> {
        match *self {
            SmootherKind::Jacobi { omega } => Smoother::weighted_jacobi(a, omega),
            SmootherKind::GaussSeidel => Smoother::gauss_seidel(a),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Smoother {
    m: DenseMatrix,
    m_inv: DenseMatrix,
    a: SpdMatrix,
    mbar: SpdMatrix,
    mtilde: SpdMatrix,
}

impl Smoother {
    /// Wraps an explicit smoother matrix, rejecting it unless A-convergent.
    pub fn new(m: DenseMatrix, a: &SpdMatrix) -> Result<Self> {
        check_square(&m)?;
        if m.nrows() != a.order() {
            return Err(Error::BadDimension(format!(
                "smoother order {} does not match A of order {}",
                m.nrows(),
                a.order()
            )));
        }
        let m_inv = general_inverse(&m)?;
        let sym_part = symmetrize(&(&m + m.transpose() - a.matrix()));
        let d = match SpdMatrix::new(sym_part.clone()) {
            Ok(d) => d,
            Err(Error::NotSpd(_)) => {
                let lambda_min = sym_eigvals(&sym_part)?[0];
                return Err(Error::NotAConvergent { lambda_min });
            }
            Err(e) => return Err(e),
        };
        let mbar = SpdMatrix::from_symmetrized(&(&m * d.solve(&m.transpose())))?;
        let mtilde = SpdMatrix::from_symmetrized(&(m.transpose() * d.solve(&m)))?;
        Ok(Self {
            m,
            m_inv,
            a: a.clone(),
            mbar,
            mtilde,
        })
    }

    /// Damped Jacobi, `M = diag(A) / omega`.
    pub fn weighted_jacobi(a: &SpdMatrix, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::BadParameter(format!(
                "Jacobi weight must be positive, got {omega}"
            )));
        }
        let diag = a.matrix().diagonal();
        if diag.iter().any(|&d| d <= 0.0) {
            return Err(Error::NotSpd("A has a non-positive diagonal entry".into()));
        }
        Self::new(DenseMatrix::from_diagonal(&(diag / omega)), a)
    }

    /// Forward Gauss-Seidel. `M + M^T - A = diag(A)`, so this never fails for SPD `A`.
    pub fn gauss_seidel(a: &SpdMatrix) -> Result<Self> {
        Self::new(a.matrix().lower_triangle(), a)
    }

    /// Block Jacobi over a two-way partition: `M = blkdiag(A_ff, A_cc)`.
    pub fn block_diagonal(a: &SpdMatrix, part: &BlockPartition) -> Result<Self> {
        let n = a.order();
        if part.order() != n {
            return Err(Error::BadDimension(format!(
                "partition of order {} for matrix of order {n}",
                part.order()
            )));
        }
        let mut m = DenseMatrix::zeros(n, n);
        for block in [part.fine(), part.coarse()] {
            for &i in block {
                for &j in block {
                    m[(i, j)] = a.matrix()[(i, j)];
                }
            }
        }
        Self::new(m, a)
    }

    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn m_inv(&self) -> &DenseMatrix {
        &self.m_inv
    }

    pub fn a(&self) -> &SpdMatrix {
        &self.a
    }

    pub fn mbar(&self) -> &SpdMatrix {
        &self.mbar
    }

    pub fn mtilde(&self) -> &SpdMatrix {
        &self.mtilde
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    /// Presmoothing error propagator `I - M^{-1} A`.
    pub fn pre_error(&self) -> DenseMatrix {
        identity(self.order()) - &self.m_inv * self.a.matrix()
    }

    /// Postsmoothing error propagator `I - M^{-T} A`.
    pub fn post_error(&self) -> DenseMatrix {
        identity(self.order()) - self.m_inv.transpose() * self.a.matrix()
    }

    /// Spectral-norm residuals of the two product relations for `Mbar` and `Mtilde`.
    pub fn relations_residual(&self) -> (f64, f64) {
        let n = self.order();
        let a = self.a.matrix();
        let pre = self.pre_error();
        let post = self.post_error();
        let bar = identity(n) - self.mbar.solve(a);
        let tilde = identity(n) - self.mtilde.solve(a);
        (norm2(&(bar - &post * &pre)), norm2(&(tilde - &pre * &post)))
    }
}

/// Whether `M + M^T - A` is SPD.
pub fn check_a_convergent(m: &DenseMatrix, a: &SpdMatrix) -> Result<bool> {
    check_square(m)?;
    if m.nrows() != a.order() {
        return Err(Error::BadDimension("smoother and A differ in order".into()));
    }
    general_inverse(m)?;
    let sym_part = symmetrize(&(m + m.transpose() - a.matrix()));
    match SpdMatrix::new(sym_part) {
        Ok(_) => Ok(true),
        Err(Error::NotSpd(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{laplacian_1d, laplacian_2d};
    use crate::linalg::{is_spsd, max_abs, operator_energy_norm};

    #[test]
    fn jacobi_two_thirds_on_laplacian() {
        let a = laplacian_1d(3).unwrap();
        let s = Smoother::weighted_jacobi(&a, 2.0 / 3.0).unwrap();
        assert!(max_abs(&(s.m() - identity(3) * 3.0)) < 1e-15);
        // 6I - A has lambda_min = 6 - (2 + sqrt 2) > 0
        let lmin = sym_eigvals(&(identity(3) * 6.0 - a.matrix())).unwrap()[0];
        assert!((lmin - (4.0 - 2f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn jacobi_overrelaxed_rejected() {
        // (2/2.5) * 2I - A = 1.6 I - A has lambda_min = 1.6 - (2 + sqrt 2) < 0
        let a = laplacian_1d(3).unwrap();
        match Smoother::weighted_jacobi(&a, 2.5) {
            Err(Error::NotAConvergent { lambda_min }) => {
                assert!((lambda_min - (1.6 - 2.0 - 2f64.sqrt())).abs() < 1e-12)
            }
            other => panic!("expected NotAConvergent, got {other:?}"),
        }
        assert!(Smoother::weighted_jacobi(&a, 0.0).is_err());
    }

    #[test]
    fn identity_smoother() {
        let a = SpdMatrix::identity(4);
        let s = Smoother::weighted_jacobi(&a, 1.0).unwrap();
        assert!(max_abs(&(s.mbar().matrix() - identity(4))) < 1e-15);
        assert!(max_abs(&(s.mtilde().matrix() - identity(4))) < 1e-15);
    }

    #[test]
    fn jacobi_scaling_in_weight() {
        let a = laplacian_1d(5).unwrap();
        let s1 = Smoother::weighted_jacobi(&a, 0.6).unwrap();
        let s2 = Smoother::weighted_jacobi(&a, 0.3).unwrap();
        assert!(max_abs(&(s2.m() - s1.m() * 2.0)) < 1e-14);
    }

    #[test]
    fn gauss_seidel_small_cases() {
        let d = SpdMatrix::new(DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 2.0, 3.0,
        ])))
        .unwrap();
        let s = Smoother::gauss_seidel(&d).unwrap();
        assert!(max_abs(&(s.m() - d.matrix())) < 1e-15);
        assert!(max_abs(&(s.mtilde().matrix() - d.matrix())) < 1e-14);

        let a = laplacian_1d(2).unwrap();
        let s = Smoother::gauss_seidel(&a).unwrap();
        assert_eq!(s.m(), &DenseMatrix::from_row_slice(2, 2, &[2.0, 0.0, -1.0, 2.0]));
        let sym = s.m() + s.m().transpose() - a.matrix();
        assert_eq!(sym, identity(2) * 2.0);

        let a = laplacian_1d(4).unwrap();
        let s = Smoother::gauss_seidel(&a).unwrap();
        let (_, r_tilde) = s.relations_residual();
        assert!(r_tilde <= 1e-12, "{r_tilde}");
    }

    #[test]
    fn a_convergence_check() {
        let a = laplacian_1d(3).unwrap();
        assert!(check_a_convergent(a.matrix(), &a).unwrap());
        // 2 diag(A) - A = 4I - A is SPD for the 1D Laplacian (lambda_max(A) < 4)
        let d = DenseMatrix::from_diagonal(&a.matrix().diagonal());
        assert!(check_a_convergent(&d, &a).unwrap());
        // 0.4 diag(A): 0.8*2 I - A = 1.6 I - A is indefinite
        assert!(!check_a_convergent(&(d * 0.4), &a).unwrap());
        assert!(matches!(
            check_a_convergent(&DenseMatrix::zeros(3, 3), &a),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn relations_hold_on_2d_gauss_seidel() {
        let a = laplacian_2d(4, 4).unwrap();
        let s = Smoother::gauss_seidel(&a).unwrap();
        let (rb, rt) = s.relations_residual();
        assert!(rb <= 1e-11 && rt <= 1e-11, "{rb} {rt}");
        assert!(is_spsd(&(s.mtilde().matrix() - a.matrix())).unwrap());
        assert!(is_spsd(&(s.mbar().matrix() - a.matrix())).unwrap());
        // ||I - Mbar^{-1}A||_A = ||I - M^{-1}A||_A^2 < 1
        let e_bar = identity(16) - s.mbar().solve(a.matrix());
        let nb = operator_energy_norm(&e_bar, &a).unwrap();
        assert!(nb < 1.0);
    }

    #[test]
    fn symmetric_smoother_has_equal_symmetrizations() {
        let a = laplacian_1d(6).unwrap();
        let s = Smoother::weighted_jacobi(&a, 0.8).unwrap();
        assert!(max_abs(&(s.mbar().matrix() - s.mtilde().matrix())) < 1e-13);
        let (rb, rt) = s.relations_residual();
        assert!((rb - rt).abs() < 1e-13);
        assert!(rb <= 1e-12);
    }
}
