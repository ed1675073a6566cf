//! Exact and inexact two-grid operators, their spectral quantities, and the
//! two-sided convergence bounds measured against the restricted smoother.
//!
//! Every spectral quantity is taken from a symmetric form (a generalized
//! pencil reduced through Cholesky, or a congruence with an SPSD square root)
//! so eigenvalues are real by construction. Operators that can be formed two
//! ways are formed both ways and compared before anything is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{galerkin, Prolongation};
use crate::linalg::{
    energy_spectrum, gen_eig_extremes, gen_eigvals, identity, is_spsd_against, max_abs, norm2, spsd_sqrt, sym_eigvals,
    symmetrize, DenseMatrix, SpdMatrix,
};
use crate::smoother::Smoother;

/// Absolute tolerance for case selection on `d1`, `d2`.
pub const CASE_TOL: f64 = 1e-12;
/// Slack allowed when judging `lower <= actual <= upper`.
pub const SANDWICH_TOL: f64 = 1e-9;

const K_TG_REL_TOL: f64 = 1e-8;
const ERROR_FORM_TOL: f64 = 1e-11;
const PRECONDITIONER_TOL: f64 = 1e-10;
const UNIT_EIG_TOL: f64 = 1e-10;
const ENERGY_NORM_TOL: f64 = 1e-9;

/// One two-grid configuration: fine matrix and smoother, prolongation, coarse solver.
#[derive(Debug, Clone)]
pub struct TwoGridSetup {
    smoother: Smoother,
    p: Prolongation,
    a_c: SpdMatrix,
    bc: SpdMatrix,
}

impl TwoGridSetup {
    pub fn new(smoother: Smoother, p: Prolongation, bc: SpdMatrix) -> Result<Self> {
        let a_c = galerkin(smoother.a(), &p)?;
        if bc.order() != a_c.order() {
            return Err(Error::BadDimension(format!(
                "B_c has order {}, coarse space has dimension {}",
                bc.order(),
                a_c.order()
            )));
        }
        Ok(Self { smoother, p, a_c, bc })
    }

    /// `B_c = A_c`.
    pub fn exact(smoother: Smoother, p: Prolongation) -> Result<Self> {
        let a_c = galerkin(smoother.a(), &p)?;
        Ok(Self {
            smoother,
            p,
            bc: a_c.clone(),
            a_c,
        })
    }

    /// Same smoother and prolongation, another coarse solver.
    pub fn with_bc(&self, bc: SpdMatrix) -> Result<Self> {
        Self::new(self.smoother.clone(), self.p.clone(), bc)
    }

    pub fn a(&self) -> &SpdMatrix {
        self.smoother.a()
    }

    pub fn smoother(&self) -> &Smoother {
        &self.smoother
    }

    pub fn p(&self) -> &Prolongation {
        &self.p
    }

    pub fn a_c(&self) -> &SpdMatrix {
        &self.a_c
    }

    pub fn bc(&self) -> &SpdMatrix {
        &self.bc
    }

    pub fn order(&self) -> usize {
        self.a().order()
    }

    pub fn coarse_order(&self) -> usize {
        self.a_c.order()
    }

    /// `P^T Mtilde P`.
    pub fn restricted_smoother(&self) -> Result<SpdMatrix> {
        restricted(self.smoother.mtilde(), &self.p)
    }
}

fn restricted(w: &SpdMatrix, p: &Prolongation) -> Result<SpdMatrix> {
    SpdMatrix::from_symmetrized(&p.restrict(w.matrix()))
}

fn check_conforming(a: &SpdMatrix, p: &Prolongation) -> Result<()> {
    if p.fine_order() != a.order() {
        return Err(Error::BadDimension(format!(
            "prolongation has {} rows, matrix has order {}",
            p.fine_order(),
            a.order()
        )));
    }
    Ok(())
}

/// `Pi_A = P A_c^{-1} P^T A`.
pub fn correction_projection(a: &SpdMatrix, p: &Prolongation) -> Result<DenseMatrix> {
    let a_c = galerkin(a, p)?;
    let pm = p.matrix();
    Ok(pm * a_c.solve(&(pm.transpose() * a.matrix())))
}

/// `Pi_Mtilde = P (P^T Mtilde P)^{-1} P^T Mtilde`.
pub fn mtilde_projection(mt: &SpdMatrix, p: &Prolongation) -> Result<DenseMatrix> {
    check_conforming(mt, p)?;
    let w = restricted(mt, p)?;
    let pm = p.matrix();
    Ok(pm * w.solve(&(pm.transpose() * mt.matrix())))
}

/// `Mtilde Pi_Mtilde = Mtilde P (P^T Mtilde P)^{-1} P^T Mtilde`, symmetric.
fn mtilde_times_projection(mt: &SpdMatrix, p: &Prolongation) -> Result<DenseMatrix> {
    let w = restricted(mt, p)?;
    let mp = mt.matrix() * p.matrix();
    Ok(symmetrize(&(&mp * w.solve(&mp.transpose()))))
}

/// `R = (A^{-1} - Mtilde^{-1})^{1/2}`, the SPSD root used by the congruence forms.
fn deviation_root(a: &SpdMatrix, mt: &SpdMatrix) -> Result<DenseMatrix> {
    spsd_sqrt(&symmetrize(&(a.inverse() - mt.inverse())))
}

/// Explicit operators of one two-grid method.
#[derive(Debug, Clone)]
pub struct TwoGridOperators {
    /// Iteration matrix `E`.
    pub e: DenseMatrix,
    /// Preconditioner `B`.
    pub b: DenseMatrix,
    /// `B^{-1}` formed independently of `B`.
    pub b_inv: DenseMatrix,
}

fn cross_check(check: &'static str, residual: f64, tol: f64) -> Result<()> {
    if residual <= tol {
        Ok(())
    } else {
        Err(Error::CrossCheckFailed { check, residual, tol })
    }
}

/// `(I - M^{-T}A)(I - P B_c^{-1} P^T A)(I - M^{-1}A)`.
fn iteration_matrix(setup: &TwoGridSetup) -> DenseMatrix {
    let s = setup.smoother();
    let a = setup.a().matrix();
    let pm = setup.p().matrix();
    let cgc = identity(setup.order()) - pm * setup.bc().solve(&(pm.transpose() * a));
    s.post_error() * cgc * s.pre_error()
}

/// `Mbar^{-1} + (I - M^{-T}A) P B_c^{-1} P^T (I - A M^{-1})`.
fn preconditioner_inverse(setup: &TwoGridSetup) -> DenseMatrix {
    let s = setup.smoother();
    let post = s.post_error();
    let pm = setup.p().matrix();
    let coarse = pm * setup.bc().solve(&pm.transpose());
    symmetrize(&(s.mbar().inverse() + &post * coarse * post.transpose()))
}

/// `A + (I - A M^{-T}) Mtilde (I - P G^{-1} P^T Mtilde)(I - M^{-1}A)` with
/// `G = P^T Mtilde P + B_c - A_c`.
fn preconditioner(setup: &TwoGridSetup) -> Result<DenseMatrix> {
    let s = setup.smoother();
    let pre = s.pre_error();
    let mt = s.mtilde().matrix();
    let pm = setup.p().matrix();
    let g = SpdMatrix::from_symmetrized(&(pm.transpose() * mt * pm + setup.bc().matrix() - setup.a_c().matrix()))?;
    let mp = mt * pm;
    let middle = mt - &mp * g.solve(&mp.transpose());
    Ok(symmetrize(&(setup.a().matrix() + pre.transpose() * middle * &pre)))
}

fn check_error_form(e: &DenseMatrix, b_inv: &DenseMatrix, a: &SpdMatrix) -> Result<()> {
    let residual = norm2(&(e - (identity(a.order()) - b_inv * a.matrix())));
    cross_check("E = I - B^{-1}A", residual, ERROR_FORM_TOL)
}

/// Inexact two-grid operators. `B` comes from the restricted-smoother form and
/// `B^{-1}` from the smoother-plus-coarse form; their product must be `I`.
pub fn build_inexact_twogrid(setup: &TwoGridSetup) -> Result<TwoGridOperators> {
    let e = iteration_matrix(setup);
    let b_inv = preconditioner_inverse(setup);
    let b = preconditioner(setup)?;
    check_error_form(&e, &b_inv, setup.a())?;
    let residual = norm2(&(&b * &b_inv - identity(setup.order())));
    cross_check("B * B^{-1} = I", residual, PRECONDITIONER_TOL)?;
    Ok(TwoGridOperators { e, b, b_inv })
}

/// `B_TG = A + (I - A M^{-T}) Mtilde (I - Pi_Mtilde)(I - M^{-1}A)`.
fn exact_preconditioner(smoother: &Smoother, p: &Prolongation) -> Result<DenseMatrix> {
    let pre = smoother.pre_error();
    let mt = smoother.mtilde();
    let middle = mt.matrix() - mtilde_times_projection(mt, p)?;
    Ok(symmetrize(&(smoother.a().matrix() + pre.transpose() * middle * &pre)))
}

/// Exact two-grid operators (`B_c = A_c`), with the unit upper eigenvalue of
/// `B_TG^{-1} A` and the semidefiniteness of `B_TG - A` checked.
pub fn build_exact_twogrid(smoother: &Smoother, p: &Prolongation) -> Result<TwoGridOperators> {
    let setup = TwoGridSetup::exact(smoother.clone(), p.clone())?;
    let a = setup.a();
    let e = smoother.post_error() * (identity(a.order()) - correction_projection(a, p)?) * smoother.pre_error();
    let b_inv = preconditioner_inverse(&setup);
    let b = exact_preconditioner(smoother, p)?;
    check_error_form(&e, &b_inv, a)?;
    let residual = norm2(&(&b * &b_inv - identity(a.order())));
    cross_check("B_TG * B_TG^{-1} = I", residual, PRECONDITIONER_TOL)?;

    let (_, lmax) = gen_eig_extremes(a.matrix(), &SpdMatrix::new(b.clone())?)?;
    cross_check("lambda_max(B_TG^{-1} A) = 1", (lmax - 1.0).abs(), UNIT_EIG_TOL)?;
    if !is_spsd_against(&(&b - a.matrix()), norm2(a.matrix()))? {
        return Err(Error::CrossCheckFailed {
            check: "B_TG - A is SPSD",
            residual: sym_eigvals(&symmetrize(&(&b - a.matrix())))?[0],
            tol: 0.0,
        });
    }
    Ok(TwoGridOperators { e, b, b_inv })
}

/// `K_TG`, computed as `lambda_max(A^{-1} B_TG)` and as
/// `1 + lambda_max(R Mtilde (I - Pi) R)` with `R = (A^{-1} - Mtilde^{-1})^{1/2}`;
/// the two must agree to `1e-8` relative.
pub fn k_tg(smoother: &Smoother, p: &Prolongation) -> Result<f64> {
    let a = smoother.a();
    check_conforming(a, p)?;
    let b_tg = exact_preconditioner(smoother, p)?;
    let (_, via_preconditioner) = gen_eig_extremes(&b_tg, a)?;
    let via_congruence = 1.0 + lemma32_second(a, smoother.mtilde(), p)?;
    let residual = (via_preconditioner - via_congruence).abs() / via_preconditioner.abs().max(1.0);
    cross_check("K_TG two ways", residual, K_TG_REL_TOL)?;
    Ok(via_preconditioner)
}

fn congruence_extremes(r: &DenseMatrix, s: &DenseMatrix) -> Result<(f64, f64)> {
    let vals = sym_eigvals(&symmetrize(&(r * s * r)))?;
    Ok((vals[0], vals[vals.len() - 1]))
}

fn lemma32_second(a: &SpdMatrix, mt: &SpdMatrix, p: &Prolongation) -> Result<f64> {
    let r = deviation_root(a, mt)?;
    let complement = symmetrize(&(mt.matrix() - mtilde_times_projection(mt, p)?));
    Ok(congruence_extremes(&r, &complement)?.1)
}

/// Extreme eigenvalues of `(A^{-1}Mtilde - I)(I - Pi)` and `(A^{-1}Mtilde - I) Pi`,
/// in the order `(min, max, min, max)`.
///
/// `A^{-1}Mtilde - I = (A^{-1} - Mtilde^{-1}) Mtilde`, and both `Mtilde (I - Pi)` and
/// `Mtilde Pi` are symmetric, so each product shares its spectrum with `R X R`.
pub fn lemma32_identities(a: &SpdMatrix, mt: &SpdMatrix, p: &Prolongation) -> Result<[f64; 4]> {
    check_conforming(a, p)?;
    let r = deviation_root(a, mt)?;
    let mt_pi = mtilde_times_projection(mt, p)?;
    let complement = symmetrize(&(mt.matrix() - &mt_pi));
    let (c_min, c_max) = congruence_extremes(&r, &complement)?;
    let (p_min, p_max) = congruence_extremes(&r, &mt_pi)?;
    Ok([c_min, c_max, p_min, p_max])
}

/// `(d1, d2)` from the extremes of `(P^T Mtilde P)^{-1}(B_c - A_c)`.
pub fn deviation_extremes(a: &SpdMatrix, mt: &SpdMatrix, p: &Prolongation, bc: &SpdMatrix) -> Result<(f64, f64)> {
    check_conforming(a, p)?;
    let a_c = galerkin(a, p)?;
    let w = restricted(mt, p)?;
    let (lmin, lmax) = gen_eig_extremes(&symmetrize(&(bc.matrix() - a_c.matrix())), &w)?;
    for denominator in [1.0 + lmax, 1.0 + lmin] {
        if !(denominator > 0.0) {
            return Err(Error::DegeneratePencil { denominator });
        }
    }
    Ok((1.0 / (1.0 + lmax), 1.0 / (1.0 + lmin)))
}

/// Scalars entering the two-sided bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralQuantities {
    #[serde(rename = "K_TG")]
    pub k_tg: f64,
    /// `lambda_max(A^{-1} Mtilde)`.
    #[serde(rename = "lam_max_AinvMt")]
    pub lam_max_ainv_mt: f64,
    /// `lambda_min(A^{-1} Mtilde)`.
    #[serde(rename = "lam_min_AinvMt")]
    pub lam_min_ainv_mt: f64,
    /// `lambda_max(A^{-1} Mtilde Pi_Mtilde)`.
    #[serde(rename = "lam_max_AinvMtPi")]
    pub lam_max_ainv_mt_pi: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn spectral_quantities(setup: &TwoGridSetup) -> Result<SpectralQuantities> {
    let a = setup.a();
    let mt = setup.smoother().mtilde();
    let k_tg = k_tg(setup.smoother(), setup.p())?;
    let (lam_min_ainv_mt, lam_max_ainv_mt) = gen_eig_extremes(mt.matrix(), a)?;
    let (_, lam_max_ainv_mt_pi) = gen_eig_extremes(&mtilde_times_projection(mt, setup.p())?, a)?;
    let (d1, d2) = deviation_extremes(a, mt, setup.p(), setup.bc())?;
    Ok(SpectralQuantities {
        k_tg,
        lam_max_ainv_mt,
        lam_min_ainv_mt,
        lam_max_ainv_mt_pi,
        d1,
        d2,
    })
}

/// `max{1 - min{1, lambda_min(B_c^{-1}A_c)}/K_TG, max{1, lambda_max(B_c^{-1}A_c)} - 1}`.
pub fn notay_bound(setup: &TwoGridSetup) -> Result<f64> {
    let k = k_tg(setup.smoother(), setup.p())?;
    notay_from(setup, k)
}

fn notay_from(setup: &TwoGridSetup, k_tg: f64) -> Result<f64> {
    let (lmin, lmax) = gen_eig_extremes(setup.a_c().matrix(), setup.bc())?;
    Ok((1.0 - lmin.min(1.0) / k_tg).max(lmax.max(1.0) - 1.0))
}

/// Which pair of bounds applies, by position of `d1 <= d2` relative to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundsCase {
    /// `d2 <= 1`.
    #[serde(rename = "i")]
    I,
    /// `d1 <= 1 < d2`.
    #[serde(rename = "ii")]
    II,
    /// `1 < d1`.
    #[serde(rename = "iii")]
    III,
}

impl BoundsCase {
    pub fn select(d1: f64, d2: f64) -> Self {
        if d2 <= 1.0 + CASE_TOL {
            BoundsCase::I
        } else if d1 <= 1.0 + CASE_TOL {
            BoundsCase::II
        } else {
            BoundsCase::III
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundsCase::I => "i",
            BoundsCase::II => "ii",
            BoundsCase::III => "iii",
        }
    }
}

/// Lower and upper bounds on `||E_ITG||_A` from the spectral quantities alone.
pub fn bounds_from_quantities(q: &SpectralQuantities) -> Result<(BoundsCase, f64, f64)> {
    let SpectralQuantities {
        k_tg: k,
        lam_max_ainv_mt: lmax,
        lam_min_ainv_mt: lmin,
        lam_max_ainv_mt_pi: lmp,
        d1,
        d2,
    } = *q;
    let case = BoundsCase::select(d1, d2);
    if case != BoundsCase::I && lmp > 1.0 {
        let limit = lmp / (lmp - 1.0);
        if !(d2 < limit) {
            return Err(Error::OutOfTheoryRange(format!(
                "d2 = {d2:.6e} must stay below lambda/(lambda - 1) = {limit:.6e}"
            )));
        }
    }

    let l1 = 1.0 - 1.0 / k.max(lmax - d2 * lmp + d2);
    let u1 = 1.0 - 1.0 / (d1 * k + (1.0 - d1) * lmax);
    let l2 = 1.0 - 1.0 / lmin.max(d2 * k + (1.0 - d2) * lmax);
    let u2 = 1.0 / ((1.0 - d2) * lmp + d2) - 1.0;
    let l3 = 1.0 / ((lmax - d1 * lmp).min((1.0 - d1) * lmin) + d1) - 1.0;
    let u3 = (1.0 - 1.0 / k).max(u2);

    Ok(match case {
        BoundsCase::I => (case, l1, u1),
        BoundsCase::II => (case, l2, u1.max(u2)),
        BoundsCase::III => (case, l2.max(l3), u3),
    })
}

/// Everything the two-sided analysis says about one setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub n_c: usize,
    pub case_id: BoundsCase,
    #[serde(flatten)]
    pub quantities: SpectralQuantities,
    pub lower: f64,
    pub upper: f64,
    /// `||E_ITG||_A`.
    pub actual: f64,
    pub notay_upper: f64,
    pub sandwich_ok: bool,
}

/// `||E||_A` from the extreme eigenvalues of `A^{-1} B`.
pub fn convergence_factor_from_preconditioner(b: &DenseMatrix, a: &SpdMatrix) -> Result<f64> {
    let (lmin, lmax) = gen_eig_extremes(b, a)?;
    Ok((1.0 / lmin - 1.0).max(1.0 - 1.0 / lmax))
}

/// Evaluates the bounds and the true convergence factor of one setup.
///
/// The true factor is taken as the spectral radius of `A^{1/2} E A^{-1/2}` and
/// compared with the value implied by the extremes of `A^{-1} B_ITG`.
pub fn theorem33_bounds(setup: &TwoGridSetup) -> Result<BoundsReport> {
    let q = spectral_quantities(setup)?;
    let (case_id, lower, upper) = bounds_from_quantities(&q)?;
    let ops = build_inexact_twogrid(setup)?;
    let spectrum = energy_spectrum(&ops.e, setup.a())?;
    let actual = spectrum[0].abs().max(spectrum[spectrum.len() - 1].abs());
    let via_pencil = convergence_factor_from_preconditioner(&ops.b, setup.a())?;
    cross_check("||E||_A two ways", (actual - via_pencil).abs(), ENERGY_NORM_TOL)?;
    let notay_upper = notay_from(setup, q.k_tg)?;
    Ok(BoundsReport {
        n: setup.order(),
        n_c: setup.coarse_order(),
        case_id,
        quantities: q,
        lower,
        upper,
        actual,
        notay_upper,
        sandwich_ok: lower - SANDWICH_TOL <= actual && actual <= upper + SANDWICH_TOL,
    })
}

/// Largest entrywise gap between two operators, for tests and reports.
pub fn operator_gap(x: &DenseMatrix, y: &DenseMatrix) -> f64 {
    max_abs(&(x - y))
}

/// All eigenvalues of `(P^T Mtilde P)^{-1}(B_c - A_c)`.
pub fn deviation_spectrum(setup: &TwoGridSetup) -> Result<Vec<f64>> {
    let w = setup.restricted_smoother()?;
    gen_eigvals(&symmetrize(&(setup.bc().matrix() - setup.a_c().matrix())), &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{
        alpha_parameterized_example, ideal_interpolation, laplacian_1d, linear_interpolation_1d, BlockPartition,
    };
    use crate::linalg::operator_energy_norm;

    fn lap7_setup() -> (Smoother, Prolongation) {
        let a = laplacian_1d(7).unwrap();
        let s = Smoother::weighted_jacobi(&a, 2.0 / 3.0).unwrap();
        (s, linear_interpolation_1d(7).unwrap())
    }

    fn example_setup(alpha: f64) -> TwoGridSetup {
        let (a, part) = alpha_parameterized_example(alpha, 3, 2).unwrap();
        let s = Smoother::block_diagonal(&a, &part).unwrap();
        let p = ideal_interpolation(&a, &part).unwrap();
        let p0 = part.coarse_embedding();
        let bc = SpdMatrix::from_symmetrized(&(p0.transpose() * a.matrix() * &p0)).unwrap();
        TwoGridSetup::new(s, p, bc).unwrap()
    }

    #[test]
    fn projections_with_identity_prolongation() {
        let (s, _) = lap7_setup();
        let p = Prolongation::new(identity(7)).unwrap();
        assert!(max_abs(&(correction_projection(s.a(), &p).unwrap() - identity(7))) < 1e-12);
        assert!(max_abs(&(mtilde_projection(s.mtilde(), &p).unwrap() - identity(7))) < 1e-12);
        assert!((k_tg(&s, &p).unwrap() - 1.0).abs() < 1e-10);
        let ops = build_exact_twogrid(&s, &p).unwrap();
        assert!(max_abs(&ops.e) < 1e-12);
    }

    #[test]
    fn projection_properties() {
        let (s, p) = lap7_setup();
        let pi_a = correction_projection(s.a(), &p).unwrap();
        assert!(max_abs(&(&pi_a * &pi_a - &pi_a)) < 1e-12);
        assert!(max_abs(&((identity(7) - &pi_a) * p.matrix())) < 1e-12);

        let pi = mtilde_projection(s.mtilde(), &p).unwrap();
        let mt = s.mtilde().matrix();
        assert!(max_abs(&(&pi * &pi - &pi)) < 1e-12);
        assert!(norm2(&(mt * &pi - pi.transpose() * mt)) < 1e-12);

        // Mtilde = I: the orthogonal projector onto range(P)
        let id = SpdMatrix::identity(7);
        let pi = mtilde_projection(&id, &p).unwrap();
        assert!(max_abs(&(&pi - pi.transpose())) < 1e-14);
        assert!(max_abs(&(&pi * p.matrix() - p.matrix())) < 1e-14);
    }

    #[test]
    fn k_tg_matches_exact_factor() {
        let (s, p) = lap7_setup();
        let k = k_tg(&s, &p).unwrap();
        assert!(k > 1.0);
        let ops = build_exact_twogrid(&s, &p).unwrap();
        let norm = operator_energy_norm(&ops.e, s.a()).unwrap();
        assert!((norm - (1.0 - 1.0 / k)).abs() < 1e-10);
        let spec = energy_spectrum(&ops.e, s.a()).unwrap();
        assert!(spec[0].abs() < 1e-10 && spec[spec.len() - 1] < 1.0);
    }

    #[test]
    fn exact_setup_collapses() {
        let (s, p) = lap7_setup();
        let setup = TwoGridSetup::exact(s, p).unwrap();
        let r = theorem33_bounds(&setup).unwrap();
        assert_eq!(r.case_id, BoundsCase::I);
        assert!((r.quantities.d1 - 1.0).abs() < 1e-12 && (r.quantities.d2 - 1.0).abs() < 1e-12);
        let exact = 1.0 - 1.0 / r.quantities.k_tg;
        assert!((r.lower - exact).abs() < 1e-10);
        assert!((r.upper - exact).abs() < 1e-10);
        assert!((r.actual - exact).abs() < 1e-10);
        assert!((r.notay_upper - exact).abs() < 1e-10);
        assert!(r.sandwich_ok);
    }

    #[test]
    fn lemma32_values() {
        let (s, p) = lap7_setup();
        let [a, b, c, d] = lemma32_identities(s.a(), s.mtilde(), &p).unwrap();
        let k = k_tg(&s, &p).unwrap();
        let mt_pi = mtilde_times_projection(s.mtilde(), &p).unwrap();
        let (_, lmp) = gen_eig_extremes(&mt_pi, s.a()).unwrap();
        assert!(a.abs() < 1e-9 && c.abs() < 1e-9);
        assert!((b - (k - 1.0)).abs() < 1e-9);
        assert!((d - (lmp - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn doubled_coarse_matrix() {
        let (s, p) = lap7_setup();
        let exact = TwoGridSetup::exact(s, p).unwrap();
        let bc = SpdMatrix::new(exact.a_c().matrix() * 2.0).unwrap();
        let setup = exact.with_bc(bc).unwrap();
        let (d1, d2) = deviation_extremes(setup.a(), setup.smoother().mtilde(), setup.p(), setup.bc()).unwrap();
        let w = setup.restricted_smoother().unwrap();
        let (lmin, lmax) = gen_eig_extremes(setup.a_c().matrix(), &w).unwrap();
        assert!((d1 - 1.0 / (1.0 + lmax)).abs() < 1e-12);
        assert!((d2 - 1.0 / (1.0 + lmin)).abs() < 1e-12);
        let r = theorem33_bounds(&setup).unwrap();
        assert!(r.sandwich_ok);
        assert!(r.actual <= r.notay_upper + 1e-9);
    }

    #[test]
    fn block_example_values() {
        for alpha in [0.0, 0.3, 0.6, 0.9] {
            let setup = example_setup(alpha);
            let r = theorem33_bounds(&setup).unwrap();
            let a2 = alpha * alpha;
            assert_eq!(r.case_id, BoundsCase::I);
            assert!((r.actual - a2).abs() < 1e-10, "alpha {alpha}: {}", r.actual);
            assert!((r.lower - a2).abs() < 1e-10);
            assert!((r.upper - a2).abs() < 1e-10);
            assert!((r.quantities.k_tg - 1.0 / (1.0 - a2)).abs() < 1e-10);
            assert!((r.quantities.lam_max_ainv_mt - 1.0 / (1.0 - a2)).abs() < 1e-10);
            assert!((r.quantities.d1 - 1.0 / (1.0 + a2)).abs() < 1e-10);
            assert!(r.quantities.d2 <= 1.0 + 1e-12);
            assert!((r.notay_upper - a2 * (2.0 - a2)).abs() < 1e-10);
        }
    }

    #[test]
    fn scaled_identity_limit() {
        let (s, p) = lap7_setup();
        let (lmin, _) = gen_eig_extremes(s.a().matrix(), s.mtilde()).unwrap();
        let limit = 1.0 - lmin;
        let base = TwoGridSetup::exact(s, p).unwrap();
        let setup = base.with_bc(SpdMatrix::new(identity(3) * 1e8).unwrap()).unwrap();
        let r = theorem33_bounds(&setup).unwrap();
        assert!((r.lower - limit).abs() < 1e-6);
        assert!((r.upper - limit).abs() < 1e-6);
        assert!((r.actual - limit).abs() < 1e-6);
        assert!(r.notay_upper > 0.999);
    }

    #[test]
    fn admissibility_limit_on_d2() {
        let q = SpectralQuantities {
            k_tg: 2.0,
            lam_max_ainv_mt: 3.0,
            lam_min_ainv_mt: 1.1,
            lam_max_ainv_mt_pi: 2.0,
            d1: 0.8,
            d2: 2.0,
        };
        // lambda/(lambda - 1) = 2, so d2 = 2 sits on the excluded endpoint
        assert!(matches!(bounds_from_quantities(&q), Err(Error::OutOfTheoryRange(_))));
        let ok = SpectralQuantities { d2: 1.9, ..q };
        let (case, lower, upper) = bounds_from_quantities(&ok).unwrap();
        assert_eq!(case, BoundsCase::II);
        assert!(lower <= upper);
        // case (i) never consults the limit
        let first = SpectralQuantities { d1: 0.5, d2: 0.9, ..q };
        assert!(bounds_from_quantities(&first).is_ok());
    }

    #[test]
    fn tiny_coarse_solver_follows_the_admissibility_rule() {
        let (s, p) = lap7_setup();
        let base = TwoGridSetup::exact(s, p).unwrap();
        let setup = base.with_bc(SpdMatrix::new(identity(3) * 1e-3).unwrap()).unwrap();
        let dev = deviation_spectrum(&setup).unwrap();
        let d2 = 1.0 / (1.0 + dev[0]);
        let mt_pi = mtilde_times_projection(setup.smoother().mtilde(), setup.p()).unwrap();
        let (_, lmp) = gen_eig_extremes(&mt_pi, setup.a()).unwrap();
        let admissible = d2 < lmp / (lmp - 1.0);
        match theorem33_bounds(&setup) {
            Ok(r) => {
                assert!(admissible);
                assert!(r.sandwich_ok);
            }
            Err(Error::OutOfTheoryRange(_)) => assert!(!admissible),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn case_selection_boundaries() {
        assert_eq!(BoundsCase::select(0.5, 1.0), BoundsCase::I);
        assert_eq!(BoundsCase::select(0.5, 1.0 + 5e-13), BoundsCase::I);
        assert_eq!(BoundsCase::select(1.0, 1.5), BoundsCase::II);
        assert_eq!(BoundsCase::select(1.2, 1.5), BoundsCase::III);
    }

    #[test]
    fn report_field_names() {
        let setup = example_setup(0.5);
        let r = theorem33_bounds(&setup).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        for k in [
            "n",
            "n_c",
            "case_id",
            "K_TG",
            "lam_max_AinvMt",
            "lam_min_AinvMt",
            "lam_max_AinvMtPi",
            "d1",
            "d2",
            "lower",
            "upper",
            "actual",
            "notay_upper",
            "sandwich_ok",
        ] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["case_id"], "i");
        let back: BoundsReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn partition_embedding_gives_cc_block() {
        let (a, part) = alpha_parameterized_example(0.4, 2, 2).unwrap();
        let p0 = part.coarse_embedding();
        assert_eq!(p0.transpose() * a.matrix() * &p0, part.a_cc(a.matrix()));
        let _ = BlockPartition::leading_fine(2, 2).unwrap();
    }
}
