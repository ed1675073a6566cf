//! Recursive multigrid as a solver and as explicit error-propagation matrices,
//! with the hierarchy-wide quantities and the fixed-point certificate built on
//! the inexact two-grid bounds.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::linalg::{energy_spectrum, gen_eig_extremes, gen_eigvals, identity, symmetrize, DenseMatrix, SpdMatrix};
use crate::rng::SplitMix64;
use crate::twogrid::k_tg;

/// Bisection stops once `|F(x)|` is this small or the bracket is exhausted.
pub const ROOT_TOL: f64 = 1e-13;
const MAX_BISECTIONS: usize = 200;
const SCAN_POINTS: usize = 1000;
const CYCLE_MATRIX_TOL: f64 = 1e-11;
const SPECTRUM_FLOOR: f64 = -1e-10;
const PROBE_SEED: u64 = 0x5EED;
const PROBES: usize = 3;

/// One cycle at level `k` (`1 <= k <= L`) for `A_k u = f` from `u0`.
pub fn mg_cycle(h: &Hierarchy, k: usize, f: &DVector<f64>, u0: &DVector<f64>) -> Result<DVector<f64>> {
    if k == 0 || k > h.depth() {
        return Err(Error::BadDimension(format!("level {k} outside 1..={}", h.depth())));
    }
    let lvl = h.level(k);
    if f.len() != lvl.a.order() || u0.len() != lvl.a.order() {
        return Err(Error::BadDimension(format!(
            "level {k} has order {}, got vectors of length {} and {}",
            lvl.a.order(),
            f.len(),
            u0.len()
        )));
    }
    let a = lvl.a.matrix();
    let m_inv = lvl.smoother.m_inv();
    let pm = lvl.p.matrix();

    let u1 = u0 + m_inv * (f - a * u0);
    let r = pm.transpose() * (f - a * &u1);
    let correction = if k == 1 {
        h.coarsest().solve_vec(&r)
    } else {
        let mut e = DVector::zeros(r.len());
        for _ in 0..h.gamma() {
            e = mg_cycle(h, k - 1, &r, &e)?;
        }
        e
    };
    let u2 = u1 + pm * correction;
    Ok(&u2 + m_inv.transpose() * (f - a * &u2))
}

/// `E^gamma` evaluated as `R^{-1} (R E R^{-1})^gamma R` with `R = A^{1/2}`.
fn energy_power(e: &DenseMatrix, a: &SpdMatrix, gamma: usize) -> Result<DenseMatrix> {
    let r = a.sqrt_matrix()?;
    let r_inv = a.inv_sqrt_matrix()?;
    let t = symmetrize(&(r * e * r_inv));
    let mut power = t.clone();
    for _ in 1..gamma {
        power = symmetrize(&(&power * &t));
    }
    Ok(r_inv * power * r)
}

/// Error-propagation matrices `E^(1), ..., E^(L)`, built bottom-up so each
/// coarse power is formed once. Each level is probed against [`mg_cycle`] and
/// its spectrum checked to lie in `[0, 1)`.
pub fn mg_error_matrices(h: &Hierarchy) -> Result<Vec<DenseMatrix>> {
    let mut out: Vec<DenseMatrix> = Vec::with_capacity(h.depth());
    let mut rng = SplitMix64::new(PROBE_SEED);
    for k in 1..=h.depth() {
        let lvl = h.level(k);
        let a = &lvl.a;
        let pm = lvl.p.matrix();
        let n = a.order();
        let coarse_inverse_action = if k == 1 {
            h.coarsest().solve(&(pm.transpose() * a.matrix()))
        } else {
            let a_prev = h.a(k - 1);
            let power = energy_power(&out[k - 2], a_prev, h.gamma())?;
            (identity(a_prev.order()) - power) * a_prev.solve(&(pm.transpose() * a.matrix()))
        };
        let middle = identity(n) - pm * coarse_inverse_action;
        let e = lvl.smoother.post_error() * middle * lvl.smoother.pre_error();

        for _ in 0..PROBES {
            let residual = cycle_residual(h, k, &e, &mut rng)?;
            if residual > CYCLE_MATRIX_TOL {
                return Err(Error::CrossCheckFailed {
                    check: "cycle error = E_IMG (u* - u0)",
                    residual,
                    tol: CYCLE_MATRIX_TOL,
                });
            }
        }
        let spectrum = energy_spectrum(&e, a)?;
        let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
        if lo < SPECTRUM_FLOOR || hi >= 1.0 {
            return Err(Error::CrossCheckFailed {
                check: "spectrum of E_IMG in [0, 1)",
                residual: if lo < SPECTRUM_FLOOR { -lo } else { hi },
                tol: if lo < SPECTRUM_FLOOR { -SPECTRUM_FLOOR } else { 1.0 },
            });
        }
        out.push(e);
    }
    Ok(out)
}

/// `max |(u* - cycle(A u*, u0)) - E (u* - u0)|` for one random pair.
pub fn cycle_residual(h: &Hierarchy, k: usize, e: &DenseMatrix, rng: &mut SplitMix64) -> Result<f64> {
    let n = h.order(k);
    let exact = rng.vector(n);
    let u0 = rng.vector(n);
    let f = h.a(k).matrix() * &exact;
    let u = mg_cycle(h, k, &f, &u0)?;
    let observed = &exact - u;
    let predicted = e * (&exact - &u0);
    Ok((observed - predicted).amax())
}

/// `E_IMG^(k)`.
pub fn mg_error_matrix(h: &Hierarchy, k: usize) -> Result<DenseMatrix> {
    if k == 0 || k > h.depth() {
        return Err(Error::BadDimension(format!("level {k} outside 1..={}", h.depth())));
    }
    Ok(mg_error_matrices(h)?.swap_remove(k - 1))
}

/// Coarse solver implied by `gamma` recursive cycles at level `k - 1`:
/// `A_{k-1} (I - E^gamma)^{-1} = A^{1/2} (I - T^gamma)^{-1} A^{1/2}` with `T` the
/// symmetrized `E^(k-1)`. At `k = 1` this is `A0_hat`.
pub fn implicit_coarse_operator(h: &Hierarchy, k: usize) -> Result<SpdMatrix> {
    if k == 0 || k > h.depth() {
        return Err(Error::BadDimension(format!("level {k} outside 1..={}", h.depth())));
    }
    if k == 1 {
        return Ok(h.coarsest().clone());
    }
    let errors = mg_error_matrices(h)?;
    coarse_operator_from(&errors[k - 2], h.a(k - 1), h.gamma())
}

fn coarse_operator_from(e: &DenseMatrix, a: &SpdMatrix, gamma: usize) -> Result<SpdMatrix> {
    let r = a.sqrt_matrix()?;
    let t = symmetrize(&(r * e * a.inv_sqrt_matrix()?));
    let mut power = t.clone();
    for _ in 1..gamma {
        power = symmetrize(&(&power * &t));
    }
    let gap = SpdMatrix::new(identity(a.order()) - power)?;
    SpdMatrix::from_symmetrized(&(r * gap.solve(r)))
}

/// Hierarchy-wide quantities driving the multilevel estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgLevelQuantities {
    /// `sigma_TG^(k)` for `k = 1..=L`.
    pub sigma_tg: Vec<f64>,
    /// `sigma_IMG^(k)` for `k = 1..=L`.
    pub sigma_img: Vec<f64>,
    pub sigma_l: f64,
    pub tau_l: f64,
    pub eps_l: f64,
}

impl MgLevelQuantities {
    /// `0 < sigma_L < 1 - eps_L`.
    pub fn check_nontrivial(&self) -> Result<()> {
        let upper = 1.0 - self.eps_l;
        if self.sigma_l > 0.0 && self.sigma_l < upper {
            Ok(())
        } else {
            Err(Error::NontrivialCaseViolated {
                sigma_l: self.sigma_l,
                upper,
            })
        }
    }
}

/// Per-level factors and `(sigma_L, tau_L, eps_L)` without the nontrivial-case gate.
pub fn level_quantities_unchecked(h: &Hierarchy) -> Result<MgLevelQuantities> {
    let errors = mg_error_matrices(h)?;
    let mut sigma_tg = Vec::with_capacity(h.depth());
    let mut sigma_img = Vec::with_capacity(h.depth());
    let mut tau_l = f64::NEG_INFINITY;
    let mut eps_l = f64::INFINITY;
    for k in 1..=h.depth() {
        let lvl = h.level(k);
        sigma_tg.push(1.0 - 1.0 / k_tg(&lvl.smoother, &lvl.p)?);
        let spec = energy_spectrum(&errors[k - 1], &lvl.a)?;
        sigma_img.push(spec[0].abs().max(spec[spec.len() - 1].abs()));
        let (_, tau) = gen_eig_extremes(h.a(k - 1).matrix(), &h.restricted_smoother(k)?)?;
        tau_l = tau_l.max(tau);
        let (eps, _) = gen_eig_extremes(lvl.a.matrix(), lvl.smoother.mtilde())?;
        eps_l = eps_l.min(eps);
    }
    let sigma_l = sigma_tg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MgLevelQuantities {
        sigma_tg,
        sigma_img,
        sigma_l,
        tau_l,
        eps_l,
    })
}

/// As [`level_quantities_unchecked`], rejecting hierarchies outside `0 < sigma_L < 1 - eps_L`.
pub fn level_quantities(h: &Hierarchy) -> Result<MgLevelQuantities> {
    let q = level_quantities_unchecked(h)?;
    q.check_nontrivial()?;
    Ok(q)
}

/// `F_gamma(x)`, whose root in `(sigma, 1 - eps)` bounds every level factor.
pub fn fixed_point_residual(sigma: f64, tau: f64, eps: f64, gamma: usize, x: f64) -> f64 {
    fixed_point_map(sigma, tau, eps, x.powi(gamma as i32)) - x
}

/// `[sigma eps (1 - y) + tau (1 - eps)(1 - sigma) y] / [eps (1 - y) + tau (1 - sigma) y]`.
fn fixed_point_map(sigma: f64, tau: f64, eps: f64, y: f64) -> f64 {
    let num = sigma * eps * (1.0 - y) + tau * (1.0 - eps) * (1.0 - sigma) * y;
    let den = eps * (1.0 - y) + tau * (1.0 - sigma) * y;
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub gamma: usize,
    pub x_gamma: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// More than one sign change was seen on the sampling grid; `x_gamma` is the smallest root.
    pub multiple_roots: bool,
}

fn check_triple(sigma: f64, tau: f64, eps: f64) -> Result<()> {
    if !(sigma.is_finite() && tau.is_finite() && eps.is_finite()) {
        return Err(Error::BadParameter("non-finite level quantity".into()));
    }
    if !(eps > 0.0 && eps <= tau) {
        return Err(Error::BadParameter(format!(
            "need 0 < eps_L <= tau_L, got eps_L = {eps}, tau_L = {tau}"
        )));
    }
    if !(sigma > 0.0 && sigma < 1.0 - eps) {
        return Err(Error::BadParameter(format!(
            "need 0 < sigma_L < 1 - eps_L, got sigma_L = {sigma}, eps_L = {eps}"
        )));
    }
    Ok(())
}

/// Root of `F_gamma` in `(sigma, 1 - eps)` by bisection.
///
/// The bracket is first sampled at 1000 uniform points; bisection runs on the
/// first sign change, giving the smallest root. Extra sign changes set
/// `multiple_roots`.
pub fn fixed_point_root(sigma: f64, tau: f64, eps: f64, gamma: usize) -> Result<FixedPointResult> {
    check_triple(sigma, tau, eps)?;
    if gamma == 0 {
        return Err(Error::BadParameter("cycle index must be at least 1".into()));
    }
    let f = |x: f64| fixed_point_residual(sigma, tau, eps, gamma, x);
    let (lo, hi) = (sigma, 1.0 - eps);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::BadBracket { f_lo, f_hi });
    }

    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| {
            if i == SCAN_POINTS {
                hi
            } else {
                lo + (hi - lo) * i as f64 / SCAN_POINTS as f64
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let changes: Vec<usize> = (0..SCAN_POINTS)
        .filter(|&i| (values[i] > 0.0) != (values[i + 1] > 0.0))
        .collect();
    let first = changes[0];
    let (mut a, mut b) = (grid[first], grid[first + 1]);
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let x = if f(a).abs() <= f(b).abs() { a } else { b };
    if f(x).abs() > ROOT_TOL {
        return Err(Error::BadBracket { f_lo: f(a), f_hi: f(b) });
    }
    Ok(FixedPointResult {
        gamma,
        x_gamma: x,
        bracket: (lo, hi),
        iterations,
        multiple_roots: changes.len() > 1,
    })
}

/// Closed-form V-cycle root and W-cycle upper estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEstimates {
    pub x1: f64,
    pub x2_hat: f64,
}

const SPECIAL_BRANCH_TOL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-10;

/// `x1` in closed form and the upper estimate `x2_hat` of the W-cycle root, each
/// checked against bisection.
pub fn corollary43_bounds(sigma: f64, tau: f64, eps: f64) -> Result<CycleEstimates> {
    check_triple(sigma, tau, eps)?;
    let mu = 1.0 + sigma - tau * (1.0 - eps) * (1.0 - sigma) / eps;
    let disc = mu * mu - 4.0 * sigma * (1.0 - tau * (1.0 - sigma) / eps);
    let x1 = 2.0 * sigma / (mu + disc.max(0.0).sqrt());
    let x2_hat = if (tau * (1.0 - sigma) - eps).abs() <= SPECIAL_BRANCH_TOL {
        2.0 * sigma / (1.0 + (1.0 - 4.0 * sigma * (1.0 - sigma - eps)).sqrt())
    } else {
        fixed_point_map(sigma, tau, eps, x1 * x1)
    };

    let root1 = fixed_point_root(sigma, tau, eps, 1)?.x_gamma;
    let gap = (x1 - root1).abs();
    if gap > CLOSED_FORM_TOL {
        return Err(Error::CrossCheckFailed {
            check: "x1 closed form vs bisection",
            residual: gap,
            tol: CLOSED_FORM_TOL,
        });
    }
    let root2 = fixed_point_root(sigma, tau, eps, 2)?.x_gamma;
    if root2 > x2_hat + CLOSED_FORM_TOL {
        return Err(Error::CrossCheckFailed {
            check: "x2 <= x2_hat",
            residual: root2 - x2_hat,
            tol: CLOSED_FORM_TOL,
        });
    }
    Ok(CycleEstimates { x1, x2_hat })
}

/// Largest admissible eigenvalue of `(P_1^T Mtilde_1 P_1)^{-1}(A0_hat - A_0)`.
pub fn deviation_threshold(sigma: f64, eps: f64, x: f64) -> f64 {
    eps * (x - sigma) / ((1.0 - sigma) * (1.0 - eps - x))
}

const CONDITION_TOL: f64 = 1e-12;
const ESTIMATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub k: usize,
    pub n_k: usize,
    pub sigma_tg: f64,
    pub sigma_img: f64,
}

/// Outcome of the multilevel certificate for one cycle index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub levels: Vec<LevelRow>,
    #[serde(rename = "sigma_L")]
    pub sigma_l: f64,
    #[serde(rename = "tau_L")]
    pub tau_l: f64,
    #[serde(rename = "eps_L")]
    pub eps_l: f64,
    pub gamma: usize,
    pub x_gamma: f64,
    pub x1: f64,
    pub x2_hat: f64,
    /// Spectrum of `(P_1^T Mtilde_1 P_1)^{-1}(A0_hat - A_0)` inside `[0, threshold]`.
    pub condition24: bool,
    /// Spectrum of `A0_hat^{-1} A_0` inside `[(1 - eps - x)/(1 - eps - sigma), 1]`.
    pub spectral_floor: bool,
    /// A coarsest-level condition holds and every `sigma_IMG^(k) <= x_gamma`.
    pub verified: bool,
    pub threshold: f64,
    pub multiple_roots: bool,
}

/// Checks the coarsest-level conditions and the estimate `sigma_IMG^(k) <= x_gamma`.
///
/// A failed bound is reported in the result, not as an error.
pub fn theorem42_certify(h: &Hierarchy, gamma: usize) -> Result<Certification> {
    let h = h.with_gamma(gamma)?;
    let q = level_quantities(&h)?;
    let (sigma, tau, eps) = (q.sigma_l, q.tau_l, q.eps_l);
    let root = fixed_point_root(sigma, tau, eps, gamma)?;
    let x = root.x_gamma;
    let est = corollary43_bounds(sigma, tau, eps)?;
    let threshold = deviation_threshold(sigma, eps, x);

    let a0 = h.a(0);
    let a0_hat = h.coarsest();
    let deviation = symmetrize(&(a0_hat.matrix() - a0.matrix()));
    let dev = gen_eigvals(&deviation, &h.restricted_smoother(1)?)?;
    let condition24 = dev[0] >= -CONDITION_TOL && dev[dev.len() - 1] <= threshold + CONDITION_TOL;

    let ratio = gen_eigvals(a0.matrix(), a0_hat)?;
    let floor = (1.0 - eps - x) / (1.0 - eps - sigma);
    let spectral_floor = ratio[0] >= floor - CONDITION_TOL && ratio[ratio.len() - 1] <= 1.0 + CONDITION_TOL;

    let estimate = q.sigma_img.iter().all(|&s| s <= x + ESTIMATE_TOL);
    let levels = (1..=h.depth())
        .map(|k| LevelRow {
            k,
            n_k: h.order(k),
            sigma_tg: q.sigma_tg[k - 1],
            sigma_img: q.sigma_img[k - 1],
        })
        .collect();
    Ok(Certification {
        levels,
        sigma_l: sigma,
        tau_l: tau,
        eps_l: eps,
        gamma,
        x_gamma: x,
        x1: est.x1,
        x2_hat: est.x2_hat,
        condition24,
        spectral_floor,
        verified: (condition24 || spectral_floor) && estimate,
        threshold,
        multiple_roots: root.multiple_roots,
    })
}

/// The threshold in the coarsest-level condition for `h` at cycle index `gamma`.
/// It does not depend on `A0_hat`.
pub fn coarsest_threshold(h: &Hierarchy, gamma: usize) -> Result<f64> {
    let q = level_quantities(&h.with_gamma(gamma)?)?;
    let root = fixed_point_root(q.sigma_l, q.tau_l, q.eps_l, gamma)?;
    Ok(deviation_threshold(q.sigma_l, q.eps_l, root.x_gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::CoarsestSolver;
    use crate::linalg::max_abs;
    use crate::smoother::SmootherKind;
    use crate::twogrid::{build_exact_twogrid, build_inexact_twogrid, TwoGridSetup};

    fn jacobi() -> SmootherKind {
        SmootherKind::Jacobi { omega: 2.0 / 3.0 }
    }

    fn poisson(n: usize, levels: usize, gamma: usize) -> Hierarchy {
        Hierarchy::poisson_1d(n, levels, jacobi(), gamma, CoarsestSolver::Exact).unwrap()
    }

    #[test]
    fn exact_solution_is_a_fixed_point() {
        let h = poisson(15, 2, 1);
        let mut rng = SplitMix64::new(1);
        let u = rng.vector(15);
        let f = h.a(2).matrix() * &u;
        let out = mg_cycle(&h, 2, &f, &u).unwrap();
        assert!((out - u).amax() < 1e-13);
    }

    #[test]
    fn single_level_is_exact_two_grid() {
        let h = poisson(7, 1, 1);
        let e = mg_error_matrix(&h, 1).unwrap();
        let tg = build_exact_twogrid(h.smoother(1), h.p(1)).unwrap();
        assert!(max_abs(&(e - tg.e)) < 1e-12);
    }

    #[test]
    fn matches_inexact_two_grid_with_implicit_coarse_operator() {
        for gamma in [1, 2, 3] {
            let h = poisson(15, 3, gamma);
            let errors = mg_error_matrices(&h).unwrap();
            for k in 1..=3 {
                let bc = implicit_coarse_operator(&h, k).unwrap();
                let setup = TwoGridSetup::new(h.smoother(k).clone(), h.p(k).clone(), bc).unwrap();
                let ops = build_inexact_twogrid(&setup).unwrap();
                assert!(max_abs(&(&ops.e - &errors[k - 1])) < 1e-10, "gamma {gamma} level {k}");
                let d = crate::twogrid::deviation_extremes(setup.a(), setup.smoother().mtilde(), setup.p(), setup.bc())
                    .unwrap();
                assert!(d.0 <= d.1 + 1e-12 && d.1 <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn power_iteration_agrees_with_eigensolver() {
        let h = poisson(15, 3, 2);
        let e = mg_error_matrix(&h, 2).unwrap();
        let a = h.a(2);
        let t = a.sqrt_matrix().unwrap() * &e * a.inv_sqrt_matrix().unwrap();
        let mut v = SplitMix64::new(9).vector(7);
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let w = &t * &v;
            lambda = w.norm() / v.norm();
            v = w / lambda;
        }
        let q = level_quantities(&h).unwrap();
        assert!((lambda - q.sigma_img[1]).abs() < 1e-8, "{lambda} vs {}", q.sigma_img[1]);
    }

    #[test]
    fn contraction_on_random_starts() {
        let h = poisson(15, 2, 1);
        let q = level_quantities(&h).unwrap();
        let a = h.a(2);
        let mut rng = SplitMix64::new(4);
        for _ in 0..10 {
            let u = rng.vector(15);
            let u0 = rng.vector(15);
            let f = a.matrix() * &u;
            let out = mg_cycle(&h, 2, &f, &u0).unwrap();
            let energy = |v: &DVector<f64>| v.dot(&(a.matrix() * v)).sqrt();
            assert!(energy(&(&u - out)) <= q.sigma_img[1] * energy(&(&u - &u0)) + 1e-10);
        }
    }

    #[test]
    fn zero_coarse_error_gives_galerkin_operator() {
        let a = crate::hierarchy::laplacian_1d(5).unwrap();
        let bc = coarse_operator_from(&DenseMatrix::zeros(5, 5), &a, 2).unwrap();
        assert!(max_abs(&(bc.matrix() - a.matrix())) < 1e-12);
    }

    #[test]
    fn w_cycle_coarse_operator_dominates_v_cycle() {
        let h = poisson(15, 3, 1);
        let e = &mg_error_matrices(&h).unwrap()[1];
        let b1 = coarse_operator_from(e, h.a(2), 1).unwrap();
        let b2 = coarse_operator_from(e, h.a(2), 2).unwrap();
        assert!(crate::linalg::is_spsd(&(b1.matrix() - b2.matrix())).unwrap());
    }

    #[test]
    fn lower_bound_law_and_ordering() {
        let h = poisson(31, 3, 1);
        let q = level_quantities(&h).unwrap();
        for (tg, img) in q.sigma_tg.iter().zip(&q.sigma_img) {
            assert!(*img >= tg - 1e-10);
        }
        assert!(q.eps_l > 0.0 && q.eps_l <= q.tau_l);
        assert!((q.sigma_l - q.sigma_tg.iter().copied().fold(0.0, f64::max)).abs() == 0.0);
    }

    #[test]
    fn special_branch_values() {
        let r = fixed_point_root(0.5, 0.4, 0.2, 1).unwrap();
        assert!((r.x_gamma - 5.0 / 7.0).abs() < 1e-12);
        let c = corollary43_bounds(0.5, 0.4, 0.2).unwrap();
        assert!((c.x1 - 5.0 / 7.0).abs() < 1e-12);
        assert!((c.x2_hat - 1.0 / (1.0 + 0.4f64.sqrt())).abs() < 1e-14);
        // in this branch the W-cycle estimate is the root itself
        let r2 = fixed_point_root(0.5, 0.4, 0.2, 2).unwrap();
        assert!((r2.x_gamma - c.x2_hat).abs() < 1e-12);
    }

    #[test]
    fn generic_branch_quadratic() {
        let (s, t, e) = (0.5, 0.25, 0.2);
        let r = fixed_point_root(s, t, e, 1).unwrap();
        // (eps - tau(1-sigma)) x^2 + (tau(1-eps)(1-sigma) - eps(1+sigma)) x + sigma eps = 0
        let (qa, qb, qc) = (e - t * (1.0 - s), t * (1.0 - e) * (1.0 - s) - e * (1.0 + s), s * e);
        let disc: f64 = qb * qb - 4.0 * qa * qc;
        let roots = [(-qb - disc.sqrt()) / (2.0 * qa), (-qb + disc.sqrt()) / (2.0 * qa)];
        let inside: Vec<f64> = roots.into_iter().filter(|x| *x > s && *x < 1.0 - e).collect();
        assert_eq!(inside.len(), 1);
        assert!((r.x_gamma - inside[0]).abs() < 1e-12);
        let c = corollary43_bounds(s, t, e).unwrap();
        assert!((c.x1 - inside[0]).abs() < 1e-12);
    }

    #[test]
    fn roots_decrease_with_cycle_index() {
        let (s, t, e) = (0.3, 0.6, 0.1);
        let xs: Vec<f64> = (1..=8).map(|g| fixed_point_root(s, t, e, g).unwrap().x_gamma).collect();
        for w in xs.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(xs.iter().all(|&x| x > s && x < 1.0 - e));
        assert!(xs[7] - s < xs[0] - s);
    }

    #[test]
    fn bad_triples_are_rejected() {
        assert!(matches!(
            fixed_point_root(0.9, 0.5, 0.2, 1),
            Err(Error::BadParameter(_))
        ));
        assert!(matches!(
            fixed_point_root(0.5, 0.1, 0.2, 1),
            Err(Error::BadParameter(_))
        ));
        assert!(matches!(corollary43_bounds(0.0, 0.5, 0.2), Err(Error::BadParameter(_))));
    }

    #[test]
    fn exact_coarsest_certifies() {
        for gamma in [1, 2] {
            let h = poisson(15, 3, gamma);
            let c = theorem42_certify(&h, gamma).unwrap();
            assert!(c.condition24 && c.spectral_floor && c.verified, "{c:?}");
        }
    }

    #[test]
    fn shifted_coarsest_at_half_threshold() {
        let h = poisson(15, 3, 1);
        let thr = coarsest_threshold(&h, 1).unwrap();
        let shifted = h.with_coarsest(CoarsestSolver::Shift(0.5 * thr)).unwrap();
        let c = theorem42_certify(&shifted, 1).unwrap();
        assert!(c.condition24 && c.verified);
        assert!((c.threshold - thr).abs() < 1e-14);

        let far = h.with_coarsest(CoarsestSolver::Shift(10.0 * thr + 1.0)).unwrap();
        let c = theorem42_certify(&far, 1).unwrap();
        assert!(!c.condition24);
    }
}
