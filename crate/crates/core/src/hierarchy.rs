//! Model problems, prolongations, Galerkin coarsening and C.B.S. constants,
//! plus the multilevel [`Hierarchy`] consumed by the multigrid analysis.

use crate::error::{Error, Result};
use crate::linalg::{check_finite, cholesky_lower, householder_q, is_spsd_against, norm2, DenseMatrix, SpdMatrix};
use crate::smoother::{Smoother, SmootherKind};

/// Relative singular-value cutoff for full-column-rank checks.
pub const RANK_TOL: f64 = 1e-10;

/// `tridiag(-1, 2, -1)` of order `n`.
pub fn laplacian_1d(n: usize) -> Result<SpdMatrix> {
    if n < 2 {
        return Err(Error::BadDimension(format!("1D Laplacian needs n >= 2, got {n}")));
    }
    SpdMatrix::new(tridiag(n))
}

fn tridiag(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    })
}

/// Five-point Laplacian on an `nx` by `ny` grid, lexicographic with `x` fastest.
pub fn laplacian_2d(nx: usize, ny: usize) -> Result<SpdMatrix> {
    if nx < 2 || ny < 2 {
        return Err(Error::BadDimension(format!(
            "2D Laplacian needs nx, ny >= 2, got {nx}x{ny}"
        )));
    }
    let tx = tridiag(nx);
    let ty = tridiag(ny);
    let a = DenseMatrix::identity(ny, ny).kronecker(&tx) + ty.kronecker(&DenseMatrix::identity(nx, nx));
    SpdMatrix::new(a)
}

/// An `n x n_c` interpolation matrix of full column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongation {
    p: DenseMatrix,
}

impl Prolongation {
    pub fn new(p: DenseMatrix) -> Result<Self> {
        check_finite(&p)?;
        if p.ncols() > p.nrows() {
            return Err(Error::BadDimension(format!(
                "prolongation is {}x{}; needs n_c <= n",
                p.nrows(),
                p.ncols()
            )));
        }
        let sv = p.singular_values();
        let (smin, smax) = (sv.min(), sv.max());
        if !(smin > RANK_TOL * smax) {
            return Err(Error::BadDimension(format!(
                "prolongation is rank deficient (sigma_min/sigma_max = {:.3e})",
                if smax > 0.0 { smin / smax } else { 0.0 }
            )));
        }
        Ok(Self { p })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn fine_order(&self) -> usize {
        self.p.nrows()
    }

    pub fn coarse_order(&self) -> usize {
        self.p.ncols()
    }

    /// `P^T X P`.
    pub fn restrict(&self, x: &DenseMatrix) -> DenseMatrix {
        self.p.transpose() * x * &self.p
    }
}

/// Linear interpolation on a 1D grid of `2m + 1` interior points onto the
/// `m` odd-numbered (1-based even) points; each column carries `(1/2, 1, 1/2)`.
pub fn linear_interpolation_1d(n_fine: usize) -> Result<Prolongation> {
    if n_fine < 3 || n_fine.is_multiple_of(2) {
        return Err(Error::BadDimension(format!(
            "linear interpolation needs n_fine = 2m + 1 with m >= 1, got {n_fine}"
        )));
    }
    let m = (n_fine - 1) / 2;
    let mut p = DenseMatrix::zeros(n_fine, m);
    for j in 0..m {
        p[(2 * j, j)] = 0.5;
        p[(2 * j + 1, j)] = 1.0;
        p[(2 * j + 2, j)] = 0.5;
    }
    Prolongation::new(p)
}

/// Tensor-product (bilinear) interpolation matching [`laplacian_2d`] ordering.
pub fn bilinear_interpolation_2d(nx: usize, ny: usize) -> Result<Prolongation> {
    let px = linear_interpolation_1d(nx)?;
    let py = linear_interpolation_1d(ny)?;
    Prolongation::new(py.matrix().kronecker(px.matrix()))
}

/// A splitting of `0..n` into fine (F) and coarse (C) index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    fine: Vec<usize>,
    coarse: Vec<usize>,
}

impl BlockPartition {
    /// Coarse set given explicitly; the fine set is its complement.
    pub fn from_coarse(n: usize, mut coarse: Vec<usize>) -> Result<Self> {
        coarse.sort_unstable();
        coarse.dedup();
        if coarse.iter().any(|&c| c >= n) {
            return Err(Error::BadDimension(format!("coarse index out of range 0..{n}")));
        }
        let fine: Vec<usize> = (0..n).filter(|i| coarse.binary_search(i).is_err()).collect();
        if fine.is_empty() || coarse.is_empty() {
            return Err(Error::BadDimension(
                "partition needs non-empty fine and coarse sets".into(),
            ));
        }
        Ok(Self { n, fine, coarse })
    }

    /// First `n_f` indices fine, last `n_c` coarse.
    pub fn leading_fine(n_f: usize, n_c: usize) -> Result<Self> {
        Self::from_coarse(n_f + n_c, (n_f..n_f + n_c).collect())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn fine(&self) -> &[usize] {
        &self.fine
    }

    pub fn coarse(&self) -> &[usize] {
        &self.coarse
    }

    fn block(&self, a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
    }

    pub fn a_ff(&self, a: &DenseMatrix) -> DenseMatrix {
        self.block(a, &self.fine, &self.fine)
    }

    pub fn a_fc(&self, a: &DenseMatrix) -> DenseMatrix {
        self.block(a, &self.fine, &self.coarse)
    }

    pub fn a_cc(&self, a: &DenseMatrix) -> DenseMatrix {
        self.block(a, &self.coarse, &self.coarse)
    }

    /// Canonical injection of the coarse variables (`P_0`).
    pub fn coarse_embedding(&self) -> DenseMatrix {
        let mut p = DenseMatrix::zeros(self.n, self.coarse.len());
        for (j, &c) in self.coarse.iter().enumerate() {
            p[(c, j)] = 1.0;
        }
        p
    }

    /// Canonical injection of the fine variables (`S_0`).
    pub fn fine_embedding(&self) -> DenseMatrix {
        let mut s = DenseMatrix::zeros(self.n, self.fine.len());
        for (j, &f) in self.fine.iter().enumerate() {
            s[(f, j)] = 1.0;
        }
        s
    }
}

/// Ideal interpolation `[-A_ff^{-1} A_fc; I]`, rows placed back in original order.
pub fn ideal_interpolation(a: &SpdMatrix, part: &BlockPartition) -> Result<Prolongation> {
    if part.order() != a.order() {
        return Err(Error::BadDimension("partition and matrix differ in order".into()));
    }
    let a_ff = SpdMatrix::new(part.a_ff(a.matrix()))?;
    let w = -a_ff.solve(&part.a_fc(a.matrix()));
    let mut p = DenseMatrix::zeros(a.order(), part.coarse().len());
    for (i, &f) in part.fine().iter().enumerate() {
        p.row_mut(f).copy_from(&w.row(i));
    }
    for (j, &c) in part.coarse().iter().enumerate() {
        p[(c, j)] = 1.0;
    }
    Prolongation::new(p)
}

/// Galerkin coarse matrix `P^T A P`.
pub fn galerkin(a: &SpdMatrix, p: &Prolongation) -> Result<SpdMatrix> {
    if p.fine_order() != a.order() {
        return Err(Error::BadDimension(format!(
            "prolongation has {} rows, A has order {}",
            p.fine_order(),
            a.order()
        )));
    }
    SpdMatrix::from_symmetrized(&p.restrict(a.matrix()))
}

/// `P# = P U_c^{-1}` with `P^T P = U_c^T U_c`, so that `P#^T P# = I`.
pub fn normalize_prolongation(p: &Prolongation) -> Result<(Prolongation, DenseMatrix)> {
    let gram = p.matrix().transpose() * p.matrix();
    let l = cholesky_lower(&gram)?;
    let sharp_t = l
        .solve_lower_triangular(&p.matrix().transpose())
        .ok_or_else(|| Error::NotSpd("Gram matrix factor is singular".into()))?;
    Ok((Prolongation::new(sharp_t.transpose())?, l.transpose()))
}

/// Orthonormal basis `S` of `null(P^T)`, so `P^T S = 0` and `[S P]` is nonsingular.
pub fn complement_basis(p: &Prolongation) -> DenseMatrix {
    let q = householder_q(p.matrix());
    let nc = p.coarse_order();
    q.columns(nc, p.fine_order() - nc).clone_owned()
}

/// `alpha = ||A_ff^{-1/2} A_fc A_cc^{-1/2}||_2`.
pub fn cbs_constant_block(a: &SpdMatrix, part: &BlockPartition) -> Result<f64> {
    if part.order() != a.order() {
        return Err(Error::BadDimension("partition and matrix differ in order".into()));
    }
    let a_ff = SpdMatrix::new(part.a_ff(a.matrix()))?;
    let a_cc = SpdMatrix::new(part.a_cc(a.matrix()))?;
    let core = a_ff.inv_sqrt_matrix()? * part.a_fc(a.matrix()) * a_cc.inv_sqrt_matrix()?;
    Ok(norm2(&core))
}

/// C.B.S. constant of the two-by-two form of `W` in the basis `[S P#]`.
pub fn cbs_constant_general(w: &SpdMatrix, s: &DenseMatrix, p_sharp: &Prolongation) -> Result<f64> {
    let n = w.order();
    if s.nrows() != n || p_sharp.fine_order() != n || s.ncols() + p_sharp.coarse_order() != n {
        return Err(Error::BadDimension("[S P#] must be square of the order of W".into()));
    }
    let mut basis = DenseMatrix::zeros(n, n);
    basis.columns_mut(0, s.ncols()).copy_from(s);
    basis
        .columns_mut(s.ncols(), p_sharp.coarse_order())
        .copy_from(p_sharp.matrix());
    Prolongation::new(basis).map_err(|_| Error::Singular("[S P#] is singular".into()))?;

    let wm = w.matrix();
    let p = p_sharp.matrix();
    let sws = SpdMatrix::from_symmetrized(&(s.transpose() * wm * s))?;
    let pwp = SpdMatrix::from_symmetrized(&(p.transpose() * wm * p))?;
    let core = sws.inv_sqrt_matrix()? * (s.transpose() * wm * p) * pwp.inv_sqrt_matrix()?;
    Ok(norm2(&core))
}

/// Two-by-two SPD matrix with identity diagonal blocks whose C.B.S. constant
/// is exactly `alpha`: `A_fc` is diagonal with entries `alpha, alpha/2, alpha/4, ...`.
/// Fine indices come first.
pub fn alpha_parameterized_example(alpha: f64, n_f: usize, n_c: usize) -> Result<(SpdMatrix, BlockPartition)> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::BadParameter(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    if n_f == 0 || n_c == 0 {
        return Err(Error::BadDimension("n_f and n_c must be positive".into()));
    }
    let n = n_f + n_c;
    let mut a = DenseMatrix::identity(n, n);
    let mut value = alpha;
    for i in 0..n_f.min(n_c) {
        a[(i, n_f + i)] = value;
        a[(n_f + i, i)] = value;
        value *= 0.5;
    }
    Ok((SpdMatrix::new(a)?, BlockPartition::leading_fine(n_f, n_c)?))
}

/// How the coarsest system is solved.
#[derive(Debug, Clone)]
pub enum CoarsestSolver {
    /// `A0_hat = A_0`.
    Exact,
    /// `A0_hat = A_0 + theta * P_1^T Mtilde_1 P_1`, `theta >= 0`.
    Shift(f64),
    /// `A0_hat = A_0 / c`, `0 < c <= 1`.
    Scale(f64),
    /// A user-supplied matrix; `A0_hat - A_0` must be SPSD.
    Matrix(DenseMatrix),
}

/// One level `k >= 1`: its matrix, prolongation from level `k - 1`, and smoother.
#[derive(Debug, Clone)]
pub struct Level {
    pub a: SpdMatrix,
    pub p: Prolongation,
    pub smoother: Smoother,
}

/// Levels `0..=L` with Galerkin coarse matrices and a coarsest-grid replacement.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    a0: SpdMatrix,
    levels: Vec<Level>,
    coarsest: SpdMatrix,
    gamma: usize,
}

impl Hierarchy {
    /// Builds Galerkin levels from the finest matrix down. `prolongations` are
    /// ordered finest first (`P_L`, ..., `P_1`).
    pub fn new(
        a_fine: SpdMatrix,
        prolongations: Vec<Prolongation>,
        smoother: SmootherKind,
        gamma: usize,
        coarsest: CoarsestSolver,
    ) -> Result<Self> {
        if prolongations.is_empty() {
            return Err(Error::BadDimension(
                "a hierarchy needs at least one prolongation".into(),
            ));
        }
        if gamma == 0 {
            return Err(Error::BadParameter("cycle index must be at least 1".into()));
        }
        let mut levels = Vec::with_capacity(prolongations.len());
        let mut a = a_fine;
        for p in prolongations {
            if p.fine_order() != a.order() {
                return Err(Error::BadDimension(format!(
                    "prolongation with {} rows applied to a level of order {}",
                    p.fine_order(),
                    a.order()
                )));
            }
            if p.coarse_order() >= p.fine_order() {
                return Err(Error::BadDimension("level orders must strictly decrease".into()));
            }
            let coarse = galerkin(&a, &p)?;
            let smoother = smoother.build(&a)?;
            levels.push(Level { a, p, smoother });
            a = coarse;
        }
        levels.reverse();
        let mut h = Self {
            coarsest: a.clone(),
            a0: a,
            levels,
            gamma,
        };
        h.coarsest = h.coarsest_matrix(&coarsest)?;
        Ok(h)
    }

    /// Geometric 1D Poisson hierarchy: `n -> (n-1)/2 -> ...` with `levels` coarsenings.
    pub fn poisson_1d(
        n: usize,
        levels: usize,
        smoother: SmootherKind,
        gamma: usize,
        coarsest: CoarsestSolver,
    ) -> Result<Self> {
        let mut ps = Vec::with_capacity(levels);
        let mut m = n;
        for _ in 0..levels {
            ps.push(linear_interpolation_1d(m)?);
            m = (m - 1) / 2;
        }
        Self::new(laplacian_1d(n)?, ps, smoother, gamma, coarsest)
    }

    /// Geometric 2D Poisson hierarchy with bilinear interpolation.
    pub fn poisson_2d(
        nx: usize,
        ny: usize,
        levels: usize,
        smoother: SmootherKind,
        gamma: usize,
        coarsest: CoarsestSolver,
    ) -> Result<Self> {
        let mut ps = Vec::with_capacity(levels);
        let (mut mx, mut my) = (nx, ny);
        for _ in 0..levels {
            ps.push(bilinear_interpolation_2d(mx, my)?);
            mx = (mx - 1) / 2;
            my = (my - 1) / 2;
        }
        Self::new(laplacian_2d(nx, ny)?, ps, smoother, gamma, coarsest)
    }

    fn coarsest_matrix(&self, solver: &CoarsestSolver) -> Result<SpdMatrix> {
        let a0 = self.a0.matrix();
        let hat = match solver {
            CoarsestSolver::Exact => return Ok(self.a0.clone()),
            CoarsestSolver::Shift(theta) => {
                if !(*theta >= 0.0 && theta.is_finite()) {
                    return Err(Error::BadParameter(format!("shift must be >= 0, got {theta}")));
                }
                a0 + self.restricted_smoother(1)?.matrix() * *theta
            }
            CoarsestSolver::Scale(c) => {
                if !(*c > 0.0 && *c <= 1.0) {
                    return Err(Error::BadParameter(format!("scale must lie in (0, 1], got {c}")));
                }
                a0 / *c
            }
            CoarsestSolver::Matrix(m) => m.clone(),
        };
        if hat.shape() != a0.shape() {
            return Err(Error::BadDimension("coarsest replacement has the wrong order".into()));
        }
        let hat = SpdMatrix::from_symmetrized(&hat)?;
        if !is_spsd_against(&(hat.matrix() - a0), norm2(a0))? {
            return Err(Error::BadParameter("A0_hat - A0 must be SPSD".into()));
        }
        Ok(hat)
    }

    /// Same levels, different coarsest solver.
    pub fn with_coarsest(&self, solver: CoarsestSolver) -> Result<Self> {
        let mut h = self.clone();
        h.coarsest = self.coarsest_matrix(&solver)?;
        Ok(h)
    }

    pub fn with_gamma(&self, gamma: usize) -> Result<Self> {
        if gamma == 0 {
            return Err(Error::BadParameter("cycle index must be at least 1".into()));
        }
        let mut h = self.clone();
        h.gamma = gamma;
        Ok(h)
    }

    /// Number of coarsenings `L`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn a(&self, k: usize) -> &SpdMatrix {
        if k == 0 {
            &self.a0
        } else {
            &self.levels[k - 1].a
        }
    }

    pub fn order(&self, k: usize) -> usize {
        self.a(k).order()
    }

    pub fn level(&self, k: usize) -> &Level {
        assert!(k >= 1 && k <= self.depth(), "level {k} outside 1..={}", self.depth());
        &self.levels[k - 1]
    }

    pub fn p(&self, k: usize) -> &Prolongation {
        &self.level(k).p
    }

    pub fn smoother(&self, k: usize) -> &Smoother {
        &self.level(k).smoother
    }

    /// `A0_hat`.
    pub fn coarsest(&self) -> &SpdMatrix {
        &self.coarsest
    }

    /// `P_k^T Mtilde_k P_k`.
    pub fn restricted_smoother(&self, k: usize) -> Result<SpdMatrix> {
        let lvl = self.level(k);
        SpdMatrix::from_symmetrized(&lvl.p.restrict(lvl.smoother.mtilde().matrix()))
    }
}
