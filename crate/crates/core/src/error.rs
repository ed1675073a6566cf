use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e} exceeds {tol:.1e} relative)")]
    NonSymmetric { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive definite: {0}")]
    NotSpd(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("A^(1/2) E A^(-1/2) is not symmetric (asymmetry {asymmetry:.3e}); iteration matrix is mis-built")]
    SimilarityNotSymmetric { asymmetry: f64 },

    #[error("smoother is not A-convergent: lambda_min(M + M^T - A) = {lambda_min:.6e}")]
    NotAConvergent { lambda_min: f64 },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("cross-check `{check}` failed: residual {residual:.3e} > tolerance {tol:.1e}")]
    CrossCheckFailed {
        check: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("degenerate deviation pencil: 1 + lambda = {denominator:.6e} is not positive")]
    DegeneratePencil { denominator: f64 },

    #[error("outside the admissible range of the bounds: {0}")]
    OutOfTheoryRange(String),

    #[error("nontrivial case violated: need 0 < sigma_L = {sigma_l:.6e} < 1 - eps_L = {upper:.6e}")]
    NontrivialCaseViolated { sigma_l: f64, upper: f64 },

    #[error("fixed-point bracket has no sign change: F(lo) = {f_lo:.3e}, F(hi) = {f_hi:.3e}")]
    BadBracket { f_lo: f64, f_hi: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
