use mgcert_core::hierarchy::{
    alpha_parameterized_example, bilinear_interpolation_2d, ideal_interpolation, laplacian_1d, laplacian_2d,
    linear_interpolation_1d,
};
use mgcert_core::linalg::identity;
use mgcert_core::matrix_io::load;
use mgcert_core::{
    BlockPartition, CoarsestSolver, Hierarchy, Prolongation, Smoother, SmootherKind, SpdMatrix, TwoGridSetup,
};

use crate::args::{BcChoice, CoarsestChoice, ProblemKind, RunArgs, SmootherChoice};
use crate::CliError;

/// Fine matrix, prolongation, and block partition when the problem has one.
struct Problem {
    a: SpdMatrix,
    p: Prolongation,
    partition: Option<BlockPartition>,
}

fn problem(args: &RunArgs) -> Result<Problem, CliError> {
    Ok(match args.problem {
        ProblemKind::Lap1d => Problem {
            a: laplacian_1d(args.n)?,
            p: linear_interpolation_1d(args.n)?,
            partition: None,
        },
        ProblemKind::Lap2d => Problem {
            a: laplacian_2d(args.nx, args.ny)?,
            p: bilinear_interpolation_2d(args.nx, args.ny)?,
            partition: None,
        },
        ProblemKind::Files => {
            let (Some(a), Some(p)) = (&args.a, &args.p) else {
                return Err(CliError::Config("--problem files needs --a and --p".into()));
            };
            Problem {
                a: SpdMatrix::new(load(a)?)?,
                p: Prolongation::new(load(p)?)?,
                partition: None,
            }
        }
        ProblemKind::AlphaExample => {
            let (a, part) = alpha_parameterized_example(args.alpha, args.n_f, args.n_c)?;
            let p = ideal_interpolation(&a, &part)?;
            Problem {
                a,
                p,
                partition: Some(part),
            }
        }
    })
}

fn smoother(args: &RunArgs, a: &SpdMatrix, partition: Option<&BlockPartition>) -> Result<Smoother, CliError> {
    Ok(match args.smoother {
        SmootherChoice::Jacobi => Smoother::weighted_jacobi(a, args.omega)?,
        SmootherChoice::GaussSeidel => Smoother::gauss_seidel(a)?,
        SmootherChoice::Block => {
            let part =
                partition.ok_or_else(|| CliError::Config("--smoother block needs --problem alpha-example".into()))?;
            Smoother::block_diagonal(a, part)?
        }
    })
}

/// The coarse solver requested by `--bc` and `--bc-file`. Without either,
/// alpha-example uses the embedded coarse block and everything else is exact.
fn bc_choice(args: &RunArgs) -> Result<BcChoice, CliError> {
    match (&args.bc, &args.bc_file) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --bc or --bc-file, not both".into())),
        (Some(bc), None) => Ok(bc.clone()),
        (None, Some(path)) => Ok(BcChoice::File(path.clone())),
        (None, None) if args.problem == ProblemKind::AlphaExample => Ok(BcChoice::Embedded),
        (None, None) => Ok(BcChoice::Exact),
    }
}

/// Setup with `B_c = A_c`, ignoring `--bc`.
pub fn exact_setup(args: &RunArgs) -> Result<TwoGridSetup, CliError> {
    let pr = problem(args)?;
    let s = smoother(args, &pr.a, pr.partition.as_ref())?;
    Ok(TwoGridSetup::exact(s, pr.p)?)
}

pub fn two_grid_setup(args: &RunArgs) -> Result<TwoGridSetup, CliError> {
    let pr = problem(args)?;
    let s = smoother(args, &pr.a, pr.partition.as_ref())?;
    let bc = match bc_choice(args)? {
        BcChoice::Exact => return Ok(TwoGridSetup::exact(s, pr.p)?),
        BcChoice::Embedded => {
            let part = pr
                .partition
                .as_ref()
                .ok_or_else(|| CliError::Config("--bc embedded needs --problem alpha-example".into()))?;
            let p0 = part.coarse_embedding();
            SpdMatrix::from_symmetrized(&(p0.transpose() * pr.a.matrix() * p0))?
        }
        BcChoice::ScaledIdentity(w) => SpdMatrix::new(identity(pr.p.coarse_order()) * w)?,
        BcChoice::File(path) => SpdMatrix::new(load(path)?)?,
    };
    Ok(TwoGridSetup::new(s, pr.p, bc)?)
}

/// Example setup at one `alpha`: block smoother, ideal interpolation, embedded coarse block.
pub fn alpha_setup(alpha: f64, n_f: usize, n_c: usize) -> Result<TwoGridSetup, CliError> {
    let (a, part) = alpha_parameterized_example(alpha, n_f, n_c)?;
    let s = Smoother::block_diagonal(&a, &part)?;
    let p = ideal_interpolation(&a, &part)?;
    let p0 = part.coarse_embedding();
    let bc = SpdMatrix::from_symmetrized(&(p0.transpose() * a.matrix() * p0))?;
    Ok(TwoGridSetup::new(s, p, bc)?)
}

pub fn hierarchy(args: &RunArgs) -> Result<Hierarchy, CliError> {
    let kind = match args.smoother {
        SmootherChoice::Jacobi => SmootherKind::Jacobi { omega: args.omega },
        SmootherChoice::GaussSeidel => SmootherKind::GaussSeidel,
        SmootherChoice::Block => {
            return Err(CliError::Config(
                "multilevel runs support jacobi and gauss-seidel only".into(),
            ))
        }
    };
    let coarsest = match args.coarsest {
        CoarsestChoice::Exact => CoarsestSolver::Exact,
        CoarsestChoice::Shift => CoarsestSolver::Shift(args.theta),
        CoarsestChoice::Scale => CoarsestSolver::Scale(args.scale),
    };
    Ok(match args.problem {
        ProblemKind::Lap1d => Hierarchy::poisson_1d(args.n, args.levels, kind, args.gamma, coarsest)?,
        ProblemKind::Lap2d => Hierarchy::poisson_2d(args.nx, args.ny, args.levels, kind, args.gamma, coarsest)?,
        _ => return Err(CliError::Config("multilevel runs need --problem lap1d or lap2d".into())),
    })
}
