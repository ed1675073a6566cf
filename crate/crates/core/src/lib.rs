//! Dense two-grid and multigrid convergence analysis.
//!
//! Builds exact and inexact two-grid operators and multigrid error matrices
//! explicitly, computes the spectral quantities behind two-sided convergence
//! bounds, and checks each bound against a direct eigenvalue computation.
//! Everything is dense and meant for problems up to a few hundred unknowns.
//!
//! ```
//! use mgcert_core::{Smoother, TwoGridSetup, theorem33_bounds};
//! use mgcert_core::hierarchy::{laplacian_1d, linear_interpolation_1d};
//!
//! let a = laplacian_1d(7).unwrap();
//! let s = Smoother::weighted_jacobi(&a, 2.0 / 3.0).unwrap();
//! let p = linear_interpolation_1d(7).unwrap();
//! let report = theorem33_bounds(&TwoGridSetup::exact(s, p).unwrap()).unwrap();
//! assert!((report.upper - report.lower).abs() < 1e-10);
//! ```

// `!(x > t)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hierarchy;
pub mod linalg;
pub mod matrix_io;
pub mod multigrid;
pub mod rng;
pub mod smoother;
pub mod suite;
pub mod twogrid;

pub use error::{Error, Result};
pub use hierarchy::{BlockPartition, CoarsestSolver, Hierarchy, Prolongation};
pub use linalg::{DenseMatrix, SpdMatrix, Spectrum};
pub use multigrid::{theorem42_certify, Certification, CycleEstimates, FixedPointResult, MgLevelQuantities};
pub use rng::SplitMix64;
pub use smoother::{Smoother, SmootherKind};
pub use twogrid::{theorem33_bounds, BoundsCase, BoundsReport, SpectralQuantities, TwoGridOperators, TwoGridSetup};
