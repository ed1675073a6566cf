use std::path::PathBuf;

use mgcert_core::hierarchy::{bilinear_interpolation_2d, laplacian_2d};
use mgcert_core::matrix_io::{load, save};
use mgcert_core::{theorem33_bounds, Prolongation, Smoother, SpdMatrix, TwoGridSetup};

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("mgcert-{}-{name}", std::process::id()))
}

#[test]
fn bounds_survive_a_round_trip_through_files() {
    let a = laplacian_2d(7, 7).unwrap();
    let p = bilinear_interpolation_2d(7, 7).unwrap();
    let direct =
        theorem33_bounds(&TwoGridSetup::exact(Smoother::gauss_seidel(&a).unwrap(), p.clone()).unwrap()).unwrap();

    let (pa, pp) = (scratch("a.txt"), scratch("p.txt"));
    save(&pa, a.matrix()).unwrap();
    save(&pp, p.matrix()).unwrap();
    let a2 = SpdMatrix::new(load(&pa).unwrap()).unwrap();
    let p2 = Prolongation::new(load(&pp).unwrap()).unwrap();
    std::fs::remove_file(&pa).unwrap();
    std::fs::remove_file(&pp).unwrap();

    assert_eq!(a2.matrix(), a.matrix());
    assert_eq!(p2.matrix(), p.matrix());
    let loaded = theorem33_bounds(&TwoGridSetup::exact(Smoother::gauss_seidel(&a2).unwrap(), p2).unwrap()).unwrap();
    assert_eq!(loaded, direct);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load(scratch("does-not-exist.txt")).unwrap_err();
    assert!(matches!(err, mgcert_core::Error::Io(_)), "{err:?}");
}
