use cantor_oe::bilipschitz::{bounded_distance_constant, realize_bilipschitz, DEFAULT_TOL};
use cantor_oe::cocycle::{check_inverse_identities, compose_morphisms, OdometerAutomorphism};
use cantor_oe::cohomology::{check_det_pm1, psi1_from_cocycle, psi1_haar, sample_labels};
use cantor_oe::gromov::{build_omega_standard, check_fundamental_domain, GromovMorphism};
use cantor_oe::group::{Group, WordMetric};
use cantor_oe::matrix::{int_from_rows, max_entry_distance, parse_matrix};
use cantor_oe::odometer::OdometerSpace;

#[test]
fn error_shrinks_with_n() {
    let a = parse_matrix("1 -1.25; 0.4 0.5").unwrap();
    let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
    let c = bounded_distance_constant(&f, &a, 50);
    let eta = GromovMorphism::new(f);
    let samples = sample_labels(2, 256, 1 << 16, 11);
    for n in [1u64 << 6, 1 << 8, 1 << 10] {
        let m = psi1_from_cocycle(&eta, n, &samples, c).unwrap();
        let e = max_entry_distance(&m.matrix, &a);
        assert!(e <= c / n as f64, "n = {n}: {e} > {}", c / n as f64);
    }
}

#[test]
fn orientation_reversing_matrix_has_det_minus_one() {
    let a = parse_matrix("0 1; 1 0.5").unwrap();
    let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
    let c = bounded_distance_constant(&f, &a, 50);
    let m = psi1_from_cocycle(&GromovMorphism::new(f), 1 << 10, &sample_labels(2, 256, 1 << 16, 12), c).unwrap();
    assert!((m.det + 1.0).abs() <= 10.0 * c * 2.0 / 1024.0);
    assert!(check_det_pm1(&m, 10.0 * c * 2.0 / 1024.0).pass);
}

#[test]
fn gromov_morphism_and_its_inverse() {
    let f = realize_bilipschitz(&parse_matrix("1 0 0.5; 0 1 0; 0.25 0 1.125").unwrap(), DEFAULT_TOL).unwrap();
    let eta = GromovMorphism::new(f);
    let points = sample_labels(3, 20, 1000, 13);
    let gs = WordMetric::standard(Group::Lattice { dim: 3 }).ball(2);
    assert!(check_inverse_identities(&eta, &eta.inverse(), &points, &gs).unwrap().pass);
}

#[test]
fn three_dimensional_fundamental_domain() {
    let f = realize_bilipschitz(&parse_matrix("1 0.5 0; 0 1 0; 0 0 1").unwrap(), DEFAULT_TOL).unwrap();
    let space = build_omega_standard(&f, 3, 3).unwrap();
    assert!(check_fundamental_domain(&space, 1).unwrap().pass);
}

#[test]
fn gl2z_generators_are_witnessed() {
    // the image of the invariant contains a generating set of GL_2(Z)
    let space = OdometerSpace::uniform(5, 2, 2).unwrap();
    for rows in [[[0, 1], [1, 0]], [[1, 1], [0, 1]], [[-1, 0], [0, 1]]] {
        let a = int_from_rows(&rows.map(|r| r.to_vec())).unwrap();
        let phi = OdometerAutomorphism::new(&space, a.clone()).unwrap();
        let m = psi1_haar(&phi, 3, 0.0).unwrap();
        assert_eq!(m.matrix, a.map(|x| x as f64));
        let back = compose_morphisms(phi.inverse(), phi.clone());
        let id = psi1_haar(&back, 3, 0.0).unwrap();
        assert_eq!(id.matrix, nalgebra::DMatrix::identity(2, 2));
    }
}

#[test]
fn invariant_matrix_json_layout() {
    let space = OdometerSpace::uniform(2, 2, 2).unwrap();
    let phi = OdometerAutomorphism::new(&space, int_from_rows(&[vec![1, 1], vec![0, 1]]).unwrap()).unwrap();
    let m = psi1_haar(&phi, 4, 0.0).unwrap();
    let v = serde_json::to_value(&m).unwrap();
    assert_eq!(v["matrix"], serde_json::json!([[1.0, 1.0], [0.0, 1.0]]));
    assert_eq!(v["det"], 1.0);
    assert_eq!(v["error_bound"], 0.0);
    assert_eq!(v["provenance"]["n"], 4);
    assert_eq!(v["provenance"]["samples"], 16);
    assert_eq!(v["provenance"]["C"], 0.0);
    assert_eq!(v["cohomology_side"], serde_json::json!([[1.0, 0.0], [1.0, 1.0]]));
}
