//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use cantor_oe::bilipschitz::{
    bounded_distance_constant, decompose_unimodular, ops_product, realize_bilipschitz, swap_factors, ElementaryOp,
    DEFAULT_TOL,
};
use cantor_oe::cocycle::{
    check_cocycle_identity, check_equivariance, CocycleTable, Identity, OdometerAction, OdometerAutomorphism,
    Provenance,
};
use cantor_oe::cohomology::{
    check_det_pm1, functoriality_check, induced_map, multiplicativity_check, psi1_from_cocycle, psi1_haar,
    sample_labels, ExteriorElement, InvariantMatrix, Psi1Provenance,
};
use cantor_oe::full_group::{ad_realization_check, FullGroupElement};
use cantor_oe::gromov::{
    alpha_table, build_omega_standard, check_alpha_cocycle, check_fundamental_domain, check_gromov_inverse,
    check_lipschitz_closure, check_orbit_equality, coupled_morphisms, GromovMorphism, PairPoint,
};
use cantor_oe::group::{Group, GroupElement, WordMetric};
use cantor_oe::matrix::{int_from_rows, max_entry_distance, parse_matrix, to_integer, IntMatrix, RealMatrix};
use cantor_oe::odometer::{bijectivity_check, bijectivity_check_map, minimality_witness, ClopenSet, OdometerSpace};
use cantor_oe::report::Verdict;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verdict(v: &Verdict) -> Outcome {
    ensure(v.pass, || format!("{} failed ({} of {}): {:?}", v.check, v.failures, v.checked, v.witnesses))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Twenty unimodular matrices, alternating d = 2 and d = 3, each a product of
/// at most ten shears with |λ| ≤ 2 (two decimals) and sign flips.
fn test_matrices() -> Vec<RealMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    (0..20)
        .map(|k| {
            let d = if k % 2 == 0 { 2 } else { 3 };
            let mut a = RealMatrix::identity(d, d);
            for _ in 0..rng.gen_range(1..=10) {
                let op = if rng.gen_bool(0.2) {
                    ElementaryOp::SignFlip { coord: rng.gen_range(0..d) }
                } else {
                    let i = rng.gen_range(0..d);
                    let j = (i + rng.gen_range(1..d)) % d;
                    let factor = rng.gen_range(-200..=200) as f64 / 100.0;
                    ElementaryOp::Shear { target: i, source: j, factor }
                };
                a = op.matrix(d) * a;
            }
            a
        })
        .collect()
}

fn lattice_pairs(count: usize, dim: usize, seed: u64) -> Vec<PairPoint> {
    sample_labels(2 * dim, count, 1 << 16, seed)
        .iter()
        .map(|g| {
            let v = g.as_lattice().expect("lattice");
            (GroupElement::lattice(v[..dim].to_vec()), GroupElement::lattice(v[dim..].to_vec()))
        })
        .collect()
}

fn realization_recovery() -> Outcome {
    let n = 1u64 << 10;
    for (k, a) in test_matrices().iter().enumerate() {
        let d = a.nrows();
        let f = realize_bilipschitz(a, DEFAULT_TOL).map_err(err)?;
        let c = bounded_distance_constant(&f, a, 50);
        let samples = sample_labels(d, 256, 1 << 16, 100 + k as u64);
        let m = psi1_from_cocycle(&GromovMorphism::new(f), n, &samples, c).map_err(err)?;
        let dist = max_entry_distance(&m.matrix, a);
        ensure(dist <= c / n as f64, || format!("matrix {k}: |M - A| = {dist:e} > C/n = {:e}", c / n as f64))?;
        let tol = 10.0 * c * d as f64 / n as f64;
        ensure(check_det_pm1(&m, tol).pass, || format!("matrix {k}: det M = {} outside {tol:e}", m.det))?;
    }
    Ok(())
}

fn decomposition_reconstruction() -> Outcome {
    for (k, a) in test_matrices().iter().enumerate() {
        let ops = decompose_unimodular(a, DEFAULT_TOL).map_err(err)?;
        let e = max_entry_distance(&ops_product(a.nrows(), &ops), a);
        ensure(e <= 1e-9, || format!("matrix {k}: reconstruction error {e:e}"))?;
    }
    for d in 2..=3 {
        for k in 0..d {
            for p in 0..d {
                if k == p {
                    continue;
                }
                let mut swap = RealMatrix::identity(d, d);
                swap.swap_rows(k, p);
                let product = ops_product(d, &swap_factors(k, p));
                ensure(product == swap, || format!("swap ({k},{p}) in dimension {d}: {product}"))?;
            }
        }
        let perms: Vec<Vec<usize>> = match d {
            2 => vec![vec![0, 1], vec![1, 0]],
            _ => vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]],
        };
        for perm in perms {
            for flip in [1.0, -1.0] {
                let mut p = RealMatrix::from_fn(d, d, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
                p.row_mut(0).scale_mut(flip);
                let ops = decompose_unimodular(&p, DEFAULT_TOL).map_err(err)?;
                let product = ops_product(d, &ops);
                ensure(product == p, || format!("permutation {perm:?} (sign {flip}) is not reproduced exactly"))?;
            }
        }
    }
    Ok(())
}

fn gromov_battery() -> Outcome {
    let a = parse_matrix("1 0.5; 0.5 1.25").map_err(err)?;
    let f = realize_bilipschitz(&a, DEFAULT_TOL).map_err(err)?;
    let space = build_omega_standard(&f, 6, 6).map_err(err)?;
    let gs = space.gamma_metric().ball(2);
    verdict(&check_lipschitz_closure(&space).map_err(err)?)?;
    let table = alpha_table(&space, &gs).map_err(err)?;
    verdict(&check_alpha_cocycle(&space, &table, &gs).map_err(err)?)?;
    verdict(&check_fundamental_domain(&space, 2).map_err(err)?)?;
    for i in 0..space.slice().len() {
        let r = check_orbit_equality(&space, i, 2).map_err(err)?;
        verdict(&r.verdict)?;
        ensure(r.gamma_orbit == r.lambda_orbit, || format!("slice point {}: orbit labels differ", r.point))?;
    }
    verdict(&check_gromov_inverse(&space, &gs).map_err(err)?)
}

fn odometer_example() -> Outcome {
    let space = OdometerSpace::uniform(3, 2, 4).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let points: Vec<_> = (0..1000).map(|_| space.random_point(&mut rng)).collect();
    let ball = WordMetric::standard(Group::Lattice { dim: 2 }).ball(3);
    for rows in [[[1, 1], [0, 1]], [[0, -1], [1, 0]]] {
        let a = int_from_rows(&rows.map(|r| r.to_vec())).map_err(err)?;
        let r = bijectivity_check(&a, &space).map_err(err)?;
        ensure(r.pass && r.points == 6561, || format!("{rows:?}: not a permutation, {:?}", r.collision))?;
        let phi = OdometerAutomorphism::new(&space, a.clone()).map_err(err)?;
        verdict(&check_equivariance(&phi, &points, &ball).map_err(err)?)?;
        let expected = a.map(|x| x as f64);
        let haar = psi1_haar(&phi, 7, 0.0).map_err(err)?;
        let sampled = psi1_from_cocycle(&phi, 1 << 10, &points, 0.0).map_err(err)?;
        ensure(haar.matrix == expected && sampled.matrix == expected, || format!("{rows:?}: psi1 = {}", haar.matrix))?;
    }
    let m = minimality_witness(&space, 2).map_err(err)?;
    ensure(m.pass && m.visited == 81, || format!("minimality: {m:?}"))
}

fn full_group_algebra() -> Outcome {
    let space = OdometerSpace::uniform(2, 1, 5).map_err(err)?;
    let points = space.points().map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ts: Vec<_> = (0..50).map(|_| FullGroupElement::random(&space, &mut rng, 6)).collect();
    let id = FullGroupElement::identity(&space);
    for (k, t) in ts.iter().enumerate() {
        let u = &ts[(k + 1) % ts.len()];
        let w = &ts[(k + 2) % ts.len()];
        let tu = t.compose(u).map_err(err)?;
        let inv = t.invert();
        for x in &points {
            ensure(tu.apply(x) == t.apply(&u.apply(x)), || format!("element {k}: compose disagrees at {x:?}"))?;
            ensure(inv.apply(&t.apply(x)) == *x, || format!("element {k}: invert fails at {x:?}"))?;
        }
        let assoc = tu.compose(w).map_err(err)?.equals_pointwise(&t.compose(&u.compose(w).map_err(err)?).map_err(err)?);
        ensure(assoc.map_err(err)?, || format!("element {k}: composition is not associative"))?;
        ensure(t.compose(&inv).map_err(err)?.equals_pointwise(&id).map_err(err)?, || format!("element {k}: T T^-1 != id"))?;
        ensure(t.compose(&id).map_err(err)? == *t, || format!("element {k}: T id != T"))?;

        // point-level pieces with one label redirected onto another point's image
        let (x1, x2) = (&points[k % 32], &points[(k + 7) % 32]);
        let target = t.apply(x2);
        let pieces = points
            .iter()
            .map(|x| {
                let cyl = ClopenSet::new(&space, vec![space.cylinder_of(x, 5)]).map_err(err)?;
                let label = if x == x1 {
                    GroupElement::lattice(vec![target.values()[0] as i64 - x1.values()[0] as i64])
                } else {
                    t.label_at(x).clone()
                };
                Ok((cyl, label))
            })
            .collect::<Result<Vec<_>, String>>()?;
        ensure(FullGroupElement::make(&space, pieces).is_err(), || format!("element {k}: non-bijective pieces accepted"))?;
    }
    for g in [1i64, -1, 2, -2] {
        let r = ad_realization_check(&GroupElement::lattice(vec![g]), &ts, &space).map_err(err)?;
        ensure(r.pass, || format!("ad realization for g = {g}: {:?}", r.witness))?;
    }
    Ok(())
}

fn word_metrics() -> Outcome {
    let z2 = WordMetric::standard(Group::Lattice { dim: 2 });
    for x in -6i64..=6 {
        for y in -6i64..=6 {
            let l = z2.word_length(&GroupElement::lattice(vec![x, y])).map_err(err)?;
            ensure(l as i64 == x.abs() + y.abs(), || format!("|({x},{y})| = {l}"))?;
        }
    }
    ensure(z2.ball(6).len() == 85, || format!("|ball(6)| = {}", z2.ball(6).len()))?;
    let f2 = WordMetric::standard(Group::Free { rank: 2 });
    for k in 1..=5u32 {
        let sphere = f2.ball(k).len() - f2.ball(k - 1).len();
        ensure(sphere == 4 * 3usize.pow(k - 1), || format!("F2 sphere {k} has {sphere} elements"))?;
    }
    for metric in [&z2, &f2] {
        let ball = metric.ball(3);
        for g in &ball {
            for h in &ball {
                let d = metric.distance(g, h).map_err(err)?;
                ensure(d == metric.distance(h, g).map_err(err)?, || format!("asymmetric at {g}, {h}"))?;
                for k in &ball {
                    let via = d + metric.distance(h, k).map_err(err)?;
                    ensure(metric.distance(g, k).map_err(err)? <= via, || format!("triangle fails at {g}, {h}, {k}"))?;
                }
            }
        }
    }
    Ok(())
}

fn functoriality() -> Outcome {
    let space = OdometerSpace::uniform(3, 2, 3).map_err(err)?;
    let points = space.points().map_err(err)?;
    let gens: Vec<IntMatrix> = [[[1, 1], [0, 1]], [[0, -1], [1, 0]], [[-1, 0], [0, 1]], [[2, 1], [1, 1]]]
        .iter()
        .map(|r| int_from_rows(&r.map(|x| x.to_vec())))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    for a in &gens {
        for b in &gens {
            let theta = OdometerAutomorphism::new(&space, a.clone()).map_err(err)?;
            let eta = OdometerAutomorphism::new(&space, b.clone()).map_err(err)?;
            let r = functoriality_check(&eta, &theta, 1 << 10, &points, &points, (0.0, 0.0)).map_err(err)?;
            let exact = (b * a).map(|x| x as f64);
            ensure(r.composed.matrix == exact && r.error == 0.0, || format!("{b} * {a}: got {}", r.composed.matrix))?;
            ensure(to_integer(&r.composed.matrix).is_some(), || "composed invariant is not integral".into())?;
        }
        let id = Identity { action: OdometerAction { space: space.clone() } };
        let theta = OdometerAutomorphism::new(&space, a.clone()).map_err(err)?;
        let r = functoriality_check(&theta, &id, 16, &points, &points, (0.0, 0.0)).map_err(err)?;
        ensure(r.composed.matrix == r.eta.matrix, || "psi1(eta o id) != psi1(eta)".into())?;
    }
    for (k, (sa, sb)) in [("1 0.5; 0 1", "1 0; -0.75 1"), ("1 1.5; 0 1", "1 0; 0.25 1"), ("2 1.5; 0.6 0.95", "1 -0.4; 0 1")]
        .iter()
        .enumerate()
    {
        let a = parse_matrix(sa).map_err(err)?;
        let b = parse_matrix(sb).map_err(err)?;
        let fa = realize_bilipschitz(&a, DEFAULT_TOL).map_err(err)?;
        let fb = realize_bilipschitz(&b, DEFAULT_TOL).map_err(err)?;
        let (ca, cb) = (bounded_distance_constant(&fa, &a, 50), bounded_distance_constant(&fb, &b, 50));
        let (theta, eta) = coupled_morphisms(fa, fb);
        let pairs = lattice_pairs(256, 2, 70 + k as u64);
        let r = functoriality_check(&eta, &theta, 1 << 10, &pairs, &pairs, (cb, ca)).map_err(err)?;
        verdict(&r.verdict)?;
    }
    Ok(())
}

fn negative_controls() -> Outcome {
    let witnessed = |v: &Verdict| !v.pass && v.first_witness().is_some();

    let space = OdometerSpace::uniform(3, 2, 2).map_err(err)?;
    let points = space.points().map_err(err)?;
    let action = OdometerAction { space: space.clone() };
    let phi = OdometerAutomorphism::new(&space, int_from_rows(&[vec![1, 1], vec![0, 1]]).map_err(err)?).map_err(err)?;
    let gs = WordMetric::standard(Group::Lattice { dim: 2 }).ball(1);
    let mut table = CocycleTable::tabulate_for_identity(&phi, &points, &gs, Provenance::ConstantTheta).map_err(err)?;
    table.set(gs[1].clone(), points[4].clone(), GroupElement::lattice(vec![3, 0]));
    let v = check_cocycle_identity(&table, &action, &points, &gs).map_err(err)?;
    ensure(witnessed(&v), || "cocycle identity accepted a corrupted table".into())?;

    let a = parse_matrix("1 0.5; 0.5 1.25").map_err(err)?;
    let gromov = build_omega_standard(&realize_bilipschitz(&a, DEFAULT_TOL).map_err(err)?, 4, 4).map_err(err)?;
    let v = check_fundamental_domain(&gromov.without_slice_member(0), 2).map_err(err)?;
    ensure(witnessed(&v), || "fundamental domain accepted a slice with a missing member".into())?;

    let big = OdometerSpace::uniform(3, 2, 4).map_err(err)?;
    let m = big.modulus(0);
    let r = bijectivity_check_map(&big, |x| big.point(vec![3 * x.values()[0] % m, x.values()[1]])).map_err(err)?;
    ensure(!r.pass && r.collision.is_some(), || "bijectivity accepted x -> (3 x1, x2)".into())?;

    let bad = InvariantMatrix {
        matrix: parse_matrix("2 0; 0 1").map_err(err)?,
        det: 2.0,
        error_bound: 0.0,
        provenance: Psi1Provenance { n: 1, samples: 1, constant: 0.0, measure: "sampled".into() },
    };
    ensure(witnessed(&check_det_pm1(&bad, 1e-6)), || "det check accepted diag(2,1)".into())?;

    let mut map = induced_map(&parse_matrix("1 2 0; 0 1 3; 1 0 1").map_err(err)?).map_err(err)?;
    let corrupted = map.image_of_basis(0b011).add(&ExteriorElement::monomial(3, &[0, 2], 1.0).map_err(err)?).map_err(err)?;
    map.set_image(0b011, corrupted);
    ensure(witnessed(&multiplicativity_check(&map, 1e-12).map_err(err)?), || {
        "multiplicativity accepted a corrupted second exterior power".into()
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("realization recovery", realization_recovery),
        ("decomposition reconstruction", decomposition_reconstruction),
        ("gromov battery", gromov_battery),
        ("odometer example", odometer_example),
        ("full group algebra", full_group_algebra),
        ("word metrics", word_metrics),
        ("functoriality", functoriality),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {} ({name}): PASS [{secs:.1}s]", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s]: {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
