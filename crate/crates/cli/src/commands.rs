use anyhow::{bail, Context, Result};
use cantor_oe::bilipschitz::{distance_profile, injectivity_check_on_box, realize_bilipschitz};
use cantor_oe::cocycle::{check_cocycle_identity, check_equivariance, CocycleTable, Morphism, OdometerAutomorphism, Provenance};
use cantor_oe::cohomology::{check_det_pm1, functoriality_check, psi1_from_cocycle, psi1_haar, sample_labels};
use cantor_oe::full_group::{ad_realization_check, FullGroupElement};
use cantor_oe::gromov::{
    alpha_table, build_omega_standard, check_alpha_cocycle, check_fundamental_domain, check_gamma_action_law,
    check_gromov_inverse, check_lipschitz_closure, check_orbit_equality, coupled_morphisms, force_freeness,
    GromovMorphism, PairPoint, TruncatedMapSpace,
};
use cantor_oe::group::{Group, GroupElement, WordMetric};
use cantor_oe::matrix::{int_rows, max_entry_distance, parse_matrix, rows, to_integer, IntMatrix, RealMatrix};
use cantor_oe::odometer::{bijectivity_check, haar_invariance_check, minimality_witness, OdometerSpace};
use cantor_oe::report::{Verdict, SCHEMA_VERSION};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Corruption, GromovArgs, Mode, OdometerArgs, PsiArgs, RealizeArgs};

/// Half-width of the box from which sample labels are drawn.
const SAMPLE_BOX: i64 = 1 << 16;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: Value,
    pub pass: bool,
    pub checks: Vec<Verdict>,
    pub details: Value,
}

impl Report {
    fn new(command: &'static str, config: &impl Serialize, checks: Vec<Verdict>, details: Value) -> Result<Report> {
        Ok(Report {
            schema_version: SCHEMA_VERSION,
            command,
            config: serde_json::to_value(config)?,
            pass: checks.iter().all(|c| c.pass),
            checks,
            details,
        })
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.pass { "PASS" } else { "FAIL" });
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("  {status} {} ({} checked)\n", c.check, c.checked));
            if let Some(w) = c.first_witness() {
                out.push_str(&format!("       {w}\n"));
            }
        }
        out
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) {
        bail!("config: {name} must be positive");
    }
    Ok(())
}

fn check_nonzero(name: &str, x: u64) -> Result<()> {
    if x == 0 {
        bail!("config: {name} must be at least 1");
    }
    Ok(())
}

fn matrix_arg(s: &str) -> Result<RealMatrix> {
    parse_matrix(s).with_context(|| format!("config: --matrix {s:?}"))
}

fn integer_matrix_arg(s: &str) -> Result<IntMatrix> {
    match to_integer(&matrix_arg(s)?) {
        Some(m) => Ok(m),
        None => bail!("config: --matrix {s:?} must have integer entries"),
    }
}

fn single(check: &str, anchor: &str, ok: bool, witness: impl FnOnce() -> String) -> Verdict {
    let mut v = Verdict::new(check, anchor);
    v.record(ok, witness);
    v
}

/// A check that could not run (usually a truncation too small for it).
fn errored(check: &str, e: impl std::fmt::Display) -> Verdict {
    let mut v = Verdict::new(check, "");
    v.fail(format!("error: {e}"));
    v
}

pub fn realize(args: &RealizeArgs) -> Result<Report> {
    check_positive("--tol", args.tol)?;
    check_nonzero("--n", args.n)?;
    check_nonzero("--samples", args.samples as u64)?;
    let a = matrix_arg(&args.matrix)?;
    if a.nrows() != a.ncols() {
        bail!("config: --matrix must be square");
    }
    let det = a.determinant();
    if (det.abs() - 1.0).abs() > args.tol {
        bail!("precondition: det A = {det} is not ±1");
    }
    let d = a.nrows();
    let f = realize_bilipschitz(&a, args.tol).context("decompose")?;
    let profile = distance_profile(&f, &a);
    let c = profile.last().map(|p| p.constant).unwrap_or(0.0);
    let injective = injectivity_check_on_box(&f, 10);

    let eta = GromovMorphism::new(f.clone());
    let samples = sample_labels(d, args.samples, SAMPLE_BOX, args.seed);
    let gs = WordMetric::standard(Group::Lattice { dim: d }).ball(1);
    let few = &samples[..samples.len().min(16)];
    let table = CocycleTable::tabulate_for_identity(&eta, few, &gs, Provenance::GromovAlpha).context("gromov cocycle")?;
    let cocycle = check_cocycle_identity(&table, eta.source(), few, &gs)
        .context("gromov cocycle")?;

    let m = psi1_from_cocycle(&eta, args.n, &samples, c).context("psi1")?;
    let error = max_entry_distance(&m.matrix, &a);
    let bound = m.error_bound;
    let recovery = single("recovery", "|alpha(g,x) - A g| <= C  =>  |psi1 - A| <= C/n", error <= bound, || {
        format!("|M - A| = {error:e} > C/n = {bound:e}")
    });
    let det_tol = 10.0 * c * d as f64 / args.n as f64;
    let checks = vec![
        single("injectivity", "f_A is injective", injective.pass, || format!("{:?}", injective.witness)),
        cocycle,
        recovery,
        check_det_pm1(&m, det_tol),
    ];
    let details = json!({
        "A": rows(&a),
        "factors": f.ops().iter().map(|op| op.to_string()).collect::<Vec<_>>(),
        "C": c,
        "distance_profile": profile,
        "invariant": m,
        "error": error,
        "det_tolerance": det_tol,
    });
    Report::new("realize", args, checks, details)
}

fn run_or_error(check: &str, r: cantor_oe::Result<Verdict>) -> Verdict {
    r.unwrap_or_else(|e| errored(check, e))
}

pub fn gromov_check(args: &GromovArgs) -> Result<Report> {
    check_positive("--tol", args.tol)?;
    let a = matrix_arg(&args.matrix)?;
    let f = realize_bilipschitz(&a, args.tol).context("realize")?;
    let d = f.dim();
    let rt = args.translate_radius.unwrap_or(args.radius);
    let mut space: TruncatedMapSpace = build_omega_standard(&f, args.radius, rt).context("build omega")?;
    if args.corrupt == Some(Corruption::Slice) {
        if space.slice().is_empty() {
            bail!("config: the slice is empty, nothing to corrupt");
        }
        space = space.without_slice_member(0);
    }
    let gs = space.gamma_metric().ball(args.window);
    let mut checks = vec![
        run_or_error("lipschitz-closure", check_lipschitz_closure(&space)),
        run_or_error("gamma-action-law", check_gamma_action_law(&space, &gs)),
    ];
    checks.push(match alpha_table(&space, &gs) {
        Ok(mut table) => {
            if args.corrupt == Some(Corruption::AlphaTable) {
                if let (Some(g), Some(x)) = (gs.iter().find(|g| !g.is_identity()), space.slice().first()) {
                    let wrong = GroupElement::lattice(vec![5; d]);
                    table.set(g.clone(), x.table.clone(), wrong);
                }
            }
            run_or_error("cocycle-identity", check_alpha_cocycle(&space, &table, &gs))
        }
        Err(e) => errored("cocycle-identity", e),
    });
    checks.push(run_or_error("fundamental-domain", check_fundamental_domain(&space, args.window)));

    let mut orbit: Option<Verdict> = None;
    for i in 0..space.slice().len() {
        match check_orbit_equality(&space, i, args.window) {
            Ok(r) => {
                let v = orbit.get_or_insert_with(|| Verdict::new("orbit-equality", &r.verdict.anchor));
                let same = r.gamma_orbit == r.lambda_orbit;
                v.record(r.verdict.pass && same, || {
                    format!("slice point {}: {:?}", r.point, r.verdict.first_witness().unwrap_or("orbit labels differ"))
                });
            }
            Err(e) => {
                orbit = Some(errored("orbit-equality", e));
                break;
            }
        }
    }
    checks.extend(orbit);
    checks.push(run_or_error("inverse-identities", check_gromov_inverse(&space, &gs)));

    let odometer = OdometerSpace::uniform(args.p, 2 * d, args.depth).context("config: freeness odometer")?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let points: Vec<_> = (0..args.samples).map(|_| odometer.random_point(&mut rng)).collect();
    let freeness = force_freeness(&space, &odometer, args.window, &points);
    let freeness_details = match &freeness {
        Ok(r) => json!({ "pairs_checked": r.pairs_checked, "fixed_before": r.fixed_before, "fixed_after": r.fixed_after }),
        Err(_) => Value::Null,
    };
    checks.push(match freeness {
        Ok(r) => r.verdict,
        Err(e) => errored("freeness", e),
    });
    let details = json!({
        "seed_factors": f.ops().iter().map(|op| op.to_string()).collect::<Vec<_>>(),
        "space": space.summary(),
        "freeness": freeness_details,
    });
    Report::new("gromov-check", args, checks, details)
}

pub fn odometer(args: &OdometerArgs) -> Result<Report> {
    let a = integer_matrix_arg(&args.matrix)?;
    let d = a.nrows();
    let space = OdometerSpace::uniform(args.p, d, args.depth).context("config")?;
    let phi = OdometerAutomorphism::new(&space, a.clone()).context("precondition")?;
    let k = args.depth.min(2);

    let bij = bijectivity_check(&a, &space).context("bijectivity")?;
    let bijectivity = single("bijectivity", "x -> A x permutes the depth-N points", bij.pass, || {
        format!("{:?}", bij.collision)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let points: Vec<_> = (0..args.samples).map(|_| space.random_point(&mut rng)).collect();
    let ball = WordMetric::standard(Group::Lattice { dim: d }).ball(args.radius);
    let equivariance = check_equivariance(&phi, &points, &ball).context("equivariance")?;
    let min = minimality_witness(&space, k).context("minimality")?;
    let minimality = single("minimality", "the orbit of 0 meets every depth-k cylinder", min.pass, || {
        format!("{} of {} cylinders visited", min.visited, min.cylinders)
    });
    let haar = haar_invariance_check(&a, &space, k).context("haar invariance")?;

    let elements: Vec<_> = (0..10).map(|_| FullGroupElement::random(&space, &mut rng, 6)).collect();
    let mut ad = Verdict::new("ad-realization", "g T g^-1 (x + g) = T(x) + g");
    for i in 0..d {
        for s in [1, -1] {
            let mut v = vec![0; d];
            v[i] = s;
            let g = GroupElement::lattice(v);
            let r = ad_realization_check(&g, &elements, &space).context("ad realization")?;
            ad.record(r.pass, || format!("g = {g}: {:?}", r.witness));
        }
    }
    let invariant = psi1_haar(&phi, 1 << 10, 0.0).context("psi1")?;
    let expected = a.map(|x| x as f64);
    let constant = single("constant-invariant", "psi1 of x -> A x is A", invariant.matrix == expected, || {
        format!("psi1 = {:?}", rows(&invariant.matrix))
    });
    let checks = vec![bijectivity, equivariance, minimality, haar, ad, constant];
    let details = json!({
        "A": int_rows(&a),
        "points": space.point_count().to_string(),
        "minimality": min,
        "invariant": invariant,
    });
    Report::new("odometer", args, checks, details)
}

pub fn psi_functoriality(args: &PsiArgs) -> Result<Report> {
    check_positive("--tol", args.tol)?;
    check_nonzero("--n", args.n)?;
    check_nonzero("--samples", args.samples as u64)?;
    if args.matrix.len() != 2 {
        bail!("config: give exactly two --matrix values (theta, then eta)");
    }
    let report = match args.mode {
        Mode::Constant => {
            let a = integer_matrix_arg(&args.matrix[0])?;
            let b = integer_matrix_arg(&args.matrix[1])?;
            if a.nrows() != b.nrows() {
                bail!("config: the matrices have different sizes");
            }
            let space = OdometerSpace::uniform(args.p, a.nrows(), args.depth).context("config")?;
            let theta = OdometerAutomorphism::new(&space, a).context("precondition: theta")?;
            let eta = OdometerAutomorphism::new(&space, b).context("precondition: eta")?;
            let points = space.points().context("config")?;
            functoriality_check(&eta, &theta, args.n, &points, &points, (0.0, 0.0)).context("psi1")?
        }
        Mode::Realized => {
            let a = matrix_arg(&args.matrix[0])?;
            let b = matrix_arg(&args.matrix[1])?;
            if a.nrows() != b.nrows() {
                bail!("config: the matrices have different sizes");
            }
            let fa = realize_bilipschitz(&a, args.tol).context("realize theta")?;
            let fb = realize_bilipschitz(&b, args.tol).context("realize eta")?;
            let ca = cantor_oe::bilipschitz::bounded_distance_constant(&fa, &a, 50);
            let cb = cantor_oe::bilipschitz::bounded_distance_constant(&fb, &b, 50);
            let d = a.nrows();
            let pairs: Vec<PairPoint> = sample_labels(2 * d, args.samples, SAMPLE_BOX, args.seed)
                .iter()
                .map(|g| {
                    let v = g.as_lattice().expect("lattice labels");
                    (GroupElement::lattice(v[..d].to_vec()), GroupElement::lattice(v[d..].to_vec()))
                })
                .collect();
            let (theta, eta) = coupled_morphisms(fa, fb);
            functoriality_check(&eta, &theta, args.n, &pairs, &pairs, (cb, ca)).context("psi1")?
        }
    };
    let checks = vec![report.verdict.clone()];
    let details = serde_json::to_value(&report)?;
    Report::new("psi-functoriality", args, checks, details)
}
