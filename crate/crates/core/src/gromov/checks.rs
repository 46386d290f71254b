use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::space::{MapTable, TruncatedMapSpace};
use crate::cocycle::{check_cocycle_identity, check_inverse_identities, CocycleTable, Provenance};
use crate::error::{Error, Result};
use crate::group::{bilipschitz_on_points, Group, GroupElement};
use crate::odometer::{DigitPoint, OdometerSpace};
use crate::report::{Coverage, Verdict};

fn coverage(space: &TruncatedMapSpace, window: u32) -> Coverage {
    Coverage { radius: space.radius(), translate_radius: space.translate_radius(), window }
}

/// Every map in `Ω_R` is `C`-bi-Lipschitz on `ball(R)`, with `C` the seed
/// constant.
pub fn check_lipschitz_closure(space: &TruncatedMapSpace) -> Result<Verdict> {
    let mut v = Verdict::new("lipschitz-closure", "C^-1 d(g,h) <= d(psi(g),psi(h)) <= C d(g,h) for psi in Omega")
        .with_coverage(coverage(space, 0));
    let domain = space.gamma_metric().ball(space.radius());
    for entry in space.omega() {
        let images: Vec<GroupElement> = domain.iter().map(|h| entry.table.eval(h).cloned()).collect::<Result<_>>()?;
        let r = bilipschitz_on_points(
            &domain,
            &images,
            space.radius(),
            space.constant(),
            space.gamma_metric(),
            space.lambda_metric(),
        )?;
        v.record(r.pass, || format!("translate {:?}: {:?}", entry.provenance[0], r.witness));
    }
    Ok(v)
}

/// `(gh)·ψ = g·(h·ψ)` on the common domain, for `g, h ∈ gs` and `ψ ∈ X_R`.
pub fn check_gamma_action_law(space: &TruncatedMapSpace, gs: &[GroupElement]) -> Result<Verdict> {
    let mut v = Verdict::new("gamma-action-law", "(gh).psi = g.(h.psi)").with_coverage(coverage(space, 0));
    let metric = space.gamma_metric();
    for x in space.slice() {
        for h in gs {
            let hx = space.gamma_act(h, &x.table)?;
            for g in gs {
                let lhs = space.gamma_act(&g.multiply(h)?, &x.table)?;
                let rhs = space.gamma_act(g, &hx)?;
                let r = lhs.radius().min(rhs.radius());
                let ok = lhs.restrict(metric, r)? == rhs.restrict(metric, r)?;
                v.record(ok, || format!("g={g} h={h} on slice point {}", x.labels[0]));
            }
        }
    }
    Ok(v)
}

/// The α cocycle tabulated on every pair needed for the cocycle identity over
/// `gs` at every slice point.
pub fn alpha_table(space: &TruncatedMapSpace, gs: &[GroupElement]) -> Result<CocycleTable<MapTable>> {
    CocycleTable::tabulate_for_identity(&space.alpha_morphism(), &space.slice_tables(), gs, Provenance::GromovAlpha)
}

pub fn beta_table(space: &TruncatedMapSpace, lambdas: &[GroupElement]) -> Result<CocycleTable<MapTable>> {
    CocycleTable::tabulate_for_identity(&space.beta_morphism(), &space.slice_tables(), lambdas, Provenance::GromovBeta)
}

pub fn check_alpha_cocycle(space: &TruncatedMapSpace, table: &CocycleTable<MapTable>, gs: &[GroupElement]) -> Result<Verdict> {
    let v = check_cocycle_identity(table, &space.gamma_action(), &space.slice_tables(), gs)?;
    Ok(v.with_coverage(coverage(space, 0)))
}

/// The inverse identities between `(id, α)` and `(id, β)` over `gs` at every
/// slice point.
pub fn check_gromov_inverse(space: &TruncatedMapSpace, gs: &[GroupElement]) -> Result<Verdict> {
    let v = check_inverse_identities(&space.alpha_morphism(), &space.beta_morphism(), &space.slice_tables(), gs)?;
    Ok(v.with_coverage(coverage(space, 0)))
}

fn window_bounds(space: &TruncatedMapSpace, window: u32) -> Result<u32> {
    if window > space.radius() || window > space.translate_radius() {
        return Err(Error::Coverage(format!(
            "window {window} exceeds the truncation (R = {}, R_t = {})",
            space.radius(),
            space.translate_radius()
        )));
    }
    Ok((space.constant() * window as f64 + 1e-9).floor() as u32)
}

/// For every `ψ ∈ Ω_R` produced by a translate `(g, λ)φ` with
/// `ℓ(g) + W ≤ R_t` and normalization point `k` with `ℓ(k) ≤ W`, the raw
/// Γ-orbit `{(h,e)ψ : ℓ(h) ≤ W}` meets `X_R` exactly once (compared on
/// `ball(R − W)`), and so does the raw Λ-orbit `{(e,λ)ψ : ℓ(λ) ≤ ⌊C W⌋}`.
pub fn check_fundamental_domain(space: &TruncatedMapSpace, window: u32) -> Result<Verdict> {
    let lambda_window = window_bounds(space, window)?;
    let mut v = Verdict::new(
        "fundamental-domain",
        "X = {psi : psi(e) = e} meets every Gamma-orbit and every Lambda-orbit in Omega exactly once",
    )
    .with_coverage(coverage(space, window));
    let inner = space.radius() - window;
    let gamma = space.gamma_metric();
    let slice_inner: HashSet<MapTable> =
        space.slice().iter().map(|s| s.table.restrict(gamma, inner)).collect::<Result<_>>()?;
    let slice_full: HashSet<&MapTable> = space.slice().iter().map(|s| &s.table).collect();
    let gs = gamma.ball(window);
    let lambdas = space.lambda_metric().ball(lambda_window);

    let mut interior = 0;
    for entry in space.omega() {
        let is_interior = entry.provenance.iter().any(|(g, k)| {
            let (lg, lk) = (gamma.word_length(g), gamma.word_length(k));
            matches!((lg, lk), (Ok(lg), Ok(lk)) if lg + window <= space.translate_radius() && lk <= window)
        });
        if !is_interior {
            continue;
        }
        interior += 1;
        let mut gamma_hits = Vec::new();
        for g in &gs {
            let moved = space.raw_gamma(g, &entry.table)?.restrict(gamma, inner)?;
            if slice_inner.contains(&moved) {
                gamma_hits.push(g.clone());
            }
        }
        let mut lambda_hits = Vec::new();
        for lam in &lambdas {
            if slice_full.contains(&space.raw_lambda(lam, &entry.table)?) {
                lambda_hits.push(lam.clone());
            }
        }
        let origin = &entry.provenance[0];
        v.record(gamma_hits.len() == 1, || {
            format!("Gamma-orbit of translate {origin:?} meets the slice {} times: {gamma_hits:?}", gamma_hits.len())
        });
        v.record(lambda_hits.len() == 1, || {
            format!("Lambda-orbit of translate {origin:?} meets the slice {} times: {lambda_hits:?}", lambda_hits.len())
        });
    }
    if interior == 0 {
        return Err(Error::Coverage("no map of Omega lies inside the window".into()));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub point: GroupElement,
    /// Slice members matching `{g·x : ℓ(g) ≤ W}` on `ball(R − W)`, by label.
    pub gamma_orbit: Vec<GroupElement>,
    /// Slice members matching the admissible `{λ·x}`, by label.
    pub lambda_orbit: Vec<GroupElement>,
    pub verdict: Verdict,
}

/// `Γ·x = Λ·x` inside the window: the restrictions to `ball(R − W)` of
/// `{g·x : ℓ(g) ≤ W}` and of `{λ·x : ℓ(x⁻¹(λ⁻¹)) ≤ W}` coincide, and
/// `β(α(g,x), x) = g`.
pub fn check_orbit_equality(space: &TruncatedMapSpace, index: usize, window: u32) -> Result<OrbitReport> {
    let lambda_window = window_bounds(space, window)?;
    let x = &space
        .slice()
        .get(index)
        .ok_or_else(|| Error::Invalid(format!("no slice point {index}")))?
        .table;
    let gamma = space.gamma_metric();
    let inner = space.radius() - window;
    let mut v = Verdict::new("orbit-equality", "Gamma.x = Lambda.x; beta(alpha(g,x),x) = g")
        .with_coverage(coverage(space, window));

    let mut gamma_set = BTreeSet::new();
    for g in gamma.ball(window) {
        gamma_set.insert(space.gamma_act(&g, x)?.restrict(gamma, inner)?);
        let lam = space.alpha(&g, x)?;
        let back = space.beta(&lam, x)?;
        v.record(back == g, || format!("beta(alpha({g}, x), x) = {back}"));
    }
    let mut lambda_set = BTreeSet::new();
    for lam in space.lambda_metric().ball(lambda_window) {
        let k = match x.preimage(&lam.inverse()) {
            Ok(k) => k,
            Err(_) => continue,
        };
        if gamma.word_length(k)? > window {
            continue;
        }
        lambda_set.insert(space.lambda_act(&lam, x)?.restrict(gamma, inner)?);
    }
    v.record(gamma_set == lambda_set, || {
        format!("orbit slices differ: {} Gamma-translates vs {} Lambda-translates", gamma_set.len(), lambda_set.len())
    });
    let labels = |set: &BTreeSet<MapTable>| -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        for t in set {
            if let Some(i) = space.resolve(t)? {
                out.push(space.slice()[i].labels[0].clone());
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    };
    Ok(OrbitReport {
        point: space.slice()[index].labels[0].clone(),
        gamma_orbit: labels(&gamma_set)?,
        lambda_orbit: labels(&lambda_set)?,
        verdict: v,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreenessReport {
    pub window: u32,
    pub pairs_checked: u64,
    /// `(g, ψ)` with `g ≠ e` and `g·ψ = ψ` on the common domain, before the product.
    pub fixed_before: u64,
    /// Fixed pairs of the diagonal action on `X_R × Y`.
    pub fixed_after: u64,
    pub verdict: Verdict,
}

fn concat(a: &GroupElement, b: &GroupElement) -> Result<Vec<i64>> {
    match (a.as_lattice(), b.as_lattice()) {
        (Some(u), Some(v)) => Ok(u.iter().chain(v).copied().collect()),
        _ => Err(Error::GroupMismatch("freeness forcing needs lattice groups".into())),
    }
}

/// The diagonal actions on `X_R × Y`, with `Y` an odometer for
/// `Z^{d_Γ + d_Λ}`:
/// `g·(ψ, y) = (g·ψ, y + (g, α(g,ψ)))` and `λ·(ψ, y) = (λ·ψ, y + (β(λ,ψ), λ))`.
/// Counts fixed pairs for nonidentity elements of the window balls, before
/// and after taking the product.
pub fn force_freeness(
    space: &TruncatedMapSpace,
    odometer: &OdometerSpace,
    window: u32,
    points: &[DigitPoint],
) -> Result<FreenessReport> {
    let (dg, dl) = match (space.gamma_metric().group(), space.lambda_metric().group()) {
        (Group::Lattice { dim: a }, Group::Lattice { dim: b }) => (a, b),
        _ => return Err(Error::GroupMismatch("freeness forcing needs lattice groups".into())),
    };
    if odometer.dim() != dg + dl {
        return Err(Error::GroupMismatch(format!("odometer must have dimension {}", dg + dl)));
    }
    let mut v = Verdict::new("freeness", "the diagonal actions on Omega x Y are free").with_coverage(coverage(space, window));
    let gamma = space.gamma_metric();
    let mut before = 0;
    let mut after = 0;
    let mut checked = 0;
    for x in space.slice() {
        let psi = &x.table;
        for g in gamma.ball(window).iter().filter(|g| !g.is_identity()) {
            let moved = space.gamma_act(g, psi)?;
            let fixed = moved == psi.restrict(gamma, moved.radius())?;
            before += fixed as u64;
            let shift = concat(g, &space.alpha(g, psi)?)?;
            for y in points {
                checked += 1;
                let still = fixed && odometer.add(y, &shift)? == *y;
                after += still as u64;
                v.record(!still, || format!("g={g} fixes ({}, {y:?})", x.labels[0]));
            }
        }
        for lam in space.lambda_metric().ball(window).iter().filter(|l| !l.is_identity()) {
            let moved = match space.lambda_act(lam, psi) {
                Ok(m) => m,
                Err(Error::Truncation(_)) => continue,
                Err(e) => return Err(e),
            };
            let fixed = moved == psi.restrict(gamma, moved.radius())?;
            before += fixed as u64;
            let shift = concat(&space.beta(lam, psi)?, lam)?;
            for y in points {
                checked += 1;
                let still = fixed && odometer.add(y, &shift)? == *y;
                after += still as u64;
                v.record(!still, || format!("lambda={lam} fixes ({}, {y:?})", x.labels[0]));
            }
        }
    }
    Ok(FreenessReport { window, pairs_checked: checked, fixed_before: before, fixed_after: after, verdict: v })
}
