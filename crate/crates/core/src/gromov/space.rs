use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::seed::Seed;
use crate::cocycle::{Action, Morphism};
use crate::error::{Error, Result};
use crate::group::{bilipschitz_on_points, GeneratingSet, Group, GroupElement, WordMetric, DEFAULT_SEARCH_RADIUS};

/// A map `ψ : ball_Γ(radius) → Λ`, stored as its full value table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MapTable {
    radius: u32,
    values: BTreeMap<GroupElement, GroupElement>,
}

impl MapTable {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn values(&self) -> &BTreeMap<GroupElement, GroupElement> {
        &self.values
    }

    pub fn eval(&self, h: &GroupElement) -> Result<&GroupElement> {
        self.values
            .get(h)
            .ok_or_else(|| Error::Truncation(format!("{h} is outside the domain ball of radius {}", self.radius)))
    }

    /// The unique `h` in the domain with `ψ(h) = y`.
    pub fn preimage(&self, y: &GroupElement) -> Result<&GroupElement> {
        self.values
            .iter()
            .find(|(_, v)| *v == y)
            .map(|(h, _)| h)
            .ok_or_else(|| Error::Truncation(format!("{y} is not in the image of the truncated map")))
    }

    pub fn restrict(&self, metric: &WordMetric, radius: u32) -> Result<MapTable> {
        if radius > self.radius {
            return Err(Error::Truncation(format!("cannot extend a radius-{} table to {radius}", self.radius)));
        }
        let mut values = BTreeMap::new();
        for (h, v) in &self.values {
            if metric.word_length(h)? <= radius {
                values.insert(h.clone(), v.clone());
            }
        }
        Ok(MapTable { radius, values })
    }
}

/// Shows the radius and the values on the standard generators only; the
/// full table is available through serialization.
impl std::fmt::Debug for MapTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let near = self.values.iter().filter(|(h, _)| match h {
            GroupElement::Lattice(v) => v.iter().map(|x| x.abs()).sum::<i64>() == 1,
            GroupElement::Word(w) => w.len() == 1,
        });
        write!(f, "psi[R={}", self.radius)?;
        for (h, v) in near {
            write!(f, " {h}->{v}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for MapTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MapTable", 2)?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("values", &self.values.iter().collect::<Vec<_>>())?;
        st.end()
    }
}

/// A distinct restriction in `Ω_R`, with every `(g, k)` producing it: the
/// translate `(g, λ)φ` with `λ = φ(g⁻¹k)⁻¹`, so that `ψ(k) = e`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaEntry {
    pub table: MapTable,
    pub provenance: Vec<(GroupElement, GroupElement)>,
}

/// A member of the slice `X_R = {ψ : ψ(e) = e}`: the normalized translate
/// `h ↦ φ(g⁻¹)⁻¹ φ(g⁻¹h)` for each recorded `g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceEntry {
    pub table: MapTable,
    pub labels: Vec<GroupElement>,
}

/// Restrictions to `ball(R)` of the translates of a seed over `ball(R_t)`.
#[derive(Clone, Debug)]
pub struct TruncatedMapSpace {
    gamma: Arc<WordMetric>,
    lambda: Arc<WordMetric>,
    radius: u32,
    translate_radius: u32,
    constant: f64,
    omega: Vec<OmegaEntry>,
    slice: Vec<SliceEntry>,
}

fn eval_covering<S: Seed>(seed: &S, g: &GroupElement, radius: u32) -> Result<GroupElement> {
    seed.eval(g).map_err(|e| match e {
        Error::Undefined(x) => Error::Truncation(format!("seed undefined at {x}; it must cover ball({radius})")),
        other => other,
    })
}

/// Standard word metrics for the seed's groups, with a search budget large
/// enough for distances between images of `ball(radius)`.
pub fn standard_metrics<S: Seed>(seed: &S, radius: u32) -> Result<(Arc<WordMetric>, Arc<WordMetric>)> {
    let gamma = WordMetric::standard(seed.source_group());
    let target = seed.target_group();
    let budget = match target {
        Group::Lattice { .. } => {
            let mut reach = 0i64;
            for g in gamma.ball(radius) {
                let v = eval_covering(seed, &g, radius)?;
                reach = reach.max(v.as_lattice().expect("lattice target").iter().map(|x| x.abs()).sum());
            }
            DEFAULT_SEARCH_RADIUS.max((2 * reach + 2) as u32)
        }
        Group::Free { .. } => DEFAULT_SEARCH_RADIUS,
    };
    let lambda = WordMetric::with_budget(GeneratingSet::standard(target), budget);
    Ok((Arc::new(gamma), Arc::new(lambda)))
}

/// Builds `Ω_R` and `X_R` from a seed defined on `ball(R + R_t)`.
pub fn build_omega<S: Seed>(
    seed: &S,
    gamma: Arc<WordMetric>,
    lambda: Arc<WordMetric>,
    radius: u32,
    translate_radius: u32,
) -> Result<TruncatedMapSpace> {
    if gamma.group() != seed.source_group() || lambda.group() != seed.target_group() {
        return Err(Error::GroupMismatch("metrics do not match the seed's groups".into()));
    }
    let outer = gamma.ball(radius + translate_radius);
    let mut phi: HashMap<GroupElement, GroupElement> = HashMap::with_capacity(outer.len());
    for g in &outer {
        phi.insert(g.clone(), eval_covering(seed, g, radius + translate_radius)?);
    }
    let images: Vec<GroupElement> = outer.iter().map(|g| phi[g].clone()).collect();
    let constant = bilipschitz_on_points(&outer, &images, radius + translate_radius, f64::INFINITY, &gamma, &lambda)?
        .tightest_constant();

    let domain = gamma.ball(radius);
    let shifts = gamma.ball(translate_radius);
    let anchors = gamma.ball(radius.min(translate_radius));
    let mut omega: BTreeMap<MapTable, Vec<(GroupElement, GroupElement)>> = BTreeMap::new();
    let mut slice: BTreeMap<MapTable, Vec<GroupElement>> = BTreeMap::new();
    for g in &shifts {
        let g_inv = g.inverse();
        let shifted: Vec<&GroupElement> = domain.iter().map(|h| &phi[&g_inv.multiply(h).expect("same group")]).collect();
        for k in &anchors {
            let lam = phi[&g_inv.multiply(k)?].inverse();
            let values = domain
                .iter()
                .zip(&shifted)
                .map(|(h, v)| Ok((h.clone(), lam.multiply(v)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            let table = MapTable { radius, values };
            if k.is_identity() {
                slice.entry(table.clone()).or_default().push(g.clone());
            }
            omega.entry(table).or_default().push((g.clone(), k.clone()));
        }
    }
    let omega = omega.into_iter().map(|(table, provenance)| OmegaEntry { table, provenance }).collect();
    let mut slice: Vec<SliceEntry> = slice.into_iter().map(|(table, labels)| SliceEntry { table, labels }).collect();
    slice.sort_by(|a, b| a.labels[0].cmp(&b.labels[0]));
    Ok(TruncatedMapSpace { gamma, lambda, radius, translate_radius, constant, omega, slice })
}

/// [`build_omega`] with standard generators on both sides.
pub fn build_omega_standard<S: Seed>(seed: &S, radius: u32, translate_radius: u32) -> Result<TruncatedMapSpace> {
    let (gamma, lambda) = standard_metrics(seed, radius + translate_radius)?;
    build_omega(seed, gamma, lambda, radius, translate_radius)
}

impl TruncatedMapSpace {
    pub fn gamma_metric(&self) -> &WordMetric {
        &self.gamma
    }

    pub fn lambda_metric(&self) -> &WordMetric {
        &self.lambda
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn translate_radius(&self) -> u32 {
        self.translate_radius
    }

    /// Tightest two-sided Lipschitz constant of the seed on `ball(R + R_t)`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn omega(&self) -> &[OmegaEntry] {
        &self.omega
    }

    pub fn slice(&self) -> &[SliceEntry] {
        &self.slice
    }

    pub fn slice_tables(&self) -> Vec<MapTable> {
        self.slice.iter().map(|s| s.table.clone()).collect()
    }

    /// A copy with one slice member removed; used as a negative control.
    pub fn without_slice_member(&self, index: usize) -> TruncatedMapSpace {
        let mut copy = self.clone();
        copy.slice.remove(index);
        copy
    }

    fn length(&self, g: &GroupElement) -> Result<u32> {
        self.gamma.word_length(g)
    }

    fn table_on_ball<F>(&self, radius: u32, f: F) -> Result<MapTable>
    where
        F: Fn(&GroupElement) -> Result<GroupElement>,
    {
        let values = self.gamma.ball(radius).into_iter().map(|h| Ok((h.clone(), f(&h)?))).collect::<Result<_>>()?;
        Ok(MapTable { radius, values })
    }

    fn slack(&self, len: u32, psi: &MapTable, what: &str) -> Result<u32> {
        psi.radius
            .checked_sub(len)
            .ok_or_else(|| Error::Truncation(format!("{what} of length {len} exceeds the domain radius {}", psi.radius)))
    }

    /// `(g·ψ)(h) = ψ(g⁻¹)⁻¹ ψ(g⁻¹h)` on `ball(r − ℓ(g))`.
    pub fn gamma_act(&self, g: &GroupElement, psi: &MapTable) -> Result<MapTable> {
        let r = self.slack(self.length(g)?, psi, "group element")?;
        let g_inv = g.inverse();
        let a = psi.eval(&g_inv)?.inverse();
        self.table_on_ball(r, |h| a.multiply(psi.eval(&g_inv.multiply(h)?)?))
    }

    /// `(λ·ψ)(h) = λ ψ(k h)` with `k = ψ⁻¹(λ⁻¹)`, on `ball(r − ℓ(k))`.
    pub fn lambda_act(&self, lam: &GroupElement, psi: &MapTable) -> Result<MapTable> {
        let k = psi.preimage(&lam.inverse())?.clone();
        let r = self.slack(self.length(&k)?, psi, "preimage")?;
        self.table_on_ball(r, |h| lam.multiply(psi.eval(&k.multiply(h)?)?))
    }

    /// The raw translate `((g,e)ψ)(h) = ψ(g⁻¹h)`, which leaves the slice.
    pub fn raw_gamma(&self, g: &GroupElement, psi: &MapTable) -> Result<MapTable> {
        let r = self.slack(self.length(g)?, psi, "group element")?;
        let g_inv = g.inverse();
        self.table_on_ball(r, |h| psi.eval(&g_inv.multiply(h)?).cloned())
    }

    /// The raw translate `((e,λ)ψ)(h) = λ ψ(h)`.
    pub fn raw_lambda(&self, lam: &GroupElement, psi: &MapTable) -> Result<MapTable> {
        let values = psi.values.iter().map(|(h, v)| Ok((h.clone(), lam.multiply(v)?))).collect::<Result<_>>()?;
        Ok(MapTable { radius: psi.radius, values })
    }

    /// `α(g, ψ) = ψ(g⁻¹)⁻¹`
    pub fn alpha(&self, g: &GroupElement, psi: &MapTable) -> Result<GroupElement> {
        Ok(psi.eval(&g.inverse())?.inverse())
    }

    /// `β(λ, ψ) = (ψ⁻¹(λ⁻¹))⁻¹`
    pub fn beta(&self, lam: &GroupElement, psi: &MapTable) -> Result<GroupElement> {
        Ok(psi.preimage(&lam.inverse())?.inverse())
    }

    /// Index of the first slice member whose restriction equals `psi`.
    pub fn resolve(&self, psi: &MapTable) -> Result<Option<usize>> {
        for (i, s) in self.slice.iter().enumerate() {
            if s.table.restrict(&self.gamma, psi.radius)? == *psi {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn gamma_action(&self) -> TableGamma<'_> {
        TableGamma(self)
    }

    pub fn lambda_action(&self) -> TableLambda<'_> {
        TableLambda(self)
    }

    /// The morphism `(id, α)` from the Γ-action to the Λ-action on the slice.
    pub fn alpha_morphism(&self) -> TableAlpha<'_> {
        TableAlpha(TableGamma(self), TableLambda(self))
    }

    /// The inverse morphism `(id, β)`.
    pub fn beta_morphism(&self) -> TableBeta<'_> {
        TableBeta(TableLambda(self), TableGamma(self))
    }

    pub fn summary(&self) -> SpaceSummary {
        SpaceSummary {
            radius: self.radius,
            translate_radius: self.translate_radius,
            constant: self.constant,
            omega_size: self.omega.len(),
            slice_size: self.slice.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceSummary {
    #[serde(rename = "R")]
    pub radius: u32,
    #[serde(rename = "R_t")]
    pub translate_radius: u32,
    #[serde(rename = "C")]
    pub constant: f64,
    pub omega_size: usize,
    pub slice_size: usize,
}

impl Serialize for TruncatedMapSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TruncatedMapSpace", 5)?;
        st.serialize_field("R", &self.radius)?;
        st.serialize_field("R_t", &self.translate_radius)?;
        st.serialize_field("C", &self.constant)?;
        st.serialize_field("omega_size", &self.omega.len())?;
        st.serialize_field("slice", &self.slice)?;
        st.end()
    }
}

/// Γ acting on truncated slice maps by the normalized action.
#[derive(Clone, Copy, Debug)]
pub struct TableGamma<'a>(pub &'a TruncatedMapSpace);

/// Λ acting on truncated slice maps by the normalized action.
#[derive(Clone, Copy, Debug)]
pub struct TableLambda<'a>(pub &'a TruncatedMapSpace);

impl Action for TableGamma<'_> {
    type Point = MapTable;

    fn group(&self) -> Group {
        self.0.gamma.group()
    }

    fn act(&self, g: &GroupElement, x: &MapTable) -> Result<MapTable> {
        self.0.gamma_act(g, x)
    }
}

impl Action for TableLambda<'_> {
    type Point = MapTable;

    fn group(&self) -> Group {
        self.0.lambda.group()
    }

    fn act(&self, lam: &GroupElement, x: &MapTable) -> Result<MapTable> {
        self.0.lambda_act(lam, x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TableAlpha<'a>(TableGamma<'a>, TableLambda<'a>);

#[derive(Clone, Copy, Debug)]
pub struct TableBeta<'a>(TableLambda<'a>, TableGamma<'a>);

impl<'a> Morphism for TableAlpha<'a> {
    type Source = TableGamma<'a>;
    type Target = TableLambda<'a>;

    fn source(&self) -> &TableGamma<'a> {
        &self.0
    }

    fn target(&self) -> &TableLambda<'a> {
        &self.1
    }

    fn map_point(&self, x: &MapTable) -> Result<MapTable> {
        Ok(x.clone())
    }

    fn cocycle(&self, g: &GroupElement, x: &MapTable) -> Result<GroupElement> {
        self.0 .0.alpha(g, x)
    }
}

impl<'a> Morphism for TableBeta<'a> {
    type Source = TableLambda<'a>;
    type Target = TableGamma<'a>;

    fn source(&self) -> &TableLambda<'a> {
        &self.0
    }

    fn target(&self) -> &TableGamma<'a> {
        &self.1
    }

    fn map_point(&self, x: &MapTable) -> Result<MapTable> {
        Ok(x.clone())
    }

    fn cocycle(&self, lam: &GroupElement, x: &MapTable) -> Result<GroupElement> {
        self.0 .0.beta(lam, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilipschitz::{realize_bilipschitz, BiLipMap, DEFAULT_TOL};
    use crate::gromov::seed::FiniteMap;
    use crate::matrix::parse_matrix;

    fn z1(v: i64) -> GroupElement {
        GroupElement::lattice(vec![v])
    }

    #[test]
    fn identity_seed_on_z() {
        let space = build_omega_standard(&BiLipMap::identity(1), 2, 2).unwrap();
        assert_eq!(space.slice().len(), 1);
        let x = &space.slice()[0].table;
        assert!(x.values().iter().all(|(h, v)| h == v));
        // every Ω entry is a translate h ↦ λ + h − g
        for entry in space.omega() {
            let (g, k) = &entry.provenance[0];
            let lam = -(k.as_lattice().unwrap()[0] - g.as_lattice().unwrap()[0]);
            for (h, v) in entry.table.values() {
                assert_eq!(v.as_lattice().unwrap()[0], lam + h.as_lattice().unwrap()[0] - g.as_lattice().unwrap()[0]);
            }
        }
        assert_eq!(space.constant(), 1.0);
        let moved = space.gamma_act(&z1(1), x).unwrap();
        assert_eq!(moved, x.restrict(space.gamma_metric(), 1).unwrap());
        assert_eq!(space.alpha(&z1(2), x).unwrap(), z1(2));
        assert_eq!(space.alpha(&z1(0), x).unwrap(), z1(0));
    }

    #[test]
    fn floor_shear_seed_has_several_slice_points() {
        let a = parse_matrix("1 0.5; 0 1").unwrap();
        let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
        let space = build_omega_standard(&f, 3, 3).unwrap();
        assert!(space.slice().len() > 1);
        for s in space.slice() {
            let x = &s.table;
            assert!(x.eval(&GroupElement::lattice(vec![0, 0])).unwrap().is_identity());
            for g in space.gamma_metric().ball(2) {
                let moved = space.gamma_act(&g, x).unwrap();
                assert!(moved.eval(&GroupElement::lattice(vec![0, 0])).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn zero_translate_radius() {
        let a = parse_matrix("1 0.5; 0 1").unwrap();
        let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
        let space = build_omega_standard(&f, 3, 0).unwrap();
        assert_eq!(space.omega().len(), 1);
        let expected: Vec<_> = space.gamma_metric().ball(3).into_iter().map(|g| f.eval(&g).unwrap()).collect();
        assert_eq!(space.omega()[0].table.values().values().cloned().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn seed_must_cover_the_outer_ball() {
        let metric = WordMetric::standard(Group::Lattice { dim: 1 });
        let small = FiniteMap::identity(&metric, 3);
        assert!(matches!(build_omega_standard(&small, 2, 2), Err(Error::Truncation(_))));
        assert!(build_omega_standard(&small, 2, 1).is_ok());
    }

    #[test]
    fn lambda_act_examples() {
        let space = build_omega_standard(&BiLipMap::identity(1), 3, 3).unwrap();
        let x = &space.slice()[0].table;
        assert_eq!(space.lambda_act(&z1(0), x).unwrap(), *x);
        // for the identity seed, λ·x and g·x agree when λ = α(g, x)
        for g in [z1(1), z1(-2)] {
            let lam = space.alpha(&g, x).unwrap();
            assert_eq!(space.lambda_act(&lam, x).unwrap(), space.gamma_act(&g, x).unwrap());
        }
        assert!(matches!(space.lambda_act(&z1(9), x), Err(Error::Truncation(_))));
        assert!(matches!(space.gamma_act(&z1(4), x), Err(Error::Truncation(_))));
    }

    #[test]
    fn omega_grows_with_translate_radius() {
        let a = parse_matrix("1 0.5; 0.5 1.25").unwrap();
        let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|rt| build_omega_standard(&f, 3, rt).unwrap().omega().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
    }

    #[test]
    fn free_group_identity_seed() {
        let metric = WordMetric::standard(Group::Free { rank: 2 });
        let seed = FiniteMap::identity(&metric, 3);
        let space = build_omega_standard(&seed, 2, 1).unwrap();
        assert_eq!(space.slice().len(), 1);
        assert_eq!(space.constant(), 1.0);
    }

    #[test]
    fn serializes_with_radii() {
        let space = build_omega_standard(&BiLipMap::identity(1), 1, 1).unwrap();
        let json = serde_json::to_value(&space).unwrap();
        assert_eq!(json["R"], 1);
        assert_eq!(json["R_t"], 1);
        assert_eq!(json["slice"][0]["table"]["values"][0], serde_json::json!([[-1], [-1]]));
    }
}
