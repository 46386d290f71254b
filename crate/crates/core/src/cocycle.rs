//! Group actions, orbit-equivalence morphisms and their cocycles.
//!
//! A morphism from a `Γ`-action on `X` to a `Λ`-action on `Y` is a point map
//! `φ : X → Y` together with a cocycle `α : Γ × X → Λ` satisfying
//! `φ(g·x) = α(g,x)·φ(x)`. The cocycle identity
//! `α(gh,x) = α(g,h·x) α(h,x)` follows, and composition is
//! `α_{η∘θ}(g,x) = α_η(α_θ(g,x), φ_θ(x))`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::matrix::{int_inverse, int_rows, IntMatrix};
use crate::odometer::{DigitPoint, OdometerSpace};
use crate::report::Verdict;

pub trait Action {
    type Point: Clone + Ord + Debug;

    fn group(&self) -> Group;

    fn act(&self, g: &GroupElement, x: &Self::Point) -> Result<Self::Point>;
}

pub trait Morphism {
    type Source: Action;
    type Target: Action;

    fn source(&self) -> &Self::Source;

    fn target(&self) -> &Self::Target;

    fn map_point(&self, x: &<Self::Source as Action>::Point) -> Result<<Self::Target as Action>::Point>;

    fn cocycle(&self, g: &GroupElement, x: &<Self::Source as Action>::Point) -> Result<GroupElement>;
}

/// `Z^d` acting on a product odometer by translation.
#[derive(Clone, Debug, PartialEq)]
pub struct OdometerAction {
    pub space: OdometerSpace,
}

impl Action for OdometerAction {
    type Point = DigitPoint;

    fn group(&self) -> Group {
        Group::Lattice { dim: self.space.dim() }
    }

    fn act(&self, g: &GroupElement, x: &DigitPoint) -> Result<DigitPoint> {
        self.space.translate(x, g)
    }
}

/// `x ↦ A x` on an odometer, with constant cocycle `α(g,x) = A g`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdometerAutomorphism {
    action: OdometerAction,
    matrix: IntMatrix,
}

impl OdometerAutomorphism {
    pub fn new(space: &OdometerSpace, matrix: IntMatrix) -> Result<OdometerAutomorphism> {
        space.matrix_act(&matrix, &space.zero())?;
        Ok(OdometerAutomorphism { action: OdometerAction { space: space.clone() }, matrix })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> OdometerAutomorphism {
        let inv = int_inverse(&self.matrix).expect("checked unimodular at construction");
        OdometerAutomorphism { action: self.action.clone(), matrix: inv }
    }
}

pub(crate) fn matrix_times(m: &IntMatrix, g: &GroupElement) -> Result<GroupElement> {
    let v = g
        .as_lattice()
        .filter(|v| v.len() == m.ncols())
        .ok_or_else(|| Error::GroupMismatch(format!("{g} is not in Z^{}", m.ncols())))?;
    Ok(GroupElement::lattice(
        int_rows(m).iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>()).collect::<Vec<_>>(),
    ))
}

impl Morphism for OdometerAutomorphism {
    type Source = OdometerAction;
    type Target = OdometerAction;

    fn source(&self) -> &OdometerAction {
        &self.action
    }

    fn target(&self) -> &OdometerAction {
        &self.action
    }

    fn map_point(&self, x: &DigitPoint) -> Result<DigitPoint> {
        self.action.space.matrix_act(&self.matrix, x)
    }

    fn cocycle(&self, g: &GroupElement, _x: &DigitPoint) -> Result<GroupElement> {
        matrix_times(&self.matrix, g)
    }
}

/// The identity morphism; its cocycle is `α(g,x) = g`.
#[derive(Clone, Debug)]
pub struct Identity<A> {
    pub action: A,
}

impl<A: Action> Morphism for Identity<A> {
    type Source = A;
    type Target = A;

    fn source(&self) -> &A {
        &self.action
    }

    fn target(&self) -> &A {
        &self.action
    }

    fn map_point(&self, x: &A::Point) -> Result<A::Point> {
        Ok(x.clone())
    }

    fn cocycle(&self, g: &GroupElement, _x: &A::Point) -> Result<GroupElement> {
        Ok(g.clone())
    }
}

/// `η ∘ θ`: first `θ`, then `η`.
#[derive(Clone, Debug)]
pub struct Composed<T, E> {
    pub first: T,
    pub second: E,
}

pub fn compose_morphisms<T, E>(second: E, first: T) -> Composed<T, E>
where
    T: Morphism,
    E: Morphism<Source = T::Target>,
{
    Composed { first, second }
}

impl<T, E> Morphism for Composed<T, E>
where
    T: Morphism,
    E: Morphism<Source = T::Target>,
{
    type Source = T::Source;
    type Target = E::Target;

    fn source(&self) -> &T::Source {
        self.first.source()
    }

    fn target(&self) -> &E::Target {
        self.second.target()
    }

    fn map_point(&self, x: &<T::Source as Action>::Point) -> Result<<E::Target as Action>::Point> {
        self.second.map_point(&self.first.map_point(x)?)
    }

    fn cocycle(&self, g: &GroupElement, x: &<T::Source as Action>::Point) -> Result<GroupElement> {
        let inner = self.first.cocycle(g, x)?;
        self.second.cocycle(&inner, &self.first.map_point(x)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    GromovAlpha,
    GromovBeta,
    ConstantTheta,
    Composed,
}

/// A finite, exact table of cocycle values `(g, x) ↦ α(g, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleTable<P> {
    pub provenance: Provenance,
    entries: BTreeMap<(GroupElement, P), GroupElement>,
}

impl<P: Clone + Ord + Debug> CocycleTable<P> {
    pub fn new(provenance: Provenance) -> CocycleTable<P> {
        CocycleTable { provenance, entries: BTreeMap::new() }
    }

    /// Tabulates `m.cocycle(g, x)` for all given pairs.
    pub fn tabulate<M>(m: &M, pairs: impl IntoIterator<Item = (GroupElement, P)>, provenance: Provenance) -> Result<Self>
    where
        M: Morphism,
        M::Source: Action<Point = P>,
    {
        let mut t = CocycleTable::new(provenance);
        for (g, x) in pairs {
            let v = m.cocycle(&g, &x)?;
            t.entries.insert((g, x), v);
        }
        Ok(t)
    }

    /// Tabulates every pair needed to verify the cocycle identity for
    /// `g, h ∈ gs` at the given points.
    pub fn tabulate_for_identity<M>(m: &M, points: &[P], gs: &[GroupElement], provenance: Provenance) -> Result<Self>
    where
        M: Morphism,
        M::Source: Action<Point = P>,
    {
        CocycleTable::tabulate(m, identity_pairs(m.source(), points, gs)?, provenance)
    }

    pub fn get(&self, g: &GroupElement, x: &P) -> Result<&GroupElement> {
        self.entries
            .get(&(g.clone(), x.clone()))
            .ok_or_else(|| Error::Coverage(format!("no table entry for ({g}, {x:?})")))
    }

    /// Overwrites one entry; used to build corrupted tables for negative controls.
    pub fn set(&mut self, g: GroupElement, x: P, value: GroupElement) {
        self.entries.insert((g, x), value);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(GroupElement, P), &GroupElement)> {
        self.entries.iter()
    }

    pub fn points(&self) -> Vec<P> {
        let mut ps: Vec<P> = self.entries.keys().map(|(_, x)| x.clone()).collect();
        ps.dedup();
        ps.sort();
        ps.dedup();
        ps
    }
}

/// The pairs `(gh, x)`, `(g, h·x)`, `(h, x)` for all `g, h ∈ gs`.
pub fn identity_pairs<A: Action>(action: &A, points: &[A::Point], gs: &[GroupElement]) -> Result<Vec<(GroupElement, A::Point)>> {
    let mut pairs = Vec::new();
    for x in points {
        for h in gs {
            pairs.push((h.clone(), x.clone()));
            let hx = action.act(h, x)?;
            for g in gs {
                pairs.push((g.multiply(h)?, x.clone()));
                pairs.push((g.clone(), hx.clone()));
            }
        }
    }
    pairs.sort();
    pairs.dedup();
    Ok(pairs)
}

/// A morphism whose cocycle is read from a table; the point map and the
/// actions come from `base`. Missing entries are coverage errors.
pub struct TableMorphism<'a, M: Morphism> {
    pub base: &'a M,
    pub table: &'a CocycleTable<<M::Source as Action>::Point>,
}

impl<M: Morphism> Morphism for TableMorphism<'_, M> {
    type Source = M::Source;
    type Target = M::Target;

    fn source(&self) -> &M::Source {
        self.base.source()
    }

    fn target(&self) -> &M::Target {
        self.base.target()
    }

    fn map_point(&self, x: &<M::Source as Action>::Point) -> Result<<M::Target as Action>::Point> {
        self.base.map_point(x)
    }

    fn cocycle(&self, g: &GroupElement, x: &<M::Source as Action>::Point) -> Result<GroupElement> {
        self.table.get(g, x).cloned()
    }
}

pub const COCYCLE_ANCHOR: &str = "alpha(gh,x) = alpha(g,h.x) alpha(h,x); alpha(e,x) = e";

/// Exhaustive check of the cocycle identity over `g, h ∈ gs` and the given
/// points, reading values from the table.
pub fn check_cocycle_identity<A: Action>(
    table: &CocycleTable<A::Point>,
    action: &A,
    points: &[A::Point],
    gs: &[GroupElement],
) -> Result<Verdict> {
    let mut v = Verdict::new("cocycle-identity", COCYCLE_ANCHOR);
    let e = action.group().identity();
    for x in points {
        if let Ok(ex) = table.get(&e, x) {
            v.record(ex.is_identity(), || format!("alpha(e, {x:?}) = {ex}"));
        }
        for h in gs {
            let hx = action.act(h, x)?;
            let ah = table.get(h, x)?;
            for g in gs {
                let lhs = table.get(&g.multiply(h)?, x)?;
                let rhs = table.get(g, &hx)?.multiply(ah)?;
                v.record(*lhs == rhs, || format!("g={g} h={h} x={x:?}: alpha(gh,x)={lhs} but alpha(g,hx)alpha(h,x)={rhs}"));
            }
        }
    }
    Ok(v)
}

pub const EQUIVARIANCE_ANCHOR: &str = "phi(g.x) = alpha(g,x).phi(x)";

/// `φ(g·x) = α(g,x)·φ(x)` over the given points and group elements.
pub fn check_equivariance<M: Morphism>(m: &M, points: &[<M::Source as Action>::Point], gs: &[GroupElement]) -> Result<Verdict> {
    let mut v = Verdict::new("equivariance", EQUIVARIANCE_ANCHOR);
    for x in points {
        let fx = m.map_point(x)?;
        for g in gs {
            let lhs = m.map_point(&m.source().act(g, x)?)?;
            let a = m.cocycle(g, x)?;
            let rhs = m.target().act(&a, &fx)?;
            v.record(lhs == rhs, || format!("g={g} x={x:?}: phi(gx)={lhs:?} alpha(g,x).phi(x)={rhs:?}"));
        }
    }
    Ok(v)
}

pub const INVERSE_ANCHOR: &str = "phi'(phi(x)) = x; alpha'(alpha(g,x), phi(x)) = g; \
     alpha'(alpha(g,g^-1 x), alpha(g,g^-1 x)^-1 phi(x)) = g; phi(g^-1 x) = alpha(g,g^-1 x)^-1 phi(x)";

/// Checks that `inv` inverts `eta` at the level of points and cocycles.
pub fn check_inverse_identities<E, I>(
    eta: &E,
    inv: &I,
    points: &[<E::Source as Action>::Point],
    gs: &[GroupElement],
) -> Result<Verdict>
where
    E: Morphism,
    I: Morphism<Source = E::Target, Target = E::Source>,
{
    let mut v = Verdict::new("inverse-identities", INVERSE_ANCHOR);
    for x in points {
        let fx = eta.map_point(x)?;
        let back = inv.map_point(&fx)?;
        v.record(back == *x, || format!("phi'(phi({x:?})) = {back:?}"));
        for g in gs {
            let a = eta.cocycle(g, x)?;
            let r = inv.cocycle(&a, &fx)?;
            v.record(r == *g, || format!("g={g} x={x:?}: alpha'(alpha(g,x),phi(x)) = {r}"));

            let y = eta.source().act(&g.inverse(), x)?;
            let lambda = eta.cocycle(g, &y)?;
            let z = eta.target().act(&lambda.inverse(), &fx)?;
            let r = inv.cocycle(&lambda, &z)?;
            v.record(r == *g, || format!("g={g} x={x:?}: alpha'(lambda, lambda^-1 phi(x)) = {r} with lambda={lambda}"));
            let fy = eta.map_point(&y)?;
            v.record(fy == z, || format!("g={g} x={x:?}: phi(g^-1 x)={fy:?} but lambda^-1 phi(x)={z:?}"));
        }
    }
    Ok(v)
}
