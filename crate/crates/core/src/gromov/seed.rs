use std::collections::BTreeMap;

use crate::bilipschitz::BiLipMap;
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement, WordMetric};

/// An injective map `φ : Γ → Λ` with a computable partial inverse.
pub trait Seed {
    fn source_group(&self) -> Group;

    fn target_group(&self) -> Group;

    fn eval(&self, g: &GroupElement) -> Result<GroupElement>;

    /// The unique `g` with `φ(g) = y`.
    fn preimage(&self, y: &GroupElement) -> Result<GroupElement>;
}

impl Seed for BiLipMap {
    fn source_group(&self) -> Group {
        Group::Lattice { dim: self.dim() }
    }

    fn target_group(&self) -> Group {
        Group::Lattice { dim: self.dim() }
    }

    fn eval(&self, g: &GroupElement) -> Result<GroupElement> {
        BiLipMap::eval(self, g)
    }

    fn preimage(&self, y: &GroupElement) -> Result<GroupElement> {
        self.eval_inverse(y)
    }
}

/// A seed given by a finite table; evaluation outside the table is an error.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMap {
    source: Group,
    target: Group,
    forward: BTreeMap<GroupElement, GroupElement>,
    backward: BTreeMap<GroupElement, GroupElement>,
}

impl FiniteMap {
    pub fn new(source: Group, target: Group, pairs: impl IntoIterator<Item = (GroupElement, GroupElement)>) -> Result<FiniteMap> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (g, y) in pairs {
            source.check(&g)?;
            target.check(&y)?;
            if let Some(prev) = backward.insert(y.clone(), g.clone()) {
                if prev != g {
                    return Err(Error::Invalid(format!("{prev} and {g} both map to {y}")));
                }
            }
            if let Some(prev) = forward.insert(g.clone(), y.clone()) {
                if prev != y {
                    return Err(Error::Invalid(format!("{g} has two images")));
                }
            }
        }
        Ok(FiniteMap { source, target, forward, backward })
    }

    /// Tabulates `f` on the ball of the given radius.
    pub fn from_fn<F>(metric: &WordMetric, target: Group, radius: u32, f: F) -> Result<FiniteMap>
    where
        F: Fn(&GroupElement) -> Result<GroupElement>,
    {
        let pairs = metric.ball(radius).into_iter().map(|g| Ok((g.clone(), f(&g)?))).collect::<Result<Vec<_>>>()?;
        FiniteMap::new(metric.group(), target, pairs)
    }

    /// The identity on a ball.
    pub fn identity(metric: &WordMetric, radius: u32) -> FiniteMap {
        FiniteMap::from_fn(metric, metric.group(), radius, |g| Ok(g.clone())).expect("identity is injective")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

impl Seed for FiniteMap {
    fn source_group(&self) -> Group {
        self.source
    }

    fn target_group(&self) -> Group {
        self.target
    }

    fn eval(&self, g: &GroupElement) -> Result<GroupElement> {
        self.forward.get(g).cloned().ok_or_else(|| Error::Undefined(g.to_string()))
    }

    fn preimage(&self, y: &GroupElement) -> Result<GroupElement> {
        self.backward
            .get(y)
            .cloned()
            .ok_or_else(|| Error::Truncation(format!("{y} is not in the image of the seed table")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_map_rejects_collisions() {
        let z = Group::Lattice { dim: 1 };
        let e = |v: i64| GroupElement::lattice(vec![v]);
        assert!(FiniteMap::new(z, z, vec![(e(0), e(1)), (e(1), e(1))]).is_err());
        let m = FiniteMap::new(z, z, vec![(e(0), e(1)), (e(1), e(0))]).unwrap();
        assert_eq!(m.preimage(&e(1)).unwrap(), e(0));
        assert!(matches!(m.eval(&e(5)), Err(Error::Undefined(_))));
        assert!(matches!(m.preimage(&e(5)), Err(Error::Truncation(_))));
    }

    #[test]
    fn free_group_identity_seed() {
        let metric = WordMetric::standard(Group::Free { rank: 2 });
        let id = FiniteMap::identity(&metric, 2);
        assert_eq!(id.len(), 17);
        let w = GroupElement::word("aB").unwrap();
        assert_eq!(id.eval(&w).unwrap(), w);
    }
}
