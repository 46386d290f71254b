//! The orbit of the seed inside the slice, with points named by group labels.
//!
//! The normalized translate `ψ_{g₀}(h) = φ(g₀⁻¹)⁻¹ φ(g₀⁻¹h)` lies in the
//! slice for every `g₀ ∈ Γ`, and both actions preserve this family:
//! `h·ψ_{g₀} = ψ_{h g₀}` and `λ·ψ_{g₀} = ψ_{k⁻¹ g₀}` with
//! `k = ψ_{g₀}⁻¹(λ⁻¹)`. Evaluating the seed directly (instead of a finite
//! table) lets the cocycles be computed at arbitrarily far group elements,
//! which the growth formula for the invariant matrix needs.

use std::sync::Arc;

use super::seed::Seed;
use crate::cocycle::{Action, Morphism};
use crate::error::Result;
use crate::group::{Group, GroupElement};

/// `ψ_{g₀}(h)`
pub fn slice_eval<S: Seed>(seed: &S, g0: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    let g0_inv = g0.inverse();
    seed.eval(&g0_inv)?.inverse().multiply(&seed.eval(&g0_inv.multiply(h)?)?)
}

/// `ψ_{g₀}⁻¹(y) = g₀ φ⁻¹(φ(g₀⁻¹) y)`
pub fn slice_preimage<S: Seed>(seed: &S, g0: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    let base = seed.eval(&g0.inverse())?;
    g0.multiply(&seed.preimage(&base.multiply(y)?)?)
}

/// `α(g, ψ_{g₀}) = ψ_{g₀}(g⁻¹)⁻¹`
pub fn slice_alpha<S: Seed>(seed: &S, g: &GroupElement, g0: &GroupElement) -> Result<GroupElement> {
    Ok(slice_eval(seed, g0, &g.inverse())?.inverse())
}

/// `β(λ, ψ_{g₀}) = ψ_{g₀}⁻¹(λ⁻¹)⁻¹`
pub fn slice_beta<S: Seed>(seed: &S, lam: &GroupElement, g0: &GroupElement) -> Result<GroupElement> {
    Ok(slice_preimage(seed, g0, &lam.inverse())?.inverse())
}

/// Γ acting on labelled slice points.
#[derive(Debug)]
pub struct GammaSlice<S> {
    seed: Arc<S>,
}

/// Λ acting on labelled slice points.
#[derive(Debug)]
pub struct LambdaSlice<S> {
    seed: Arc<S>,
}

impl<S> Clone for GammaSlice<S> {
    fn clone(&self) -> Self {
        GammaSlice { seed: self.seed.clone() }
    }
}

impl<S> Clone for LambdaSlice<S> {
    fn clone(&self) -> Self {
        LambdaSlice { seed: self.seed.clone() }
    }
}

impl<S: Seed> Action for GammaSlice<S> {
    type Point = GroupElement;

    fn group(&self) -> Group {
        self.seed.source_group()
    }

    fn act(&self, h: &GroupElement, g0: &GroupElement) -> Result<GroupElement> {
        h.multiply(g0)
    }
}

impl<S: Seed> Action for LambdaSlice<S> {
    type Point = GroupElement;

    fn group(&self) -> Group {
        self.seed.target_group()
    }

    fn act(&self, lam: &GroupElement, g0: &GroupElement) -> Result<GroupElement> {
        let k = slice_preimage(&*self.seed, g0, &lam.inverse())?;
        k.inverse().multiply(g0)
    }
}

/// `(id, α)` from the Γ-action to the Λ-action on the seed's slice orbit.
#[derive(Debug)]
pub struct GromovMorphism<S> {
    gamma: GammaSlice<S>,
    lambda: LambdaSlice<S>,
}

/// `(id, β)`, the inverse of [`GromovMorphism`].
#[derive(Debug)]
pub struct GromovInverse<S> {
    lambda: LambdaSlice<S>,
    gamma: GammaSlice<S>,
}

impl<S> Clone for GromovMorphism<S> {
    fn clone(&self) -> Self {
        GromovMorphism { gamma: self.gamma.clone(), lambda: self.lambda.clone() }
    }
}

impl<S> Clone for GromovInverse<S> {
    fn clone(&self) -> Self {
        GromovInverse { lambda: self.lambda.clone(), gamma: self.gamma.clone() }
    }
}

impl<S: Seed> GromovMorphism<S> {
    pub fn new(seed: S) -> GromovMorphism<S> {
        GromovMorphism::from_arc(Arc::new(seed))
    }

    pub fn from_arc(seed: Arc<S>) -> GromovMorphism<S> {
        GromovMorphism { gamma: GammaSlice { seed: seed.clone() }, lambda: LambdaSlice { seed } }
    }

    pub fn seed(&self) -> &S {
        &self.gamma.seed
    }

    pub fn inverse(&self) -> GromovInverse<S> {
        GromovInverse { lambda: self.lambda.clone(), gamma: self.gamma.clone() }
    }
}

impl<S: Seed> Morphism for GromovMorphism<S> {
    type Source = GammaSlice<S>;
    type Target = LambdaSlice<S>;

    fn source(&self) -> &GammaSlice<S> {
        &self.gamma
    }

    fn target(&self) -> &LambdaSlice<S> {
        &self.lambda
    }

    fn map_point(&self, x: &GroupElement) -> Result<GroupElement> {
        Ok(x.clone())
    }

    fn cocycle(&self, g: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        slice_alpha(&*self.gamma.seed, g, x)
    }
}

impl<S: Seed> Morphism for GromovInverse<S> {
    type Source = LambdaSlice<S>;
    type Target = GammaSlice<S>;

    fn source(&self) -> &LambdaSlice<S> {
        &self.lambda
    }

    fn target(&self) -> &GammaSlice<S> {
        &self.gamma
    }

    fn map_point(&self, x: &GroupElement) -> Result<GroupElement> {
        Ok(x.clone())
    }

    fn cocycle(&self, lam: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        slice_beta(&*self.lambda.seed, lam, x)
    }
}

/// A point of the coupled system used to compose two Gromov morphisms: a
/// slice point of the first seed and one of the second.
pub type PairPoint = (GroupElement, GroupElement);

/// Shared data of the three coupled actions on pairs `(a, b)`, for seeds
/// `φ₁ : Γ → Λ₁` and `φ₂ : Λ₁ → Λ₂`:
///
/// * `G₁`: `g·(a, b) = (g·a, α₁(g,a)·b)` (Γ),
/// * `G₂`: `λ·(a, b) = (λ·a, λ·b)` (Λ₁, acting on `b` through the source side of `φ₂`),
/// * `G₃`: `μ·(a, b) = (β₂(μ,b)·a, μ·b)` (Λ₂).
///
impl<S1, S2> Clone for CoupledG1<S1, S2> {
    fn clone(&self) -> Self {
        CoupledG1(self.0.clone())
    }
}

impl<S1, S2> Clone for CoupledG2<S1, S2> {
    fn clone(&self) -> Self {
        CoupledG2(self.0.clone())
    }
}

impl<S1, S2> Clone for CoupledG3<S1, S2> {
    fn clone(&self) -> Self {
        CoupledG3(self.0.clone())
    }
}

/// `θ = (id, α₁) : G₁ → G₂` and `η = (id, α₂) : G₂ → G₃` are orbit
/// equivalences, and `η ∘ θ` has cocycle `α₂(α₁(g,a), b)`.
#[derive(Debug)]
pub struct Coupled<S1, S2> {
    first: Arc<S1>,
    second: Arc<S2>,
}

impl<S1, S2> Clone for Coupled<S1, S2> {
    fn clone(&self) -> Self {
        Coupled { first: self.first.clone(), second: self.second.clone() }
    }
}

#[derive(Debug)]
pub struct CoupledG1<S1, S2>(Coupled<S1, S2>);
#[derive(Debug)]
pub struct CoupledG2<S1, S2>(Coupled<S1, S2>);
#[derive(Debug)]
pub struct CoupledG3<S1, S2>(Coupled<S1, S2>);

impl<S1: Seed, S2: Seed> Action for CoupledG1<S1, S2> {
    type Point = PairPoint;

    fn group(&self) -> Group {
        self.0.first.source_group()
    }

    fn act(&self, g: &GroupElement, (a, b): &PairPoint) -> Result<PairPoint> {
        let lam = slice_alpha(&*self.0.first, g, a)?;
        Ok((g.multiply(a)?, lam.multiply(b)?))
    }
}

impl<S1: Seed, S2: Seed> Action for CoupledG2<S1, S2> {
    type Point = PairPoint;

    fn group(&self) -> Group {
        self.0.first.target_group()
    }

    fn act(&self, lam: &GroupElement, (a, b): &PairPoint) -> Result<PairPoint> {
        let a2 = LambdaSlice { seed: self.0.first.clone() }.act(lam, a)?;
        Ok((a2, lam.multiply(b)?))
    }
}

impl<S1: Seed, S2: Seed> Action for CoupledG3<S1, S2> {
    type Point = PairPoint;

    fn group(&self) -> Group {
        self.0.second.target_group()
    }

    fn act(&self, mu: &GroupElement, (a, b): &PairPoint) -> Result<PairPoint> {
        let lam = slice_beta(&*self.0.second, mu, b)?;
        let a2 = LambdaSlice { seed: self.0.first.clone() }.act(&lam, a)?;
        let b2 = LambdaSlice { seed: self.0.second.clone() }.act(mu, b)?;
        Ok((a2, b2))
    }
}

/// `θ = (id, α₁) : G₁ → G₂`
#[derive(Debug)]
pub struct CoupledTheta<S1, S2> {
    g1: CoupledG1<S1, S2>,
    g2: CoupledG2<S1, S2>,
}

/// `η = (id, α₂) : G₂ → G₃`
#[derive(Debug)]
pub struct CoupledEta<S1, S2> {
    g2: CoupledG2<S1, S2>,
    g3: CoupledG3<S1, S2>,
}

impl<S1, S2> Clone for CoupledTheta<S1, S2> {
    fn clone(&self) -> Self {
        CoupledTheta { g1: self.g1.clone(), g2: self.g2.clone() }
    }
}

impl<S1, S2> Clone for CoupledEta<S1, S2> {
    fn clone(&self) -> Self {
        CoupledEta { g2: self.g2.clone(), g3: self.g3.clone() }
    }
}

/// The two composable morphisms of the coupled system.
pub fn coupled_morphisms<S1: Seed, S2: Seed>(first: S1, second: S2) -> (CoupledTheta<S1, S2>, CoupledEta<S1, S2>) {
    let c = Coupled { first: Arc::new(first), second: Arc::new(second) };
    (
        CoupledTheta { g1: CoupledG1(c.clone()), g2: CoupledG2(c.clone()) },
        CoupledEta { g2: CoupledG2(c.clone()), g3: CoupledG3(c) },
    )
}

impl<S1: Seed, S2: Seed> Morphism for CoupledTheta<S1, S2> {
    type Source = CoupledG1<S1, S2>;
    type Target = CoupledG2<S1, S2>;

    fn source(&self) -> &CoupledG1<S1, S2> {
        &self.g1
    }

    fn target(&self) -> &CoupledG2<S1, S2> {
        &self.g2
    }

    fn map_point(&self, x: &PairPoint) -> Result<PairPoint> {
        Ok(x.clone())
    }

    fn cocycle(&self, g: &GroupElement, (a, _): &PairPoint) -> Result<GroupElement> {
        slice_alpha(&*self.g1.0.first, g, a)
    }
}

impl<S1: Seed, S2: Seed> Morphism for CoupledEta<S1, S2> {
    type Source = CoupledG2<S1, S2>;
    type Target = CoupledG3<S1, S2>;

    fn source(&self) -> &CoupledG2<S1, S2> {
        &self.g2
    }

    fn target(&self) -> &CoupledG3<S1, S2> {
        &self.g3
    }

    fn map_point(&self, x: &PairPoint) -> Result<PairPoint> {
        Ok(x.clone())
    }

    fn cocycle(&self, lam: &GroupElement, (_, b): &PairPoint) -> Result<GroupElement> {
        slice_alpha(&*self.g2.0.second, lam, b)
    }
}
