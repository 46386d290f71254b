//! The first-degree invariant of an orbit equivalence between `Z^d`-actions,
//! and the exterior algebra `Λ*(R^d)` that carries the full cohomology.
//!
//! Column `i` of the invariant is the growth rate of the cocycle along the
//! `i`-th basis direction, `α(n e_i, (−n e_i)·x) / n`, averaged over sample
//! points. When `α(g,x)` stays within `C` of `A g` this is within `C/n` of
//! `A` up to averaging; the matrix reported is the covariant one, and the
//! action on first cohomology is its transpose.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cocycle::{Action, CocycleTable, Morphism};
use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::matrix::{max_entry_distance, rows, RealMatrix};
use crate::odometer::DigitPoint;
use crate::cocycle::OdometerAction;
use crate::report::Verdict;

pub const DET_ANCHOR: &str = "|det psi1| = 1";
pub const MULTIPLICATIVITY_ANCHOR: &str = "L(M)(u ^ v) = L(M)(u) ^ L(M)(v)";
pub const FUNCTORIALITY_ANCHOR: &str = "psi1(eta o theta) = psi1(eta) psi1(theta)";

/// An element of `Λ*(R^d)`; basis monomials `e_S` are indexed by the bitmask
/// of `S ⊆ {0, …, d−1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExteriorElement {
    dim: usize,
    coeffs: BTreeMap<u32, f64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 32 {
        return Err(Error::Invalid(format!("exterior algebra of dimension {dim} is too large")));
    }
    Ok(())
}

impl ExteriorElement {
    pub fn zero(dim: usize) -> Result<ExteriorElement> {
        check_dim(dim)?;
        Ok(ExteriorElement { dim, coeffs: BTreeMap::new() })
    }

    /// `c · e_S`.
    pub fn monomial(dim: usize, subset: &[usize], c: f64) -> Result<ExteriorElement> {
        let mut x = ExteriorElement::zero(dim)?;
        let mut mask = 0u32;
        for &i in subset {
            if i >= dim {
                return Err(Error::Invalid(format!("index {i} out of range for dimension {dim}")));
            }
            if mask & (1 << i) != 0 {
                return Ok(x);
            }
            mask |= 1 << i;
        }
        // reorder the listed indices into increasing order
        let sign = permutation_sign(subset);
        x.add_term(mask, sign * c);
        Ok(x)
    }

    /// `Σ v_i e_i`.
    pub fn vector(v: &[f64]) -> Result<ExteriorElement> {
        let mut x = ExteriorElement::zero(v.len())?;
        for (i, &c) in v.iter().enumerate() {
            x.add_term(1 << i, c);
        }
        Ok(x)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.coeffs.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    /// The degree-`k` component.
    pub fn part(&self, k: u32) -> ExteriorElement {
        ExteriorElement {
            dim: self.dim,
            coeffs: self.coeffs.iter().filter(|(m, _)| m.count_ones() == k).map(|(&m, &c)| (m, c)).collect(),
        }
    }

    fn add_term(&mut self, mask: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(mask).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.coeffs.remove(&mask);
        }
    }

    pub fn add(&self, other: &ExteriorElement) -> Result<ExteriorElement> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> ExteriorElement {
        let mut out = ExteriorElement { dim: self.dim, coeffs: BTreeMap::new() };
        for (m, c) in self.terms() {
            out.add_term(m, s * c);
        }
        out
    }

    pub fn wedge(&self, other: &ExteriorElement) -> Result<ExteriorElement> {
        self.same_dim(other)?;
        let mut out = ExteriorElement { dim: self.dim, coeffs: BTreeMap::new() };
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                if a & b == 0 {
                    out.add_term(a | b, shuffle_sign(a, b) * x * y);
                }
            }
        }
        Ok(out)
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &ExteriorElement) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|&m| (self.coeff(m) - other.coeff(m)).abs())
            .fold(0.0, f64::max)
    }

    fn same_dim(&self, other: &ExteriorElement) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Invalid(format!("dimension mismatch: {} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }
}

/// Sign of `e_A ∧ e_B = ± e_{A∪B}` for disjoint `A`, `B`: one factor of −1
/// per pair `(a, b)` with `a ∈ A`, `b ∈ B`, `a > b`.
fn shuffle_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn permutation_sign(items: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if items[i] > items[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn subset_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// The graded algebra endomorphism `Λ(M)` of `Λ*(R^d)`, tabulated on the
/// basis monomials. Degree `k` acts by the `k`-th exterior power, computed
/// from `k × k` minors.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMap {
    dim: usize,
    images: Vec<ExteriorElement>,
}

pub fn induced_map(m: &RealMatrix) -> Result<InducedMap> {
    let d = m.nrows();
    if m.ncols() != d {
        return Err(Error::Invalid("matrix must be square".into()));
    }
    check_dim(d)?;
    if d > 16 {
        return Err(Error::Budget(format!("exterior algebra of dimension {d} has 2^{d} basis monomials")));
    }
    let mut images = Vec::with_capacity(1 << d);
    for s in 0u32..(1 << d) {
        let cols = subset_indices(s);
        let mut img = ExteriorElement::zero(d)?;
        for t in (0u32..(1 << d)).filter(|t| t.count_ones() == s.count_ones()) {
            let rws = subset_indices(t);
            let minor = RealMatrix::from_fn(cols.len(), cols.len(), |i, j| m[(rws[i], cols[j])]);
            let det = if cols.is_empty() { 1.0 } else { minor.determinant() };
            img.add_term(t, det);
        }
        images.push(img);
    }
    Ok(InducedMap { dim: d, images })
}

impl InducedMap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image_of_basis(&self, mask: u32) -> &ExteriorElement {
        &self.images[mask as usize]
    }

    /// Overwrites the image of one basis monomial.
    pub fn set_image(&mut self, mask: u32, image: ExteriorElement) {
        self.images[mask as usize] = image;
    }

    pub fn apply(&self, x: &ExteriorElement) -> Result<ExteriorElement> {
        if x.dim != self.dim {
            return Err(Error::Invalid(format!("dimension mismatch: {} vs {}", x.dim, self.dim)));
        }
        let mut out = ExteriorElement::zero(self.dim)?;
        for (m, c) in x.terms() {
            out = out.add(&self.images[m as usize].scale(c))?;
        }
        Ok(out)
    }

    /// The scalar by which the top degree is multiplied.
    pub fn top_degree_factor(&self) -> f64 {
        let top = (1u32 << self.dim) - 1;
        self.images[top as usize].coeff(top)
    }
}

/// `Λ(M)(e_S ∧ e_T) = Λ(M)(e_S) ∧ Λ(M)(e_T)` for every pair of basis
/// monomials, to `tol` relative to the size of the coefficients involved.
pub fn multiplicativity_check(map: &InducedMap, tol: f64) -> Result<Verdict> {
    let mut v = Verdict::new("multiplicativity", MULTIPLICATIVITY_ANCHOR);
    let n = 1u32 << map.dim;
    for s in 0..n {
        for t in 0..n {
            let es = ExteriorElement { dim: map.dim, coeffs: BTreeMap::from([(s, 1.0)]) };
            let et = ExteriorElement { dim: map.dim, coeffs: BTreeMap::from([(t, 1.0)]) };
            let lhs = map.apply(&es.wedge(&et)?)?;
            let rhs = map.image_of_basis(s).wedge(map.image_of_basis(t))?;
            let scale = lhs.terms().chain(rhs.terms()).map(|(_, c)| c.abs()).fold(1.0, f64::max);
            let err = lhs.distance(&rhs);
            v.record(err <= tol * scale, || {
                format!("S={:?} T={:?}: error {err:e}", subset_indices(s), subset_indices(t))
            });
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Psi1Provenance {
    pub n: u64,
    pub samples: usize,
    #[serde(rename = "C")]
    pub constant: f64,
    /// How the integral over the space was replaced: `"sampled"` or
    /// `"haar"`. The invariant may depend on this choice for a morphism that
    /// is not measure preserving.
    pub measure: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMatrix {
    pub matrix: RealMatrix,
    pub det: f64,
    pub error_bound: f64,
    pub provenance: Psi1Provenance,
}

impl InvariantMatrix {
    fn new(matrix: RealMatrix, provenance: Psi1Provenance) -> InvariantMatrix {
        let det = matrix.determinant();
        let error_bound = provenance.constant / provenance.n as f64;
        InvariantMatrix { matrix, det, error_bound, provenance }
    }

    /// The action on first cohomology, `Mᵗ`.
    pub fn cohomology_side(&self) -> RealMatrix {
        self.matrix.transpose()
    }
}

impl Serialize for InvariantMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("InvariantMatrix", 5)?;
        st.serialize_field("matrix", &rows(&self.matrix))?;
        st.serialize_field("det", &self.det)?;
        st.serialize_field("error_bound", &self.error_bound)?;
        st.serialize_field("provenance", &self.provenance)?;
        st.serialize_field("cohomology_side", &rows(&self.cohomology_side()))?;
        st.end()
    }
}

fn lattice_dim(group: Group) -> Result<usize> {
    match group {
        Group::Lattice { dim } => Ok(dim),
        Group::Free { .. } => Err(Error::GroupMismatch("the invariant matrix is defined for Z^d-actions".into())),
    }
}

fn basis(dim: usize, i: usize, n: i64) -> GroupElement {
    let mut v = vec![0; dim];
    v[i] = n;
    GroupElement::lattice(v)
}

fn growth_matrix<P, F>(dim: usize, target_dim: usize, n: u64, samples: &[P], mut growth: F) -> Result<RealMatrix>
where
    F: FnMut(&GroupElement, &GroupElement, &P) -> Result<GroupElement>,
{
    if n == 0 || n > i64::MAX as u64 {
        return Err(Error::Invalid(format!("n = {n} is out of range")));
    }
    if samples.is_empty() {
        return Err(Error::Invalid("no sample points".into()));
    }
    let mut m = RealMatrix::zeros(target_dim, dim);
    for i in 0..dim {
        let step = basis(dim, i, n as i64);
        let back = basis(dim, i, -(n as i64));
        for x in samples {
            let value = growth(&step, &back, x)?;
            let value = value
                .as_lattice()
                .ok_or_else(|| Error::GroupMismatch("cocycle values must lie in a lattice".into()))?;
            for (r, &c) in value.iter().enumerate() {
                m[(r, i)] += c as f64;
            }
        }
    }
    Ok(m / (n as f64 * samples.len() as f64))
}

/// The invariant matrix of a morphism between `Z^d`-actions, from the
/// averaged growth `α(n e_i, (−n e_i)·x) / n`. `constant` is the
/// bounded-distance constant used for the reported error bound `C/n`.
pub fn psi1_from_cocycle<M: Morphism>(
    m: &M,
    n: u64,
    samples: &[<M::Source as Action>::Point],
    constant: f64,
) -> Result<InvariantMatrix> {
    let dim = lattice_dim(m.source().group())?;
    let target_dim = lattice_dim(m.target().group())?;
    let matrix = growth_matrix(dim, target_dim, n, samples, |step, back, x| {
        let y = m.source().act(back, x)?;
        m.cocycle(step, &y)
    })?;
    Ok(InvariantMatrix::new(
        matrix,
        Psi1Provenance { n, samples: samples.len(), constant, measure: "sampled".into() },
    ))
}

/// As [`psi1_from_cocycle`], reading the cocycle from a finite table; the
/// table must contain `(n e_i, (−n e_i)·x)` for every basis vector and sample.
pub fn psi1_from_table<A: Action>(
    table: &CocycleTable<A::Point>,
    action: &A,
    target_dim: usize,
    n: u64,
    samples: &[A::Point],
    constant: f64,
) -> Result<InvariantMatrix> {
    let dim = lattice_dim(action.group())?;
    let matrix = growth_matrix(dim, target_dim, n, samples, |step, back, x| {
        let y = action.act(back, x)?;
        table
            .get(step, &y)
            .cloned()
            .map_err(|_| Error::Coverage(format!("cocycle table has no entry at ({step}, {y:?}); n = {n} is too large")))
    })?;
    Ok(InvariantMatrix::new(
        matrix,
        Psi1Provenance { n, samples: samples.len(), constant, measure: "sampled".into() },
    ))
}

/// Haar-weighted version for a morphism out of an odometer: the average is
/// taken over every point of the truncated space.
pub fn psi1_haar<M>(m: &M, n: u64, constant: f64) -> Result<InvariantMatrix>
where
    M: Morphism<Source = OdometerAction>,
{
    let points: Vec<DigitPoint> = m.source().space.points()?;
    let mut out = psi1_from_cocycle(m, n, &points, constant)?;
    out.provenance.measure = "haar".into();
    Ok(out)
}

/// `count` points of `Z^d` drawn uniformly from `[-half_width, half_width]^d`.
pub fn sample_labels(dim: usize, count: usize, half_width: i64, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| GroupElement::lattice((0..dim).map(|_| rng.gen_range(-half_width..=half_width)).collect::<Vec<_>>()))
        .collect()
}

/// Passes when `||det M| − 1| ≤ tol`.
pub fn check_det_pm1(m: &InvariantMatrix, tol: f64) -> Verdict {
    let mut v = Verdict::new("det-pm1", DET_ANCHOR);
    let err = (m.det.abs() - 1.0).abs();
    v.record(err <= tol, || format!("det = {} (||det| - 1| = {err:e} > {tol:e})", m.det));
    v
}

fn row_sum_norm(m: &RealMatrix) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn max_abs_entry(m: &RealMatrix) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctorialityReport {
    pub theta: InvariantMatrix,
    pub eta: InvariantMatrix,
    pub composed: InvariantMatrix,
    pub product: RealMatrix,
    pub error: f64,
    pub budget: f64,
    pub verdict: Verdict,
}

impl Serialize for FunctorialityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FunctorialityReport", 7)?;
        st.serialize_field("theta", &self.theta)?;
        st.serialize_field("eta", &self.eta)?;
        st.serialize_field("composed", &self.composed)?;
        st.serialize_field("product", &rows(&self.product))?;
        st.serialize_field("error", &self.error)?;
        st.serialize_field("budget", &self.budget)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.end()
    }
}

/// Compares `psi1(η ∘ θ)` with `psi1(η) · psi1(θ)`.
///
/// With `e_θ = C_θ/n`, `e_η = C_η/n` the individual error bounds, the
/// product is off by at most `d (‖B‖ e_θ + ‖A‖ e_η + e_η e_θ)` entrywise
/// (`A`, `B` the measured matrices, `‖·‖` the largest entry). The composed
/// cocycle stays within `C_η + ‖B‖∞ C_θ` of `BA g`, which bounds its own
/// error. The budget is the sum of the two.
pub fn functoriality_check<T, E>(
    eta: &E,
    theta: &T,
    n: u64,
    samples: &[<T::Source as Action>::Point],
    eta_samples: &[<E::Source as Action>::Point],
    constants: (f64, f64),
) -> Result<FunctorialityReport>
where
    T: Morphism + Clone,
    E: Morphism<Source = T::Target> + Clone,
{
    let (c_eta, c_theta) = constants;
    let a = psi1_from_cocycle(theta, n, samples, c_theta)?;
    let b = psi1_from_cocycle(eta, n, eta_samples, c_eta)?;
    let c_composed = c_eta + row_sum_norm(&b.matrix) * c_theta;
    let composed_morphism = crate::cocycle::compose_morphisms(eta.clone(), theta.clone());
    let composed = psi1_from_cocycle(&composed_morphism, n, samples, c_composed)?;
    functoriality_verdict(a, b, composed)
}

/// The comparison step of [`functoriality_check`], for invariants computed
/// elsewhere.
pub fn functoriality_verdict(
    theta: InvariantMatrix,
    eta: InvariantMatrix,
    composed: InvariantMatrix,
) -> Result<FunctorialityReport> {
    if eta.matrix.ncols() != theta.matrix.nrows() {
        return Err(Error::Invalid("invariant matrices are not composable".into()));
    }
    let product = &eta.matrix * &theta.matrix;
    let d = theta.matrix.nrows() as f64;
    let (ea, eb) = (theta.error_bound, eta.error_bound);
    let cross = d * (max_abs_entry(&eta.matrix) * ea + max_abs_entry(&theta.matrix) * eb + ea * eb);
    let budget = cross + composed.error_bound;
    let error = max_entry_distance(&composed.matrix, &product);
    let mut verdict = Verdict::new("functoriality", FUNCTORIALITY_ANCHOR);
    verdict.record(error <= budget, || format!("|psi1(eta o theta) - psi1(eta) psi1(theta)| = {error:e} > budget {budget:e}"));
    Ok(FunctorialityReport { theta, eta, composed, product, error, budget, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilipschitz::{bounded_distance_constant, realize_bilipschitz, DEFAULT_TOL};
    use crate::cocycle::{Identity, OdometerAutomorphism, Provenance};
    use crate::gromov::{coupled_morphisms, GromovMorphism};
    use crate::matrix::{int_from_rows, parse_matrix};
    use crate::odometer::OdometerSpace;
    use proptest::prelude::*;

    fn e(dim: usize, s: &[usize]) -> ExteriorElement {
        ExteriorElement::monomial(dim, s, 1.0).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(e(2, &[0]).wedge(&e(2, &[1])).unwrap(), e(2, &[1]).wedge(&e(2, &[0])).unwrap().scale(-1.0));
        assert!(e(2, &[0]).wedge(&e(2, &[0])).unwrap().terms().next().is_none());
        let sum = e(2, &[0]).add(&e(2, &[1])).unwrap();
        assert_eq!(sum.wedge(&e(2, &[1])).unwrap(), e(2, &[0, 1]));
        assert_eq!(e(3, &[2, 0]), e(3, &[0, 2]).scale(-1.0));
        assert!(e(2, &[0]).wedge(&e(3, &[0])).is_err());
    }

    #[test]
    fn induced_map_examples() {
        let id = induced_map(&RealMatrix::identity(3, 3)).unwrap();
        for s in 0..8 {
            assert_eq!(id.image_of_basis(s).distance(&ExteriorElement { dim: 3, coeffs: BTreeMap::from([(s, 1.0)]) }), 0.0);
        }
        let m = parse_matrix("2 0; 0 0.5").unwrap();
        assert_eq!(induced_map(&m).unwrap().top_degree_factor(), 1.0);
    }

    fn wedge_of_columns(m: &RealMatrix, mask: u32) -> ExteriorElement {
        let d = m.nrows();
        let mut acc = ExteriorElement { dim: d, coeffs: BTreeMap::from([(0, 1.0)]) };
        for j in subset_indices(mask) {
            let col: Vec<f64> = (0..d).map(|i| m[(i, j)]).collect();
            acc = acc.wedge(&ExteriorElement::vector(&col).unwrap()).unwrap();
        }
        acc
    }

    fn matrix_strategy(d: usize) -> impl Strategy<Value = RealMatrix> {
        proptest::collection::vec(-2.0f64..2.0, d * d).prop_map(move |v| RealMatrix::from_row_slice(d, d, &v))
    }

    proptest! {
        #[test]
        fn minors_match_wedged_columns(m in matrix_strategy(3)) {
            let map = induced_map(&m).unwrap();
            for s in 0..8u32 {
                prop_assert!(map.image_of_basis(s).distance(&wedge_of_columns(&m, s)) < 1e-12);
            }
            prop_assert!((map.top_degree_factor() - m.determinant()).abs() < 1e-12);
        }

        #[test]
        fn induced_maps_are_multiplicative(m in matrix_strategy(3)) {
            prop_assert!(multiplicativity_check(&induced_map(&m).unwrap(), 1e-12).unwrap().pass);
        }

        #[test]
        fn wedge_is_associative(a in proptest::collection::vec(-3.0f64..3.0, 8),
                                b in proptest::collection::vec(-3.0f64..3.0, 8),
                                c in proptest::collection::vec(-3.0f64..3.0, 8)) {
            let mk = |v: &[f64]| ExteriorElement {
                dim: 3,
                coeffs: v.iter().enumerate().map(|(m, &x)| (m as u32, x)).collect(),
            };
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert!(left.distance(&right) < 1e-9);
        }
    }

    #[test]
    fn corrupted_induced_map_fails() {
        let m = parse_matrix("1 2 0; 0 1 3; 1 0 1").unwrap();
        let mut map = induced_map(&m).unwrap();
        let img = map.image_of_basis(0b011).add(&e(3, &[0, 2])).unwrap();
        map.set_image(0b011, img);
        let v = multiplicativity_check(&map, 1e-12).unwrap();
        assert!(!v.pass);
        assert!(v.first_witness().is_some());
    }

    #[test]
    fn trivial_cocycle_gives_identity() {
        let space = OdometerSpace::uniform(2, 2, 3).unwrap();
        let id = Identity { action: OdometerAction { space: space.clone() } };
        let pts = space.points().unwrap();
        for n in [1, 7, 1024] {
            let m = psi1_from_cocycle(&id, n, &pts[..10], 0.0).unwrap();
            assert_eq!(m.matrix, RealMatrix::identity(2, 2));
            assert_eq!(m.error_bound, 0.0);
        }
    }

    #[test]
    fn constant_cocycle_is_exact() {
        let space = OdometerSpace::uniform(3, 2, 2).unwrap();
        let a = int_from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let phi = OdometerAutomorphism::new(&space, a).unwrap();
        let m = psi1_haar(&phi, 5, 0.0).unwrap();
        assert_eq!(m.matrix, parse_matrix("2 1; 1 1").unwrap());
        assert_eq!(m.cohomology_side(), parse_matrix("2 1; 1 1").unwrap().transpose());
        assert_eq!(m.provenance.measure, "haar");
        assert!(check_det_pm1(&m, 0.0).pass);
    }

    #[test]
    fn det_check_examples() {
        let mk = |s: &str| InvariantMatrix::new(parse_matrix(s).unwrap(), Psi1Provenance { n: 1, samples: 1, constant: 0.0, measure: "sampled".into() });
        assert!(check_det_pm1(&mk("1 0; 0 1"), 1e-12).pass);
        assert!(check_det_pm1(&mk("0 1; 1 0"), 1e-12).pass);
        let bad = check_det_pm1(&mk("2 0; 0 1"), 1e-6);
        assert!(!bad.pass);
        assert!(bad.first_witness().unwrap().contains("det = 2"));
    }

    #[test]
    fn table_coverage_is_reported() {
        let space = OdometerSpace::uniform(2, 1, 4).unwrap();
        let action = OdometerAction { space: space.clone() };
        let id = Identity { action: action.clone() };
        let pts = space.points().unwrap();
        let gs: Vec<_> = [1i64, -1, 2, -2].iter().map(|&k| GroupElement::lattice(vec![k])).collect();
        let pairs = pts.iter().flat_map(|x| gs.iter().map(move |g| (g.clone(), x.clone())));
        let table = CocycleTable::tabulate(&id, pairs, Provenance::ConstantTheta).unwrap();
        assert_eq!(psi1_from_table(&table, &action, 1, 2, &pts, 0.0).unwrap().matrix, RealMatrix::identity(1, 1));
        assert!(matches!(psi1_from_table(&table, &action, 1, 3, &pts, 0.0), Err(Error::Coverage(_))));
    }

    #[test]
    fn realized_shear_recovers_matrix() {
        let a = parse_matrix("1 0.5; 0 1").unwrap();
        let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
        let c = bounded_distance_constant(&f, &a, 50);
        let eta = GromovMorphism::new(f);
        let samples = sample_labels(2, 256, 1 << 16, 7);
        for n in [1u64 << 6, 1 << 8, 1 << 10] {
            let m = psi1_from_cocycle(&eta, n, &samples, c).unwrap();
            assert!(max_entry_distance(&m.matrix, &a) <= c / n as f64, "n={n}");
            assert!((m.det.abs() - 1.0).abs() <= 10.0 * c * 2.0 / n as f64);
        }
    }

    #[test]
    fn sample_columns_agree() {
        let a = parse_matrix("1 0.5; 0.5 1.25").unwrap();
        let f = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
        let c = bounded_distance_constant(&f, &a, 50);
        let eta = GromovMorphism::new(f);
        let n = 1u64 << 8;
        let single: Vec<_> = sample_labels(2, 20, 1 << 12, 8)
            .into_iter()
            .map(|x| psi1_from_cocycle(&eta, n, &[x], c).unwrap().matrix)
            .collect();
        for p in &single {
            for q in &single {
                assert!(max_entry_distance(p, q) <= 2.0 * c / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn functoriality_constant() {
        let space = OdometerSpace::uniform(2, 2, 3).unwrap();
        let a = OdometerAutomorphism::new(&space, int_from_rows(&[vec![1, 1], vec![0, 1]]).unwrap()).unwrap();
        let b = OdometerAutomorphism::new(&space, int_from_rows(&[vec![0, -1], vec![1, 0]]).unwrap()).unwrap();
        let pts = space.points().unwrap();
        let r = functoriality_check(&b, &a, 8, &pts, &pts, (0.0, 0.0)).unwrap();
        assert!(r.verdict.pass);
        assert_eq!(r.composed.matrix, parse_matrix("0 -1; 1 1").unwrap());
        assert_eq!(r.error, 0.0);

        let id = Identity { action: OdometerAction { space: space.clone() } };
        let r = functoriality_check(&b, &id, 8, &pts, &pts, (0.0, 0.0)).unwrap();
        assert_eq!(r.composed.matrix, r.eta.matrix);
    }

    #[test]
    fn functoriality_realized() {
        let a = parse_matrix("1 0.5; 0 1").unwrap();
        let b = parse_matrix("1 0; -0.75 1").unwrap();
        let fa = realize_bilipschitz(&a, DEFAULT_TOL).unwrap();
        let fb = realize_bilipschitz(&b, DEFAULT_TOL).unwrap();
        let (ca, cb) = (bounded_distance_constant(&fa, &a, 50), bounded_distance_constant(&fb, &b, 50));
        let (theta, eta) = coupled_morphisms(fa, fb);
        let labels = sample_labels(4, 128, 1 << 16, 9);
        let pairs: Vec<_> = labels
            .iter()
            .map(|g| {
                let v = g.as_lattice().unwrap();
                (GroupElement::lattice(v[..2].to_vec()), GroupElement::lattice(v[2..].to_vec()))
            })
            .collect();
        let r = functoriality_check(&eta, &theta, 1 << 10, &pairs, &pairs, (cb, ca)).unwrap();
        assert!(r.verdict.pass, "{:?}", r.verdict);
        assert!(max_entry_distance(&r.product, &(&b * &a)) <= r.budget);
    }
}
