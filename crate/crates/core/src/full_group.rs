//! Elements of the topological full group of a lattice acting on an odometer.
//!
//! An element is a clopen partition `A_1, …, A_k` with lattice labels
//! `g_1, …, g_k`; it acts by `x ↦ x + g_i` on `A_i`. Bijectivity is the
//! statement that the translated pieces `g_i A_i` again partition the space.

use rand::Rng;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::odometer::{haar_measure, ClopenSet, Cylinder, DigitPoint, OdometerSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub set: ClopenSet,
    pub label: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullGroupElement {
    space: OdometerSpace,
    pieces: Vec<Piece>,
}

fn is_partition(space: &OdometerSpace, sets: impl Iterator<Item = ClopenSet>) -> bool {
    let cylinders: Vec<Cylinder> = sets.flat_map(|s| s.cylinders().to_vec()).collect();
    matches!(haar_measure(&cylinders, space), Ok(m) if num_traits::One::is_one(&m))
}

fn label_vector<'a>(space: &OdometerSpace, g: &'a GroupElement) -> Result<&'a [i64]> {
    match g.as_lattice() {
        Some(v) if v.len() == space.dim() => Ok(v),
        _ => Err(Error::GroupMismatch(format!("label {g} is not in Z^{}", space.dim()))),
    }
}

fn add(u: &[i64], v: &[i64]) -> GroupElement {
    GroupElement::lattice(u.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<_>>())
}

impl FullGroupElement {
    /// Validates that the domains and the translated images both partition
    /// the space, then normalizes.
    pub fn make(space: &OdometerSpace, pieces: Vec<(ClopenSet, GroupElement)>) -> Result<FullGroupElement> {
        if pieces.is_empty() {
            return Err(Error::NotPartition("no pieces".into()));
        }
        for (_, g) in &pieces {
            label_vector(space, g)?;
        }
        if !is_partition(space, pieces.iter().map(|(a, _)| a.clone())) {
            return Err(Error::NotPartition("domains do not partition the space".into()));
        }
        let images = pieces.iter().map(|(a, g)| a.translate(space, g.as_lattice().expect("checked")));
        if !is_partition(space, images) {
            return Err(Error::NotPartition("images do not partition the space (not bijective)".into()));
        }
        Ok(FullGroupElement::normalized(space, pieces))
    }

    fn normalized(space: &OdometerSpace, pieces: Vec<(ClopenSet, GroupElement)>) -> FullGroupElement {
        let mut merged: Vec<(GroupElement, ClopenSet)> = Vec::new();
        for (set, label) in pieces.into_iter().filter(|(s, _)| !s.is_empty()) {
            match merged.iter_mut().find(|(g, _)| *g == label) {
                Some((_, acc)) => *acc = acc.union(space, &set).expect("pieces are disjoint"),
                None => merged.push((label, set)),
            }
        }
        let mut pieces: Vec<Piece> =
            merged.into_iter().map(|(label, set)| Piece { set: set.coalesce(space), label }).collect();
        pieces.sort_by(|a, b| a.set.cmp(&b.set).then_with(|| a.label.cmp(&b.label)));
        FullGroupElement { space: space.clone(), pieces }
    }

    pub fn identity(space: &OdometerSpace) -> FullGroupElement {
        FullGroupElement::translation(space, &GroupElement::lattice(vec![0; space.dim()]))
            .expect("identity label has the right dimension")
    }

    /// The group element `g` viewed as a one-piece element.
    pub fn translation(space: &OdometerSpace, g: &GroupElement) -> Result<FullGroupElement> {
        label_vector(space, g)?;
        Ok(FullGroupElement { space: space.clone(), pieces: vec![Piece { set: space.whole(), label: g.clone() }] })
    }

    /// Exchanges `C` and `gC`, fixing everything else. Requires `gC ∩ C = ∅`.
    pub fn swap(space: &OdometerSpace, c: &ClopenSet, g: &GroupElement) -> Result<FullGroupElement> {
        let v = label_vector(space, g)?;
        let moved = c.translate(space, v);
        let rest = c.union(space, &moved)?.complement(space);
        let neg = g.inverse();
        FullGroupElement::make(
            space,
            vec![(c.clone(), g.clone()), (moved, neg), (rest, GroupElement::lattice(vec![0; space.dim()]))],
        )
    }

    pub fn space(&self) -> &OdometerSpace {
        &self.space
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn label_at(&self, x: &DigitPoint) -> &GroupElement {
        &self
            .pieces
            .iter()
            .find(|p| p.set.contains(&self.space, x))
            .expect("pieces partition the space")
            .label
    }

    pub fn apply(&self, x: &DigitPoint) -> DigitPoint {
        let v = self.label_at(x).as_lattice().expect("lattice label");
        self.space.add(x, v).expect("dimensions checked at construction")
    }

    /// `T ∘ U`: first `U`, then `T`.
    pub fn compose(&self, u: &FullGroupElement) -> Result<FullGroupElement> {
        if self.space != u.space {
            return Err(Error::InvalidSpace("elements live on different spaces".into()));
        }
        let space = &self.space;
        let mut pieces = Vec::new();
        for b in &u.pieces {
            let h = b.label.as_lattice().expect("lattice label");
            let back: Vec<i64> = h.iter().map(|x| -x).collect();
            for a in &self.pieces {
                let part = b.set.intersect(space, &a.set.translate(space, &back));
                if !part.is_empty() {
                    pieces.push((part, add(a.label.as_lattice().expect("lattice label"), h)));
                }
            }
        }
        Ok(FullGroupElement::normalized(space, pieces))
    }

    pub fn invert(&self) -> FullGroupElement {
        let pieces = self
            .pieces
            .iter()
            .map(|p| (p.set.translate(&self.space, p.label.as_lattice().expect("lattice label")), p.label.inverse()))
            .collect();
        FullGroupElement::normalized(&self.space, pieces)
    }

    /// `g T g⁻¹`.
    pub fn conjugate(&self, g: &GroupElement) -> Result<FullGroupElement> {
        let t = FullGroupElement::translation(&self.space, g)?;
        t.compose(self)?.compose(&t.invert())
    }

    /// Adds `delta` to every label. The result is still a bijection (it is
    /// this element followed by a translation) but generally a different one.
    pub fn perturb_labels(&self, delta: &GroupElement) -> Result<FullGroupElement> {
        FullGroupElement::translation(&self.space, delta)?.compose(self)
    }

    /// Agreement on every depth-N point.
    pub fn equals_pointwise(&self, other: &FullGroupElement) -> Result<bool> {
        Ok(self.space == other.space && self.space.points()?.iter().all(|x| self.apply(x) == other.apply(x)))
    }

    /// A random product of swaps and translations.
    pub fn random<R: Rng + ?Sized>(space: &OdometerSpace, rng: &mut R, steps: usize) -> FullGroupElement {
        let mut t = FullGroupElement::identity(space);
        for _ in 0..steps {
            let step = if rng.gen_bool(0.25) {
                let g = random_label(space, rng);
                FullGroupElement::translation(space, &g).expect("label dimension")
            } else {
                random_swap(space, rng)
            };
            t = step.compose(&t).expect("same space");
        }
        t
    }
}

fn random_label<R: Rng + ?Sized>(space: &OdometerSpace, rng: &mut R) -> GroupElement {
    GroupElement::lattice(
        (0..space.dim())
            .map(|i| {
                let m = space.modulus(i) as i64;
                rng.gen_range(-m..=m)
            })
            .collect::<Vec<_>>(),
    )
}

fn random_swap<R: Rng + ?Sized>(space: &OdometerSpace, rng: &mut R) -> FullGroupElement {
    loop {
        let k = rng.gen_range(1..=space.depth());
        let x = space.random_point(rng);
        let c = ClopenSet::new(space, vec![space.cylinder_of(&x, k)]).expect("single cylinder");
        let g = random_label(space, rng);
        if c.is_disjoint(space, &c.translate(space, g.as_lattice().expect("lattice"))) {
            return FullGroupElement::swap(space, &c, &g).expect("disjoint swap is a bijection");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdWitness {
    pub sample: usize,
    pub point: Vec<String>,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdReport {
    pub g: GroupElement,
    pub samples: usize,
    pub points_checked: usize,
    pub pass: bool,
    pub witness: Option<AdWitness>,
}

/// Checks that translation by `g` intertwines `T` with its conjugate:
/// `apply(gTg⁻¹, x + g) = apply(T, x) + g` for every depth-N point `x`.
pub fn ad_realization_check(g: &GroupElement, samples: &[FullGroupElement], space: &OdometerSpace) -> Result<AdReport> {
    let pairs = samples.iter().map(|t| Ok((t.clone(), t.conjugate(g)?))).collect::<Result<Vec<_>>>()?;
    check_spatial_realization(g, &pairs, space)
}

/// The intertwining check on explicit `(T, claimed conjugate)` pairs.
pub fn check_spatial_realization(
    g: &GroupElement,
    pairs: &[(FullGroupElement, FullGroupElement)],
    space: &OdometerSpace,
) -> Result<AdReport> {
    let v = label_vector(space, g)?;
    let points = space.points()?;
    let mut checked = 0;
    for (k, (t, conj)) in pairs.iter().enumerate() {
        for x in &points {
            checked += 1;
            let expected = space.add(&t.apply(x), v)?;
            let found = conj.apply(&space.add(x, v)?);
            if found != expected {
                return Ok(AdReport {
                    g: g.clone(),
                    samples: pairs.len(),
                    points_checked: checked,
                    pass: false,
                    witness: Some(AdWitness {
                        sample: k,
                        point: space.digits(x),
                        expected: space.digits(&expected),
                        found: space.digits(&found),
                    }),
                });
            }
        }
    }
    Ok(AdReport { g: g.clone(), samples: pairs.len(), points_checked: checked, pass: true, witness: None })
}

struct Record<'a> {
    cylinder: Vec<String>,
    label: &'a GroupElement,
}

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Record", 2)?;
        st.serialize_field("cylinder", &self.cylinder)?;
        st.serialize_field("label", self.label)?;
        st.end()
    }
}

/// One `{cylinder, label}` record per cylinder of every piece.
impl Serialize for FullGroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.pieces.iter().map(|p| p.set.cylinders().len()).sum();
        let mut seq = s.serialize_seq(Some(n))?;
        for p in &self.pieces {
            for c in p.set.cylinders() {
                seq.serialize_element(&Record { cylinder: self.space.cylinder_digits(c), label: &p.label })?;
            }
        }
        seq.end()
    }
}
