//! Finitely generated groups as metric spaces.
//!
//! Two families are supported: the lattices `Z^d` and the free groups `F_k`.
//! Elements carry their payload directly ([`GroupElement::Lattice`] holds an
//! integer vector, [`GroupElement::Word`] a reduced word), while the ambient
//! [`Group`] is tracked by the [`GeneratingSet`] used to measure them.
//!
//! Word lengths are computed by breadth-first search over the Cayley graph
//! and memoized inside a [`WordMetric`]. The search is bounded by a radius
//! budget; asking for an element beyond it is an error, never a guess.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default BFS radius budget of a [`WordMetric`].
pub const DEFAULT_SEARCH_RADIUS: u32 = 32;

/// The ambient group of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    /// `Z^dim`
    Lattice { dim: usize },
    /// The free group on `rank` generators.
    Free { rank: usize },
}

impl Group {
    pub fn identity(&self) -> GroupElement {
        match *self {
            Group::Lattice { dim } => GroupElement::Lattice(vec![0; dim]),
            Group::Free { .. } => GroupElement::Word(Vec::new()),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Group::Lattice { dim }, GroupElement::Lattice(v)) => v.len() == *dim,
            (Group::Free { rank }, GroupElement::Word(w)) => w.iter().all(|l| l.generator() <= *rank),
            _ => false,
        }
    }

    /// Standard generators and their inverses: `±e_i` or `a_i^{±1}`.
    pub fn standard_generators(&self) -> Vec<GroupElement> {
        match *self {
            Group::Lattice { dim } => (0..dim)
                .flat_map(|i| {
                    [1i64, -1].into_iter().map(move |s| {
                        let mut v = vec![0; dim];
                        v[i] = s;
                        GroupElement::Lattice(v)
                    })
                })
                .collect(),
            Group::Free { rank } => (1..=rank)
                .flat_map(|i| {
                    [false, true]
                        .into_iter()
                        .map(move |inv| GroupElement::Word(vec![Letter::new(i, inv)]))
                })
                .collect(),
        }
    }

    pub(crate) fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{g} is not an element of {self:?}")))
        }
    }
}

/// A generator of a free group or its inverse.
///
/// Generators are numbered from 1 and printed as `a, b, c, …`; inverses are
/// printed in upper case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are numbered from 1");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn symbol(self) -> char {
        let base = (b'a' + (self.generator() - 1) as u8) as char;
        if self.is_inverse() {
            base.to_ascii_uppercase()
        } else {
            base
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        if !c.is_ascii_alphabetic() {
            return None;
        }
        let g = (c.to_ascii_lowercase() as u8 - b'a') as usize + 1;
        Some(Letter::new(g, c.is_ascii_uppercase()))
    }
}

// a < A < b < B < …
impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.generator(), self.is_inverse()).cmp(&(other.generator(), other.is_inverse()))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `Z^d` or of a free group.
///
/// Words are kept freely reduced at all times, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Lattice(Vec<i64>),
    Word(Vec<Letter>),
}

impl GroupElement {
    pub fn lattice(v: impl Into<Vec<i64>>) -> GroupElement {
        GroupElement::Lattice(v.into())
    }

    /// Parses a word such as `"abA"` (upper case = inverse) and reduces it.
    pub fn word(s: &str) -> Result<GroupElement> {
        let letters = s
            .chars()
            .map(|c| Letter::from_symbol(c).ok_or_else(|| Error::Invalid(format!("bad generator symbol {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupElement::Word(reduce(letters)))
    }

    pub fn as_lattice(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Lattice(v) => Some(v),
            GroupElement::Word(_) => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Lattice(v) => v.iter().all(|&x| x == 0),
            GroupElement::Word(w) => w.is_empty(),
        }
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                if a.len() != b.len() {
                    return Err(Error::GroupMismatch(format!(
                        "lattice dimensions {} and {}",
                        a.len(),
                        b.len()
                    )));
                }
                Ok(GroupElement::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (GroupElement::Word(a), GroupElement::Word(b)) => {
                let mut out = a.clone();
                for &l in b {
                    if out.last() == Some(&l.inverse()) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Ok(GroupElement::Word(out))
            }
            _ => Err(Error::GroupMismatch(format!("cannot multiply {self} and {other}"))),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Lattice(v) => GroupElement::Lattice(v.iter().map(|x| -x).collect()),
            GroupElement::Word(w) => GroupElement::Word(w.iter().rev().map(|l| l.inverse()).collect()),
        }
    }

    /// `self⁻¹ · other`
    pub fn left_divide(&self, other: &GroupElement) -> Result<GroupElement> {
        self.inverse().multiply(other)
    }
}

fn reduce(letters: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Lattice(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            GroupElement::Word(w) if w.is_empty() => write!(f, "e"),
            GroupElement::Word(w) => w.iter().try_for_each(|l| write!(f, "{}", l.symbol())),
        }
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GroupElement::Lattice(v) => v.serialize(serializer),
            GroupElement::Word(w) => serializer.serialize_str(&w.iter().map(|l| l.symbol()).collect::<String>()),
        }
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ElementVisitor;

        impl<'de> Visitor<'de> for ElementVisitor {
            type Value = GroupElement;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer array or a word string")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<GroupElement, E> {
                GroupElement::word(s).map_err(E::custom)
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<GroupElement, A::Error> {
                let mut v = Vec::new();
                while let Some(x) = seq.next_element::<i64>()? {
                    v.push(x);
                }
                Ok(GroupElement::Lattice(v))
            }
        }

        deserializer.deserialize_any(ElementVisitor)
    }
}

/// A finite symmetric generating set not containing the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    group: Group,
    elements: Vec<GroupElement>,
}

impl GeneratingSet {
    /// Validates symmetry, absence of the identity, and generation.
    ///
    /// Generation is only checked up to [`DEFAULT_SEARCH_RADIUS`]: the set is
    /// accepted if every standard generator of `group` is a product of at most
    /// that many elements of `elements`.
    pub fn new(group: Group, elements: Vec<GroupElement>) -> Result<GeneratingSet> {
        if elements.is_empty() {
            return Err(Error::InvalidGenerators("empty generating set".into()));
        }
        for s in &elements {
            group.check(s)?;
            if s.is_identity() {
                return Err(Error::InvalidGenerators("contains the identity".into()));
            }
            if !elements.contains(&s.inverse()) {
                return Err(Error::InvalidGenerators(format!("not symmetric: {s} has no inverse in the set")));
            }
        }
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let set = GeneratingSet { group, elements };
        let metric = WordMetric::new(set.clone());
        for e in group.standard_generators() {
            metric.word_length(&e).map_err(|_| {
                Error::InvalidGenerators(format!(
                    "{e} is not reached within radius {DEFAULT_SEARCH_RADIUS}; the set does not generate"
                ))
            })?;
        }
        Ok(set)
    }

    pub fn standard(group: Group) -> GeneratingSet {
        let mut elements = group.standard_generators();
        elements.sort();
        GeneratingSet { group, elements }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }
}

#[derive(Debug)]
struct BfsState {
    dist: HashMap<GroupElement, u32>,
    frontier: Vec<GroupElement>,
    /// All elements of length `<= complete` are in `dist`.
    complete: u32,
}

/// Word metric of a generating set, backed by a memoized Cayley-graph BFS.
///
/// The memo is guarded by a lock, so a metric can be shared between threads.
#[derive(Debug)]
pub struct WordMetric {
    gens: GeneratingSet,
    budget: u32,
    state: RwLock<BfsState>,
}

impl WordMetric {
    pub fn new(gens: GeneratingSet) -> WordMetric {
        WordMetric::with_budget(gens, DEFAULT_SEARCH_RADIUS)
    }

    pub fn standard(group: Group) -> WordMetric {
        WordMetric::new(GeneratingSet::standard(group))
    }

    pub fn with_budget(gens: GeneratingSet, budget: u32) -> WordMetric {
        let e = gens.group.identity();
        let mut dist = HashMap::new();
        dist.insert(e.clone(), 0);
        WordMetric {
            gens,
            budget,
            state: RwLock::new(BfsState { dist, frontier: vec![e], complete: 0 }),
        }
    }

    pub fn group(&self) -> Group {
        self.gens.group
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    fn expand_to(&self, radius: u32) {
        let mut st = self.state.write().expect("word metric lock poisoned");
        while st.complete < radius {
            let next_len = st.complete + 1;
            let mut next = Vec::new();
            let frontier = std::mem::take(&mut st.frontier);
            for g in &frontier {
                for s in &self.gens.elements {
                    let h = g.multiply(s).expect("generators belong to the group");
                    if !st.dist.contains_key(&h) {
                        st.dist.insert(h.clone(), next_len);
                        next.push(h);
                    }
                }
            }
            st.frontier = next;
            st.complete = next_len;
        }
    }

    /// `ℓ_S(g)`: the least number of generators whose product is `g`.
    pub fn word_length(&self, g: &GroupElement) -> Result<u32> {
        self.gens.group.check(g)?;
        loop {
            let complete = {
                let st = self.state.read().expect("word metric lock poisoned");
                if let Some(&d) = st.dist.get(g) {
                    return Ok(d);
                }
                st.complete
            };
            if complete >= self.budget {
                return Err(Error::OutsideSearchRadius { element: g.to_string(), radius: self.budget });
            }
            self.expand_to(complete + 1);
        }
    }

    /// `d(g, h) = ℓ_S(g⁻¹h)`
    pub fn distance(&self, g: &GroupElement, h: &GroupElement) -> Result<u32> {
        self.word_length(&g.left_divide(h)?)
    }

    /// `{g : ℓ_S(g) <= radius}` in lexicographic order.
    ///
    /// Not limited by the search budget.
    pub fn ball(&self, radius: u32) -> Vec<GroupElement> {
        self.expand_to(radius);
        let st = self.state.read().expect("word metric lock poisoned");
        let mut out: Vec<GroupElement> = st.dist.iter().filter(|(_, &d)| d <= radius).map(|(g, _)| g.clone()).collect();
        out.sort();
        out
    }
}

/// Outcome of a two-sided Lipschitz sweep over a ball.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub radius: u32,
    pub constant: f64,
    pub pass: bool,
    /// Smallest observed `d_Λ(f(g), f(h)) / d_Γ(g, h)`.
    pub min_ratio: f64,
    /// Largest observed ratio.
    pub max_ratio: f64,
    pub pairs: usize,
    pub witness: Option<LipschitzWitness>,
}

impl LipschitzReport {
    /// The tightest `C` with `C⁻¹ d <= d' <= C d` on the swept pairs.
    pub fn tightest_constant(&self) -> f64 {
        if self.pairs == 0 {
            return 1.0;
        }
        let inv = if self.min_ratio > 0.0 { 1.0 / self.min_ratio } else { f64::INFINITY };
        self.max_ratio.max(inv).max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzWitness {
    pub g: GroupElement,
    pub h: GroupElement,
    pub source_distance: u32,
    pub target_distance: u32,
}

const RATIO_SLACK: f64 = 1e-12;

/// Checks `C⁻¹ d_Γ(g,h) <= d_Λ(f(g), f(h)) <= C d_Γ(g,h)` for all pairs in
/// the ball of the given radius, and reports the empirical ratio range.
///
/// `f` must be defined on the whole ball; the first undefined point is an
/// error. The first violating pair is kept as a witness.
pub fn is_bilipschitz_on_ball<F>(
    f: F,
    radius: u32,
    constant: f64,
    source: &WordMetric,
    target: &WordMetric,
) -> Result<LipschitzReport>
where
    F: Fn(&GroupElement) -> Result<GroupElement>,
{
    let ball = source.ball(radius);
    let images = ball.iter().map(&f).collect::<Result<Vec<_>>>()?;
    bilipschitz_on_points(&ball, &images, radius, constant, source, target)
}

/// Lipschitz sweep over an explicit finite domain with precomputed images.
pub(crate) fn bilipschitz_on_points(
    domain: &[GroupElement],
    images: &[GroupElement],
    radius: u32,
    constant: f64,
    source: &WordMetric,
    target: &WordMetric,
) -> Result<LipschitzReport> {
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut witness = None;
    let mut pairs = 0;
    for i in 0..domain.len() {
        for j in (i + 1)..domain.len() {
            let d = source.distance(&domain[i], &domain[j])?;
            let dd = target.distance(&images[i], &images[j])?;
            let (d, ddf) = (d as f64, dd as f64);
            let ratio = ddf / d;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            pairs += 1;
            let ok = ddf * constant >= d * (1.0 - RATIO_SLACK) && ddf <= constant * d * (1.0 + RATIO_SLACK);
            if !ok && witness.is_none() {
                witness = Some(LipschitzWitness {
                    g: domain[i].clone(),
                    h: domain[j].clone(),
                    source_distance: d as u32,
                    target_distance: dd,
                });
            }
        }
    }
    if pairs == 0 {
        min_ratio = 1.0;
        max_ratio = 1.0;
    }
    Ok(LipschitzReport { radius, constant, pass: witness.is_none(), min_ratio, max_ratio, pairs, witness })
}
