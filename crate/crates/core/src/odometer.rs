//! Product p-adic odometers truncated at a finite digit depth.
//!
//! A point of `∏ Z_{p_i}` truncated at depth `N` is stored as the integer
//! values `x_i mod p_i^N`; its digit strings (least significant first) are
//! derived on demand. Because adding an integer or multiplying by an integer
//! matrix modulo `p^N` only reads the first `N` digits, every map here is
//! exact on truncations.
//!
//! Clopen sets are finite disjoint unions of cylinders. A cylinder fixes a
//! digit prefix in each coordinate; its Haar measure is `∏ p_i^{-len_i}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement, WordMetric};
use crate::matrix::{int_det, IntMatrix};
use crate::report::Verdict;

const MAX_BASE: u32 = 36;
const MAX_MODULUS_BITS: u32 = 62;
/// Largest point set swept exhaustively by the depth-N checks.
pub const EXHAUSTIVE_BUDGET: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OdometerSpace {
    bases: Vec<u32>,
    depth: u32,
    #[serde(skip)]
    moduli: Vec<u64>,
}

/// A point truncated at the depth of its space, one value per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitPoint {
    coords: Vec<u64>,
}

impl DigitPoint {
    pub fn values(&self) -> &[u64] {
        &self.coords
    }
}

/// `x ≡ value (mod p^len)`: the first `len` digits are fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prefix {
    pub len: u32,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    prefixes: Vec<Prefix>,
}

impl Cylinder {
    pub fn prefixes(&self) -> &[Prefix] {
        &self.prefixes
    }
}

impl OdometerSpace {
    pub fn new(bases: Vec<u32>, depth: u32) -> Result<OdometerSpace> {
        if bases.is_empty() {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if depth == 0 {
            return Err(Error::InvalidSpace("depth must be at least 1".into()));
        }
        let mut moduli = Vec::with_capacity(bases.len());
        for &p in &bases {
            if !(2..=MAX_BASE).contains(&p) {
                return Err(Error::InvalidSpace(format!("base {p} outside 2..={MAX_BASE}")));
            }
            let m = (p as u64)
                .checked_pow(depth)
                .filter(|m| *m < 1u64 << MAX_MODULUS_BITS)
                .ok_or_else(|| Error::InvalidSpace(format!("{p}^{depth} is too large")))?;
            moduli.push(m);
        }
        Ok(OdometerSpace { bases, depth, moduli })
    }

    /// `Z_p^dim` at the given depth.
    pub fn uniform(p: u32, dim: usize, depth: u32) -> Result<OdometerSpace> {
        OdometerSpace::new(vec![p; dim], depth)
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn modulus(&self, i: usize) -> u64 {
        self.moduli[i]
    }

    fn power(&self, i: usize, len: u32) -> u64 {
        (self.bases[i] as u64).pow(len)
    }

    /// The single base, if all coordinates share it.
    pub fn common_base(&self) -> Option<u32> {
        let p = self.bases[0];
        self.bases.iter().all(|&q| q == p).then_some(p)
    }

    pub fn point_count(&self) -> u128 {
        self.moduli.iter().map(|&m| m as u128).product()
    }

    pub fn point(&self, values: Vec<u64>) -> Result<DigitPoint> {
        if values.len() != self.dim() {
            return Err(Error::GroupMismatch(format!("expected {} coordinates", self.dim())));
        }
        if let Some(i) = (0..self.dim()).find(|&i| values[i] >= self.moduli[i]) {
            return Err(Error::Invalid(format!("coordinate {i} out of range")));
        }
        Ok(DigitPoint { coords: values })
    }

    pub fn zero(&self) -> DigitPoint {
        DigitPoint { coords: vec![0; self.dim()] }
    }

    /// Parses one digit string per coordinate, least significant digit first.
    pub fn parse_point<S: AsRef<str>>(&self, digits: &[S]) -> Result<DigitPoint> {
        if digits.len() != self.dim() {
            return Err(Error::GroupMismatch(format!("expected {} digit strings", self.dim())));
        }
        let mut coords = Vec::with_capacity(self.dim());
        for (i, s) in digits.iter().enumerate() {
            let s = s.as_ref();
            if s.chars().count() != self.depth as usize {
                return Err(Error::Invalid(format!("digit string {s:?} must have length {}", self.depth)));
            }
            coords.push(self.parse_digits(i, s)?);
        }
        Ok(DigitPoint { coords })
    }

    fn parse_digits(&self, i: usize, s: &str) -> Result<u64> {
        let p = self.bases[i];
        let mut value = 0u64;
        for (k, c) in s.chars().enumerate() {
            let d = c
                .to_digit(MAX_BASE)
                .filter(|&d| d < p)
                .ok_or_else(|| Error::Invalid(format!("digit {c:?} invalid in base {p}")))?;
            value += d as u64 * self.power(i, k as u32);
        }
        Ok(value)
    }

    fn format_digits(&self, i: usize, value: u64, len: u32) -> String {
        let p = self.bases[i] as u64;
        let mut v = value;
        (0..len)
            .map(|_| {
                let d = (v % p) as u32;
                v /= p;
                std::char::from_digit(d, MAX_BASE).expect("digit below base")
            })
            .collect()
    }

    /// Digit strings, least significant first.
    pub fn digits(&self, x: &DigitPoint) -> Vec<String> {
        (0..self.dim()).map(|i| self.format_digits(i, x.coords[i], self.depth)).collect()
    }

    /// Coordinatewise addition with carry: `x_i + v_i mod p_i^N`.
    pub fn add(&self, x: &DigitPoint, v: &[i64]) -> Result<DigitPoint> {
        if v.len() != self.dim() || x.coords.len() != self.dim() {
            return Err(Error::GroupMismatch(format!("expected dimension {}", self.dim())));
        }
        let coords = (0..self.dim())
            .map(|i| {
                let m = self.moduli[i] as i128;
                (x.coords[i] as i128 + v[i] as i128).rem_euclid(m) as u64
            })
            .collect();
        Ok(DigitPoint { coords })
    }

    /// The action of a lattice element.
    pub fn translate(&self, x: &DigitPoint, g: &GroupElement) -> Result<DigitPoint> {
        let v = g
            .as_lattice()
            .ok_or_else(|| Error::GroupMismatch(format!("{g} does not act on an odometer")))?;
        self.add(x, v)
    }

    /// Every depth-N point, in index order. Fails above [`EXHAUSTIVE_BUDGET`].
    pub fn points(&self) -> Result<Vec<DigitPoint>> {
        let n = self.point_count();
        if n > EXHAUSTIVE_BUDGET {
            return Err(Error::Budget(format!("{n} points exceed the exhaustive budget {EXHAUSTIVE_BUDGET}")));
        }
        Ok((0..n).map(|k| self.point_at(k)).collect())
    }

    fn point_at(&self, mut k: u128) -> DigitPoint {
        let coords = self
            .moduli
            .iter()
            .map(|&m| {
                let c = (k % m as u128) as u64;
                k /= m as u128;
                c
            })
            .collect();
        DigitPoint { coords }
    }

    fn index_of(&self, x: &DigitPoint) -> u128 {
        let mut idx = 0u128;
        for i in (0..self.dim()).rev() {
            idx = idx * self.moduli[i] as u128 + x.coords[i] as u128;
        }
        idx
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DigitPoint {
        DigitPoint { coords: self.moduli.iter().map(|&m| rng.gen_range(0..m)).collect() }
    }

    fn check_matrix(&self, a: &IntMatrix) -> Result<()> {
        if self.common_base().is_none() {
            return Err(Error::MixedBases);
        }
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::GroupMismatch(format!("matrix must be {0}x{0}", self.dim())));
        }
        let det = int_det(a);
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(())
    }

    /// `A · x mod p^N`, for a single base and `det A = ±1`.
    pub fn matrix_act(&self, a: &IntMatrix, x: &DigitPoint) -> Result<DigitPoint> {
        self.check_matrix(a)?;
        Ok(self.matrix_act_unchecked(a, x))
    }

    pub(crate) fn matrix_act_unchecked(&self, a: &IntMatrix, x: &DigitPoint) -> DigitPoint {
        let m = self.moduli[0] as i128;
        let coords = (0..self.dim())
            .map(|i| {
                (0..self.dim()).fold(0i128, |acc, j| {
                    let term = (a[(i, j)] as i128).rem_euclid(m) * x.coords[j] as i128 % m;
                    (acc + term) % m
                }) as u64
            })
            .collect();
        DigitPoint { coords }
    }

    /// The depth-`k` cylinder containing `x`.
    pub fn cylinder_of(&self, x: &DigitPoint, k: u32) -> Cylinder {
        let prefixes = (0..self.dim())
            .map(|i| Prefix { len: k, value: x.coords[i] % self.power(i, k) })
            .collect();
        Cylinder { prefixes }
    }

    /// Builds a cylinder from per-coordinate digit prefixes (possibly empty).
    pub fn cylinder<S: AsRef<str>>(&self, prefixes: &[S]) -> Result<Cylinder> {
        if prefixes.len() != self.dim() {
            return Err(Error::GroupMismatch(format!("expected {} prefixes", self.dim())));
        }
        let mut out = Vec::with_capacity(self.dim());
        for (i, s) in prefixes.iter().enumerate() {
            let s = s.as_ref();
            let len = s.chars().count() as u32;
            if len > self.depth {
                return Err(Error::DepthExceeded { depth: self.depth });
            }
            out.push(Prefix { len, value: self.parse_digits(i, s)? });
        }
        Ok(Cylinder { prefixes: out })
    }

    pub fn cylinder_digits(&self, c: &Cylinder) -> Vec<String> {
        c.prefixes.iter().enumerate().map(|(i, p)| self.format_digits(i, p.value, p.len)).collect()
    }

    pub fn whole(&self) -> ClopenSet {
        ClopenSet { cylinders: vec![Cylinder { prefixes: vec![Prefix { len: 0, value: 0 }; self.dim()] }] }
    }

    // cylinder algebra

    fn prefix_compatible(&self, i: usize, a: Prefix, b: Prefix) -> bool {
        let short = a.len.min(b.len);
        let m = self.power(i, short);
        a.value % m == b.value % m
    }

    pub fn cylinder_contains(&self, c: &Cylinder, x: &DigitPoint) -> bool {
        c.prefixes.iter().enumerate().all(|(i, p)| x.coords[i] % self.power(i, p.len) == p.value)
    }

    pub fn cylinder_intersect(&self, a: &Cylinder, b: &Cylinder) -> Option<Cylinder> {
        let mut prefixes = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let (pa, pb) = (a.prefixes[i], b.prefixes[i]);
            if !self.prefix_compatible(i, pa, pb) {
                return None;
            }
            prefixes.push(if pa.len >= pb.len { pa } else { pb });
        }
        Some(Cylinder { prefixes })
    }

    pub fn cylinder_translate(&self, c: &Cylinder, v: &[i64]) -> Cylinder {
        let prefixes = c
            .prefixes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let m = self.power(i, p.len) as i128;
                Prefix { len: p.len, value: (p.value as i128 + v[i] as i128).rem_euclid(m) as u64 }
            })
            .collect();
        Cylinder { prefixes }
    }

    pub fn cylinder_measure(&self, c: &Cylinder) -> BigRational {
        let den: BigInt = c
            .prefixes
            .iter()
            .enumerate()
            .map(|(i, p)| BigInt::from(self.power(i, p.len)))
            .product();
        BigRational::new(BigInt::one(), den)
    }

    /// Disjoint cylinders covering the complement of `c`.
    fn cylinder_complement(&self, c: &Cylinder) -> Vec<Cylinder> {
        let mut out = Vec::new();
        let mut fixed: Vec<Prefix> = vec![Prefix { len: 0, value: 0 }; self.dim()];
        for i in 0..self.dim() {
            let target = c.prefixes[i];
            let p = self.bases[i] as u64;
            for t in 0..target.len {
                let pt = self.power(i, t);
                let base_value = target.value % pt;
                let own_digit = (target.value / pt) % p;
                for d in (0..p).filter(|&d| d != own_digit) {
                    let mut prefixes = fixed.clone();
                    prefixes[i] = Prefix { len: t + 1, value: base_value + d * pt };
                    out.push(Cylinder { prefixes });
                }
            }
            fixed[i] = target;
        }
        out
    }

    fn check_cylinder(&self, c: &Cylinder) -> Result<()> {
        if c.prefixes.len() != self.dim() {
            return Err(Error::GroupMismatch(format!("cylinder must have {} prefixes", self.dim())));
        }
        for (i, p) in c.prefixes.iter().enumerate() {
            if p.len > self.depth {
                return Err(Error::DepthExceeded { depth: self.depth });
            }
            if p.value >= self.power(i, p.len) {
                return Err(Error::Invalid(format!("prefix value {} too large for length {}", p.value, p.len)));
            }
        }
        Ok(())
    }
}

/// A finite disjoint union of cylinders, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClopenSet {
    cylinders: Vec<Cylinder>,
}

impl ClopenSet {
    /// Validates prefix ranges and pairwise disjointness.
    pub fn new(space: &OdometerSpace, cylinders: Vec<Cylinder>) -> Result<ClopenSet> {
        for c in &cylinders {
            space.check_cylinder(c)?;
        }
        haar_measure(&cylinders, space)?;
        Ok(ClopenSet::from_disjoint(cylinders))
    }

    fn from_disjoint(mut cylinders: Vec<Cylinder>) -> ClopenSet {
        cylinders.sort();
        ClopenSet { cylinders }
    }

    pub fn empty() -> ClopenSet {
        ClopenSet::default()
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn contains(&self, space: &OdometerSpace, x: &DigitPoint) -> bool {
        self.cylinders.iter().any(|c| space.cylinder_contains(c, x))
    }

    pub fn intersect(&self, space: &OdometerSpace, other: &ClopenSet) -> ClopenSet {
        let cylinders = self
            .cylinders
            .iter()
            .flat_map(|a| other.cylinders.iter().filter_map(move |b| space.cylinder_intersect(a, b)))
            .collect();
        ClopenSet::from_disjoint(cylinders)
    }

    pub fn is_disjoint(&self, space: &OdometerSpace, other: &ClopenSet) -> bool {
        self.intersect(space, other).is_empty()
    }

    pub fn translate(&self, space: &OdometerSpace, v: &[i64]) -> ClopenSet {
        ClopenSet::from_disjoint(self.cylinders.iter().map(|c| space.cylinder_translate(c, v)).collect())
    }

    pub fn complement(&self, space: &OdometerSpace) -> ClopenSet {
        let mut acc = space.whole();
        for c in &self.cylinders {
            let outside = ClopenSet::from_disjoint(space.cylinder_complement(c));
            acc = acc.intersect(space, &outside);
        }
        acc.coalesce(space)
    }

    /// Union of two disjoint sets.
    pub fn union(&self, space: &OdometerSpace, other: &ClopenSet) -> Result<ClopenSet> {
        if !self.is_disjoint(space, other) {
            return Err(Error::Overlap);
        }
        let mut cylinders = self.cylinders.clone();
        cylinders.extend(other.cylinders.iter().cloned());
        Ok(ClopenSet::from_disjoint(cylinders))
    }

    pub fn measure(&self, space: &OdometerSpace) -> BigRational {
        self.cylinders.iter().map(|c| space.cylinder_measure(c)).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Merges complete families of sibling cylinders into their parent until
    /// none remain.
    pub fn coalesce(&self, space: &OdometerSpace) -> ClopenSet {
        let mut set: BTreeSet<Cylinder> = self.cylinders.iter().cloned().collect();
        loop {
            let mut merged = None;
            'search: for c in &set {
                for i in 0..space.dim() {
                    let pr = c.prefixes[i];
                    if pr.len == 0 {
                        continue;
                    }
                    let parent_len = pr.len - 1;
                    let step = space.power(i, parent_len);
                    let parent_value = pr.value % step;
                    let siblings: Vec<Cylinder> = (0..space.bases[i] as u64)
                        .map(|d| {
                            let mut s = c.clone();
                            s.prefixes[i] = Prefix { len: pr.len, value: parent_value + d * step };
                            s
                        })
                        .collect();
                    if siblings.iter().all(|s| set.contains(s)) {
                        let mut parent = c.clone();
                        parent.prefixes[i] = Prefix { len: parent_len, value: parent_value };
                        merged = Some((siblings, parent));
                        break 'search;
                    }
                }
            }
            match merged {
                Some((siblings, parent)) => {
                    for s in &siblings {
                        set.remove(s);
                    }
                    set.insert(parent);
                }
                None => break,
            }
        }
        ClopenSet { cylinders: set.into_iter().collect() }
    }

    pub fn digit_prefixes(&self, space: &OdometerSpace) -> Vec<Vec<String>> {
        self.cylinders.iter().map(|c| space.cylinder_digits(c)).collect()
    }
}

/// Exact Haar measure of a union of cylinders; they must be pairwise disjoint.
pub fn haar_measure(cylinders: &[Cylinder], space: &OdometerSpace) -> Result<BigRational> {
    for (i, a) in cylinders.iter().enumerate() {
        for b in &cylinders[i + 1..] {
            if space.cylinder_intersect(a, b).is_some() {
                return Err(Error::Overlap);
            }
        }
    }
    Ok(cylinders.iter().map(|c| space.cylinder_measure(c)).fold(BigRational::zero(), |a, b| a + b))
}

/// `"num/den"`
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn check_partition(space: &OdometerSpace, blocks: &[ClopenSet]) -> Result<()> {
    let all: Vec<Cylinder> = blocks.iter().flat_map(|b| b.cylinders.iter().cloned()).collect();
    let total = haar_measure(&all, space).map_err(|_| Error::NotPartition("blocks overlap".into()))?;
    if !total.is_one() {
        return Err(Error::NotPartition(format!("total measure {}", ratio_string(&total))));
    }
    Ok(())
}

/// Coarsest common refinement of partitions of the whole space.
pub fn refine_common(space: &OdometerSpace, partitions: &[Vec<ClopenSet>]) -> Result<Vec<ClopenSet>> {
    for p in partitions {
        check_partition(space, p)?;
    }
    let mut acc = vec![space.whole()];
    for p in partitions {
        acc = acc
            .iter()
            .flat_map(|a| p.iter().map(move |b| a.intersect(space, b)))
            .filter(|s| !s.is_empty())
            .map(|s| s.coalesce(space))
            .collect();
    }
    acc.sort();
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BijectivityReport {
    pub points: u128,
    pub pass: bool,
    pub collision: Option<(Vec<String>, Vec<String>)>,
}

/// Checks that `x ↦ A x` permutes all depth-N points.
pub fn bijectivity_check(a: &IntMatrix, space: &OdometerSpace) -> Result<BijectivityReport> {
    space.check_matrix(a)?;
    bijectivity_check_map(space, |x| Ok(space.matrix_act_unchecked(a, x)))
}

/// Checks that an arbitrary map of depth-N points is a permutation; on
/// failure reports two points with the same image. Applied to
/// `x ↦ (p·x₁, x₂, …)` (not invertible over `Z_p`, so outside [`bijectivity_check`])
/// it finds a collision.
pub fn bijectivity_check_map<F>(space: &OdometerSpace, f: F) -> Result<BijectivityReport>
where
    F: Fn(&DigitPoint) -> Result<DigitPoint>,
{
    let points = space.points()?;
    let mut seen: Vec<Option<usize>> = vec![None; points.len()];
    for (k, x) in points.iter().enumerate() {
        let y = f(x)?;
        if y.coords.len() != space.dim() || y.coords.iter().zip(&space.moduli).any(|(c, m)| c >= m) {
            return Err(Error::Invalid("map leaves the odometer space".into()));
        }
        let idx = space.index_of(&y) as usize;
        if let Some(prev) = seen[idx] {
            return Ok(BijectivityReport {
                points: points.len() as u128,
                pass: false,
                collision: Some((space.digits(&points[prev]), space.digits(x))),
            });
        }
        seen[idx] = Some(k);
    }
    Ok(BijectivityReport { points: points.len() as u128, pass: true, collision: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub depth: u32,
    pub cylinders: u128,
    pub visited: u128,
    pub pass: bool,
}

/// Sweeps `g · 0` for `g ∈ ∏ [0, p_i^k)` and records which depth-`k`
/// cylinders are hit.
pub fn minimality_witness(space: &OdometerSpace, k: u32) -> Result<MinimalityReport> {
    if k > space.depth {
        return Err(Error::DepthExceeded { depth: space.depth });
    }
    let sizes: Vec<u64> = (0..space.dim()).map(|i| space.power(i, k)).collect();
    let total: u128 = sizes.iter().map(|&s| s as u128).product();
    if total > EXHAUSTIVE_BUDGET {
        return Err(Error::Budget(format!("{total} cylinders exceed the exhaustive budget")));
    }
    let zero = space.zero();
    let mut visited: BTreeSet<Cylinder> = BTreeSet::new();
    for idx in 0..total {
        let mut rest = idx;
        let g: Vec<i64> = sizes
            .iter()
            .map(|&s| {
                let c = (rest % s as u128) as i64;
                rest /= s as u128;
                c
            })
            .collect();
        let x = space.add(&zero, &g)?;
        visited.insert(space.cylinder_of(&x, k));
    }
    let visited = visited.len() as u128;
    Ok(MinimalityReport { depth: k, cylinders: total, visited, pass: visited == total })
}

pub const HAAR_ANCHOR: &str = "mu(A^-1 C) = mu(C) for every depth-k cylinder C";

/// Haar invariance of `x ↦ A x` at depth `k`: every depth-`k` cylinder has
/// exactly `p^{(N−k)d}` depth-N preimages.
pub fn haar_invariance_check(a: &IntMatrix, space: &OdometerSpace, k: u32) -> Result<Verdict> {
    space.check_matrix(a)?;
    if k > space.depth {
        return Err(Error::DepthExceeded { depth: space.depth });
    }
    let points = space.points()?;
    let mut counts: std::collections::BTreeMap<Cylinder, u128> = std::collections::BTreeMap::new();
    for x in &points {
        *counts.entry(space.cylinder_of(&space.matrix_act_unchecked(a, x), k)).or_insert(0) += 1;
    }
    let cylinders: u128 = (0..space.dim()).map(|i| space.power(i, k) as u128).product();
    let expected = points.len() as u128 / cylinders;
    let mut v = Verdict::new("haar-invariance", HAAR_ANCHOR);
    v.record(counts.len() as u128 == cylinders, || format!("only {} of {cylinders} cylinders are hit", counts.len()));
    for (c, n) in &counts {
        v.record(*n == expected, || format!("cylinder {:?} has {n} preimages, expected {expected}", space.cylinder_digits(c)));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WanderingReport {
    pub radius: u32,
    /// A nonidentity `g` with `gU ∩ U ≠ ∅`, if one exists in the ball.
    pub witness: Option<GroupElement>,
}

/// Searches the ball of radius `radius` (shortest elements first) for a
/// translate of `u` that meets `u`.
pub fn wandering_check(u: &ClopenSet, radius: u32, space: &OdometerSpace) -> Result<WanderingReport> {
    if u.is_empty() {
        return Err(Error::EmptySet);
    }
    let metric = WordMetric::standard(Group::Lattice { dim: space.dim() });
    let mut ball = metric.ball(radius);
    ball.sort_by_key(|g| (g.as_lattice().map(|v| v.iter().map(|x| x.abs()).sum::<i64>()), g.clone()));
    for g in ball.into_iter().filter(|g| !g.is_identity()) {
        let moved = u.translate(space, g.as_lattice().expect("lattice ball"));
        if !moved.is_disjoint(space, u) {
            return Ok(WanderingReport { radius, witness: Some(g) });
        }
    }
    Ok(WanderingReport { radius, witness: None })
}
