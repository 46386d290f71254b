//! Bi-Lipschitz self-maps of `Z^d` at bounded distance from a linear map.
//!
//! A real matrix with `det = ±1` factors into elementary shears
//! `E_ij(λ) = I + λ e_i e_jᵀ` and coordinate sign flips. Each shear is
//! realized on the lattice by the floor shear `v_i ↦ v_i + ⌊λ v_j⌋`, which is
//! a bijection (its inverse subtracts the same floor, since `v_j` is
//! untouched) and stays within distance 1 of the linear shear. Composing the
//! realized factors gives a bijection `f_A` of `Z^d` at bounded distance
//! from `A`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::cocycle::CocycleTable;
use crate::error::{Error, Result};
use crate::group::{is_bilipschitz_on_ball, GroupElement, LipschitzReport, WordMetric};
use crate::matrix::{max_entry_distance, RealMatrix};

/// Pivots smaller than this are treated as zero.
pub const PIVOT_THRESHOLD: f64 = 1e-12;
/// Default tolerance for `|det A| = 1` and for the reconstruction check.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Shear factors this close to an integer are snapped to it, and factors this
/// close to zero are dropped.
const SNAP: f64 = 1e-12;

/// One elementary factor, with 0-based coordinates.
///
/// Displayed and serialized with 1-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "OpRepr", try_from = "OpRepr")]
pub enum ElementaryOp {
    /// `v[target] += λ v[source]`
    Shear { target: usize, source: usize, factor: f64 },
    /// `v[coord] = -v[coord]`
    SignFlip { coord: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum OpRepr {
    Shear(usize, usize, String),
    SignFlip(usize),
}

impl From<ElementaryOp> for OpRepr {
    fn from(op: ElementaryOp) -> OpRepr {
        match op {
            ElementaryOp::Shear { target, source, factor } => OpRepr::Shear(target + 1, source + 1, factor.to_string()),
            ElementaryOp::SignFlip { coord } => OpRepr::SignFlip(coord + 1),
        }
    }
}

impl TryFrom<OpRepr> for ElementaryOp {
    type Error = Error;

    fn try_from(r: OpRepr) -> Result<ElementaryOp> {
        match r {
            OpRepr::Shear(i, j, s) => {
                let factor: f64 = s.parse().map_err(|_| Error::Invalid(format!("bad shear factor {s:?}")))?;
                ElementaryOp::shear(i.wrapping_sub(1), j.wrapping_sub(1), factor)
            }
            OpRepr::SignFlip(0) => Err(Error::Invalid("coordinates are 1-based".into())),
            OpRepr::SignFlip(i) => Ok(ElementaryOp::SignFlip { coord: i - 1 }),
        }
    }
}

impl fmt::Display for ElementaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryOp::Shear { target, source, factor } => write!(f, "shear({},{},{})", target + 1, source + 1, factor),
            ElementaryOp::SignFlip { coord } => write!(f, "sign_flip({})", coord + 1),
        }
    }
}

impl ElementaryOp {
    /// A shear with 0-based coordinates.
    pub fn shear(target: usize, source: usize, factor: f64) -> Result<ElementaryOp> {
        if target == source || target == usize::MAX || source == usize::MAX {
            return Err(Error::Invalid(format!("shear needs two distinct coordinates, got {target} and {source}")));
        }
        if !factor.is_finite() {
            return Err(Error::Invalid("shear factor must be finite".into()));
        }
        Ok(ElementaryOp::Shear { target, source, factor })
    }

    fn max_coord(&self) -> usize {
        match *self {
            ElementaryOp::Shear { target, source, .. } => target.max(source),
            ElementaryOp::SignFlip { coord } => coord,
        }
    }

    pub fn inverse(&self) -> ElementaryOp {
        match *self {
            ElementaryOp::Shear { target, source, factor } => ElementaryOp::Shear { target, source, factor: -factor },
            flip => flip,
        }
    }

    pub fn matrix(&self, dim: usize) -> RealMatrix {
        let mut m = RealMatrix::identity(dim, dim);
        match *self {
            ElementaryOp::Shear { target, source, factor } => m[(target, source)] = factor,
            ElementaryOp::SignFlip { coord } => m[(coord, coord)] = -1.0,
        }
        m
    }

    /// Left multiplication by this factor, in place.
    fn apply_rows(&self, w: &mut RealMatrix) {
        match *self {
            ElementaryOp::Shear { target, source, factor } => {
                for c in 0..w.ncols() {
                    let add = factor * w[(source, c)];
                    w[(target, c)] += add;
                }
            }
            ElementaryOp::SignFlip { coord } => {
                for c in 0..w.ncols() {
                    w[(coord, c)] = -w[(coord, c)];
                }
            }
        }
    }

    /// The lattice realization: floor shear or sign flip, in place.
    pub fn apply_int(&self, v: &mut [i64]) {
        match *self {
            ElementaryOp::Shear { target, source, factor } => v[target] += floor_times(factor, v[source]),
            ElementaryOp::SignFlip { coord } => v[coord] = -v[coord],
        }
    }

    /// Exact inverse of [`ElementaryOp::apply_int`].
    pub fn unapply_int(&self, v: &mut [i64]) {
        match *self {
            ElementaryOp::Shear { target, source, factor } => v[target] -= floor_times(factor, v[source]),
            ElementaryOp::SignFlip { coord } => v[coord] = -v[coord],
        }
    }
}

fn floor_times(factor: f64, x: i64) -> i64 {
    if factor.fract() == 0.0 {
        factor as i64 * x
    } else {
        (factor * x as f64).floor() as i64
    }
}

/// `v` with `v_i` replaced by `v_i + ⌊λ v_j⌋` (or the sign flip).
pub fn floor_shear_apply(op: &ElementaryOp, v: &[i64]) -> Vec<i64> {
    let mut w = v.to_vec();
    op.apply_int(&mut w);
    w
}

/// Product `ops[0] · ops[1] ⋯` of the elementary matrices.
pub fn ops_product(dim: usize, ops: &[ElementaryOp]) -> RealMatrix {
    let mut m = RealMatrix::identity(dim, dim);
    for op in ops.iter().rev() {
        op.apply_rows(&mut m);
    }
    m
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SNAP {
        r
    } else {
        x
    }
}

/// Left-multiplication record for the elimination: `w ← M w`, with `M`
/// appended to `log`.
struct Eliminator {
    w: RealMatrix,
    log: Vec<ElementaryOp>,
}

impl Eliminator {
    fn push(&mut self, op: ElementaryOp) {
        if let ElementaryOp::Shear { factor, .. } = op {
            if factor.abs() <= SNAP {
                return;
            }
        }
        op.apply_rows(&mut self.w);
        self.log.push(op);
    }

    fn shear(&mut self, target: usize, source: usize, factor: f64) {
        self.push(ElementaryOp::Shear { target, source, factor: snap(factor) });
    }

    /// Left multiplication by the product `q_1 q_2 ⋯ q_m`.
    fn left_multiply_by_product(&mut self, product: &[ElementaryOp]) {
        for op in product.iter().rev() {
            self.push(*op);
        }
    }

    /// Rows `k` and `p` exchanged: `E_kp(1) E_pk(-1) E_kp(1) · flip(k)`.
    fn swap_rows(&mut self, k: usize, p: usize) {
        self.left_multiply_by_product(&swap_factors(k, p));
    }

    /// `diag(a, 1/a)` on coordinates `(i, j)`, via
    /// `w(a) w(-1)` with `w(a) = E_ij(a) E_ji(-1/a) E_ij(a)`.
    fn scale_pair(&mut self, i: usize, j: usize, a: f64) {
        let s = |t, u, f| ElementaryOp::Shear { target: t, source: u, factor: f };
        self.left_multiply_by_product(&[
            s(i, j, a),
            s(j, i, -1.0 / a),
            s(i, j, a),
            s(i, j, -1.0),
            s(j, i, 1.0),
            s(i, j, -1.0),
        ]);
    }
}

/// The four factors whose product is the transposition of coordinates `k, p`.
pub fn swap_factors(k: usize, p: usize) -> [ElementaryOp; 4] {
    [
        ElementaryOp::Shear { target: k, source: p, factor: 1.0 },
        ElementaryOp::Shear { target: p, source: k, factor: -1.0 },
        ElementaryOp::Shear { target: k, source: p, factor: 1.0 },
        ElementaryOp::SignFlip { coord: k },
    ]
}

/// Factors `A` into shears and sign flips, `A = ops[0] · ops[1] ⋯`.
///
/// Gauss-Jordan elimination with partial pivoting; row swaps are emitted as
/// three shears and a sign flip, and the leftover diagonal (product `±1`) is
/// cleared with sign flips and pairwise `diag(a, 1/a)` factors. The product
/// of the factors is checked against `A` to within `tol`.
pub fn decompose_unimodular(a: &RealMatrix, tol: f64) -> Result<Vec<ElementaryOp>> {
    let d = a.nrows();
    if d == 0 || a.ncols() != d {
        return Err(Error::Invalid("matrix must be square and non-empty".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("matrix entries must be finite".into()));
    }
    let det = a.clone().determinant();
    if (det.abs() - 1.0).abs() > tol {
        return Err(Error::NotUnimodular(format!("{det}")));
    }
    let mut e = Eliminator { w: a.clone(), log: Vec::new() };
    for k in 0..d {
        let p = (k..d)
            .max_by(|&r, &s| e.w[(r, k)].abs().total_cmp(&e.w[(s, k)].abs()).then(s.cmp(&r)))
            .expect("nonempty range");
        let pivot = e.w[(p, k)];
        if pivot.abs() < PIVOT_THRESHOLD {
            return Err(Error::DegeneratePivot(pivot.abs()));
        }
        if p != k {
            e.swap_rows(k, p);
        }
        for r in (0..d).filter(|&r| r != k) {
            let x = e.w[(r, k)];
            if x != 0.0 {
                let factor = -x / e.w[(k, k)];
                e.shear(r, k, factor);
                e.w[(r, k)] = 0.0;
            }
        }
    }
    for i in 0..d {
        if e.w[(i, i)] < 0.0 {
            e.push(ElementaryOp::SignFlip { coord: i });
        }
    }
    for i in 0..d.saturating_sub(1) {
        let a_i = e.w[(i, i)];
        if (a_i - 1.0).abs() > SNAP {
            e.scale_pair(i, i + 1, 1.0 / a_i);
            e.w[(i, i)] = 1.0;
            for c in (0..d).filter(|&c| c != i) {
                e.w[(i, c)] = 0.0;
            }
        }
    }
    let ops: Vec<ElementaryOp> = e.log.iter().map(ElementaryOp::inverse).collect();
    let error = max_entry_distance(&ops_product(d, &ops), a);
    if error > tol {
        return Err(Error::Reconstruction { error, tol });
    }
    Ok(ops)
}

/// The lattice bijection `f_A` realizing the factor sequence, applied right
/// to left: `f(v) = ops[0](ops[1](⋯ v))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiLipMap {
    dim: usize,
    ops: Vec<ElementaryOp>,
    #[serde(serialize_with = "serialize_rows")]
    matrix: RealMatrix,
}

fn serialize_rows<S: serde::Serializer>(m: &RealMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::matrix::rows(m).serialize(s)
}

/// Builds `f_A` from the deterministic decomposition of `A`.
pub fn realize_bilipschitz(a: &RealMatrix, tol: f64) -> Result<BiLipMap> {
    let ops = decompose_unimodular(a, tol)?;
    Ok(BiLipMap { dim: a.nrows(), ops, matrix: a.clone() })
}

impl BiLipMap {
    /// A map from an explicit factor sequence; its matrix is their product.
    pub fn from_ops(dim: usize, ops: Vec<ElementaryOp>) -> Result<BiLipMap> {
        if dim == 0 || ops.iter().any(|op| op.max_coord() >= dim) {
            return Err(Error::Invalid(format!("factor coordinates must lie in 1..={dim}")));
        }
        let matrix = ops_product(dim, &ops);
        Ok(BiLipMap { dim, ops, matrix })
    }

    pub fn identity(dim: usize) -> BiLipMap {
        BiLipMap { dim, ops: Vec::new(), matrix: RealMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ElementaryOp] {
        &self.ops
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let mut w = v.to_vec();
        for op in self.ops.iter().rev() {
            op.apply_int(&mut w);
        }
        w
    }

    pub fn apply_inverse(&self, v: &[i64]) -> Vec<i64> {
        let mut w = v.to_vec();
        for op in &self.ops {
            op.unapply_int(&mut w);
        }
        w
    }

    fn lattice_arg<'a>(&self, g: &'a GroupElement) -> Result<&'a [i64]> {
        g.as_lattice()
            .filter(|v| v.len() == self.dim)
            .ok_or_else(|| Error::GroupMismatch(format!("{g} is not in Z^{}", self.dim)))
    }

    pub fn eval(&self, g: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement::lattice(self.apply(self.lattice_arg(g)?)))
    }

    pub fn eval_inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement::lattice(self.apply_inverse(self.lattice_arg(g)?)))
    }

    /// `‖f(v) − A v‖∞` at one point.
    pub fn deviation(&self, a: &RealMatrix, v: &[i64]) -> f64 {
        let fv = self.apply(v);
        (0..self.dim)
            .map(|i| {
                let av: f64 = (0..self.dim).map(|j| a[(i, j)] * v[j] as f64).sum();
                (fv[i] as f64 - av).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Every point of `[-r, r]^d`.
pub fn box_points(dim: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as u64;
    let total = side.pow(dim as u32);
    (0..total).map(move |mut k| {
        (0..dim)
            .map(|_| {
                let c = (k % side) as i64 - r;
                k /= side;
                c
            })
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceCertificate {
    #[serde(rename = "R")]
    pub radius: u32,
    pub constant: f64,
    pub witness: Option<Vec<i64>>,
}

/// `max ‖f(v) − A v‖∞` over the box `[-R, R]^d`, with a maximizing point.
pub fn bounded_distance_certificate(f: &BiLipMap, a: &RealMatrix, radius: u32) -> DistanceCertificate {
    let mut best = 0.0;
    let mut witness = None;
    for v in box_points(f.dim, radius as i64) {
        let dev = f.deviation(a, &v);
        if dev > best {
            best = dev;
            witness = Some(v);
        }
    }
    DistanceCertificate { radius, constant: best, witness }
}

pub fn bounded_distance_constant(f: &BiLipMap, a: &RealMatrix, radius: u32) -> f64 {
    bounded_distance_certificate(f, a, radius).constant
}

/// Certificates at `R ∈ {10, 25, 50}`, evidence that the bound is uniform.
pub fn distance_profile(f: &BiLipMap, a: &RealMatrix) -> Vec<DistanceCertificate> {
    [10, 25, 50].iter().map(|&r| bounded_distance_certificate(f, a, r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    #[serde(rename = "R")]
    pub radius: u32,
    pub points: u64,
    pub pass: bool,
    /// Two box points with the same image.
    pub witness: Option<(Vec<i64>, Vec<i64>, Vec<i64>)>,
}

/// Injectivity of an arbitrary lattice map on `[-R, R]^d`.
pub fn injectivity_check<F>(dim: usize, radius: u32, f: F) -> InjectivityReport
where
    F: Fn(&[i64]) -> Vec<i64>,
{
    let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    let mut points = 0;
    for v in box_points(dim, radius as i64) {
        points += 1;
        let image = f(&v);
        if let Some(prev) = seen.get(&image) {
            return InjectivityReport { radius, points, pass: false, witness: Some((prev.clone(), v, image)) };
        }
        seen.insert(image, v);
    }
    InjectivityReport { radius, points, pass: true, witness: None }
}

pub fn injectivity_check_on_box(f: &BiLipMap, radius: u32) -> InjectivityReport {
    injectivity_check(f.dim, radius, |v| f.apply(v))
}

/// Two-sided Lipschitz sweep of `f` over a ball with the standard metric.
pub fn lipschitz_on_ball(f: &BiLipMap, radius: u32, constant: f64, metric: &WordMetric) -> Result<LipschitzReport> {
    is_bilipschitz_on_ball(|g| f.eval(g), radius, constant, metric, metric)
}

/// `g ↦ α(g⁻¹, x)⁻¹` on a ball, with its Lipschitz certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractedMap {
    #[serde(serialize_with = "serialize_pairs")]
    pub values: BTreeMap<GroupElement, GroupElement>,
    /// `max ℓ(α(s, y))` over tabled generators `s`.
    pub alpha_constant: u32,
    /// `max ℓ(β(t, y))` over tabled generators `t`, when a `β` table is given.
    pub beta_constant: Option<u32>,
    pub constant: f64,
    pub certificate: LipschitzReport,
}

fn serialize_pairs<S: serde::Serializer>(
    m: &BTreeMap<GroupElement, GroupElement>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter())
}

fn generator_constant<P: Clone + Ord + Debug>(
    table: &CocycleTable<P>,
    generators: &[GroupElement],
    target: &WordMetric,
) -> Result<u32> {
    let mut c = 0;
    let mut seen = false;
    for ((s, _), v) in table.iter() {
        if generators.contains(s) {
            seen = true;
            c = c.max(target.word_length(v)?);
        }
    }
    if !seen {
        return Err(Error::Coverage("table has no generator entries".into()));
    }
    Ok(c)
}

/// Recovers the map `φ(g) = α(g⁻¹, x)⁻¹` from a cocycle at the base point
/// `x` and certifies it with `C = max ℓ_{S'}(α(S × X))` (and the same bound
/// for `β` with the roles of the groups exchanged, if supplied).
pub fn extract_bilipschitz_from_cocycle<P: Clone + Ord + Debug>(
    alpha: &CocycleTable<P>,
    beta: Option<&CocycleTable<P>>,
    x: &P,
    radius: u32,
    source: &WordMetric,
    target: &WordMetric,
) -> Result<ExtractedMap> {
    let mut values = BTreeMap::new();
    for g in source.ball(radius) {
        let v = alpha.get(&g.inverse(), x)?.inverse();
        values.insert(g, v);
    }
    let alpha_constant = generator_constant(alpha, source.generators().elements(), target)?;
    let beta_constant = beta.map(|b| generator_constant(b, target.generators().elements(), source)).transpose()?;
    let constant = alpha_constant.max(beta_constant.unwrap_or(0)).max(1) as f64;
    let certificate = is_bilipschitz_on_ball(
        |g| values.get(g).cloned().ok_or_else(|| Error::Undefined(g.to_string())),
        radius,
        constant,
        source,
        target,
    )?;
    Ok(ExtractedMap { values, alpha_constant, beta_constant, constant, certificate })
}
