//! t-structures, Harder–Narasimhan filtrations and stability conditions.
//!
//! The standard heart is `add⟨X_1, X_∞⟩`. A stability condition is a heart
//! shift `h` together with `v = mass·e^{iπ·phi}` in the upper half plane, the
//! value of the central charge on `X_∞[h]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::decomp::{k_class, FormalObject, Size, Summand};
use crate::error::{Error, Result};
use crate::homspace::{cone_symbolic, hom_table, GeneratorRef, Kind};
use crate::linalg::Field;

/// Phases this close to an integer are snapped onto it.
const SNAP: f64 = 1e-12;

pub type Indec = (Size, i32);

/// Bounds for the cone-closure used to test generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureBounds {
    pub depth: usize,
    /// Largest finite length whose cones are explored.
    pub max_len: usize,
    /// Relative shifts `|α|` explored between two types.
    pub max_shift: i32,
}

impl Default for ClosureBounds {
    fn default() -> Self {
        ClosureBounds {
            depth: 3,
            max_len: 8,
            max_shift: 4,
        }
    }
}

/// Memoized cones of unit multiples of generators `X_a → X_b[α]`.
pub struct ConeCatalog {
    field: Field,
    cache: HashMap<GeneratorRef, FormalObject>,
}

impl ConeCatalog {
    pub fn new(field: Field) -> Self {
        ConeCatalog {
            field,
            cache: HashMap::new(),
        }
    }

    pub fn cone(&mut self, g: &GeneratorRef) -> Result<FormalObject> {
        if let Some(c) = self.cache.get(g) {
            return Ok(c.clone());
        }
        let c = cone_symbolic(self.field, g, &self.field.one())?;
        self.cache.insert(*g, c.clone());
        Ok(c)
    }

    /// Types of indecomposables reachable from `start` by taking cones of
    /// generators, up to shift. Stops early once `done` holds.
    pub fn closure(
        &mut self,
        start: &BTreeSet<Size>,
        bounds: &ClosureBounds,
        done: impl Fn(&BTreeSet<Size>) -> bool,
    ) -> Result<BTreeSet<Size>> {
        let mut reached = start.clone();
        for _ in 0..bounds.depth {
            if done(&reached) {
                break;
            }
            let explore: Vec<Size> = reached
                .iter()
                .copied()
                .filter(|s| s.finite().is_none_or(|n| n <= bounds.max_len))
                .collect();
            let mut next = reached.clone();
            for &a in &explore {
                for &b in &explore {
                    for alpha in -bounds.max_shift..=bounds.max_shift {
                        for kind in [Kind::One, Kind::Eps] {
                            let g = GeneratorRef::new((a, 0), (b, alpha), kind);
                            if g.exists() {
                                next.extend(self.cone(&g)?.summands().iter().map(|s| s.i));
                            }
                        }
                    }
                }
            }
            if next == reached {
                break;
            }
            reached = next;
        }
        Ok(reached)
    }
}

/// A finite set of shifted indecomposables, read as its additive closure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeartCandidate {
    members: BTreeSet<Indec>,
}

impl HeartCandidate {
    pub fn new(members: impl IntoIterator<Item = Indec>) -> Self {
        HeartCandidate {
            members: members.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &BTreeSet<Indec> {
        &self.members
    }

    /// Shifted so the smallest member shift is 0.
    pub fn normalized(&self) -> Self {
        let lo = self.members.iter().map(|m| m.1).min().unwrap_or(0);
        HeartCandidate::new(self.members.iter().map(|&(i, h)| (i, h - lo)))
    }

    /// Whether every summand of `f` is a member.
    pub fn contains(&self, f: &FormalObject) -> bool {
        f.summands().iter().all(|s| self.members.contains(&(s.i, s.h)))
    }
}

impl fmt::Display for HeartCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|(i, h)| format!("X_{i}[{h}]")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `left → middle → right → left[1]`, with `connecting` the last map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub left: Indec,
    pub middle: FormalObject,
    pub right: Indec,
    pub connecting: GeneratorRef,
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "X_{}[{}] -> {} -> X_{}[{}] --({})-->",
            self.left.0, self.left.1, self.middle, self.right.0, self.right.1, self.connecting.kind
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeartVerdict {
    Accepted { reached: BTreeSet<Size> },
    /// (a): a nonzero map from a member to a strictly lower shift of a member.
    NegativeHom { witness: GeneratorRef },
    /// (b): an extension of members that is not in the additive closure.
    NotExtensionClosed { triangle: Triangle },
    /// (c): the cone-closure misses `X_1` or `X_∞`.
    NotGenerating { reached: BTreeSet<Size> },
}

impl HeartVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, HeartVerdict::Accepted { .. })
    }

    /// `'a'`, `'b'` or `'c'` for a rejection.
    pub fn stage(&self) -> Option<char> {
        match self {
            HeartVerdict::Accepted { .. } => None,
            HeartVerdict::NegativeHom { .. } => Some('a'),
            HeartVerdict::NotExtensionClosed { .. } => Some('b'),
            HeartVerdict::NotGenerating { .. } => Some('c'),
        }
    }
}

impl fmt::Display for HeartVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let types = |r: &BTreeSet<Size>| r.iter().map(|s| format!("X_{s}")).collect::<Vec<_>>().join(", ");
        match self {
            HeartVerdict::Accepted { reached } => write!(f, "accepted (generates {})", types(reached)),
            HeartVerdict::NegativeHom { witness } => write!(f, "rejected (a): nonzero {witness}"),
            HeartVerdict::NotExtensionClosed { triangle } => write!(f, "rejected (b): {triangle}"),
            HeartVerdict::NotGenerating { reached } => write!(f, "rejected (c): closure only reaches {}", types(reached)),
        }
    }
}

fn max_len(objs: impl IntoIterator<Item = Indec>) -> i32 {
    objs.into_iter().filter_map(|(i, _)| i.finite()).max().unwrap_or(1) as i32
}

/// A nonzero map `a → b[-d]` for some `d ≥ 1`.
fn negative_hom(a: Indec, b: Indec) -> Option<GeneratorRef> {
    let top = b.1 - a.1 - 1;
    let bottom = top.min(-max_len([a, b]) - 2);
    (bottom..=top).rev().find_map(|alpha| {
        let t = hom_table(a.0, b.0, alpha);
        [Kind::One, Kind::Eps]
            .into_iter()
            .find(|&k| t.has(k))
            .map(|k| GeneratorRef::new(a, (b.0, a.1 + alpha), k))
    })
}

/// A nonzero map `a → b[d]` for some `d ≥ 1`.
fn positive_hom(a: Indec, b: Indec) -> Option<GeneratorRef> {
    let bottom = b.1 - a.1 + 1;
    let top = bottom.max(max_len([a, b]) + 2);
    (bottom..=top).find_map(|alpha| {
        let t = hom_table(a.0, b.0, alpha);
        [Kind::One, Kind::Eps]
            .into_iter()
            .find(|&k| t.has(k))
            .map(|k| GeneratorRef::new(a, (b.0, a.1 + alpha), k))
    })
}

/// Runs the heart criteria (a), (b), (c) in order.
pub fn check_heart(catalog: &mut ConeCatalog, c: &HeartCandidate, bounds: &ClosureBounds) -> Result<HeartVerdict> {
    for &a in &c.members {
        for &b in &c.members {
            if let Some(witness) = negative_hom(a, b) {
                return Ok(HeartVerdict::NegativeHom { witness });
            }
        }
    }
    for &a in &c.members {
        for &b in &c.members {
            for kind in [Kind::One, Kind::Eps] {
                let g = GeneratorRef::new(b, (a.0, a.1 + 1), kind);
                if !g.exists() {
                    continue;
                }
                let middle = catalog.cone(&g)?.shift(-1);
                if !c.contains(&middle) {
                    let triangle = Triangle {
                        left: a,
                        middle,
                        right: b,
                        connecting: g,
                    };
                    return Ok(HeartVerdict::NotExtensionClosed { triangle });
                }
            }
        }
    }
    let start: BTreeSet<Size> = c.members.iter().map(|m| m.0).collect();
    let goal = |r: &BTreeSet<Size>| r.contains(&Size::Finite(1)) && r.contains(&Size::Inf);
    let reached = catalog.closure(&start, bounds, goal)?;
    Ok(if goal(&reached) {
        HeartVerdict::Accepted { reached }
    } else {
        HeartVerdict::NotGenerating { reached }
    })
}

/// The indecomposables `X_i[h]` with `i ∈ {1..imax, ∞}` and `|h| ≤ hmax`.
pub fn window_objects(imax: usize, hmax: i32) -> Vec<Indec> {
    let sizes: Vec<Size> = (1..=imax).map(Size::Finite).chain([Size::Inf]).collect();
    (-hmax..=hmax)
        .flat_map(|h| sizes.iter().map(move |&i| (i, h)))
        .collect()
}

/// All nonempty sets of window objects, pairwise free of negative Homs, plus
/// the singletons that already fail (a); each with its verdict.
pub fn enumerate_hearts(
    catalog: &mut ConeCatalog,
    imax: usize,
    hmax: i32,
    bounds: &ClosureBounds,
) -> Result<Vec<(HeartCandidate, HeartVerdict)>> {
    let objs = window_objects(imax, hmax);
    let ok: Vec<Indec> = objs.iter().copied().filter(|&o| negative_hom(o, o).is_none()).collect();
    let compatible = |a: Indec, b: Indec| negative_hom(a, b).is_none() && negative_hom(b, a).is_none();
    let mut cliques = Vec::new();
    extend_cliques(&ok, &compatible, &mut Vec::new(), 0, &mut cliques);

    let mut out = Vec::new();
    for &o in objs.iter().filter(|o| !ok.contains(o)) {
        let c = HeartCandidate::new([o]);
        let v = check_heart(catalog, &c, bounds)?;
        out.push((c, v));
    }
    for members in cliques {
        let c = HeartCandidate::new(members);
        let v = check_heart(catalog, &c, bounds)?;
        out.push((c, v));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out)
}

/// Every nonempty clique of `compatible` extending `current` by elements past `from`.
fn extend_cliques(
    items: &[Indec],
    compatible: &impl Fn(Indec, Indec) -> bool,
    current: &mut Vec<Indec>,
    from: usize,
    out: &mut Vec<Vec<Indec>>,
) {
    for idx in from..items.len() {
        let x = items[idx];
        if current.iter().all(|&y| compatible(x, y)) {
            current.push(x);
            out.push(current.clone());
            extend_cliques(items, compatible, current, idx + 1, out);
            current.pop();
        }
    }
}

/// `(h, v)` with `v = mass·e^{iπ·phi}`, `mass > 0`, `0 < phi ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityCondition {
    pub h: i32,
    pub mass: f64,
    pub phi: f64,
}

impl StabilityCondition {
    pub fn new(h: i32, mass: f64, phi: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::OutOfRange(format!("mass must be positive, got {mass}")));
        }
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::OutOfRange(format!("phi must lie in (0, 1], got {phi}")));
        }
        Ok(StabilityCondition { h, mass, phi })
    }

    /// Splits the total phase as `ψ = h + phi` with `h = ⌈ψ⌉ − 1`.
    pub fn from_psi(psi: f64, mass: f64) -> Result<Self> {
        if !psi.is_finite() || psi.abs() > i32::MAX as f64 / 2.0 {
            return Err(Error::OutOfRange(format!("phase {psi}")));
        }
        let r = psi.round();
        let psi = if (psi - r).abs() < SNAP { r } else { psi };
        let h = psi.ceil() - 1.0;
        Self::new(h as i32, mass, psi - h)
    }

    pub fn psi(&self) -> f64 {
        self.h as f64 + self.phi
    }

    /// `v = Z(X_∞[h])`.
    pub fn v(&self) -> Complex64 {
        Complex64::from_polar(self.mass, PI * self.phi)
    }

    /// Phase of the semistable objects `X_1[s]` and `X_∞[s]`.
    pub fn phase_of_shift(&self, s: i32) -> f64 {
        self.phi + (s - self.h) as f64
    }
}

impl fmt::Display for StabilityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(h={}, mass={}, phi={})", self.h, self.mass, self.phi)
    }
}

/// The rotation–scaling `(κ·e^{iπθ}, x ↦ x + θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElem {
    pub kappa: f64,
    pub theta: f64,
}

impl GroupElem {
    pub fn new(kappa: f64, theta: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) || !theta.is_finite() {
            return Err(Error::OutOfRange(format!("group element ({kappa}, {theta})")));
        }
        Ok(GroupElem { kappa, theta })
    }

    pub fn identity() -> Self {
        GroupElem { kappa: 1.0, theta: 0.0 }
    }

    /// `self·other`: act by `self` first, then by `other`.
    pub fn compose(&self, other: &GroupElem) -> GroupElem {
        GroupElem {
            kappa: self.kappa * other.kappa,
            theta: self.theta + other.theta,
        }
    }

    pub fn inverse(&self) -> GroupElem {
        GroupElem {
            kappa: 1.0 / self.kappa,
            theta: -self.theta,
        }
    }
}

/// Right action: `ψ' = ψ − θ`, `mass' = mass/κ`.
pub fn act(g: &GroupElem, s: &StabilityCondition) -> Result<StabilityCondition> {
    StabilityCondition::from_psi(s.psi() - g.theta, s.mass / g.kappa)
}

/// The unique `g` with `act(g, a) = b`.
pub fn transitivity_witness(a: &StabilityCondition, b: &StabilityCondition) -> GroupElem {
    GroupElem {
        kappa: a.mass / b.mass,
        theta: a.psi() - b.psi(),
    }
}

/// `z = ln(mass) + iπψ`.
pub fn chart(s: &StabilityCondition) -> Complex64 {
    Complex64::new(s.mass.ln(), PI * s.psi())
}

pub fn chart_inv(z: Complex64) -> Result<StabilityCondition> {
    StabilityCondition::from_psi(z.im / PI, z.re.exp())
}

/// A semistable piece: every summand is `X_1` or `X_∞` at one shift.
#[derive(Clone, Debug, PartialEq)]
pub struct HNFactor {
    pub phase: f64,
    pub object: FormalObject,
}

/// Harder–Narasimhan factors, phases strictly decreasing.
///
/// `X_i[h]` for finite `i ≥ 2` sits in the triangle
/// `X_∞[h+i−1] → X_i[h] → X_∞[h]`.
pub fn hn_filtration(s: &StabilityCondition, f: &FormalObject) -> Vec<HNFactor> {
    let mut by_shift: BTreeMap<i32, Vec<Summand>> = BTreeMap::new();
    let mut put = |i: Size, h: i32, m: usize| by_shift.entry(h).or_default().push(Summand { i, h, m });
    for x in f.summands() {
        match x.i {
            Size::Inf | Size::Finite(1) => put(x.i, x.h, x.m),
            Size::Finite(i) => {
                put(Size::Inf, x.h + i as i32 - 1, x.m);
                put(Size::Inf, x.h, x.m);
            }
        }
    }
    by_shift
        .into_iter()
        .rev()
        .map(|(h, parts)| HNFactor {
            phase: s.phase_of_shift(h),
            object: FormalObject::new(parts),
        })
        .collect()
}

/// Weight in `K_0` relative to `[X_∞]` of a semistable summand.
fn heart_weight(i: Size) -> f64 {
    match i {
        Size::Finite(1) => 2.0,
        _ => 1.0,
    }
}

/// `Z(F)` summed over the HN factors of `F`.
pub fn central_charge(s: &StabilityCondition, f: &FormalObject) -> Complex64 {
    let z: Complex64 = hn_filtration(s, f)
        .iter()
        .map(|fac| {
            let count: f64 = fac.object.summands().iter().map(|x| heart_weight(x.i) * x.m as f64).sum();
            Complex64::from_polar(count * s.mass, PI * fac.phase)
        })
        .sum();
    debug_assert!((z - charge_from_class(s, f)).norm() <= 1e-9 * (1.0 + z.norm()));
    z
}

/// `Z(F) = n·(−1)^{σ.h}·v` for `[F] = n[X_∞]`.
pub fn charge_from_class(s: &StabilityCondition, f: &FormalObject) -> Complex64 {
    let sign = if s.h.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    s.v() * (sign * k_class(f) as f64)
}

/// Sum of `|Z|` over the HN factors.
pub fn hn_mass(s: &StabilityCondition, f: &FormalObject) -> f64 {
    hn_filtration(s, f)
        .iter()
        .map(|fac| {
            let count: f64 = fac.object.summands().iter().map(|x| heart_weight(x.i) * x.m as f64).sum();
            count * s.mass
        })
        .sum()
}

/// Why a set of window objects is not a generating silting set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SiltingRejection {
    /// `Hom(M, M[d]) ≠ 0` for some `d > 0`.
    SelfExtension { object: Indec, witness: GeneratorRef },
    /// `Hom(M, M'[d]) ≠ 0` for some `d > 0`.
    Incompatible { witness: GeneratorRef },
    /// Silting, but its cone-closure never reaches `X_∞`.
    NotGenerating { reached: BTreeSet<Size> },
}

impl fmt::Display for SiltingRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiltingRejection::SelfExtension { witness, .. } => write!(f, "positive self-extension {witness}"),
            SiltingRejection::Incompatible { witness } => write!(f, "positive extension {witness}"),
            SiltingRejection::NotGenerating { reached } => {
                let t: Vec<String> = reached.iter().map(|s| format!("X_{s}")).collect();
                write!(f, "cone-closure only reaches {}", t.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiltingSubset {
    pub members: Vec<Indec>,
    pub generates: bool,
    pub reached: BTreeSet<Size>,
}

/// Result of a bounded silting search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiltingReport {
    pub imax: usize,
    pub hmax: i32,
    /// Window objects with a positive self-extension.
    pub non_silting: Vec<(Indec, GeneratorRef)>,
    /// Pairs of silting objects with a positive extension between them.
    pub incompatible: Vec<(Indec, Indec, GeneratorRef)>,
    /// Maximal silting subsets; all lie in the perfect part.
    pub maximal: Vec<SiltingSubset>,
    /// Silting subsets generating `D^b`; the certificate is that this is empty.
    pub generating: Vec<Vec<Indec>>,
}

impl SiltingReport {
    /// The reason `subset` fails to be a generating silting set, or `None`
    /// when it is one.
    pub fn rejection(&self, subset: &[Indec]) -> Option<SiltingRejection> {
        for &m in subset {
            if let Some(witness) = positive_hom(m, m) {
                return Some(SiltingRejection::SelfExtension { object: m, witness });
            }
        }
        for &a in subset {
            for &b in subset {
                if let Some(witness) = positive_hom(a, b) {
                    return Some(SiltingRejection::Incompatible { witness });
                }
            }
        }
        // Closure is monotone, so a non-generating superset settles it.
        let sup = self.maximal.iter().find(|s| subset.iter().all(|m| s.members.contains(m)))?;
        (!sup.generates).then(|| SiltingRejection::NotGenerating {
            reached: sup.reached.clone(),
        })
    }

    pub fn certifies_empty(&self) -> bool {
        self.generating.is_empty()
    }
}

/// Searches `{X_i[h] : i ≤ imax or ∞, |h| ≤ hmax}` for silting subsets.
pub fn silting_search(catalog: &mut ConeCatalog, imax: usize, hmax: i32, bounds: &ClosureBounds) -> Result<SiltingReport> {
    if imax == 0 || hmax < 0 {
        return Err(Error::OutOfRange(format!("silting window ({imax}, {hmax})")));
    }
    let objs = window_objects(imax, hmax);
    let mut non_silting = Vec::new();
    let mut good = Vec::new();
    for &o in &objs {
        match positive_hom(o, o) {
            Some(w) => non_silting.push((o, w)),
            None => good.push(o),
        }
    }
    let mut incompatible = Vec::new();
    for (x, &a) in good.iter().enumerate() {
        for &b in &good[x + 1..] {
            if let Some(w) = positive_hom(a, b).or_else(|| positive_hom(b, a)) {
                incompatible.push((a, b, w));
            }
        }
    }
    let bad: BTreeSet<(Indec, Indec)> = incompatible.iter().flat_map(|&(a, b, _)| [(a, b), (b, a)]).collect();
    let mut cliques = Vec::new();
    maximal_cliques(&|a, b| !bad.contains(&(a, b)), Vec::new(), good.clone(), Vec::new(), &mut cliques);
    cliques.sort();

    let mut closures: BTreeMap<BTreeSet<Size>, BTreeSet<Size>> = BTreeMap::new();
    let mut maximal = Vec::new();
    let mut generating = Vec::new();
    for members in cliques {
        let types: BTreeSet<Size> = members.iter().map(|m| m.0).collect();
        let reached = match closures.get(&types) {
            Some(r) => r.clone(),
            None => {
                let r = catalog.closure(&types, bounds, |r| r.contains(&Size::Inf))?;
                closures.insert(types, r.clone());
                r
            }
        };
        let generates = reached.contains(&Size::Inf);
        if generates {
            generating.push(members.clone());
        }
        maximal.push(SiltingSubset {
            members,
            generates,
            reached,
        });
    }
    Ok(SiltingReport {
        imax,
        hmax,
        non_silting,
        incompatible,
        maximal,
        generating,
    })
}

/// Bron–Kerbosch without pivoting.
fn maximal_cliques(
    adj: &impl Fn(Indec, Indec) -> bool,
    r: Vec<Indec>,
    mut p: Vec<Indec>,
    mut x: Vec<Indec>,
    out: &mut Vec<Vec<Indec>>,
) {
    if p.is_empty() && x.is_empty() {
        if !r.is_empty() {
            out.push(r);
        }
        return;
    }
    while let Some(v) = p.pop() {
        let mut r2 = r.clone();
        r2.push(v);
        r2.sort();
        let p2 = p.iter().copied().filter(|&u| adj(u, v)).collect();
        let x2 = x.iter().copied().filter(|&u| adj(u, v)).collect();
        maximal_cliques(adj, r2, p2, x2, out);
        x.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: Size = Size::Inf;
    const ONE: Size = Size::Finite(1);

    fn catalog() -> ConeCatalog {
        ConeCatalog::new(Field::Prime(7))
    }

    fn sigma(h: i32, mass: f64, phi: f64) -> StabilityCondition {
        StabilityCondition::new(h, mass, phi).unwrap()
    }

    fn obj(parts: &[(Size, i32)]) -> FormalObject {
        FormalObject::new(parts.iter().map(|&(i, h)| Summand { i, h, m: 1 }))
    }

    #[test]
    fn standard_heart_is_accepted() {
        let v = check_heart(&mut catalog(), &HeartCandidate::new([(ONE, 0), (INF, 0)]), &ClosureBounds::default())
            .unwrap();
        assert!(v.is_accepted(), "{v}");
    }

    #[test]
    fn x_inf_alone_fails_extension_closure() {
        let v = check_heart(&mut catalog(), &HeartCandidate::new([(INF, 0)]), &ClosureBounds::default()).unwrap();
        let HeartVerdict::NotExtensionClosed { triangle } = v else {
            panic!("{v}")
        };
        assert_eq!(triangle.left, (INF, 0));
        assert_eq!(triangle.right, (INF, 0));
        assert_eq!(triangle.middle, FormalObject::indecomposable(ONE, 0));
    }

    #[test]
    fn x1_alone_does_not_generate() {
        let v = check_heart(&mut catalog(), &HeartCandidate::new([(ONE, 2)]), &ClosureBounds::default()).unwrap();
        assert_eq!(v.stage(), Some('c'));
        if let HeartVerdict::NotGenerating { reached } = v {
            assert!(!reached.contains(&INF));
            assert!(reached.contains(&Size::Finite(2)));
        }
    }

    #[test]
    fn unequal_shifts_fail_negative_hom() {
        let v = check_heart(&mut catalog(), &HeartCandidate::new([(ONE, 0), (INF, 1)]), &ClosureBounds::default())
            .unwrap();
        assert_eq!(v.stage(), Some('a'));
        let v = check_heart(&mut catalog(), &HeartCandidate::new([(Size::Finite(2), 0)]), &ClosureBounds::default())
            .unwrap();
        assert_eq!(v.stage(), Some('a'));
    }

    #[test]
    fn hearts_in_small_window() {
        let all = enumerate_hearts(&mut catalog(), 2, 1, &ClosureBounds::default()).unwrap();
        let accepted: Vec<_> = all.iter().filter(|(_, v)| v.is_accepted()).map(|(c, _)| c.clone()).collect();
        let expected: Vec<_> = (-1..=1).map(|h| HeartCandidate::new([(ONE, h), (INF, h)])).collect();
        assert_eq!(accepted, expected);
        assert!(accepted.iter().all(|c| c.normalized() == expected[1]));
    }

    #[test]
    fn hn_of_x2() {
        let f = hn_filtration(&sigma(0, 1.0, 0.5), &FormalObject::indecomposable(Size::Finite(2), -1));
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].object, FormalObject::indecomposable(INF, 0));
        assert!((f[0].phase - 0.5).abs() < 1e-12);
        assert_eq!(f[1].object, FormalObject::indecomposable(INF, -1));
        assert!((f[1].phase + 0.5).abs() < 1e-12);
    }

    #[test]
    fn hn_merges_equal_phases() {
        let f = hn_filtration(&sigma(0, 1.0, 1.0), &obj(&[(Size::Finite(3), 0), (ONE, 2)]));
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].object, obj(&[(ONE, 2), (INF, 2)]));
        assert_eq!(f[0].phase, 3.0);
        assert_eq!(f[1].object, obj(&[(INF, 0)]));
        assert_eq!(f[1].phase, 1.0);
    }

    #[test]
    fn charges() {
        let s = sigma(3, 2.0, 0.25);
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-12;
        assert!(close(central_charge(&s, &FormalObject::indecomposable(INF, 3)), s.v()));
        assert!(close(central_charge(&s, &FormalObject::indecomposable(ONE, 3)), s.v() * 2.0));
        let x2 = FormalObject::indecomposable(Size::Finite(2), 3);
        assert!(close(central_charge(&s, &x2), Complex64::new(0.0, 0.0)));
        assert!((hn_mass(&s, &x2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn witness_example() {
        let g = transitivity_witness(&sigma(0, 1.0, 1.0), &sigma(0, 1.0, 0.5));
        assert_eq!((g.theta, g.kappa), (0.5, 1.0));
        let s = sigma(0, 1.0, 1.0);
        assert_eq!(transitivity_witness(&s, &s), GroupElem::identity());
    }

    #[test]
    fn rotation_by_one_lowers_h() {
        let s = sigma(2, 3.0, 0.75);
        let t = act(&GroupElem::new(1.0, 1.0).unwrap(), &s).unwrap();
        assert_eq!((t.h, t.phi), (1, 0.75));
        let t = act(&GroupElem::identity(), &s).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn chart_base_point() {
        let z = chart(&sigma(0, 1.0, 1.0));
        assert!(z.re.abs() < 1e-15 && (z.im - PI).abs() < 1e-15);
    }

    #[test]
    fn integer_phase_splits_with_phi_one() {
        let s = StabilityCondition::from_psi(2.0, 1.0).unwrap();
        assert_eq!((s.h, s.phi), (1, 1.0));
        let s = StabilityCondition::from_psi(2.0 + 1e-14, 1.0).unwrap();
        assert_eq!((s.h, s.phi), (1, 1.0));
        assert!(StabilityCondition::new(0, 1.0, 0.0).is_err());
        assert!(StabilityCondition::new(0, -1.0, 0.5).is_err());
    }

    #[test]
    fn silting_small_window() {
        let r = silting_search(&mut catalog(), 3, 2, &ClosureBounds::default()).unwrap();
        assert!(r.certifies_empty());
        let singles: Vec<Vec<Indec>> = (-2..=2).map(|h| vec![(ONE, h)]).collect();
        assert_eq!(r.maximal.iter().map(|s| s.members.clone()).collect::<Vec<_>>(), singles);
        assert!(r.maximal.iter().all(|s| !s.generates));
        assert!(r.non_silting.iter().any(|&(o, _)| o == (INF, 0)));
        assert!(matches!(
            r.rejection(&[(INF, 1)]),
            Some(SiltingRejection::SelfExtension { .. })
        ));
        assert!(matches!(
            r.rejection(&[(ONE, 0), (ONE, 1)]),
            Some(SiltingRejection::Incompatible { .. })
        ));
        assert!(matches!(r.rejection(&[(ONE, 0)]), Some(SiltingRejection::NotGenerating { .. })));
    }

    fn arb_sigma() -> impl Strategy<Value = StabilityCondition> {
        (-5i32..5, 0.01f64..100.0, 0.001f64..=1.0).prop_map(|(h, m, p)| sigma(h, m, p))
    }

    fn arb_g() -> impl Strategy<Value = GroupElem> {
        (0.01f64..100.0, -6.0f64..6.0).prop_map(|(k, t)| GroupElem::new(k, t).unwrap())
    }

    fn near(a: &StabilityCondition, b: &StabilityCondition) -> bool {
        (a.psi() - b.psi()).abs() < 1e-9 && (a.mass - b.mass).abs() < 1e-9 * a.mass.max(1.0)
    }

    proptest! {
        #[test]
        fn action_is_a_right_action(s in arb_sigma(), g1 in arb_g(), g2 in arb_g()) {
            let lhs = act(&g2, &act(&g1, &s).unwrap()).unwrap();
            let rhs = act(&g1.compose(&g2), &s).unwrap();
            prop_assert!(near(&lhs, &rhs));
        }

        #[test]
        fn witness_roundtrips(a in arb_sigma(), b in arb_sigma()) {
            let g = transitivity_witness(&a, &b);
            prop_assert!(near(&act(&g, &a).unwrap(), &b));
        }

        #[test]
        fn chart_conjugates_action(s in arb_sigma(), g in arb_g()) {
            let back = chart_inv(chart(&s)).unwrap();
            prop_assert!(near(&back, &s));
            let lhs = chart(&act(&g, &s).unwrap());
            let rhs = chart(&s) - Complex64::new(g.kappa.ln(), PI * g.theta);
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }

        #[test]
        fn hn_phases_decrease_and_charges_match(
            parts in proptest::collection::vec((0usize..6, -4i32..4, 1usize..3), 0..6),
            s in arb_sigma(),
        ) {
            let f = FormalObject::new(parts.into_iter().map(|(i, h, m)| Summand {
                i: if i == 0 { Size::Inf } else { Size::Finite(i) }, h, m,
            }));
            let fac = hn_filtration(&s, &f);
            prop_assert!(fac.windows(2).all(|w| w[0].phase > w[1].phase));
            for x in &fac {
                let shifts: BTreeSet<i32> = x.object.summands().iter().map(|y| y.h).collect();
                prop_assert_eq!(shifts.len(), 1);
                prop_assert!(x.object.summands().iter().all(|y| y.i == ONE || y.i == INF));
            }
            let z = central_charge(&s, &f);
            prop_assert!((z - charge_from_class(&s, &f)).norm() < 1e-9 * (1.0 + z.norm()));
        }
    }
}
