//! Hom spaces between indecomposables: closed-form tables, concrete generator
//! representatives, symbolic morphisms and their composition, and cones.
//!
//! `X_∞` is not a bounded complex of free modules. Concretely it is modelled
//! as an ε-chain cut off at a deep bottom degree when it is a source, and as
//! the module `k` in its top degree when it is a target.

use std::collections::BTreeMap;
use std::fmt;

use crate::complexes::{cone, ChainMap, Complex, HomSystem, ModMap};
use crate::decomp::{bars, FormalObject, Size, Summand};
use crate::error::{Error, Result};
use crate::linalg::{DualMatrix, DualScalar, Field, FieldElem, FieldMatrix, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Identity on the overlap.
    One,
    /// `(-1)^h ε` at the top degree of a source `X_i[h]`.
    Eps,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::One => "1",
            Kind::Eps => "eps",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomDescriptor {
    pub dim: usize,
    pub has_one_type: bool,
    pub has_eps_type: bool,
}

impl HomDescriptor {
    fn new(has_one_type: bool, has_eps_type: bool) -> Self {
        HomDescriptor {
            dim: has_one_type as usize + has_eps_type as usize,
            has_one_type,
            has_eps_type,
        }
    }

    pub fn has(&self, kind: Kind) -> bool {
        match kind {
            Kind::One => self.has_one_type,
            Kind::Eps => self.has_eps_type,
        }
    }
}

/// `Hom(X_i, X_j[α])` in closed form.
pub fn hom_table(i: Size, j: Size, alpha: i32) -> HomDescriptor {
    match (i, j) {
        (Size::Finite(i), Size::Finite(j)) => {
            let (i, j) = (i as i64, j as i64);
            let a = alpha as i64;
            let eps = -j < a && a <= 0.min(i - j);
            let one = 0.max(i - j) <= a && a < i;
            HomDescriptor::new(one, eps)
        }
        (Size::Inf, Size::Inf) => HomDescriptor::new(alpha >= 0, false),
        (Size::Inf, Size::Finite(j)) => HomDescriptor::new(false, -(j as i64) < alpha as i64 && alpha <= 0),
        (Size::Finite(i), Size::Inf) => HomDescriptor::new(0 <= alpha && (alpha as i64) < i as i64, false),
    }
}

/// A named generator `X_i[h₁] → X_j[h₂]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorRef {
    pub source: (Size, i32),
    pub target: (Size, i32),
    pub kind: Kind,
}

impl GeneratorRef {
    pub fn new(source: (Size, i32), target: (Size, i32), kind: Kind) -> Self {
        GeneratorRef { source, target, kind }
    }

    pub fn alpha(&self) -> i32 {
        self.target.1 - self.source.1
    }

    pub fn exists(&self) -> bool {
        hom_table(self.source.0, self.target.0, self.alpha()).has(self.kind)
    }

    fn check(&self) -> Result<()> {
        if self.exists() {
            Ok(())
        } else {
            Err(Error::NoSuchGenerator(self.to_string()))
        }
    }
}

impl fmt::Display for GeneratorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: X_{}[{}] -> X_{}[{}]",
            self.kind, self.source.0, self.source.1, self.target.0, self.target.1
        )
    }
}

fn one_by_one(x: DualScalar) -> ModMap {
    let k = x.field();
    ModMap::free(Matrix::from_vec(k, 1, 1, vec![x]).unwrap())
}

/// Top and bottom degree of the ε-chain `X_len[h]`.
fn chain_range(len: usize, h: i32) -> (i32, i32) {
    (-(len as i32) - h, -1 - h)
}

/// Representative between two ε-chains of the given lengths.
fn chain_rep(k: Field, src: (usize, i32), tgt: (usize, i32), kind: Kind) -> Result<ChainMap> {
    let x = Complex::indecomposable(k, src.0, src.1);
    let y = Complex::indecomposable(k, tgt.0, tgt.1);
    let (slo, shi) = chain_range(src.0, src.1);
    let (tlo, thi) = chain_range(tgt.0, tgt.1);
    let comps: BTreeMap<i32, ModMap> = match kind {
        Kind::One => (slo.max(tlo)..=shi.min(thi))
            .map(|n| (n, one_by_one(DualScalar::one(k))))
            .collect(),
        Kind::Eps if tlo <= shi && shi <= thi => {
            let sign = if src.1.rem_euclid(2) == 0 { k.one() } else { -k.one() };
            [(shi, one_by_one(DualScalar::from_eps(sign)))].into_iter().collect()
        }
        Kind::Eps => BTreeMap::new(),
    };
    ChainMap::new(x, y, comps).map_err(|e| Error::Internal(format!("generator representative: {e}")))
}

/// The concrete chain map named by a finite generator.
pub fn generator_rep(k: Field, g: &GeneratorRef) -> Result<ChainMap> {
    g.check()?;
    let (Size::Finite(i), Size::Finite(j)) = (g.source.0, g.target.0) else {
        return Models::around(k, &[g.source, g.target]).rep(g);
    };
    chain_rep(k, (i, g.source.1), (j, g.target.1), g.kind)
}

/// `dim Hom(X, Y)` and representatives of a basis, for `X` free.
pub fn hom_bruteforce(x: &Complex, y: &Complex) -> Result<(usize, Vec<ChainMap>)> {
    let sys = HomSystem::new(x, y)?;
    let basis = sys.basis()?;
    Ok((basis.len(), basis))
}

/// Coefficients `(a, b)` of a map between canonical indecomposables on the
/// 1- and ε-generators.
pub fn identify(k: Field, f: &ChainMap, source: (Size, i32), target: (Size, i32)) -> Result<(FieldElem, FieldElem)> {
    Models::around(k, &[source, target]).identify(f, source, target)
}

/// Concrete stand-ins for the indecomposables in a window.
#[derive(Clone, Copy, Debug)]
pub struct Models {
    pub field: Field,
    /// Lowest degree of every truncated `X_∞`.
    pub bottom: i32,
}

impl Models {
    pub fn new(field: Field, bottom: i32) -> Self {
        Models { field, bottom }
    }

    /// A bottom deep enough below every object in `objs` that the cut-off is
    /// invisible to maps between them.
    pub fn around(field: Field, objs: &[(Size, i32)]) -> Self {
        let low = objs
            .iter()
            .map(|&(i, h)| match i {
                Size::Finite(i) => -(i as i32) - h,
                Size::Inf => -1 - h,
            })
            .min()
            .unwrap_or(-1);
        let spread = objs.iter().map(|&(_, h)| h).max().unwrap_or(0) - objs.iter().map(|&(_, h)| h).min().unwrap_or(0);
        Models::new(field, low - spread - 6)
    }

    /// Free model; `X_∞[h]` is cut at [`Models::bottom`].
    pub fn source(&self, (i, h): (Size, i32)) -> Complex {
        match i {
            Size::Finite(i) => Complex::indecomposable(self.field, i, h),
            Size::Inf => Complex::eps_chain(self.field, self.bottom, -1 - h),
        }
    }

    /// Target model; `X_∞[h]` is `k` in degree `-1-h`.
    pub fn target(&self, (i, h): (Size, i32)) -> Complex {
        match i {
            Size::Finite(i) => Complex::indecomposable(self.field, i, h),
            Size::Inf => Complex::residue_field(self.field, -1 - h),
        }
    }

    /// The quasi-isomorphism `source(x) → target(x)`.
    pub fn augmentation(&self, x: (Size, i32)) -> Result<ChainMap> {
        let (s, t) = (self.source(x), self.target(x));
        match x.0 {
            Size::Finite(_) => ChainMap::identity(&s),
            Size::Inf => {
                let n = -1 - x.1;
                ChainMap::new(s, t, [(n, self.projection())].into_iter().collect())
            }
        }
    }

    /// `A → k`, `a + εb ↦ a`.
    fn projection(&self) -> ModMap {
        let k = self.field;
        ModMap::from_blocks(
            DualMatrix::zeros(k, 0, 1),
            FieldMatrix::identity(k, 1),
            FieldMatrix::zeros(k, 0, 0),
            FieldMatrix::zeros(k, 1, 0),
        )
        .unwrap()
    }

    fn len(&self, (i, h): (Size, i32)) -> usize {
        match i {
            Size::Finite(i) => i,
            Size::Inf => (-h - self.bottom) as usize,
        }
    }

    /// Representative `source(g.source) → target(g.target)`.
    pub fn rep(&self, g: &GeneratorRef) -> Result<ChainMap> {
        g.check()?;
        let k = self.field;
        match g.target.0 {
            Size::Inf => {
                // Only 1-type maps land in X_∞: project onto k in its degree.
                let n = -1 - g.target.1;
                let comps = [(n, self.projection())].into_iter().collect();
                ChainMap::new(self.source(g.source), self.target(g.target), comps)
                    .map_err(|e| Error::Internal(format!("generator representative: {e}")))
            }
            Size::Finite(j) => chain_rep(k, (self.len(g.source), g.source.1), (j, g.target.1), g.kind),
        }
    }

    /// Representative between the truncated free models of both ends.
    pub fn free_rep(&self, g: &GeneratorRef) -> Result<ChainMap> {
        g.check()?;
        chain_rep(
            self.field,
            (self.len(g.source), g.source.1),
            (self.len(g.target), g.target.1),
            g.kind,
        )
    }

    pub fn identify(&self, f: &ChainMap, source: (Size, i32), target: (Size, i32)) -> Result<(FieldElem, FieldElem)> {
        let k = self.field;
        let sys = HomSystem::new(&self.source(source), &self.target(target))?;
        let desc = hom_table(source.0, target.0, target.1 - source.1);
        let kinds: Vec<Kind> = [Kind::One, Kind::Eps].into_iter().filter(|&kd| desc.has(kd)).collect();
        let reps = kinds
            .iter()
            .map(|&kind| self.rep(&GeneratorRef::new(source, target, kind)))
            .collect::<Result<Vec<_>>>()?;
        let coeffs = sys
            .express(f, &reps)?
            .ok_or_else(|| Error::Internal("map is not a combination of the tabulated generators".into()))?;
        let mut out = (k.zero(), k.zero());
        for (kind, c) in kinds.into_iter().zip(coeffs) {
            match kind {
                Kind::One => out.0 = c,
                Kind::Eps => out.1 = c,
            }
        }
        Ok(out)
    }

    /// Lifts `f : source(x) → target(y)` along the augmentation of `y`.
    pub fn lift(&self, f: &ChainMap, y: (Size, i32)) -> Result<ChainMap> {
        let sx = f.source().clone();
        let sy = self.source(y);
        let aug = self.augmentation(y)?;
        let basis = HomSystem::new(&sx, &sy)?.basis()?;
        let pushed = basis.iter().map(|b| b.then(&aug)).collect::<Result<Vec<_>>>()?;
        let sys = HomSystem::new(&sx, &self.target(y))?;
        let c = sys
            .express(f, &pushed)?
            .ok_or_else(|| Error::Internal("map does not lift along the augmentation".into()))?;
        let mut out = ChainMap::zero(sx, sy)?;
        for (b, c) in basis.iter().zip(c) {
            out = out.add(&b.scale(&c))?;
        }
        Ok(out)
    }

    /// `(a, b)` of the composite of two generators, computed on concrete models.
    pub fn compose_concrete(&self, f: &GeneratorRef, g: &GeneratorRef) -> Result<(FieldElem, FieldElem)> {
        if f.target != g.source {
            return Err(Error::ObjectMismatch(format!("{f} then {g}")));
        }
        let lifted = self.lift(&self.rep(f)?, f.target)?;
        let comp = lifted.then(&self.rep(g)?)?;
        self.identify(&comp, f.source, g.target)
    }
}

/// A morphism between formal objects in generator coordinates. Block indices
/// refer to [`FormalObject::expanded`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMorphism {
    field: Field,
    source: FormalObject,
    target: FormalObject,
    blocks: BTreeMap<(usize, usize), (FieldElem, FieldElem)>,
}

impl SymMorphism {
    /// Checks indices and that coefficients sit only on existing generators.
    pub fn new(
        field: Field,
        source: FormalObject,
        target: FormalObject,
        blocks: impl IntoIterator<Item = ((usize, usize), (FieldElem, FieldElem))>,
    ) -> Result<Self> {
        let (src, tgt) = (source.expanded(), target.expanded());
        let mut map = BTreeMap::new();
        for ((from, to), (a, b)) in blocks {
            let (Some(&x), Some(&y)) = (src.get(from), tgt.get(to)) else {
                return Err(Error::DimensionMismatch(format!("block ({from}, {to}) out of range")));
            };
            if a.field() != field || b.field() != field {
                return Err(Error::MixedFields(field.to_string(), a.field().to_string()));
            }
            let desc = hom_table(x.0, y.0, y.1 - x.1);
            if !a.is_zero() && !desc.has_one_type {
                return Err(Error::NoSuchGenerator(GeneratorRef::new(x, y, Kind::One).to_string()));
            }
            if !b.is_zero() && !desc.has_eps_type {
                return Err(Error::NoSuchGenerator(GeneratorRef::new(x, y, Kind::Eps).to_string()));
            }
            let entry = map.entry((from, to)).or_insert((field.zero(), field.zero()));
            entry.0 += &a;
            entry.1 += &b;
        }
        map.retain(|_, (a, b)| !(a.is_zero() && b.is_zero()));
        Ok(SymMorphism {
            field,
            source,
            target,
            blocks: map,
        })
    }

    pub fn zero(field: Field, source: FormalObject, target: FormalObject) -> Self {
        SymMorphism {
            field,
            source,
            target,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(field: Field, obj: &FormalObject) -> Self {
        let n = obj.expanded().len();
        let blocks = (0..n).map(|i| ((i, i), (field.one(), field.zero())));
        Self::new(field, obj.clone(), obj.clone(), blocks).expect("identity blocks exist")
    }

    /// `c` times a single generator, between the two indecomposables.
    pub fn generator(field: Field, g: &GeneratorRef, c: FieldElem) -> Result<Self> {
        g.check()?;
        let (a, b) = match g.kind {
            Kind::One => (c, field.zero()),
            Kind::Eps => (field.zero(), c),
        };
        Self::new(
            field,
            FormalObject::indecomposable(g.source.0, g.source.1),
            FormalObject::indecomposable(g.target.0, g.target.1),
            [((0, 0), (a, b))],
        )
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn source(&self) -> &FormalObject {
        &self.source
    }

    pub fn target(&self) -> &FormalObject {
        &self.target
    }

    /// Nonzero blocks `(from, to) → (a, b)`.
    pub fn blocks(&self) -> &BTreeMap<(usize, usize), (FieldElem, FieldElem)> {
        &self.blocks
    }

    pub fn block(&self, from: usize, to: usize) -> (FieldElem, FieldElem) {
        self.blocks
            .get(&(from, to))
            .cloned()
            .unwrap_or((self.field.zero(), self.field.zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Rescales each block; used by functors acting on coefficients.
    pub fn map_blocks(&self, f: impl Fn((Size, i32), (Size, i32), &FieldElem, &FieldElem) -> (FieldElem, FieldElem)) -> Self {
        let (src, tgt) = (self.source.expanded(), self.target.expanded());
        let blocks = self
            .blocks
            .iter()
            .map(|(&(i, j), (a, b))| ((i, j), f(src[i], tgt[j], a, b)));
        Self::new(self.field, self.source.clone(), self.target.clone(), blocks).expect("scaled blocks keep their support")
    }
}

impl fmt::Display for SymMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)?;
        for ((i, j), (a, b)) in &self.blocks {
            write!(f, "; [{i}->{j}] ({a}, {b})")?;
        }
        Ok(())
    }
}

/// `g ∘ f` by the generator composition rules.
pub fn compose_sym(g: &SymMorphism, f: &SymMorphism) -> Result<SymMorphism> {
    if f.target != g.source {
        return Err(Error::ObjectMismatch(format!("{} vs {}", f.target, g.source)));
    }
    if f.field != g.field {
        return Err(Error::MixedFields(f.field.to_string(), g.field.to_string()));
    }
    let k = f.field;
    let (src, tgt) = (f.source.expanded(), g.target.expanded());
    let mut out: BTreeMap<(usize, usize), (FieldElem, FieldElem)> = BTreeMap::new();
    for (&(from, mid), (a, b)) in &f.blocks {
        for (&(mid2, to), (a2, b2)) in g.blocks.range((mid, 0)..(mid + 1, 0)) {
            debug_assert_eq!(mid, mid2);
            let desc = hom_table(src[from].0, tgt[to].0, tgt[to].1 - src[from].1);
            let entry = out.entry((from, to)).or_insert((k.zero(), k.zero()));
            if desc.has_one_type {
                entry.0 += &(a2 * a);
            }
            if desc.has_eps_type {
                entry.1 += &(&(a2 * b) + &(b2 * a));
            }
        }
    }
    SymMorphism::new(k, f.source.clone(), g.target.clone(), out)
}

/// The third vertex of the triangle on `c·g`.
pub fn cone_symbolic(k: Field, g: &GeneratorRef, c: &FieldElem) -> Result<FormalObject> {
    g.check()?;
    if c.is_zero() {
        return Err(Error::Internal("cone of a zero multiple".into()));
    }
    if let (Size::Finite(_), Size::Finite(_)) = (g.source.0, g.target.0) {
        let f = generator_rep(k, g)?.scale(c);
        return crate::decomp::barcode(&cone(&f)?);
    }
    let models = Models::around(k, &[g.source, g.target]);
    let first = truncated_cone(&models, g, c)?;
    let deeper = truncated_cone(&Models::new(k, models.bottom - 1), g, c)?;
    if first != deeper {
        return Err(Error::Internal(format!("cone of {g} does not stabilize: {first} vs {deeper}")));
    }
    Ok(first)
}

/// Cone on truncated free models; bars reaching the cut-off are read as `X_∞`.
fn truncated_cone(models: &Models, g: &GeneratorRef, c: &FieldElem) -> Result<FormalObject> {
    let f = models.free_rep(g)?.scale(c);
    let summands = bars(&cone(&f)?)?.into_iter().map(|b| {
        if b.start <= models.bottom {
            Summand {
                i: Size::Inf,
                h: -1 - b.end,
                m: b.mult,
            }
        } else {
            b.summand()
        }
    });
    Ok(FormalObject::new(summands))
}

/// Smallest admissible truncation length for an `X_∞` source.
pub fn truncation_bound(j: Size, alpha: i32) -> usize {
    let amplitude = match j {
        Size::Finite(j) => j,
        Size::Inf => 1,
    };
    amplitude + alpha.unsigned_abs() as usize + 2
}

/// `dim Hom(X_i, X_j[α])` on concrete models: an `X_∞` source becomes `X_n`,
/// an `X_∞` target becomes `k` in degree `-1-α`.
pub fn hom_infty(k: Field, i: Size, j: Size, alpha: i32, n: usize) -> Result<usize> {
    let bound = truncation_bound(j, alpha);
    if i.is_inf() && n < bound {
        return Err(Error::TruncationTooShort { n, bound });
    }
    let x = match i {
        Size::Finite(i) => Complex::indecomposable(k, i, 0),
        Size::Inf => Complex::indecomposable(k, n, 0),
    };
    let y = match j {
        Size::Finite(j) => Complex::indecomposable(k, j, alpha),
        Size::Inf => Complex::residue_field(k, -1 - alpha),
    };
    Ok(HomSystem::new(&x, &y)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Field {
        Field::Prime(7)
    }

    const INF: Size = Size::Inf;

    fn f(i: usize) -> Size {
        Size::Finite(i)
    }

    fn gen(i: Size, h1: i32, j: Size, h2: i32, kind: Kind) -> GeneratorRef {
        GeneratorRef::new((i, h1), (j, h2), kind)
    }

    fn obj(i: Size, h: i32) -> FormalObject {
        FormalObject::indecomposable(i, h)
    }

    #[test]
    fn table_examples() {
        assert_eq!(hom_table(f(1), f(1), 0), HomDescriptor::new(true, true));
        assert_eq!(hom_table(f(2), f(1), 1), HomDescriptor::new(true, false));
        assert_eq!(hom_table(f(5), f(3), -3).dim, 0);
        assert_eq!(hom_table(INF, INF, 1).dim, 1);
        assert_eq!(hom_table(INF, f(2), 0), HomDescriptor::new(false, true));
        assert_eq!(hom_table(f(3), INF, 3).dim, 0);
    }

    #[test]
    fn serre_symmetry() {
        for i in 1..7 {
            for j in 1..7 {
                for a in -8..=8 {
                    assert_eq!(hom_table(f(i), f(j), a).dim, hom_table(f(j), f(i), -a).dim);
                }
            }
        }
    }

    #[test]
    fn brute_force_small_cases() {
        let x = |i, h| Complex::indecomposable(k(), i, h);
        assert_eq!(hom_bruteforce(&x(1, 0), &x(1, 0)).unwrap().0, 2);
        assert_eq!(hom_bruteforce(&x(2, 0), &x(1, 1)).unwrap().0, 1);
    }

    #[test]
    fn representatives_match_diagrams() {
        let one = generator_rep(k(), &gen(f(1), 0, f(2), 0, Kind::One)).unwrap();
        assert_eq!(one.components().keys().copied().collect::<Vec<_>>(), vec![-1]);
        let eps = generator_rep(k(), &gen(f(2), 0, f(1), 0, Kind::Eps)).unwrap();
        assert_eq!(eps.component(-1).a_to_a[(0, 0)], DualScalar::eps(k()));
        assert!(generator_rep(k(), &gen(f(5), 0, f(3), -3, Kind::One)).is_err());
    }

    #[test]
    fn identify_examples() {
        let g = gen(f(1), 0, f(1), 0, Kind::Eps);
        let rep = generator_rep(k(), &g).unwrap();
        assert_eq!(identify(k(), &rep, g.source, g.target).unwrap(), (k().zero(), k().one()));
        let three = rep.scale(&k().from_i64(3));
        assert_eq!(identify(k(), &three, g.source, g.target).unwrap(), (k().zero(), k().from_i64(3)));
        // Composite of two 1-generators: X_3 → X_2[1] → X_1[2].
        let a = generator_rep(k(), &gen(f(3), 0, f(2), 1, Kind::One)).unwrap();
        let b = generator_rep(k(), &gen(f(2), 1, f(1), 2, Kind::One)).unwrap();
        let c = a.then(&b).unwrap();
        assert_eq!(identify(k(), &c, (f(3), 0), (f(1), 2)).unwrap(), (k().one(), k().zero()));
    }

    #[test]
    fn composition_examples() {
        let s = |g: GeneratorRef| SymMorphism::generator(k(), &g, k().one()).unwrap();
        let one_12 = s(gen(f(1), 0, f(2), 0, Kind::One));
        let eps_21 = s(gen(f(2), 0, f(1), 0, Kind::Eps));
        assert_eq!(compose_sym(&one_12, &eps_21).unwrap(), s(gen(f(2), 0, f(2), 0, Kind::Eps)));
        assert_eq!(compose_sym(&eps_21, &one_12).unwrap(), s(gen(f(1), 0, f(1), 0, Kind::Eps)));
        let eps_11 = s(gen(f(1), 0, f(1), 0, Kind::Eps));
        assert!(compose_sym(&eps_11, &eps_11).unwrap().is_zero());
        assert!(compose_sym(&eps_11, &one_12).is_err());
    }

    #[test]
    fn endomorphism_ring_law() {
        let x = obj(f(2), 0);
        let m = |a: i64, b: i64| {
            SymMorphism::new(k(), x.clone(), x.clone(), [((0, 0), (k().from_i64(a), k().from_i64(b)))]).unwrap()
        };
        assert_eq!(compose_sym(&m(2, 3), &m(4, 5)).unwrap(), m(8, 2 * 5 + 4 * 3));
    }

    #[test]
    fn cone_examples() {
        let one = k().one();
        let c = |g| cone_symbolic(k(), &g, &one).unwrap();
        assert_eq!(c(gen(f(1), 0, f(1), 0, Kind::Eps)), obj(f(2), 0));
        assert!(c(gen(f(1), 0, f(1), 0, Kind::One)).is_zero());
        assert_eq!(c(gen(f(2), 0, f(1), 1, Kind::One)), obj(f(1), 1));
        assert_eq!(c(gen(INF, 0, f(1), 0, Kind::Eps)), obj(INF, 0));
        assert_eq!(c(gen(f(1), 0, INF, 0, Kind::One)), obj(INF, 1));
        assert_eq!(c(gen(INF, 0, INF, 1, Kind::One)), obj(f(1), 1));
        assert_eq!(
            c(gen(f(2), 0, INF, 1, Kind::One)),
            obj(f(1), 1).direct_sum(&obj(INF, 2))
        );
    }

    #[test]
    fn hom_infty_examples() {
        assert_eq!(hom_infty(k(), INF, INF, 1, truncation_bound(INF, 1)).unwrap(), 1);
        assert_eq!(hom_infty(k(), INF, f(2), 0, truncation_bound(f(2), 0)).unwrap(), 1);
        assert_eq!(hom_infty(k(), f(3), INF, 3, 1).unwrap(), 0);
        assert!(matches!(
            hom_infty(k(), INF, f(2), 0, 2),
            Err(Error::TruncationTooShort { .. })
        ));
    }

    #[test]
    fn infinite_compositions_follow_the_finite_rules() {
        let sizes = [f(1), f(2), f(3), INF];
        let mut checked = 0;
        for &a in &sizes {
            for &b in &sizes {
                for &c in &sizes {
                    if !(a.is_inf() || b.is_inf() || c.is_inf()) {
                        continue;
                    }
                    for h1 in -2..=2 {
                        for h2 in -2..=2 {
                            for k1 in [Kind::One, Kind::Eps] {
                                for k2 in [Kind::One, Kind::Eps] {
                                    let fg = gen(a, 0, b, h1, k1);
                                    let gg = gen(b, h1, c, h1 + h2, k2);
                                    if !fg.exists() || !gg.exists() {
                                        continue;
                                    }
                                    let models = Models::around(k(), &[fg.source, fg.target, gg.target]);
                                    let concrete = models.compose_concrete(&fg, &gg).unwrap();
                                    let sym = compose_sym(
                                        &SymMorphism::generator(k(), &gg, k().one()).unwrap(),
                                        &SymMorphism::generator(k(), &fg, k().one()).unwrap(),
                                    )
                                    .unwrap();
                                    assert_eq!(concrete, sym.block(0, 0), "{fg} then {gg}");
                                    checked += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn finite_compositions_follow_the_rules() {
        for i in 1..=4 {
            for j in 1..=4 {
                for l in 1..=4 {
                    for a in -4..=4 {
                        for b in -4..=4 {
                            for k1 in [Kind::One, Kind::Eps] {
                                for k2 in [Kind::One, Kind::Eps] {
                                    let fg = gen(f(i), 0, f(j), a, k1);
                                    let gg = gen(f(j), a, f(l), a + b, k2);
                                    if !fg.exists() || !gg.exists() {
                                        continue;
                                    }
                                    let comp = generator_rep(k(), &fg)
                                        .unwrap()
                                        .then(&generator_rep(k(), &gg).unwrap())
                                        .unwrap();
                                    let concrete = identify(k(), &comp, fg.source, gg.target).unwrap();
                                    let sym = compose_sym(
                                        &SymMorphism::generator(k(), &gg, k().one()).unwrap(),
                                        &SymMorphism::generator(k(), &fg, k().one()).unwrap(),
                                    )
                                    .unwrap();
                                    assert_eq!(concrete, sym.block(0, 0), "{fg} then {gg}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn arb_endo() -> impl Strategy<Value = SymMorphism> {
        let x = obj(f(1), 0).direct_sum(&obj(f(2), 0)).direct_sum(&obj(f(1), 1));
        prop::collection::vec(0i64..7, 18).prop_map(move |v| {
            let src = x.expanded();
            let mut blocks = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    let d = hom_table(src[i].0, src[j].0, src[j].1 - src[i].1);
                    let a = if d.has_one_type { v[6 * i + 2 * j] } else { 0 };
                    let b = if d.has_eps_type { v[6 * i + 2 * j + 1] } else { 0 };
                    blocks.push(((i, j), (k().from_i64(a), k().from_i64(b))));
                }
            }
            SymMorphism::new(k(), x.clone(), x.clone(), blocks).unwrap()
        })
    }

    proptest! {
        #[test]
        fn composition_is_associative(f1 in arb_endo(), f2 in arb_endo(), f3 in arb_endo()) {
            let l = compose_sym(&f3, &compose_sym(&f2, &f1).unwrap()).unwrap();
            let r = compose_sym(&compose_sym(&f3, &f2).unwrap(), &f1).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn identity_is_neutral(f1 in arb_endo()) {
            let id = SymMorphism::identity(k(), f1.source());
            prop_assert_eq!(compose_sym(&id, &f1).unwrap(), f1.clone());
            prop_assert_eq!(compose_sym(&f1, &id).unwrap(), f1);
        }
    }
}
