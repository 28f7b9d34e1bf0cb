use std::collections::BTreeMap;
use std::fmt;

use super::modmap::{ModMap, Term};
use crate::error::{Error, Result};
use crate::linalg::{DualMatrix, DualScalar, Field, FieldElem, Matrix};

/// A bounded complex of finitely generated `A`-modules `A^f ⊕ k^t`, with
/// cohomological differentials `d^n : C^n → C^{n+1}`.
///
/// A complex without `k` summands is a complex of free modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    field: Field,
    terms: BTreeMap<i32, Term>,
    diffs: BTreeMap<i32, ModMap>,
}

/// Outcome of [`Complex::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Ok,
    /// `d^{degree+1} ∘ d^{degree} ≠ 0`.
    SquareNonzero { degree: i32 },
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validation::Ok)
    }
}

impl Complex {
    pub fn zero(field: Field) -> Self {
        Complex {
            field,
            terms: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    /// Builds a complex; missing differentials are zero. Shapes and fields are
    /// checked, `d² = 0` is not (see [`Complex::validate`]).
    pub fn new(field: Field, terms: BTreeMap<i32, Term>, diffs: BTreeMap<i32, ModMap>) -> Result<Self> {
        let terms: BTreeMap<i32, Term> = terms.into_iter().filter(|(_, t)| !t.is_zero()).collect();
        let mut kept = BTreeMap::new();
        for (n, d) in diffs {
            if d.field() != field {
                return Err(Error::MixedFields(field.to_string(), d.field().to_string()));
            }
            let s = terms.get(&n).copied().unwrap_or_default();
            let t = n.checked_add(1).and_then(|m| terms.get(&m).copied()).unwrap_or_default();
            if d.source != s || d.target != t {
                return Err(Error::DimensionMismatch(format!(
                    "d^{n} is {} -> {}, terms are {s} -> {t}",
                    d.source, d.target
                )));
            }
            if !d.is_zero() {
                kept.insert(n, d);
            }
        }
        Ok(Complex {
            field,
            terms,
            diffs: kept,
        })
    }

    /// A complex of free modules from ranks and dual-number differentials.
    pub fn free(field: Field, ranks: BTreeMap<i32, usize>, diffs: BTreeMap<i32, DualMatrix>) -> Result<Self> {
        let terms = ranks.into_iter().map(|(n, r)| (n, Term::free(r))).collect();
        Self::new(field, terms, diffs.into_iter().map(|(n, d)| (n, ModMap::free(d))).collect())
    }

    /// The ε-chain `A → A → ⋯ → A` in degrees `-i-h ..= -1-h`, i.e. `X_i[h]`
    /// with all differentials equal to `+ε`.
    pub fn indecomposable(field: Field, i: usize, h: i32) -> Self {
        assert!(i > 0, "X_i needs i > 0");
        let top = -1 - h;
        let bottom = top - (i as i32 - 1);
        Self::eps_chain(field, bottom, top)
    }

    /// `A → ⋯ → A` with ε differentials on the degrees `bottom ..= top`.
    pub fn eps_chain(field: Field, bottom: i32, top: i32) -> Self {
        let eps = Matrix::from_vec(field, 1, 1, vec![DualScalar::eps(field)]).unwrap();
        let terms = (bottom..=top).map(|n| (n, Term::free(1))).collect();
        let diffs = (bottom..top).map(|n| (n, ModMap::free(eps.clone()))).collect();
        Self::new(field, terms, diffs).unwrap()
    }

    /// The module `k` placed in one degree.
    pub fn residue_field(field: Field, degree: i32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(degree, Term { free: 0, kdim: 1 });
        Self::new(field, terms, BTreeMap::new()).unwrap()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn term(&self, n: i32) -> Term {
        self.terms.get(&n).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<i32, Term> {
        &self.terms
    }

    pub fn diff(&self, n: i32) -> ModMap {
        match self.diffs.get(&n) {
            Some(d) => d.clone(),
            None => ModMap::zero(self.field, self.term(n), self.term(n + 1)),
        }
    }

    /// Nonzero differentials only.
    pub fn diffs(&self) -> &BTreeMap<i32, ModMap> {
        &self.diffs
    }

    /// The `A → A` block of `d^n`, for free complexes.
    pub fn free_diff(&self, n: i32) -> DualMatrix {
        self.diff(n).a_to_a
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.terms.values().all(|t| t.kdim == 0)
    }

    /// Lowest and highest nonzero degree.
    pub fn span(&self) -> Option<(i32, i32)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    pub fn rank(&self, n: i32) -> usize {
        self.term(n).free
    }

    pub fn validate(&self) -> Validation {
        let Some((lo, hi)) = self.span() else {
            return Validation::Ok;
        };
        for n in lo..hi {
            let (d0, d1) = (self.diff(n), self.diff(n + 1));
            if d0.is_zero() || d1.is_zero() {
                continue;
            }
            if !d1.compose(&d0).is_zero() {
                return Validation::SquareNonzero { degree: n };
            }
        }
        Validation::Ok
    }

    /// `(C[s])^m = C^{m+s}` with differentials multiplied by `(-1)^s`.
    pub fn shift(&self, s: i32) -> Self {
        let sign = if s.rem_euclid(2) == 0 {
            self.field.one()
        } else {
            -self.field.one()
        };
        Complex {
            field: self.field,
            terms: self.terms.iter().map(|(&n, &t)| (n - s, t)).collect(),
            diffs: self.diffs.iter().map(|(&n, d)| (n - s, d.scale(&sign))).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Complex) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::MixedFields(self.field.to_string(), other.field.to_string()));
        }
        let degrees: std::collections::BTreeSet<i32> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        let terms = degrees
            .iter()
            .map(|&n| (n, self.term(n).plus(&other.term(n))))
            .collect();
        let diffs = degrees
            .iter()
            .map(|&n| {
                let (a, b) = (self.diff(n), other.diff(n));
                let d = ModMap::assemble(
                    self.field,
                    &[a.source, b.source],
                    &[a.target, b.target],
                    &[vec![Some(&a), None], vec![None, Some(&b)]],
                );
                (n, d)
            })
            .collect();
        Self::new(self.field, terms, diffs)
    }

    /// Applies an invertible change of basis degreewise: the new differential is
    /// `P_{n+1} d^n P_n^{-1}`. Used to scramble test fixtures.
    pub fn conjugate(&self, basis: &BTreeMap<i32, (DualMatrix, DualMatrix)>) -> Result<Self> {
        if !self.is_free() {
            return Err(Error::NotFree);
        }
        let ident = |n: i32| DualMatrix::identity(self.field, self.rank(n));
        let fwd = |n: i32| basis.get(&n).map_or_else(|| ident(n), |(p, _)| p.clone());
        let inv = |n: i32| basis.get(&n).map_or_else(|| ident(n), |(_, q)| q.clone());
        for (n, (p, q)) in basis {
            if p.mul(q) != ident(*n) {
                return Err(Error::DimensionMismatch(format!("basis change at {n} is not inverted")));
            }
        }
        let diffs = self
            .diffs
            .iter()
            .map(|(&n, d)| (n, ModMap::free(fwd(n + 1).mul(&d.a_to_a).mul(&inv(n)))))
            .collect();
        Self::new(self.field, self.terms.clone(), diffs)
    }

    /// Total `k`-dimension of `H^n`, computed directly from the realized differentials.
    pub fn cohomology_k_dim(&self, n: i32) -> usize {
        use crate::linalg::rank;
        let dim = self.term(n).k_dim();
        let out = rank(&self.diff(n).realize());
        let inc = rank(&self.diff(n - 1).realize());
        dim - out - inc
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, t) in &self.terms {
            if !first {
                let d = self.diff(n - 1);
                if d.is_zero() {
                    write!(f, " -> ")?;
                } else {
                    write!(f, " -{}-> ", d.a_to_a)?;
                }
            }
            first = false;
            write!(f, "{t}@{n}")?;
        }
        Ok(())
    }
}

/// A degreewise family of typed maps `f^n : X^n → Y^n` commuting with the
/// differentials. The source must be free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    comps: BTreeMap<i32, ModMap>,
}

impl ChainMap {
    pub fn new(source: Complex, target: Complex, comps: BTreeMap<i32, ModMap>) -> Result<Self> {
        let f = Self::new_unchecked(source, target, comps)?;
        if let Some(degree) = f.first_noncommuting_degree() {
            return Err(Error::NotAChainMap { degree });
        }
        Ok(f)
    }

    /// Checks shapes and freeness of the source but not commutativity.
    pub fn new_unchecked(source: Complex, target: Complex, comps: BTreeMap<i32, ModMap>) -> Result<Self> {
        if !source.is_free() {
            return Err(Error::NotFree);
        }
        if source.field() != target.field() {
            return Err(Error::MixedFields(source.field().to_string(), target.field().to_string()));
        }
        let mut kept = BTreeMap::new();
        for (n, c) in comps {
            if (c.source, c.target) != (source.term(n), target.term(n)) {
                return Err(Error::DimensionMismatch(format!("component in degree {n}")));
            }
            if !c.is_zero() {
                kept.insert(n, c);
            }
        }
        Ok(ChainMap {
            source,
            target,
            comps: kept,
        })
    }

    pub fn zero(source: Complex, target: Complex) -> Result<Self> {
        Self::new(source, target, BTreeMap::new())
    }

    pub fn identity(c: &Complex) -> Result<Self> {
        let comps = c.terms().iter().map(|(&n, &t)| (n, ModMap::identity(c.field(), t))).collect();
        Self::new(c.clone(), c.clone(), comps)
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn component(&self, n: i32) -> ModMap {
        match self.comps.get(&n) {
            Some(c) => c.clone(),
            None => ModMap::zero(self.source.field(), self.source.term(n), self.target.term(n)),
        }
    }

    pub fn components(&self) -> &BTreeMap<i32, ModMap> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn first_noncommuting_degree(&self) -> Option<i32> {
        let degrees: std::collections::BTreeSet<i32> = self
            .source
            .terms()
            .keys()
            .chain(self.target.terms().keys())
            .copied()
            .collect();
        degrees.into_iter().find(|&n| {
            let lhs = self.target.diff(n).compose(&self.component(n));
            let rhs = self.component(n + 1).compose(&self.source.diff(n));
            lhs != rhs
        })
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ChainMap) -> Result<ChainMap> {
        if self.target != g.source {
            return Err(Error::ObjectMismatch("middle complexes differ".into()));
        }
        let comps = self
            .comps
            .keys()
            .map(|&n| (n, g.component(n).compose(&self.component(n))))
            .collect();
        ChainMap::new(self.source.clone(), g.target.clone(), comps)
    }

    pub fn scale(&self, c: &FieldElem) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: self
                .comps
                .iter()
                .map(|(&n, m)| (n, m.scale(c)))
                .filter(|(_, m)| !m.is_zero())
                .collect(),
        }
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ObjectMismatch("sum of maps between different complexes".into()));
        }
        let keys: std::collections::BTreeSet<i32> =
            self.comps.keys().chain(other.comps.keys()).copied().collect();
        let comps = keys
            .into_iter()
            .map(|n| (n, self.component(n).add(&other.component(n))))
            .collect();
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), comps)
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.add(&other.scale(&-self.source.field().one()))
    }

    /// `f[s]^m = f^{m+s}`, between the shifted complexes.
    pub fn shift(&self, s: i32) -> ChainMap {
        ChainMap {
            source: self.source.shift(s),
            target: self.target.shift(s),
            comps: self.comps.iter().map(|(&n, c)| (n - s, c.clone())).collect(),
        }
    }
}

/// Maps `s^n : X^n → Y^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub comps: BTreeMap<i32, ModMap>,
}

impl Homotopy {
    /// The chain map `d s + s d` between `source` and `target`.
    pub fn boundary(&self, source: &Complex, target: &Complex) -> Result<ChainMap> {
        let k = source.field();
        let s = |n: i32| {
            self.comps
                .get(&n)
                .cloned()
                .unwrap_or_else(|| ModMap::zero(k, source.term(n), target.term(n - 1)))
        };
        let degrees: std::collections::BTreeSet<i32> = source.terms().keys().copied().collect();
        let comps = degrees
            .into_iter()
            .map(|n| {
                let ds = target.diff(n - 1).compose(&s(n));
                let sd = s(n + 1).compose(&source.diff(n));
                (n, ds.add(&sd))
            })
            .collect();
        ChainMap::new_unchecked(source.clone(), target.clone(), comps)
    }
}

/// `Cone(f)^n = X^{n+1} ⊕ Y^n` with differential `[[-d_X, 0], [f, d_Y]]`.
pub fn cone(f: &ChainMap) -> Result<Complex> {
    let (x, y) = (f.source(), f.target());
    let k = x.field();
    let degrees: std::collections::BTreeSet<i32> = x
        .terms()
        .keys()
        .map(|n| n - 1)
        .chain(y.terms().keys().copied())
        .collect();
    let mut terms = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        terms.insert(n, x.term(n + 1).plus(&y.term(n)));
    }
    let lo = degrees.iter().next().copied();
    let hi = degrees.iter().next_back().copied();
    if let (Some(lo), Some(hi)) = (lo, hi) {
        for n in lo..hi {
            let dx = x.diff(n + 1).neg();
            let fx = f.component(n + 1);
            let dy = y.diff(n);
            let d = ModMap::assemble(
                k,
                &[x.term(n + 1), y.term(n)],
                &[x.term(n + 2), y.term(n + 1)],
                &[vec![Some(&dx), None], vec![Some(&fx), Some(&dy)]],
            );
            diffs.insert(n, d);
        }
    }
    let c = Complex::new(k, terms, diffs)?;
    match c.validate() {
        Validation::Ok => Ok(c),
        Validation::SquareNonzero { degree } => Err(Error::NotAComplex { degree }),
    }
}

/// Inclusion `Y → Cone(f)` of the second summand.
pub fn cone_inclusion(f: &ChainMap) -> Result<ChainMap> {
    let c = cone(f)?;
    let (x, y) = (f.source(), f.target());
    let k = x.field();
    let comps = y
        .terms()
        .iter()
        .map(|(&n, &t)| {
            let id = ModMap::identity(k, t);
            let m = ModMap::assemble(k, &[t], &[x.term(n + 1), t], &[vec![None], vec![Some(&id)]]);
            (n, m)
        })
        .collect();
    ChainMap::new(y.clone(), c, comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> Field {
        Field::Prime(7)
    }

    fn dual(a: i64, b: i64) -> DualScalar {
        DualScalar::new(k().from_i64(a), k().from_i64(b))
    }

    fn one_by_one(x: DualScalar) -> DualMatrix {
        Matrix::from_vec(k(), 1, 1, vec![x]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(Complex::indecomposable(k(), 3, 0).validate().is_ok());
        assert!(Complex::zero(k()).validate().is_ok());
        let ranks = [(-3, 1), (-2, 1), (-1, 1)].into_iter().collect();
        let diffs = [(-3, one_by_one(dual(1, 1))), (-2, one_by_one(dual(1, 0)))]
            .into_iter()
            .collect();
        let c = Complex::free(k(), ranks, diffs).unwrap();
        assert_eq!(c.validate(), Validation::SquareNonzero { degree: -3 });
    }

    #[test]
    fn shift_conventions() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        assert_eq!(x1.shift(0), x1);
        let x2 = Complex::indecomposable(k(), 2, 0).shift(1);
        assert_eq!(x2.span(), Some((-3, -2)));
        assert_eq!(x2.free_diff(-3)[(0, 0)], dual(0, -1));
        let c = Complex::indecomposable(k(), 3, 2);
        assert_eq!(c.shift(2).shift(-5), c.shift(-3));
    }

    #[test]
    fn direct_sum_ranks() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        assert_eq!(x1.direct_sum(&Complex::zero(k())).unwrap(), x1);
        assert_eq!(x1.direct_sum(&x1).unwrap().rank(-1), 2);
    }

    #[test]
    fn cone_of_zero_splits() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        let z = ChainMap::zero(x1.clone(), x1.clone()).unwrap();
        let c = cone(&z).unwrap();
        assert_eq!(c, x1.shift(1).direct_sum(&x1).unwrap());
    }

    #[test]
    fn chain_map_rejects_noncommuting() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        let x2 = Complex::indecomposable(k(), 2, 0);
        // 1 in degree −1 from X_2 to X_1 does not commute: d_{X_2} hits it with ε.
        let comps = [(-1, ModMap::free(one_by_one(dual(1, 0))))].into_iter().collect();
        assert_eq!(
            ChainMap::new(x2, x1, comps).unwrap_err(),
            Error::NotAChainMap { degree: -2 }
        );
    }

    #[test]
    fn module_source_is_rejected() {
        let kk = Complex::residue_field(k(), -1);
        assert_eq!(ChainMap::zero(kk.clone(), kk).unwrap_err(), Error::NotFree);
    }
}
