//! Krull–Schmidt decomposition of perfect complexes into the `X_i[h]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::complexes::{ChainMap, Complex, ModMap};
use crate::error::{Error, Result};
use crate::linalg::{rank, DualMatrix, DualScalar, Field, FieldMatrix};

/// Length of an indecomposable: `X_i` for finite `i`, or `X_∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Size {
    Finite(usize),
    Inf,
}

impl Size {
    pub fn finite(self) -> Option<usize> {
        match self {
            Size::Finite(i) => Some(i),
            Size::Inf => None,
        }
    }

    pub fn is_inf(self) -> bool {
        self == Size::Inf
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Finite(i) => write!(f, "{i}"),
            Size::Inf => write!(f, "inf"),
        }
    }
}

/// One isotypic block `X_i[h]^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Summand {
    pub i: Size,
    pub h: i32,
    pub m: usize,
}

/// A direct sum of indecomposables, kept in canonical order (by `h`, then `i`)
/// with multiplicities merged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalObject {
    summands: Vec<Summand>,
}

impl FormalObject {
    pub fn new(summands: impl IntoIterator<Item = Summand>) -> Self {
        let mut merged: BTreeMap<(i32, Size), usize> = BTreeMap::new();
        for s in summands {
            if let Size::Finite(0) = s.i {
                continue;
            }
            *merged.entry((s.h, s.i)).or_default() += s.m;
        }
        FormalObject {
            summands: merged
                .into_iter()
                .filter(|&(_, m)| m > 0)
                .map(|((h, i), m)| Summand { i, h, m })
                .collect(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The single indecomposable `X_i[h]`.
    pub fn indecomposable(i: Size, h: i32) -> Self {
        Self::new([Summand { i, h, m: 1 }])
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Every indecomposable repeated by multiplicity, in canonical order.
    pub fn expanded(&self) -> Vec<(Size, i32)> {
        self.summands
            .iter()
            .flat_map(|s| std::iter::repeat_n((s.i, s.h), s.m))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn is_perfect(&self) -> bool {
        self.summands.iter().all(|s| !s.i.is_inf())
    }

    pub fn shift(&self, s: i32) -> Self {
        Self::new(self.summands.iter().map(|x| Summand { h: x.h + s, ..*x }))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::new(self.summands.iter().chain(&other.summands).copied())
    }

    /// The canonical complex: a direct sum of `+ε` chains.
    pub fn realize(&self, k: Field) -> Result<Complex> {
        let mut c = Complex::zero(k);
        for (i, h) in self.expanded() {
            let i = i.finite().ok_or(Error::NotPerfect)?;
            c = c.direct_sum(&Complex::indecomposable(k, i, h))?;
        }
        Ok(c)
    }
}

impl fmt::Display for FormalObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (n, s) in self.summands.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "X_{}[{}]", s.i, s.h)?;
            if s.m > 1 {
                write!(f, "^{}", s.m)?;
            }
        }
        Ok(())
    }
}

/// A minimal complex with the homotopy equivalence to the original.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub complex: Complex,
    /// `C → M`
    pub projection: ChainMap,
    /// `M → C`
    pub inclusion: ChainMap,
}

/// Cancels unit pivots until every differential entry lies in `εk`.
pub fn minimize(c: &Complex) -> Result<MinimalModel> {
    if !c.is_free() {
        return Err(Error::NotFree);
    }
    let k = c.field();
    let Some((lo, hi)) = c.span() else {
        let z = Complex::zero(k);
        return Ok(MinimalModel {
            complex: z.clone(),
            projection: ChainMap::zero(z.clone(), z.clone())?,
            inclusion: ChainMap::zero(z.clone(), z)?,
        });
    };
    let degrees: Vec<i32> = (lo..=hi).collect();
    let mut d: BTreeMap<i32, DualMatrix> = degrees.iter().map(|&n| (n, c.free_diff(n))).collect();
    // new = P · old, old = Q · new; rows of P / columns of Q are dropped with cancelled generators.
    let mut p: BTreeMap<i32, DualMatrix> =
        degrees.iter().map(|&n| (n, DualMatrix::identity(k, c.rank(n)))).collect();
    let mut q = p.clone();

    while let Some((n, r, col)) = find_unit_pivot(&d) {
        let u_inv = d[&n][(r, col)].inv().expect("unit pivot");
        let dn = d[&n].clone();
        let (rows, cols) = dn.shape();

        // Row operations on degree n+1: E = I − v e_rᵀ, E⁻¹ = I + v e_rᵀ.
        let mut e = DualMatrix::identity(k, rows);
        let mut e_inv = e.clone();
        for rr in (0..rows).filter(|&rr| rr != r) {
            let v = &dn[(rr, col)] * &u_inv;
            e_inv[(rr, r)] = v.clone();
            e[(rr, r)] = -&v;
        }
        let dn = e.mul(&dn);
        // Column operations on degree n: F = I − e_c wᵀ, F⁻¹ = I + e_c wᵀ.
        let mut f = DualMatrix::identity(k, cols);
        let mut f_inv = f.clone();
        for cc in (0..cols).filter(|&cc| cc != col) {
            let w = &dn[(r, cc)] * &u_inv;
            f_inv[(col, cc)] = w.clone();
            f[(col, cc)] = -&w;
        }
        let dn = dn.mul(&f);

        d.insert(n, dn);
        if let Some(next) = d.get(&(n + 1)).cloned() {
            d.insert(n + 1, next.mul(&e_inv));
        }
        if let Some(prev) = d.get(&(n - 1)).cloned() {
            d.insert(n - 1, f_inv.mul(&prev));
        }
        p.insert(n + 1, e.mul(&p[&(n + 1)]));
        q.insert(n + 1, q[&(n + 1)].mul(&e_inv));
        p.insert(n, f_inv.mul(&p[&n]));
        q.insert(n, q[&n].mul(&f));

        // The pivot now spans a contractible summand A → A; drop it.
        drop_generator(&mut d, &mut p, &mut q, n, col);
        drop_generator(&mut d, &mut p, &mut q, n + 1, r);
    }

    let ranks: BTreeMap<i32, usize> = p.iter().map(|(&n, m)| (n, m.rows())).collect();
    let m = Complex::free(
        k,
        ranks.clone(),
        d.into_iter()
            .filter(|(n, _)| ranks.contains_key(&(n + 1)))
            .collect(),
    )?;
    let projection = ChainMap::new(
        c.clone(),
        m.clone(),
        p.iter()
            .filter(|(_, x)| x.rows() > 0)
            .map(|(&n, x)| (n, ModMap::free(x.clone())))
            .collect(),
    )?;
    let inclusion = ChainMap::new(
        m.clone(),
        c.clone(),
        q.iter()
            .filter(|(_, x)| x.cols() > 0)
            .map(|(&n, x)| (n, ModMap::free(x.clone())))
            .collect(),
    )?;
    Ok(MinimalModel {
        complex: m,
        projection,
        inclusion,
    })
}

fn find_unit_pivot(d: &BTreeMap<i32, DualMatrix>) -> Option<(i32, usize, usize)> {
    for (&n, m) in d {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if m[(r, c)].is_unit() {
                    return Some((n, r, c));
                }
            }
        }
    }
    None
}

/// Removes generator `idx` of degree `n` from the differentials and basis changes.
fn drop_generator(
    d: &mut BTreeMap<i32, DualMatrix>,
    p: &mut BTreeMap<i32, DualMatrix>,
    q: &mut BTreeMap<i32, DualMatrix>,
    n: i32,
    idx: usize,
) {
    let keep = |len: usize| (0..len).filter(|&x| x != idx).collect::<Vec<_>>();
    if let Some(out) = d.get(&n).cloned() {
        let rows: Vec<usize> = (0..out.rows()).collect();
        d.insert(n, out.submatrix(&rows, &keep(out.cols())));
    }
    if let Some(inc) = d.get(&(n - 1)).cloned() {
        let cols: Vec<usize> = (0..inc.cols()).collect();
        d.insert(n - 1, inc.submatrix(&keep(inc.rows()), &cols));
    }
    let pm = p[&n].clone();
    let all: Vec<usize> = (0..pm.cols()).collect();
    p.insert(n, pm.submatrix(&keep(pm.rows()), &all));
    let qm = q[&n].clone();
    let all: Vec<usize> = (0..qm.rows()).collect();
    q.insert(n, qm.submatrix(&all, &keep(qm.cols())));
}

/// An interval `[start, end]` of degrees carrying `mult` copies of an ε-chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bar {
    pub start: i32,
    pub end: i32,
    pub mult: usize,
}

impl Bar {
    pub fn summand(&self) -> Summand {
        Summand {
            i: Size::Finite((self.end - self.start + 1) as usize),
            h: -1 - self.end,
            m: self.mult,
        }
    }
}

/// Interval multiplicities of the ε-part of a minimal complex.
pub fn bars(c: &Complex) -> Result<Vec<Bar>> {
    let m = minimize(c)?.complex;
    let Some((lo, hi)) = m.span() else {
        return Ok(Vec::new());
    };
    let k = m.field();
    let eps_part = |n: i32| -> FieldMatrix { m.free_diff(n).parts().1 };
    // rho[(b, e)] = rank of the composite from degree b to degree e.
    let mut rho: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for b in lo..=hi {
        let mut comp = FieldMatrix::identity(k, m.rank(b));
        rho.insert((b, b), m.rank(b));
        for e in b + 1..=hi {
            comp = eps_part(e - 1).mul(&comp);
            rho.insert((b, e), rank(&comp));
        }
    }
    let r = |b: i32, e: i32| rho.get(&(b, e)).copied().unwrap_or(0) as i64;
    let mut out = Vec::new();
    for b in lo..=hi {
        for e in b..=hi {
            let mult = r(b, e) - r(b - 1, e) - r(b, e + 1) + r(b - 1, e + 1);
            if mult < 0 {
                return Err(Error::Internal(format!("negative interval multiplicity at [{b}, {e}]")));
            }
            if mult > 0 {
                out.push(Bar {
                    start: b,
                    end: e,
                    mult: mult as usize,
                });
            }
        }
    }
    Ok(out)
}

/// The multiset of indecomposable summands of a perfect complex.
pub fn barcode(c: &Complex) -> Result<FormalObject> {
    Ok(FormalObject::new(bars(c)?.iter().map(Bar::summand)))
}

/// `H^n` as `A^a ⊕ k^b`, keyed by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CohomologyProfile {
    pub degrees: BTreeMap<i32, (usize, usize)>,
}

impl CohomologyProfile {
    pub fn from_object(f: &FormalObject) -> Result<Self> {
        let mut degrees: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
        for s in f.summands() {
            let i = s.i.finite().ok_or(Error::NotPerfect)?;
            if i == 1 {
                degrees.entry(-1 - s.h).or_default().0 += s.m;
            } else {
                degrees.entry(-1 - s.h).or_default().1 += s.m;
                degrees.entry(-(i as i32) - s.h).or_default().1 += s.m;
            }
        }
        Ok(CohomologyProfile { degrees })
    }

    /// `Σ_n dim_k H^n`.
    pub fn total_k_dim(&self) -> usize {
        self.degrees.values().map(|&(a, b)| 2 * a + b).sum()
    }

    pub fn k_dim(&self, n: i32) -> usize {
        self.degrees.get(&n).map_or(0, |&(a, b)| 2 * a + b)
    }
}

pub fn cohomology(c: &Complex) -> Result<CohomologyProfile> {
    CohomologyProfile::from_object(&barcode(c)?)
}

/// The integer `n` with `[F] = n·[X_∞]` in `K_0`.
pub fn k_class(f: &FormalObject) -> i64 {
    f.summands()
        .iter()
        .map(|s| {
            let sign = if s.h.rem_euclid(2) == 0 { 1 } else { -1 };
            let per = match s.i {
                Size::Inf => 1,
                Size::Finite(i) if i % 2 == 1 => 2,
                Size::Finite(_) => 0,
            };
            sign * per * s.m as i64
        })
        .sum()
}

/// A random invertible dual matrix, as a pair `(M, M⁻¹)`, built from
/// elementary operations.
pub fn random_basis_change(k: Field, n: usize, rng: &mut impl rand::Rng) -> (DualMatrix, DualMatrix) {
    let mut m = DualMatrix::identity(k, n);
    let mut inv = DualMatrix::identity(k, n);
    let p = match k {
        Field::Prime(p) => p as i64,
        Field::Rational => 5,
    };
    let rand_scalar = |rng: &mut dyn rand::RngCore| {
        DualScalar::new(k.from_i64((rng.next_u32() as i64) % p), k.from_i64((rng.next_u32() as i64) % p))
    };
    for _ in 0..3 * n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            // Scale row a by a unit.
            let mut u = rand_scalar(rng);
            if !u.is_unit() {
                u.a = k.one();
            }
            let ui = u.inv().unwrap();
            let mut e = DualMatrix::identity(k, n);
            e[(a, a)] = u;
            let mut ei = DualMatrix::identity(k, n);
            ei[(a, a)] = ui;
            m = e.mul(&m);
            inv = inv.mul(&ei);
        } else {
            let x = rand_scalar(rng);
            let mut e = DualMatrix::identity(k, n);
            e[(a, b)] = x.clone();
            let mut ei = DualMatrix::identity(k, n);
            ei[(a, b)] = -&x;
            m = e.mul(&m);
            inv = inv.mul(&ei);
        }
    }
    (m, inv)
}

/// Realizes `f` and scrambles every degree by a random basis change.
pub fn scrambled(f: &FormalObject, k: Field, rng: &mut impl rand::Rng) -> Result<Complex> {
    let c = f.realize(k)?;
    let basis = c
        .terms()
        .iter()
        .map(|(&n, t)| (n, random_basis_change(k, t.free, rng)))
        .collect();
    c.conjugate(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::is_nullhomotopic;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k() -> Field {
        Field::Prime(7)
    }

    fn x(i: usize, h: i32) -> Summand {
        Summand {
            i: Size::Finite(i),
            h,
            m: 1,
        }
    }

    fn unit_complex() -> Complex {
        let one = DualMatrix::identity(k(), 1);
        Complex::free(
            k(),
            [(-2, 1), (-1, 1)].into_iter().collect(),
            [(-2, one)].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn minimize_examples() {
        assert!(minimize(&unit_complex()).unwrap().complex.is_zero());
        let x3 = Complex::indecomposable(k(), 3, 0);
        assert_eq!(minimize(&x3).unwrap().complex, x3);
        let mixed = Complex::indecomposable(k(), 2, 0).direct_sum(&unit_complex()).unwrap();
        let mm = minimize(&mixed).unwrap();
        assert_eq!(barcode(&mm.complex).unwrap(), FormalObject::new([x(2, 0)]));
        assert_eq!(mm.complex.rank(-2) + mm.complex.rank(-1), 2);
    }

    #[test]
    fn witness_is_a_homotopy_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = FormalObject::new([x(2, 0), x(1, 1)]);
        let c = scrambled(&f, k(), &mut rng)
            .unwrap()
            .direct_sum(&unit_complex())
            .unwrap();
        let mm = minimize(&c).unwrap();
        let pi_iota = mm.inclusion.then(&mm.projection).unwrap();
        assert_eq!(pi_iota, ChainMap::identity(&mm.complex).unwrap());
        let iota_pi = mm.projection.then(&mm.inclusion).unwrap();
        let diff = ChainMap::identity(&c).unwrap().sub(&iota_pi).unwrap();
        assert!(is_nullhomotopic(&diff).unwrap().is_some());
    }

    #[test]
    fn barcode_examples() {
        let x3 = Complex::indecomposable(k(), 3, 0);
        assert_eq!(barcode(&x3).unwrap(), FormalObject::new([x(3, 0)]));
        let split = Complex::free(k(), [(-2, 1), (-1, 1)].into_iter().collect(), BTreeMap::new()).unwrap();
        assert_eq!(barcode(&split).unwrap(), FormalObject::new([x(1, 1), x(1, 0)]));
        assert!(barcode(&Complex::zero(k())).unwrap().is_zero());
    }

    #[test]
    fn cohomology_examples() {
        let p = |f: FormalObject| cohomology(&f.realize(k()).unwrap()).unwrap().degrees;
        assert_eq!(p(FormalObject::new([x(1, 0)])), [(-1, (1, 0))].into_iter().collect());
        assert_eq!(p(FormalObject::new([x(3, 0)])), [(-3, (0, 1)), (-1, (0, 1))].into_iter().collect());
        assert_eq!(
            p(FormalObject::new([x(2, 0), x(1, 2)])),
            [(-3, (1, 0)), (-2, (0, 1)), (-1, (0, 1))].into_iter().collect()
        );
    }

    #[test]
    fn k_class_examples() {
        assert_eq!(k_class(&FormalObject::new([x(1, 0)])), 2);
        assert_eq!(k_class(&FormalObject::new([x(2, 0)])), 0);
        assert_eq!(k_class(&FormalObject::indecomposable(Size::Inf, 1)), -1);
    }

    #[test]
    fn display_and_order() {
        let f = FormalObject::new([x(2, 1), FormalObject::indecomposable(Size::Inf, 0).summands()[0], x(1, 0), x(1, 0)]);
        assert_eq!(f.to_string(), "X_1[0]^2 + X_inf[0] + X_2[1]");
    }

    fn arb_object() -> impl Strategy<Value = FormalObject> {
        prop::collection::vec((1usize..5, -3i32..3, 1usize..3), 0..4)
            .prop_map(|v| FormalObject::new(v.into_iter().map(|(i, h, m)| Summand { i: Size::Finite(i), h, m })))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn scrambled_roundtrip(f in arb_object(), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = scrambled(&f, k(), &mut rng).unwrap();
            prop_assert!(c.validate().is_ok());
            prop_assert_eq!(barcode(&c).unwrap(), f);
        }

        #[test]
        fn cohomology_matches_direct_computation(f in arb_object(), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = scrambled(&f, k(), &mut rng).unwrap();
            let prof = cohomology(&c).unwrap();
            let (lo, hi) = c.span().unwrap_or((0, -1));
            for n in lo..=hi {
                prop_assert_eq!(prof.k_dim(n), c.cohomology_k_dim(n));
            }
        }

        #[test]
        fn k_class_additive_and_odd_under_shift(f in arb_object(), g in arb_object()) {
            prop_assert_eq!(k_class(&f.direct_sum(&g)), k_class(&f) + k_class(&g));
            prop_assert_eq!(k_class(&f.shift(1)), -k_class(&f));
        }
    }
}
