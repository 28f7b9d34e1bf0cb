//! Fully faithful, shift-commuting endofunctors of `Perf(A)` described by
//! their action on generators: the coefficient `k(i, j, α)` scales the
//! generator `X_i → X_j[α]`. For `i = j`, `α = 0` the coefficient acts on the
//! ε-part and the identity is fixed.

use std::collections::BTreeMap;
use std::fmt;

use crate::decomp::{FormalObject, Size};
use crate::error::{Error, Result};
use crate::homspace::{compose_sym, hom_table, GeneratorRef, Kind, SymMorphism};
use crate::linalg::{solve_affine, Field, FieldElem, FieldMatrix};

/// The range of generators an assignment covers: `1 ≤ i, j ≤ imax`, `|α| ≤ amax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub imax: usize,
    pub amax: i32,
}

impl Window {
    pub fn contains(&self, i: usize, j: usize, alpha: i32) -> bool {
        (1..=self.imax).contains(&i) && (1..=self.imax).contains(&j) && alpha.abs() <= self.amax
    }

    /// Every `(i, j, α)` in the window with a nonzero Hom.
    pub fn generators(&self) -> impl Iterator<Item = (usize, usize, i32)> + '_ {
        (1..=self.imax).flat_map(move |i| {
            (1..=self.imax).flat_map(move |j| {
                (-self.amax..=self.amax)
                    .filter(move |&a| hom_table(Size::Finite(i), Size::Finite(j), a).dim > 0)
                    .map(move |a| (i, j, a))
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffAssignment {
    pub field: Field,
    /// The functor sends `X_i` to `X_i[shift]`.
    pub shift: i32,
    pub window: Window,
    pub coeffs: BTreeMap<(usize, usize, i32), FieldElem>,
}

impl CoeffAssignment {
    /// Checks that exactly the existing generators of the window carry nonzero coefficients.
    pub fn new(
        field: Field,
        shift: i32,
        window: Window,
        coeffs: BTreeMap<(usize, usize, i32), FieldElem>,
    ) -> Result<Self> {
        for (&(i, j, a), v) in &coeffs {
            if !window.contains(i, j, a) || hom_table(Size::Finite(i), Size::Finite(j), a).dim == 0 {
                return Err(Error::NoSuchGenerator(format!("k({i}, {j}, {a})")));
            }
            if v.field() != field {
                return Err(Error::MixedFields(field.to_string(), v.field().to_string()));
            }
            if v.is_zero() {
                return Err(Error::NotFunctorial(format!("k({i}, {j}, {a}) = 0")));
            }
        }
        if let Some((i, j, a)) = window.generators().find(|key| !coeffs.contains_key(key)) {
            return Err(Error::NotFunctorial(format!("k({i}, {j}, {a}) missing")));
        }
        Ok(CoeffAssignment {
            field,
            shift,
            window,
            coeffs,
        })
    }

    /// `k(i, j, α) = λ^α` on the window.
    pub fn lambda(lambda: &FieldElem, window: Window) -> Result<Self> {
        let f = LambdaFunctor::new(lambda.clone())?;
        let coeffs = window
            .generators()
            .map(|(i, j, a)| Ok(((i, j, a), f.coefficient(i, j, a)?)))
            .collect::<Result<_>>()?;
        Self::new(lambda.field(), 0, window, coeffs)
    }

    pub fn get(&self, i: usize, j: usize, alpha: i32) -> Option<&FieldElem> {
        self.coeffs.get(&(i, j, alpha))
    }

    /// The scalar by which the functor multiplies the given generator.
    fn scalar(&self, i: usize, j: usize, alpha: i32, kind: Kind) -> Option<FieldElem> {
        if i == j && alpha == 0 && kind == Kind::One {
            return Some(self.field.one());
        }
        self.get(i, j, alpha).cloned()
    }

    /// Conjugates by `φ` and rescales ε-type coefficients by `μ`:
    /// `k(i, j, α) ↦ φ_i φ_j⁻¹ μ^[ε] k(i, j, α)`. `phi[i - 1]` is `φ_i`.
    pub fn twist(&self, shift: i32, mu: &FieldElem, phi: &[FieldElem]) -> Result<Self> {
        if phi.len() < self.window.imax || phi.iter().any(FieldElem::is_zero) || mu.is_zero() {
            return Err(Error::DimensionMismatch("twist needs nonzero φ_1..φ_imax and μ".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(i, j, a), v)| {
                let mut x = &(v * &phi[i - 1]) * &phi[j - 1].inv().unwrap();
                if hom_table(Size::Finite(i), Size::Finite(j), a).has_eps_type {
                    x = &x * mu;
                }
                ((i, j, a), x)
            })
            .collect();
        Self::new(self.field, shift, self.window, coeffs)
    }
}

/// One failed multiplicativity check `k(f) k(g) = k(g ∘ f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub first: GeneratorRef,
    pub second: GeneratorRef,
    pub expected: FieldElem,
    pub found: FieldElem,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) then ({}): product {} but composite has {}",
            self.first, self.second, self.expected, self.found
        )
    }
}

/// Checks `k(g) k(f) = k(g ∘ f)` for every composable pair of generators in
/// the window with nonzero composite.
pub fn check_functorial(c: &CoeffAssignment) -> Vec<Violation> {
    let k = c.field;
    let w = c.window;
    let mut out = Vec::new();
    let fin = Size::Finite;
    let gens: Vec<(usize, usize, i32, Kind)> = w
        .generators()
        .flat_map(|(i, j, a)| {
            let d = hom_table(fin(i), fin(j), a);
            [Kind::One, Kind::Eps]
                .into_iter()
                .filter(move |&kd| d.has(kd))
                .map(move |kd| (i, j, a, kd))
        })
        .collect();
    for &(i, j, a, k1) in &gens {
        for &(j2, l, b, k2) in &gens {
            if j2 != j || !w.contains(i, l, a + b) {
                continue;
            }
            let f = GeneratorRef::new((fin(i), 0), (fin(j), a), k1);
            let g = GeneratorRef::new((fin(j), a), (fin(l), a + b), k2);
            let comp = compose_sym(
                &SymMorphism::generator(k, &g, k.one()).expect("generator in table"),
                &SymMorphism::generator(k, &f, k.one()).expect("generator in table"),
            )
            .expect("composable");
            let (ca, cb) = comp.block(0, 0);
            for (kind, coeff) in [(Kind::One, ca), (Kind::Eps, cb)] {
                if coeff.is_zero() {
                    continue;
                }
                let (Some(x), Some(y), Some(z)) = (
                    c.scalar(i, j, a, k1),
                    c.scalar(j, l, b, k2),
                    c.scalar(i, l, a + b, kind),
                ) else {
                    continue;
                };
                let lhs = &x * &y;
                if lhs != z {
                    out.push(Violation {
                        first: f,
                        second: g,
                        expected: lhs,
                        found: z,
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One instance of a relation, evaluated on an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInstance {
    pub relation: Relation,
    /// `(i, j, α)` as in the relation's statement; unused entries are 0.
    pub params: (usize, usize, i32),
    pub lhs: FieldElem,
    pub rhs: FieldElem,
}

impl RelationInstance {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates every instance of R1–R5 whose coefficients lie in the window.
pub fn check_relations(c: &CoeffAssignment) -> Vec<RelationInstance> {
    let imax = c.window.imax;
    let amax = c.window.amax;
    let one = c.field.one();
    let get = |i: usize, j: usize, a: i32| c.get(i, j, a).cloned();
    let mut out = Vec::new();
    let mut push = |relation, params, lhs: Option<FieldElem>, rhs: Option<FieldElem>| {
        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
            out.push(RelationInstance {
                relation,
                params,
                lhs,
                rhs,
            });
        }
    };
    let mul = |x: Option<FieldElem>, y: Option<FieldElem>| Some(&x? * &y?);
    for i in 1..=imax {
        for j in 1..=imax {
            let (ii, jj) = (i as i32, j as i32);
            for a in -amax..=amax {
                // R1: k(j, i, α) k(i, j, -α) = 1
                let eps_range = -ii < a && a <= 0.min(jj - ii);
                let one_range = 0.max(jj - ii) <= a && a < jj;
                if eps_range || one_range {
                    push(Relation::R1, (i, j, a), mul(get(j, i, a), get(i, j, -a)), Some(one.clone()));
                }
                // R2: k(j, i, α) = k(j, i-1, α) k(i-1, i, 0)
                if i >= 2 && 0 <= a && a < jj && j <= i && (i - j, a) != (0, 0) && (i - j, a) != (1, 0) {
                    push(Relation::R2, (i, j, a), get(j, i, a), mul(get(j, i - 1, a), get(i - 1, i, 0)));
                }
                // R3: k(j, i, α) = k(j, i-1, 0) k(i-1, i, α)
                if j + 1 < i && -ii < a && a <= jj - ii {
                    push(Relation::R3, (i, j, a), get(j, i, a), mul(get(j, i - 1, 0), get(i - 1, i, a)));
                }
            }
        }
        let ii = i as i32;
        if i >= 2 {
            // R4: k(i-1, i, α) = k(i-1, i-1, α) k(i-1, i, 0)
            for a in (1 - ii + 1)..0 {
                if a.abs() <= amax {
                    push(Relation::R4, (i, 0, a), get(i - 1, i, a), mul(get(i - 1, i - 1, a), get(i - 1, i, 0)));
                }
            }
        }
        if i > 2 {
            // R5: k(i-1, i, 2-i) = k(i-1, i-1, 1) k(i-1, i, 1-i)
            push(
                Relation::R5,
                (i, 0, 0),
                get(i - 1, i, 2 - ii),
                mul(get(i - 1, i - 1, 1), get(i - 1, i, 1 - ii)),
            );
        }
    }
    out
}

/// The canonical functor with `k(i, j, α) = λ^α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaFunctor {
    pub lambda: FieldElem,
}

impl LambdaFunctor {
    pub fn new(lambda: FieldElem) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::NotFunctorial("λ = 0".into()));
        }
        Ok(LambdaFunctor { lambda })
    }

    pub fn coefficient(&self, i: usize, j: usize, alpha: i32) -> Result<FieldElem> {
        lambda_coefficient(&self.lambda, i, j, alpha)
    }

    /// Scales every block `X_i[h₁] → X_j[h₂]` by `λ^(h₂-h₁)`; the identity part
    /// of an endomorphism is fixed.
    pub fn apply(&self, m: &SymMorphism) -> Result<SymMorphism> {
        if !m.source().is_perfect() || !m.target().is_perfect() {
            return Err(Error::NotPerfect);
        }
        Ok(m.map_blocks(|x, y, a, b| {
            let s = self.lambda.pow((y.1 - x.1) as i64).expect("λ is invertible");
            (&s * a, &s * b)
        }))
    }

    /// Whether the functor sends the triangle `X_1 → X_1 → X_2 → X_1[1]` on
    /// `ε` to a distinguished triangle, decided by solving for an isomorphism
    /// of triangles that is the identity on the `X_1` vertices.
    pub fn is_exact(&self) -> Result<bool> {
        let k = self.lambda.field();
        let fin = Size::Finite;
        let x1 = FormalObject::indecomposable(fin(1), 0);
        let x2 = FormalObject::indecomposable(fin(2), 0);
        let x1s = FormalObject::indecomposable(fin(1), 1);
        let gen = |g: GeneratorRef| SymMorphism::generator(k, &g, k.one());
        let u = gen(GeneratorRef::new((fin(1), 0), (fin(2), 0), Kind::One))?;
        let p = gen(GeneratorRef::new((fin(2), 0), (fin(1), 1), Kind::One))?;
        let (fu, fp) = (self.apply(&u)?, self.apply(&p)?);
        let endo = |a: FieldElem, b: FieldElem| SymMorphism::new(k, x2.clone(), x2.clone(), [((0, 0), (a, b))]);
        let basis = [endo(k.one(), k.zero())?, endo(k.zero(), k.one())?];

        // Unknown φ = (a, b) on X_2 with φ ∘ F(u) = u and p ∘ φ = F(p).
        let mut rows: Vec<Vec<FieldElem>> = Vec::new();
        let mut rhs: Vec<FieldElem> = Vec::new();
        let mut equate = |lhs: Vec<SymMorphism>, target: SymMorphism| -> Result<()> {
            let n = target.source().expanded().len();
            let m = target.target().expanded().len();
            for from in 0..n {
                for to in 0..m {
                    let t = target.block(from, to);
                    let cols: Vec<(FieldElem, FieldElem)> = lhs.iter().map(|l| l.block(from, to)).collect();
                    rows.push(cols.iter().map(|c| c.0.clone()).collect());
                    rhs.push(t.0);
                    rows.push(cols.iter().map(|c| c.1.clone()).collect());
                    rhs.push(t.1);
                }
            }
            Ok(())
        };
        equate(
            basis.iter().map(|phi| compose_sym(phi, &fu)).collect::<Result<_>>()?,
            u,
        )?;
        equate(
            basis.iter().map(|phi| compose_sym(&p, phi)).collect::<Result<_>>()?,
            fp,
        )?;
        debug_assert_eq!(x1.expanded().len() + x1s.expanded().len(), 2);
        let a = FieldMatrix::from_rows(k, 2, rows)?;
        let Some(sol) = solve_affine(&a, &rhs)? else {
            return Ok(false);
        };
        // An endomorphism (a, b) of X_2 is invertible iff a ≠ 0.
        Ok(!sol.particular[0].is_zero() || sol.nullspace.iter().any(|v| !v[0].is_zero()))
    }
}

/// `λ^α`, for an existing generator `X_i → X_j[α]`.
pub fn lambda_coefficient(lambda: &FieldElem, i: usize, j: usize, alpha: i32) -> Result<FieldElem> {
    if hom_table(Size::Finite(i), Size::Finite(j), alpha).dim == 0 {
        return Err(Error::NoSuchGenerator(format!("X_{i} -> X_{j}[{alpha}]")));
    }
    lambda
        .pow(alpha as i64)
        .ok_or_else(|| Error::NotFunctorial("λ = 0".into()))
}

/// Data reducing an assignment to its canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub shift: i32,
    /// Push-forward along `a + εb ↦ a + εμb`.
    pub mu: FieldElem,
    /// `φ_1, …, φ_imax` of the natural isomorphism, with `φ_1 = 1`.
    pub phi: Vec<FieldElem>,
    pub lambda: FieldElem,
}

pub fn normalize(c: &CoeffAssignment) -> Result<Normalization> {
    let violations = check_functorial(c);
    if let Some(v) = violations.first() {
        return Err(Error::NotFunctorial(v.to_string()));
    }
    let k = c.field;
    if c.window.imax < 2 || c.window.amax < 1 {
        return Err(Error::DimensionMismatch("normalization needs imax ≥ 2 and amax ≥ 1".into()));
    }
    let missing = |i, j, a| Error::NotFunctorial(format!("k({i}, {j}, {a}) missing"));
    let mu = c.get(1, 1, 0).cloned().ok_or_else(|| missing(1, 1, 0))?;
    let mut phi = vec![k.one()];
    for i in 2..=c.window.imax {
        let step = c.get(i - 1, i, 0).ok_or_else(|| missing(i - 1, i, 0))?;
        phi.push(&phi[i - 2] * &step.inv().expect("nonzero coefficient"));
    }
    // Undo: ε-type coefficients by μ⁻¹, conjugation k ↦ φ_j k φ_i⁻¹.
    let phi_inv: Vec<FieldElem> = phi.iter().map(|x| x.inv().unwrap()).collect();
    let canonical = c.twist(0, &mu.inv().unwrap(), &phi_inv)?;
    let lambda = canonical.get(2, 1, 1).cloned().ok_or_else(|| missing(2, 1, 1))?;
    let f = LambdaFunctor::new(lambda.clone())?;
    for (&(i, j, a), v) in &canonical.coeffs {
        if *v != f.coefficient(i, j, a)? {
            return Err(Error::NotFunctorial(format!(
                "normalized k({i}, {j}, {a}) = {v} is not λ^{a} for λ = {lambda}"
            )));
        }
    }
    Ok(Normalization {
        shift: c.shift,
        mu,
        phi,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Field {
        Field::Prime(7)
    }

    fn win(imax: usize, amax: i32) -> Window {
        Window { imax, amax }
    }

    #[test]
    fn coefficient_examples() {
        let l = k().from_i64(3);
        assert_eq!(lambda_coefficient(&l, 2, 1, 1).unwrap(), l);
        assert_eq!(lambda_coefficient(&l, 4, 4, 0).unwrap(), k().one());
        assert_eq!(lambda_coefficient(&l, 2, 2, -1).unwrap(), l.inv().unwrap());
        assert!(lambda_coefficient(&l, 1, 2, 1).is_err());
    }

    #[test]
    fn apply_examples() {
        let f = LambdaFunctor::new(k().from_i64(2)).unwrap();
        let obj = FormalObject::indecomposable(Size::Finite(2), 0).direct_sum(&FormalObject::indecomposable(Size::Finite(1), 1));
        let id = SymMorphism::identity(k(), &obj);
        assert_eq!(f.apply(&id).unwrap(), id);
        let g = GeneratorRef::new((Size::Finite(2), 0), (Size::Finite(1), 1), Kind::One);
        let m = SymMorphism::generator(k(), &g, k().one()).unwrap();
        assert_eq!(f.apply(&m).unwrap().block(0, 0).0, k().from_i64(2));
    }

    #[test]
    fn lambda_assignments_are_functorial() {
        for l in 1..=3 {
            let c = CoeffAssignment::lambda(&k().from_i64(l), win(5, 6)).unwrap();
            assert!(check_functorial(&c).is_empty());
            let rel = check_relations(&c);
            assert!(rel.iter().all(RelationInstance::holds));
            for r in [Relation::R1, Relation::R2, Relation::R3, Relation::R4, Relation::R5] {
                assert!(rel.iter().any(|x| x.relation == r), "{r} has no instance");
            }
        }
    }

    #[test]
    fn relation_instances() {
        let l = k().from_i64(3);
        let c = CoeffAssignment::lambda(&l, win(4, 4)).unwrap();
        let rel = check_relations(&c);
        let r1 = rel.iter().find(|x| x.relation == Relation::R1 && x.params == (1, 2, 1)).unwrap();
        assert_eq!(r1.lhs, k().one());
        let r4 = rel.iter().find(|x| x.relation == Relation::R4 && x.params == (3, 0, -1)).unwrap();
        assert_eq!(r4.lhs, l.inv().unwrap());
    }

    #[test]
    fn perturbation_is_detected() {
        let mut c = CoeffAssignment::lambda(&k().from_i64(2), win(4, 4)).unwrap();
        *c.coeffs.get_mut(&(2, 1, 1)).unwrap() = k().from_i64(5);
        assert!(!check_functorial(&c).is_empty());
        assert!(normalize(&c).is_err());
    }

    #[test]
    fn trivial_window() {
        // Only X_1: End(X_1) at α = 0 carries the single coefficient.
        let coeffs = [((1, 1, 0), k().from_i64(4))].into_iter().collect();
        let c = CoeffAssignment::new(k(), 0, win(1, 3), coeffs).unwrap();
        assert!(check_functorial(&c).is_empty());
    }

    #[test]
    fn normalize_examples() {
        let l = k().from_i64(3);
        let c = CoeffAssignment::lambda(&l, win(5, 5)).unwrap();
        let n = normalize(&c).unwrap();
        assert_eq!((n.shift, n.mu.clone(), n.lambda.clone()), (0, k().one(), l.clone()));
        assert!(n.phi.iter().all(FieldElem::is_one));

        let mu = k().from_i64(5);
        let scaled = c.twist(2, &mu, &vec![k().one(); 5]).unwrap();
        let n = normalize(&scaled).unwrap();
        assert_eq!((n.shift, n.mu, n.lambda), (2, mu, l.clone()));

        // k(h-1, h, 0) = 2 for every h.
        let two = k().from_i64(2);
        let phi: Vec<FieldElem> = (0..5).map(|e| two.pow(-e).unwrap()).collect();
        let c2 = c.twist(0, &k().one(), &phi).unwrap();
        assert_eq!(c2.get(1, 2, 0), Some(&two));
        let n = normalize(&c2).unwrap();
        assert_eq!(n.phi, phi);
        assert_eq!(n.lambda, l);
    }

    #[test]
    fn exactness_dichotomy() {
        for l in 1..7 {
            let f = LambdaFunctor::new(k().from_i64(l)).unwrap();
            assert_eq!(f.is_exact().unwrap(), l == 1);
        }
        let q = Field::Rational;
        assert!(!LambdaFunctor::new(q.from_i64(3)).unwrap().is_exact().unwrap());
        assert!(LambdaFunctor::new(q.one()).unwrap().is_exact().unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn apply_preserves_composition(l in 1i64..7, a in 0i64..7, b in 0i64..7, c2 in 0i64..7, d in 0i64..7) {
            let f = LambdaFunctor::new(k().from_i64(l)).unwrap();
            let x = FormalObject::indecomposable(Size::Finite(2), 0);
            let y = FormalObject::indecomposable(Size::Finite(1), 1);
            let z = FormalObject::indecomposable(Size::Finite(2), 1);
            let m1 = SymMorphism::new(k(), x.clone(), y.clone(), [((0, 0), (k().from_i64(a), k().zero()))]).unwrap();
            let m2 = SymMorphism::new(k(), y, z, [((0, 0), (k().from_i64(b), k().zero()))]).unwrap();
            let e = SymMorphism::new(k(), x.clone(), x, [((0, 0), (k().from_i64(d), k().from_i64(c2)))]).unwrap();
            let comp = compose_sym(&m2, &compose_sym(&m1, &e).unwrap()).unwrap();
            let fcomp = compose_sym(&f.apply(&m2).unwrap(), &compose_sym(&f.apply(&m1).unwrap(), &f.apply(&e).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(f.apply(&comp).unwrap(), fcomp);
        }
    }
}
