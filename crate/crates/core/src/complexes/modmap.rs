//! A-linear maps between modules of the form `A^f ⊕ k^t`.
//!
//! Block conventions: `A → A` entries are dual scalars, `A → k` is the
//! projection `a + εb ↦ a` followed by a scalar, `k → A` is the socle
//! inclusion `c ↦ εc` scaled, and `k → k` is a scalar. Composing through a
//! middle term gives `proj ∘ incl = 0` and `incl ∘ proj = ε·id_A`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{DualMatrix, DualScalar, Field, FieldElem, FieldMatrix, Matrix};

/// The module `A^free ⊕ k^kdim`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Term {
    pub free: usize,
    pub kdim: usize,
}

impl Term {
    pub const ZERO: Term = Term { free: 0, kdim: 0 };

    pub fn free(n: usize) -> Self {
        Term { free: n, kdim: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.kdim == 0
    }

    /// Dimension over `k`.
    pub fn k_dim(&self) -> usize {
        2 * self.free + self.kdim
    }

    pub fn plus(&self, other: &Term) -> Term {
        Term {
            free: self.free + other.free,
            kdim: self.kdim + other.kdim,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.free, self.kdim) {
            (0, 0) => write!(f, "0"),
            (a, 0) => write!(f, "A^{a}"),
            (0, t) => write!(f, "k^{t}"),
            (a, t) => write!(f, "A^{a}+k^{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMap {
    pub source: Term,
    pub target: Term,
    /// `target.free × source.free`
    pub a_to_a: DualMatrix,
    /// `target.kdim × source.free`
    pub a_to_k: FieldMatrix,
    /// `target.free × source.kdim`
    pub k_to_a: FieldMatrix,
    /// `target.kdim × source.kdim`
    pub k_to_k: FieldMatrix,
}

impl ModMap {
    pub fn zero(k: Field, source: Term, target: Term) -> Self {
        ModMap {
            source,
            target,
            a_to_a: Matrix::zeros(k, target.free, source.free),
            a_to_k: Matrix::zeros(k, target.kdim, source.free),
            k_to_a: Matrix::zeros(k, target.free, source.kdim),
            k_to_k: Matrix::zeros(k, target.kdim, source.kdim),
        }
    }

    pub fn identity(k: Field, t: Term) -> Self {
        ModMap {
            source: t,
            target: t,
            a_to_a: Matrix::identity(k, t.free),
            a_to_k: Matrix::zeros(k, t.kdim, t.free),
            k_to_a: Matrix::zeros(k, t.free, t.kdim),
            k_to_k: Matrix::identity(k, t.kdim),
        }
    }

    /// A map between free modules.
    pub fn free(m: DualMatrix) -> Self {
        let k = m.field();
        let (s, t) = (Term::free(m.cols()), Term::free(m.rows()));
        ModMap {
            a_to_a: m,
            ..ModMap::zero(k, s, t)
        }
    }

    pub fn from_blocks(
        a_to_a: DualMatrix,
        a_to_k: FieldMatrix,
        k_to_a: FieldMatrix,
        k_to_k: FieldMatrix,
    ) -> Result<Self> {
        let source = Term {
            free: a_to_a.cols(),
            kdim: k_to_k.cols(),
        };
        let target = Term {
            free: a_to_a.rows(),
            kdim: k_to_k.rows(),
        };
        if a_to_k.shape() != (target.kdim, source.free) || k_to_a.shape() != (target.free, source.kdim)
        {
            return Err(Error::DimensionMismatch(format!(
                "typed blocks do not fit {source} -> {target}"
            )));
        }
        Ok(ModMap {
            source,
            target,
            a_to_a,
            a_to_k,
            k_to_a,
            k_to_k,
        })
    }

    pub fn field(&self) -> Field {
        self.a_to_a.field()
    }

    pub fn is_zero(&self) -> bool {
        self.a_to_a.is_zero() && self.a_to_k.is_zero() && self.k_to_a.is_zero() && self.k_to_k.is_zero()
    }

    /// `self ∘ rhs` under the typed composition rules.
    pub fn try_compose(&self, rhs: &ModMap) -> Result<ModMap> {
        if self.source != rhs.target {
            return Err(Error::DimensionMismatch(format!(
                "compose {} -> {} after {} -> {}",
                self.source, self.target, rhs.source, rhs.target
            )));
        }
        let (g_unit, _) = self.a_to_a.parts();
        let (f_unit, _) = rhs.a_to_a.parts();
        // A → k → A contributes ε times the scalar product.
        let through_k = self.k_to_a.mul(&rhs.a_to_k).map(|x| DualScalar::from_eps(x.clone()));
        let a_to_a = self.a_to_a.mul(&rhs.a_to_a).add(&through_k);
        let k_to_a = g_unit.mul(&rhs.k_to_a).add(&self.k_to_a.mul(&rhs.k_to_k));
        let a_to_k = self.a_to_k.mul(&f_unit).add(&self.k_to_k.mul(&rhs.a_to_k));
        let k_to_k = self.k_to_k.mul(&rhs.k_to_k);
        Ok(ModMap {
            source: rhs.source,
            target: self.target,
            a_to_a,
            a_to_k,
            k_to_a,
            k_to_k,
        })
    }

    pub fn compose(&self, rhs: &ModMap) -> ModMap {
        self.try_compose(rhs).expect("composable typed maps")
    }

    pub fn add(&self, rhs: &ModMap) -> ModMap {
        assert_eq!((self.source, self.target), (rhs.source, rhs.target));
        ModMap {
            source: self.source,
            target: self.target,
            a_to_a: self.a_to_a.add(&rhs.a_to_a),
            a_to_k: self.a_to_k.add(&rhs.a_to_k),
            k_to_a: self.k_to_a.add(&rhs.k_to_a),
            k_to_k: self.k_to_k.add(&rhs.k_to_k),
        }
    }

    pub fn neg(&self) -> ModMap {
        ModMap {
            source: self.source,
            target: self.target,
            a_to_a: self.a_to_a.neg(),
            a_to_k: self.a_to_k.neg(),
            k_to_a: self.k_to_a.neg(),
            k_to_k: self.k_to_k.neg(),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> ModMap {
        ModMap {
            source: self.source,
            target: self.target,
            a_to_a: self.a_to_a.map(|x| x.scale(c)),
            a_to_k: self.a_to_k.scale(c),
            k_to_a: self.k_to_a.scale(c),
            k_to_k: self.k_to_k.scale(c),
        }
    }

    /// The underlying `k`-linear map in the coordinates of [`realize_term`]
    /// (each `A` contributes `(unit, ε)` coordinates, then the `k` summands).
    pub fn realize(&self) -> FieldMatrix {
        let k = self.field();
        let (s, t) = (self.source, self.target);
        let mut m = FieldMatrix::zeros(k, t.k_dim(), s.k_dim());
        for r in 0..t.free {
            for c in 0..s.free {
                let x = &self.a_to_a[(r, c)];
                m[(2 * r, 2 * c)] = x.a.clone();
                m[(2 * r + 1, 2 * c)] = x.b.clone();
                m[(2 * r + 1, 2 * c + 1)] = x.a.clone();
            }
            for c in 0..s.kdim {
                m[(2 * r + 1, 2 * s.free + c)] = self.k_to_a[(r, c)].clone();
            }
        }
        for r in 0..t.kdim {
            for c in 0..s.free {
                m[(2 * t.free + r, 2 * c)] = self.a_to_k[(r, c)].clone();
            }
            for c in 0..s.kdim {
                m[(2 * t.free + r, 2 * s.free + c)] = self.k_to_k[(r, c)].clone();
            }
        }
        m
    }

    /// For a free source: the images of the generators, one `k`-vector each.
    pub fn generator_images(&self) -> Vec<Vec<FieldElem>> {
        let real = self.realize();
        (0..self.source.free).map(|c| real.column(2 * c)).collect()
    }

    /// Inverse of [`ModMap::generator_images`] for a free source.
    pub fn from_generator_images(k: Field, target: Term, images: &[Vec<FieldElem>]) -> ModMap {
        let source = Term::free(images.len());
        let mut m = ModMap::zero(k, source, target);
        for (c, img) in images.iter().enumerate() {
            assert_eq!(img.len(), target.k_dim());
            for r in 0..target.free {
                m.a_to_a[(r, c)] = DualScalar::new(img[2 * r].clone(), img[2 * r + 1].clone());
            }
            for r in 0..target.kdim {
                m.a_to_k[(r, c)] = img[2 * target.free + r].clone();
            }
        }
        m
    }

    /// Assembles a block map `⊕_j S_j → ⊕_i T_i`; `None` blocks are zero.
    /// Summands are ordered with all `A`'s first, then all `k`'s.
    pub fn assemble(k: Field, sources: &[Term], targets: &[Term], blocks: &[Vec<Option<&ModMap>>]) -> ModMap {
        let source = sources.iter().fold(Term::ZERO, |a, t| a.plus(t));
        let target = targets.iter().fold(Term::ZERO, |a, t| a.plus(t));
        let mut out = ModMap::zero(k, source, target);
        let offsets = |ts: &[Term]| {
            let mut f = 0;
            let mut t = 0;
            ts.iter()
                .map(|x| {
                    let o = (f, t);
                    f += x.free;
                    t += x.kdim;
                    o
                })
                .collect::<Vec<_>>()
        };
        let so = offsets(sources);
        let to = offsets(targets);
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                let Some(b) = b else { continue };
                assert_eq!((b.source, b.target), (sources[j], targets[i]), "block shape");
                out.a_to_a.set_block(to[i].0, so[j].0, &b.a_to_a);
                out.a_to_k.set_block(to[i].1, so[j].0, &b.a_to_k);
                out.k_to_a.set_block(to[i].0, so[j].1, &b.k_to_a);
                out.k_to_k.set_block(to[i].1, so[j].1, &b.k_to_k);
            }
        }
        out
    }
}

/// `k`-linear action of a ring element on a term in realized coordinates.
pub fn scalar_action(s: &DualScalar, t: Term) -> FieldMatrix {
    let k = s.field();
    let mut m = FieldMatrix::zeros(k, t.k_dim(), t.k_dim());
    for r in 0..t.free {
        m[(2 * r, 2 * r)] = s.a.clone();
        m[(2 * r + 1, 2 * r)] = s.b.clone();
        m[(2 * r + 1, 2 * r + 1)] = s.a.clone();
    }
    for r in 0..t.kdim {
        m[(2 * t.free + r, 2 * t.free + r)] = s.a.clone();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Field {
        Field::Prime(7)
    }

    fn arb_map(s: Term, t: Term) -> impl Strategy<Value = ModMap> {
        let n = 2 * t.free * s.free + t.kdim * s.free + t.free * s.kdim + t.kdim * s.kdim;
        proptest::collection::vec(0i64..7, n).prop_map(move |v| {
            let k = k();
            let mut it = v.into_iter().map(|x| k.from_i64(x));
            let mut m = ModMap::zero(k, s, t);
            for r in 0..t.free {
                for c in 0..s.free {
                    m.a_to_a[(r, c)] = DualScalar::new(it.next().unwrap(), it.next().unwrap());
                }
            }
            for r in 0..t.kdim {
                for c in 0..s.free {
                    m.a_to_k[(r, c)] = it.next().unwrap();
                }
            }
            for r in 0..t.free {
                for c in 0..s.kdim {
                    m.k_to_a[(r, c)] = it.next().unwrap();
                }
            }
            for r in 0..t.kdim {
                for c in 0..s.kdim {
                    m.k_to_k[(r, c)] = it.next().unwrap();
                }
            }
            m
        })
    }

    #[test]
    fn projection_after_inclusion_vanishes() {
        let k = k();
        let incl = ModMap::from_blocks(
            Matrix::zeros(k, 1, 0),
            Matrix::zeros(k, 0, 0),
            FieldMatrix::identity(k, 1),
            Matrix::zeros(k, 0, 1),
        )
        .unwrap();
        let proj = ModMap::from_blocks(
            Matrix::zeros(k, 0, 1),
            FieldMatrix::identity(k, 1),
            Matrix::zeros(k, 0, 0),
            Matrix::zeros(k, 1, 0),
        )
        .unwrap();
        assert!(proj.compose(&incl).is_zero());
        let e = incl.compose(&proj);
        assert_eq!(e.a_to_a[(0, 0)], DualScalar::eps(k));
    }

    proptest! {
        // The typed composition rules agree with composing the underlying k-linear maps.
        #[test]
        fn typed_composition_matches_realization(
            (f, g) in (arb_map(Term { free: 2, kdim: 1 }, Term { free: 1, kdim: 2 }),
                       arb_map(Term { free: 1, kdim: 2 }, Term { free: 2, kdim: 1 }))
        ) {
            prop_assert_eq!(g.compose(&f).realize(), g.realize().mul(&f.realize()));
        }

        #[test]
        fn generator_images_roundtrip(f in arb_map(Term::free(2), Term { free: 1, kdim: 2 })) {
            let back = ModMap::from_generator_images(k(), f.target, &f.generator_images());
            prop_assert_eq!(back, f);
        }
    }
}
