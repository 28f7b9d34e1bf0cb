//! Hom in the homotopy category as a linear system.
//!
//! For a free source `X` a chain map is determined by the images of the
//! generators of each `X^n`, so these images (in realized coordinates of `Y^n`)
//! are the unknowns. Homotopies are parametrized the same way.

use std::collections::BTreeMap;

use super::complex::{ChainMap, Complex, Homotopy};
use super::modmap::{scalar_action, ModMap};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank, solve_affine, FieldElem, FieldMatrix};

/// The chain-map equations `C v = 0` and homotopy boundaries `H` for
/// `Hom(X, Y)` with `X` free.
#[derive(Clone, Debug)]
pub struct HomSystem {
    source: Complex,
    target: Complex,
    /// Offset of the unknowns for degree `n`, per generator width `k_dim(Y^n)`.
    map_offsets: BTreeMap<i32, usize>,
    map_vars: usize,
    constraints: FieldMatrix,
    boundaries: FieldMatrix,
}

impl HomSystem {
    pub fn new(source: &Complex, target: &Complex) -> Result<Self> {
        if !source.is_free() {
            return Err(Error::NotFree);
        }
        if source.field() != target.field() {
            return Err(Error::MixedFields(source.field().to_string(), target.field().to_string()));
        }
        let k = source.field();
        let degrees: Vec<i32> = source.terms().keys().copied().collect();

        let mut map_offsets = BTreeMap::new();
        let mut map_vars = 0;
        for &n in &degrees {
            map_offsets.insert(n, map_vars);
            map_vars += source.rank(n) * target.term(n).k_dim();
        }
        let mut htpy_offsets = BTreeMap::new();
        let mut htpy_vars = 0;
        for &n in &degrees {
            htpy_offsets.insert(n, htpy_vars);
            htpy_vars += source.rank(n) * target.term(n - 1).k_dim();
        }

        // One block of equations per generator of X^n, valued in Y^{n+1}.
        let mut eq_rows = 0;
        let mut eq_offsets = BTreeMap::new();
        for &n in &degrees {
            eq_offsets.insert(n, eq_rows);
            eq_rows += source.rank(n) * target.term(n + 1).k_dim();
        }
        let mut constraints = FieldMatrix::zeros(k, eq_rows, map_vars);
        let mut boundaries = FieldMatrix::zeros(k, map_vars, htpy_vars);

        for &n in &degrees {
            let (yn, yn1, ynm1) = (target.term(n), target.term(n + 1), target.term(n - 1));
            let dy = target.diff(n).realize();
            let dy_prev = target.diff(n - 1).realize();
            let dx = source.free_diff(n);
            let wn = yn.k_dim();
            let wn1 = yn1.k_dim();
            for j in 0..source.rank(n) {
                let row0 = eq_offsets[&n] + j * wn1;
                let col0 = map_offsets[&n] + j * wn;
                constraints.set_block(row0, col0, &dy);
                if let Some(&next) = map_offsets.get(&(n + 1)) {
                    for i in 0..source.rank(n + 1) {
                        let act = scalar_action(&dx[(i, j)], yn1).neg();
                        add_block(&mut constraints, row0, next + i * wn1, &act);
                    }
                }
                // (ds + sd) e_j in Y^n.
                let h0 = htpy_offsets[&n] + j * ynm1.k_dim();
                boundaries.set_block(col0, h0, &dy_prev);
                if let Some(&next) = htpy_offsets.get(&(n + 1)) {
                    for i in 0..source.rank(n + 1) {
                        let act = scalar_action(&dx[(i, j)], yn);
                        add_block(&mut boundaries, col0, next + i * wn, &act);
                    }
                }
            }
        }
        Ok(HomSystem {
            source: source.clone(),
            target: target.clone(),
            map_offsets,
            map_vars,
            constraints,
            boundaries,
        })
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    /// Number of unknowns describing a degreewise map.
    pub fn map_vars(&self) -> usize {
        self.map_vars
    }

    pub fn map_to_vec(&self, f: &ChainMap) -> Vec<FieldElem> {
        let k = self.source.field();
        let mut v = vec![k.zero(); self.map_vars];
        for (&n, &off) in &self.map_offsets {
            let w = self.target.term(n).k_dim();
            for (j, img) in f.component(n).generator_images().into_iter().enumerate() {
                for (r, x) in img.into_iter().enumerate() {
                    v[off + j * w + r] = x;
                }
            }
        }
        v
    }

    /// Reassembles a degreewise map; commutativity is not rechecked.
    pub fn vec_to_map(&self, v: &[FieldElem]) -> Result<ChainMap> {
        let k = self.source.field();
        let mut comps = BTreeMap::new();
        for (&n, &off) in &self.map_offsets {
            let t = self.target.term(n);
            let w = t.k_dim();
            let images: Vec<Vec<FieldElem>> = (0..self.source.rank(n))
                .map(|j| v[off + j * w..off + (j + 1) * w].to_vec())
                .collect();
            comps.insert(n, ModMap::from_generator_images(k, t, &images));
        }
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), comps)
    }

    /// Dimension of the space of chain maps.
    pub fn cycles_dim(&self) -> usize {
        self.map_vars - rank(&self.constraints)
    }

    pub fn boundaries_dim(&self) -> usize {
        rank(&self.boundaries)
    }

    /// `dim Hom(X, Y)` in the homotopy category.
    pub fn dim(&self) -> usize {
        self.cycles_dim() - self.boundaries_dim()
    }

    /// Chain maps whose classes form a basis of `Hom(X, Y)`, chosen greedily
    /// from a nullspace basis of the chain-map equations.
    pub fn basis(&self) -> Result<Vec<ChainMap>> {
        let k = self.source.field();
        let mut span = self.boundaries.clone();
        let mut current = rank(&span);
        let mut out = Vec::new();
        for z in nullspace(&self.constraints) {
            let col = FieldMatrix::from_columns(k, self.map_vars, std::slice::from_ref(&z));
            let next = span.hstack(&col);
            let r = rank(&next);
            if r > current {
                span = next;
                current = r;
                out.push(self.vec_to_map(&z)?);
            }
        }
        Ok(out)
    }

    /// Coefficients of the class of `f` in terms of the classes of `reps`, or
    /// `None` when `f` is not homotopic to a combination of them.
    pub fn express(&self, f: &ChainMap, reps: &[ChainMap]) -> Result<Option<Vec<FieldElem>>> {
        let k = self.source.field();
        let cols: Vec<Vec<FieldElem>> = reps.iter().map(|r| self.map_to_vec(r)).collect();
        let a = FieldMatrix::from_columns(k, self.map_vars, &cols).hstack(&self.boundaries);
        let sol = solve_affine(&a, &self.map_to_vec(f))?;
        Ok(sol.map(|s| s.particular[..reps.len()].to_vec()))
    }

    /// A homotopy `s` with `f = ds + sd`, if one exists.
    pub fn nullhomotopy(&self, f: &ChainMap) -> Result<Option<Homotopy>> {
        let Some(sol) = solve_affine(&self.boundaries, &self.map_to_vec(f))? else {
            return Ok(None);
        };
        let k = self.source.field();
        let p = sol.particular;
        let mut comps = BTreeMap::new();
        let mut off = 0;
        for &n in self.map_offsets.keys() {
            let t = self.target.term(n - 1);
            let w = t.k_dim();
            let images: Vec<Vec<FieldElem>> = (0..self.source.rank(n))
                .map(|j| p[off + j * w..off + (j + 1) * w].to_vec())
                .collect();
            off += self.source.rank(n) * w;
            let m = ModMap::from_generator_images(k, t, &images);
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        Ok(Some(Homotopy { comps }))
    }
}

fn add_block(m: &mut FieldMatrix, r0: usize, c0: usize, b: &FieldMatrix) {
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            let x = &m[(r0 + r, c0 + c)] + &b[(r, c)];
            m[(r0 + r, c0 + c)] = x;
        }
    }
}

/// `dim Hom(X, Y)` modulo homotopy for a free `X`.
pub fn hom_dim(x: &Complex, y: &Complex) -> Result<usize> {
    Ok(HomSystem::new(x, y)?.dim())
}

/// A homotopy witnessing `f ≃ 0`, checked exactly before it is returned.
pub fn is_nullhomotopic(f: &ChainMap) -> Result<Option<Homotopy>> {
    let sys = HomSystem::new(f.source(), f.target())?;
    let Some(s) = sys.nullhomotopy(f)? else {
        return Ok(None);
    };
    if s.boundary(f.source(), f.target())? != *f {
        return Err(Error::Internal("homotopy does not reproduce the map".into()));
    }
    Ok(Some(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::complex::{cone, cone_inclusion};
    use crate::linalg::{DualMatrix, DualScalar, Field, Matrix};

    fn k() -> Field {
        Field::Prime(7)
    }

    fn eps_on(c: &Complex, n: i32) -> ChainMap {
        let e = Matrix::from_vec(k(), 1, 1, vec![DualScalar::eps(k())]).unwrap();
        ChainMap::new(c.clone(), c.clone(), [(n, ModMap::free(e))].into_iter().collect()).unwrap()
    }

    #[test]
    fn small_hom_dimensions() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        let x2 = Complex::indecomposable(k(), 2, 0);
        assert_eq!(hom_dim(&x1, &x1).unwrap(), 2);
        assert_eq!(hom_dim(&x2, &x1.shift(1)).unwrap(), 1);
        assert_eq!(hom_dim(&x1, &Complex::residue_field(k(), -1)).unwrap(), 1);
    }

    #[test]
    fn eps_on_x1_is_not_nullhomotopic() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        assert!(is_nullhomotopic(&eps_on(&x1, -1)).unwrap().is_none());
        let z = ChainMap::zero(x1.clone(), x1).unwrap();
        assert_eq!(is_nullhomotopic(&z).unwrap().unwrap().comps.len(), 0);
    }

    #[test]
    fn interior_eps_map_is_nullhomotopic() {
        // X_4 → X_1[1] with a single ε in the interior of the overlap.
        let x = Complex::indecomposable(k(), 4, 0);
        let y = Complex::indecomposable(k(), 1, 1);
        let e = DualMatrix::from_vec(k(), 1, 1, vec![DualScalar::eps(k())]).unwrap();
        let f = ChainMap::new(x, y, [(-2, ModMap::free(e))].into_iter().collect()).unwrap();
        assert!(is_nullhomotopic(&f).unwrap().is_some());
    }

    #[test]
    fn cone_rotation_composite_is_nullhomotopic() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        let f = eps_on(&x1, -1);
        let inc = cone_inclusion(&f).unwrap();
        let comp = f.then(&inc).unwrap();
        assert!(is_nullhomotopic(&comp).unwrap().is_some());
        assert_eq!(cone(&f).unwrap().span(), Some((-2, -1)));
    }

    #[test]
    fn basis_classes_are_independent() {
        let x1 = Complex::indecomposable(k(), 1, 0);
        let sys = HomSystem::new(&x1, &x1).unwrap();
        let b = sys.basis().unwrap();
        assert_eq!(b.len(), 2);
        let coeffs = sys.express(&eps_on(&x1, -1).scale(&k().from_i64(3)), &b).unwrap().unwrap();
        assert_eq!(coeffs.len(), 2);
    }
}
