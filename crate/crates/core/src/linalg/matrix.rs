//! Dense matrices over `k` and over `A = k[ε]/(ε²)`.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::dual::DualScalar;
use super::field::{Field, FieldElem};
use crate::error::{Error, Result};

/// Scalars a [`Matrix`] can hold.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero(k: Field) -> Self;
    fn one(k: Field) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for FieldElem {
    fn zero(k: Field) -> Self {
        k.zero()
    }
    fn one(k: Field) -> Self {
        k.one()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Ring for DualScalar {
    fn zero(k: Field) -> Self {
        DualScalar::zero(k)
    }
    fn one(k: Field) -> Self {
        DualScalar::one(k)
    }
    fn is_zero(&self) -> bool {
        DualScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Row-major dense matrix. The field is carried so that empty matrices still
/// know where their (absent) entries live.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type FieldMatrix = Matrix<FieldElem>;
pub type DualMatrix = Matrix<DualScalar>;

impl<T: Ring> Matrix<T> {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![T::zero(field); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = T::one(field);
        }
        m
    }

    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds from nested rows; `cols` is needed for matrices with no rows.
    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Self::from_vec(field, r, cols, data)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        self.map(Ring::neg)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let x = &self[(i, l)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let y = &rhs[(l, j)];
                    if !y.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&x.mul(y));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Panicking product for internally shaped operands.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("matrix product shape")
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} plus {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect();
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("matrix sum shape")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| c.mul(x))
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)].clone();
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.field, self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zeros(self.field, self.rows + other.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, other);
        out
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn from_columns(field: Field, rows: usize, cols: &[Vec<T>]) -> Self {
        let mut out = Self::zeros(field, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                out[(i, j)] = x.clone();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(self.field), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Ring> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}

impl DualMatrix {
    /// Splits `M = Ma + ε·Mb`.
    pub fn parts(&self) -> (FieldMatrix, FieldMatrix) {
        (self.map(|x| x.a.clone()), self.map(|x| x.b.clone()))
    }

    pub fn from_parts(unit: &FieldMatrix, eps: &FieldMatrix) -> Result<Self> {
        if unit.shape() != eps.shape() {
            return Err(Error::DimensionMismatch("unit and ε parts differ in shape".into()));
        }
        let data = unit
            .entries()
            .iter()
            .zip(eps.entries())
            .map(|(a, b)| DualScalar::new(a.clone(), b.clone()))
            .collect();
        Matrix::from_vec(unit.field(), unit.rows(), unit.cols(), data)
    }

    pub fn from_field(m: &FieldMatrix) -> Self {
        m.map(|x| DualScalar::from_unit(x.clone()))
    }

    pub fn has_unit_entry(&self) -> bool {
        self.entries().iter().any(DualScalar::is_unit)
    }
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref(m: &FieldMatrix) -> (FieldMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols() {
        if row == a.rows() {
            break;
        }
        // First nonzero pivot keeps bases deterministic.
        let Some(p) = (row..a.rows()).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for c in 0..a.cols() {
                let t = a[(p, c)].clone();
                a[(p, c)] = a[(row, c)].clone();
                a[(row, c)] = t;
            }
        }
        let inv = a[(row, col)].inv().expect("nonzero pivot");
        for c in col..a.cols() {
            a[(row, c)] = &a[(row, c)] * &inv;
        }
        for r in 0..a.rows() {
            if r == row || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone();
            for c in col..a.cols() {
                let delta = &factor * &a[(row, c)];
                a[(r, c)] = &a[(r, c)] - &delta;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &FieldMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : M x = 0}`.
pub fn nullspace(m: &FieldMatrix) -> Vec<Vec<FieldElem>> {
    let (r, pivots) = rref(m);
    let k = m.field();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![k.zero(); m.cols()];
            v[f] = k.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(i, f)];
            }
            v
        })
        .collect()
}

/// Solution set of `A x = b`: one particular solution plus a nullspace basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<FieldElem>,
    pub nullspace: Vec<Vec<FieldElem>>,
}

/// Solves `A x = b` exactly. `Ok(None)` means the system is inconsistent.
pub fn solve_affine(a: &FieldMatrix, b: &[FieldElem]) -> Result<Option<AffineSolution>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            a.rows()
        )));
    }
    let k = a.field();
    let rhs = Matrix::from_vec(k, b.len(), 1, b.to_vec())?;
    let (r, pivots) = rref(&a.hstack(&rhs));
    if pivots.last() == Some(&a.cols()) {
        return Ok(None);
    }
    let mut particular = vec![k.zero(); a.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = r[(i, a.cols())].clone();
    }
    Ok(Some(AffineSolution {
        particular,
        nullspace: nullspace(a),
    }))
}

/// Result of clearing unit pivots of a dual matrix: `row_ops · M · col_ops = reduced`.
#[derive(Clone, Debug)]
pub struct UnitPivotReduction {
    pub row_ops: DualMatrix,
    pub col_ops: DualMatrix,
    pub reduced: DualMatrix,
    /// `(row, col)` positions of the unit pivots, in the order chosen.
    pub pivots: Vec<(usize, usize)>,
}

/// Clears the row and column of every unit pivot using invertible operations
/// over `A`. Afterwards every entry outside the pivot rows and columns has unit
/// part zero.
pub fn dual_unit_pivot_reduce(m: &DualMatrix) -> UnitPivotReduction {
    let k = m.field();
    let mut red = m.clone();
    let mut p = DualMatrix::identity(k, m.rows());
    let mut q = DualMatrix::identity(k, m.cols());
    let mut used_r = vec![false; m.rows()];
    let mut used_c = vec![false; m.cols()];
    let mut pivots = Vec::new();
    loop {
        let found = (0..red.rows())
            .filter(|&r| !used_r[r])
            .flat_map(|r| (0..red.cols()).map(move |c| (r, c)))
            .find(|&(r, c)| !used_c[c] && red[(r, c)].is_unit());
        let Some((pr, pc)) = found else { break };
        let inv = red[(pr, pc)].inv().expect("unit");
        for r in 0..red.rows() {
            if r == pr || red[(r, pc)].is_zero() {
                continue;
            }
            let x = &red[(r, pc)] * &inv;
            for c in 0..red.cols() {
                let d = &x * &red[(pr, c)];
                red[(r, c)] = &red[(r, c)] - &d;
            }
            for c in 0..p.cols() {
                let d = &x * &p[(pr, c)];
                p[(r, c)] = &p[(r, c)] - &d;
            }
        }
        for c in 0..red.cols() {
            if c == pc || red[(pr, c)].is_zero() {
                continue;
            }
            let y = &inv * &red[(pr, c)];
            for r in 0..red.rows() {
                let d = &red[(r, pc)] * &y;
                red[(r, c)] = &red[(r, c)] - &d;
            }
            for r in 0..q.rows() {
                let d = &q[(r, pc)] * &y;
                q[(r, c)] = &q[(r, c)] - &d;
            }
        }
        used_r[pr] = true;
        used_c[pc] = true;
        pivots.push((pr, pc));
    }
    UnitPivotReduction {
        row_ops: p,
        col_ops: q,
        reduced: red,
        pivots,
    }
}
