//! Dense exact linear algebra over the rationals.
//!
//! Everything here is deterministic: the row reduction always picks the first
//! nonzero entry at or below the current row as pivot, and subspaces are kept
//! in reduced row echelon form so that equality is structural.

use std::fmt;

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("quotient requires the second subspace to lie inside the first")]
    NotNested,
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Result<Mat, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Mat {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from rows, all of which must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<Rat>]) -> Result<Mat, LinalgError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().cloned());
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Convenience constructor from integer rows. Panics if ragged.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let rows: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| Rat::from_int(v)).collect())
            .collect();
        Mat::from_rows(cols, &rows).expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Result<Mat, LinalgError> {
        Ok(Mat::from_rows(rows, columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Mat) -> Result<Mat, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn sub(&self, rhs: &Mat) -> Result<Mat, LinalgError> {
        self.check_same_shape(rhs)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Mat) -> Result<Mat, LinalgError> {
        self.check_same_shape(rhs)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    fn check_same_shape(&self, rhs: &Mat) -> Result<(), LinalgError> {
        if self.rows != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: rhs.rows,
            });
        }
        if self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: rhs.cols,
            });
        }
        Ok(())
    }

    /// Stacks `blocks` on top of each other.
    pub fn vstack(cols: usize, blocks: &[&Mat]) -> Result<Mat, LinalgError> {
        let mut entries = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: b.cols,
                });
            }
            rows += b.rows;
            entries.extend(b.entries.iter().cloned());
        }
        Ok(Mat {
            rows,
            cols,
            entries,
        })
    }

    /// Places `blocks` side by side.
    pub fn hstack(rows: usize, blocks: &[&Mat]) -> Result<Mat, LinalgError> {
        let transposed: Vec<Mat> = blocks.iter().map(|b| b.transpose()).collect();
        let refs: Vec<&Mat> = transposed.iter().collect();
        Ok(Mat::vstack(rows, &refs)?.transpose())
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Mat::zeros(0, 0));
        }
        let aug = Mat::hstack(n, &[self, &Mat::identity(n)]).ok()?;
        let (r, pivots) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn pow(&self, exp: u64) -> Mat {
        assert!(self.is_square(), "power of non-square matrix");
        let mut result = Mat::identity(self.rows);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("square");
            }
            base = base.mul(&base).expect("square");
            e >>= 1;
        }
        result
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Reduced row echelon form together with the pivot columns.
///
/// The returned matrix has the same shape as the input; zero rows are kept at
/// the bottom.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..a.cols {
                a.entries.swap(p * a.cols + j, row * a.cols + j);
            }
        }
        let inv = a[(row, col)].recip();
        for j in col..a.cols {
            a[(row, j)] *= &inv;
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..a.cols {
                if a[(row, j)].is_zero() {
                    continue;
                }
                let delta = &factor * &a[(row, j)];
                a[(i, j)] -= &delta;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Kernel of `m` as a canonical subspace of the column space dimension.
pub fn kernel_basis(m: &Mat) -> Subspace {
    let (r, pivots) = rref(m);
    let n = m.cols();
    let mut free = vec![true; n];
    for &p in &pivots {
        free[p] = false;
    }
    let vectors: Vec<Vec<Rat>> = (0..n)
        .filter(|&f| free[f])
        .map(|f| {
            let mut v = vec![Rat::zero(); n];
            v[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(i, f)];
            }
            v
        })
        .collect();
    Subspace::from_vectors(n, &vectors).expect("kernel vectors have ambient length")
}

/// Particular solution of `m x = b` with all free variables set to zero, or
/// `None` when `b` is not in the column space of `m`.
pub fn solve(m: &Mat, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(
        b.len(),
        m.rows(),
        "right-hand side length must equal row count"
    );
    let bcol = Mat::from_columns(m.rows(), &[b.to_vec()]).expect("length checked");
    let aug = Mat::hstack(m.rows(), &[m, &bcol]).expect("row counts agree");
    let (r, pivots) = rref(&aug);
    let n = m.cols();
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[(i, n)].clone();
    }
    Some(x)
}

/// A linear subspace of `Q^ambient_dim`, stored as a canonical basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            basis: Mat::zeros(0, ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            basis: Mat::identity(ambient_dim),
        }
    }

    /// Span of the given vectors, canonicalized.
    pub fn from_vectors(ambient_dim: usize, vectors: &[Vec<Rat>]) -> Result<Subspace, LinalgError> {
        let m = Mat::from_rows(ambient_dim, vectors)?;
        Ok(Subspace::row_space(&m))
    }

    pub fn row_space(m: &Mat) -> Subspace {
        let (r, pivots) = rref(m);
        let rank = pivots.len();
        let basis = Mat {
            rows: rank,
            cols: m.cols(),
            entries: r.entries[..rank * m.cols()].to_vec(),
        };
        Subspace {
            ambient_dim: m.cols(),
            basis,
        }
    }

    pub fn column_space(m: &Mat) -> Subspace {
        Subspace::row_space(&m.transpose())
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        self.basis.to_rows()
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .position(|x| !x.is_zero())
                    .expect("canonical basis has no zero rows")
            })
            .collect()
    }

    fn check_ambient(&self, n: usize) -> Result<(), LinalgError> {
        if self.ambient_dim != n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim,
                found: n,
            });
        }
        Ok(())
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[Rat]) -> Result<Option<Vec<Rat>>, LinalgError> {
        self.check_ambient(v.len())?;
        let pivots = self.pivots();
        let coords: Vec<Rat> = pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    residual[j] -= &(c * b);
                }
            }
        }
        Ok(residual.iter().all(Rat::is_zero).then_some(coords))
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool, LinalgError> {
        Ok(self.coordinates(v)?.is_some())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinalgError> {
        other.check_ambient(self.ambient_dim)?;
        for i in 0..self.dim() {
            if !other.contains(self.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other.ambient_dim)?;
        let stacked = Mat::vstack(self.ambient_dim, &[&self.basis, &other.basis])?;
        Ok(Subspace::row_space(&stacked))
    }

    /// Intersection computed from the kernel of `[A^T | -B^T]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other.ambient_dim)?;
        let a_t = self.basis.transpose();
        let neg_b_t = other.basis.transpose().scale(&Rat::from_int(-1));
        let system = Mat::hstack(self.ambient_dim, &[&a_t, &neg_b_t])?;
        let ker = kernel_basis(&system);
        let da = self.dim();
        let vectors: Vec<Vec<Rat>> = ker
            .basis_vectors()
            .into_iter()
            .map(|x| a_t.mul_vec(&x[..da]).expect("shape"))
            .collect();
        Subspace::from_vectors(self.ambient_dim, &vectors)
    }

    /// `dim self - dim sub`, defined only when `sub` lies inside `self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize, LinalgError> {
        if !sub.is_subspace_of(self)? {
            return Err(LinalgError::NotNested);
        }
        Ok(self.dim() - sub.dim())
    }

    /// Image of this subspace under `m`.
    pub fn image(&self, m: &Mat) -> Result<Subspace, LinalgError> {
        self.check_ambient(m.cols())?;
        let mapped = m.mul(&self.basis.transpose())?.transpose();
        Ok(Subspace::row_space(&mapped))
    }

    /// `{ u : m u ∈ target }`.
    pub fn preimage(m: &Mat, target: &Subspace) -> Result<Subspace, LinalgError> {
        target.check_ambient(m.rows())?;
        let neg_t = target.basis.transpose().scale(&Rat::from_int(-1));
        let system = Mat::hstack(m.rows(), &[m, &neg_t])?;
        let ker = kernel_basis(&system);
        let n = m.cols();
        let vectors: Vec<Vec<Rat>> = ker
            .basis_vectors()
            .into_iter()
            .map(|x| x[..n].to_vec())
            .collect();
        Subspace::from_vectors(n, &vectors)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) ", self.dim(), self.ambient_dim)?;
        f.debug_list().entries(self.basis.to_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ints;

    #[test]
    fn rref_identity() {
        let (r, p) = rref(&Mat::identity(2));
        assert_eq!(r, Mat::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one() {
        let m = Mat::from_ints(&[[1, 2], [2, 4]]);
        let (r, p) = rref(&m);
        assert_eq!(r, Mat::from_ints(&[[1, 2], [0, 0]]));
        assert_eq!(p, vec![0]);
        let s = Subspace::row_space(&m);
        assert_eq!(s.basis(), &Mat::from_ints(&[[1, 2]]));
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        assert_eq!(kernel_basis(&Mat::identity(3)).dim(), 0);
    }

    #[test]
    fn kernel_of_coordinate_projection() {
        let k = kernel_basis(&Mat::from_ints(&[[1, 0]]));
        assert_eq!(k, Subspace::from_vectors(2, &[ints(&[0, 1])]).unwrap());
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let b = ints(&[3, -1, 4]);
        assert_eq!(solve(&Mat::identity(3), &b), Some(b));
        // x = 1 and x = 0 simultaneously.
        let m = Mat::from_ints(&[[1], [1]]);
        assert_eq!(solve(&m, &ints(&[1, 0])), None);
    }

    #[test]
    fn solve_sets_free_variables_to_zero() {
        let m = Mat::from_ints(&[[1, 1, 0], [0, 0, 1]]);
        let x = solve(&m, &ints(&[2, 5])).unwrap();
        assert_eq!(x, ints(&[2, 0, 5]));
    }

    #[test]
    fn quotient_of_equal_spaces_is_zero() {
        let a = Subspace::from_vectors(3, &[ints(&[1, 2, 3]), ints(&[0, 1, 1])]).unwrap();
        assert_eq!(a.quotient_dim(&a).unwrap(), 0);
    }

    #[test]
    fn coordinate_intersection() {
        let a = Subspace::from_vectors(3, &[ints(&[1, 0, 0]), ints(&[0, 1, 0])]).unwrap();
        let b = Subspace::from_vectors(3, &[ints(&[0, 1, 0]), ints(&[0, 0, 1])]).unwrap();
        let e2 = Subspace::from_vectors(3, &[ints(&[0, 1, 0])]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), e2);
    }

    #[test]
    fn subspace_errors() {
        let a = Subspace::full(2);
        let b = Subspace::full(3);
        assert!(matches!(
            a.sum(&b),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        let line = Subspace::from_vectors(2, &[ints(&[1, 1])]).unwrap();
        let other = Subspace::from_vectors(2, &[ints(&[1, 0])]).unwrap();
        assert_eq!(line.quotient_dim(&other), Err(LinalgError::NotNested));
    }

    #[test]
    fn inverse_and_power() {
        let shear = Mat::from_ints(&[[1, 0], [1, 1]]);
        let inv = shear.inverse().unwrap();
        assert_eq!(inv, Mat::from_ints(&[[1, 0], [-1, 1]]));
        assert_eq!(shear.pow(3), Mat::from_ints(&[[1, 0], [3, 1]]));
        assert!(Mat::from_ints(&[[1, 2], [2, 4]]).inverse().is_none());
    }

    #[test]
    fn preimage_of_line() {
        // m = [1 0; 0 0], preimage of span{e1} is everything.
        let m = Mat::from_ints(&[[1, 0], [0, 0]]);
        let line = Subspace::from_vectors(2, &[ints(&[1, 0])]).unwrap();
        assert_eq!(Subspace::preimage(&m, &line).unwrap(), Subspace::full(2));
        let other = Subspace::from_vectors(2, &[ints(&[0, 1])]).unwrap();
        assert_eq!(
            Subspace::preimage(&m, &other).unwrap(),
            Subspace::from_vectors(2, &[ints(&[0, 1])]).unwrap()
        );
    }
}
