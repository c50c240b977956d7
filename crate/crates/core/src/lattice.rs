//! Integer lattices in row Hermite normal form.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("integer overflow during lattice reduction")]
    Overflow,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
}

/// Row-style Hermite normal form of an integer matrix `T` (one generator per
/// row), with the unimodular transform `U` such that `U T` is the HNF
/// stacked over zero rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hnf {
    dim: usize,
    /// Nonzero HNF rows; pivots strictly increase left to right and are
    /// positive, entries above each pivot lie in `[0, pivot)`.
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
    /// `transform[i] · T` equals `rows[i]` for `i < rank`, and zero after.
    transform: Vec<Vec<i64>>,
}

fn narrow(v: i128) -> Result<i64, LatticeError> {
    i64::try_from(v).map_err(|_| LatticeError::Overflow)
}

/// `a -= q * b`, entrywise, with overflow checks.
fn sub_multiple(a: &mut [i128], b: &[i128], q: i128) -> Result<(), LatticeError> {
    for (x, y) in a.iter_mut().zip(b) {
        let prod = y.checked_mul(q).ok_or(LatticeError::Overflow)?;
        *x = x.checked_sub(prod).ok_or(LatticeError::Overflow)?;
    }
    Ok(())
}

impl Hnf {
    pub fn new(dim: usize, generators: &[Vec<i64>]) -> Result<Hnf, LatticeError> {
        let n = generators.len();
        let mut a: Vec<Vec<i128>> = Vec::with_capacity(n);
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(LatticeError::Ragged {
                    row: i,
                    expected: dim,
                    found: g.len(),
                });
            }
            a.push(g.iter().map(|&x| x as i128).collect());
        }
        let mut u: Vec<Vec<i128>> = (0..n)
            .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
            .collect();

        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..dim {
            if row == n {
                break;
            }
            loop {
                // smallest nonzero |entry| at or below `row`
                let best = (row..n)
                    .filter(|&i| a[i][col] != 0)
                    .min_by_key(|&i| (a[i][col].unsigned_abs(), i));
                let Some(p) = best else { break };
                a.swap(row, p);
                u.swap(row, p);
                let mut done = true;
                for i in row + 1..n {
                    if a[i][col] == 0 {
                        continue;
                    }
                    let q = a[i][col].div_euclid(a[row][col]);
                    let (pa, pu) = (a[row].clone(), u[row].clone());
                    sub_multiple(&mut a[i], &pa, q)?;
                    sub_multiple(&mut u[i], &pu, q)?;
                    if a[i][col] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if a[row][col] == 0 {
                continue;
            }
            if a[row][col] < 0 {
                a[row].iter_mut().for_each(|x| *x = -*x);
                u[row].iter_mut().for_each(|x| *x = -*x);
            }
            let (pa, pu) = (a[row].clone(), u[row].clone());
            for i in 0..row {
                let q = a[i][col].div_euclid(pa[col]);
                if q != 0 {
                    sub_multiple(&mut a[i], &pa, q)?;
                    sub_multiple(&mut u[i], &pu, q)?;
                }
            }
            pivots.push(col);
            row += 1;
        }

        let to_i64 = |m: Vec<Vec<i128>>| -> Result<Vec<Vec<i64>>, LatticeError> {
            m.into_iter()
                .map(|r| r.into_iter().map(narrow).collect())
                .collect()
        };
        a.truncate(row);
        Ok(Hnf {
            dim,
            rows: to_i64(a)?,
            pivots,
            transform: to_i64(u)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn transform(&self) -> &[Vec<i64>] {
        &self.transform
    }

    /// Integer relations among the generators: combinations mapping to zero.
    pub fn relations(&self) -> &[Vec<i64>] {
        &self.transform[self.rank()..]
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Index `[Z^dim : L]`, `None` when the lattice is not of full rank.
    pub fn index(&self) -> Option<u64> {
        if !self.is_full_rank() {
            return None;
        }
        self.pivots
            .iter()
            .zip(&self.rows)
            .map(|(&p, r)| r[p] as u64)
            .try_fold(1u64, |acc, x| acc.checked_mul(x))
    }

    /// The lattice is all of `Z^dim`.
    pub fn is_unimodular(&self) -> bool {
        self.index() == Some(1)
    }

    /// Coefficients `x` over the original generators with `x · T = target`,
    /// or `None` if `target` is not in the lattice.
    ///
    /// The solution is the one read off the HNF by back-substitution, so it
    /// only involves the first `rank` transform rows.
    pub fn express(&self, target: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(
            target.len(),
            self.dim,
            "target length must equal lattice dimension"
        );
        let mut residual: Vec<i128> = target.iter().map(|&x| x as i128).collect();
        let mut y = Vec::with_capacity(self.rank());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let pivot = row[p] as i128;
            if residual[p] % pivot != 0 {
                return None;
            }
            let c = residual[p] / pivot;
            for (r, &h) in residual.iter_mut().zip(row) {
                *r -= c * h as i128;
            }
            y.push(c);
        }
        if residual.iter().any(|&r| r != 0) {
            return None;
        }
        let n = self.transform.len();
        let mut x = vec![0i128; n];
        for (c, urow) in y.iter().zip(&self.transform) {
            for (xi, &ui) in x.iter_mut().zip(urow) {
                *xi += c * ui as i128;
            }
        }
        x.into_iter().map(|v| narrow(v).ok()).collect()
    }
}

/// Serializable snapshot of a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeSummary {
    pub hnf: Vec<Vec<i64>>,
    pub rank: usize,
    pub index: Option<u64>,
}

impl From<&Hnf> for LatticeSummary {
    fn from(h: &Hnf) -> Self {
        LatticeSummary {
            hnf: h.rows.clone(),
            rank: h.rank(),
            index: h.index(),
        }
    }
}

/// Determinant of a small square integer matrix by cofactor-free elimination
/// over `i128` (Bareiss). Returns `None` on overflow.
pub fn det(m: &[Vec<i64>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0)?;
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j]
                    .checked_mul(a[k][k])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_transform(h: &Hnf, gens: &[Vec<i64>]) {
        for (i, urow) in h.transform().iter().enumerate() {
            let img: Vec<i64> = (0..h.dim())
                .map(|c| urow.iter().zip(gens).map(|(u, g)| u * g[c]).sum())
                .collect();
            if i < h.rank() {
                assert_eq!(img, h.rows()[i]);
            } else {
                assert!(img.iter().all(|&x| x == 0));
            }
        }
        let det_u = det(h.transform()).unwrap();
        assert_eq!(det_u.abs(), 1);
    }

    #[test]
    fn identity_lattice() {
        let gens = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let h = Hnf::new(3, &gens).unwrap();
        assert_eq!(h.rows(), &gens[..]);
        assert!(h.is_unimodular());
    }

    #[test]
    fn rank_deficient_loop() {
        let h = Hnf::new(2, &[vec![2, 0]]).unwrap();
        assert_eq!(h.rank(), 1);
        assert_eq!(h.rows(), &[vec![2, 0]]);
        assert_eq!(h.index(), None);
    }

    #[test]
    fn index_two() {
        let gens = vec![vec![2, 0], vec![0, 1]];
        let h = Hnf::new(2, &gens).unwrap();
        assert_eq!(h.index(), Some(2));
        assert!(!h.is_unimodular());
        check_transform(&h, &gens);
    }

    #[test]
    fn reduces_above_pivots_and_records_relations() {
        let gens = vec![vec![3, 5], vec![-2, 7], vec![1, 12], vec![4, 4]];
        let h = Hnf::new(2, &gens).unwrap();
        check_transform(&h, &gens);
        for (i, &p) in h.pivots.iter().enumerate() {
            assert!(h.rows()[i][p] > 0);
            for r in &h.rows()[..i] {
                assert!(r[p] >= 0 && r[p] < h.rows()[i][p]);
            }
        }
        assert_eq!(h.relations().len(), 2);
    }

    #[test]
    fn express_solutions() {
        let gens = vec![vec![1, 1], vec![1, -1]];
        let h = Hnf::new(2, &gens).unwrap();
        assert_eq!(h.index(), Some(2));
        assert!(h.express(&[1, 0]).is_none());
        let x = h.express(&[2, 0]).unwrap();
        assert_eq!(x[0] + x[1], 2);
        assert_eq!(x[0] - x[1], 0);
    }

    #[test]
    fn determinant() {
        assert_eq!(det(&[vec![2, 1], vec![1, 1]]), Some(1));
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), Some(-1));
        assert_eq!(
            det(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]),
            Some(-3)
        );
    }
}
