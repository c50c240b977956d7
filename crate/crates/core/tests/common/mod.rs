#![allow(dead_code)]

use eqcohom::instance::LinearInstance;
use eqcohom::{Mat, Rat};

/// Rank by plain rational row reduction, kept separate from the library's
/// elimination code.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut rows: Vec<Vec<Rat>> = rows.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = &rows[r][c] / &pivot;
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&factor * y);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Fraction-free (Bareiss) rank of an integer matrix.
pub fn bareiss_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn to_rows(m: &Mat) -> Vec<Vec<Rat>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect())
        .collect()
}

fn minus_identity(m: &Mat) -> Mat {
    m.sub(&Mat::identity(m.rows())).expect("square")
}

fn stack(parts: &[Mat], cols: usize) -> Vec<Vec<Rat>> {
    let mut out: Vec<Vec<Rat>> = parts.iter().flat_map(to_rows).collect();
    if out.is_empty() {
        out.push(vec![Rat::zero(); cols]);
    }
    out
}

/// Quotient dimension from ranks alone:
/// `dim π(U)^G = rank[S; π] - rank S` with `S = (g_i^W - 1)π` stacked, and
/// `dim π(U^G) = rank[T; π] - rank T` with `T = (g_i^U - 1)` stacked.
pub fn quotient_dim(inst: &LinearInstance) -> usize {
    let n = inst.dim_u;
    let s: Vec<Mat> = inst
        .generators
        .iter()
        .map(|g| minus_identity(&g.g_w).mul(&inst.pi).expect("shapes"))
        .collect();
    let t: Vec<Mat> = inst
        .generators
        .iter()
        .map(|g| minus_identity(&g.g_u))
        .collect();
    let with_pi = |parts: &[Mat]| {
        let mut v = parts.to_vec();
        v.push(inst.pi.clone());
        stack(&v, n)
    };
    let image_invariant = rank(&with_pi(&s)) - rank(&stack(&s, n));
    let image_of_invariant = rank(&with_pi(&t)) - rank(&stack(&t, n));
    image_invariant - image_of_invariant
}

/// `ker π ⊂ U^G` iff adding the rows `g_i - 1` to `π` does not raise its rank.
pub fn condition_i(inst: &LinearInstance) -> bool {
    let mut parts = vec![inst.pi.clone()];
    parts.extend(inst.generators.iter().map(|g| minus_identity(&g.g_u)));
    rank(&stack(&parts, inst.dim_u)) == rank(&stack(std::slice::from_ref(&inst.pi), inst.dim_u))
}

/// `(ker π)^d ⊂ ḡ(U)` iff appending the columns `e_i ⊗ v_k` to `ḡ` keeps its rank.
pub fn condition_ii(inst: &LinearInstance, kernel: &[Vec<Rat>]) -> bool {
    let n = inst.dim_u;
    let d = inst.generators.len();
    if d == 0 || kernel.is_empty() {
        return true;
    }
    let mut gbar: Vec<Vec<Rat>> = Vec::new();
    for g in &inst.generators {
        gbar.extend(to_rows(&minus_identity(&g.g_u)));
    }
    let mut extended = gbar.clone();
    for j in 0..d {
        for v in kernel {
            for (row, x) in extended.iter_mut().enumerate() {
                let value = if row / n == j {
                    v[row % n].clone()
                } else {
                    Rat::zero()
                };
                x.push(value);
            }
        }
    }
    rank(&extended) == rank(&gbar)
}

pub struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }

    pub fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&x| self.find(x) == x).count()
    }
}
