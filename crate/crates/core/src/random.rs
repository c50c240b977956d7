//! Seeded generators of valid random instances.
//!
//! Linear instances are built in adapted coordinates `U = K ⊕ C`,
//! `W = π(C) ⊕ D` where every generator has the block form
//!
//! ```text
//! gU = [A B]    gW = [E F]    π = [0 I]
//!      [0 E]         [0 H]        [0 0]
//! ```
//!
//! which is equivariant for any invertible `A`, `E`, `H`; the result is then
//! conjugated by random invertible changes of basis.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{to_instance, Graph, GraphAction};
use crate::instance::{Generator, LinearInstance};
use crate::linalg::Mat;
use crate::rational::Rat;

pub const ENTRY_BOUND: i64 = 3;

fn small<R: Rng>(rng: &mut R) -> Rat {
    Rat::from_int(rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND))
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    let entries = (0..rows * cols).map(|_| small(rng)).collect();
    Mat::new(rows, cols, entries).expect("sized")
}

/// Invertible `n × n` matrix as a product of unit triangular factors and a
/// signed diagonal.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let mut lower = Mat::identity(n);
    let mut upper = Mat::identity(n);
    for i in 0..n {
        upper[(i, i)] = Rat::from_int(*[-2, -1, 1, 2].choose(rng).expect("nonempty"));
        for j in 0..i {
            lower[(i, j)] = Rat::from_int(rng.gen_range(-1..=1));
            upper[(j, i)] = Rat::from_int(rng.gen_range(-1..=1));
        }
    }
    lower.mul(&upper).expect("square")
}

/// Random signed permutation matrix.
pub fn random_signed_permutation<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = Mat::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        m[(p, i)] = Rat::from_int(if rng.gen_bool(0.3) { -1 } else { 1 });
    }
    m
}

fn block_upper(top_left: &Mat, top_right: &Mat, bottom_right: &Mat) -> Mat {
    let (a, b) = (top_left.rows(), bottom_right.rows());
    let mut m = Mat::zeros(a + b, a + b);
    for i in 0..a {
        for j in 0..a {
            m[(i, j)] = top_left[(i, j)].clone();
        }
        for j in 0..b {
            m[(i, a + j)] = top_right[(i, j)].clone();
        }
    }
    for i in 0..b {
        for j in 0..b {
            m[(a + i, a + j)] = bottom_right[(i, j)].clone();
        }
    }
    m
}

fn matrix_order(m: &Mat, limit: u64) -> Option<u64> {
    let id = Mat::identity(m.rows());
    let mut cur = m.clone();
    for k in 1..=limit {
        if cur == id {
            return Some(k);
        }
        cur = cur.mul(m).expect("square");
    }
    None
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Random valid linear instance with `dim U, dim W ≤ max_dim` and at most
/// three generators.
pub fn random_linear_instance<R: Rng>(rng: &mut R, max_dim: usize) -> LinearInstance {
    let max_dim = max_dim.max(1);
    let n = rng.gen_range(1..=max_dim);
    let m = rng.gen_range(0..=n);
    let r = n - m;
    let p = rng.gen_range(r..=max_dim.max(r));
    let extra = p - r;
    // Equality-friendly instances: trivial action on ker π and on the image
    // part, with enough room for the gluing blocks to cover (ker π)^d.
    let friendly = m > 0 && rng.gen_bool(0.4);
    let max_gens = if friendly { (r / m).min(3) } else { 3 };
    let d = rng.gen_range(0..=max_gens);

    let mut blocks = Vec::with_capacity(d);
    for _ in 0..d {
        let torsion = !friendly && rng.gen_bool(0.25);
        let (a, b, e, f, h) = if torsion {
            (
                random_signed_permutation(rng, m),
                Mat::zeros(m, r),
                random_signed_permutation(rng, r),
                Mat::zeros(r, extra),
                random_signed_permutation(rng, extra),
            )
        } else {
            let a = if friendly || rng.gen_bool(0.5) {
                Mat::identity(m)
            } else {
                random_invertible(rng, m)
            };
            let e = if friendly || rng.gen_bool(0.4) {
                Mat::identity(r)
            } else {
                random_invertible(rng, r)
            };
            let b = if rng.gen_bool(0.15) {
                Mat::zeros(m, r)
            } else {
                random_matrix(rng, m, r)
            };
            let f = random_matrix(rng, r, extra);
            let h = if rng.gen_bool(0.5) {
                Mat::identity(extra)
            } else {
                random_invertible(rng, extra)
            };
            (a, b, e, f, h)
        };
        let g_u = block_upper(&a, &b, &e);
        let g_w = block_upper(&e, &f, &h);
        let order = if torsion {
            let ou = matrix_order(&g_u, 64).expect("signed permutations have finite order");
            let ow = matrix_order(&g_w, 64).expect("signed permutations have finite order");
            Some(lcm(ou, ow))
        } else {
            None
        };
        blocks.push((g_u, g_w, order));
    }

    let mut pi = Mat::zeros(p, n);
    for i in 0..r {
        pi[(i, m + i)] = Rat::one();
    }

    let (pu, pw) = if rng.gen_bool(0.3) {
        (Mat::identity(n), Mat::identity(p))
    } else {
        (random_invertible(rng, n), random_invertible(rng, p))
    };
    let pu_inv = pu.inverse().expect("invertible");
    let pw_inv = pw.inverse().expect("invertible");
    let conj = |x: &Mat, s: &Mat, s_inv: &Mat| s.mul(x).and_then(|y| y.mul(s_inv)).expect("square");

    LinearInstance {
        dim_u: n,
        dim_w: p,
        pi: pw.mul(&pi).and_then(|y| y.mul(&pu_inv)).expect("shapes"),
        generators: blocks
            .iter()
            .map(|(gu, gw, order)| Generator {
                g_u: conj(gu, &pu, &pu_inv),
                g_w: conj(gw, &pw, &pw_inv),
                order: *order,
            })
            .collect(),
    }
}

/// Random graph on at most `max_vertices` vertices (possibly with loops,
/// parallel edges, several components) together with one or two random
/// permutations; the edge set is closed under the generated group so every
/// generator is an automorphism.
pub fn random_graph_action<R: Rng>(rng: &mut R, max_vertices: usize) -> (Graph, GraphAction) {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let n_gens = rng.gen_range(1..=2);
    let generators: Vec<Vec<usize>> = (0..n_gens)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            if rng.gen_bool(0.8) {
                p.shuffle(rng);
            }
            p
        })
        .collect();
    let seeds = rng.gen_range(0..=n);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for _ in 0..seeds {
        let start = (rng.gen_range(0..n), rng.gen_range(0..n));
        // orbit of the geometric edge under the generated group
        let key = |(a, b): (usize, usize)| (a.min(b), a.max(b));
        let mut seen: HashSet<(usize, usize)> = HashSet::from([key(start)]);
        let mut orbit: BTreeSet<(usize, usize)> = BTreeSet::from([key(start)]);
        let mut stack = vec![start];
        while let Some((a, b)) = stack.pop() {
            for g in &generators {
                let img = (g[a], g[b]);
                if seen.insert(key(img)) {
                    orbit.insert(key(img));
                    stack.push(img);
                }
            }
        }
        for (a, b) in orbit {
            if rng.gen_bool(0.5) {
                edges.push((a, b));
            } else {
                edges.push((b, a));
            }
        }
    }
    let graph = Graph::new(n, &edges);
    let action = GraphAction {
        generators,
        orders: None,
    };
    (graph, action)
}

pub fn random_graph_instance<R: Rng>(rng: &mut R, max_vertices: usize) -> LinearInstance {
    let (g, a) = random_graph_action(rng, max_vertices);
    to_instance(&g, &a).expect("edge sets are closed under the group")
}

/// Random graph with loops and parallel edges, no symmetry imposed.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    let n = rng.gen_range(0..=max_vertices);
    if n == 0 {
        return Graph::new(0, &[]);
    }
    let k = rng.gen_range(0..=max_edges);
    let edges: Vec<(usize, usize)> = (0..k)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    Graph::new(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let inst = random_linear_instance(&mut rng, 6);
            assert!(inst.validate().is_valid(), "{inst:?}");
            assert!(inst.dim_u <= 6 && inst.dim_w <= 6 && inst.d() <= 3);
        }
        for _ in 0..50 {
            assert!(random_graph_instance(&mut rng, 6).validate().is_valid());
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = random_linear_instance(&mut ChaCha8Rng::seed_from_u64(3), 5);
        let b = random_linear_instance(&mut ChaCha8Rng::seed_from_u64(3), 5);
        assert_eq!(a, b);
    }
}
