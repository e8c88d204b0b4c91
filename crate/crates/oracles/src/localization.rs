//! Genus-0 Gromov–Witten invariants of `Pⁿ` twisted by split bundles, from
//! Kontsevich's torus-fixed-point graph sum on `M̄_{0,0}(Pⁿ, d)`.
//!
//! Every weight is an exact rational; the answer must not depend on the
//! chosen torus weights, which the tests exploit as a self-check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::q;

/// Twisting bundle on `Pⁿ`: a direct sum of `O(k)` (convex, contributes the
/// Euler class of `H⁰`) and `O(−k)` (concave, contributes the Euler class of `H¹`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBundle {
    pub positive: Vec<u32>,
    pub negative: Vec<u32>,
}

/// Decorated tree shape: vertices `0..vertices`, edges `(u, v, degree)`, and
/// the order of its automorphism group (as a degree-labelled tree).
struct Shape {
    vertices: usize,
    edges: Vec<(usize, usize, i64)>,
    automorphisms: i64,
}

fn shapes(d: u32) -> Vec<Shape> {
    let s = |vertices, edges: &[(usize, usize, i64)], automorphisms| Shape {
        vertices,
        edges: edges.to_vec(),
        automorphisms,
    };
    match d {
        1 => vec![s(2, &[(0, 1, 1)], 2)],
        2 => vec![s(2, &[(0, 1, 2)], 2), s(3, &[(0, 1, 1), (1, 2, 1)], 2)],
        3 => vec![
            s(2, &[(0, 1, 3)], 2),
            s(3, &[(0, 1, 1), (1, 2, 2)], 1),
            s(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], 2),
            s(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], 6),
        ],
        _ => panic!("graph shapes are tabulated for degree ≤ 3"),
    }
}

fn colorings(shape: &Shape, points: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0; shape.vertices];
    fn rec(shape: &Shape, points: usize, v: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == shape.vertices {
            if shape.edges.iter().all(|&(a, b, _)| cur[a] != cur[b]) {
                out.push(cur.clone());
            }
            return;
        }
        for p in 0..points {
            cur[v] = p;
            rec(shape, points, v + 1, cur, out);
        }
    }
    rec(shape, points, 0, &mut current, &mut out);
    out
}

fn factorial(n: i64) -> BigRational {
    (1..=n).fold(BigRational::one(), |acc, k| acc * q(k, 1))
}

fn pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        (0..e).fold(BigRational::one(), |acc, _| acc * x)
    } else {
        BigRational::one() / pow(x, -e)
    }
}

/// `∫_{M̄_{0,0}(Pⁿ, d)} e(V_d)` computed with torus weights `lambda` (length `n+1`).
pub fn twisted_invariant(n: usize, bundle: &SplitBundle, d: u32, lambda: &[i64]) -> BigRational {
    assert_eq!(lambda.len(), n + 1);
    let lam: Vec<BigRational> = lambda.iter().map(|&l| q(l, 1)).collect();
    let mut total = BigRational::zero();
    for shape in shapes(d) {
        for color in colorings(&shape, n + 1) {
            total += graph_contribution(n, bundle, &shape, &color, &lam);
        }
    }
    total
}

fn graph_contribution(
    n: usize,
    bundle: &SplitBundle,
    shape: &Shape,
    color: &[usize],
    lam: &[BigRational],
) -> BigRational {
    let mut value = BigRational::one() / q(shape.automorphisms, 1);
    // flags[v] = list of ω_F at vertex v
    let mut flags: Vec<Vec<BigRational>> = vec![Vec::new(); shape.vertices];
    for &(u, v, de) in &shape.edges {
        let (i, j) = (color[u], color[v]);
        let dq = q(de, 1);
        value /= dq.clone();
        let diff = &lam[i] - &lam[j];
        flags[u].push(diff.clone() / dq.clone());
        flags[v].push(-diff.clone() / dq.clone());
        // moving part of H⁰(f*T_line) and the normal directions
        let sign = if de % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        value *= sign * pow(&dq, 2 * de) / (factorial(de) * factorial(de) * pow(&diff, 2 * de));
        let interp = |a: i64, scale: i64| (q(a, 1) * &lam[i] + q(scale * de - a, 1) * &lam[j]) / dq.clone();
        for k in (0..=n).filter(|&k| k != i && k != j) {
            for a in 0..=de {
                value /= interp(a, 1) - &lam[k];
            }
        }
        for &k in &bundle.positive {
            let k = i64::from(k);
            for a in 0..=k * de {
                value *= interp(a, k);
            }
        }
        for &k in &bundle.negative {
            let k = i64::from(k);
            for b in 1..k * de {
                value *= -interp(b, k);
            }
        }
    }
    for (v, omegas) in flags.iter().enumerate() {
        let i = color[v];
        let val = omegas.len() as i64;
        let tangent: BigRational = (0..=n).filter(|&k| k != i).map(|k| &lam[i] - &lam[k]).product();
        value *= pow(&tangent, val - 1);
        let inv_sum: BigRational = omegas.iter().map(|w| BigRational::one() / w).sum();
        value *= pow(&inv_sum, val - 3);
        for w in omegas {
            value /= w.clone();
        }
        for &k in &bundle.positive {
            value /= pow(&(q(i64::from(k), 1) * &lam[i]), val - 1);
        }
        for &k in &bundle.negative {
            value *= pow(&(q(-i64::from(k), 1) * &lam[i]), val - 1);
        }
    }
    value
}

/// Quintic threefold invariant `K⁰_d = ∫ e(H⁰(C, f*O(5)))` on `M̄_{0,0}(P⁴, d)`.
pub fn quintic_invariant(d: u32) -> BigRational {
    let bundle = SplitBundle { positive: vec![5], negative: vec![] };
    twisted_invariant(4, &bundle, d, &[2, 3, 17, 41, 101])
}

/// Resolved conifold invariant `K⁰_d = ∫ e(H¹(C, f*(O(−1)⊕O(−1))))` on `M̄_{0,0}(P¹, d)`.
pub fn conifold_invariant(d: u32) -> BigRational {
    let bundle = SplitBundle { positive: vec![], negative: vec![1, 1] };
    twisted_invariant(1, &bundle, d, &[2, 7])
}

/// Instanton numbers from `K_d = Σ_{k|d} n_{d/k} / k³`.
pub fn multiple_cover_inverse(k: &[BigRational]) -> Vec<BigRational> {
    let mut n: Vec<BigRational> = Vec::with_capacity(k.len());
    for d in 1..=k.len() {
        let mut v = k[d - 1].clone();
        for c in 2..=d {
            if d % c == 0 {
                v -= &n[d / c - 1] / BigRational::from_integer(BigInt::from(c * c * c));
            }
        }
        n.push(v);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_lines() {
        assert_eq!(quintic_invariant(1), q(2875, 1));
    }

    #[test]
    fn quintic_conics_and_cover() {
        let k2 = quintic_invariant(2);
        assert_eq!(k2, q(609250, 1) + q(2875, 8));
    }

    #[test]
    fn weight_independence() {
        let b = SplitBundle { positive: vec![5], negative: vec![] };
        let a = twisted_invariant(4, &b, 2, &[1, 4, 9, 23, 57]);
        assert_eq!(a, quintic_invariant(2));
    }

    #[test]
    fn conifold_multiple_covers() {
        assert_eq!(conifold_invariant(1), q(1, 1));
        assert_eq!(conifold_invariant(2), q(1, 8));
        assert_eq!(conifold_invariant(3), q(1, 27));
        let b = SplitBundle { positive: vec![], negative: vec![1, 1] };
        assert_eq!(twisted_invariant(1, &b, 3, &[-5, 11]), q(1, 27));
    }

    #[test]
    fn cover_inversion() {
        let n = multiple_cover_inverse(&[q(1, 1), q(1, 8), q(1, 27)]);
        assert_eq!(n, vec![q(1, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn quintic_twisted_cubics() {
        let n = multiple_cover_inverse(&[quintic_invariant(1), quintic_invariant(2), quintic_invariant(3)]);
        assert_eq!(n[2], q(317206375, 1));
    }
}
