//! Fincke-Pohst enumeration over an exact rational Cholesky decomposition.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{Lattice, Sign};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::par::Strategy;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ShortVector {
    pub coords: Vec<i64>,
    pub norm: i64,
}

/// `Q(x) = Σ diag[i] (x_i + Σ_{j>i} mu[i][j] x_j)²` for the positive definite
/// form `sign · G`.
struct Decomposition {
    diag: Vec<Rational>,
    mu: Vec<Vec<Rational>>,
}

fn decompose(q: &[Vec<Rational>]) -> Decomposition {
    let n = q.len();
    let mut a = q.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            let v = &a[i][j] / &a[i][i];
            a[j][i] = a[i][j].clone();
            a[i][j] = v;
        }
        for k in i + 1..n {
            for l in k..n {
                let v = &a[k][i] * &a[i][l];
                a[k][l] -= v;
            }
        }
    }
    let diag = (0..n).map(|i| a[i][i].clone()).collect();
    let mu = (0..n).map(|i| (0..n).map(|j| if j > i { a[i][j].clone() } else { Rational::zero() }).collect()).collect();
    Decomposition { diag, mu }
}

#[derive(Clone)]
struct Node {
    /// coordinates `level..n` already fixed (others zero)
    x: Vec<i64>,
    level: usize,
    remaining: Rational,
    all_zero: bool,
}

pub(super) fn enumerate(l: &Lattice, bound: u64, strategy: Strategy) -> Result<Vec<ShortVector>> {
    let n = l.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    let sign = l.definiteness().ok_or(Error::NotDefinite)?;
    let s: i64 = if sign == Sign::Positive { 1 } else { -1 };
    let q: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| Rational::from_integer(l.gram().get(i, j) * s)).collect()).collect();
    let dec = decompose(&q);
    let root = Node { x: vec![0; n], level: n, remaining: Rational::from_integer(BigInt::from(bound)), all_zero: true };

    // expand the top levels sequentially so the parallel split has enough work
    let mut frontier = vec![root];
    let split_depth = n.min(2);
    for _ in 0..split_depth {
        frontier = frontier.into_iter().flat_map(|node| children(&dec, &node)).collect();
    }
    let mut found: Vec<Vec<i64>> = strategy.flat_map(frontier, |node| {
        let mut out = Vec::new();
        descend(&dec, node, &mut out);
        out
    });

    let mut result: Vec<ShortVector> = found
        .drain(..)
        .filter(|x| x.iter().any(|&c| c != 0))
        .map(|mut x| {
            if x.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
                x.iter_mut().for_each(|c| *c = -*c);
            }
            let norm = l.pair(&x, &x).to_i64().expect("norm within bound");
            ShortVector { coords: x, norm }
        })
        .collect();
    debug_assert!(result.iter().all(|v| v.norm.unsigned_abs() <= bound));
    result.sort();
    Ok(result)
}

fn descend(dec: &Decomposition, node: Node, out: &mut Vec<Vec<i64>>) {
    if node.level == 0 {
        out.push(node.x);
        return;
    }
    for child in children(dec, &node) {
        descend(dec, child, out);
    }
}

/// Children of a node, fixing coordinate `level - 1`. While all higher
/// coordinates are zero the new coordinate is kept nonnegative so that each
/// `±` pair is visited once.
fn children(dec: &Decomposition, node: &Node) -> Vec<Node> {
    if node.level == 0 {
        return vec![node.clone()];
    }
    let i = node.level - 1;
    let n = node.x.len();
    let center: Rational = (i + 1..n)
        .filter(|&j| node.x[j] != 0)
        .map(|j| &dec.mu[i][j] * Rational::from_integer(BigInt::from(node.x[j])))
        .sum();
    let d = &dec.diag[i];
    let fits = |x: i64| -> Option<Rational> {
        let t = Rational::from_integer(BigInt::from(x)) + &center;
        let used = d * &t * &t;
        (used <= node.remaining).then(|| &node.remaining - used)
    };

    // approximate interval, then tightened with exact checks
    let c = center.to_f64().unwrap_or(0.0);
    let r = (node.remaining.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)).max(0.0).sqrt();
    let mut lo = (-c - r).floor() as i64 - 1;
    let mut hi = (-c + r).ceil() as i64 + 1;
    if node.all_zero {
        lo = lo.max(0);
    }
    while lo <= hi && fits(lo).is_none() {
        lo += 1;
    }
    while hi >= lo && fits(hi).is_none() {
        hi -= 1;
    }
    let mut kids = Vec::new();
    for v in lo..=hi {
        if let Some(rem) = fits(v) {
            let mut x = node.x.clone();
            x[i] = v;
            kids.push(Node { x, level: i, remaining: rem, all_zero: node.all_zero && v == 0 });
        }
    }
    kids
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn roots_of_a2_and_a2_to_the_ninth() {
        let a2 = standard_lattice("A2", Sign::Negative).unwrap();
        let roots = a2.short_vectors(2).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|v| v.norm == -2));
        let nine = Lattice::direct_sum(&vec![a2; 9]);
        assert_eq!(nine.short_vectors(2).unwrap().len(), 27);
    }

    #[test]
    fn e8_has_120_root_pairs() {
        let e8 = standard_lattice("E8", Sign::Positive).unwrap();
        let roots = e8.short_vectors(2).unwrap();
        assert_eq!(roots.len(), 120);
        // 2160 vectors of norm 4 -> 1080 pairs
        let n4 = e8.short_vectors(4).unwrap().iter().filter(|v| v.norm == 4).count();
        assert_eq!(n4, 1080);
    }

    #[test]
    fn strategies_agree() {
        let d5 = standard_lattice("D5", Sign::Negative).unwrap();
        let a = d5.short_vectors_with(4, Strategy::Sequential).unwrap();
        let b = d5.short_vectors_with(4, Strategy::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_indefinite() {
        let u = standard_lattice("U", Sign::Positive).unwrap();
        assert!(matches!(u.short_vectors(2), Err(Error::NotDefinite)));
    }

    #[test]
    fn canonical_sign_and_order() {
        let a3 = standard_lattice("A3", Sign::Positive).unwrap();
        let v = a3.short_vectors(2).unwrap();
        assert_eq!(v.len(), 6);
        for sv in &v {
            assert!(*sv.coords.iter().find(|&&c| c != 0).unwrap() > 0);
        }
        assert!(v.windows(2).all(|w| w[0].coords < w[1].coords));
    }
}
