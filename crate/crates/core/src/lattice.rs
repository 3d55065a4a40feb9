//! Integral lattices given by Gram matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, IntMatrix, Rational};
use crate::fqf;
use crate::par::Strategy;

mod short;

pub use short::ShortVector;

/// Sign applied to the definite root lattices of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn factor(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    label: Option<String>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice").field("label", &self.label).field("gram", &self.gram).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub rank: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub determinant: BigInt,
    pub is_even: bool,
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare { rows: gram.rows(), cols: gram.cols() });
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Lattice { gram, label: None })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn determinant(&self) -> BigInt {
        exact::determinant(&self.gram).expect("gram is square")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn is_degenerate(&self) -> bool {
        self.determinant().is_zero()
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        exact::signature(&self.gram).expect("gram is symmetric")
    }

    pub fn invariants(&self) -> Invariants {
        let (n_plus, n_zero, n_minus) = self.signature();
        Invariants {
            rank: self.rank(),
            n_plus,
            n_minus,
            n_zero,
            determinant: self.determinant(),
            is_even: self.is_even(),
        }
    }

    /// `Some(Positive)` / `Some(Negative)` for definite lattices. The rank-0
    /// lattice counts as positive definite.
    pub fn definiteness(&self) -> Option<Sign> {
        let (p, z, m) = self.signature();
        match (p, z, m) {
            (_, 0, 0) => Some(Sign::Positive),
            (0, 0, _) => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn direct_sum(parts: &[Lattice]) -> Lattice {
        let blocks: Vec<&IntMatrix> = parts.iter().map(|l| &l.gram).collect();
        let label = parts.iter().map(|l| l.label.clone().unwrap_or_else(|| "?".into())).collect::<Vec<_>>().join("+");
        Lattice { gram: IntMatrix::block_diag(&blocks), label: (!parts.is_empty()).then_some(label) }
    }

    /// `L(n)`: the Gram matrix multiplied by `n`.
    pub fn rescale(&self, n: i64) -> Result<Lattice> {
        if n == 0 {
            return Err(Error::InvalidInput("rescaling by zero".into()));
        }
        Ok(Lattice {
            gram: self.gram.scaled(&BigInt::from(n)),
            label: self.label.as_ref().map(|l| format!("({l})({n})")),
        })
    }

    /// `L(1/p)`: divides every Gram entry by `p`.
    pub fn scale_down(&self, p: i64) -> Result<Lattice> {
        if p == 0 {
            return Err(Error::InvalidInput("scaling down by zero".into()));
        }
        let p = BigInt::from(p);
        let rows = self
            .gram
            .to_rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| {
                        if x.is_multiple_of(&p) {
                            Ok(x / &p)
                        } else {
                            Err(Error::NotIntegral(format!("entry {x} not divisible by {p}")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Lattice { gram: IntMatrix::from_big_rows(rows)?, label: None })
    }

    /// `L^∨(n)` with Gram `n · G⁻¹` in the dual basis.
    pub fn dual_rescaled(&self, n: i64) -> Result<Lattice> {
        if n <= 0 {
            return Err(Error::InvalidInput("dual rescaling needs a positive factor".into()));
        }
        let inv = exact::rational_inverse(&self.gram)?;
        let factor = Rational::from_integer(BigInt::from(n));
        let scaled: Vec<Vec<Rational>> =
            inv.into_iter().map(|r| r.into_iter().map(|x| x * &factor).collect()).collect();
        let gram = exact::rational_to_int(&scaled)
            .ok_or_else(|| Error::NotIntegral(format!("{n} times the inverse Gram matrix")))?;
        Ok(Lattice { gram, label: self.label.as_ref().map(|l| format!("({l})^v({n})")) })
    }

    /// Nonzero vectors with `|v·v| <= bound`, one per `±` pair, first nonzero
    /// coordinate positive, sorted lexicographically.
    pub fn short_vectors(&self, bound: u64) -> Result<Vec<ShortVector>> {
        self.short_vectors_with(bound, Strategy::default())
    }

    pub fn short_vectors_with(&self, bound: u64, strategy: Strategy) -> Result<Vec<ShortVector>> {
        short::enumerate(self, bound, strategy)
    }

    /// `v·w` for integer coordinate vectors.
    pub fn pair(&self, v: &[i64], w: &[i64]) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..self.rank() {
            if v[i] == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..self.rank() {
                if w[j] != 0 {
                    row += self.gram.get(i, j) * w[j];
                }
            }
            acc += row * v[i];
        }
        acc
    }
}

/// Catalog constructor. Accepts `A<n>`, `D<n>` (n ≥ 4), `E6`, `E7`, `E8`,
/// `U`, and rank-one `<n>`; an underscore after the letter is tolerated.
/// `U` and `<n>` ignore `sign`.
pub fn standard_lattice(name: &str, sign: Sign) -> Result<Lattice> {
    let unknown = || Error::UnknownName(name.to_string());
    let trimmed = name.trim();
    if trimmed == "U" {
        return Ok(Lattice::from_rows(&[[0, 1], [1, 0]])?.with_label("U"));
    }
    if let Some(inner) = trimmed.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        let n: i64 = inner.trim().parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        return Ok(Lattice::from_rows(&[[n]])?.with_label(format!("<{n}>")));
    }
    let mut chars = trimmed.chars();
    let family = chars.next().ok_or_else(unknown)?;
    let rest: String = chars.collect();
    let n: usize = rest.trim_start_matches('_').parse().map_err(|_| unknown())?;
    let edges: Vec<(usize, usize)> = match family {
        'A' if n >= 1 => (1..n).map(|i| (i - 1, i)).collect(),
        'D' if n >= 4 => {
            let mut e: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
            e.push((n - 3, n - 1));
            e
        }
        'E' if (6..=8).contains(&n) => {
            // Bourbaki labelling 1..8: chain 1-3-4-5-6-7-8 with 2 on 4.
            let all = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
            all.iter().filter(|&&(a, b)| a <= n && b <= n).map(|&(a, b)| (a - 1, b - 1)).collect()
        }
        _ => return Err(unknown()),
    };
    let s = sign.factor();
    let mut rows = vec![vec![0i64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 2 * s;
    }
    for (a, b) in edges {
        rows[a][b] = -s;
        rows[b][a] = -s;
    }
    let suffix = if s < 0 { "(-1)" } else { "" };
    Ok(Lattice::from_rows(&rows)?.with_label(format!("{family}{n}{suffix}")))
}

/// Backtracking isometry search between definite lattices of rank at most
/// [`ISOMETRY_RANK_BUDGET`]. On success returns `W` (columns are the images of
/// the basis of `l1` in coordinates of `l2`) with `Wᵀ G₂ W = G₁`.
pub fn isometric_definite(l1: &Lattice, l2: &Lattice) -> Result<Option<IntMatrix>> {
    let n = l1.rank();
    if n > ISOMETRY_RANK_BUDGET || l2.rank() > ISOMETRY_RANK_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "isometry rank",
            size: n.max(l2.rank()) as u128,
            limit: ISOMETRY_RANK_BUDGET as u128,
        });
    }
    let s1 = l1.definiteness().ok_or(Error::NotDefinite)?;
    let s2 = l2.definiteness().ok_or(Error::NotDefinite)?;
    if n != l2.rank() || (n > 0 && s1 != s2) || l1.determinant() != l2.determinant() {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(IntMatrix::zeros(0, 0)));
    }
    let g1 = l1.gram.to_i64_rows().ok_or(Error::InvalidInput("Gram entries too large".into()))?;
    let bound = (0..n).map(|i| g1[i][i].unsigned_abs()).max().unwrap_or(0);
    let mut pool: Vec<(Vec<i64>, i64)> = Vec::new();
    for sv in l2.short_vectors(bound)? {
        let neg: Vec<i64> = sv.coords.iter().map(|x| -x).collect();
        pool.push((sv.coords, sv.norm));
        pool.push((neg, sv.norm));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    if search_images(l2, &g1, &pool, &mut chosen) {
        let mut w = IntMatrix::zeros(n, n);
        for (k, &idx) in chosen.iter().enumerate() {
            for i in 0..n {
                w.set(i, k, BigInt::from(pool[idx].0[i]));
            }
        }
        return Ok(Some(w));
    }
    Ok(None)
}

pub const ISOMETRY_RANK_BUDGET: usize = 6;

fn search_images(l2: &Lattice, g1: &[Vec<i64>], pool: &[(Vec<i64>, i64)], chosen: &mut Vec<usize>) -> bool {
    let k = chosen.len();
    let n = g1.len();
    if k == n {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| chosen.iter().map(|&c| pool[c].0[i]).collect()).collect();
        return exact::determinant(&IntMatrix::from_rows(&rows)).is_ok_and(|d| d.abs().is_one());
    }
    for (idx, (v, norm)) in pool.iter().enumerate() {
        if *norm != g1[k][k] {
            continue;
        }
        let fits = chosen.iter().enumerate().all(|(j, &c)| l2.pair(v, &pool[c].0) == BigInt::from(g1[k][j]));
        if fits {
            chosen.push(idx);
            if search_images(l2, g1, pool, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Rank, signature and discriminant form agree. For even lattices this is
/// equality of genera.
pub fn genus_equal(l1: &Lattice, l2: &Lattice) -> Result<bool> {
    for l in [l1, l2] {
        if !l.is_even() {
            return Err(Error::NotEven);
        }
        if l.is_degenerate() {
            return Err(Error::Degenerate);
        }
    }
    if l1.rank() != l2.rank() || l1.signature() != l2.signature() {
        return Ok(false);
    }
    let f1 = fqf::disc_form(l1)?;
    let f2 = fqf::disc_form(l2)?;
    Ok(f1.form.is_isomorphic(&f2.form)?.is_some())
}

/// Parses catalog-style shorthand with an explicit sign suffix: `A2-`, `E6+`,
/// `U`, `U(3)`, `<-30>`, with optional multiplicity `2E6-` and rescaling
/// `A2+(3)`. Terms are joined by commas.
pub fn parse_sum(expr: &str, lookup: &dyn Fn(&str) -> Option<Lattice>) -> Result<Lattice> {
    let mut parts = Vec::new();
    for raw in expr.split(',') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(Error::InvalidInput(format!("empty term in `{expr}`")));
        }
        let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
        let mult: usize = if digits.is_empty() { 1 } else { digits.parse().unwrap() };
        let body = &term[digits.len()..];
        let lattice = parse_term(body, lookup)?;
        for _ in 0..mult {
            parts.push(lattice.clone());
        }
    }
    if parts.len() == 1 {
        return Ok(parts.pop().unwrap());
    }
    Ok(Lattice::direct_sum(&parts))
}

fn parse_term(body: &str, lookup: &dyn Fn(&str) -> Option<Lattice>) -> Result<Lattice> {
    if let Some(l) = lookup(body) {
        return Ok(l);
    }
    // trailing "(k)" rescale, but not the rank-one form "<n>"
    if body.ends_with(')') && !body.starts_with('<') {
        if let Some(open) = body.rfind('(') {
            let factor: i64 =
                body[open + 1..body.len() - 1].parse().map_err(|_| Error::UnknownName(body.to_string()))?;
            return parse_term(&body[..open], lookup)?.rescale(factor);
        }
    }
    if body == "U" || body.starts_with('<') {
        return standard_lattice(body, Sign::Positive);
    }
    let (name, sign) = if let Some(n) = body.strip_suffix('-') {
        (n, Sign::Negative)
    } else if let Some(n) = body.strip_suffix('+') {
        (n, Sign::Positive)
    } else {
        return Err(Error::InvalidInput(format!("root lattice `{body}` needs an explicit sign suffix (+ or -)")));
    };
    standard_lattice(name, sign)
}

/// Integer coordinates when `v` is an integral combination of the columns of
/// the square nonsingular matrix `basis`.
pub fn integral_coordinates(basis_inverse: &[Vec<Rational>], v: &[i64]) -> Option<Vec<BigInt>> {
    basis_inverse
        .iter()
        .map(|row| {
            let s: Rational = row.iter().zip(v).map(|(a, &b)| a * Rational::from_integer(BigInt::from(b))).sum();
            s.is_integer().then(|| s.to_integer())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn std(name: &str, s: Sign) -> Lattice {
        standard_lattice(name, s).unwrap()
    }

    #[test]
    fn catalog_shapes() {
        assert_eq!(std("A2", Sign::Negative).gram(), &IntMatrix::from_rows(&[[-2, 1], [1, -2]]));
        assert_eq!(std("U", Sign::Negative).gram(), &IntMatrix::from_rows(&[[0, 1], [1, 0]]));
        assert_eq!(std("<-30>", Sign::Positive).gram(), &IntMatrix::from_rows(&[[-30]]));
        assert_eq!(std("A_4", Sign::Positive).determinant(), BigInt::from(5));
        assert_eq!(std("D5", Sign::Positive).determinant(), BigInt::from(4));
        assert_eq!(std("E6", Sign::Positive).determinant(), BigInt::from(3));
        assert_eq!(std("E7", Sign::Positive).determinant(), BigInt::from(2));
        assert_eq!(std("E8", Sign::Positive).determinant(), BigInt::from(1));
        assert!(matches!(standard_lattice("D3", Sign::Positive), Err(Error::UnknownName(_))));
        assert!(matches!(standard_lattice("F4", Sign::Positive), Err(Error::UnknownName(_))));
    }

    #[test]
    fn e8_signature_matches_leading_minors() {
        let e8 = std("E8", Sign::Positive);
        for k in 1..=8 {
            let rows: Vec<Vec<i64>> =
                (0..k).map(|i| (0..k).map(|j| e8.gram().get(i, j).to_i64().unwrap()).collect()).collect();
            assert!(exact::determinant(&IntMatrix::from_rows(&rows)).unwrap().is_positive());
        }
        assert_eq!(e8.signature(), (8, 0, 0));
    }

    #[test]
    fn sums_and_scalings() {
        let a2 = std("A2", Sign::Negative);
        let nine = Lattice::direct_sum(&vec![a2.clone(); 9]);
        assert_eq!(nine.rank(), 18);
        assert_eq!(nine.determinant(), BigInt::from(3).pow(9));
        let n0 = Lattice::direct_sum(&[
            std("U", Sign::Positive),
            std("E6", Sign::Negative),
            std("E6", Sign::Negative),
            std("A4", Sign::Negative),
            std("A1", Sign::Negative),
        ]);
        assert_eq!(n0.rank(), 19);
        // signature (1,18) forces a positive determinant
        assert_eq!(n0.determinant(), BigInt::from(90));
        let empty = Lattice::direct_sum(&[]);
        assert_eq!(
            empty.invariants(),
            Invariants { rank: 0, n_plus: 0, n_minus: 0, n_zero: 0, determinant: BigInt::one(), is_even: true }
        );
        let u3 = std("U", Sign::Positive).rescale(3).unwrap();
        assert_eq!(u3.gram(), &IntMatrix::from_rows(&[[0, 3], [3, 0]]));
        assert_eq!(std("A2", Sign::Positive).rescale(-1).unwrap().gram(), a2.gram());
        assert_eq!(u3.scale_down(3).unwrap().gram(), std("U", Sign::Positive).gram());
        assert!(matches!(u3.scale_down(2), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn rescale_scales_determinant() {
        for name in ["A2", "D4", "E6", "A3"] {
            let l = std(name, Sign::Positive);
            let r = l.rescale(-3).unwrap();
            assert_eq!(r.determinant(), l.determinant() * BigInt::from(-3).pow(l.rank() as u32));
        }
    }

    #[test]
    fn k3_lattice_invariants() {
        let u = std("U", Sign::Positive);
        let e8 = std("E8", Sign::Negative);
        let k3 = Lattice::direct_sum(&[u.clone(), u.clone(), u, e8.clone(), e8]);
        let inv = k3.invariants();
        assert_eq!((inv.rank, inv.n_plus, inv.n_minus), (22, 3, 19));
        assert_eq!(inv.determinant, BigInt::from(-1));
        assert!(inv.is_even);
    }

    #[test]
    fn dual_rescaling() {
        let a2 = std("A2", Sign::Positive);
        let d = a2.dual_rescaled(3).unwrap();
        assert!(isometric_definite(&a2, &d).unwrap().is_some());
        let u = std("U", Sign::Positive);
        assert_eq!(u.dual_rescaled(1).unwrap().gram(), u.gram());
        let u3 = u.rescale(3).unwrap();
        assert!(genus_equal(&u3.dual_rescaled(3).unwrap(), &u).unwrap());
        assert!(matches!(a2.dual_rescaled(1), Err(Error::NotIntegral(_))));
        // applying the duality twice returns to the start
        let n = Lattice::direct_sum(&[u3, std("A2", Sign::Negative)]);
        let back = n.dual_rescaled(3).unwrap().dual_rescaled(3).unwrap();
        assert!(genus_equal(&back, &n).unwrap());
    }

    #[test]
    fn isometry_checks() {
        let a2p = std("A2", Sign::Positive);
        let a2n = std("A2", Sign::Negative);
        let w = isometric_definite(&a2p, &a2p.dual_rescaled(3).unwrap()).unwrap().unwrap();
        let d = a2p.dual_rescaled(3).unwrap();
        assert_eq!(w.transpose().mul(d.gram()).unwrap().mul(&w).unwrap(), *a2p.gram());
        assert!(isometric_definite(&a2p, &a2n).unwrap().is_none());
        let two = Lattice::from_rows(&[[2, 0], [0, 2]]).unwrap();
        assert!(isometric_definite(&two, &a2p).unwrap().is_none());
        let e8 = std("E8", Sign::Positive);
        assert!(matches!(isometric_definite(&e8, &e8), Err(Error::BudgetExceeded { .. })));
        // D4 in a scrambled basis
        let d4 = std("D4", Sign::Positive);
        let t = IntMatrix::from_rows(&[[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, -1], [0, 0, 0, 1]]);
        let scrambled = Lattice::new(t.transpose().mul(d4.gram()).unwrap().mul(&t).unwrap()).unwrap();
        assert!(isometric_definite(&d4, &scrambled).unwrap().is_some());
        assert!(genus_equal(&d4, &scrambled).unwrap());
        let u = std("U", Sign::Positive);
        assert!(matches!(isometric_definite(&u, &u), Err(Error::NotDefinite)));
    }

    #[test]
    fn genus_comparisons() {
        let u = std("U", Sign::Positive);
        let u3 = u.rescale(3).unwrap();
        let a2 = std("A2", Sign::Positive);
        let n = Lattice::direct_sum(&[u3.clone(), a2.clone()]);
        let target = Lattice::direct_sum(&[u.clone(), a2.clone()]);
        assert!(genus_equal(&n.dual_rescaled(3).unwrap(), &target).unwrap());
        assert!(!genus_equal(&n, &target).unwrap());
        assert!(genus_equal(&n, &n).unwrap());
        let odd = Lattice::from_rows(&[[1]]).unwrap();
        assert!(matches!(genus_equal(&odd, &odd), Err(Error::NotEven)));
    }

    #[test]
    fn sum_expressions() {
        let none = |_: &str| None;
        let l = parse_sum("U,2E6-,A4-,A1-", &none).unwrap();
        assert_eq!(l.rank(), 19);
        assert_eq!(l.determinant(), BigInt::from(90));
        let u3 = parse_sum("U(3)", &none).unwrap();
        assert_eq!(u3.determinant(), BigInt::from(-9));
        assert_eq!(parse_sum("<-30>", &none).unwrap().determinant(), BigInt::from(-30));
        assert!(parse_sum("A2", &none).is_err());
        assert!(parse_sum("U,,U", &none).is_err());
    }
}
