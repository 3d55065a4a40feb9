//! Traces of order-3 automorphisms over the Eisenstein integers, and the
//! endomorphism-algebra table of simple abelian surfaces.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat, Rational};

/// `a + bω` with `ω² + ω + 1 = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Eisenstein {
    pub a: i64,
    pub b: i64,
}

impl Eisenstein {
    pub const ONE: Eisenstein = Eisenstein { a: 1, b: 0 };
    pub const OMEGA: Eisenstein = Eisenstein { a: 0, b: 1 };
    pub const OMEGA2: Eisenstein = Eisenstein { a: -1, b: -1 };

    pub fn new(a: i64, b: i64) -> Self {
        Eisenstein { a, b }
    }

    pub fn is_rational(self) -> bool {
        self.b == 0
    }

    pub fn conj(self) -> Self {
        // ω ↦ ω² = -1 - ω
        Eisenstein { a: self.a - self.b, b: -self.b }
    }

    pub fn norm(self) -> i64 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }

    pub fn pow(self, mut e: u32) -> Self {
        let (mut base, mut acc) = (self, Eisenstein::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Eisenstein {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Eisenstein { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for Eisenstein {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Eisenstein { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for Eisenstein {
    type Output = Self;
    fn neg(self) -> Self {
        Eisenstein { a: -self.a, b: -self.b }
    }
}

impl Mul for Eisenstein {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Eisenstein { a: self.a * o.a - self.b * o.b, b: self.a * o.b + self.b * o.a - self.b * o.b }
    }
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}w"),
            (a, b) if b < 0 => write!(f, "{a} - {}w", -b),
            (a, b) => write!(f, "{a} + {b}w"),
        }
    }
}

/// Multiplicities of the eigenvalues `1, ω, ω²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct EigenvalueMultiset {
    pub counts: [usize; 3],
}

impl EigenvalueMultiset {
    pub fn new(ones: usize, omegas: usize, omega2s: usize) -> Self {
        EigenvalueMultiset { counts: [ones, omegas, omega2s] }
    }

    /// Parses a comma list of `1`, `w`, `w2` (also `ω`, `ω²`).
    pub fn parse(s: &str) -> Result<Self> {
        let mut counts = [0usize; 3];
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let k = match tok {
                "1" => 0,
                "w" | "ω" | "w1" => 1,
                "w2" | "ω²" | "ω2" | "w^2" => 2,
                _ => return Err(Error::InvalidInput(format!("eigenvalue `{tok}`; expected 1, w or w2"))),
            };
            counts[k] += 1;
        }
        Ok(EigenvalueMultiset { counts })
    }

    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Exponents `k` of `ω^k`, sorted.
    pub fn exponents(&self) -> Vec<u32> {
        (0..3u32).flat_map(|k| std::iter::repeat_n(k, self.counts[k as usize])).collect()
    }

    pub fn trace(&self) -> Eisenstein {
        (0..3u32).fold(Eisenstein::default(), |acc, k| {
            acc + Eisenstein::new(self.counts[k as usize] as i64, 0) * Eisenstein::OMEGA.pow(k)
        })
    }

    /// Product of all eigenvalues.
    pub fn determinant(&self) -> Eisenstein {
        Eisenstein::OMEGA.pow(((self.counts[1] + 2 * self.counts[2]) % 3) as u32)
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.exponents().into_iter().map(|k| ["1", "w", "w2"][k as usize]).collect()
    }
}

fn require_size(e: &EigenvalueMultiset, n: usize) -> Result<()> {
    if e.size() != n {
        return Err(Error::WrongSize { expected: n, got: e.size() });
    }
    Ok(())
}

/// Eigenvalues on `Λ²` of a four-dimensional representation.
pub fn exterior_square(eigs: &EigenvalueMultiset) -> Result<EigenvalueMultiset> {
    require_size(eigs, 4)?;
    let ex = eigs.exponents();
    let mut counts = [0usize; 3];
    for i in 0..ex.len() {
        for j in i + 1..ex.len() {
            counts[((ex[i] + ex[j]) % 3) as usize] += 1;
        }
    }
    Ok(EigenvalueMultiset { counts })
}

/// `Σ (-1)^i tr(σ* | H^i)` for an abelian surface, with `H² = Λ²H¹`, `H³`
/// carrying the eigenvalues of `H¹`, and trivial action on `H⁰` and `H⁴`.
pub fn lefschetz_number(h1: &EigenvalueMultiset) -> Result<i64> {
    require_size(h1, 4)?;
    let t1 = h1.trace();
    let t2 = exterior_square(h1)?.trace();
    let total = Eisenstein::ONE - t1 + t2 - t1 + Eisenstein::ONE;
    if !total.is_rational() {
        return Err(Error::NonRationalTrace(total.to_string()));
    }
    Ok(total.a)
}

pub fn invariant_dimension(eigs: &EigenvalueMultiset) -> usize {
    eigs.counts[0]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndoTypeRow {
    #[serde(rename = "type")]
    pub label: &'static str,
    pub e: u32,
    pub e0: u32,
    pub d: u32,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub eta: Rational,
    #[serde(rename = "dimD")]
    pub dim_d: u32,
    pub rho: u32,
    /// side condition in positive characteristic, kept as text
    pub char_p: &'static str,
    pub admissible: bool,
    pub reason: Option<String>,
}

/// `(label, e, e0, d, η numerator, η denominator, characteristic-p condition)`.
const TABLE: [(&str, u32, u32, u32, i64, i64, &str); 8] = [
    ("I-i", 1, 1, 1, 1, 1, "e | 2"),
    ("I-ii", 2, 2, 1, 1, 1, "e | 2"),
    ("II", 1, 1, 2, 3, 4, "2e | 2"),
    ("III-i", 1, 1, 2, 1, 4, "e | 2"),
    ("III-ii", 2, 2, 2, 1, 4, "e | 2"),
    ("IV-i", 2, 1, 1, 1, 2, "e0 d | 2"),
    ("IV-ii", 2, 1, 2, 1, 2, "e0 d | 2"),
    ("IV-iii", 4, 2, 1, 1, 2, "e0 d | 2"),
];

/// The endomorphism-algebra types of a simple abelian surface, each marked
/// admissible or not for the given `p`-rank.
///
/// `End(A) ⊗ Q_p` embeds in `End(T_p A ⊗ Q_p)`, of dimension `p_rank²`. A
/// commutative `D` of that full dimension would have to equal the
/// non-commutative matrix algebra, which excludes it too.
pub fn mumford_filter(p_rank: u32) -> Result<Vec<EndoTypeRow>> {
    if !(1..=2).contains(&p_rank) {
        return Err(Error::BadPRank(p_rank));
    }
    let bound = p_rank * p_rank;
    Ok(TABLE
        .iter()
        .map(|&(label, e, e0, d, en, ed, char_p)| {
            let dim_d = e * d * d;
            let eta = rat(en, ed);
            let rho_r = &eta * rat(dim_d as i64, 1);
            assert!(rho_r.is_integer(), "rho is integral for every row");
            let rho = u32::try_from(rho_r.to_integer()).expect("small");
            let reason = if dim_d > bound {
                Some(format!("dim D = {dim_d} exceeds dim End(T_p) = {bound}"))
            } else if d == 1 && dim_d == bound && p_rank >= 2 {
                Some(format!("D is commutative of dimension {dim_d} = dim End(T_p), which is not commutative"))
            } else {
                None
            };
            EndoTypeRow { label, e, e0, d, eta, dim_d, rho, char_p, admissible: reason.is_none(), reason }
        })
        .collect())
}

pub fn max_admissible_rho(rows: &[EndoTypeRow]) -> Option<u32> {
    rows.iter().filter(|r| r.admissible).map(|r| r.rho).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eigs(s: &str) -> EigenvalueMultiset {
        EigenvalueMultiset::parse(s).unwrap()
    }

    #[test]
    fn omega_arithmetic() {
        let w = Eisenstein::OMEGA;
        assert_eq!(w * w, Eisenstein::OMEGA2);
        assert_eq!(w * w * w, Eisenstein::ONE);
        assert_eq!(Eisenstein::ONE + w + w * w, Eisenstein::default());
        assert_eq!(w.conj(), Eisenstein::OMEGA2);
        assert_eq!(Eisenstein::new(2, 1).norm(), 3);
    }

    #[test]
    fn exterior_squares() {
        assert_eq!(exterior_square(&eigs("w,w,w2,w2")).unwrap(), eigs("1,1,1,1,w,w2"));
        assert_eq!(exterior_square(&eigs("1,1,1,1")).unwrap(), eigs("1,1,1,1,1,1"));
        assert_eq!(exterior_square(&eigs("1,1,w,w2")).unwrap(), eigs("1,1,w,w,w2,w2"));
        assert_eq!(exterior_square(&eigs("1,w")).unwrap_err(), Error::WrongSize { expected: 4, got: 2 });
    }

    #[test]
    fn lefschetz_numbers() {
        assert_eq!(lefschetz_number(&eigs("w,w,w2,w2")).unwrap(), 9);
        assert_eq!(lefschetz_number(&eigs("1,1,1,1")).unwrap(), 0);
        assert_eq!(lefschetz_number(&eigs("1,1,w,w2")).unwrap(), 0);
        assert!(matches!(lefschetz_number(&eigs("w,w,w,w")), Err(Error::NonRationalTrace(_))));
    }

    #[test]
    fn invariant_dimensions() {
        assert_eq!(invariant_dimension(&exterior_square(&eigs("w,w,w2,w2")).unwrap()), 4);
        assert_eq!(invariant_dimension(&eigs("1,1,w,w2")), 2);
        assert_eq!(invariant_dimension(&eigs("w,w,w2,w2")), 0);
    }

    #[test]
    fn ordinary_table() {
        let rows = mumford_filter(2).unwrap();
        let rho: Vec<u32> = rows.iter().map(|r| r.rho).collect();
        assert_eq!(rho, vec![1, 2, 3, 1, 2, 1, 4, 2]);
        let excluded: Vec<&str> = rows.iter().filter(|r| !r.admissible).map(|r| r.label).collect();
        assert_eq!(excluded, vec!["III-ii", "IV-ii", "IV-iii"]);
        assert_eq!(max_admissible_rho(&rows), Some(3));
        assert!(rows.iter().all(|r| r.dim_d == r.e * r.d * r.d));
    }

    #[test]
    fn p_rank_one_keeps_only_dimension_one() {
        let rows = mumford_filter(1).unwrap();
        assert!(rows.iter().all(|r| r.admissible == (r.dim_d == 1)));
        assert_eq!(mumford_filter(0).unwrap_err(), Error::BadPRank(0));
        assert_eq!(mumford_filter(3).unwrap_err(), Error::BadPRank(3));
    }

    #[test]
    fn parse_rejects_junk() {
        assert!(EigenvalueMultiset::parse("1,x").is_err());
        assert_eq!(eigs("ω,ω²").counts, [0, 1, 1]);
    }

    fn conjugation_stable() -> impl Strategy<Value = EigenvalueMultiset> {
        (0usize..=2).prop_map(|k| EigenvalueMultiset::new(4 - 2 * k, k, k))
    }

    fn any_four() -> impl Strategy<Value = EigenvalueMultiset> {
        (0usize..=4, 0usize..=4)
            .prop_filter_map("size 4", |(a, b)| (a + b <= 4).then(|| EigenvalueMultiset::new(a, b, 4 - a - b)))
    }

    proptest! {
        #[test]
        fn stable_inputs_give_integers(e in conjugation_stable()) {
            prop_assert!(lefschetz_number(&e).is_ok());
        }

        #[test]
        fn exterior_square_cubes_the_determinant(e in any_four()) {
            let d = e.determinant();
            prop_assert_eq!(exterior_square(&e).unwrap().determinant(), d * d * d);
            prop_assert_eq!(exterior_square(&e).unwrap().size(), 6);
        }
    }
}
