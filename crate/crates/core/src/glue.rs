//! Overlattices from isotropic subgroups, gluing to unimodular lattices, and
//! length obstructions for primitive embeddings.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::codes;
use crate::error::{Error, Result};
use crate::exact::{self, rat, IntMatrix, Rational};
use crate::fqf::{self, FiniteQuadraticForm, Subgroup};
use crate::lattice::{standard_lattice, Lattice, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    None,
    LengthBound,
    FormMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueVerdict {
    pub feasible: bool,
    pub obstruction: Obstruction,
    pub details: Value,
}

impl GlueVerdict {
    fn feasible(details: Value) -> Self {
        GlueVerdict { feasible: true, obstruction: Obstruction::None, details }
    }

    fn blocked(obstruction: Obstruction, details: Value) -> Self {
        GlueVerdict { feasible: false, obstruction, details }
    }
}

/// An overlattice `L' ⊇ L` with its basis written in the coordinates of `L`.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    /// column `j` is the `j`-th basis vector of `L'` in `L`-coordinates
    pub basis: Vec<Vec<Rational>>,
    /// column `j` is the `j`-th basis vector of `L` in `L'`-coordinates
    pub old_in_new: IntMatrix,
    pub index: BigInt,
}

/// The lattice spanned by `L` and the rational vectors `lifts`. Fails with
/// `NonIntegralResult` when the result is not even and integral.
pub fn overlattice_from_lifts(l: &Lattice, lifts: &[Vec<Rational>]) -> Result<Overlattice> {
    let n = l.rank();
    let den = lifts.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut rows = vec![Vec::with_capacity(n + lifts.len()); n];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..n {
            row.push(if i == j { den.clone() } else { BigInt::zero() });
        }
        for lift in lifts {
            if lift.len() != n {
                return Err(Error::DimensionMismatch("lift length differs from rank".into()));
            }
            row.push((&lift[i] * Rational::from_integer(den.clone())).to_integer());
        }
    }
    let span = exact::column_span_basis(&IntMatrix::from_big_rows(rows)?);
    let den_r = Rational::from_integer(den.clone());
    let basis: Vec<Vec<Rational>> =
        (0..n).map(|j| (0..n).map(|i| Rational::from_integer(span.get(i, j).clone()) / &den_r).collect()).collect();
    let gram = exact::congruence(l.gram(), &basis);
    let gram = exact::rational_to_int(&gram).ok_or(Error::NonIntegralResult)?;
    let lattice = Lattice::new(gram)?;
    if !lattice.is_even() {
        return Err(Error::NonIntegralResult);
    }
    let det_span = exact::determinant(&span)?.abs();
    let index = (0..n).fold(BigInt::one(), |acc, _| acc * &den) / det_span;
    let inv = exact::rational_inverse(&span)?;
    let old_in_new =
        exact::rational_to_int(&inv.iter().map(|r| r.iter().map(|x| x * &den_r).collect()).collect::<Vec<_>>())
            .ok_or(Error::NonIntegralResult)?;
    Ok(Overlattice { lattice, basis, old_in_new, index })
}

/// Checks isotropy on generators; with `q(g_i) = 0` and `b(g_i, g_j) = 0`
/// every element of the span is isotropic.
fn check_isotropic(form: &FiniteQuadraticForm, h: &Subgroup) -> Result<()> {
    let gens = h.generators();
    for (i, g) in gens.iter().enumerate() {
        if !form.q_value(g)?.is_zero() {
            return Err(Error::NotIsotropic { element: g.clone() });
        }
        for g2 in &gens[i + 1..] {
            if !form.b_value(g, g2)?.is_zero() {
                return Err(Error::NotIsotropic { element: form.add(g, g2) });
            }
        }
    }
    Ok(())
}

/// `L_H`, the overlattice of `L` attached to an isotropic subgroup `H` of `A_L`.
pub fn overlattice(l: &Lattice, h: &Subgroup) -> Result<Overlattice> {
    let disc = fqf::disc_form(l)?;
    check_isotropic(&disc.form, h)?;
    let lifts: Vec<Vec<Rational>> = h.generators().iter().map(|g| disc.lift(g)).collect();
    let out = overlattice_from_lifts(l, &lifts)?;
    let expected = disc.form.restrict(h)?.order();
    if out.index != expected {
        return Err(Error::NonIntegralResult);
    }
    Ok(out)
}

/// Decides whether `L1 ⊕ L2` has an even unimodular overlattice in which both
/// summands are primitive, i.e. whether `q_{L1} ≅ -q_{L2}`.
pub fn glues_to_unimodular(l1: &Lattice, l2: &Lattice) -> Result<GlueVerdict> {
    let d1 = fqf::disc_form(l1)?;
    let d2 = fqf::disc_form(l2)?;
    let Some(iso) = d1.form.is_isomorphic(&d2.form.negate())? else {
        return Ok(GlueVerdict::blocked(
            Obstruction::FormMismatch,
            json!({
                "reason": "q_L1 is not isomorphic to -q_L2",
                "q1": d1.form.to_json(),
                "minus_q2": d2.form.negate().to_json(),
            }),
        ));
    };
    let sum = Lattice::direct_sum(&[l1.clone(), l2.clone()]);
    let lifts: Vec<Vec<Rational>> = iso
        .pairs
        .iter()
        .map(|(x, y)| {
            let mut v = d1.lift(x);
            v.extend(d2.lift(y));
            v
        })
        .collect();
    let glued = overlattice_from_lifts(&sum, &lifts)?;
    let det = glued.lattice.determinant();
    if det.abs() != BigInt::one() {
        return Err(Error::NonIntegralResult);
    }
    let (p, _, m) = glued.lattice.signature();
    Ok(GlueVerdict::feasible(json!({
        "glued_signature": [p, m],
        "glued_determinant": det.to_string(),
        "witness": iso.pairs,
    })))
}

/// An ambient lattice described by invariants only.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientSpec {
    pub rank: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub form: FiniteQuadraticForm,
    pub label: String,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn legendre(a: u64, p: u64) -> i32 {
    let mut r: u128 = 1;
    let (mut b, mut e, m) = (a as u128 % p as u128, (p - 1) / 2, p as u128);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Hyperbolic plane over `F_p`: `q = 0` on both generators, `b = 1/p`.
fn split_plane(p: u64) -> FiniteQuadraticForm {
    FiniteQuadraticForm::new(
        vec![p, p],
        vec![rat(0, 1), rat(0, 1)],
        vec![vec![rat(0, 1), rat(1, p as i64)], vec![rat(1, p as i64), rat(0, 1)]],
    )
    .expect("valid plane")
}

/// Anisotropic plane over `F_p`: `q = diag(2/p, 2u/p)` with `-u` a non-square.
fn anisotropic_plane(p: u64) -> FiniteQuadraticForm {
    let u = (1..p).find(|&u| legendre(p - u, p) == -1).expect("non-square exists");
    let (pi, ui) = (p as i64, u as i64);
    FiniteQuadraticForm::new(
        vec![p, p],
        vec![rat(2, pi), rat(2 * ui, pi)],
        vec![vec![rat(2, pi), rat(0, 1)], vec![rat(0, 1), rat(2 * ui, pi)]],
    )
    .expect("valid plane")
}

impl AmbientSpec {
    /// The K3 lattice `U³ ⊕ E8(-1)²`.
    pub fn k3() -> Self {
        AmbientSpec { rank: 22, n_plus: 3, n_minus: 19, form: FiniteQuadraticForm::trivial(), label: "K3".into() }
    }

    /// Invariants of the Néron–Severi lattice of a supersingular K3 surface:
    /// rank 22, signature (1, 21), discriminant group `F_p^{2σ}`. The form is
    /// `(σ-1)` split planes plus one anisotropic plane, which is the choice
    /// compatible with the signature.
    pub fn supersingular(p: u64, sigma: u32) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(Error::BadCharacteristic(p));
        }
        if !(1..=10).contains(&sigma) {
            return Err(Error::InvalidInput(format!("Artin invariant {sigma} outside 1..=10")));
        }
        let mut form = anisotropic_plane(p);
        for _ in 1..sigma {
            form = form.orthogonal_sum(&split_plane(p));
        }
        Ok(AmbientSpec { rank: 22, n_plus: 1, n_minus: 21, form, label: format!("Lambda_{{{p},{sigma}}}") })
    }

    /// Parses `k3` or `ss:P:SIGMA`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["k3"] | ["K3"] => Ok(Self::k3()),
            ["ss", p, sigma] => {
                let p = p.parse().map_err(|_| Error::InvalidInput(format!("bad prime `{p}`")))?;
                let sigma = sigma.parse().map_err(|_| Error::InvalidInput(format!("bad sigma `{sigma}`")))?;
                Self::supersingular(p, sigma)
            }
            _ => Err(Error::InvalidInput(format!("ambient `{s}`; expected `k3` or `ss:P:SIGMA`"))),
        }
    }
}

fn order_u128(f: &FiniteQuadraticForm) -> u128 {
    f.orders().iter().map(|&d| d as u128).product()
}

fn prime_factors(mut n: u128) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n % d == 0 {
            ps.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        ps.push(n as u64);
    }
    ps
}

/// Necessary conditions for a primitive embedding `L ⊂ Λ` with
/// `gcd(|A_L|, |A_Λ|) = 1`. Then `A_{L^⊥} ≅ A_L ⊕ A_Λ` as groups, so each
/// `p`-length of that sum is bounded by `rank Λ - rank L`.
pub fn embedding_obstruction(l: &Lattice, ambient: &AmbientSpec) -> Result<GlueVerdict> {
    let disc = fqf::disc_form(l)?;
    let (a, b) = (order_u128(&disc.form), order_u128(&ambient.form));
    let g = a.gcd(&b);
    if g != 1 {
        return Err(Error::NotCoprime { gcd: g });
    }
    let (lp, _, lm) = l.signature();
    if lp > ambient.n_plus || lm > ambient.n_minus {
        return Err(Error::IncompatibleSignature(format!(
            "({lp}, {lm}) does not fit in ({}, {})",
            ambient.n_plus, ambient.n_minus
        )));
    }
    let complement_rank = ambient.rank - l.rank();
    let mut lengths = Vec::new();
    for p in prime_factors(a * b) {
        let len = disc.form.p_length(p) + ambient.form.p_length(p);
        lengths.push(json!({ "p": p, "length": len }));
        if len > complement_rank {
            return Ok(GlueVerdict::blocked(
                Obstruction::LengthBound,
                json!({
                    "ambient": ambient.label,
                    "prime": p,
                    "length": len,
                    "complement_rank": complement_rank,
                }),
            ));
        }
    }
    Ok(GlueVerdict::feasible(json!({
        "ambient": ambient.label,
        "complement_rank": complement_rank,
        "complement_signature": [ambient.n_plus - lp, ambient.n_minus - lm],
        "lengths": lengths,
    })))
}

/// The rank-4 lattice `U(3) ⊕ A2` in the sign of a hyperbolic complement.
pub fn n_lattice() -> Lattice {
    let u3 = standard_lattice("U", Sign::Positive).and_then(|u| u.rescale(3)).expect("catalog");
    let a2 = standard_lattice("A2", Sign::Negative).expect("catalog");
    Lattice::direct_sum(&[u3, a2]).with_label("U(3)+A2(-)")
}

struct Reference {
    l: Lattice,
    q_l: FiniteQuadraticForm,
    q_n: FiniteQuadraticForm,
}

fn reference() -> Result<&'static Reference> {
    static CELL: OnceLock<Reference> = OnceLock::new();
    if let Some(r) = CELL.get() {
        return Ok(r);
    }
    let l = codes::reference_lattice()?.lattice;
    let q_l = fqf::disc_form(&l)?.form;
    let q_n = fqf::disc_form(&n_lattice())?.form;
    Ok(CELL.get_or_init(|| Reference { l, q_l, q_n }))
}

/// Decides whether the nine-cusp lattice `L` can sit in the Néron–Severi
/// lattice of a supersingular K3 surface of Artin invariant `sigma` in
/// characteristic `p`.
pub fn theorem2_pipeline(p: u64, sigma: u32) -> Result<GlueVerdict> {
    if p == 3 || p == 2 {
        return Err(Error::BadCharacteristic(p));
    }
    let ambient = AmbientSpec::supersingular(p, sigma)?;
    let r = reference()?;
    let bound = embedding_obstruction(&r.l, &ambient)?;
    if !bound.feasible || sigma != 2 {
        return Ok(bound);
    }
    // sigma = 2: L^⊥ has p-length 4 = rank, so L^⊥ = N(p); compare q_L with -p q_N
    let q_l = &r.q_l;
    let target = r.q_n.scaled(p as i64).negate();
    let witness = q_l.is_isomorphic(&target)?;
    let details = json!({
        "ambient": ambient.label,
        "p_mod_3": p % 3,
        "q_L": q_l.to_json(),
        "minus_p_q_N": target.to_json(),
        "witness": witness.as_ref().map(|w| w.pairs.clone()),
    });
    Ok(match witness {
        Some(_) => GlueVerdict::feasible(details),
        None => GlueVerdict::blocked(Obstruction::FormMismatch, details),
    })
}

/// Rescaling a lattice by `p` multiplies its discriminant form by `p` on the
/// part prime to `p`. Compares the two prime by prime.
pub fn scaled_form_relation(n: &Lattice, p: u64) -> Result<bool> {
    let big = fqf::disc_form(&n.rescale(p as i64)?)?.form;
    let small = fqf::disc_form(n)?.form.scaled(p as i64);
    for l in prime_factors(order_u128(&small)) {
        if l == p {
            return Err(Error::NotCoprime { gcd: p as u128 });
        }
        if big.p_part(l).0.is_isomorphic(&small.p_part(l).0)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{genus_equal, parse_sum};

    fn lat(expr: &str) -> Lattice {
        parse_sum(expr, &|_| None).unwrap()
    }

    #[test]
    fn u3_glued_along_isotropic_line_is_u() {
        let u3 = lat("U(3)");
        let disc = fqf::disc_form(&u3).unwrap();
        for h in disc.form.isotropic_subgroups(Some(3)).unwrap() {
            let o = overlattice(&u3, &h).unwrap();
            assert_eq!(o.lattice.determinant(), BigInt::from(-1));
            assert!(o.lattice.is_even());
            assert!(genus_equal(&o.lattice, &lat("U")).unwrap());
            assert_eq!(o.index, BigInt::from(3));
        }
    }

    #[test]
    fn trivial_subgroup_changes_nothing() {
        let l = lat("A2-,D5-");
        let o = overlattice(&l, &Subgroup::trivial()).unwrap();
        assert_eq!(o.lattice.gram(), l.gram());
        assert_eq!(o.index, BigInt::one());
    }

    #[test]
    fn non_isotropic_subgroup_rejected() {
        let a2 = lat("A2-");
        let f = fqf::disc_form(&a2).unwrap().form;
        let h = Subgroup::new(&f, vec![vec![1]]).unwrap();
        assert_eq!(overlattice(&a2, &h).unwrap_err(), Error::NotIsotropic { element: vec![1] });
    }

    #[test]
    fn old_basis_in_new_coordinates() {
        let u3 = lat("U(3)");
        let f = fqf::disc_form(&u3).unwrap().form;
        let h = &f.isotropic_subgroups(Some(3)).unwrap()[0];
        let o = overlattice(&u3, h).unwrap();
        // B · old_in_new = I
        for i in 0..2 {
            for j in 0..2 {
                let v: Rational =
                    (0..2).map(|k| &o.basis[k][i] * Rational::from_integer(o.old_in_new.get(k, j).clone())).sum();
                assert_eq!(v, rat(i64::from(i == j), 1));
            }
        }
    }

    #[test]
    fn gluing_to_unimodular() {
        let v = glues_to_unimodular(&lat("A2+"), &lat("A2-")).unwrap();
        assert!(v.feasible);
        assert_eq!(v.details["glued_signature"], json!([2, 2]));
        let n = lat("U(3),A2+");
        let v = glues_to_unimodular(&n, &n).unwrap();
        assert_eq!(v.obstruction, Obstruction::FormMismatch);
        assert!(glues_to_unimodular(&lat("U"), &lat("U")).unwrap().feasible);
        let v = glues_to_unimodular(&lat("E6-"), &lat("E6+")).unwrap();
        assert_eq!(v.details["glued_signature"], json!([6, 6]));
    }

    #[test]
    fn supersingular_forms() {
        for p in [5u64, 7, 11, 13] {
            for sigma in 1..=3 {
                let a = AmbientSpec::supersingular(p, sigma).unwrap();
                assert_eq!(a.form.p_length(p), 2 * sigma as usize);
                assert_eq!(a.form.orders().len(), 2 * sigma as usize);
            }
            // the anisotropic plane has no nonzero isotropic vectors
            assert_eq!(anisotropic_plane(p).nonzero_isotropic_count().unwrap(), 0);
            assert_eq!(split_plane(p).nonzero_isotropic_count().unwrap(), 2 * (p - 1));
        }
        assert!(matches!(AmbientSpec::supersingular(9, 1), Err(Error::BadCharacteristic(9))));
        assert!(AmbientSpec::parse("ss:5:2").is_ok());
        assert!(AmbientSpec::parse("k3").is_ok());
        assert!(AmbientSpec::parse("ss:5").is_err());
    }

    #[test]
    fn length_bound_for_n0() {
        let n0 = lat("U,2E6-,A4-,A1-");
        for p in [7u64, 13] {
            let v = embedding_obstruction(&n0, &AmbientSpec::supersingular(p, 2).unwrap()).unwrap();
            assert_eq!(v.obstruction, Obstruction::LengthBound);
            assert_eq!(v.details["length"], json!(4));
        }
        let err = embedding_obstruction(&n0, &AmbientSpec::supersingular(5, 2).unwrap()).unwrap_err();
        assert_eq!(err, Error::NotCoprime { gcd: 5 });
    }

    #[test]
    fn pipeline_by_residue() {
        assert!(theorem2_pipeline(5, 2).unwrap().feasible);
        assert_eq!(theorem2_pipeline(7, 2).unwrap().obstruction, Obstruction::FormMismatch);
        assert_eq!(theorem2_pipeline(5, 4).unwrap().obstruction, Obstruction::LengthBound);
        assert!(theorem2_pipeline(11, 1).unwrap().feasible);
        assert_eq!(theorem2_pipeline(3, 2).unwrap_err(), Error::BadCharacteristic(3));
    }

    #[test]
    fn scaling_multiplies_the_form() {
        for p in [5u64, 7, 11] {
            assert!(scaled_form_relation(&n_lattice(), p).unwrap());
        }
    }
}
