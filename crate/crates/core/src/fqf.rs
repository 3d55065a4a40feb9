//! Finite quadratic forms (discriminant forms).
//!
//! A form is stored on generators `g_1, ..., g_k` of orders `d_1 | ... | d_k`.
//! With `E = d_k` the exponent, every value is an integer numerator over `E`:
//! `q(g_i) = q_num[i] / E mod 2` and `b(g_i, g_j) = b_num[i][j] / E mod 1`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{self, format_rational, IntMatrix, Rational};
use crate::lattice::Lattice;

/// Largest group order on which elements are enumerated.
pub const ELEMENT_BUDGET: u64 = 59_049; // 3^10

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    exponent: u64,
    q_num: Vec<u64>,
    b_num: Vec<Vec<u64>>,
}

/// Subgroup given by generators in the ambient generator coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    generators: Vec<Vec<u64>>,
}

/// Witness of an isometry: images of a generating set of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    pub pairs: Vec<(Vec<u64>, Vec<u64>)>,
}

fn lcm_all(xs: &[u64]) -> u64 {
    xs.iter().fold(1u64, |a, &b| a.lcm(&b))
}

fn rational_to_num(r: &Rational, exponent: u64, modulus: u64, what: &str) -> Result<u64> {
    let scaled = r * Rational::from_integer(BigInt::from(exponent));
    if !scaled.is_integer() {
        return Err(Error::InvalidInput(format!(
            "{what} value {} has denominator not dividing {exponent}",
            format_rational(r)
        )));
    }
    let m = BigInt::from(modulus);
    Ok(scaled.to_integer().mod_floor(&m).to_u64().expect("reduced below modulus"))
}

impl FiniteQuadraticForm {
    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], exponent: 1, q_num: vec![], b_num: vec![] }
    }

    /// Builds and validates a form. Orders must form a divisor chain of
    /// integers > 1, `q` is read mod 2 and `b` mod 1. Degenerate forms are
    /// rejected when the group is small enough to check.
    pub fn new(orders: Vec<u64>, q: Vec<Rational>, b: Vec<Vec<Rational>>) -> Result<Self> {
        let k = orders.len();
        if q.len() != k || b.len() != k || b.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("form data does not match generator count".into()));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::InvalidInput("generator orders must exceed 1".into()));
        }
        if orders.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidInput("generator orders must form a divisor chain".into()));
        }
        let exponent = lcm_all(&orders);
        let q_num = q.iter().map(|r| rational_to_num(r, exponent, 2 * exponent, "q")).collect::<Result<Vec<_>>>()?;
        let b_num = b
            .iter()
            .map(|row| row.iter().map(|r| rational_to_num(r, exponent, exponent, "b")).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let form = FiniteQuadraticForm { orders, exponent, q_num, b_num };
        form.validate()?;
        Ok(form)
    }

    fn validate(&self) -> Result<()> {
        let e = self.exponent;
        for i in 0..self.rank() {
            let d = self.orders[i];
            if self.q_num[i] % e != self.b_num[i][i] {
                return Err(Error::InvalidInput(format!("q and b disagree on generator {i}")));
            }
            if (d as u128 * d as u128 * self.q_num[i] as u128) % (2 * e as u128) != 0 {
                return Err(Error::InvalidInput(format!("q(d g) != 0 for generator {i}")));
            }
            for j in 0..self.rank() {
                if self.b_num[i][j] != self.b_num[j][i] {
                    return Err(Error::InvalidInput("b is not symmetric".into()));
                }
                if (d as u128 * self.b_num[i][j] as u128) % e as u128 != 0 {
                    return Err(Error::InvalidInput(format!("d_{i} b(g_{i}, g_{j}) != 0")));
                }
            }
        }
        if self.order_u128() <= ELEMENT_BUDGET as u128 {
            for x in self.elements().skip(1) {
                if (0..self.rank()).all(|j| self.b_num_of_gen(&x, j) == 0) {
                    return Err(Error::Degenerate);
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    fn order_u128(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    pub fn order(&self) -> BigInt {
        self.orders.iter().map(|&d| BigInt::from(d)).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn q_generator(&self, i: usize) -> Rational {
        Rational::new(BigInt::from(self.q_num[i]), BigInt::from(self.exponent))
    }

    pub fn b_generator(&self, i: usize, j: usize) -> Rational {
        Rational::new(BigInt::from(self.b_num[i][j]), BigInt::from(self.exponent))
    }

    fn check_element(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.rank() || x.iter().zip(&self.orders).any(|(&c, &d)| c >= d) {
            return Err(Error::NotASubgroup(format!("{x:?} is not a reduced element")));
        }
        Ok(())
    }

    /// Numerator of `q(x)` over the exponent, mod `2E`.
    pub(crate) fn q_num_of(&self, x: &[u64]) -> u64 {
        let m = 2 * self.exponent as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as u128;
            acc = (acc + xi * xi % m * self.q_num[i] as u128) % m;
            for j in i + 1..self.rank() {
                if x[j] != 0 {
                    acc = (acc + 2 * (xi * x[j] as u128 % m) * self.b_num[i][j] as u128) % m;
                }
            }
        }
        acc as u64
    }

    fn b_num_of_gen(&self, x: &[u64], j: usize) -> u64 {
        let m = self.exponent as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            acc = (acc + x[i] as u128 * self.b_num[i][j] as u128) % m;
        }
        acc as u64
    }

    pub(crate) fn b_num_of(&self, x: &[u64], y: &[u64]) -> u64 {
        let m = self.exponent as u128;
        let mut acc: u128 = 0;
        for j in 0..self.rank() {
            if y[j] != 0 {
                acc = (acc + self.b_num_of_gen(x, j) as u128 * y[j] as u128) % m;
            }
        }
        acc as u64
    }

    pub fn q_value(&self, x: &[u64]) -> Result<Rational> {
        self.check_element(x)?;
        Ok(Rational::new(BigInt::from(self.q_num_of(x)), BigInt::from(self.exponent)))
    }

    pub fn b_value(&self, x: &[u64], y: &[u64]) -> Result<Rational> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(Rational::new(BigInt::from(self.b_num_of(x, y)), BigInt::from(self.exponent)))
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(&self.orders).map(|((&a, &b), &d)| (a + b) % d).collect()
    }

    pub fn mul(&self, x: &[u64], k: u64) -> Vec<u64> {
        x.iter().zip(&self.orders).map(|(&a, &d)| ((a as u128 * k as u128) % d as u128) as u64).collect()
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.orders).fold(1, |acc, (&c, &d)| acc.lcm(&(d / c.gcd(&d))))
    }

    fn index_of(&self, x: &[u64]) -> usize {
        let mut idx = 0usize;
        for i in (0..self.rank()).rev() {
            idx = idx * self.orders[i] as usize + x[i] as usize;
        }
        idx
    }

    fn element_at(&self, mut idx: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&d| {
                let c = (idx % d as usize) as u64;
                idx /= d as usize;
                c
            })
            .collect()
    }

    /// All elements, in mixed-radix order (first coordinate fastest). Callers
    /// are responsible for checking [`ELEMENT_BUDGET`].
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let n = self.order_u128() as usize;
        (0..n).map(move |i| self.element_at(i))
    }

    fn require_budget(&self, what: &'static str) -> Result<()> {
        let size = self.order_u128();
        if size > ELEMENT_BUDGET as u128 {
            return Err(Error::BudgetExceeded { what, size, limit: ELEMENT_BUDGET as u128 });
        }
        Ok(())
    }

    pub fn negate(&self) -> Self {
        self.scaled(-1)
    }

    /// `m · q`, i.e. every value multiplied by `m`.
    pub fn scaled(&self, m: i64) -> Self {
        let e = self.exponent as i128;
        let q_num = self.q_num.iter().map(|&q| ((q as i128 * m as i128).rem_euclid(2 * e)) as u64).collect();
        let b_num = self
            .b_num
            .iter()
            .map(|r| r.iter().map(|&b| ((b as i128 * m as i128).rem_euclid(e)) as u64).collect())
            .collect();
        FiniteQuadraticForm { orders: self.orders.clone(), exponent: self.exponent, q_num, b_num }
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        let k1 = self.rank();
        let k = k1 + other.rank();
        let exponent = self.exponent.lcm(&other.exponent);
        let (f1, f2) = (exponent / self.exponent, exponent / other.exponent);
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut q_num: Vec<u64> = self.q_num.iter().map(|&q| q * f1).collect();
        q_num.extend(other.q_num.iter().map(|&q| q * f2));
        let mut b_num = vec![vec![0u64; k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                b_num[i][j] = self.b_num[i][j] * f1;
            }
        }
        for i in 0..other.rank() {
            for j in 0..other.rank() {
                b_num[k1 + i][k1 + j] = other.b_num[i][j] * f2;
            }
        }
        let raw = FiniteQuadraticForm { orders, exponent, q_num, b_num };
        if raw.orders.windows(2).all(|w| w[1] % w[0] == 0) {
            return raw;
        }
        // re-normalize to a divisor chain
        let all: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
        raw.restrict_unchecked(&all).0
    }

    /// Number of generators of the `p`-primary part.
    pub fn p_length(&self, p: u64) -> usize {
        self.orders.iter().filter(|&&d| d % p == 0).count()
    }

    /// The `p`-primary part, with the ambient coordinates of its generators.
    pub fn p_part(&self, p: u64) -> (Self, Vec<Vec<u64>>) {
        let gens: Vec<Vec<u64>> = (0..self.rank())
            .filter(|&i| self.orders[i] % p == 0)
            .map(|i| {
                let mut pp = 1;
                while self.orders[i] % (pp * p) == 0 {
                    pp *= p;
                }
                let mut g = vec![0u64; self.rank()];
                g[i] = self.orders[i] / pp;
                g
            })
            .collect();
        self.restrict_unchecked(&gens)
    }

    pub fn restrict(&self, s: &Subgroup) -> Result<Self> {
        Ok(self.restrict_with_embedding(s)?.0)
    }

    /// Form on `s`, with the ambient coordinates of the new generators.
    pub fn restrict_with_embedding(&self, s: &Subgroup) -> Result<(Self, Vec<Vec<u64>>)> {
        for g in &s.generators {
            self.check_element(g)?;
        }
        Ok(self.restrict_unchecked(&s.generators))
    }

    fn restrict_unchecked(&self, gens: &[Vec<u64>]) -> (Self, Vec<Vec<u64>>) {
        let k = self.rank();
        if k == 0 || gens.iter().all(|g| g.iter().all(|&c| c == 0)) {
            return (Self::trivial(), Vec::new());
        }
        // preimage of the subgroup in Z^k, modulo diag(d) Z^k
        let mut cols: Vec<Vec<BigInt>> = gens.iter().map(|g| g.iter().map(|&c| BigInt::from(c)).collect()).collect();
        for i in 0..k {
            let mut c = vec![BigInt::zero(); k];
            c[i] = BigInt::from(self.orders[i]);
            cols.push(c);
        }
        let m = IntMatrix::from_big_rows((0..k).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
            .expect("rectangular");
        let basis = exact::column_span_basis(&m);
        let inv = exact::rational_inverse(&basis).expect("full rank preimage");
        let diag: Vec<Vec<Rational>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let s: Rational = (0..k)
                            .filter(|&l| l == j)
                            .map(|l| &inv[i][l] * Rational::from_integer(BigInt::from(self.orders[l])))
                            .sum();
                        s
                    })
                    .collect()
            })
            .collect();
        let t = exact::rational_to_int(&diag).expect("relations lie in the preimage");
        let smith = exact::smith_normal_form(&t);
        let u_inv = exact::unimodular_inverse(&smith.u).expect("unimodular");
        let factors = smith.invariant_factors();
        let mut orders = Vec::new();
        let mut embedding = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            if f.is_one() {
                continue;
            }
            let col: Vec<BigInt> = (0..k).map(|r| u_inv.get(r, i).clone()).collect();
            let elem: Vec<u64> = (0..k)
                .map(|r| {
                    let v: BigInt = (0..k).map(|c| basis.get(r, c) * &col[c]).sum();
                    v.mod_floor(&BigInt::from(self.orders[r])).to_u64().unwrap()
                })
                .collect();
            orders.push(f.to_u64().expect("order fits"));
            embedding.push(elem);
        }
        let exponent = lcm_all(&orders);
        let f = self.exponent / exponent;
        let q_num = embedding.iter().map(|g| self.q_num_of(g) / f).collect();
        let b_num = embedding.iter().map(|x| embedding.iter().map(|y| self.b_num_of(x, y) / f).collect()).collect();
        debug_assert!(embedding.iter().all(|g| self.q_num_of(g) % f == 0));
        (FiniteQuadraticForm { orders, exponent, q_num, b_num }, embedding)
    }

    fn primes(&self) -> Vec<u64> {
        let mut n = self.orders.last().copied().unwrap_or(1);
        let mut ps = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                ps.push(p);
                while n % p == 0 {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            ps.push(n);
        }
        ps
    }

    fn value_histogram(&self) -> BTreeMap<(u64, u64), u64> {
        let mut h = BTreeMap::new();
        for x in self.elements() {
            *h.entry((self.element_order(&x), self.q_num_of(&x))).or_insert(0) += 1;
        }
        h
    }

    /// Searches for an isomorphism of groups carrying `q` to `q`.
    /// Works prime by prime; each primary part must be within
    /// [`ELEMENT_BUDGET`].
    pub fn is_isomorphic(&self, other: &Self) -> Result<Option<Isometry>> {
        if self.order() != other.order() {
            return Ok(None);
        }
        let mut pairs = Vec::new();
        for p in self.primes() {
            let (a, emb_a) = self.p_part(p);
            let (b, emb_b) = other.p_part(p);
            if a.orders != b.orders {
                return Ok(None);
            }
            a.require_budget("primary part for isometry search")?;
            if a.q_num != b.q_num || a.b_num != b.b_num {
                if a.value_histogram() != b.value_histogram() {
                    return Ok(None);
                }
                match primary_isometry(&a, &b) {
                    None => return Ok(None),
                    Some(images) => {
                        for (i, img) in images.iter().enumerate() {
                            pairs.push((self.embed(&emb_a, &unit(a.rank(), i)), other.embed(&emb_b, img)));
                        }
                    }
                }
            } else {
                for i in 0..a.rank() {
                    let e = unit(a.rank(), i);
                    pairs.push((self.embed(&emb_a, &e), other.embed(&emb_b, &e)));
                }
            }
        }
        Ok(Some(Isometry { pairs }))
    }

    fn embed(&self, embedding: &[Vec<u64>], local: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.rank()];
        for (g, &c) in embedding.iter().zip(local) {
            if c != 0 {
                out = self.add(&out, &self.mul(g, c));
            }
        }
        out
    }

    /// Elements `x ≠ 0` with `q(x) = 0`.
    pub fn nonzero_isotropic_count(&self) -> Result<u64> {
        self.require_budget("isotropic element count")?;
        Ok(self.elements().skip(1).filter(|x| self.q_num_of(x) == 0).count() as u64)
    }

    /// All isotropic subgroups (`q ≡ 0` on every element), ordered by order and
    /// then by element set. `order_filter` keeps only subgroups of that order.
    pub fn isotropic_subgroups(&self, order_filter: Option<u64>) -> Result<Vec<Subgroup>> {
        self.require_budget("isotropic subgroup enumeration")?;
        let isotropic: Vec<Vec<u64>> = self.elements().skip(1).filter(|x| self.q_num_of(x) == 0).collect();
        let trivial: BTreeSet<usize> = [0usize].into_iter().collect();
        let mut found: BTreeMap<(usize, Vec<usize>), Subgroup> = BTreeMap::new();
        found.insert((1, vec![0]), Subgroup { generators: Vec::new() });
        let mut layer: Vec<(BTreeSet<usize>, Vec<Vec<u64>>)> = vec![(trivial, Vec::new())];
        while !layer.is_empty() {
            let mut next: BTreeMap<Vec<usize>, Vec<Vec<u64>>> = BTreeMap::new();
            for (members, gens) in &layer {
                for x in &isotropic {
                    if members.contains(&self.index_of(x)) {
                        continue;
                    }
                    if gens.iter().any(|g| self.b_num_of(g, x) != 0) {
                        continue;
                    }
                    let grown = self.span_with(members, x);
                    let key: Vec<usize> = grown.iter().copied().collect();
                    if found.contains_key(&(key.len(), key.clone())) || next.contains_key(&key) {
                        continue;
                    }
                    let mut g2 = gens.clone();
                    g2.push(x.clone());
                    next.insert(key, g2);
                }
            }
            layer = Vec::new();
            for (key, gens) in next {
                let canon = self.canonical_generators(&key);
                found.insert((key.len(), key.clone()), Subgroup { generators: canon });
                layer.push((key.into_iter().collect(), gens));
            }
        }
        Ok(found
            .into_iter()
            .filter(|((n, _), _)| order_filter.is_none_or(|o| *n as u64 == o))
            .map(|(_, s)| s)
            .collect())
    }

    fn span_with(&self, members: &BTreeSet<usize>, x: &[u64]) -> BTreeSet<usize> {
        let ord = self.element_order(x);
        let mut out = BTreeSet::new();
        for &m in members {
            let base = self.element_at(m);
            for t in 0..ord {
                out.insert(self.index_of(&self.add(&base, &self.mul(x, t))));
            }
        }
        out
    }

    /// Greedy generators: scan the members in index order, keep an element when
    /// it is not yet in the span.
    fn canonical_generators(&self, members: &[usize]) -> Vec<Vec<u64>> {
        let mut span: BTreeSet<usize> = [0usize].into_iter().collect();
        let mut gens = Vec::new();
        for &m in members {
            if span.len() == members.len() {
                break;
            }
            if !span.contains(&m) {
                let x = self.element_at(m);
                span = self.span_with(&span, &x);
                gens.push(x);
            }
        }
        gens
    }

    pub fn to_json(&self) -> Value {
        let q: Vec<String> = (0..self.rank()).map(|i| format_rational(&self.q_generator(i))).collect();
        let b: Vec<Vec<String>> = (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| format_rational(&self.b_generator(i, j))).collect())
            .collect();
        json!({ "orders": self.orders, "q": q, "b": b })
    }
}

fn unit(k: usize, i: usize) -> Vec<u64> {
    let mut e = vec![0u64; k];
    e[i] = 1;
    e
}

/// Backtracking over generator images for two forms on the same `p`-group.
fn primary_isometry(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> Option<Vec<Vec<u64>>> {
    let k = a.rank();
    let all: Vec<Vec<u64>> = b.elements().collect();
    let candidates: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            let e = unit(k, i);
            let (o, q) = (a.orders[i], a.q_num[i]);
            debug_assert_eq!(a.element_order(&e), o);
            (0..all.len()).filter(|&j| b.element_order(&all[j]) == o && b.q_num_of(&all[j]) == q).collect()
        })
        .collect();
    let mut member = vec![false; all.len()];
    member[0] = true;
    let mut images: Vec<usize> = Vec::with_capacity(k);
    if extend(a, b, &all, &candidates, &mut member, &mut images) {
        Some(images.into_iter().map(|j| all[j].clone()).collect())
    } else {
        None
    }
}

fn extend(
    a: &FiniteQuadraticForm,
    b: &FiniteQuadraticForm,
    all: &[Vec<u64>],
    candidates: &[Vec<usize>],
    member: &mut Vec<bool>,
    images: &mut Vec<usize>,
) -> bool {
    let i = images.len();
    if i == a.rank() {
        return true;
    }
    let order = a.orders[i];
    'cand: for &c in &candidates[i] {
        let y = &all[c];
        for (j, &img) in images.iter().enumerate() {
            if b.b_num_of(y, &all[img]) != a.b_num[i][j] {
                continue 'cand;
            }
        }
        for t in 1..order {
            if member[b.index_of(&b.mul(y, t))] {
                continue 'cand;
            }
        }
        let saved = member.clone();
        let current: Vec<usize> = (0..member.len()).filter(|&m| saved[m]).collect();
        for m in current {
            for t in 1..order {
                member[b.index_of(&b.add(&all[m], &b.mul(y, t)))] = true;
            }
        }
        images.push(c);
        if extend(a, b, all, candidates, member, images) {
            return true;
        }
        images.pop();
        *member = saved;
    }
    false
}

impl Subgroup {
    pub fn new(form: &FiniteQuadraticForm, generators: Vec<Vec<u64>>) -> Result<Self> {
        for g in &generators {
            form.check_element(g)?;
        }
        Ok(Subgroup { generators })
    }

    pub fn trivial() -> Self {
        Subgroup { generators: Vec::new() }
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// Sorted element list; the form must be within [`ELEMENT_BUDGET`].
    pub fn elements(&self, form: &FiniteQuadraticForm) -> Result<Vec<Vec<u64>>> {
        form.require_budget("subgroup elements")?;
        let mut span: BTreeSet<usize> = [0usize].into_iter().collect();
        for g in &self.generators {
            form.check_element(g)?;
            span = form.span_with(&span, g);
        }
        Ok(span.into_iter().map(|i| form.element_at(i)).collect())
    }

    pub fn order(&self, form: &FiniteQuadraticForm) -> Result<BigInt> {
        Ok(form.restrict(self)?.order())
    }
}

/// `A_L = L^∨ / L` together with the lifts of its generators to `L^∨`.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    pub form: FiniteQuadraticForm,
    /// Lift of generator `i` in coordinates of the lattice basis.
    pub lifts: Vec<Vec<Rational>>,
    gram: IntMatrix,
    /// rows of the Smith transform that read off generator coordinates
    readout: Vec<Vec<BigInt>>,
}

impl DiscriminantForm {
    /// Class of a dual vector `x` (coordinates in the lattice basis).
    pub fn element_of(&self, x: &[Rational]) -> Result<Vec<u64>> {
        let n = self.gram.rows();
        let y: Vec<Rational> = (0..n)
            .map(|i| (0..n).map(|j| Rational::from_integer(self.gram.get(i, j).clone()) * &x[j]).sum::<Rational>())
            .collect();
        if y.iter().any(|v| !v.is_integer()) {
            return Err(Error::NotIntegral("vector is not in the dual lattice".into()));
        }
        Ok(self
            .readout
            .iter()
            .zip(self.form.orders())
            .map(|(row, &d)| {
                let v: BigInt = row.iter().zip(&y).map(|(a, b)| a * b.to_integer()).sum();
                v.mod_floor(&BigInt::from(d)).to_u64().unwrap()
            })
            .collect())
    }

    /// A lift of the element with coordinates `c`.
    pub fn lift(&self, c: &[u64]) -> Vec<Rational> {
        let n = self.gram.rows();
        let mut out = vec![Rational::zero(); n];
        for (lift, &k) in self.lifts.iter().zip(c) {
            if k == 0 {
                continue;
            }
            let k = Rational::from_integer(BigInt::from(k));
            for (o, l) in out.iter_mut().zip(lift) {
                *o += &k * l;
            }
        }
        out
    }
}

/// Discriminant form of an even nondegenerate lattice.
pub fn disc_form(l: &Lattice) -> Result<DiscriminantForm> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    if l.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let g = l.gram();
    let smith = exact::smith_normal_form(g);
    let factors = smith.invariant_factors();
    let mut orders = Vec::new();
    let mut lifts = Vec::new();
    let mut readout = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        if f.is_one() {
            continue;
        }
        let d = f.to_u64().ok_or(Error::BudgetExceeded {
            what: "discriminant group exponent",
            size: u128::MAX,
            limit: u64::MAX as u128,
        })?;
        orders.push(d);
        lifts.push((0..g.rows()).map(|r| Rational::new(smith.v.get(r, i).clone(), f.clone())).collect::<Vec<_>>());
        readout.push(smith.u.row(i).to_vec());
    }
    let q: Vec<Rational> = lifts.iter().map(|x| exact::mod_two(&exact::bilinear(g, x, x))).collect();
    let b: Vec<Vec<Rational>> =
        lifts.iter().map(|x| lifts.iter().map(|y| exact::mod_one(&exact::bilinear(g, x, y))).collect()).collect();
    let form = FiniteQuadraticForm::new(orders, q, b)?;
    Ok(DiscriminantForm { form, lifts, gram: g.clone(), readout })
}
