//! Ternary linear codes, the bounded-weight search, monomial equivalence, and
//! the bridge from codes to overlattices of `A2(-1)^n`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{self, rat, IntMatrix, Rational};
use crate::glue::{self, Overlattice};
use crate::lattice::{standard_lattice, Lattice, Sign};
use crate::par::Strategy;

/// Largest code dimension accepted by [`search_codes`].
pub const MAX_SEARCH_DIM: usize = 4;
/// Largest length accepted by [`search_codes`].
pub const MAX_SEARCH_LENGTH: usize = 12;

/// Subspace of `F_3^n`, stored by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TernaryCode {
    n: usize,
    generators: Vec<Vec<u8>>,
}

/// `y[perm[j]] = signs[j] · x[j]` carries words of one code to the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialMap {
    pub perm: Vec<usize>,
    pub signs: Vec<u8>,
}

fn neg(x: u8) -> u8 {
    (3 - x) % 3
}

fn weight(w: &[u8]) -> usize {
    w.iter().filter(|&&c| c != 0).count()
}

fn combine(acc: &mut [u8], row: &[u8], c: u8) {
    for (a, &r) in acc.iter_mut().zip(row) {
        *a = (*a + c * r) % 3;
    }
}

fn rref(n: usize, mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, p);
        if rows[r][col] == 2 {
            rows[r].iter_mut().for_each(|x| *x = neg(*x));
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let c = neg(row[col]);
                combine(row, &pivot, c);
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

impl TernaryCode {
    /// Span of `rows`; entries are read mod 3.
    pub fn new(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("every generator needs length {n}")));
        }
        let rows = rows.iter().map(|r| r.iter().map(|&x| x.rem_euclid(3) as u8).collect()).collect();
        Ok(TernaryCode { n, generators: rref(n, rows) })
    }

    fn from_words(n: usize, rows: Vec<Vec<u8>>) -> Self {
        TernaryCode { n, generators: rref(n, rows) }
    }

    pub fn zero(n: usize) -> Self {
        TernaryCode { n, generators: Vec::new() }
    }

    /// The code of affine functions on the plane `F_3^2`, evaluated at its nine
    /// points.
    pub fn affine_plane() -> Self {
        Self::new(
            9,
            &[vec![1, 1, 1, 1, 1, 1, 1, 1, 1], vec![0, 0, 0, 1, 1, 1, 2, 2, 2], vec![0, 1, 2, 0, 1, 2, 0, 1, 2]],
        )
        .expect("length 9")
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<u8>] {
        &self.generators
    }

    /// All `3^k` codewords, the zero word first.
    pub fn words(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n]];
        for g in &self.generators {
            let mut next = Vec::with_capacity(out.len() * 3);
            for c in 0..3u8 {
                for w in &out {
                    let mut v = w.clone();
                    combine(&mut v, g, c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    pub fn weight_enumerator(&self) -> BTreeMap<usize, u64> {
        let mut m = BTreeMap::new();
        for w in self.words() {
            *m.entry(weight(&w)).or_insert(0) += 1;
        }
        m
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        let mut gens = self.generators.clone();
        gens.push(w.to_vec());
        rref(self.n, gens).len() == self.dim()
    }

    /// Image under a monomial map.
    pub fn apply(&self, m: &MonomialMap) -> Self {
        let rows = self
            .generators
            .iter()
            .map(|g| {
                let mut y = vec![0u8; self.n];
                for j in 0..self.n {
                    y[m.perm[j]] = (m.signs[j] * g[j]) % 3;
                }
                y
            })
            .collect();
        Self::from_words(self.n, rows)
    }

    pub fn to_json(&self) -> Value {
        json!({ "dim": self.dim(), "generators": self.generators })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidInput("code JSON needs {\"generators\": [[0|1|2]]}".into());
        let rows = v.get("generators").and_then(Value::as_array).ok_or_else(bad)?;
        let rows: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|x| x.as_i64().filter(|x| (0..3).contains(x)).ok_or_else(bad))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n = rows.first().map_or(9, Vec::len);
        let code = Self::new(n, &rows)?;
        if let Some(d) = v.get("dim").and_then(Value::as_u64) {
            if d as usize != code.dim() {
                return Err(Error::InvalidInput(format!("generators span dimension {}, not {d}", code.dim())));
            }
        }
        Ok(code)
    }
}

fn normalized_column(g: &[Vec<u8>], j: usize, rows: usize) -> Vec<u8> {
    let mut c: Vec<u8> = (0..rows).map(|i| g[i][j]).collect();
    if c.iter().find(|&&x| x != 0) == Some(&2) {
        c.iter_mut().for_each(|x| *x = neg(*x));
    }
    c
}

fn column_profile(g: &[Vec<u8>], n: usize, rows: usize) -> Vec<Vec<u8>> {
    let mut cols: Vec<Vec<u8>> = (0..n).map(|j| normalized_column(g, j, rows)).collect();
    cols.sort();
    cols
}

/// Searches for a monomial map carrying `c1` onto `c2`.
///
/// The rows of `c1`'s generator matrix are sent to codewords of `c2`; a choice
/// is consistent when the columns of both matrices agree as multisets up to
/// sign. The column matching then gives the permutation and the signs.
pub fn monomial_equivalent(c1: &TernaryCode, c2: &TernaryCode) -> Option<MonomialMap> {
    if c1.n != c2.n || c1.dim() != c2.dim() {
        return None;
    }
    if c1.weight_enumerator() != c2.weight_enumerator() {
        return None;
    }
    let words = c2.words();
    let g1 = &c1.generators;
    let k = c1.dim();
    let mut images: Vec<Vec<u8>> = Vec::with_capacity(k);
    if !assign(c1, &words, &mut images) {
        return None;
    }
    // pair columns
    let mut used = vec![false; c1.n];
    let mut perm = vec![0usize; c1.n];
    let mut signs = vec![1u8; c1.n];
    for j in 0..c1.n {
        let col: Vec<u8> = (0..k).map(|i| g1[i][j]).collect();
        let (t, s) = (0..c1.n)
            .filter(|&t| !used[t])
            .find_map(|t| {
                [1u8, 2].into_iter().find(|&s| (0..k).all(|i| images[i][t] == (s * col[i]) % 3)).map(|s| (t, s))
            })
            .expect("column multisets agree");
        used[t] = true;
        perm[j] = t;
        signs[j] = s;
    }
    let map = MonomialMap { perm, signs };
    debug_assert_eq!(&c1.apply(&map), c2);
    Some(map)
}

fn assign(c1: &TernaryCode, words: &[Vec<u8>], images: &mut Vec<Vec<u8>>) -> bool {
    let i = images.len();
    let k = c1.dim();
    if i == k {
        return true;
    }
    let target_weight = weight(&c1.generators[i]);
    let target = column_profile(&c1.generators, c1.n, i + 1);
    for w in words {
        if weight(w) != target_weight {
            continue;
        }
        images.push(w.clone());
        if column_profile(images, c1.n, i + 1) == target && assign(c1, words, images) {
            return true;
        }
        images.pop();
    }
    false
}

/// A word packed as two masks: positions holding 1 and positions holding 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Packed {
    ones: u16,
    twos: u16,
}

impl Packed {
    const ZERO: Packed = Packed { ones: 0, twos: 0 };

    fn unpack(self, n: usize) -> Vec<u8> {
        (0..n)
            .map(|i| {
                if self.ones >> i & 1 == 1 {
                    1
                } else if self.twos >> i & 1 == 1 {
                    2
                } else {
                    0
                }
            })
            .collect()
    }

    fn add(self, o: Packed) -> Packed {
        let z = !(self.ones | self.twos);
        let oz = !(o.ones | o.twos);
        Packed {
            ones: (z & o.ones) | (self.ones & oz) | (self.twos & o.twos),
            twos: (z & o.twos) | (self.twos & oz) | (self.ones & o.ones),
        }
    }

    fn neg(self) -> Packed {
        Packed { ones: self.twos, twos: self.ones }
    }

    fn weight(self) -> usize {
        (self.ones | self.twos).count_ones() as usize
    }

    /// First nonzero entry is 1 (positions read from index 0).
    fn is_normalized(self) -> bool {
        let all = self.ones | self.twos;
        all != 0 && self.ones & (all & all.wrapping_neg()) != 0
    }
}

/// Normalized words of length `n` whose weight lies in `allowed`.
fn allowed_words(n: usize, allowed: &BTreeSet<usize>) -> Vec<Packed> {
    let mut out = Vec::new();
    for ones in 0u16..(1 << n) {
        let rest = !ones & ((1u16 << n) - 1);
        // enumerate subsets of the complement for the twos
        let mut twos = rest;
        loop {
            let p = Packed { ones, twos };
            if p.is_normalized() && allowed.contains(&p.weight()) {
                out.push(p);
            }
            if twos == 0 {
                break;
            }
            twos = (twos - 1) & rest;
        }
    }
    out.sort_by_key(|p| p.unpack(n));
    out
}

/// Nonzero words of the span, one per `±` pair, after adding `x`; `None` when
/// a new word has a forbidden weight.
fn extend_span(span: &[Packed], x: Packed, allowed: &BTreeSet<usize>) -> Option<Vec<Packed>> {
    let mut out = Vec::with_capacity(3 * span.len() + 1);
    out.extend_from_slice(span);
    let mut push = |w: Packed| {
        if allowed.contains(&w.weight()) {
            out.push(w);
            true
        } else {
            false
        }
    };
    if !push(x) {
        return None;
    }
    for &w in span {
        if !push(w.add(x)) || !push(w.add(x.neg())) {
            return None;
        }
    }
    Some(out)
}

fn in_span(span: &[Packed], x: Packed) -> bool {
    span.iter().any(|&w| w == x || w == x.neg())
}

/// Depth-first extension; `candidates` are already compatible with `span`.
fn grow(
    n: usize,
    k: usize,
    allowed: &BTreeSet<usize>,
    candidates: &[Packed],
    basis: &mut Vec<Packed>,
    span: &[Packed],
    out: &mut HashSet<TernaryCode>,
) {
    if basis.len() == k {
        out.insert(TernaryCode::from_words(n, basis.iter().map(|p| p.unpack(n)).collect()));
        return;
    }
    for (i, &x) in candidates.iter().enumerate() {
        let Some(next) = extend_span(span, x, allowed) else { continue };
        let rest: Vec<Packed> = if basis.len() + 1 < k {
            candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&y| !in_span(&next, y) && extend_span(&next, y, allowed).is_some())
                .collect()
        } else {
            Vec::new()
        };
        basis.push(x);
        grow(n, k, allowed, &rest, basis, &next, out);
        basis.pop();
    }
}

/// All `k`-dimensional codes of length `n` whose nonzero words have weights in
/// `allowed`, one representative per monomial class, canonically ordered.
///
/// Every class with a word of weight `w` has a member containing
/// `1^w 0^(n-w)`, so the search fixes that word as the first generator and
/// fans out over the choice of the second.
pub fn search_codes(n: usize, k: usize, allowed: &BTreeSet<usize>, strategy: Strategy) -> Result<Vec<TernaryCode>> {
    if k > MAX_SEARCH_DIM {
        return Err(Error::BudgetExceeded { what: "code dimension", size: k as u128, limit: MAX_SEARCH_DIM as u128 });
    }
    if n > MAX_SEARCH_LENGTH {
        return Err(Error::BudgetExceeded { what: "code length", size: n as u128, limit: MAX_SEARCH_LENGTH as u128 });
    }
    if k == 0 {
        return Ok(vec![TernaryCode::zero(n)]);
    }
    let words = allowed_words(n, allowed);
    let mut tasks: Vec<(Vec<Packed>, Packed)> = Vec::new();
    for &w in allowed.iter().rev().filter(|&&w| (1..=n).contains(&w)) {
        let g1 = Packed { ones: (1u16 << w) - 1, twos: 0 };
        let span = vec![g1];
        let compatible: Vec<Packed> =
            words.iter().copied().filter(|&y| !in_span(&span, y) && extend_span(&span, y, allowed).is_some()).collect();
        tasks.push((compatible, g1));
    }
    // one task per (first generator, second generator)
    let tasks: Vec<(Packed, Packed, Vec<Packed>)> = tasks
        .into_iter()
        .flat_map(|(compatible, g1)| {
            if k == 1 {
                return vec![(g1, Packed::ZERO, Vec::new())];
            }
            (0..compatible.len()).map(|i| (g1, compatible[i], compatible[i + 1..].to_vec())).collect::<Vec<_>>()
        })
        .collect();
    let found: Vec<TernaryCode> = strategy.flat_map(tasks, |(g1, x, later)| {
        let mut out = HashSet::new();
        if x == Packed::ZERO {
            out.insert(TernaryCode::from_words(n, vec![g1.unpack(n)]));
        } else {
            let span = extend_span(&[g1], x, allowed).expect("filtered");
            let rest: Vec<Packed> = if k > 2 {
                later.into_iter().filter(|&y| !in_span(&span, y) && extend_span(&span, y, allowed).is_some()).collect()
            } else {
                Vec::new()
            };
            let mut basis = vec![g1, x];
            grow(n, k, allowed, &rest, &mut basis, &span, &mut out);
        }
        out.into_iter().collect()
    });
    let distinct: BTreeSet<TernaryCode> = found.into_iter().collect();
    Ok(classify(distinct.into_iter().collect(), strategy))
}

type ClassKey = (BTreeMap<usize, u64>, Vec<usize>);

/// Weight enumerator plus the sorted per-coordinate support counts.
fn class_key(c: &TernaryCode) -> ClassKey {
    let words = c.words();
    let mut support: Vec<usize> = (0..c.n).map(|j| words.iter().filter(|w| w[j] != 0).count()).collect();
    support.sort();
    (c.weight_enumerator(), support)
}

/// Splits a sorted list of codes into monomial classes; the smallest member of
/// each class represents it.
fn classify(codes: Vec<TernaryCode>, strategy: Strategy) -> Vec<TernaryCode> {
    let keys = strategy.map(codes.iter().collect(), class_key);
    let mut buckets: BTreeMap<ClassKey, Vec<TernaryCode>> = BTreeMap::new();
    for (code, key) in codes.into_iter().zip(keys) {
        buckets.entry(key).or_default().push(code);
    }
    let per_bucket = strategy.map(buckets.into_values().collect(), |members| {
        let mut reps: Vec<TernaryCode> = Vec::new();
        for c in members {
            if !reps.iter().any(|r| monomial_equivalent(r, &c).is_some()) {
                reps.push(c);
            }
        }
        reps
    });
    let mut reps: Vec<TernaryCode> = per_bucket.into_iter().flatten().collect();
    reps.sort();
    reps
}

/// Coordinates of a dual vector of `A2(-1)^n` in the curve basis
/// `(C_1, C_1', ..., C_n, C_n')`.
fn glue_vector(word: &[u8]) -> Vec<Rational> {
    word.iter().flat_map(|&c| [rat(c as i64, 3), rat(2 * c as i64, 3)]).collect()
}

pub fn a2_sum(n: usize) -> Lattice {
    let a2 = standard_lattice("A2", Sign::Negative).expect("catalog");
    Lattice::direct_sum(&vec![a2; n]).with_label(format!("{n}A2(-)"))
}

/// The overlattice of `A2(-1)^n` glued along a code, with `A2(-1)^n` kept as
/// a sublattice.
#[derive(Clone, Debug)]
pub struct CodeLattice {
    pub code: TernaryCode,
    pub lattice: Lattice,
    /// columns: the curve basis of `A2(-1)^n` in coordinates of `lattice`
    pub root_sublattice: IntMatrix,
}

/// Glues `A2(-1)^n` along the code, block `i` receiving `c_i (C_i + 2C_i')/3`.
pub fn code_to_overlattice(code: &TernaryCode) -> Result<CodeLattice> {
    for w in code.words() {
        if weight(&w) % 3 != 0 {
            return Err(Error::NotIsotropic { element: w.iter().map(|&x| x as u64).collect() });
        }
    }
    let base = a2_sum(code.n);
    let lifts: Vec<Vec<Rational>> = code.generators.iter().map(|g| glue_vector(g)).collect();
    let Overlattice { lattice, old_in_new, .. } = glue::overlattice_from_lifts(&base, &lifts)?;
    Ok(CodeLattice { code: code.clone(), lattice, root_sublattice: old_in_new })
}

/// `L` for the affine-plane code.
pub fn reference_lattice() -> Result<CodeLattice> {
    code_to_overlattice(&TernaryCode::affine_plane())
}

/// Counts root pairs of a negative definite lattice and how many of them lie
/// outside the sublattice spanned by the columns of `sublattice`.
pub fn verify_no_extra_roots(l: &Lattice, sublattice: &IntMatrix, strategy: Strategy) -> Result<(usize, usize)> {
    if l.definiteness() != Some(Sign::Negative) {
        return Err(Error::NotDefinite);
    }
    let inv = exact::rational_inverse(sublattice)?;
    let roots: Vec<_> = l.short_vectors_with(2, strategy)?.into_iter().filter(|v| v.norm == -2).collect();
    let outside = roots.iter().filter(|v| crate::lattice::integral_coordinates(&inv, &v.coords).is_none()).count();
    Ok((roots.len(), outside))
}

/// The divisor class `v = Σ (C_i + 2C_i')/3` attached to a full-weight word,
/// with the curve labels swapped in blocks where the word has entry 2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueClass {
    /// numerators over 3 of the coefficients of `(C_i, C_i')`
    pub thirds: Vec<[i64; 2]>,
    /// blocks whose two curves were exchanged
    pub swapped: Vec<bool>,
    /// `(v·C_i, v·C_i')` after the exchange
    pub pairings: Vec<[i64; 2]>,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub norm: Rational,
}

pub fn triple_cover_class(code: &TernaryCode) -> Result<GlueClass> {
    let n = code.n;
    let word = code.words().into_iter().filter(|w| weight(w) == n && n > 0).min().ok_or(Error::NoWeight9Word)?;
    let swapped: Vec<bool> = word.iter().map(|&c| c == 2).collect();
    let thirds: Vec<[i64; 2]> = swapped.iter().map(|&s| if s { [2, 1] } else { [1, 2] }).collect();
    let v: Vec<Rational> = thirds.iter().flat_map(|t| [rat(t[0], 3), rat(t[1], 3)]).collect();
    let base = a2_sum(n);
    let norm = exact::bilinear(base.gram(), &v, &v);
    let pairings = (0..n)
        .map(|i| {
            let (a, b) = if swapped[i] { (2 * i + 1, 2 * i) } else { (2 * i, 2 * i + 1) };
            let pair = |j: usize| -> i64 {
                let s: Rational =
                    (0..2 * n).map(|r| &v[r] * Rational::from_integer(base.gram().get(r, j).clone())).sum();
                assert!(s.is_integer(), "v lies in the dual");
                i64::try_from(s.to_integer()).expect("small")
            };
            [pair(a), pair(b)]
        })
        .collect();
    Ok(GlueClass { thirds, swapped, pairings, norm })
}

/// Whether the glue vector of `word` is isotropic in `A_{A2(-1)^n}`.
pub fn word_is_isotropic(word: &[u8]) -> Result<bool> {
    let base = a2_sum(word.len());
    let disc = crate::fqf::disc_form(&base)?;
    let x = disc.element_of(&glue_vector(word))?;
    Ok(disc.form.q_value(&x)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Strategy;
    use num_bigint::BigInt;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, Just, ProptestConfig};
    use proptest::strategy::Strategy as _;

    fn weights(ws: &[usize]) -> BTreeSet<usize> {
        ws.iter().copied().collect()
    }

    #[test]
    fn affine_code_enumerator() {
        let c = TernaryCode::affine_plane();
        assert_eq!(c.weight_enumerator(), [(0, 1), (6, 24), (9, 2)].into_iter().collect());
        assert_eq!(TernaryCode::zero(9).weight_enumerator(), [(0, 1)].into_iter().collect());
        let ones = TernaryCode::new(9, &[vec![1; 9]]).unwrap();
        assert_eq!(ones.weight_enumerator(), [(0, 1), (9, 2)].into_iter().collect());
    }

    #[test]
    fn rref_is_canonical() {
        let a = TernaryCode::new(3, &[vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let b = TernaryCode::new(3, &[vec![1, 0, 2], vec![2, 1, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(a.generators(), &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(b.dim(), 3);
        assert!(a.contains(&[2, 2, 1]));
    }

    #[test]
    fn search_examples() {
        let s = Strategy::default();
        let found = search_codes(9, 3, &weights(&[6, 9]), s).unwrap();
        assert!(!found.is_empty());
        assert!(found.iter().any(|c| monomial_equivalent(c, &TernaryCode::affine_plane()).is_some()));
        assert!(search_codes(9, 3, &weights(&[9]), s).unwrap().is_empty());
        let rep = search_codes(9, 1, &weights(&[9]), s).unwrap();
        assert_eq!(rep, vec![TernaryCode::new(9, &[vec![1; 9]]).unwrap()]);
        assert!(search_codes(9, 5, &weights(&[6]), s).is_err());
    }

    #[test]
    fn two_full_weight_words_force_a_light_word() {
        // oracle for the empty search: every pair of independent weight-9 words
        // spans a word of weight < 9
        let nines: Vec<Vec<u8>> = allowed_words(9, &weights(&[9])).into_iter().map(|p| p.unpack(9)).collect();
        for a in &nines {
            for b in &nines {
                if a != b {
                    let mut s = a.clone();
                    combine(&mut s, b, 1);
                    let mut d = a.clone();
                    combine(&mut d, b, 2);
                    assert!(weight(&s) < 9 || weight(&d) < 9);
                }
            }
        }
    }

    #[test]
    fn strategies_agree_on_search() {
        let w = weights(&[6, 9]);
        let a = search_codes(9, 2, &w, Strategy::Sequential).unwrap();
        let b = search_codes(9, 2, &w, Strategy::Parallel).unwrap();
        assert_eq!(a, b);
        for (i, x) in a.iter().enumerate() {
            for y in &a[i + 1..] {
                assert!(monomial_equivalent(x, y).is_none());
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let c = TernaryCode::affine_plane();
        let id = monomial_equivalent(&c, &c).unwrap();
        assert_eq!(c.apply(&id), c);
        let mut perm: Vec<usize> = (0..9).collect();
        perm.swap(0, 1);
        let swapped = c.apply(&MonomialMap { perm, signs: vec![1; 9] });
        assert!(monomial_equivalent(&c, &swapped).is_some());
        // three disjoint triples: weights 3, 6, 9
        let light = TernaryCode::new(
            9,
            &[vec![1, 1, 1, 0, 0, 0, 0, 0, 0], vec![0, 0, 0, 1, 1, 1, 0, 0, 0], vec![0, 0, 0, 0, 0, 0, 1, 1, 1]],
        )
        .unwrap();
        assert_ne!(light.weight_enumerator(), c.weight_enumerator());
        assert!(monomial_equivalent(&c, &light).is_none());
    }

    #[test]
    fn overlattice_of_affine_code() {
        let l = reference_lattice().unwrap();
        assert_eq!(l.lattice.determinant(), BigInt::from(27));
        assert!(l.lattice.is_even());
        let (roots, outside) = verify_no_extra_roots(&l.lattice, &l.root_sublattice, Strategy::default()).unwrap();
        assert_eq!((roots, outside), (27, 0));
        let zero = code_to_overlattice(&TernaryCode::zero(9)).unwrap();
        assert_eq!(zero.lattice.gram(), a2_sum(9).gram());
    }

    #[test]
    fn weight_three_word_creates_roots() {
        let c = TernaryCode::new(9, &[vec![1, 1, 1, 0, 0, 0, 0, 0, 0]]).unwrap();
        let l = code_to_overlattice(&c).unwrap();
        assert_eq!(l.lattice.determinant(), BigInt::from(3i64.pow(7)));
        let (_, outside) = verify_no_extra_roots(&l.lattice, &l.root_sublattice, Strategy::default()).unwrap();
        assert!(outside >= 1);
        let bad = TernaryCode::new(9, &[vec![1, 1, 0, 0, 0, 0, 0, 0, 0]]).unwrap();
        assert!(matches!(code_to_overlattice(&bad), Err(Error::NotIsotropic { .. })));
    }

    #[test]
    fn triple_cover_class_of_affine_code() {
        let v = triple_cover_class(&TernaryCode::affine_plane()).unwrap();
        assert_eq!(v.norm, rat(-6, 1));
        assert!(v.pairings.iter().all(|p| *p == [0, -1]));
        assert!(v.swapped.iter().all(|s| !s));
        assert_eq!(triple_cover_class(&TernaryCode::zero(9)).unwrap_err(), Error::NoWeight9Word);
    }

    #[test]
    fn json_round_trip() {
        let c = TernaryCode::affine_plane();
        assert_eq!(TernaryCode::from_json(&c.to_json()).unwrap(), c);
        assert!(TernaryCode::from_json(&json!({"generators": [[3]]})).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn isotropy_is_weight_mod_three(word in proptest::collection::vec(0u8..3, 9)) {
            prop_assert_eq!(word_is_isotropic(&word).unwrap(), weight(&word) % 3 == 0);
        }

        #[test]
        fn monomial_images_keep_enumerator(
            perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle(),
            signs in proptest::collection::vec(1u8..3, 9),
        ) {
            let c = TernaryCode::affine_plane();
            let image = c.apply(&MonomialMap { perm, signs });
            prop_assert_eq!(image.weight_enumerator(), c.weight_enumerator());
            prop_assert!(monomial_equivalent(&c, &image).is_some());
        }
    }
}
