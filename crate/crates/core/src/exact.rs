//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers. The matrices that
//! show up in practice are tiny (rank at most 22) so the algorithms are the
//! textbook ones: Bareiss elimination for determinants, Faddeev-LeVerrier for
//! characteristic polynomials, and pivoting row/column reduction for the Smith
//! and Hermite normal forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
            .finish()
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input,
    /// which is always a programming error at the call sites.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged matrix rows");
            data.extend(row.as_ref().iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &BigInt> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, n: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * n).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
    }
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Representative of `r` modulo `m` in `[0, m)`.
pub fn rational_mod(r: &Rational, m: &BigInt) -> Rational {
    let m = Rational::from_integer(m.clone());
    let k = (r / &m).floor();
    r - k * m
}

pub fn mod_two(r: &Rational) -> Rational {
    rational_mod(r, &int(2))
}

pub fn mod_one(r: &Rational) -> Rational {
    rational_mod(r, &int(1))
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders as `"a/b"`, or `"a"` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn require_square(m: &IntMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare { rows: m.rows, cols: m.cols })
    }
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    require_square(m)?;
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = pivot;
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Characteristic polynomial `det(xI - M)` as coefficients, constant term
/// first. Faddeev-LeVerrier; every division is exact.
pub fn characteristic_polynomial(m: &IntMatrix) -> Result<Vec<BigInt>> {
    require_square(m)?;
    let n = m.rows;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk)?;
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        let prod = m.mul(&next)?;
        let trace: BigInt = (0..n).map(|i| prod.get(i, i).clone()).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
        mk = next;
    }
    Ok(coeffs)
}

fn sign_changes(coeffs: impl Iterator<Item = BigInt>) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        let pos = c.is_positive();
        if let Some(l) = last {
            if l != pos {
                changes += 1;
            }
        }
        last = Some(pos);
    }
    changes
}

/// Inertia `(n_plus, n_zero, n_minus)` of a symmetric matrix.
///
/// The characteristic polynomial of a symmetric matrix has only real roots, so
/// Descartes' rule of signs counts positive and negative roots exactly.
pub fn signature(g: &IntMatrix) -> Result<(usize, usize, usize)> {
    require_square(g)?;
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let p = characteristic_polynomial(g)?;
    let n_zero = p.iter().take_while(|c| c.is_zero()).count();
    let n_plus = sign_changes(p.iter().cloned());
    let n_minus = sign_changes(p.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }));
    debug_assert_eq!(n_plus + n_zero + n_minus, g.rows);
    Ok((n_plus, n_zero, n_minus))
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Diagonal entries `d_1 | d_2 | ...`, including trailing zeros.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        // global minimum of the remaining block as first pivot
        let Some((pi, pj)) = min_abs_entry(&a, t, (t..r).flat_map(|i| (t..c).map(move |j| (i, j)))) else {
            break;
        };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                if !a.get(i, t).is_zero() {
                    let q = -a.get(i, t).div_floor(&p);
                    a.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    clean &= a.get(i, t).is_zero();
                }
            }
            for j in t + 1..c {
                if !a.get(t, j).is_zero() {
                    let q = -a.get(t, j).div_floor(&p);
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    clean &= a.get(t, j).is_zero();
                }
            }
            if !clean {
                let cross = (t..r).map(|i| (i, t)).chain((t + 1..c).map(|j| (t, j)));
                let (pi, pj) = min_abs_entry(&a, t, cross).expect("pivot row/column nonzero");
                a.swap_rows(t, pi);
                u.swap_rows(t, pi);
                a.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // divisibility: fold any offending row into the pivot row
            let p = a.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    a.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { d: a, u, v }
}

fn min_abs_entry(a: &IntMatrix, _t: usize, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    cells.filter(|&(i, j)| !a.get(i, j).is_zero()).min_by(|&(i, j), &(k, l)| a.get(i, j).abs().cmp(&a.get(k, l).abs()))
}

/// Column-style Hermite normal form with transform: `m * t == [h | 0]`,
/// `t` unimodular. `h` is upper triangular in the sense that its `k`-th column
/// has its last nonzero entry (the positive pivot) strictly below the pivot of
/// column `k-1`; entries to the right of a pivot are reduced into `[0, pivot)`.
pub fn hermite_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (n, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut t = IntMatrix::identity(c);
    let mut active: Vec<usize> = (0..c).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    for row in (0..n).rev() {
        loop {
            let nz: Vec<usize> = active.iter().copied().filter(|&j| !a.get(row, j).is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    if a.get(row, j).is_negative() {
                        a.negate_col(j);
                        t.negate_col(j);
                    }
                    pivots.push((row, j));
                    active.retain(|&x| x != j);
                }
                break;
            }
            let &p = nz.iter().min_by_key(|&&j| a.get(row, j).abs()).unwrap();
            let pv = a.get(row, p).clone();
            for &j in &nz {
                if j != p {
                    let q = -a.get(row, j).div_floor(&pv);
                    a.add_col(j, p, &q);
                    t.add_col(j, p, &q);
                }
            }
        }
    }
    pivots.sort();
    for m_idx in 0..pivots.len() {
        let (_, cm) = pivots[m_idx];
        for k in (0..m_idx).rev() {
            let (rk, ck) = pivots[k];
            let q = -a.get(rk, cm).div_floor(a.get(rk, ck));
            if !q.is_zero() {
                a.add_col(cm, ck, &q);
                t.add_col(cm, ck, &q);
            }
        }
    }

    let order: Vec<usize> = pivots.iter().map(|&(_, j)| j).chain(active.iter().copied()).collect();
    let mut h = IntMatrix::zeros(n, pivots.len());
    let mut tt = IntMatrix::zeros(c, c);
    for (k, &j) in order.iter().enumerate() {
        for i in 0..c {
            tt.set(i, k, t.get(i, j).clone());
        }
        if k < pivots.len() {
            for i in 0..n {
                h.set(i, k, a.get(i, j).clone());
            }
        }
    }
    (h, tt)
}

/// HNF basis of the Z-span of the columns of `m`, one column per basis vector.
pub fn column_span_basis(m: &IntMatrix) -> IntMatrix {
    hermite_with_transform(m).0
}

/// Hermite normal form of a generating set. Fails with `RankDeficient` when the
/// columns span less than `min(rows, cols)` dimensions over Q.
pub fn hermite_normal_form(m: &IntMatrix) -> Result<IntMatrix> {
    let h = column_span_basis(m);
    let expected = m.rows.min(m.cols);
    if h.cols < expected || expected == 0 {
        return Err(Error::RankDeficient { rank: h.cols, expected });
    }
    Ok(h)
}

/// Exact inverse over Q by Gauss-Jordan elimination.
pub fn rational_inverse(m: &IntMatrix) -> Result<Vec<Vec<Rational>>> {
    require_square(m)?;
    let n = m.rows;
    let mut a = m.to_rational_rows();
    let mut inv: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero()).ok_or(Error::Degenerate)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let x = &f * &a[col][j];
                    a[i][j] -= x;
                    let y = &f * &inv[col][j];
                    inv[i][j] -= y;
                }
            }
        }
    }
    Ok(inv)
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let inv = rational_inverse(m)?;
    rational_to_int(&inv).ok_or_else(|| Error::NotIntegral("inverse of non-unimodular matrix".into()))
}

/// Converts a rational matrix to an integer one if every entry is integral.
pub fn rational_to_int(m: &[Vec<Rational>]) -> Option<IntMatrix> {
    let rows: Option<Vec<Vec<BigInt>>> =
        m.iter().map(|r| r.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()).collect();
    let rows = rows?;
    if rows.is_empty() {
        return Some(IntMatrix::zeros(0, 0));
    }
    IntMatrix::from_big_rows(rows).ok()
}

/// `x^T G y` for rational vectors.
pub fn bilinear(g: &IntMatrix, x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..g.rows {
        if x[i].is_zero() {
            continue;
        }
        let mut row = Rational::zero();
        for j in 0..g.cols {
            let e = g.get(i, j);
            if !e.is_zero() && !y[j].is_zero() {
                row += &y[j] * Rational::from_integer(e.clone());
            }
        }
        acc += &x[i] * row;
    }
    acc
}

/// `M^T G M` for a rational basis matrix given as columns.
pub fn congruence(g: &IntMatrix, basis: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    basis.iter().map(|x| basis.iter().map(|y| bilinear(g, x, y)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check_smith(m: &IntMatrix) -> Smith {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(determinant(&s.u).unwrap().abs().is_one());
        assert!(determinant(&s.v).unwrap().abs().is_one());
        let f = s.invariant_factors();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for w in f.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn smith_of_a2() {
        let s = check_smith(&big(&[&[2, 1], &[1, 2]]));
        assert_eq!(s.invariant_factors(), vec![int(1), int(3)]);
    }

    #[test]
    fn smith_of_identity_and_u() {
        let s = check_smith(&IntMatrix::identity(4));
        assert_eq!(s.invariant_factors(), vec![int(1); 4]);
        let s = check_smith(&big(&[&[0, 1], &[1, 0]]));
        assert_eq!(s.invariant_factors(), vec![int(1), int(1)]);
    }

    #[test]
    fn smith_of_rectangular_and_awkward() {
        let s = check_smith(&big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(s.invariant_factors(), vec![int(2), int(6), int(12)]);
        let s = check_smith(&big(&[&[0, 0, 3], &[0, 6, 0]]));
        assert_eq!(s.invariant_factors(), vec![int(3), int(6)]);
        let s = check_smith(&IntMatrix::zeros(2, 3));
        assert_eq!(s.invariant_factors(), vec![int(0), int(0)]);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&big(&[&[2, -1], &[-1, 2]])).unwrap(), int(3));
        assert_eq!(determinant(&big(&[&[0, 3], &[3, 0]])).unwrap(), int(-9));
        assert_eq!(determinant(&IntMatrix::zeros(0, 0)).unwrap(), int(1));
        assert_eq!(determinant(&big(&[&[0, 1, 2], &[0, 3, 4], &[5, 6, 7]])).unwrap(), int(-10));
        assert!(matches!(determinant(&IntMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&big(&[&[0, 1], &[1, 0]])).unwrap(), (1, 0, 1));
        assert_eq!(signature(&IntMatrix::zeros(3, 3)).unwrap(), (0, 3, 0));
        assert_eq!(signature(&big(&[&[1, 1], &[1, 1]])).unwrap(), (1, 1, 0));
        assert_eq!(signature(&big(&[&[-2, 1], &[1, -2]])).unwrap(), (0, 0, 2));
        assert!(matches!(signature(&big(&[&[0, 1], &[2, 0]])), Err(Error::NotSymmetric)));
    }

    #[test]
    fn charpoly_of_small_matrix() {
        // x^2 - 4x + 3
        let p = characteristic_polynomial(&big(&[&[2, 1], &[1, 2]])).unwrap();
        assert_eq!(p, vec![int(3), int(-4), int(1)]);
    }

    /// Solves `h c = v` for an HNF basis `h` by back substitution over Q.
    fn coords_in(h: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let pivots: Vec<usize> =
            (0..h.cols()).map(|k| (0..h.rows()).rev().find(|&i| !h.get(i, k).is_zero()).unwrap()).collect();
        let mut rest: Vec<BigInt> = v.to_vec();
        let mut c = vec![BigInt::zero(); h.cols()];
        for k in (0..h.cols()).rev() {
            let r = pivots[k];
            if !rest[r].is_multiple_of(h.get(r, k)) {
                return None;
            }
            c[k] = &rest[r] / h.get(r, k);
            for i in 0..h.rows() {
                let d = h.get(i, k) * &c[k];
                rest[i] -= d;
            }
        }
        rest.iter().all(Zero::is_zero).then_some(c)
    }

    #[test]
    fn hermite_of_generating_set() {
        let m = big(&[&[3, 0, 1], &[0, 3, 1]]);
        let (h, t) = hermite_with_transform(&m);
        assert_eq!((h.rows(), h.cols()), (2, 2));
        assert!(h.get(1, 0).is_zero());
        assert!(determinant(&t).unwrap().abs().is_one());
        let mh = m.mul(&t).unwrap();
        for i in 0..2 {
            for k in 0..3 {
                let want = if k < 2 { h.get(i, k).clone() } else { BigInt::zero() };
                assert_eq!(mh.get(i, k), &want);
            }
        }
        for j in 0..3 {
            assert!(coords_in(&h, &m.column(j)).is_some());
        }
        // index of the span is |det h| = 3
        assert_eq!(determinant(&h).unwrap().abs(), int(3));
        assert_eq!(hermite_normal_form(&m).unwrap(), h);
    }

    #[test]
    fn hermite_trivial_cases() {
        assert_eq!(hermite_normal_form(&IntMatrix::identity(3)).unwrap(), IntMatrix::identity(3));
        let col = big(&[&[2], &[4]]);
        assert_eq!(hermite_normal_form(&col).unwrap(), col);
        assert!(matches!(hermite_normal_form(&big(&[&[1, 2], &[2, 4]])), Err(Error::RankDeficient { rank: 1, .. })));
    }

    #[test]
    fn rational_helpers() {
        assert_eq!(mod_two(&rat(-2, 3)), rat(4, 3));
        assert_eq!(mod_one(&rat(7, 3)), rat(1, 3));
        assert_eq!(parse_rational("29/30").unwrap(), rat(29, 30));
        assert_eq!(parse_rational("-4").unwrap(), rat(-4, 1));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(6, 3)), "2");
        assert_eq!(format_rational(&rat(-61, 30)), "-61/30");
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let m = big(&[&[2, 1], &[1, 1]]);
        let inv = unimodular_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), IntMatrix::identity(2));
        assert!(unimodular_inverse(&big(&[&[2, 0], &[0, 1]])).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix(max_dim: usize) -> impl Strategy<Value = IntMatrix> {
            (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-6i64..=6, r * c)
                    .prop_map(move |v| IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap())
            })
        }

        proptest! {
            #[test]
            fn smith_is_a_valid_decomposition(m in small_matrix(5)) {
                let s = check_smith(&m);
                if m.is_square() {
                    let prod: BigInt = s.invariant_factors().iter().product();
                    prop_assert_eq!(prod, determinant(&m).unwrap().abs());
                }
            }

            #[test]
            fn hermite_spans_the_same_lattice(m in small_matrix(4)) {
                let (h, t) = hermite_with_transform(&m);
                prop_assert!(determinant(&t).unwrap().abs().is_one());
                for j in 0..m.cols() {
                    prop_assert!(coords_in(&h, &m.column(j)).is_some());
                }
            }

            #[test]
            fn signature_of_symmetric(v in proptest::collection::vec(-5i64..=5, 10)) {
                // 4x4 symmetric from the upper triangle
                let mut rows = vec![vec![0i64; 4]; 4];
                let mut it = v.into_iter();
                for i in 0..4 { for j in i..4 { let x = it.next().unwrap(); rows[i][j] = x; rows[j][i] = x; } }
                let g = IntMatrix::from_rows(&rows);
                let (p, z, n) = signature(&g).unwrap();
                prop_assert_eq!(p + z + n, 4);
                let det = determinant(&g).unwrap();
                prop_assert_eq!(det.is_zero(), z > 0);
                if z == 0 {
                    prop_assert_eq!(det.is_negative(), n % 2 == 1);
                }
            }
        }
    }
}
