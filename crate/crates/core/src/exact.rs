//! Exact integer and rational kernels.
//!
//! Everything here works over arbitrary-precision integers. There is no
//! floating point anywhere in the crate; the quantities involved (homology
//! orders, slopes, degree shifts) are small rationals whose exact values are
//! the whole point of the computation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision integer.
pub type Int = BigInt;

/// Arbitrary-precision fraction, always stored reduced with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Int::from(num), Int::from(den))
}

pub fn rat_int(n: impl Into<Int>) -> Rational {
    Rational::from_integer(n.into())
}

/// Renders `a/b`, or just `a` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a`, `a/b` or `-a/b`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: Int = num.parse().map_err(|_| bad())?;
    let den: Int = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Floor of a rational as an integer.
pub fn floor(r: &Rational) -> Int {
    r.numer().div_floor(r.denom())
}

/// Dense rectangular matrix of big integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn diagonal<I: Into<Int>>(entries: impl IntoIterator<Item = I>) -> Self {
        let entries: Vec<Int> = entries.into_iter().map(Into::into).collect();
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows<I: Into<Int> + Clone>(rows: &[Vec<I>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().cloned().map(Into::into))
            .collect();
        Ok(IntMatrix { rows: r, cols: c, data })
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

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: impl Into<Int>) {
        self.data[i * self.cols + j] = v.into();
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
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
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Matrix with row and column `k` deleted.
    pub fn without(&self, k: usize) -> IntMatrix {
        let keep: Vec<usize> = (0..self.rows).filter(|&i| i != k).collect();
        self.principal_submatrix(&keep)
    }

    /// Principal submatrix on the given index list (in that order).
    pub fn principal_submatrix(&self, idx: &[usize]) -> IntMatrix {
        let n = idx.len();
        let mut m = Self::zeros(n, n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.data[a * n + b] = self.get(i, j).clone();
            }
        }
        m
    }

    /// `v^T M w` for integer vectors.
    pub fn bilinear(&self, v: &[Int], w: &[Int]) -> Int {
        let mut acc = Int::zero();
        for i in 0..self.rows {
            if v[i].is_zero() {
                continue;
            }
            let mut s = Int::zero();
            for j in 0..self.cols {
                s += self.get(i, j) * &w[j];
            }
            acc += &v[i] * s;
        }
        acc
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<Int> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Int::one());
        }
        let mut a = self.data.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return Ok(Int::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        Ok(sign * &a[n * n - 1])
    }

    /// Exact inverse over the rationals, `None` when singular.
    pub fn rational_inverse(&self) -> Result<Option<Vec<Vec<Rational>>>> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> = self.row(i).iter().map(|x| rat_int(x.clone())).collect();
                row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(None);
            };
            a.swap(k, p);
            let pivot = a[k][k].clone();
            for x in a[k].iter_mut() {
                *x /= &pivot;
            }
            let pivot_row = a[k].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == k || row[k].is_zero() {
                    continue;
                }
                let f = row[k].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        Ok(Some(a.into_iter().map(|row| row[n..].to_vec()).collect()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &Int) {
        for j in 0..self.cols {
            let v = f * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &Int) {
        for i in 0..self.rows {
            let v = f * &self.data[i * self.cols + src];
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        int_rows::serialize(&self.to_rows(), s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = int_rows::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// JSON form of big integers: a plain number when it fits in `i64`, a
/// decimal string otherwise. Both forms are accepted on input.
pub mod int_json {
    use super::Int;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Int, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(x) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&x.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Small(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        match Wire::deserialize(d)? {
            Wire::Small(v) => Ok(Int::from(v)),
            Wire::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }

    #[derive(serde::Serialize, Deserialize)]
    #[serde(transparent)]
    pub struct Json(#[serde(with = "self")] pub Int);
}

/// [`int_json`] lifted to vectors.
pub mod int_vec {
    use super::int_json::Json;
    use super::Int;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<Json> = v.iter().cloned().map(Json).collect();
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Int>, D::Error> {
        Ok(Vec::<Json>::deserialize(d)?.into_iter().map(|j| j.0).collect())
    }
}

/// [`int_json`] lifted to nested vectors.
pub mod int_rows {
    use super::int_json::Json;
    use super::Int;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<Int>], s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<Vec<Json>> = rows.iter().map(|r| r.iter().cloned().map(Json).collect()).collect();
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Int>>, D::Error> {
        let wire = Vec::<Vec<Json>>::deserialize(d)?;
        Ok(wire.into_iter().map(|r| r.into_iter().map(|j| j.0).collect()).collect())
    }
}

impl TryFrom<Vec<Vec<Int>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Int>>) -> Result<Self> {
        IntMatrix::from_rows(&rows)
    }
}

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal with
/// `d[0] | d[1] | ...`, all nonnegative.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal entries `d_1 | d_2 | ... | d_k`, k = min(rows, cols).
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    /// Diagonal entries different from one (zeros included: they are free
    /// summands of the cokernel).
    pub fn invariant_factors(&self) -> Vec<Int> {
        self.diagonal().into_iter().filter(|d| !d.is_one()).collect()
    }

    /// Order of the cokernel, or `None` when it is infinite.
    pub fn cokernel_order(&self) -> Option<Int> {
        if self.d.rows() > self.d.cols() {
            // extra columns would be free generators; extra rows are harmless
        }
        if self.d.cols() > self.d.rows() {
            return None;
        }
        let diag = self.diagonal();
        if diag.iter().any(Zero::is_zero) {
            None
        } else {
            Some(diag.iter().product())
        }
    }
}

/// Smith normal form by classical elimination, accumulating both
/// transforms. Total on every integer matrix.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for k in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    let x = d.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SnfResult { d, u, v };
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let mut clean = true;
            for i in k + 1..rows {
                let q = d.get(i, k).div_floor(d.get(k, k));
                if !q.is_zero() {
                    d.add_row(i, k, &-&q);
                    u.add_row(i, k, &-&q);
                }
                if !d.get(i, k).is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..cols {
                let q = d.get(k, j).div_floor(d.get(k, k));
                if !q.is_zero() {
                    d.add_col(j, k, &-&q);
                    v.add_col(j, k, &-&q);
                }
                if !d.get(k, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let pivot = d.get(k, k).clone();
            let offender = (k + 1..rows).find(|&i| (k + 1..cols).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    d.add_row(k, i, &Int::one());
                    u.add_row(k, i, &Int::one());
                }
                None => break,
            }
        }
        if d.get(k, k).is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
    }
    SnfResult { d, u, v }
}

/// Sign counts of a real symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    NegativeDefinite,
    PositiveDefinite,
    Indefinite,
    Degenerate,
}

/// Exact inertia by symmetric elimination over the rationals. A zero pivot
/// with a nonzero off-diagonal partner is handled by the congruence
/// `e_k -> e_k + e_j`.
pub fn inertia(m: &IntMatrix) -> Result<Inertia> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows();
    let mut a: Vec<Vec<Rational>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(rat_int).collect())
        .collect();
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(&first) = active.first() {
        let pivot = match active.iter().copied().find(|&i| !a[i][i].is_zero()) {
            Some(p) => p,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                match pair {
                    None => {
                        out.zero += active.len();
                        break;
                    }
                    Some((i, j)) => {
                        // row/col i += row/col j
                        for t in 0..n {
                            let v = a[j][t].clone();
                            a[i][t] += v;
                        }
                        for t in 0..n {
                            let v = a[t][j].clone();
                            a[t][i] += v;
                        }
                        i
                    }
                }
            }
        };
        let _ = first;
        let p = a[pivot][pivot].clone();
        if p.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        active.retain(|&i| i != pivot);
        for &i in &active {
            if a[i][pivot].is_zero() {
                continue;
            }
            let f = &a[i][pivot] / &p;
            for &j in &active {
                let v = &f * &a[pivot][j];
                a[i][j] -= v;
            }
        }
        for &i in &active {
            a[i][pivot] = Rational::zero();
            a[pivot][i] = Rational::zero();
        }
    }
    Ok(out)
}

pub fn definiteness(m: &IntMatrix) -> Result<Definiteness> {
    let i = inertia(m)?;
    let n = m.rows();
    Ok(if i.zero > 0 {
        Definiteness::Degenerate
    } else if i.negative == n {
        Definiteness::NegativeDefinite
    } else if i.positive == n {
        Definiteness::PositiveDefinite
    } else {
        Definiteness::Indefinite
    })
}

/// Determinants of the leading principal minors `D_1, ..., D_n`.
pub fn leading_principal_minors(m: &IntMatrix) -> Result<Vec<Int>> {
    if !m.is_square() {
        return Err(Error::Shape("minors of a non-square matrix".into()));
    }
    (1..=m.rows())
        .map(|k| m.principal_submatrix(&(0..k).collect::<Vec<_>>()).determinant())
        .collect()
}

/// Coefficients `[a_1, ..., a_k]` of `a_1 - 1/(a_2 - 1/(... - 1/a_k))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegCf {
    #[serde(with = "int_vec")]
    pub coefficients: Vec<Int>,
}

impl NegCf {
    pub fn evaluate(&self) -> Rational {
        eval_neg_cf(&self.coefficients)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Folds `a_1 - 1/(a_2 - ...)` from the right. An intermediate zero makes the
/// next quotient infinite, which contributes `- 1/inf = 0`.
pub fn eval_neg_cf(coefficients: &[Int]) -> Rational {
    let mut acc: Option<Rational> = None; // None = infinity
    for a in coefficients.iter().rev() {
        let a = rat_int(a.clone());
        acc = Some(match acc {
            None => a,
            Some(x) if x.is_zero() => return eval_tail_inf(coefficients),
            Some(x) => a - x.recip(),
        });
    }
    acc.unwrap_or_else(Rational::zero)
}

// Only reachable for chains containing interior zeros; callers in this crate
// never produce them, but evaluation stays total.
fn eval_tail_inf(coefficients: &[Int]) -> Rational {
    let n = coefficients.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, a) in coefficients.iter().enumerate() {
        m.set(i, i, a.clone());
        if i + 1 < n {
            m.set(i, i + 1, 1);
            m.set(i + 1, i, 1);
        }
    }
    let num = m.determinant().expect("square");
    let den = m.without(0).determinant().expect("square");
    if den.is_zero() {
        Rational::zero()
    } else {
        Rational::new(num, den)
    }
}

/// Negative continued fraction of `r < -1`; every coefficient is `<= -2`.
pub fn neg_continued_fraction(r: &Rational) -> Result<NegCf> {
    if *r >= -Rational::one() {
        return Err(Error::OutOfDomain(format!(
            "negative continued fraction needs r < -1, got {}",
            format_rational(r)
        )));
    }
    let mut x = r.clone();
    let mut coefficients = Vec::new();
    loop {
        let a = floor(&x);
        let a_rat = rat_int(a.clone());
        coefficients.push(a);
        if x == a_rat {
            break;
        }
        x = (a_rat - x).recip();
    }
    Ok(NegCf { coefficients })
}

/// Splits any rational as `head - 1/tail` with `head = floor(r)` and `tail`
/// in the canonical domain, or returns `(r, None)` when `r` is integral.
/// This is the slam-dunk chain used to integralize rational framings.
pub fn integral_chain(r: &Rational) -> (Int, Option<NegCf>) {
    let head = floor(r);
    if r.is_integer() {
        return (head, None);
    }
    let rest = (rat_int(head.clone()) - r).recip();
    let tail = neg_continued_fraction(&rest).expect("1/(floor(r) - r) < -1");
    (head, Some(tail))
}

/// Multiplicative inverse of `a` modulo `m > 0`, if it exists.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let g = a.mod_floor(m).extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn snf_coprime_diagonal_merges() {
        let s = smith_normal_form(&IntMatrix::diagonal([2, 3]));
        assert_eq!(s.diagonal(), vec![int(1), int(6)]);
    }

    #[test]
    fn snf_identity_is_fixed() {
        for n in 0..5 {
            let s = smith_normal_form(&IntMatrix::identity(n));
            assert_eq!(s.d, IntMatrix::identity(n));
        }
    }

    #[test]
    fn snf_zero_and_rectangular() {
        let s = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert!(s.diagonal().iter().all(Zero::is_zero));
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![int(2), int(6), int(12)]);
        let r = m(&[&[4, 6], &[2, 8], &[0, 10]]);
        let s = smith_normal_form(&r);
        assert_eq!(s.u.mul(&r).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.diagonal(), vec![int(2), int(10)]);
    }

    #[test]
    fn bareiss_matches_small_cases() {
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant().unwrap(), int(-1));
        assert_eq!(m(&[&[-2, 1], &[1, -2]]).determinant().unwrap(), int(3));
        assert_eq!(IntMatrix::zeros(0, 0).determinant().unwrap(), int(1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).determinant().unwrap(), int(0));
    }

    #[test]
    fn definiteness_basic() {
        assert_eq!(definiteness(&m(&[&[-2]])).unwrap(), Definiteness::NegativeDefinite);
        assert_eq!(definiteness(&m(&[&[0]])).unwrap(), Definiteness::Degenerate);
        assert_eq!(definiteness(&m(&[&[0, 1], &[1, 0]])).unwrap(), Definiteness::Indefinite);
        assert_eq!(
            definiteness(&m(&[&[2, 1], &[1, 2]])).unwrap(),
            Definiteness::PositiveDefinite
        );
        assert!(matches!(
            definiteness(&m(&[&[0, 1], &[2, 0]])),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn inertia_with_zero_diagonal() {
        let h = m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -3]]);
        let i = inertia(&h).unwrap();
        assert_eq!((i.positive, i.negative, i.zero), (1, 2, 0));
    }

    #[test]
    fn neg_cf_examples() {
        assert_eq!(neg_continued_fraction(&rat(-2, 1)).unwrap().coefficients, vec![int(-2)]);
        let cf = neg_continued_fraction(&rat(-7, 3)).unwrap();
        assert_eq!(cf.coefficients, vec![int(-3), int(-2), int(-2)]);
        assert_eq!(cf.evaluate(), rat(-7, 3));
        let six = neg_continued_fraction(&rat(-7, 6)).unwrap();
        assert_eq!(six.coefficients, vec![int(-2); 6]);
        assert!(neg_continued_fraction(&rat(-1, 1)).is_err());
        assert!(neg_continued_fraction(&rat(3, 2)).is_err());
    }

    #[test]
    fn integral_chain_reassembles() {
        for (n, d) in [(89, 8), (-7, 6), (79, 6), (1, 2), (-1, 3), (5, 1)] {
            let r = rat(n, d);
            let (head, tail) = integral_chain(&r);
            let back = match tail {
                None => rat_int(head),
                Some(t) => rat_int(head) - t.evaluate().recip(),
            };
            assert_eq!(back, r);
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-7/6").unwrap(), rat(-7, 6));
        assert_eq!(parse_rational(" 12 ").unwrap(), rat(12, 1));
        assert_eq!(parse_rational("4/-8").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(89, 8)), "89/8");
        assert_eq!(format_rational(&rat(-4, 2)), "-2");
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let a = m(&[&[-2, 1], &[1, -3]]);
        let inv = a.rational_inverse().unwrap().unwrap();
        assert_eq!(inv[0][0], rat(-3, 5));
        assert_eq!(inv[0][1], rat(-1, 5));
        assert!(m(&[&[1, 1], &[1, 1]]).rational_inverse().unwrap().is_none());
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(mod_inverse(&int(3), &int(7)), Some(int(5)));
        assert_eq!(
            mod_inverse(&int(-22), &int(89)).map(|x| x * int(-22) % int(89)),
            Some(int(-88))
        );
        assert_eq!(mod_inverse(&int(6), &int(9)), None);
    }
}
