//! Slope calculus on the Seifert fibration `M(-1/p, n/(pn+1), 1/(p(n+1)+1))`
//! and the sign-vector enumeration bounding positive tight structures.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, rat, rat_int, Rational};
use crate::surgery::Coefficient;

/// A slope of a torus; `Infinite` is the slope `1/0`.
pub type Slope = Coefficient;

/// Tight structures on the complement of the three singular fibers that
/// each surviving sign vector can extend.
pub const STRUCTURES_PER_SURVIVOR: u64 = 2;

fn check_pn(p: u64, n: u64) -> Result<(i64, i64)> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!(
            "need p >= 2 and n >= 1, got p={p}, n={n}"
        )));
    }
    Ok((p as i64, n as i64))
}

/// Unnormalized Seifert invariants `M(a, b, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertTriple {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl SeifertTriple {
    pub fn for_family(p: u64, n: u64) -> Result<Self> {
        let (p, n) = check_pn(p, n)?;
        Ok(SeifertTriple {
            a: rat(-1, p),
            b: rat(n, p * n + 1),
            c: rat(1, p * (n + 1) + 1),
        })
    }

    /// Surgery coefficients `-1/a, -1/b, -1/c` of the meridians around a
    /// 0-framed central unknot.
    pub fn surgery_coefficients(&self) -> [Rational; 3] {
        [&self.a, &self.b, &self.c].map(|x| -x.recip())
    }
}

/// Integer 2×2 matrix of determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct GluingMatrix([[i64; 2]; 2]);

impl GluingMatrix {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(Error::InvalidParameters(format!(
                "gluing matrix {m:?} has determinant {det}"
            )));
        }
        Ok(GluingMatrix(m))
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.0
    }

    pub fn determinant(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Ratio of the first column, `m00 / m10`.
    pub fn first_column_ratio(&self) -> Slope {
        Coefficient::from_pair(int(self.0[0][0]), int(self.0[1][0]))
    }
}

impl TryFrom<[[i64; 2]; 2]> for GluingMatrix {
    type Error = Error;
    fn try_from(m: [[i64; 2]; 2]) -> Result<Self> {
        GluingMatrix::new(m)
    }
}

impl From<GluingMatrix> for [[i64; 2]; 2] {
    fn from(g: GluingMatrix) -> Self {
        g.0
    }
}

/// Gluing maps from the boundary of each solid torus to the boundary of
/// the complement of the corresponding singular fiber.
pub fn gluing_matrices(p: u64, n: u64) -> Result<[GluingMatrix; 3]> {
    let (p, n) = check_pn(p, n)?;
    Ok([
        GluingMatrix::new([[p, -1], [1, 0]])?,
        GluingMatrix::new([[p * n + 1, p * n - p + 1], [-n, 1 - n]])?,
        GluingMatrix::new([[p * (n + 1) + 1, 1], [-1, 0]])?,
    ])
}

/// Vertical slopes `v_i` (regular fiber) and critical slopes `c_i`
/// (meridians of the singular-fiber neighbourhoods).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slopes {
    pub vertical: [Rational; 3],
    pub critical: [Rational; 3],
}

pub fn slopes(p: u64, n: u64) -> Result<Slopes> {
    let (p, n) = check_pn(p, n)?;
    assert!(p * n - p + 1 != 0, "pn - p + 1 > 0 for p >= 2, n >= 1");
    Ok(Slopes {
        vertical: [rat_int(p), -rat(p * n + 1, p * n - p + 1), rat_int(-(p * (n + 1) + 1))],
        critical: [rat(1, p), rat(-n, p * n + 1), rat(-1, p * (n + 1) + 1)],
    })
}

/// Twisting numbers of Legendrian realizations of the singular fibers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistState {
    pub m1: i64,
    pub m2: i64,
    pub m3: i64,
}

impl TwistState {
    pub const NORMALIZED: TwistState = TwistState { m1: 0, m2: -1, m3: -1 };
}

/// Slopes of the standard neighbourhood boundaries seen from the
/// complement. A vanishing denominator gives an infinite slope.
pub fn boundary_slopes(p: u64, n: u64, t: TwistState) -> Result<[Slope; 3]> {
    let (p, n) = check_pn(p, n)?;
    let TwistState { m1, m2, m3 } = t;
    let frac = |num: i64, den: i64| Coefficient::from_pair(int(num), int(den));
    Ok([
        frac(m1, p * m1 - 1),
        frac(-(n * (m2 + 1) - 1), (p * n + 1) * m2 + p * (n - 1) + 1),
        frac(-m3, (p * (n + 1) + 1) * m3 + 1),
    ])
}

/// Numbers of positive basic slices in the three layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignVector {
    pub q1: u64,
    pub q2: u64,
    pub q3: u64,
}

impl SignVector {
    pub fn new(q1: u64, q2: u64, q3: u64) -> Self {
        SignVector { q1, q2, q3 }
    }

    pub fn in_range(&self, p: u64, n: u64) -> bool {
        self.q1 <= 1 && self.q2 <= p && self.q3 <= p * (n + 1)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.q1, self.q2, self.q3)
    }
}

/// Predicates each of which forces an overtwisted disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    /// `q2 <= q3 <= q2 + pn`
    Potatos,
    /// `q1 = 0, q3 <= p - 1` or `q1 = 1, q3 >= pn + 1`
    Box,
    /// `(q1, q2)` is `(0, 0)` or `(1, p)`
    Stop,
    /// one of four isolated vectors
    Page28,
}

impl Filter {
    /// Fixed reporting order.
    pub const ORDER: [Filter; 4] = [Filter::Potatos, Filter::Box, Filter::Stop, Filter::Page28];

    pub fn name(self) -> &'static str {
        match self {
            Filter::Potatos => "potatos",
            Filter::Box => "box",
            Filter::Stop => "stop",
            Filter::Page28 => "page28",
        }
    }

    pub fn matches(self, q: SignVector, p: u64, n: u64) -> bool {
        let SignVector { q1, q2, q3 } = q;
        let pn = p * n;
        match self {
            Filter::Potatos => q2 <= q3 && q3 <= q2 + pn,
            Filter::Box => (q1 == 0 && q3 < p) || (q1 == 1 && q3 > pn),
            Filter::Stop => (q1, q2) == (0, 0) || (q1, q2) == (1, p),
            Filter::Page28 => {
                let listed = [
                    (0, 1, pn + 2),
                    (0, p - 1, pn + p),
                    (1, 1, 0),
                    (1, p - 1, p.saturating_sub(2)),
                ];
                listed.contains(&(q1, q2, q3))
            }
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// First filter (in [`Filter::ORDER`]) that kills `q`, if any.
pub fn is_overtwisted_vector(q: SignVector, p: u64, n: u64) -> Result<Option<Filter>> {
    check_pn(p, n)?;
    if !q.in_range(p, n) {
        return Err(Error::OutOfDomain(format!(
            "sign vector {q} out of range for p={p}, n={n}"
        )));
    }
    Ok(Filter::ORDER.into_iter().find(|f| f.matches(q, p, n)))
}

/// All in-range sign vectors that survive every filter, sorted
/// lexicographically.
pub fn enumerate_candidates(p: u64, n: u64) -> Result<Vec<SignVector>> {
    check_pn(p, n)?;
    let mut out: Vec<SignVector> = (0..=p * (n + 1))
        .into_par_iter()
        .flat_map_iter(|q3| (0..=1u64).flat_map(move |q1| (0..=p).map(move |q2| SignVector::new(q1, q2, q3))))
        .filter(|&q| Filter::ORDER.iter().all(|f| !f.matches(q, p, n)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Upper bound `2·max(p(p-1) - 4, 0)` on positive tight structures.
pub fn upper_bound(p: u64, n: u64) -> Result<u64> {
    check_pn(p, n)?;
    Ok(STRUCTURES_PER_SURVIVOR * (p * (p - 1)).saturating_sub(4))
}

/// First `(p, n)` in the box (p-major) where the number of survivors times
/// [`STRUCTURES_PER_SURVIVOR`] differs from [`upper_bound`].
pub fn survivor_count_counterexample(p_max: u64, n_max: u64) -> Result<Option<(u64, u64)>> {
    for p in 2..=p_max {
        for n in 1..=n_max {
            let count = enumerate_candidates(p, n)?.len() as u64;
            if STRUCTURES_PER_SURVIVOR * count != upper_bound(p, n)? {
                return Ok(Some((p, n)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_one_survivors() {
        let s = enumerate_candidates(3, 1).unwrap();
        assert_eq!(s, vec![SignVector::new(0, 1, 6), SignVector::new(1, 2, 0)]);
    }

    #[test]
    fn filter_examples() {
        let f = |q1, q2, q3| is_overtwisted_vector(SignVector::new(q1, q2, q3), 3, 1).unwrap();
        assert_eq!(f(0, 0, 5), Some(Filter::Stop));
        assert_eq!(f(0, 1, 6), None);
        assert_eq!(f(0, 1, 5), Some(Filter::Page28));
        assert!(is_overtwisted_vector(SignVector::new(2, 0, 0), 3, 1).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(upper_bound(2, 5).unwrap(), 0);
        assert_eq!(upper_bound(3, 1).unwrap(), 4);
        assert_eq!(upper_bound(5, 2).unwrap(), 32);
    }
}
