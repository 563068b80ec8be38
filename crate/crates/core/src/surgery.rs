//! Surgery presentations at the level of linking matrices.
//!
//! A [`FramedLink`] stores only framings and pairwise linking numbers. Every
//! homological quantity the families below need is determined by that data;
//! whether a component is actually an unknot is the caller's business.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    format_rational, int, int_json, integral_chain, parse_rational, rat_int, smith_normal_form, Int, IntMatrix,
    Rational, SnfResult,
};

/// Surgery coefficient `p/q`; `Infinite` is `1/0`, i.e. no surgery at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Finite(Rational),
    Infinite,
}

impl Coefficient {
    pub fn integer(n: i64) -> Self {
        Coefficient::Finite(rat_int(n))
    }

    /// `(p, q)` with `q >= 0`; infinity is `(1, 0)`.
    pub fn as_pair(&self) -> (Int, Int) {
        match self {
            Coefficient::Finite(r) => (r.numer().clone(), r.denom().clone()),
            Coefficient::Infinite => (Int::one(), Int::zero()),
        }
    }

    pub fn from_pair(p: Int, q: Int) -> Self {
        if q.is_zero() {
            Coefficient::Infinite
        } else {
            Coefficient::Finite(Rational::new(p, q))
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Coefficient::Finite(r) => Some(r),
            Coefficient::Infinite => None,
        }
    }

    fn shift(&self, by: &Int) -> Self {
        match self {
            Coefficient::Finite(r) => Coefficient::Finite(r + rat_int(by.clone())),
            Coefficient::Infinite => Coefficient::Infinite,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" => Ok(Coefficient::Infinite),
            other => parse_rational(other).map(Coefficient::Finite),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Finite(r) => f.write_str(&format_rational(r)),
            Coefficient::Infinite => f.write_str("inf"),
        }
    }
}

impl From<Rational> for Coefficient {
    fn from(r: Rational) -> Self {
        Coefficient::Finite(r)
    }
}

/// Framed link in S³ described by framings and linking numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LinkDoc", into = "LinkDoc")]
pub struct FramedLink {
    labels: Vec<String>,
    framings: Vec<Coefficient>,
    /// Symmetric; the diagonal is ignored.
    linking: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct ComponentDoc {
    framing: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct LinkDoc {
    components: Vec<ComponentDoc>,
    #[serde(with = "crate::exact::int_rows")]
    linking: Vec<Vec<Int>>,
}

impl TryFrom<LinkDoc> for FramedLink {
    type Error = Error;
    fn try_from(doc: LinkDoc) -> Result<Self> {
        let n = doc.components.len();
        let linking = if doc.linking.is_empty() && n == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            IntMatrix::from_rows(&doc.linking)?
        };
        let mut framings = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for (i, c) in doc.components.into_iter().enumerate() {
            framings.push(Coefficient::parse(&c.framing)?);
            labels.push(c.label.unwrap_or_else(|| default_label(i)));
        }
        FramedLink::with_labels(labels, framings, linking)
    }
}

impl From<FramedLink> for LinkDoc {
    fn from(l: FramedLink) -> Self {
        let components = l
            .framings
            .iter()
            .zip(&l.labels)
            .enumerate()
            .map(|(i, (f, lab))| ComponentDoc {
                framing: f.to_string(),
                label: (*lab != default_label(i)).then(|| lab.clone()),
            })
            .collect();
        LinkDoc {
            components,
            linking: l.linking.to_rows(),
        }
    }
}

fn default_label(i: usize) -> String {
    format!("K{i}")
}

impl FramedLink {
    pub fn new(framings: Vec<Coefficient>, linking: IntMatrix) -> Result<Self> {
        let labels = (0..framings.len()).map(default_label).collect();
        Self::with_labels(labels, framings, linking)
    }

    pub fn with_labels(labels: Vec<String>, framings: Vec<Coefficient>, mut linking: IntMatrix) -> Result<Self> {
        let n = framings.len();
        if labels.len() != n || linking.rows() != n || linking.cols() != n {
            return Err(Error::Shape(format!(
                "{n} framings, {} labels, {}x{} linking matrix",
                labels.len(),
                linking.rows(),
                linking.cols()
            )));
        }
        if !linking.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        for i in 0..n {
            linking.set(i, i, 0);
        }
        Ok(FramedLink {
            labels,
            framings,
            linking,
        })
    }

    /// Integer-framed link straight from a linking matrix with framings on
    /// the diagonal.
    pub fn from_linking_matrix(m: &IntMatrix) -> Result<Self> {
        let framings = (0..m.rows())
            .map(|i| Coefficient::Finite(rat_int(m.get(i, i).clone())))
            .collect();
        Self::new(framings, m.clone())
    }

    pub fn unknot(r: Coefficient) -> Self {
        Self::new(vec![r], IntMatrix::zeros(1, 1)).expect("1x1")
    }

    pub fn len(&self) -> usize {
        self.framings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.framings.is_empty()
    }

    pub fn framings(&self) -> &[Coefficient] {
        &self.framings
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn linking(&self, i: usize, j: usize) -> &Int {
        self.linking.get(i, j)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Appends a component and returns its index.
    pub fn push(&mut self, label: impl Into<String>, framing: Coefficient, links: &[(usize, i64)]) -> usize {
        let n = self.len();
        let mut m = IntMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.linking.get(i, j).clone());
            }
        }
        for &(j, l) in links {
            m.set(j, n, l);
            m.set(n, j, l);
        }
        self.linking = m;
        self.framings.push(framing);
        self.labels.push(label.into());
        n
    }

    pub fn remove(&self, k: usize) -> FramedLink {
        let mut labels = self.labels.clone();
        let mut framings = self.framings.clone();
        labels.remove(k);
        framings.remove(k);
        FramedLink {
            labels,
            framings,
            linking: self.linking.without(k),
        }
    }

    /// Drops every `Infinite` component; they do not change the manifold.
    pub fn without_infinite(&self) -> FramedLink {
        let mut out = self.clone();
        while let Some(k) = out.framings.iter().position(|f| *f == Coefficient::Infinite) {
            out = out.remove(k);
        }
        out
    }

    /// Mirror image: all framings and linking numbers negated.
    pub fn mirror(&self) -> FramedLink {
        let framings = self
            .framings
            .iter()
            .map(|f| match f {
                Coefficient::Finite(r) => Coefficient::Finite(-r),
                Coefficient::Infinite => Coefficient::Infinite,
            })
            .collect();
        let mut linking = self.linking.clone();
        for i in 0..self.len() {
            for j in 0..self.len() {
                let v = -linking.get(i, j).clone();
                linking.set(i, j, v);
            }
        }
        FramedLink {
            labels: self.labels.clone(),
            framings,
            linking,
        }
    }

    /// Integral linking matrix presentation. Rational framings `r` become
    /// `floor(r)` plus a chain of meridians with weights from the negative
    /// continued fraction of `1/(floor(r) - r)` (slam dunk); the chain
    /// components are labelled `label.1`, `label.2`, ...
    pub fn presentation(&self) -> HomologyPresentation {
        let link = self.without_infinite();
        let mut labels = link.labels.clone();
        let chains: Vec<_> = link
            .framings
            .iter()
            .map(|f| integral_chain(f.finite().expect("infinite components removed")))
            .collect();
        let mut diag: Vec<Int> = chains.iter().map(|(head, _)| head.clone()).collect();
        let mut extra: Vec<(usize, usize)> = Vec::new();
        for (i, (_, tail)) in chains.into_iter().enumerate() {
            if let Some(tail) = tail {
                let mut prev = i;
                for (j, a) in tail.coefficients.iter().enumerate() {
                    labels.push(format!("{}.{}", link.labels[i], j + 1));
                    diag.push(a.clone());
                    let idx = diag.len() - 1;
                    extra.push((prev, idx));
                    prev = idx;
                }
            }
        }
        let n = diag.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..link.len() {
            for j in 0..link.len() {
                m.set(i, j, link.linking.get(i, j).clone());
            }
        }
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        for (a, b) in extra {
            m.set(a, b, 1);
            m.set(b, a, 1);
        }
        HomologyPresentation {
            relations: m,
            meridian_labels: labels,
        }
    }

    /// Relation matrix read directly from the rational coefficients:
    /// component `i` with coefficient `p_i/q_i` contributes the relation
    /// `p_i μ_i + q_i Σ_j lk(i,j) μ_j = 0`. No integralization involved.
    pub fn rational_presentation(&self) -> HomologyPresentation {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            let (p, q) = self.framings[i].as_pair();
            for j in 0..n {
                let v = if i == j { p.clone() } else { &q * self.linking.get(i, j) };
                m.set(i, j, v);
            }
        }
        HomologyPresentation {
            relations: m,
            meridian_labels: self.labels.clone(),
        }
    }
}

/// Order of H₁ of the surgered manifold; zero encodes an infinite group.
/// Uses the determinant of [`FramedLink::rational_presentation`], whose
/// size stays the number of components however large the coefficients get.
pub fn h1_order(link: &FramedLink) -> Int {
    link.rational_presentation()
        .relations
        .determinant()
        .expect("square")
        .abs()
}

/// Abelian group presented by the rows of a square integer matrix acting on
/// the meridians.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyPresentation {
    pub relations: IntMatrix,
    pub meridian_labels: Vec<String>,
}

/// Every meridian written as a multiple of one generator of a cyclic H₁.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReduction {
    #[serde(with = "int_json")]
    pub order: Int,
    pub generator: String,
    pub coefficients: Vec<Multiple>,
}

/// `μ_label = coefficient · generator`, with `0 <= coefficient < order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiple {
    pub label: String,
    #[serde(with = "int_json")]
    pub coefficient: Int,
}

impl GeneratorReduction {
    pub fn coefficient(&self, label: &str) -> Option<&Int> {
        self.coefficients
            .iter()
            .find(|m| m.label == label)
            .map(|m| &m.coefficient)
    }
}

impl HomologyPresentation {
    pub fn snf(&self) -> SnfResult {
        smith_normal_form(&self.relations)
    }

    /// `|det|`, which is zero exactly when H₁ is infinite.
    pub fn order_or_zero(&self) -> Int {
        self.relations.determinant().expect("square presentation").abs()
    }

    pub fn order(&self) -> Result<Int> {
        let h = self.order_or_zero();
        if h.is_zero() {
            Err(Error::InfiniteHomology)
        } else {
            Ok(h)
        }
    }

    /// Invariant factors `> 1` (zeros included) of the presented group.
    pub fn invariant_factors(&self) -> Vec<Int> {
        self.snf().invariant_factors()
    }

    /// `2^(number of even invariant factors)` = |H¹(Y; Z/2)| for finite H₁.
    pub fn spin_count(&self) -> Result<Int> {
        let f = self.invariant_factors();
        if f.iter().any(Zero::is_zero) {
            return Err(Error::InfiniteHomology);
        }
        let even = f.iter().filter(|d| d.is_even()).count();
        Ok(Int::one() << even)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.meridian_labels.iter().position(|l| l == label)
    }

    /// Writes every meridian as a multiple of `generator`, reading the
    /// isomorphism to `Z/h` off the SNF column transform.
    pub fn generator_reduction(&self, generator: &str) -> Result<GeneratorReduction> {
        let g = self
            .index_of(generator)
            .ok_or_else(|| Error::InvalidParameters(format!("no meridian labelled {generator:?}")))?;
        let snf = self.snf();
        let diag = snf.diagonal();
        if diag.iter().any(Zero::is_zero) {
            return Err(Error::InfiniteHomology);
        }
        let nontrivial: Vec<usize> = (0..diag.len()).filter(|&k| !diag[k].is_one()).collect();
        if nontrivial.len() > 1 {
            return Err(Error::NotCyclic(
                nontrivial.iter().map(|&k| diag[k].to_string()).collect(),
            ));
        }
        let n = self.meridian_labels.len();
        let Some(&k) = nontrivial.first() else {
            // trivial group: everything is 0 = 0 · generator
            return Ok(GeneratorReduction {
                order: Int::one(),
                generator: generator.to_string(),
                coefficients: self
                    .meridian_labels
                    .iter()
                    .map(|l| Multiple {
                        label: l.clone(),
                        coefficient: Int::zero(),
                    })
                    .collect(),
            });
        };
        let h = diag[k].clone();
        // Row relations R: x -> x·V identifies Z^n / Z^n R with Z^n / Z^n D.
        let phi = |i: usize| snf.v.get(i, k).mod_floor(&h);
        let inv = crate::exact::mod_inverse(&phi(g), &h).ok_or_else(|| Error::NotGenerator(generator.to_string()))?;
        let coefficients = (0..n)
            .map(|i| Multiple {
                label: self.meridian_labels[i].clone(),
                coefficient: (phi(i) * &inv).mod_floor(&h),
            })
            .collect();
        Ok(GeneratorReduction {
            order: h,
            generator: generator.to_string(),
            coefficients,
        })
    }
}

fn sign_of(c: &Coefficient) -> Option<i64> {
    match c {
        Coefficient::Finite(r) if *r == rat_int(1) => Some(1),
        Coefficient::Finite(r) if *r == rat_int(-1) => Some(-1),
        _ => None,
    }
}

/// Blows down a `±1`-framed unknot (unknottedness is asserted by the
/// caller). With `ε` its framing: `f_i -= ε l_i²`, `l_ij -= ε l_i l_j`.
pub fn blow_down(link: &FramedLink, k: usize) -> Result<FramedLink> {
    if k >= link.len() {
        return Err(Error::InvalidMove(format!("no component {k}")));
    }
    let eps = sign_of(&link.framings[k])
        .ok_or_else(|| Error::InvalidMove(format!("blow-down needs framing ±1, got {}", link.framings[k])))?;
    Ok(twist_around(link, k, -eps).remove(k))
}

/// Adds an unknot with framing `eps = ±1` having the given linking numbers;
/// the inverse of [`blow_down`].
pub fn blow_up(link: &FramedLink, eps: i64, links: &[(usize, i64)]) -> Result<FramedLink> {
    if eps != 1 && eps != -1 {
        return Err(Error::InvalidMove(format!("blow-up sign must be ±1, got {eps}")));
    }
    if let Some(&(j, _)) = links.iter().find(|(j, _)| *j >= link.len()) {
        return Err(Error::InvalidMove(format!("no component {j}")));
    }
    let mut out = link.clone();
    let k = out.push(format!("e{}", link.len()), Coefficient::integer(eps), links);
    let out = twist_around(&out, k, eps);
    Ok(out)
}

/// `t` full twists along component `k`: every other framing moves by
/// `t·lk(i,k)²` and every other linking number by `t·lk(i,k)·lk(j,k)`.
/// Component `k` itself is left untouched.
fn twist_around(link: &FramedLink, k: usize, t: i64) -> FramedLink {
    let t = int(t);
    let n = link.len();
    let mut out = link.clone();
    for i in (0..n).filter(|&i| i != k) {
        let li = link.linking.get(i, k);
        if li.is_zero() {
            continue;
        }
        out.framings[i] = link.framings[i].shift(&(&t * li * li));
        for j in (0..n).filter(|&j| j != k && j != i) {
            let v = link.linking.get(i, j) + &t * li * link.linking.get(j, k);
            out.linking.set(i, j, v);
        }
    }
    out
}

/// Rolfsen twist on an unknotted component: its coefficient `p/q` becomes
/// `p/(q + t p)` (possibly infinite) and the rest of the link is twisted
/// `t` times around it.
pub fn rolfsen_twist(link: &FramedLink, k: usize, t: i64) -> Result<FramedLink> {
    if k >= link.len() {
        return Err(Error::InvalidMove(format!("no component {k}")));
    }
    let (p, q) = link.framings[k].as_pair();
    let mut out = twist_around(link, k, t);
    out.framings[k] = Coefficient::from_pair(p.clone(), q + int(t) * p);
    Ok(out)
}

/// Front projection data of a Legendrian knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianData {
    pub writhe: i64,
    pub up_cusps: u64,
    pub down_cusps: u64,
}

/// `(tb, rot)` from a front: `tb = writhe - cusps/2`, `rot = (c_d - c_u)/2`.
pub fn legendrian_invariants(d: &LegendrianData) -> Result<(i64, i64)> {
    let total = d.up_cusps + d.down_cusps;
    if total % 2 == 1 || total < 2 {
        return Err(Error::InvalidParameters(format!(
            "a closed front needs an even number (>= 2) of cusps, got {total}"
        )));
    }
    let tb = d.writhe - (total / 2) as i64;
    let rot = (d.down_cusps as i64 - d.up_cusps as i64) / 2;
    Ok((tb, rot))
}

/// Smooth framing of contact `±1` surgery on a Legendrian knot.
pub fn contact_surgery_framing(tb: i64, sign: i64) -> i64 {
    tb + sign.signum()
}

/// Four-ball genus of the `(p,q)` torus knot.
pub fn slice_genus_torus_knot(p: u64, q: u64) -> Result<u64> {
    if p < 2 || q < 2 || p.gcd(&q) != 1 {
        return Err(Error::InvalidParameters(format!(
            "torus knot needs coprime p, q >= 2, got ({p}, {q})"
        )));
    }
    Ok((p - 1) * (q - 1) / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LSpaceBound {
    /// `r >= 2g - 1`
    #[default]
    Inclusive,
    /// `r > 2g - 1`
    Strict,
}

/// Surgery slope test for L-spaces on a positive torus knot.
pub fn is_lspace_surgery(p: u64, q: u64, r: &Rational) -> Result<bool> {
    is_lspace_surgery_with(p, q, r, LSpaceBound::Inclusive)
}

pub fn is_lspace_surgery_with(p: u64, q: u64, r: &Rational, bound: LSpaceBound) -> Result<bool> {
    let g = slice_genus_torus_knot(p, q)?;
    let threshold = rat_int(2 * g as i64 - 1);
    Ok(match bound {
        LSpaceBound::Inclusive => *r >= threshold,
        LSpaceBound::Strict => *r > threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Standard,
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Standard => 1,
            Orientation::Reversed => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Standard => Orientation::Reversed,
            Orientation::Reversed => Orientation::Standard,
        }
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i64::deserialize(d)? {
            1 => Ok(Orientation::Standard),
            -1 => Ok(Orientation::Reversed),
            other => Err(serde::de::Error::custom(format!("orientation must be ±1, got {other}"))),
        }
    }
}

/// `L(p,q) := S³_{p/q}(unknot)`, optionally with reversed orientation.
/// `L(1,0)` is S³.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LensSpace {
    pub p: u64,
    pub q: u64,
    pub orientation: Orientation,
}

impl LensSpace {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        let ok = if p == 1 {
            q == 0
        } else {
            p > q && q >= 1 && p.gcd(&q) == 1
        };
        if !ok {
            return Err(Error::InvalidParameters(format!("L({p},{q}) needs p > q >= 1 coprime")));
        }
        Ok(LensSpace {
            p,
            q,
            orientation: Orientation::Standard,
        })
    }

    pub fn sphere() -> Self {
        LensSpace {
            p: 1,
            q: 0,
            orientation: Orientation::Standard,
        }
    }

    pub fn reversed(self) -> Self {
        LensSpace {
            orientation: self.orientation.flip(),
            ..self
        }
    }

    /// The lens space `S³_r(unknot)` for a nonzero rational `r`, normalized
    /// to `0 < q < p` with orientation carrying the sign of `r`.
    pub fn from_unknot_surgery(r: &Rational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InfiniteHomology);
        }
        let to_u64 = |x: &Int| -> Result<u64> {
            u64::try_from(x.clone()).map_err(|_| Error::OutOfDomain(format!("lens parameter {x} too large")))
        };
        let p = to_u64(&r.numer().abs())?;
        let q = to_u64(&r.denom().mod_floor(&r.numer().abs()))?;
        let base = if p == 1 { Self::sphere() } else { Self::new(p, q)? };
        Ok(if r.is_negative() { base.reversed() } else { base })
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.orientation == Orientation::Reversed {
            "-"
        } else {
            ""
        };
        write!(f, "{sign}L({},{})", self.p, self.q)
    }
}

/// Splits the linking graph into connected pieces, each of which must be a
/// linear chain with linking numbers ±1. Every piece is listed from one end:
/// an end for which `prefer` holds if there is one, otherwise the end with
/// the lower index. Pieces come in order of their lowest index.
pub fn chain_pieces(link: &FramedLink, prefer: impl Fn(usize) -> bool) -> Result<Vec<Vec<usize>>> {
    let n = link.len();
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && !link.linking.get(i, j).is_zero())
                .collect()
        })
        .collect();
    let not_chain = || Error::OutOfDomain("linking graph piece is not a linear chain".into());
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            for &j in &nbrs[comp[k]] {
                if !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        let bad_degree = comp.iter().any(|&i| nbrs[i].len() > 2);
        let bad_link = comp
            .iter()
            .any(|&i| nbrs[i].iter().any(|&j| link.linking.get(i, j).abs() != Int::one()));
        if bad_degree || bad_link {
            return Err(not_chain());
        }
        let mut ends: Vec<usize> = comp.iter().copied().filter(|&i| nbrs[i].len() <= 1).collect();
        ends.sort_by_key(|&i| (!prefer(i), i));
        let Some(&first) = ends.first() else {
            return Err(not_chain());
        };
        let mut order = vec![first];
        while order.len() < comp.len() {
            let last = *order.last().expect("nonempty");
            let next = nbrs[last]
                .iter()
                .copied()
                .find(|j| !order.contains(j))
                .ok_or_else(not_chain)?;
            order.push(next);
        }
        out.push(order);
    }
    Ok(out)
}

/// Value `f_1 - 1/(f_2 - 1/(...))` of a chain given by component indices.
/// Linking signs along a chain can be absorbed by reorienting components,
/// so only the framings enter.
pub fn chain_value(link: &FramedLink, order: &[usize]) -> Result<Rational> {
    let mut value: Option<Rational> = None;
    for &i in order.iter().rev() {
        let f = link.framings[i]
            .finite()
            .ok_or_else(|| Error::OutOfDomain("infinite coefficient inside a chain".into()))?
            .clone();
        value = Some(match value {
            None => f,
            Some(v) if v.is_zero() => return Err(Error::OutOfDomain("degenerate chain".into())),
            Some(v) => f - v.recip(),
        });
    }
    value.ok_or_else(|| Error::OutOfDomain("empty chain".into()))
}

/// Lens space summands of a link whose pieces are chains, each read from
/// its lowest-index end.
pub fn lens_summands(link: &FramedLink) -> Result<Vec<LensSpace>> {
    let link = link.without_infinite();
    chain_pieces(&link, |_| false)?
        .iter()
        .map(|piece| LensSpace::from_unknot_surgery(&chain_value(&link, piece)?))
        .collect()
}

/// The four manifolds tied together by the surgery triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    E,
    S,
    L,
    U,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::E, Family::S, Family::L, Family::U];

    /// Framing of the central unknot in the shared diagram; `None` means
    /// the central component is absent.
    pub fn central_framing(self) -> Option<i64> {
        match self {
            Family::E => Some(0),
            Family::S => Some(1),
            Family::U => Some(-1),
            Family::L => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn check_pn(p: u64, n: u64) -> Result<()> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!(
            "need p >= 2 and n >= 1, got p={p}, n={n}"
        )));
    }
    Ok(())
}

/// Closed-form order of H₁ for each family.
pub fn closed_form_order(family: Family, p: u64, n: u64) -> Int {
    let (p, n) = (int(p as i64), int(n as i64));
    let one = Int::one();
    match family {
        Family::S => &p * (&p * &n + &one) * (&p * (&n + &one) + int(2)) - &p * (&n + &one) - &one,
        Family::E => &p * &p * &n - &p * &n - &one,
        Family::L => &p * (&p * &n + &one) * (&p * (&n + &one) + &one),
        Family::U => &p * &p * &p * &n * (&n + &one) + &p * (&p + &one) * (&n + &one) + &one,
    }
}

/// Surgery coefficient on `T(p, pn+1)` producing the family member; the
/// connected sum `L` is not a knot surgery.
pub fn surgery_coefficient(family: Family, p: u64, n: u64) -> Option<Rational> {
    let (pi, ni) = (p as i64, n as i64);
    match family {
        Family::E => Some(rat_int(pi * pi * ni - pi * ni - 1)),
        Family::S => {
            let k = pi * (ni + 1);
            Some(rat_int(pi * (ni * pi + 1)) - Rational::new(int(k + 1), int(k + 2)))
        }
        Family::U => Some(rat_int(pi * pi * ni + pi + 1) + Rational::new(int(1), int(pi * (ni + 1)))),
        Family::L => None,
    }
}

/// Integer diagram shared by the families: a central unknot `d` linked once
/// with `b` (framing p), `c` (framing -(p(n+1)+1)) and the head `a2` of the
/// chain `a2 (-p) - a1 (n)`. The central framing selects the family.
pub fn family_link(family: Family, p: u64, n: u64) -> Result<FramedLink> {
    check_pn(p, n)?;
    let (pi, ni) = (p as i64, n as i64);
    let mut link = FramedLink::new(vec![], IntMatrix::zeros(0, 0))?;
    let a1 = link.push("a1", Coefficient::integer(ni), &[]);
    let a2 = link.push("a2", Coefficient::integer(-pi), &[(a1, 1)]);
    let b = link.push("b", Coefficient::integer(pi), &[]);
    let c = link.push("c", Coefficient::integer(-(pi * (ni + 1) + 1)), &[]);
    if let Some(e) = family.central_framing() {
        link.push("d", Coefficient::integer(e), &[(a2, 1), (b, 1), (c, 1)]);
    }
    Ok(link)
}

/// Same manifolds with the chain `a2 - a1` collapsed to the single rational
/// coefficient `-(pn+1)/n`, as a Seifert diagram with rational framings.
pub fn family_seifert_link(family: Family, p: u64, n: u64) -> Result<FramedLink> {
    check_pn(p, n)?;
    let (pi, ni) = (p as i64, n as i64);
    let framings = vec![
        Coefficient::Finite(Rational::new(int(-(pi * ni + 1)), int(ni))),
        Coefficient::integer(pi),
        Coefficient::integer(-(pi * (ni + 1) + 1)),
        match family.central_framing() {
            Some(e) => Coefficient::integer(e),
            None => Coefficient::Infinite,
        },
    ];
    let mut linking = IntMatrix::zeros(4, 4);
    for i in 0..3 {
        linking.set(i, 3, 1);
        linking.set(3, i, 1);
    }
    FramedLink::with_labels(["a", "b", "c", "d"].map(String::from).to_vec(), framings, linking)
}

/// Components of the `L` diagram meeting the central unknot of the shared
/// diagram (the chain heads).
pub fn family_l_heads(p: u64, n: u64) -> Result<Vec<usize>> {
    let e = family_link(Family::E, p, n)?;
    let d = e.index_of("d").expect("central component");
    Ok((0..e.len()).filter(|&i| i != d && !e.linking(i, d).is_zero()).collect())
}

/// Lens summands of `L(p,n)`, each chain read from its head.
pub fn family_l_summands(p: u64, n: u64) -> Result<Vec<LensSpace>> {
    let link = family_link(Family::L, p, n)?;
    let heads = family_l_heads(p, n)?;
    chain_pieces(&link, |i| heads.contains(&i))?
        .iter()
        .map(|piece| LensSpace::from_unknot_surgery(&chain_value(&link, piece)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldFamilyRecord {
    pub family: Family,
    pub p: u64,
    pub n: u64,
    #[serde(with = "int_json")]
    pub h: Int,
    /// `|H₁|` recomputed from the integer surgery diagram.
    #[serde(with = "int_json")]
    pub h_presentation: Int,
    #[serde(with = "opt_rational_str")]
    pub surgery_coefficient: Option<Rational>,
    /// Torus knot `(p, pn+1)` carrying the surgery, when there is one.
    pub knot: Option<(u64, u64)>,
    pub lens_summands: Option<Vec<LensSpace>>,
}

/// Builds the record and cross-checks the closed form against the surgery
/// diagram, the rational Seifert diagram and `|numerator(r)|`.
pub fn family_record(family: Family, p: u64, n: u64) -> Result<ManifoldFamilyRecord> {
    check_pn(p, n)?;
    let h = closed_form_order(family, p, n);
    let link = family_link(family, p, n)?;
    let h_presentation = link.presentation().snf().cokernel_order().unwrap_or_else(Int::zero);
    let inconsistent = |what: &str, got: &Int| {
        Error::Inconsistent(format!("{family}({p},{n}): closed form {h} but {what} gives {got}"))
    };
    if h_presentation != h {
        return Err(inconsistent("integer diagram", &h_presentation));
    }
    let seifert = h1_order(&family_seifert_link(family, p, n)?);
    if seifert != h {
        return Err(inconsistent("rational diagram", &seifert));
    }
    let surgery_coefficient = surgery_coefficient(family, p, n);
    if let Some(r) = &surgery_coefficient {
        let k = h1_order(&FramedLink::unknot(Coefficient::Finite(r.clone())));
        if k != h {
            return Err(inconsistent("knot surgery coefficient", &k));
        }
    }
    let lens_summands = if family == Family::L {
        Some(family_l_summands(p, n)?)
    } else {
        None
    };
    if let Some(ls) = &lens_summands {
        let prod: Int = ls.iter().map(|l| int(l.p as i64)).product();
        if prod != h {
            return Err(inconsistent("lens summands", &prod));
        }
    }
    Ok(ManifoldFamilyRecord {
        family,
        p,
        n,
        h,
        h_presentation,
        surgery_coefficient,
        knot: (family != Family::L).then_some((p, p * n + 1)),
        lens_summands,
    })
}

/// Serde helpers rendering rationals as `"a/b"` strings.
pub mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod opt_rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn single_unknot_orders() {
        assert_eq!(h1_order(&FramedLink::unknot(Coefficient::integer(5))), int(5));
        assert_eq!(h1_order(&FramedLink::unknot(Coefficient::integer(0))), int(0));
        assert_eq!(h1_order(&FramedLink::unknot(Coefficient::Infinite)), int(1));
        assert_eq!(h1_order(&FramedLink::unknot(rat(-89, 8).into())), int(89));
    }

    #[test]
    fn rolfsen_examples() {
        let link = FramedLink::unknot(Coefficient::integer(-1));
        assert_eq!(rolfsen_twist(&link, 0, 1).unwrap().framings()[0], Coefficient::Infinite);
        let link = FramedLink::unknot(Coefficient::integer(7));
        assert_eq!(
            rolfsen_twist(&link, 0, -1).unwrap().framings()[0],
            Coefficient::Finite(rat(-7, 6))
        );
    }

    #[test]
    fn blow_down_linking_two() {
        let m = IntMatrix::from_rows(&[vec![0, 0, 1], vec![0, 0, 1], vec![1, 1, -1]]).unwrap();
        let link = FramedLink::from_linking_matrix(&m).unwrap();
        let out = blow_down(&link, 2).unwrap();
        assert_eq!(out.framings(), &[Coefficient::integer(1), Coefficient::integer(1)]);
        assert_eq!(out.linking(0, 1), &int(1));
        assert!(blow_down(&link, 0).is_err());
    }

    #[test]
    fn legendrian_fronts() {
        let d = |w, u, dn| LegendrianData {
            writhe: w,
            up_cusps: u,
            down_cusps: dn,
        };
        assert_eq!(legendrian_invariants(&d(0, 1, 1)).unwrap(), (-1, 0));
        assert_eq!(legendrian_invariants(&d(0, 1, 3)).unwrap(), (-2, 1));
        assert!(legendrian_invariants(&d(0, 1, 2)).is_err());
        assert_eq!(contact_surgery_framing(-1, 1), 0);
    }

    #[test]
    fn lens_normalization() {
        let l = LensSpace::from_unknot_surgery(&rat(-4, 3)).unwrap();
        assert_eq!((l.p, l.q, l.orientation), (4, 3, Orientation::Reversed));
        let l = LensSpace::from_unknot_surgery(&rat(7, 9)).unwrap();
        assert_eq!((l.p, l.q), (7, 2));
        assert_eq!(LensSpace::from_unknot_surgery(&rat(1, 5)).unwrap(), LensSpace::sphere());
    }
}
