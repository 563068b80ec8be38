//! Spin^c bookkeeping on cyclic H₁, Chern class and degree arithmetic for
//! the surgery triangles, and lens space d-invariants.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, int_json, neg_continued_fraction, rat, rat_int, Int, IntMatrix, Rational};
use crate::surgery::{
    chain_pieces, chain_value, closed_form_order, family_l_heads, family_link, Family, HomologyPresentation, LensSpace,
};

/// A spin^c structure on a 3-manifold with cyclic `H₁ = Z/h`, recorded as
/// its offset `c` from a fixed base spin structure. Conjugation negates the
/// offset, so the spin structures are `c = 0` and, for even `h`, `c = h/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinCLabel {
    #[serde(with = "int_json")]
    pub h: Int,
    #[serde(with = "int_json")]
    pub c: Int,
}

impl SpinCLabel {
    pub fn new(h: impl Into<Int>, c: impl Into<Int>) -> Result<Self> {
        let h = h.into();
        if !h.is_positive() {
            return Err(Error::InvalidParameters(format!(
                "label modulus must be positive, got {h}"
            )));
        }
        let c = c.into().mod_floor(&h);
        Ok(SpinCLabel { h, c })
    }

    pub fn conjugate(&self) -> Self {
        SpinCLabel {
            h: self.h.clone(),
            c: (-&self.c).mod_floor(&self.h),
        }
    }

    pub fn is_spin(&self) -> bool {
        *self == self.conjugate()
    }

    /// The self-conjugate labels modulo `h`.
    pub fn spin_labels(h: impl Into<Int>) -> Result<Vec<SpinCLabel>> {
        let h = h.into();
        let mut out = vec![SpinCLabel::new(h.clone(), 0)?];
        if h.is_even() {
            out.push(SpinCLabel::new(h.clone(), &h / 2)?);
        }
        Ok(out)
    }

    /// Label on `Z/(h_1 ⋯ h_k)` restricting to each of the given labels
    /// (pairwise coprime moduli).
    pub fn combine(parts: &[SpinCLabel]) -> Result<SpinCLabel> {
        let mut acc = SpinCLabel::new(1, 0)?;
        for part in parts {
            if !acc.h.gcd(&part.h).is_one() {
                return Err(Error::InvalidParameters(format!(
                    "moduli {} and {} are not coprime",
                    acc.h, part.h
                )));
            }
            let inv = crate::exact::mod_inverse(&acc.h, &part.h).expect("coprime");
            let t = ((&part.c - &acc.c) * inv).mod_floor(&part.h);
            let c = &acc.c + t * &acc.h;
            acc = SpinCLabel::new(&acc.h * &part.h, c)?;
        }
        Ok(acc)
    }
}

/// Data entering the grading shift of a cobordism map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CobordismData {
    pub sigma: i64,
    pub chi: i64,
    #[serde(with = "crate::surgery::rational_str")]
    pub c1_square: Rational,
}

impl CobordismData {
    /// The spin structure on the two-handle cobordism `W` from `-L` to `-E`.
    pub fn spin_w() -> Self {
        CobordismData {
            sigma: -1,
            chi: 1,
            c1_square: Rational::zero(),
        }
    }
}

/// Number of spin structures, `|H¹(Y; Z/2)|`.
pub fn spin_count(pres: &HomologyPresentation) -> Result<Int> {
    pres.spin_count()
}

fn check_pn(p: u64, n: u64) -> Result<()> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!(
            "need p >= 2 and n >= 1, got p={p}, n={n}"
        )));
    }
    Ok(())
}

/// Rotation-number weights of the Legendrian components of the contact
/// surgery diagram: `PD(c₁) = Σ rot(K) μ_K`.
pub fn chern_weights(p: u64, n: u64) -> Vec<(&'static str, Int)> {
    vec![
        ("a2", int(-1)),
        ("b", int(-1)),
        ("c", int((p * (n + 1)) as i64)),
        ("d", int(-1)),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernReduction {
    #[serde(with = "int_json")]
    pub order: Int,
    pub terms: Vec<ChernTerm>,
    #[serde(with = "int_json")]
    pub residue: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernTerm {
    pub label: String,
    #[serde(with = "int_json")]
    pub weight: Int,
    #[serde(with = "int_json")]
    pub coefficient: Int,
}

/// `c₁` of the contact structure on `S_{p,n}` as a multiple of `μ_d`,
/// reduced modulo `h_S`.
pub fn chern_class_reduction(p: u64, n: u64) -> Result<ChernReduction> {
    check_pn(p, n)?;
    if p.is_even() {
        return Err(Error::InvalidParameters(format!(
            "Chern class reduction needs odd p, got {p}"
        )));
    }
    let red = family_link(Family::S, p, n)?.presentation().generator_reduction("d")?;
    let mut residue = Int::zero();
    let mut terms = Vec::new();
    for (label, weight) in chern_weights(p, n) {
        let coefficient = red
            .coefficient(label)
            .ok_or_else(|| Error::Inconsistent(format!("no meridian {label}")))?
            .clone();
        residue += &weight * &coefficient;
        terms.push(ChernTerm {
            label: label.to_string(),
            weight,
            coefficient,
        });
    }
    Ok(ChernReduction {
        residue: residue.mod_floor(&red.order),
        order: red.order,
        terms,
    })
}

/// Order identities of the two exact triangles and the map vanishings
/// they force between L-spaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankIdentities {
    #[serde(with = "int_json")]
    pub h_s: Int,
    #[serde(with = "int_json")]
    pub h_e: Int,
    #[serde(with = "int_json")]
    pub h_l: Int,
    #[serde(with = "int_json")]
    pub h_u: Int,
    pub s_is_e_plus_l: bool,
    pub l_is_e_plus_u: bool,
    /// The map `HF(-S) → HF(-E)` of the first triangle vanishes.
    pub h_map_zero: bool,
    /// The corresponding map of the second triangle vanishes.
    pub f_prime_zero: bool,
}

pub fn rank_identities(p: u64, n: u64) -> Result<RankIdentities> {
    check_pn(p, n)?;
    let [h_e, h_s, h_l, h_u] = Family::ALL.map(|f| closed_form_order(f, p, n));
    let s_is_e_plus_l = h_s == &h_e + &h_l;
    let l_is_e_plus_u = h_l == &h_e + &h_u;
    Ok(RankIdentities {
        h_map_zero: s_is_e_plus_l,
        f_prime_zero: l_is_e_plus_u,
        s_is_e_plus_l,
        l_is_e_plus_u,
        h_s,
        h_e,
        h_l,
        h_u,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cobordism {
    V,
    MinusX,
}

/// `c₁(s)²` for a spin^c structure on `V` (multiplier `k`) or `-X`
/// (multiplier `l`); the multiplier is odd.
pub fn c1_square(cob: Cobordism, k: i64, p: u64, n: u64) -> Result<Rational> {
    check_pn(p, n)?;
    if k % 2 == 0 {
        return Err(Error::InvalidParameters(format!("multiplier must be odd, got {k}")));
    }
    let h_s = closed_form_order(Family::S, p, n);
    let h = match cob {
        Cobordism::V => closed_form_order(Family::L, p, n),
        Cobordism::MinusX => closed_form_order(Family::E, p, n),
    };
    Ok(-Rational::new(int(k * k) * h, h_s))
}

pub fn degree_shift(c: &CobordismData) -> Rational {
    (&c.c1_square - rat_int(3 * c.sigma + 2 * c.chi)) / rat_int(4)
}

pub fn contact_d_correction(c: &CobordismData) -> Rational {
    (&c.c1_square - rat_int(3 * c.sigma + 2 * c.chi - 2)) / rat_int(4)
}

/// Whether the two grading bounds on the image of the contact class meet,
/// i.e. `¼(1 - h_L/h_S) + ¼(1 - h_E/h_S) = ¼`.
pub fn degree_collapse_identity(h_e: &Int, h_l: &Int, h_s: &Int) -> Result<bool> {
    if h_s.is_zero() {
        return Err(Error::InfiniteHomology);
    }
    let quarter = rat(1, 4);
    let width = |h: &Int| &quarter * (Rational::one() - Rational::new(h.clone(), h_s.clone()));
    Ok(width(h_l) + width(h_e) == quarter)
}

pub fn degree_collapse_check(p: u64, n: u64) -> Result<bool> {
    check_pn(p, n)?;
    let [h_e, h_s, h_l, _] = Family::ALL.map(|f| closed_form_order(f, p, n));
    degree_collapse_identity(&h_e, &h_l, &h_s)
}

/// A spin^c structure on the cobordism restricting to the source and target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub label: SpinCLabel,
    pub spin: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentVerdict {
    ForcedZero,
    Undetermined,
}

/// Over `Z/2`, non-spin extensions cancel in conjugate pairs, so the
/// target component vanishes unless some extension is spin.
pub fn spin_component_filter(
    source: &SpinCLabel,
    target: &SpinCLabel,
    extensions: &[Extension],
) -> Result<ComponentVerdict> {
    for (name, l) in [("source", source), ("target", target)] {
        if !l.is_spin() {
            return Err(Error::InvalidParameters(format!(
                "{name} label {} mod {} is not self-conjugate",
                l.c, l.h
            )));
        }
    }
    Ok(if extensions.iter().any(|e| e.spin) {
        ComponentVerdict::Undetermined
    } else {
        ComponentVerdict::ForcedZero
    })
}

/// `d(L(p,q), i)` by the recursion
/// `d(L(p,q),i) = -1/4 + (2i+1-p-q)²/(4pq) - d(L(q, p mod q), i mod q)`.
pub fn d_lens_index(p: u64, q: u64, i: u64) -> Rational {
    if p == 1 {
        return Rational::zero();
    }
    let s = 2 * i as i128 + 1 - p as i128 - q as i128;
    let term = Rational::new(Int::from(s * s), Int::from(4 * p as i128 * q as i128));
    rat(-1, 4) + term - d_lens_index(q, p % q, i % q)
}

/// Recursion index of the base spin structure: a solution of
/// `2i ≡ q - 1 (mod p)`, which the symmetry `i ↦ q - 1 - i` fixes.
pub fn base_spin_index(lens: &LensSpace) -> u64 {
    let (p, q) = (lens.p, lens.q);
    if p == 1 {
        0
    } else if p % 2 == 0 {
        (q - 1) / 2
    } else {
        (q - 1 + if (q - 1) % 2 == 1 { p } else { 0 }) / 2 % p
    }
}

fn check_label(lens: &LensSpace, label: &SpinCLabel) -> Result<()> {
    if label.h != Int::from(lens.p) {
        return Err(Error::InvalidParameters(format!(
            "label modulus {} does not match |H₁({lens})| = {}",
            label.h, lens.p
        )));
    }
    Ok(())
}

pub fn lens_index(lens: &LensSpace, label: &SpinCLabel) -> Result<u64> {
    check_label(lens, label)?;
    let c = label.c.to_u64().expect("reduced label fits");
    Ok((base_spin_index(lens) + c) % lens.p)
}

pub fn lens_label(lens: &LensSpace, index: u64) -> Result<SpinCLabel> {
    if index >= lens.p {
        return Err(Error::InvalidParameters(format!(
            "index {index} out of range for {lens}"
        )));
    }
    SpinCLabel::new(lens.p, index as i64 - base_spin_index(lens) as i64)
}

pub fn d_invariant_lens(lens: &LensSpace, label: &SpinCLabel) -> Result<Rational> {
    let i = lens_index(lens, label)?;
    Ok(rat_int(lens.orientation.sign()) * d_lens_index(lens.p, lens.q, i))
}

pub fn d_connected_sum(summands: &[(LensSpace, SpinCLabel)]) -> Result<Rational> {
    summands
        .iter()
        .try_fold(Rational::zero(), |acc, (l, s)| Ok(acc + d_invariant_lens(l, s)?))
}

/// Solutions `χ ∈ (Z/2)^k` of `Qχ ≡ diag(Q) (mod 2)`, i.e. characteristic
/// sublinks of a framed link with linking matrix `Q`.
pub fn characteristic_sublinks(q: &IntMatrix) -> Result<Vec<Vec<bool>>> {
    if !q.is_square() {
        return Err(Error::Shape("characteristic sublinks need a square matrix".into()));
    }
    let k = q.rows();
    let bit = |x: &Int| x.is_odd();
    let mut rows: Vec<(Vec<bool>, bool)> = (0..k)
        .map(|i| ((0..k).map(|j| bit(q.get(i, j))).collect(), bit(q.get(i, i))))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(pr) = (r..k).find(|&i| rows[i].0[col]) else {
            continue;
        };
        rows.swap(r, pr);
        for i in 0..k {
            if i != r && rows[i].0[col] {
                let (src, rhs) = rows[r].clone();
                for (x, y) in rows[i].0.iter_mut().zip(&src) {
                    *x ^= y;
                }
                rows[i].1 ^= rhs;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| *rhs) {
        return Err(Error::Inconsistent("no characteristic sublink".into()));
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    if free.len() > 20 {
        return Err(Error::OutOfDomain(format!("2^{} characteristic sublinks", free.len())));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << free.len()) {
        let mut x = vec![false; k];
        for (b, &f) in free.iter().enumerate() {
            x[f] = mask >> b & 1 == 1;
        }
        for (row, &pc) in pivots.iter().enumerate() {
            let (coeffs, rhs) = &rows[row];
            x[pc] = free.iter().fold(*rhs, |acc, &f| acc ^ (coeffs[f] && x[f]));
        }
        out.push(x);
    }
    Ok(out)
}

fn chain_matrix(c: &[Int]) -> IntMatrix {
    let k = c.len();
    let mut m = IntMatrix::diagonal(c.to_vec());
    for i in 1..k {
        m.set(i, i - 1, 1);
        m.set(i - 1, i, 1);
    }
    m
}

fn eval_chain(c: &[Int]) -> Result<Rational> {
    let mut v: Option<Rational> = None;
    for x in c.iter().rev() {
        v = Some(match v {
            None => rat_int(x.clone()),
            Some(v) if v.is_zero() => return Err(Error::OutOfDomain("degenerate chain".into())),
            Some(v) => rat_int(x.clone()) - v.recip(),
        });
    }
    v.ok_or_else(|| Error::OutOfDomain("empty chain".into()))
}

/// Spin-structure invariant of a chain that pins down the identification
/// between presentations: `((Q⁻¹)₁₁ + χ₁)/2 mod 1`, the self-linking of
/// the first meridian shifted by the characteristic sublink.
fn first_meridian_refinement(value: &Rational, chi_first: bool) -> Rational {
    // For a chain, (Q⁻¹)₁₁ is the reciprocal of its continued-fraction value.
    let v = (value.recip() + rat_int(chi_first as i64)) / rat_int(2);
    &v - rat_int(v.floor().to_integer())
}

/// A spin structure on one lens summand, identified in the recursion's
/// index convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandSpin {
    pub lens: LensSpace,
    pub index: u64,
    pub label: SpinCLabel,
    #[serde(with = "crate::surgery::rational_str")]
    pub d: Rational,
}

/// The spin structure on the lens space given by surgery on a linear chain
/// with integer framings `c` and characteristic sublink `chi`. The chain's
/// value must satisfy `|r| > 1`.
pub fn chain_spin_structure(c: &[Int], chi: &[bool]) -> Result<SummandSpin> {
    if c.len() != chi.len() {
        return Err(Error::Shape("framings and sublink differ in length".into()));
    }
    let r = eval_chain(c)?;
    if r.abs() <= Rational::one() {
        return Err(Error::OutOfDomain(format!("chain value {r} has |r| <= 1")));
    }
    let lens = LensSpace::from_unknot_surgery(&r)?;
    if lens.p == 1 {
        return Ok(SummandSpin {
            lens,
            index: 0,
            label: SpinCLabel::new(1, 0)?,
            d: Rational::zero(),
        });
    }
    // Standard chain for -L(α, β): weights -a_j with α/β = [a_1, ..., a_m]⁻.
    let (alpha, beta) = (lens.p, lens.q);
    let standard = neg_continued_fraction(&rat(-(alpha as i64), beta as i64))?.coefficients;
    let flip = r.is_positive();
    let own: Vec<Int> = if flip {
        c.iter().map(|x| -x).collect()
    } else {
        c.to_vec()
    };
    let own_value = eval_chain(&own)?;
    let target = first_meridian_refinement(&own_value, chi[0]);
    let standard_value = eval_chain(&standard)?;
    let matches: Vec<Vec<bool>> = characteristic_sublinks(&chain_matrix(&standard))?
        .into_iter()
        .filter(|w| first_meridian_refinement(&standard_value, w[0]) == target)
        .collect();
    let [w] = matches.as_slice() else {
        return Err(Error::Inconsistent(format!(
            "{} characteristic sublinks of the standard chain match",
            matches.len()
        )));
    };
    // K = Qw, so (Q⁻¹K)₁ = w₁ and 2i + 1 - α - β ≡ α·w₁ (mod 2α).
    let two_alpha = 2 * alpha as i128;
    let t = if w[0] { alpha as i128 } else { 0 };
    let index = (0..alpha)
        .find(|&i| (2 * i as i128 + 1 - alpha as i128 - beta as i128 - t).rem_euclid(two_alpha) == 0)
        .ok_or_else(|| Error::Inconsistent("no recursion index for the spin structure".into()))?;
    let label = lens_label(&lens, index)?;
    if !label.is_spin() {
        return Err(Error::Inconsistent(format!(
            "spin structure landed on non-spin label {}",
            label.c
        )));
    }
    let d = d_invariant_lens(&lens, &label)?;
    Ok(SummandSpin { lens, index, label, d })
}

/// The spin structures of `-L_{p,n}`, distinguished by which two-handle
/// cobordism to `-E` or `-S` they extend over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinusLSpin {
    /// extends over `W` (0-framed handle, to `-E`)
    W,
    /// extends over `V` (-1-framed handle, to `-S`)
    V,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinDegree {
    pub spin: MinusLSpin,
    pub label: SpinCLabel,
    pub summands: Vec<SummandSpin>,
    #[serde(with = "crate::surgery::rational_str")]
    pub d: Rational,
}

/// d-invariants of the two spin structures of `-L_{p,n}`, read off the
/// mirrored chain presentation. A spin structure is a characteristic
/// sublink `C`; it extends over the handle attached along the central curve
/// `K` with framing `f` iff `f + lk(K, C)` is even, so `W` (f = 0) takes the
/// sublinks with even `lk(K, C)` and `V` (f = -1) the odd ones.
pub fn minus_l_spin_degrees(p: u64, n: u64) -> Result<Vec<SpinDegree>> {
    check_pn(p, n)?;
    let link = family_link(Family::L, p, n)?.mirror();
    let heads = family_l_heads(p, n)?;
    let pieces = chain_pieces(&link, |i| heads.contains(&i))?;
    let q = link.presentation().relations;
    let e = family_link(Family::E, p, n)?;
    let d = e.index_of("d").expect("central component");
    let k_link: Vec<bool> = (0..link.len()).map(|i| e.linking(i, d).is_odd()).collect();
    let framing = |i: usize| -> Int { link.framings()[i].finite().expect("integral").to_integer() };
    let mut out = Vec::new();
    for chi in characteristic_sublinks(&q)? {
        let odd = (0..link.len()).filter(|&i| chi[i] && k_link[i]).count() % 2 == 1;
        let spin = if odd { MinusLSpin::V } else { MinusLSpin::W };
        let summands = pieces
            .iter()
            .map(|piece| {
                let c: Vec<Int> = piece.iter().map(|&i| framing(i)).collect();
                let w: Vec<bool> = piece.iter().map(|&i| chi[i]).collect();
                debug_assert_eq!(eval_chain(&c).ok(), chain_value(&link, piece).ok());
                chain_spin_structure(&c, &w)
            })
            .collect::<Result<Vec<_>>>()?;
        let label = SpinCLabel::combine(&summands.iter().map(|s| s.label.clone()).collect::<Vec<_>>())?;
        let d = summands.iter().map(|s| s.d.clone()).sum();
        out.push(SpinDegree {
            spin,
            label,
            summands,
            d,
        });
    }
    out.sort_by_key(|s| s.spin == MinusLSpin::V);
    let kinds: Vec<MinusLSpin> = out.iter().map(|s| s.spin).collect();
    if kinds != [MinusLSpin::W, MinusLSpin::V] {
        return Err(Error::Inconsistent(format!(
            "expected one W and one V spin structure, got {kinds:?}"
        )));
    }
    Ok(out)
}

/// Signature change from attaching a two-handle with the given framing and
/// linking numbers to the (integral, nondegenerate) framed link.
pub fn two_handle_signature(q: &IntMatrix, framing: i64, linking: &[Int]) -> Result<i64> {
    let k = q.rows();
    if linking.len() != k {
        return Err(Error::Shape("linking vector length".into()));
    }
    let mut m = IntMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, q.get(i, j).clone());
        }
        m.set(i, k, linking[i].clone());
        m.set(k, i, linking[i].clone());
    }
    m.set(k, k, framing);
    Ok(crate::exact::inertia(&m)?.signature() - crate::exact::inertia(q)?.signature())
}

/// Signature of `W` (framing 0) or `V` (framing -1) built on `-L_{p,n}`.
pub fn minus_l_handle_signature(spin: MinusLSpin, p: u64, n: u64) -> Result<i64> {
    let link = family_link(Family::L, p, n)?.mirror();
    let e = family_link(Family::E, p, n)?.mirror();
    let d = e.index_of("d").expect("central component");
    let linking: Vec<Int> = (0..link.len()).map(|i| e.linking(i, d).clone()).collect();
    let framing = match spin {
        MinusLSpin::W => 0,
        MinusLSpin::V => -1,
    };
    two_handle_signature(&link.presentation().relations, framing, &linking)
}
