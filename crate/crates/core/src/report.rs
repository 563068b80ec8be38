//! Batch verification: runs every check for one `(p, n)` and collects the
//! results in a single serializable record.

use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{definiteness, format_rational, int_json, rat, Definiteness, Int, Rational};
use crate::floer::{
    chern_class_reduction, degree_collapse_check, degree_shift, minus_l_handle_signature, minus_l_spin_degrees,
    rank_identities, spin_count, CobordismData, MinusLSpin,
};
use crate::plumbing::{
    build_w, donaldson_obstruction, intersection_matrix, nr_obstruction_sum, ObstructionVerdict, SearchOptions,
};
use crate::slopes::{enumerate_candidates, upper_bound, SignVector, STRUCTURES_PER_SURVIVOR};
use crate::surgery::{family_link, family_record, Family};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// The statement the check reproduces.
    pub anchor: String,
    #[serde(flatten)]
    pub status: Status,
    pub detail: String,
}

/// Identifier and statement of every check, in report order.
pub const CHECKS: [(&str, &str); 11] = [
    (
        "homology-orders",
        "closed-form orders h_S, h_E, h_L, h_U equal the presented |H1|",
    ),
    ("rank-identities", "triangle ranks h_S = h_E + h_L and h_L = h_E + h_U"),
    (
        "parity",
        "h_S, h_E odd, h_L even, gcd(h_L, h_S) = 1, spin counts (1, 1, 2)",
    ),
    ("survivor-bound", "2 * survivors = 2 * max(p(p-1) - 4, 0)"),
    ("plumbing-definite", "W(p,n) negative definite with |det| = h_E"),
    ("nr-sum", "Seifert invariant sum e(M) < 0"),
    (
        "embedding",
        "intersection form of W(p,n) has no embedding in the diagonal lattice",
    ),
    (
        "chern-reduction",
        "c1 of the contact structure on S_{p,n} is PD(mu_d) for odd p",
    ),
    (
        "degree-collapse",
        "grading bounds meet: (1 - h_L/h_S)/4 + (1 - h_E/h_S)/4 = 1/4",
    ),
    ("quarter-shift", "spin W cobordism shifts degree by exactly 1/4"),
    ("minus-l-spin", "d-invariants of the two spin structures on -L_{p,n}"),
];

fn anchor(id: &str) -> &'static str {
    CHECKS
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, a)| *a)
        .expect("declared check")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub embedding: bool,
    /// Extra dimensions beyond the rank for the diagonal lattice.
    pub margins: Vec<usize>,
    pub budget: u64,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            embedding: true,
            margins: vec![0],
            budget: SearchOptions::default().budget,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    #[serde(with = "int_json")]
    pub h_s: Int,
    #[serde(with = "int_json")]
    pub h_e: Int,
    #[serde(with = "int_json")]
    pub h_l: Int,
    #[serde(with = "int_json")]
    pub h_u: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingResult {
    pub margin: usize,
    pub dimension: usize,
    pub verdict: ObstructionVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinDegrees {
    #[serde(with = "crate::surgery::rational_str")]
    pub tau_w: Rational,
    #[serde(with = "crate::surgery::rational_str")]
    pub tau_v: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub p: u64,
    pub n: u64,
    pub orders: Option<Orders>,
    pub s_is_e_plus_l: Option<bool>,
    pub l_is_e_plus_u: Option<bool>,
    pub survivors: Vec<SignVector>,
    pub bound: u64,
    pub definiteness: Option<Definiteness>,
    #[serde(with = "crate::surgery::opt_rational_str")]
    pub nr_sum: Option<Rational>,
    pub embeddings: Vec<EmbeddingResult>,
    #[serde(with = "opt_int_json")]
    pub chern_residue: Option<Int>,
    pub collapse: Option<bool>,
    #[serde(with = "crate::surgery::opt_rational_str")]
    pub quarter_shift: Option<Rational>,
    /// Spin structure counts on `S`, `E`, `L`.
    pub spin_counts: Option<[u64; 3]>,
    pub minus_l_degrees: Option<SpinDegrees>,
    pub checks: Vec<Check>,
}

mod opt_int_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Int>, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.clone().map(int_json::Json).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Int>, D::Error> {
        Ok(Option::<int_json::Json>::deserialize(d)?.map(|j| j.0))
    }
}

impl VerificationReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn skipped(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| matches!(c.status, Status::Skipped(_)))
            .count()
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Pass).count()
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn push(&mut self, id: &str, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            id: id.to_string(),
            anchor: anchor(id).to_string(),
            status,
            detail: detail.into(),
        });
    }

    /// Records a boolean outcome, or a failure carrying the error.
    fn record<T>(&mut self, id: &str, r: Result<T>, judge: impl FnOnce(&T) -> (bool, String)) -> Option<T> {
        match r {
            Ok(v) => {
                let (ok, detail) = judge(&v);
                self.push(id, Status::from_bool(ok), detail);
                Some(v)
            }
            Err(e) => {
                self.push(id, Status::Fail, e.to_string());
                None
            }
        }
    }
}

pub fn verify(p: u64, n: u64, options: &VerifyOptions) -> Result<VerificationReport> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!(
            "need p >= 2 and n >= 1, got p={p}, n={n}"
        )));
    }
    let mut b = Builder { checks: Vec::new() };

    let records: Result<Vec<_>> = Family::ALL.iter().map(|&f| family_record(f, p, n)).collect();
    let orders = b
        .record("homology-orders", records, |r| {
            let shown: Vec<String> = r.iter().map(|x| format!("h_{}={}", x.family, x.h)).collect();
            (true, shown.join(" "))
        })
        .map(|r| Orders {
            h_e: r[0].h.clone(),
            h_s: r[1].h.clone(),
            h_l: r[2].h.clone(),
            h_u: r[3].h.clone(),
        });

    let ranks = b.record("rank-identities", rank_identities(p, n), |r| {
        (
            r.s_is_e_plus_l && r.l_is_e_plus_u,
            format!(
                "h_S = h_E + h_L: {}, h_L = h_E + h_U: {}",
                r.s_is_e_plus_l, r.l_is_e_plus_u
            ),
        )
    });

    let counts: Result<Vec<u64>> = [Family::S, Family::E, Family::L]
        .iter()
        .map(|&f| {
            let c = spin_count(&family_link(f, p, n)?.presentation())?;
            u64::try_from(c).map_err(|e| Error::Inconsistent(e.to_string()))
        })
        .collect();
    let spin_counts = match (&orders, counts) {
        (Some(o), Ok(c)) => {
            let ok = o.h_s.is_odd()
                && o.h_e.is_odd()
                && o.h_l.is_even()
                && o.h_l.gcd(&o.h_s) == Int::from(1)
                && c == [1, 1, 2];
            b.push("parity", Status::from_bool(ok), format!("spin counts {c:?}"));
            Some([c[0], c[1], c[2]])
        }
        (None, _) => {
            b.push("parity", Status::Skipped("orders unavailable".into()), "");
            None
        }
        (_, Err(e)) => {
            b.push("parity", Status::Fail, e.to_string());
            None
        }
    };

    let survivors = enumerate_candidates(p, n)?;
    let bound = upper_bound(p, n)?;
    let count = STRUCTURES_PER_SURVIVOR * survivors.len() as u64;
    b.push(
        "survivor-bound",
        Status::from_bool(count == bound && (p != 2 || survivors.is_empty())),
        format!("{} survivors, bound {bound}", survivors.len()),
    );

    let lattice = intersection_matrix(&build_w(p, n)?);
    let def = definiteness(&lattice.gram);
    let det = lattice.gram.determinant();
    let definiteness_value = match (def, det, &orders) {
        (Ok(d), Ok(det), Some(o)) => {
            let ok = d == Definiteness::NegativeDefinite && det.magnitude() == o.h_e.magnitude();
            b.push("plumbing-definite", Status::from_bool(ok), format!("{d:?}, det {det}"));
            Some(d)
        }
        (Ok(d), Ok(_), None) => {
            b.push("plumbing-definite", Status::Skipped("orders unavailable".into()), "");
            Some(d)
        }
        (Err(e), _, _) | (_, Err(e), _) => {
            b.push("plumbing-definite", Status::Fail, e.to_string());
            None
        }
    };

    let nr_sum = b.record("nr-sum", nr_obstruction_sum(p, n), |s| {
        (*s < Rational::zero(), format_rational(s))
    });

    let mut embeddings = Vec::new();
    if !options.embedding {
        b.push("embedding", Status::Skipped("disabled".into()), "");
    } else {
        let opts = SearchOptions {
            budget: options.budget,
            parallel: options.parallel,
        };
        let mut status = Status::Pass;
        let mut details = Vec::new();
        for &margin in &options.margins {
            let dimension = lattice.rank() + margin;
            match donaldson_obstruction(p, n, margin, opts) {
                Ok(verdict) => {
                    match &verdict {
                        ObstructionVerdict::NoEmbeddingCertificate { certificate } => {
                            details.push(format!("Z^{dimension}: none ({} nodes)", certificate.nodes));
                        }
                        ObstructionVerdict::EmbeddingFound { .. } => {
                            details.push(format!("Z^{dimension}: found"));
                            status = Status::Fail;
                        }
                        ObstructionVerdict::BudgetExhausted { nodes } => {
                            details.push(format!("Z^{dimension}: budget exhausted after {nodes} nodes"));
                            if status == Status::Pass {
                                status = Status::Skipped("budget".into());
                            }
                        }
                    }
                    embeddings.push(EmbeddingResult {
                        margin,
                        dimension,
                        verdict,
                    });
                }
                Err(e) => {
                    details.push(e.to_string());
                    status = Status::Fail;
                }
            }
        }
        b.push("embedding", status, details.join("; "));
    }

    let chern_residue = if p.is_even() {
        b.push("chern-reduction", Status::Skipped("p is even".into()), "");
        None
    } else {
        b.record("chern-reduction", chern_class_reduction(p, n), |r| {
            (
                r.residue == Int::from(1),
                format!("residue {} mod {}", r.residue, r.order),
            )
        })
        .map(|r| r.residue)
    };

    let collapse = b.record("degree-collapse", degree_collapse_check(p, n), |&c| (c, c.to_string()));

    // sigma of W read off the presentation rather than assumed
    let quarter_shift = b.record(
        "quarter-shift",
        minus_l_handle_signature(MinusLSpin::W, p, n),
        |&sigma| {
            let w = CobordismData::spin_w();
            let shift = degree_shift(&CobordismData { sigma, ..w });
            (
                sigma == -1 && shift == rat(1, 4),
                format!("sigma(W) = {sigma}, shift {}", format_rational(&shift)),
            )
        },
    );
    let quarter_shift = quarter_shift.map(|sigma| {
        degree_shift(&CobordismData {
            sigma,
            ..CobordismData::spin_w()
        })
    });

    let minus_l_degrees = b
        .record("minus-l-spin", minus_l_spin_degrees(p, n), |d| {
            let distinct = d[0].label != d[1].label && d.iter().all(|s| s.label.is_spin());
            (
                distinct,
                format!(
                    "d(tau_W) = {}, d(tau_V) = {}",
                    format_rational(&d[0].d),
                    format_rational(&d[1].d)
                ),
            )
        })
        .map(|d| SpinDegrees {
            tau_w: d[0].d.clone(),
            tau_v: d[1].d.clone(),
        });

    Ok(VerificationReport {
        p,
        n,
        orders,
        s_is_e_plus_l: ranks.as_ref().map(|r| r.s_is_e_plus_l),
        l_is_e_plus_u: ranks.as_ref().map(|r| r.l_is_e_plus_u),
        survivors,
        bound,
        definiteness: definiteness_value,
        nr_sum,
        embeddings,
        chern_residue,
        collapse,
        quarter_shift,
        spin_counts,
        minus_l_degrees,
        checks: b.checks,
    })
}

/// Reports for every `(p, n)` in the ranges, p-major.
pub fn grid(
    p_range: std::ops::RangeInclusive<u64>,
    n_range: std::ops::RangeInclusive<u64>,
    options: &VerifyOptions,
) -> Result<Vec<VerificationReport>> {
    let cells: Vec<(u64, u64)> = p_range.flat_map(|p| n_range.clone().map(move |n| (p, n))).collect();
    let run = |&(p, n): &(u64, u64)| verify(p, n, options);
    if options.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    }
}

fn status_word(s: &Status) -> String {
    match s {
        Status::Pass => "PASS".into(),
        Status::Fail => "FAIL".into(),
        Status::Skipped(r) => format!("SKIP({r})"),
    }
}

/// Human-readable rendering of a report.
pub fn render_text(r: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p={} n={}", r.p, r.n);
    for c in &r.checks {
        let _ = write!(out, "  {:<8} {:<18} {}", status_word(&c.status), c.id, c.anchor);
        if !c.detail.is_empty() {
            let _ = write!(out, " [{}]", c.detail);
        }
        out.push('\n');
    }
    out
}

/// One line per report followed by totals.
pub fn render_summary(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>3} {:>3} {:>5} {:>5} {:>5}", "p", "n", "pass", "fail", "skip");
    for r in reports {
        let _ = writeln!(
            out,
            "{:>3} {:>3} {:>5} {:>5} {:>5}",
            r.p,
            r.n,
            r.passed(),
            r.failed(),
            r.skipped()
        );
    }
    let total = |f: fn(&VerificationReport) -> usize| reports.iter().map(f).sum::<usize>();
    let _ = writeln!(
        out,
        "total: {} reports, {} passed, {} failed, {} skipped",
        reports.len(),
        total(VerificationReport::passed),
        total(VerificationReport::failed),
        total(VerificationReport::skipped)
    );
    out
}
