//! Serializable report documents.
//!
//! Every document refers to points by name and carries rationals as canonical
//! `"p/q"` strings, so a report can be re-verified without the originating
//! process. Documents deserialize back to equal values.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::construction::{ConstructionOutcome, ConstructionReport, SliceOutcome};
use crate::families::FamilySpec;
use crate::freespace::{LipschitzFunction, Molecule, MoleculeNorm, SliceMembership};
use crate::io::{SpaceDocument, TermEntry};
use crate::metric::{Axiom, PointId, PointedMetricSpace, ValidationReport};
use crate::rational::Rational;
use crate::trapezoid::{Inequality, Mode, RequiredEpsilon, ScanReport, TrapezoidCheck, Verdict, Witness};

/// Point name → value, in point order.
pub type FunctionDoc = IndexMap<String, Rational>;

fn names(space: &PointedMetricSpace, points: &[PointId]) -> Vec<String> {
    points.iter().map(|&p| space.name(p).to_string()).collect()
}

fn name(space: &PointedMetricSpace, p: PointId) -> String {
    space.name(p).to_string()
}

pub fn function_doc(space: &PointedMetricSpace, f: &LipschitzFunction) -> FunctionDoc {
    space.points().map(|p| (name(space, p), f.value(p).clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub axiom: Axiom,
    pub points: Vec<String>,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationDoc {
    pub ok: bool,
    pub violations: Vec<ViolationDoc>,
}

impl ValidationDoc {
    pub fn new(space: &PointedMetricSpace, report: &ValidationReport) -> Self {
        ValidationDoc {
            ok: report.ok,
            violations: report
                .violations
                .iter()
                .map(|v| ViolationDoc {
                    axiom: v.axiom,
                    points: names(space, &v.points),
                    lhs: v.lhs.clone(),
                    rhs: v.rhs.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityDoc {
    pub inequality: Inequality,
    pub holds: bool,
    pub slack: Rational,
    pub worst: Vec<String>,
}

impl InequalityDoc {
    pub fn new(space: &PointedMetricSpace, check: &TrapezoidCheck) -> Self {
        InequalityDoc {
            inequality: check.inequality,
            holds: check.holds,
            slack: check.slack.clone(),
            worst: names(space, check.worst.points()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequiredEpsilonDoc {
    pub ltp: Rational,
    pub sym: Rational,
    pub sltp: Rational,
}

impl From<&RequiredEpsilon> for RequiredEpsilonDoc {
    fn from(r: &RequiredEpsilon) -> Self {
        RequiredEpsilonDoc {
            ltp: r.ltp.clone(),
            sym: r.sym.clone(),
            sltp: r.sltp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub mode: Mode,
    pub epsilon: Rational,
    pub subset: Vec<String>,
    pub u: String,
    pub v: String,
    pub holds: bool,
    /// One entry per inequality the mode requires.
    pub checks: Vec<InequalityDoc>,
    pub required_epsilon: RequiredEpsilonDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDoc {
    pub u: String,
    pub v: String,
    pub holds: bool,
    pub required_epsilon: Rational,
    pub binding: InequalityDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictDoc {
    WitnessFound {
        u: String,
        v: String,
    },
    AllPairsFail {
        min_required_epsilon: Rational,
        u: String,
        v: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationDoc {
    pub family: FamilySpec,
    pub fresh_pairs: usize,
    pub max_index_in_subset: usize,
    pub adequate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanDoc {
    pub mode: Mode,
    pub epsilon: Rational,
    pub subset: Vec<String>,
    pub pairs: Vec<PairDoc>,
    pub verdict: VerdictDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationDoc>,
}

impl ScanDoc {
    pub fn new(space: &PointedMetricSpace, report: &ScanReport) -> Self {
        ScanDoc {
            mode: report.mode,
            epsilon: report.epsilon.clone(),
            subset: names(space, &report.subset),
            pairs: report
                .pairs
                .iter()
                .map(|p| PairDoc {
                    u: name(space, p.u),
                    v: name(space, p.v),
                    holds: p.check.holds,
                    required_epsilon: p.required_epsilon.clone(),
                    binding: InequalityDoc::new(space, &p.check),
                })
                .collect(),
            verdict: match &report.verdict {
                Verdict::WitnessFound { u, v } => VerdictDoc::WitnessFound {
                    u: name(space, *u),
                    v: name(space, *v),
                },
                Verdict::AllPairsFail {
                    min_required_epsilon,
                    at,
                } => VerdictDoc::AllPairsFail {
                    min_required_epsilon: min_required_epsilon.clone(),
                    u: name(space, at.0),
                    v: name(space, at.1),
                },
            },
            truncation: report.truncation.as_ref().map(|t| TruncationDoc {
                family: t.family.clone(),
                fresh_pairs: t.fresh_pairs,
                max_index_in_subset: t.max_index_in_subset,
                adequate: t.adequate,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundDoc {
    pub u: String,
    pub v: String,
    pub binding: InequalityDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub mode: Mode,
    pub epsilon: Rational,
    pub subset: Vec<String>,
    pub witness: Option<FoundDoc>,
}

impl WitnessDoc {
    pub fn new(
        space: &PointedMetricSpace,
        mode: Mode,
        epsilon: &Rational,
        subset: &[PointId],
        found: Option<&Witness>,
    ) -> Self {
        WitnessDoc {
            mode,
            epsilon: epsilon.clone(),
            subset: names(space, subset),
            witness: found.map(|w| FoundDoc {
                u: name(space, w.u),
                v: name(space, w.v),
                binding: InequalityDoc::new(space, &w.check),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportStep {
    pub from: String,
    pub to: String,
    pub mass: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeNormEntry {
    pub terms: Vec<TermEntry>,
    pub norm: Rational,
    /// A 1-Lipschitz function attaining the norm.
    pub dual: FunctionDoc,
    pub plan: Vec<TransportStep>,
}

impl MoleculeNormEntry {
    pub fn new(space: &PointedMetricSpace, mu: &Molecule, result: &MoleculeNorm) -> Self {
        MoleculeNormEntry {
            terms: mu
                .terms()
                .iter()
                .map(|(p, c)| TermEntry {
                    point: name(space, *p),
                    coeff: c.clone(),
                })
                .collect(),
            norm: result.norm.clone(),
            dual: function_doc(space, &result.dual),
            plan: result
                .plan
                .iter()
                .map(|(a, b, m)| TransportStep {
                    from: name(space, *a),
                    to: name(space, *b),
                    mass: m.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeNormDoc {
    pub molecules: Vec<MoleculeNormEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiiDoc {
    pub r0: Rational,
    pub s0: Rational,
    pub r: Rational,
    pub s: Rational,
    pub swapped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub a_check: Rational,
    pub a_hat: Rational,
    pub b_check: Rational,
    pub b_hat: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalNormsDoc {
    pub plus_g: Rational,
    pub minus_g: Rational,
    pub plus_abs_g: Rational,
    pub minus_abs_g: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDoc {
    pub h: FunctionDoc,
    pub interval: IntervalDoc,
    pub c: Rational,
    pub f: FunctionDoc,
    pub local_norms: LocalNormsDoc,
    pub norm_f: Rational,
    pub membership: SliceMembership,
    pub pairing: Rational,
    pub norm_f_plus_g: Rational,
    pub norm_f_minus_g: Rational,
    pub perturbed_in_slice: [bool; 2],
    pub passed: bool,
}

impl SliceDoc {
    fn new(space: &PointedMetricSpace, s: &SliceOutcome) -> Self {
        SliceDoc {
            h: function_doc(space, &s.h),
            interval: IntervalDoc {
                a_check: s.interval.a_check.clone(),
                a_hat: s.interval.a_hat.clone(),
                b_check: s.interval.b_check.clone(),
                b_hat: s.interval.b_hat.clone(),
                lo: s.interval.lo.clone(),
                hi: s.interval.hi.clone(),
            },
            c: s.c.clone(),
            f: function_doc(space, &s.f),
            local_norms: LocalNormsDoc {
                plus_g: s.local.plus_g.clone(),
                minus_g: s.local.minus_g.clone(),
                plus_abs_g: s.local.plus_abs_g.clone(),
                minus_abs_g: s.local.minus_abs_g.clone(),
            },
            norm_f: s.norm_f.clone(),
            membership: s.membership.membership,
            pairing: s.membership.pairing.clone(),
            norm_f_plus_g: s.norm_f_plus_g.clone(),
            norm_f_minus_g: s.norm_f_minus_g.clone(),
            perturbed_in_slice: s.perturbed_in_slice,
            passed: s.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltDoc {
    pub u: String,
    pub v: String,
    pub domain: Vec<String>,
    pub radii: RadiiDoc,
    pub g: FunctionDoc,
    pub norm_g: Rational,
    pub target_norm_g: Rational,
    pub slices: Vec<SliceDoc>,
    pub passed: bool,
}

impl BuiltDoc {
    fn new(space: &PointedMetricSpace, r: &ConstructionReport) -> Self {
        BuiltDoc {
            u: name(space, r.u),
            v: name(space, r.v),
            domain: names(space, &r.domain),
            radii: RadiiDoc {
                r0: r.radii.r0.clone(),
                s0: r.radii.s0.clone(),
                r: r.radii.r.clone(),
                s: r.radii.s.clone(),
                swapped: r.radii.swapped,
            },
            g: function_doc(space, &r.g),
            norm_g: r.norm_g.clone(),
            target_norm_g: r.target_norm(),
            slices: r.slices.iter().map(|s| SliceDoc::new(space, s)).collect(),
            passed: r.passed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Built,
    WitnessUnavailable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionDoc {
    pub outcome: OutcomeKind,
    pub epsilon: Rational,
    pub subset: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub built: Option<BuiltDoc>,
}

impl ConstructionDoc {
    pub fn new(
        space: &PointedMetricSpace,
        epsilon: &Rational,
        subset: &[PointId],
        outcome: &ConstructionOutcome,
    ) -> Self {
        let built = outcome.report().map(|r| BuiltDoc::new(space, r));
        ConstructionDoc {
            outcome: if built.is_some() {
                OutcomeKind::Built
            } else {
                OutcomeKind::WitnessUnavailable
            },
            epsilon: epsilon.clone(),
            subset: names(space, subset),
            built,
        }
    }
}

/// The single document a command emits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum Report {
    Validation(ValidationDoc),
    Check(CheckDoc),
    Scan(ScanDoc),
    Witness(WitnessDoc),
    MoleculeNorm(MoleculeNormDoc),
    Construction(ConstructionDoc),
    Space(SpaceDocument),
}

impl Report {
    /// 0 for a positive outcome, 1 for a well-formed negative one, 3 for a
    /// construction whose contracts fail.
    pub fn exit_code(&self) -> i32 {
        let positive = match self {
            Report::Validation(d) => d.ok,
            Report::Check(d) => d.holds,
            Report::Scan(d) => matches!(d.verdict, VerdictDoc::WitnessFound { .. }),
            Report::Witness(d) => d.witness.is_some(),
            Report::MoleculeNorm(_) | Report::Space(_) => true,
            Report::Construction(d) => match &d.built {
                Some(b) if !b.passed => return 3,
                Some(_) => true,
                None => false,
            },
        };
        if positive {
            0
        } else {
            1
        }
    }

    /// Tagged JSON; a space is emitted bare so it can be fed back as input.
    pub fn to_machine(&self) -> String {
        match self {
            Report::Space(d) => serde_json::to_string_pretty(d),
            other => serde_json::to_string_pretty(other),
        }
        .expect("documents serialize")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Validation(d) => {
                if d.ok {
                    out.push_str("metric: ok\n");
                }
                for v in &d.violations {
                    let _ = writeln!(
                        out,
                        "violation {:?} at ({}): {} vs {}",
                        v.axiom,
                        v.points.join(", "),
                        v.lhs,
                        v.rhs
                    );
                }
            }
            Report::Check(d) => {
                let _ = writeln!(
                    out,
                    "{} for ({}, {}) on N = {{{}}} at ε = {}: {}",
                    d.mode,
                    d.u,
                    d.v,
                    d.subset.join(", "),
                    d.epsilon,
                    holds(d.holds)
                );
                for c in &d.checks {
                    let _ = writeln!(
                        out,
                        "  {:?}: {} (slack {}, worst ({}))",
                        c.inequality,
                        holds(c.holds),
                        c.slack,
                        c.worst.join(", ")
                    );
                }
                let r = &d.required_epsilon;
                let _ = writeln!(out, "  required ε: ltp {}, sym {}, sltp {}", r.ltp, r.sym, r.sltp);
            }
            Report::Scan(d) => {
                let _ = writeln!(
                    out,
                    "{} scan on N = {{{}}} at ε = {}",
                    d.mode,
                    d.subset.join(", "),
                    d.epsilon
                );
                let _ = writeln!(
                    out,
                    "{:>8} {:>8} {:>6} {:>10} {:>10}  worst",
                    "u", "v", "holds", "slack", "req ε"
                );
                for p in &d.pairs {
                    let _ = writeln!(
                        out,
                        "{:>8} {:>8} {:>6} {:>10} {:>10}  {:?} ({})",
                        p.u,
                        p.v,
                        p.holds,
                        p.binding.slack.to_string(),
                        p.required_epsilon.to_string(),
                        p.binding.inequality,
                        p.binding.worst.join(", ")
                    );
                }
                match &d.verdict {
                    VerdictDoc::WitnessFound { u, v } => {
                        let _ = writeln!(out, "witness found: ({u}, {v})");
                    }
                    VerdictDoc::AllPairsFail {
                        min_required_epsilon,
                        u,
                        v,
                    } => {
                        let _ = writeln!(
                            out,
                            "all-pairs-fail, min required ε = {min_required_epsilon} at ({u}, {v})"
                        );
                    }
                }
                if let Some(t) = &d.truncation {
                    let _ = writeln!(
                        out,
                        "truncation: {} fresh pairs, N uses index {}, {}",
                        t.fresh_pairs,
                        t.max_index_in_subset,
                        if t.adequate {
                            "verdict extends to the whole family"
                        } else {
                            "too few fresh pairs for a family verdict"
                        }
                    );
                }
            }
            Report::Witness(d) => match &d.witness {
                Some(w) => {
                    let _ = writeln!(
                        out,
                        "{} witness ({}, {}) with slack {}",
                        d.mode, w.u, w.v, w.binding.slack
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "no {} witness on N = {{{}}} at ε = {}",
                        d.mode,
                        d.subset.join(", "),
                        d.epsilon
                    );
                }
            },
            Report::MoleculeNorm(d) => {
                for m in &d.molecules {
                    let terms: Vec<String> = m.terms.iter().map(|t| format!("{}*{}", t.coeff, t.point)).collect();
                    let _ = writeln!(out, "|| {} || = {}", terms.join(" + "), m.norm);
                }
            }
            Report::Construction(d) => match &d.built {
                None => {
                    let _ = writeln!(
                        out,
                        "witness unavailable in this finite space for N = {{{}}} at ε = {}",
                        d.subset.join(", "),
                        d.epsilon
                    );
                }
                Some(b) => {
                    let _ = writeln!(
                        out,
                        "witness pair ({}, {}), r = {}, s = {}",
                        b.u, b.v, b.radii.r, b.radii.s
                    );
                    let _ = writeln!(out, "||g|| = {} (target {})", b.norm_g, b.target_norm_g);
                    for (i, s) in b.slices.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "slice {}: c = {}, ||f|| = {}, pairing = {} ({:?}), ||f+g|| = {}, ||f-g|| = {}",
                            i + 1,
                            s.c,
                            s.norm_f,
                            s.pairing,
                            s.membership,
                            s.norm_f_plus_g,
                            s.norm_f_minus_g
                        );
                    }
                    let _ = writeln!(out, "construction: {}", if b.passed { "passed" } else { "FAILED" });
                }
            },
            Report::Space(d) => out = serde_json::to_string_pretty(d).expect("documents serialize") + "\n",
        }
        out
    }
}

fn holds(h: bool) -> &'static str {
    if h {
        "holds"
    } else {
        "fails"
    }
}
