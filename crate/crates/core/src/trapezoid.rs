//! The two trapezoid inequalities as exact predicates, with margins,
//! witness search and exhaustive scans over candidate pairs.
//!
//! For a finite subset `N`, `ε ∈ [0, 1)` and a pair `u ≠ v`:
//!
//! * the long trapezoid inequality asks, for all `x, y ∈ N`,
//!   `(1−ε)(d(x,y) + d(u,v)) ≤ d(x,u) + d(y,v)`;
//! * the symmetric inequality asks, for all `x, y, z, w ∈ N`,
//!   `(1−ε)(2d(u,v) + d(x,y) + d(z,w)) ≤ d(x,u) + d(y,u) + d(z,v) + d(w,v)`.
//!
//! Slack is always `RHS − (1−ε)·LHS`; a check holds iff its minimum slack is
//! nonnegative. Quantifiers run over all tuples, degenerate ones included.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::metric::{PointId, PointedMetricSpace};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// The two-point long trapezoid inequality.
    Ltp,
    /// The four-point symmetric inequality.
    Sym,
}

/// Which property a witness search or scan targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ltp,
    /// Both inequalities for the same pair.
    Sltp,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ltp" => Ok(Mode::Ltp),
            "sltp" => Ok(Mode::Sltp),
            other => Err(Error::OutOfRange(format!(
                "unknown mode {other:?} (expected ltp or sltp)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ltp => "ltp",
            Mode::Sltp => "sltp",
        })
    }
}

/// The tuple of points from `N` at which an inequality is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tuple {
    Pair([PointId; 2]),
    Quad([PointId; 4]),
}

impl Tuple {
    pub fn points(&self) -> &[PointId] {
        match self {
            Tuple::Pair(p) => p,
            Tuple::Quad(p) => p,
        }
    }
}

/// Outcome of one quantified inequality (or of their conjunction) for one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapezoidCheck {
    pub holds: bool,
    /// The inequality whose worst tuple is reported.
    pub inequality: Inequality,
    pub worst: Tuple,
    pub slack: Rational,
}

fn one_minus(epsilon: &Rational) -> Rational {
    Rational::one() - epsilon
}

fn check_args(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::OutOfRange("the subset N must be nonempty".into()));
    }
    if let Some(p) = subset.iter().chain([&u, &v]).find(|p| p.0 >= space.len()) {
        return Err(Error::UnknownPoint(format!("{p:?}")));
    }
    if epsilon.is_negative() || *epsilon >= Rational::one() {
        return Err(Error::OutOfRange(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    if u == v {
        return Err(Error::SamePoint(space.name(u).to_string()));
    }
    Ok(())
}

/// Slack of the long trapezoid inequality at one tuple `(x, y)`.
pub fn ltp_slack(
    space: &PointedMetricSpace,
    epsilon: &Rational,
    u: PointId,
    v: PointId,
    x: PointId,
    y: PointId,
) -> Rational {
    let rhs = space.d(x, u) + space.d(y, v);
    rhs - one_minus(epsilon) * (space.d(x, y) + space.d(u, v))
}

/// Slack of the symmetric inequality at one tuple `(x, y, z, w)`.
#[allow(clippy::too_many_arguments)]
pub fn sym_slack(
    space: &PointedMetricSpace,
    epsilon: &Rational,
    u: PointId,
    v: PointId,
    [x, y, z, w]: [PointId; 4],
) -> Rational {
    let rhs = space.d(x, u) + space.d(y, u) + space.d(z, v) + space.d(w, v);
    let lhs = Rational::from_integer(2) * space.d(u, v) + space.d(x, y) + space.d(z, w);
    rhs - one_minus(epsilon) * lhs
}

/// `min_{x,y ∈ N} d(x,c) + d(y,c) − (1−ε)d(x,y)` and the first minimizing pair.
///
/// The symmetric inequality splits into one such term per endpoint, so its
/// minimum slack is `margin(u) + margin(v) − 2(1−ε)d(u,v)`.
pub fn half_margin(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    centre: PointId,
) -> (Rational, [PointId; 2]) {
    let scale = one_minus(epsilon);
    let mut best: Option<(Rational, [PointId; 2])> = None;
    for &x in subset {
        for &y in subset {
            let m = space.d(x, centre) + space.d(y, centre) - &scale * space.d(x, y);
            if best.as_ref().is_none_or(|(b, _)| m < *b) {
                best = Some((m, [x, y]));
            }
        }
    }
    best.expect("subset is nonempty")
}

/// The long trapezoid inequality over all `(x, y) ∈ N × N`.
pub fn check_ineq_ltp(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
) -> Result<TrapezoidCheck> {
    check_args(space, subset, epsilon, u, v)?;
    let mut best: Option<(Rational, [PointId; 2])> = None;
    for &x in subset {
        for &y in subset {
            let s = ltp_slack(space, epsilon, u, v, x, y);
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, [x, y]));
            }
        }
    }
    let (slack, tuple) = best.expect("subset is nonempty");
    Ok(TrapezoidCheck {
        holds: !slack.is_negative(),
        inequality: Inequality::Ltp,
        worst: Tuple::Pair(tuple),
        slack,
    })
}

/// The symmetric inequality over all `(x, y, z, w) ∈ N⁴`.
pub fn check_ineq_sym(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
) -> Result<TrapezoidCheck> {
    check_args(space, subset, epsilon, u, v)?;
    let (mu, [x, y]) = half_margin(space, subset, epsilon, u);
    let (mv, [z, w]) = half_margin(space, subset, epsilon, v);
    let slack = mu + mv - Rational::from_integer(2) * one_minus(epsilon) * space.d(u, v);
    Ok(TrapezoidCheck {
        holds: !slack.is_negative(),
        inequality: Inequality::Sym,
        worst: Tuple::Quad([x, y, z, w]),
        slack,
    })
}

/// Both inequalities for the same pair; the reported tuple comes from the
/// binding one (the two-point inequality on ties).
pub fn check_sltp(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
) -> Result<TrapezoidCheck> {
    let ltp = check_ineq_ltp(space, subset, epsilon, u, v)?;
    let sym = check_ineq_sym(space, subset, epsilon, u, v)?;
    let worst = if sym.slack < ltp.slack { sym } else { ltp };
    Ok(worst)
}

pub fn check(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
    mode: Mode,
) -> Result<TrapezoidCheck> {
    match mode {
        Mode::Ltp => check_ineq_ltp(space, subset, epsilon, u, v),
        Mode::Sltp => check_sltp(space, subset, epsilon, u, v),
    }
}

/// Smallest `ε` at which each inequality holds for a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequiredEpsilon {
    pub ltp: Rational,
    pub ltp_tuple: Tuple,
    pub sym: Rational,
    pub sym_tuple: Tuple,
}

impl RequiredEpsilon {
    /// Both inequalities together.
    pub fn sltp(&self) -> Rational {
        self.ltp.clone().max(self.sym.clone())
    }

    pub fn for_mode(&self, mode: Mode) -> Rational {
        match mode {
            Mode::Ltp => self.ltp.clone(),
            Mode::Sltp => self.sltp(),
        }
    }
}

/// Minimizes `rhs/lhs` over a finite tuple family whose `rhs − λ·lhs` can be
/// minimized directly (Dinkelbach iteration; exact on finite sets).
fn min_ratio<T: Copy>(
    start: (Rational, Rational, T),
    mut minimize: impl FnMut(&Rational) -> (Rational, Rational, T),
) -> (Rational, T) {
    let (mut rhs, mut lhs, mut tuple) = start;
    loop {
        let lambda = &rhs / &lhs;
        let (r, l, t) = minimize(&lambda);
        if (&r - &lambda * &l).is_negative() {
            (rhs, lhs, tuple) = (r, l, t);
        } else {
            return (lambda, tuple);
        }
    }
}

/// `ε* = max(0, max over tuples of 1 − RHS/LHS)`; a check holds at `ε` iff `ε ≥ ε*`.
pub fn required_epsilon(
    space: &PointedMetricSpace,
    subset: &[PointId],
    u: PointId,
    v: PointId,
) -> Result<RequiredEpsilon> {
    check_args(space, subset, &Rational::zero(), u, v)?;
    let duv = space.d(u, v);
    // Every tuple has LHS ≥ d(u,v) > 0 in a valid metric.
    if !duv.is_positive() {
        return Err(Error::Precondition("d(u, v) must be positive".into()));
    }

    let ltp_terms = |x: PointId, y: PointId| (space.d(x, u) + space.d(y, v), space.d(x, y) + duv);
    let first = subset[0];
    let (r0, l0) = ltp_terms(first, first);
    let (ltp_ratio, ltp_tuple) = min_ratio((r0, l0, [first, first]), |lambda| {
        let mut best: Option<(Rational, Rational, Rational, [PointId; 2])> = None;
        for &x in subset {
            for &y in subset {
                let (r, l) = ltp_terms(x, y);
                let key = &r - lambda * &l;
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, r, l, [x, y]));
                }
            }
        }
        let (_, r, l, t) = best.expect("subset is nonempty");
        (r, l, t)
    });

    // RHS − λ·LHS separates into a u-part over (x, y) and a v-part over (z, w).
    let half = |centre: PointId, lambda: &Rational| {
        let mut best: Option<(Rational, Rational, Rational, [PointId; 2])> = None;
        for &x in subset {
            for &y in subset {
                let r = space.d(x, centre) + space.d(y, centre);
                let l = space.d(x, y).clone();
                let key = &r - lambda * &l;
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, r, l, [x, y]));
                }
            }
        }
        best.expect("subset is nonempty")
    };
    let two_duv = Rational::from_integer(2) * duv;
    let quad = [first; 4];
    let start = (
        space.d(first, u) * Rational::from_integer(2) + space.d(first, v) * Rational::from_integer(2),
        two_duv.clone(),
        quad,
    );
    let (sym_ratio, sym_tuple) = min_ratio(start, |lambda| {
        let (_, ru, lu, [x, y]) = half(u, lambda);
        let (_, rv, lv, [z, w]) = half(v, lambda);
        (ru + rv, lu + lv + &two_duv, [x, y, z, w])
    });

    let eps = |ratio: Rational| (Rational::one() - ratio).max(Rational::zero());
    Ok(RequiredEpsilon {
        ltp: eps(ltp_ratio),
        ltp_tuple: Tuple::Pair(ltp_tuple),
        sym: eps(sym_ratio),
        sym_tuple: Tuple::Quad(sym_tuple),
    })
}

/// A finite subset, a tolerance, and the pairs to try.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessQuery {
    pub subset: Vec<PointId>,
    pub epsilon: Rational,
    /// Tried in the order given; `None` means all pairs `u < v` in index order.
    pub candidates: Option<Vec<(PointId, PointId)>>,
}

impl WitnessQuery {
    pub fn new(subset: Vec<PointId>, epsilon: Rational) -> Self {
        WitnessQuery {
            subset,
            epsilon,
            candidates: None,
        }
    }

    pub fn with_candidates(mut self, candidates: Vec<(PointId, PointId)>) -> Self {
        self.candidates = Some(candidates);
        self
    }

    fn pairs(&self, space: &PointedMetricSpace) -> Vec<(PointId, PointId)> {
        match &self.candidates {
            Some(c) => c.clone(),
            None => all_pairs(space),
        }
    }
}

/// All `(u, v)` with `u < v`, lexicographic by index.
pub fn all_pairs(space: &PointedMetricSpace) -> Vec<(PointId, PointId)> {
    space
        .points()
        .flat_map(|u| space.points().filter(move |&v| u < v).map(move |v| (u, v)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub u: PointId,
    pub v: PointId,
    pub check: TrapezoidCheck,
}

/// Sign decisions for both inequalities on integer-scaled distances.
///
/// With `ε = p/q` and distances scaled by `L > 0`, every slack times `q·L` is
/// an integer combination of the scaled distances, so its sign is exact.
struct IntegerKernel<'a> {
    d: &'a [i64],
    n: usize,
    q: i128,
    /// `q − p`
    t: i128,
}

impl<'a> IntegerKernel<'a> {
    fn new(space: &'a PointedMetricSpace, epsilon: &Rational) -> Option<Self> {
        use num_traits::ToPrimitive;
        let d = space.integer_distances()?;
        let p = epsilon.numer().to_i64()? as i128;
        let q = epsilon.denom().to_i64()? as i128;
        Some(IntegerKernel {
            d,
            n: space.len(),
            q,
            t: q - p,
        })
    }

    fn at(&self, a: PointId, b: PointId) -> i128 {
        self.d[a.0 * self.n + b.0] as i128
    }

    fn ltp_holds(&self, subset: &[PointId], u: PointId, v: PointId) -> bool {
        let duv = self.at(u, v);
        subset.iter().all(|&x| {
            subset
                .iter()
                .all(|&y| self.q * (self.at(x, u) + self.at(y, v)) >= self.t * (self.at(x, y) + duv))
        })
    }

    fn half_margin(&self, subset: &[PointId], c: PointId) -> i128 {
        subset
            .iter()
            .flat_map(|&x| {
                subset
                    .iter()
                    .map(move |&y| self.q * (self.at(x, c) + self.at(y, c)) - self.t * self.at(x, y))
            })
            .min()
            .expect("subset is nonempty")
    }

    fn sym_holds(&self, subset: &[PointId], u: PointId, v: PointId) -> bool {
        self.half_margin(subset, u) + self.half_margin(subset, v) >= 2 * self.t * self.at(u, v)
    }
}

/// First candidate pair for which the check holds.
pub fn find_witness(space: &PointedMetricSpace, query: &WitnessQuery, mode: Mode) -> Result<Option<Witness>> {
    let kernel = IntegerKernel::new(space, &query.epsilon);
    let (n, eps) = (&query.subset, &query.epsilon);
    for (u, v) in query.pairs(space) {
        check_args(space, n, eps, u, v)?;
        let holds = match &kernel {
            Some(k) => k.ltp_holds(n, u, v) && (mode == Mode::Ltp || k.sym_holds(n, u, v)),
            // The four-point check only matters once the two-point one holds.
            None => check_ineq_ltp(space, n, eps, u, v)?.holds && check(space, n, eps, u, v, mode)?.holds,
        };
        if holds {
            let c = check(space, n, eps, u, v, mode)?;
            if !c.holds {
                return Err(Error::Invariant("integer and rational checks disagree".into()));
            }
            return Ok(Some(Witness { u, v, check: c }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairResult {
    pub u: PointId,
    pub v: PointId,
    pub check: TrapezoidCheck,
    pub required_epsilon: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    WitnessFound {
        u: PointId,
        v: PointId,
    },
    AllPairsFail {
        min_required_epsilon: Rational,
        /// First pair attaining the minimum.
        at: (PointId, PointId),
    },
}

/// The scanned space is a truncation of an infinite family; the verdict
/// transfers to the whole family only if every fresh index outside the
/// truncation behaves like one inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationNote {
    pub family: FamilySpec,
    pub fresh_pairs: usize,
    /// Largest fresh index used by `N` (0 if none).
    pub max_index_in_subset: usize,
    /// `fresh_pairs > max_index_in_subset`: at least one untouched fresh pair is present,
    /// and by index symmetry every omitted pair is isometric to it.
    pub adequate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub mode: Mode,
    pub epsilon: Rational,
    pub subset: Vec<PointId>,
    pub pairs: Vec<PairResult>,
    pub verdict: Verdict,
    pub truncation: Option<TruncationNote>,
}

/// Checks every pair `u < v` of the space.
pub fn counterexample_scan(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    mode: Mode,
) -> Result<ScanReport> {
    let pairs: Vec<PairResult> = all_pairs(space)
        .into_par_iter()
        .map(|(u, v)| {
            let check = check(space, subset, epsilon, u, v, mode)?;
            let required_epsilon = required_epsilon(space, subset, u, v)?.for_mode(mode);
            Ok(PairResult {
                u,
                v,
                check,
                required_epsilon,
            })
        })
        .collect::<Result<_>>()?;
    if pairs.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: space.len(),
        });
    }
    let verdict = match pairs.iter().find(|p| p.check.holds) {
        Some(p) => Verdict::WitnessFound { u: p.u, v: p.v },
        None => {
            let best = pairs
                .iter()
                .min_by(|a, b| a.required_epsilon.cmp(&b.required_epsilon))
                .expect("nonempty");
            Verdict::AllPairsFail {
                min_required_epsilon: best.required_epsilon.clone(),
                at: (best.u, best.v),
            }
        }
    };
    let truncation = space.family().and_then(|family| {
        let fresh_pairs = family.fresh_pairs()?;
        let max_index_in_subset = subset.iter().filter_map(|&p| family.fresh_index(p)).max().unwrap_or(0);
        Some(TruncationNote {
            family: family.clone(),
            fresh_pairs,
            max_index_in_subset,
            adequate: fresh_pairs > max_index_in_subset,
        })
    });
    Ok(ScanReport {
        mode,
        epsilon: epsilon.clone(),
        subset: subset.to_vec(),
        pairs,
        verdict,
        truncation,
    })
}
