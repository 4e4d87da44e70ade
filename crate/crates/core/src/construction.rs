//! Symmetric slice witnesses from a trapezoid witness pair.
//!
//! Given weak* slices `S₁,…,Sₙ` of the dual unit ball and `0 < ε < min αᵢ`,
//! a pair `(u, v)` satisfying both trapezoid inequalities on
//! `N = {base} ∪ supports` yields
//!
//! * a bump `g` supported on `B(u,r) ∪ B(v,s)` with `g(u) − g(v) = (1−ε)²d(u,v)`,
//! * functions `fᵢ ∈ Sᵢ` with `‖fᵢ ± g‖ ≤ 1`,
//!
//! built as follows: `hᵢ` is a scaled norm-attaining functional for `Sᵢ`,
//! `fᵢ` equals `hᵢ` on `N` and a constant `cᵢ` on the balls, and is then
//! extended to the whole space by the weighted supremum formula with weight `|g|`.
//! Every contract is re-verified by exact pairwise enumeration.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freespace::{
    lip_norm, molecule_norm, sup_extend, LipschitzFunction, PartialFunction, SliceCheck, WeakStarSlice,
};
use crate::metric::{open_ball, PointId, PointedMetricSpace};
use crate::rational::Rational;
use crate::trapezoid::{check_ineq_ltp, check_ineq_sym, find_witness, half_margin, Mode, WitnessQuery};

/// Ball radii around the (possibly reoriented) witness pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiBundle {
    /// Centre of the ball of radius `r`.
    pub u: PointId,
    /// Centre of the ball of radius `s`.
    pub v: PointId,
    pub epsilon: Rational,
    pub r0: Rational,
    pub s0: Rational,
    /// `0 < r ≤ r0`
    pub r: Rational,
    /// `0 ≤ s ≤ s0`, `r + s = (1−ε)²·d(u,v)`
    pub s: Rational,
    /// Whether `u` and `v` were exchanged to make `r` positive.
    pub swapped: bool,
}

/// Anchors bounding the constant value `c` taken on the balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleInterval {
    /// `max_N (h − d(·,u))`
    pub a_check: Rational,
    /// `min_N (h + d(·,u))`
    pub a_hat: Rational,
    /// `max_N (h − d(·,v))`
    pub b_check: Rational,
    /// `min_N (h + d(·,v))`
    pub b_hat: Rational,
    /// `max(ǎ + r, b̌ + s)`
    pub lo: Rational,
    /// `min(â − r, b̂ − s)`
    pub hi: Rational,
}

impl AdmissibleInterval {
    pub fn midpoint(&self) -> Rational {
        self.lo.midpoint(&self.hi)
    }

    pub fn contains(&self, c: &Rational) -> bool {
        self.lo <= *c && *c <= self.hi
    }
}

fn one_minus(epsilon: &Rational) -> Rational {
    Rational::one() - epsilon
}

/// `hᵢ = (1−ε−η)·f*` with `η = (α−ε)/2`, where `f*` attains the norm of the
/// slice functional. Then `‖hᵢ‖ = 1−ε−η < 1−ε` and its normalized pairing is
/// `1−ε−η > 1−α`.
pub fn pick_interior_function(
    space: &PointedMetricSpace,
    slice: &WeakStarSlice,
    epsilon: &Rational,
) -> Result<LipschitzFunction> {
    if epsilon.is_negative() || *epsilon >= slice.alpha {
        return Err(Error::Precondition(format!(
            "epsilon {epsilon} must lie in [0, alpha) with alpha = {}",
            slice.alpha
        )));
    }
    let eta = (&slice.alpha - epsilon) / Rational::from_integer(2);
    let dual = molecule_norm(space, &slice.functional)?.dual;
    Ok(dual.scaled(&(one_minus(epsilon) - eta)))
}

fn require_witness(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
) -> Result<()> {
    if !check_ineq_ltp(space, subset, epsilon, u, v)?.holds {
        return Err(Error::Precondition(format!(
            "({}, {}) fails the two-point inequality on N",
            space.name(u),
            space.name(v)
        )));
    }
    if !check_ineq_sym(space, subset, epsilon, u, v)?.holds {
        return Err(Error::Precondition(format!(
            "({}, {}) fails the four-point inequality on N",
            space.name(u),
            space.name(v)
        )));
    }
    Ok(())
}

/// `r0`, `s0` are half the four-point margins at `u` and `v`; `r` takes as
/// much of `(1−ε)²d(u,v)` as `r0` allows and `s` the rest.
pub fn compute_radii(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
    u: PointId,
    v: PointId,
) -> Result<RadiiBundle> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::OutOfRange(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !subset.contains(&space.base()) {
        return Err(Error::Precondition("N must contain the base point".into()));
    }
    require_witness(space, subset, epsilon, u, v)?;

    let two = Rational::from_integer(2);
    let r0 = half_margin(space, subset, epsilon, u).0 / &two;
    let s0 = half_margin(space, subset, epsilon, v).0 / &two;
    let duv = space.d(u, v);
    if &r0 + &s0 < one_minus(epsilon) * duv {
        return Err(Error::Invariant(format!(
            "r0 + s0 = {} is below (1−ε)d(u,v) = {}",
            &r0 + &s0,
            one_minus(epsilon) * duv
        )));
    }
    let total = one_minus(epsilon) * one_minus(epsilon) * duv;
    let split = |r0: &Rational| {
        let r = r0.clone().min(total.clone());
        let s = &total - &r;
        (r, s)
    };
    let (r, s) = split(&r0);
    let bundle = if r.is_positive() {
        RadiiBundle {
            u,
            v,
            epsilon: epsilon.clone(),
            r0,
            s0,
            r,
            s,
            swapped: false,
        }
    } else {
        let (r, s) = split(&s0);
        RadiiBundle {
            u: v,
            v: u,
            epsilon: epsilon.clone(),
            r0: s0,
            s0: r0,
            r,
            s,
            swapped: true,
        }
    };
    if !bundle.r.is_positive() || bundle.s.is_negative() || bundle.r > bundle.r0 || bundle.s > bundle.s0 {
        return Err(Error::Invariant(format!("inconsistent radii {bundle:?}")));
    }
    Ok(bundle)
}

/// `g = r − d(·,u)` on `B(u,r)`, `d(·,v) − s` on `B(v,s)`, zero elsewhere.
pub fn build_bump(space: &PointedMetricSpace, radii: &RadiiBundle) -> Result<LipschitzFunction> {
    let (u, v) = (radii.u, radii.v);
    let ball_u = open_ball(space, u, &radii.r);
    let ball_v = open_ball(space, v, &radii.s);
    if let Some(p) = ball_u.intersection(&ball_v).next() {
        return Err(Error::Invariant(format!(
            "balls around u and v overlap at {}",
            space.name(*p)
        )));
    }
    let base = space.base();
    if ball_u.contains(&base) || ball_v.contains(&base) {
        return Err(Error::Precondition("the base point lies inside a bump ball".into()));
    }
    let g = LipschitzFunction::from_fn(space, |p| {
        if ball_u.contains(&p) {
            &radii.r - space.d(p, u)
        } else if ball_v.contains(&p) {
            space.d(p, v) - &radii.s
        } else {
            Rational::zero()
        }
    })?;
    if lip_norm(space, &g).value > Rational::one() {
        return Err(Error::Invariant("bump is not 1-Lipschitz".into()));
    }
    if g.value(u) - g.value(v) != &radii.r + &radii.s {
        return Err(Error::Invariant("bump does not separate u and v by r + s".into()));
    }
    Ok(g)
}

/// Anchors for `h` on `N` and the interval of admissible ball values.
pub fn admissible_interval(
    space: &PointedMetricSpace,
    h: &LipschitzFunction,
    subset: &[PointId],
    radii: &RadiiBundle,
) -> Result<AdmissibleInterval> {
    let epsilon = &radii.epsilon;
    if subset.is_empty() {
        return Err(Error::OutOfRange("the subset N must be nonempty".into()));
    }
    let norm_on_n = lip_norm(space, &h.restrict(subset.iter().copied())).value;
    if norm_on_n >= one_minus(epsilon) {
        return Err(Error::Precondition(format!(
            "‖h‖ on N is {norm_on_n}, not below 1 − ε = {}",
            one_minus(epsilon)
        )));
    }
    let (u, v) = (radii.u, radii.v);
    if !check_ineq_ltp(space, subset, epsilon, u, v)?.holds {
        return Err(Error::Precondition(
            "the pair fails the two-point inequality on N".into(),
        ));
    }
    let max_of = |f: &dyn Fn(PointId) -> Rational| subset.iter().map(|&x| f(x)).max().expect("nonempty");
    let min_of = |f: &dyn Fn(PointId) -> Rational| subset.iter().map(|&x| f(x)).min().expect("nonempty");
    let a_check = max_of(&|x| h.value(x) - space.d(x, u));
    let a_hat = min_of(&|x| h.value(x) + space.d(x, u));
    let b_check = max_of(&|x| h.value(x) - space.d(x, v));
    let b_hat = min_of(&|x| h.value(x) + space.d(x, v));
    let lo = (&a_check + &radii.r).max(&b_check + &radii.s);
    let hi = (&a_hat - &radii.r).min(&b_hat - &radii.s);
    if lo > hi {
        return Err(Error::Invariant(format!("empty admissible interval [{lo}, {hi}]")));
    }
    Ok(AdmissibleInterval {
        a_check,
        a_hat,
        b_check,
        b_hat,
        lo,
        hi,
    })
}

/// Lipschitz constants on `L` before extension; each must be at most 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalNorms {
    pub plus_g: Rational,
    pub minus_g: Rational,
    pub plus_abs_g: Rational,
    pub minus_abs_g: Rational,
}

impl LocalNorms {
    pub fn max(&self) -> Rational {
        [&self.plus_g, &self.minus_g, &self.plus_abs_g, &self.minus_abs_g]
            .into_iter()
            .max()
            .cloned()
            .expect("four entries")
    }
}

/// Everything computed and verified for one slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceOutcome {
    pub h: LipschitzFunction,
    pub interval: AdmissibleInterval,
    pub c: Rational,
    pub f: LipschitzFunction,
    pub local: LocalNorms,
    pub norm_f: Rational,
    pub membership: SliceCheck,
    pub norm_f_plus_g: Rational,
    pub norm_f_minus_g: Rational,
    /// Whether `f + g` and `f − g` themselves lie in the slice; reported, not required.
    pub perturbed_in_slice: [bool; 2],
}

impl SliceOutcome {
    pub fn passed(&self) -> bool {
        let one = Rational::one();
        self.norm_f <= one
            && self.membership.membership.is_member()
            && self.norm_f_plus_g <= one
            && self.norm_f_minus_g <= one
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionReport {
    pub u: PointId,
    pub v: PointId,
    pub epsilon: Rational,
    /// `N = {base} ∪ supports`.
    pub subset: Vec<PointId>,
    /// `L = N ∪ B(u,r) ∪ B(v,s)`.
    pub domain: Vec<PointId>,
    pub radii: RadiiBundle,
    pub g: LipschitzFunction,
    pub norm_g: Rational,
    pub slices: Vec<SliceOutcome>,
    pub passed: bool,
}

impl ConstructionReport {
    /// `(1−ε)²`
    pub fn target_norm(&self) -> Rational {
        one_minus(&self.epsilon) * one_minus(&self.epsilon)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructionOutcome {
    Built(Box<ConstructionReport>),
    /// No candidate pair satisfies both inequalities on `N` at `ε`.
    WitnessUnavailable {
        subset: Vec<PointId>,
        epsilon: Rational,
    },
}

impl ConstructionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ConstructionOutcome::Built(r) if r.passed)
    }

    pub fn report(&self) -> Option<&ConstructionReport> {
        match self {
            ConstructionOutcome::Built(r) => Some(r),
            ConstructionOutcome::WitnessUnavailable { .. } => None,
        }
    }
}

/// `{base} ∪ supports`, increasing.
pub fn slice_subset(space: &PointedMetricSpace, slices: &[WeakStarSlice]) -> Vec<PointId> {
    let mut n: BTreeSet<PointId> = slices.iter().flat_map(|s| s.functional.support()).collect();
    n.insert(space.base());
    n.into_iter().collect()
}

/// Runs the whole construction with candidate pairs `u < v` in index order.
pub fn build_symmetric_witnesses(
    space: &PointedMetricSpace,
    slices: &[WeakStarSlice],
    epsilon: &Rational,
) -> Result<ConstructionOutcome> {
    build_symmetric_witnesses_with(space, slices, epsilon, None)
}

/// As [`build_symmetric_witnesses`], trying `candidates` in order when given.
pub fn build_symmetric_witnesses_with(
    space: &PointedMetricSpace,
    slices: &[WeakStarSlice],
    epsilon: &Rational,
    candidates: Option<Vec<(PointId, PointId)>>,
) -> Result<ConstructionOutcome> {
    if slices.is_empty() {
        return Err(Error::OutOfRange("at least one slice is required".into()));
    }
    let min_alpha = slices.iter().map(|s| &s.alpha).min().expect("nonempty");
    if !epsilon.is_positive() || epsilon >= min_alpha {
        return Err(Error::OutOfRange(format!(
            "epsilon must lie in (0, min alpha) = (0, {min_alpha}), got {epsilon}"
        )));
    }
    if let Some(p) = slices
        .iter()
        .flat_map(|s| s.functional.support())
        .find(|p| p.0 >= space.len())
    {
        return Err(Error::UnknownPoint(format!("{p:?}")));
    }

    let subset = slice_subset(space, slices);
    let mut query = WitnessQuery::new(subset.clone(), epsilon.clone());
    query.candidates = candidates;
    let Some(witness) = find_witness(space, &query, Mode::Sltp)? else {
        return Ok(ConstructionOutcome::WitnessUnavailable {
            subset,
            epsilon: epsilon.clone(),
        });
    };

    let radii = compute_radii(space, &subset, epsilon, witness.u, witness.v)?;
    let g = build_bump(space, &radii)?;
    let balls: BTreeSet<PointId> = open_ball(space, radii.u, &radii.r)
        .into_iter()
        .chain(open_ball(space, radii.v, &radii.s))
        .collect();
    if subset.iter().any(|p| balls.contains(p)) {
        return Err(Error::Invariant("a bump ball meets N".into()));
    }
    let domain: Vec<PointId> = subset
        .iter()
        .copied()
        .chain(balls.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let slices: Vec<SliceOutcome> = slices
        .par_iter()
        .map(|slice| build_slice(space, slice, &subset, &domain, &balls, &radii, &g))
        .collect::<Result<_>>()?;

    let norm_g = lip_norm(space, &g).value;
    let target = one_minus(epsilon) * one_minus(epsilon);
    let passed = slices.iter().all(SliceOutcome::passed) && norm_g <= Rational::one() && norm_g >= target;
    Ok(ConstructionOutcome::Built(Box::new(ConstructionReport {
        u: radii.u,
        v: radii.v,
        epsilon: epsilon.clone(),
        subset,
        domain,
        radii,
        g,
        norm_g,
        slices,
        passed,
    })))
}

fn build_slice(
    space: &PointedMetricSpace,
    slice: &WeakStarSlice,
    subset: &[PointId],
    domain: &[PointId],
    balls: &BTreeSet<PointId>,
    radii: &RadiiBundle,
    g: &LipschitzFunction,
) -> Result<SliceOutcome> {
    let h = pick_interior_function(space, slice, &radii.epsilon)?;
    let interval = admissible_interval(space, &h, subset, radii)?;
    let c = interval.midpoint();

    // c ∓ r stays between the u-anchors; likewise c ∓ s for the v-anchors.
    let (r, s) = (&radii.r, &radii.s);
    let two_r = r * Rational::from_integer(2);
    let two_s = s * Rational::from_integer(2);
    let within = |x: Rational, lo: Rational, hi: &Rational| lo <= x && x <= *hi;
    let chain = within(&c - r, interval.a_check.clone(), &(&interval.a_hat - &two_r))
        && within(&c + r, &interval.a_check + &two_r, &interval.a_hat)
        && within(&c - s, interval.b_check.clone(), &(&interval.b_hat - &two_s))
        && within(&c + s, &interval.b_check + &two_s, &interval.b_hat);
    if !chain {
        return Err(Error::Invariant(format!("ball value {c} breaks the anchor chain")));
    }

    let f_local: PartialFunction = domain
        .iter()
        .map(|&p| {
            (
                p,
                if balls.contains(&p) {
                    c.clone()
                } else {
                    h.value(p).clone()
                },
            )
        })
        .collect();
    let g_local = g.restrict(domain.iter().copied());
    let abs_g = g_local.abs();
    let local = LocalNorms {
        plus_g: lip_norm(space, &f_local.zip_with(&g_local, |a, b| a + b)).value,
        minus_g: lip_norm(space, &f_local.zip_with(&g_local, |a, b| a - b)).value,
        plus_abs_g: lip_norm(space, &f_local.zip_with(&abs_g, |a, b| a + b)).value,
        minus_abs_g: lip_norm(space, &f_local.zip_with(&abs_g, |a, b| a - b)).value,
    };
    if local.max() > Rational::one() {
        return Err(Error::Invariant(format!(
            "f ± g is not 1-Lipschitz on L (constant {})",
            local.max()
        )));
    }

    let f = sup_extend(space, &f_local, &abs_g)?;
    let norm_f = lip_norm(space, &f).value;
    let membership = crate::freespace::slice_contains(space, slice, &f)?;
    let f_plus = f.plus(g);
    let f_minus = f.minus(g);
    let norm_f_plus_g = lip_norm(space, &f_plus).value;
    let norm_f_minus_g = lip_norm(space, &f_minus).value;
    let perturbed_in_slice = [
        crate::freespace::slice_contains(space, slice, &f_plus)?
            .membership
            .is_member(),
        crate::freespace::slice_contains(space, slice, &f_minus)?
            .membership
            .is_member(),
    ];
    Ok(SliceOutcome {
        h,
        interval,
        c,
        f,
        local,
        norm_f,
        membership,
        norm_f_plus_g,
        norm_f_minus_g,
        perturbed_in_slice,
    })
}

/// First ordered pair `(u, v)`, `u ≠ v`, with `g(u) − g(v) ≥ (1−α)·d(u,v)`.
pub fn extract_witness_pair(
    space: &PointedMetricSpace,
    g: &LipschitzFunction,
    alpha: &Rational,
) -> Result<(PointId, PointId)> {
    if !alpha.is_positive() || *alpha >= Rational::one() {
        return Err(Error::OutOfRange(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let threshold = one_minus(alpha);
    let norm = lip_norm(space, g).value;
    if norm < threshold {
        return Err(Error::Precondition(format!(
            "‖g‖ = {norm} is below 1 − α = {threshold}"
        )));
    }
    space
        .points()
        .flat_map(|u| space.points().map(move |v| (u, v)))
        .find(|&(u, v)| u != v && g.value(u) - g.value(v) >= &threshold * space.d(u, v))
        .ok_or_else(|| Error::Invariant("norm-attaining pair does not qualify".into()))
}
