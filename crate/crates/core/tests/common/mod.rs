//! Independent brute-force oracles shared by the integration tests.
//!
//! Nothing here calls the library's algorithms; only the space accessors and
//! the rational type are reused.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sltp_core::families::gen_l1_cloud;
use sltp_core::freespace::{pair_molecule, Molecule, WeakStarSlice};
use sltp_core::metric::{PointId, PointedMetricSpace};
use sltp_core::rational::{q, Rational};

pub fn one() -> Rational {
    Rational::one()
}

/// Minimum of `d(x,u) + d(y,v) − (1−ε)(d(x,y) + d(u,v))` over `N²`.
pub fn ltp_min_slack(space: &PointedMetricSpace, n: &[PointId], eps: &Rational, u: PointId, v: PointId) -> Rational {
    let t = one() - eps;
    let mut best: Option<Rational> = None;
    for &x in n {
        for &y in n {
            let s = space.d(x, u) + space.d(y, v) - &t * (space.d(x, y) + space.d(u, v));
            best = Some(best.map_or(s.clone(), |b| b.min(s)));
        }
    }
    best.unwrap()
}

/// Minimum four-point slack over all of `N⁴`, enumerated directly.
pub fn sym_min_slack(space: &PointedMetricSpace, n: &[PointId], eps: &Rational, u: PointId, v: PointId) -> Rational {
    let t = one() - eps;
    let two = Rational::from_integer(2);
    let mut best: Option<Rational> = None;
    for &x in n {
        for &y in n {
            for &z in n {
                for &w in n {
                    let rhs = space.d(x, u) + space.d(y, u) + space.d(z, v) + space.d(w, v);
                    let lhs = &two * space.d(u, v) + space.d(x, y) + space.d(z, w);
                    let s = rhs - &t * lhs;
                    best = Some(best.map_or(s.clone(), |b| b.min(s)));
                }
            }
        }
    }
    best.unwrap()
}

/// `max(0, max 1 − RHS/LHS)` over the two-point tuples.
pub fn ltp_required(space: &PointedMetricSpace, n: &[PointId], u: PointId, v: PointId) -> Rational {
    let mut eps = Rational::zero();
    for &x in n {
        for &y in n {
            let lhs = space.d(x, y) + space.d(u, v);
            let rhs = space.d(x, u) + space.d(y, v);
            if lhs.is_positive() {
                eps = eps.max(one() - rhs / lhs);
            }
        }
    }
    eps
}

/// `max(0, max 1 − RHS/LHS)` over all four-point tuples.
pub fn sym_required(space: &PointedMetricSpace, n: &[PointId], u: PointId, v: PointId) -> Rational {
    let two = Rational::from_integer(2);
    let mut eps = Rational::zero();
    for &x in n {
        for &y in n {
            for &z in n {
                for &w in n {
                    let rhs = space.d(x, u) + space.d(y, u) + space.d(z, v) + space.d(w, v);
                    let lhs = &two * space.d(u, v) + space.d(x, y) + space.d(z, w);
                    if lhs.is_positive() {
                        eps = eps.max(one() - rhs / lhs);
                    }
                }
            }
        }
    }
    eps
}

/// `max |f(p) − f(q)| / d(p,q)` over the given points.
pub fn lip_constant(space: &PointedMetricSpace, points: &[PointId], f: impl Fn(PointId) -> Rational) -> Rational {
    let mut best = Rational::zero();
    for &p in points {
        for &q in points {
            if p != q {
                best = best.max((f(p) - f(q)).abs() / space.d(p, q));
            }
        }
    }
    best
}

pub fn all_points(space: &PointedMetricSpace) -> Vec<PointId> {
    space.points().collect()
}

/// All labelled trees on `0..n` via Prüfer sequences, as edge lists.
fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut trees = Vec::new();
    let len = n - 2;
    let total = n.pow(len as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
        edges.push((rest[0], rest[1]));
        trees.push(edges);
    }
    trees
}

/// `max Σ λ_p f(p)` subject to `|f(p) − f(q)| ≤ d(p,q)` and `f(base) = 0`,
/// by enumerating every basic solution: a spanning tree of tight constraints
/// `f(p) − f(q) = ±d(p,q)` anchored at the base.
pub fn dual_lp_norm(space: &PointedMetricSpace, coeffs: &[Rational]) -> Rational {
    let n = space.len();
    let base = space.base().index();
    let mut best: Option<Rational> = None;
    for tree in labelled_trees(n) {
        for signs in 0u32..(1 << (n - 1)) {
            let mut f: Vec<Option<Rational>> = vec![None; n];
            f[base] = Some(Rational::zero());
            // Propagate along the tree from the base.
            let mut changed = true;
            while changed {
                changed = false;
                for (k, &(a, b)) in tree.iter().enumerate() {
                    let d = space.d(PointId(a), PointId(b)).clone();
                    let step = if signs >> k & 1 == 1 { d } else { -d };
                    match (&f[a], &f[b]) {
                        (Some(fa), None) => {
                            f[b] = Some(fa - &step);
                            changed = true;
                        }
                        (None, Some(fb)) => {
                            f[a] = Some(fb + &step);
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
            let f: Vec<Rational> = f.into_iter().map(Option::unwrap).collect();
            let feasible = (0..n).all(|p| (0..n).all(|q| (&f[p] - &f[q]).abs() <= *space.d(PointId(p), PointId(q))));
            if feasible {
                let value: Rational = coeffs.iter().zip(&f).map(|(c, x)| c * x).sum();
                best = Some(best.map_or(value.clone(), |b| b.max(value)));
            }
        }
    }
    best.expect("the base-distance function is always a basic solution")
}

/// Subsets of `points` of size `1..=max`, in lexicographic order.
pub fn subsets_up_to(points: &[PointId], max: usize) -> Vec<Vec<PointId>> {
    let mut out = Vec::new();
    fn rec(points: &[PointId], start: usize, max: usize, cur: &mut Vec<PointId>, out: &mut Vec<Vec<PointId>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..points.len() {
            cur.push(points[i]);
            rec(points, i + 1, max, cur, out);
            cur.pop();
        }
    }
    rec(points, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Re-derives every contract of a construction report from raw values.
/// Returns a description of each violation found.
pub fn construction_violations(
    space: &PointedMetricSpace,
    slices: &[WeakStarSlice],
    report: &sltp_core::construction::ConstructionReport,
) -> Vec<String> {
    let pts = all_points(space);
    let eps = &report.epsilon;
    let t = one() - eps;
    let g = |p: PointId| report.g.value(p).clone();
    let mut bad = Vec::new();
    let mut expect = |ok: bool, what: String| {
        if !ok {
            bad.push(what);
        }
    };

    let norm_g = lip_constant(space, &pts, g);
    expect(
        norm_g == report.norm_g,
        format!("reported ‖g‖ {} differs from {}", report.norm_g, norm_g),
    );
    expect(norm_g <= one(), format!("‖g‖ = {norm_g} > 1"));
    expect(norm_g >= &t * &t, format!("‖g‖ = {norm_g} < (1−ε)²"));
    expect(g(space.base()).is_zero(), "g(base) ≠ 0".into());
    expect(
        g(report.u) - g(report.v) == &t * &t * space.d(report.u, report.v),
        "g(u) − g(v) ≠ (1−ε)²d(u,v)".into(),
    );
    expect(
        ltp_min_slack(space, &report.subset, eps, report.u, report.v) >= Rational::zero(),
        "pair fails (1) on N".into(),
    );
    expect(
        sym_min_slack(space, &report.subset, eps, report.u, report.v) >= Rational::zero(),
        "pair fails (2) on N".into(),
    );

    for (i, (slice, out)) in slices.iter().zip(&report.slices).enumerate() {
        let f = |p: PointId| out.f.value(p).clone();
        let norm_f = lip_constant(space, &pts, f);
        expect(norm_f <= one(), format!("slice {i}: ‖f‖ = {norm_f} > 1"));
        let pairing: Rational = slice
            .functional
            .terms()
            .iter()
            .map(|(p, c)| c * out.f.value(*p))
            .sum::<Rational>()
            / &slice.norm_of_functional;
        expect(
            pairing > one() - &slice.alpha,
            format!("slice {i}: pairing {pairing} not above 1 − α"),
        );
        let plus = lip_constant(space, &pts, |p| f(p) + g(p));
        let minus = lip_constant(space, &pts, |p| f(p) - g(p));
        expect(plus <= one(), format!("slice {i}: ‖f + g‖ = {plus} > 1"));
        expect(minus <= one(), format!("slice {i}: ‖f − g‖ = {minus} > 1"));
        for &p in &report.subset {
            expect(out.f.value(p) == out.h.value(p), format!("slice {i}: f ≠ h on N"));
        }
        for &p in &report.domain {
            if !report.subset.contains(&p) {
                expect(*out.f.value(p) == out.c, format!("slice {i}: f ≠ c on the balls"));
            }
        }
        for y in space.points().filter(|y| !report.domain.contains(y)) {
            let formula = report
                .domain
                .iter()
                .map(|&x| out.f.value(x) + report.g.value(x).abs() - space.d(x, y))
                .max()
                .unwrap();
            expect(
                *out.f.value(y) == formula,
                format!("slice {i}: extension formula fails at {}", space.name(y)),
            );
        }
        expect(out.passed(), format!("slice {i}: report marks failure"));
    }
    expect(report.passed, "report marks failure".into());
    bad
}

/// Nonzero molecule with random small rational coefficients.
pub fn random_molecule(space: &PointedMetricSpace, rng: &mut ChaCha8Rng) -> Molecule {
    loop {
        let mut terms = Vec::new();
        for p in space.points() {
            if rng.random_bool(0.6) {
                let sign = if rng.random_bool(0.5) { 1 } else { -1 };
                terms.push((p, q(sign * rng.random_range(1..=9), rng.random_range(1..=3))));
            }
        }
        if !terms.is_empty() {
            return Molecule::new(terms).unwrap();
        }
    }
}

/// Random 1-Lipschitz function vanishing at the base: a lower envelope of
/// upward cones or an upper envelope of downward cones, shifted.
pub fn random_one_lipschitz(space: &PointedMetricSpace, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let pts = all_points(space);
    let cones: Vec<(PointId, Rational)> = (0..rng.random_range(1..=3))
        .map(|_| {
            (
                pts[rng.random_range(0..pts.len())],
                q(rng.random_range(-8..=8), rng.random_range(1..=4)),
            )
        })
        .collect();
    let upward = rng.random_bool(0.5);
    let raw: Vec<Rational> = pts
        .iter()
        .map(|&p| {
            let cone = cones
                .iter()
                .map(|(a, c)| if upward { c + space.d(*a, p) } else { c - space.d(*a, p) });
            if upward {
                cone.min().unwrap()
            } else {
                cone.max().unwrap()
            }
        })
        .collect();
    let shift = raw[space.base().index()].clone();
    raw.into_iter().map(|x| x - &shift).collect()
}

/// Random elementary-molecule slices on a random cloud, with ε below every α.
pub fn random_construction_trial(seed: u64) -> (PointedMetricSpace, Vec<WeakStarSlice>, Rational) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(12..=20);
    let space = gen_l1_cloud(m, seed).unwrap();
    let count = rng.random_range(1..=3);
    let slices: Vec<WeakStarSlice> = (0..count)
        .map(|_| {
            let x = rng.random_range(0..m);
            let y = (x + rng.random_range(1..m)) % m;
            let mu = pair_molecule(&space, PointId(x), PointId(y)).unwrap();
            WeakStarSlice::new(&space, mu, q(rng.random_range(1..=4), 4)).unwrap()
        })
        .collect();
    let min_alpha = slices.iter().map(|s| s.alpha.clone()).min().unwrap();
    let eps = min_alpha * q(rng.random_range(1..=9), 10);
    (space, slices, eps)
}
