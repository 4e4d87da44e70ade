//! Structural invariants over randomized spaces.

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sltp_core::families::{gen_l1_cloud, gen_random_graph_metric, gen_random_l1_vectors, l1_tail_split_candidates};
use sltp_core::freespace::{
    evaluate_pairing, is_one_lipschitz, lip_norm, molecule_norm, pair_molecule, sup_extend, LipschitzFunction,
    Molecule, PartialFunction,
};
use sltp_core::metric::{open_ball, validate_metric, PointId, PointedMetricSpace};
use sltp_core::rational::{q, Rational};
use sltp_core::trapezoid::{check_ineq_ltp, check_ineq_sym, check_sltp, ltp_slack, required_epsilon, sym_slack};

const CASES: u32 = 256;

/// A random metric, a nonempty subset `N`, a pair `u ≠ v` and `ε ∈ [0, 1)`.
#[derive(Debug, Clone)]
struct Instance {
    space: PointedMetricSpace,
    subset: Vec<PointId>,
    u: PointId,
    v: PointId,
    eps: Rational,
}

fn instance() -> impl Strategy<Value = Instance> {
    (3usize..=7, any::<u64>(), any::<u64>(), 0i64..20).prop_map(|(n, seed, pick, e)| {
        let space = gen_random_graph_metric(n, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let mut pts: Vec<PointId> = space.points().collect();
        pts.shuffle(&mut rng);
        let size = rng.random_range(1..=n);
        let mut subset = pts[..size].to_vec();
        subset.sort();
        let u = PointId(rng.random_range(0..n));
        let v = PointId((u.0 + rng.random_range(1..n)) % n);
        Instance {
            space,
            subset,
            u,
            v,
            eps: q(e, 20),
        }
    })
}

fn random_values(space: &PointedMetricSpace, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    space
        .points()
        .map(|p| {
            if p == space.base() {
                Rational::zero()
            } else {
                q(rng.random_range(-12..=12), rng.random_range(1..=4))
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn checks_match_brute_force(i in instance()) {
        let ltp = check_ineq_ltp(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        prop_assert_eq!(&ltp.slack, &common::ltp_min_slack(&i.space, &i.subset, &i.eps, i.u, i.v));
        let sym = check_ineq_sym(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        prop_assert_eq!(&sym.slack, &common::sym_min_slack(&i.space, &i.subset, &i.eps, i.u, i.v));
        let both = check_sltp(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        prop_assert_eq!(both.slack, ltp.slack.clone().min(sym.slack.clone()));
        prop_assert_eq!(both.holds, ltp.holds && sym.holds);
        if both.holds {
            prop_assert!(ltp.holds);
        }
    }

    #[test]
    fn required_epsilon_matches_brute_force_and_thresholds(i in instance()) {
        let r = required_epsilon(&i.space, &i.subset, i.u, i.v).unwrap();
        prop_assert_eq!(&r.ltp, &common::ltp_required(&i.space, &i.subset, i.u, i.v));
        prop_assert_eq!(&r.sym, &common::sym_required(&i.space, &i.subset, i.u, i.v));
        let ltp = check_ineq_ltp(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        let sym = check_ineq_sym(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        prop_assert_eq!(ltp.holds, i.eps >= r.ltp);
        prop_assert_eq!(sym.holds, i.eps >= r.sym);
        if r.ltp < Rational::one() {
            prop_assert!(check_ineq_ltp(&i.space, &i.subset, &r.ltp, i.u, i.v).unwrap().holds);
        }
    }

    #[test]
    fn swap_symmetry(i in instance()) {
        let a = check_ineq_ltp(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        let b = check_ineq_ltp(&i.space, &i.subset, &i.eps, i.v, i.u).unwrap();
        prop_assert_eq!(a.holds, b.holds);
        prop_assert_eq!(a.slack, b.slack);
        let a = check_ineq_sym(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        let b = check_ineq_sym(&i.space, &i.subset, &i.eps, i.v, i.u).unwrap();
        prop_assert_eq!(a.holds, b.holds);
        prop_assert_eq!(a.slack, b.slack);
    }

    #[test]
    fn monotone_in_epsilon(i in instance(), bump in 1i64..10) {
        let larger = (&i.eps + q(bump, 40)).min(q(39, 40));
        for f in [check_ineq_ltp, check_ineq_sym, check_sltp] {
            let lo = f(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
            let hi = f(&i.space, &i.subset, &larger, i.u, i.v).unwrap();
            prop_assert!(hi.slack >= lo.slack);
            prop_assert!(!lo.holds || hi.holds);
        }
    }

    #[test]
    fn monotone_in_subset(i in instance(), mask in any::<u32>()) {
        let smaller: Vec<PointId> = i.subset.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p).collect();
        prop_assume!(!smaller.is_empty());
        for f in [check_ineq_ltp, check_ineq_sym, check_sltp] {
            let big = f(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
            let small = f(&i.space, &smaller, &i.eps, i.u, i.v).unwrap();
            prop_assert!(small.slack >= big.slack);
            prop_assert!(!big.holds || small.holds);
        }
    }

    #[test]
    fn scale_invariance(i in instance(), num in 1i64..30, den in 1i64..30) {
        let t = q(num, den);
        let scaled = i.space.scaled(&t);
        for f in [check_ineq_ltp, check_ineq_sym] {
            let a = f(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
            let b = f(&scaled, &i.subset, &i.eps, i.u, i.v).unwrap();
            prop_assert_eq!(a.holds, b.holds);
            prop_assert_eq!(&a.slack * &t, b.slack);
        }
        prop_assert_eq!(
            required_epsilon(&i.space, &i.subset, i.u, i.v).unwrap(),
            required_epsilon(&scaled, &i.subset, i.u, i.v).unwrap()
        );
    }

    #[test]
    fn relabeling_invariance(i in instance(), seed in any::<u64>()) {
        let mut order: Vec<PointId> = i.space.points().collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let relabeled = i.space.reordered(&order);
        let map = |p: PointId| PointId(order.iter().position(|&o| o == p).unwrap());
        let subset: Vec<PointId> = i.subset.iter().map(|&p| map(p)).collect();
        let a = check_sltp(&i.space, &i.subset, &i.eps, i.u, i.v).unwrap();
        let b = check_sltp(&relabeled, &subset, &i.eps, map(i.u), map(i.v)).unwrap();
        prop_assert_eq!(a.holds, b.holds);
        prop_assert_eq!(a.slack, b.slack);
        prop_assert_eq!(validate_metric(&relabeled).ok, validate_metric(&i.space).ok);
    }

    #[test]
    fn degenerate_quadruples_reduce_to_pairs(i in instance()) {
        let t = Rational::one() - &i.eps;
        let two = Rational::from_integer(2);
        for &x in &i.subset {
            for &z in &i.subset {
                let quad = sym_slack(&i.space, &i.eps, i.u, i.v, [x, x, z, z]);
                let pair = ltp_slack(&i.space, &i.eps, i.u, i.v, x, z);
                prop_assert_eq!(&quad, &(&two * &pair + &two * &t * i.space.d(x, z)));
                if x == z {
                    prop_assert_eq!(&quad, &(&two * &pair));
                }
                if !pair.is_negative() {
                    prop_assert!(!quad.is_negative());
                }
            }
        }
    }

    #[test]
    fn lip_norm_matches_pair_enumeration(n in 2usize..=7, seed in any::<u64>(), fseed in any::<u64>()) {
        let space = gen_random_graph_metric(n, seed).unwrap();
        let values = random_values(&space, &mut ChaCha8Rng::seed_from_u64(fseed));
        let f = LipschitzFunction::new(&space, values.clone()).unwrap();
        let oracle = common::lip_constant(&space, &common::all_points(&space), |p| values[p.0].clone());
        let norm = lip_norm(&space, &f);
        prop_assert_eq!(&norm.value, &oracle);
        if let Some((p, r)) = norm.pair {
            prop_assert_eq!((f.value(p) - f.value(r)).abs() / space.d(p, r), oracle);
        }
    }

    #[test]
    fn mcshane_extension_preserves_the_constant(n in 3usize..=8, seed in any::<u64>(), fseed in any::<u64>()) {
        let space = gen_random_graph_metric(n, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(fseed);
        let mut domain: Vec<PointId> = space.points().filter(|&p| p != space.base() && rng.random_bool(0.5)).collect();
        domain.push(space.base());
        domain.sort();
        let raw = random_values(&space, &mut rng);
        let lip = common::lip_constant(&space, &domain, |p| raw[p.0].clone());
        // Normalize to constant exactly 1 on L (or keep the zero function).
        let scale = if lip.is_zero() { Rational::one() } else { Rational::one() / &lip };
        let f: PartialFunction = domain.iter().map(|&p| (p, &raw[p.0] * &scale)).collect();
        let zero: PartialFunction = domain.iter().map(|&p| (p, Rational::zero())).collect();
        let ext = sup_extend(&space, &f, &zero).unwrap();
        for &p in &domain {
            prop_assert_eq!(ext.value(p), f.get(p).unwrap());
        }
        for y in space.points().filter(|y| !domain.contains(y)) {
            let formula = domain.iter().map(|&x| f.get(x).unwrap() - space.d(x, y)).max().unwrap();
            prop_assert_eq!(ext.value(y), &formula);
        }
        let on_l = lip_norm(&space, &f).value;
        let total = lip_norm(&space, &ext).value;
        if domain.len() < space.len() {
            // Off L the extension has slope exactly 1 towards its maximizer.
            prop_assert_eq!(total, Rational::one());
            prop_assert!(on_l <= Rational::one());
            if !lip.is_zero() {
                prop_assert_eq!(on_l, Rational::one());
            }
        } else {
            prop_assert_eq!(total, on_l);
        }
    }

    #[test]
    fn molecule_norm_is_homogeneous_and_dual_attains(n in 2usize..=7, seed in any::<u64>(), mseed in any::<u64>(), t in -6i64..=6) {
        let space = gen_random_graph_metric(n, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(mseed);
        let mut terms: Vec<(PointId, Rational)> = Vec::new();
        for p in space.points() {
            if rng.random_bool(0.6) {
                let sign = if rng.random_bool(0.5) { 1 } else { -1 };
                terms.push((p, q(sign * rng.random_range(1..=9), rng.random_range(1..=3))));
            }
        }
        prop_assume!(!terms.is_empty());
        let mu = Molecule::new(terms).unwrap();
        let result = molecule_norm(&space, &mu).unwrap();
        prop_assert!(is_one_lipschitz(&space, &result.dual));
        prop_assert_eq!(evaluate_pairing(&result.dual, &mu).unwrap(), result.norm.clone());
        let t = q(t, 2);
        let scaled = molecule_norm(&space, &mu.scaled(&t)).unwrap();
        prop_assert_eq!(scaled.norm, t.abs() * &result.norm);
    }

    #[test]
    fn elementary_molecules_have_norm_one(n in 2usize..=8, seed in any::<u64>(), a in 0usize..8, b in 0usize..8) {
        let space = gen_random_graph_metric(n, seed).unwrap();
        let (x, y) = (PointId(a % n), PointId(b % n));
        prop_assume!(x != y);
        prop_assert_eq!(molecule_norm(&space, &pair_molecule(&space, x, y).unwrap()).unwrap().norm, Rational::one());
    }

    #[test]
    fn open_balls_grow_with_radius(n in 2usize..=8, seed in any::<u64>(), c in 0usize..8, r1 in 0i64..40, extra in 0i64..40) {
        let space = gen_random_graph_metric(n, seed).unwrap();
        let centre = PointId(c % n);
        let small = open_ball(&space, centre, &q(r1, 4));
        let large = open_ball(&space, centre, &q(r1 + extra, 4));
        prop_assert!(small.is_subset(&large));
        prop_assert!(open_ball(&space, centre, &Rational::zero()).is_empty());
        prop_assert_eq!(open_ball(&space, centre, &(space.diameter() + Rational::one())).len(), n);
    }

    #[test]
    fn l1_vectors_always_form_a_metric(m in 2usize..=10, dim in 1usize..=5, seed in any::<u64>()) {
        let space = gen_random_l1_vectors(m, dim, seed).unwrap();
        prop_assert!(validate_metric(&space).ok);
    }

    #[test]
    fn certified_tail_split_pairs_are_witnesses(m in 12usize..=16, seed in any::<u64>(), mask in any::<u16>(), e in 1i64..=5) {
        let space = gen_l1_cloud(m, seed).unwrap();
        let subset: Vec<PointId> = space.points().filter(|p| mask >> p.0 & 1 == 1).take(4).collect();
        prop_assume!(!subset.is_empty());
        let eps = q(e, 20);
        let split = l1_tail_split_candidates(&space, &subset, &eps).unwrap();
        for &(u, v) in &split.candidates[..split.certified] {
            prop_assert!(check_sltp(&space, &subset, &eps, u, v).unwrap().holds);
        }
    }
}
