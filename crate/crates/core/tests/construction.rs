//! End-to-end witness constructions re-verified by independent enumeration.

mod common;

use sltp_core::construction::{build_symmetric_witnesses, ConstructionOutcome};
use sltp_core::families::{gen_ex1, gen_l1_basis};
use sltp_core::freespace::{pair_molecule, sup_extend, Molecule, PartialFunction, WeakStarSlice};
use sltp_core::metric::PointedMetricSpace;
use sltp_core::rational::{q, Rational};
use sltp_core::trapezoid::{counterexample_scan, Mode, Verdict};

fn pair_slice(space: &PointedMetricSpace, x: &str, y: &str, alpha: Rational) -> WeakStarSlice {
    let mu = pair_molecule(space, space.id(x).unwrap(), space.id(y).unwrap()).unwrap();
    WeakStarSlice::new(space, mu, alpha).unwrap()
}

#[test]
fn basis_instance_meets_every_contract() {
    let space = gen_l1_basis(8).unwrap();
    let slices = vec![
        pair_slice(&space, "0", "e1", q(1, 2)),
        pair_slice(&space, "e1", "e2", q(1, 2)),
    ];
    let outcome = build_symmetric_witnesses(&space, &slices, &q(1, 10)).unwrap();
    let report = outcome.report().expect("a witness exists");
    assert_eq!(
        common::construction_violations(&space, &slices, report),
        Vec::<String>::new()
    );
    assert!(report.norm_g >= q(81, 100));
}

#[test]
fn single_slice_with_two_point_subset() {
    let space = gen_l1_basis(4).unwrap();
    let slices = vec![pair_slice(&space, "e1", "0", q(1, 3))];
    let outcome = build_symmetric_witnesses(&space, &slices, &q(1, 5)).unwrap();
    let report = outcome.report().expect("a witness exists");
    assert_eq!(report.subset.len(), 2);
    assert_eq!(
        common::construction_violations(&space, &slices, report),
        Vec::<String>::new()
    );
}

#[test]
fn first_example_has_no_witness_below_its_threshold() {
    let space = gen_ex1(3).unwrap();
    let n = space.ids(&["a1", "a2", "b1", "b2"]).unwrap();
    let scan = counterexample_scan(&space, &n, &Rational::zero(), Mode::Sltp).unwrap();
    let Verdict::AllPairsFail {
        min_required_epsilon, ..
    } = scan.verdict
    else {
        panic!("expected failure")
    };
    assert_eq!(min_required_epsilon, q(1, 3));
    let mu = Molecule::from_named(&space, &[("a2", q(1, 1)), ("b1", q(-1, 1)), ("b2", q(1, 2))]).unwrap();
    let slices = vec![
        WeakStarSlice::new(&space, mu, q(1, 2)).unwrap(),
        pair_slice(&space, "a2", "b2", q(1, 2)),
    ];
    for eps in [q(1, 10), q(1, 4), q(33, 100)] {
        let outcome = build_symmetric_witnesses(&space, &slices, &eps).unwrap();
        assert!(
            matches!(outcome, ConstructionOutcome::WitnessUnavailable { .. }),
            "eps {eps}"
        );
    }
}

#[test]
fn extension_on_first_example_matches_direct_maximum() {
    // L = {a1, a2, b1, b2}; the extension at u1 and v1 is a maximum over four terms.
    let space = gen_ex1(1).unwrap();
    let l = space.ids(&["a1", "a2", "b1", "b2"]).unwrap();
    let values = [q(0, 1), q(1, 4), q(-1, 4), q(1, 4)];
    let weights = [q(0, 1), q(1, 4), q(0, 1), q(-1, 4)];
    let f: PartialFunction = l.iter().copied().zip(values.iter().cloned()).collect();
    let w: PartialFunction = l.iter().copied().zip(weights.iter().cloned()).collect();
    let ext = sup_extend(&space, &f, &w).unwrap();
    for name in ["u1", "v1"] {
        let y = space.id(name).unwrap();
        let by_hand = (0..4)
            .map(|i| &values[i] + weights[i].abs() - space.d(l[i], y))
            .max()
            .unwrap();
        assert_eq!(*ext.value(y), by_hand, "{name}");
    }
    // u1 is one step from the a's, v1 one step from the b's.
    assert_eq!(*ext.value(space.id("u1").unwrap()), q(-1, 2));
    assert_eq!(*ext.value(space.id("v1").unwrap()), q(-1, 2));
}

#[test]
fn randomized_constructions_verify_independently() {
    let mut built = 0;
    for seed in 0..60 {
        let (space, slices, eps) = common::random_construction_trial(seed);
        match build_symmetric_witnesses(&space, &slices, &eps).unwrap() {
            ConstructionOutcome::Built(report) => {
                built += 1;
                let bad = common::construction_violations(&space, &slices, &report);
                assert!(bad.is_empty(), "seed {seed}: {bad:?}");
            }
            ConstructionOutcome::WitnessUnavailable { .. } => {}
        }
    }
    assert!(built >= 50, "only {built} trials found a witness");
}
