"""Smoke test for the compiled ``sltp`` extension module.

Build and install first, e.g. ``maturin build -m crates/python/Cargo.toml``
followed by ``pip install`` of the wheel. Runs under pytest or directly.
"""

from fractions import Fraction

import pytest

import sltp


def test_first_example_fails_with_threshold_one_third():
    space = sltp.MetricSpace.example("ex1", k=5)
    report = sltp.scan(space, ["a1", "a2", "b1", "b2"], 0)
    assert report["verdict"]["kind"] == "all_pairs_fail"
    assert Fraction(report["verdict"]["min_required_epsilon"]) == Fraction(1, 3)


def test_fresh_pair_satisfies_two_point_inequality():
    space = sltp.MetricSpace.example("ex1", k=2)
    result = sltp.check(space, ["a1", "b2", "u1"], Fraction(0), "u2", "v2", mode="ltp")
    assert result["holds"]
    other = sltp.MetricSpace.example("ex2", k=1)
    ltp, _ = sltp.required_epsilon(other, ["a", "b"], "u1", "v1")
    assert Fraction(ltp) == Fraction(1, 3)


def test_matrix_space_and_validation():
    space = sltp.MetricSpace(["o", "p", "r"], "o", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert len(space) == 3 and space.base == "o"
    assert space.distance("o", "r") == "5"
    assert not space.validate()["ok"]
    good = sltp.MetricSpace(["o", "p"], "o", [["0", "1/2"], ["1/2", "0"]])
    assert good.validate()["ok"]
    assert sltp.MetricSpace.from_json(good.to_json()).distance("o", "p") == "1/2"


def test_molecule_norm_and_witness():
    space = sltp.MetricSpace.example("ex1", k=1)
    assert Fraction(sltp.molecule_norm(space, [("a2", 2), ("b2", -1)])["norm"]) == 3
    basis = sltp.MetricSpace.example("l1-basis", m=8)
    assert sltp.find_witness(basis, ["0", "e1", "e2"], "1/10") is not None


def test_construction_on_basis():
    space = sltp.MetricSpace.example("l1-basis", m=8)
    slices = [([("0", 1), ("e1", -1)], "1/2"), ([("e1", 1), ("e2", -1)], "1/2")]
    report = sltp.construct(space, slices, Fraction(1, 10))
    assert report["outcome"] == "built"
    built = report["built"]
    assert built["passed"]
    assert Fraction(built["norm_g"]) >= Fraction(81, 100)


def test_bad_input_raises_value_error():
    space = sltp.MetricSpace.example("ex2", k=1)
    with pytest.raises(ValueError):
        sltp.check(space, ["zz"], 0, "u1", "v1")
    with pytest.raises(ValueError):
        sltp.scan(space, ["a"], "1")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
