import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scopkit import core
from scopkit.core import CoupleClass, ScopRealization, ScopSystem, collapse_sequence, relativize, validate_scop
from scopkit.errors import EmptyRestrictionError, UnknownCoupleError, UnknownElementError, UnknownEntryError
from scopkit.lattice import powerset_lattice


def test_example_validates_and_is_a_realization(example):
    assert example.validate(tolerance=1e-9).ok
    assert isinstance(example, ScopRealization)


def test_reduced_probability_sums_over_contexts():
    s = ScopSystem.build(["p", "q"], ["e", "f"], kernel=[("e", "p", "e", "q", 0.3), ("e", "p", "f", "q", 0.5), ("e", "p", "e", "p", 0.2)])
    assert core.reduced_probability(s, "q", "e", "p") == pytest.approx(0.8)
    assert core.reduced_probability(s, "p", "e", "p") == pytest.approx(0.2)
    assert s.validate().ok


def test_rows_are_sorted_and_frozen(example):
    row = example.transition_distribution("e", "p")
    assert [fq for fq, _ in row] == sorted(fq for fq, _ in row)
    with pytest.raises(TypeError):
        example.kernel[("x", "y")] = ()


def test_classification(example):
    assert core.classify_couple(example, "e", "p") is CoupleClass.POTENTIALITY
    assert core.classify_couple(example, "e", "q") is CoupleClass.EIGEN
    assert core.classify_couple(example, "f", "r") is CoupleClass.DETERMINISTIC
    assert str(CoupleClass.EIGEN) == "Eigen"


def test_unknown_lookups(example):
    with pytest.raises(UnknownCoupleError):
        example.transition_distribution("g", "r")
    with pytest.raises(UnknownEntryError):
        example.weight("p", "g", "swims")


def test_validation_names_violations():
    s = ScopSystem.build(
        ["p"],
        ["e"],
        powerset_lattice(["a"]),
        kernel=[("e", "p", "e", "p", 0.9), ("e", "p", "e", "zz", -0.1)],
        weights=[("p", "e", "{a}", 0.7), ("p", "e", "{}", 0.7), ("p", "e", "nope", 0.5), ("p", "x", "{a}", 1.2)],
    )
    rep = validate_scop(s)
    checks = rep.checks()
    for c in ("dangling", "kernel-negative", "kernel-row-sum", "weight-range", "weight-complement"):
        assert c in checks, c


def test_duplicate_records_rejected():
    with pytest.raises(ValueError):
        ScopSystem.build(["p"], ["e"], kernel=[("e", "p", "e", "p", 0.5), ("e", "p", "e", "p", 0.5)])
    with pytest.raises(ValueError):
        ScopSystem.build(["p"], ["e"], weights=[("p", "e", "a", 0.5), ("p", "e", "a", 0.5)])


def test_sampling_is_seeded(example):
    a = [core.sample_collapse(example, "k", "p", core.make_rng(5)) for _ in range(3)]
    rng = np.random.default_rng(5)
    b = core.sample_collapse(example, "k", "p", rng)
    assert a[0] == b and len(set(a)) == 1


def test_sampling_never_returns_zero_probability_outcome():
    s = ScopSystem.build(["p", "q", "r"], ["e"], kernel=[("e", "p", "e", "q", 0.0), ("e", "p", "e", "r", 1.0)])
    rng = np.random.default_rng(0)
    assert {core.sample_collapse(s, "e", "p", rng) for _ in range(200)} == {("e", "r")}


def test_eigen_trajectory_is_constant(example):
    t = collapse_sequence(example, "g", "q", 10, 1)
    assert t.couples == (("g", "q"), ("g", "q"))
    assert t.truncated and t.truncated_at == 1


def test_deterministic_trajectory(example):
    t = collapse_sequence(example, "f", "r", 5, 0)
    assert t.couples[:3] == (("f", "r"), ("f", "t"), ("f", "t"))
    assert t.truncated_at == 2


def test_zero_steps(example):
    t = collapse_sequence(example, "e", "p", 0, None)
    assert t.couples == (("e", "p"),) and not t.truncated


def test_dangling_step_reports_step():
    s = ScopSystem.build(["p", "q"], ["e"], kernel=[("e", "p", "e", "q", 1.0)])
    with pytest.raises(UnknownCoupleError, match="step 2"):
        collapse_sequence(s, "e", "p", 3, 0)


def test_relativize_keeps_states_where_property_is_actual(example):
    r = relativize(example, "swims")
    assert set(r.states) == {"q", "t"}
    assert r.validate().ok
    assert set(r.kernel) == {("f", "q"), ("f", "t"), ("e", "q"), ("e", "t"), ("g", "q"), ("g", "t"), ("k", "q")}


def test_relativize_renormalizes_rows():
    s = ScopSystem.build(
        ["p", "q", "r"],
        ["e"],
        powerset_lattice(["a"]),
        kernel=[("e", "p", "e", "q", 0.25), ("e", "p", "e", "r", 0.5), ("e", "p", "e", "p", 0.25)],
        weights=[("p", "e", "{a}", 1.0), ("q", "e", "{a}", 1.0), ("r", "e", "{a}", 0.2)],
    )
    r = relativize(s, "{a}")
    assert dict(r.transition_distribution("e", "p")) == pytest.approx({("e", "p"): 0.5, ("e", "q"): 0.5})
    assert relativize(s, "{a}", threshold=0.1).states.keys() == {"p", "q", "r"}
    assert relativize(s, "{a}").validate().ok


def test_relativize_errors(example):
    with pytest.raises(EmptyRestrictionError):
        relativize(example, "0")
    with pytest.raises(UnknownElementError):
        relativize(example, "wings")


def test_relativize_top_keeps_everything(example):
    r = relativize(example, "I")
    assert set(r.states) == set(example.states)


@st.composite
def kernels(draw):
    n = draw(st.integers(1, 6))
    w = draw(st.lists(st.floats(0.01, 10), min_size=n, max_size=n))
    total = sum(w)
    return [("e", "p", "e", f"q{i}", x / total) for i, x in enumerate(w)]


@given(kernels(), st.integers(0, 2**31))
@settings(max_examples=50, deadline=None)
def test_samples_lie_in_support(rows, seed):
    s = ScopSystem.build(["p"] + [r[3] for r in rows], ["e"], kernel=rows)
    assert s.validate().ok
    rng = np.random.default_rng(seed)
    support = {(r[2], r[3]) for r in rows if r[4] > 0}
    for _ in range(20):
        assert core.sample_collapse(s, "e", "p", rng) in support
