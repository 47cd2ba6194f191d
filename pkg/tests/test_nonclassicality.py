import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scopkit import hilbert, nonclassicality as nc
from scopkit.errors import UnnormalizedTableError


def test_sixteen_strategies_are_local_and_bounded():
    assert len(nc.STRATEGIES) == 16
    for s in nc.STRATEGIES:
        d = nc.CorrelationData(nc.strategy_tables(s))
        a1, a2, b1, b2 = s
        assert nc.chsh_value(d) == a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2
        assert all(abs(v) <= 2 for _, v in nc.chsh_variants(d))
        res = nc.kolmogorov_feasible(d)
        assert res.feasible and res.weights[nc.STRATEGIES.index(s)] == pytest.approx(1.0)


def test_singlet_is_infeasible_and_names_the_facet():
    d = hilbert.chsh_quantum_oracle()
    assert nc.chsh_value(d) == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    res = nc.kolmogorov_feasible(d)
    assert not res.feasible
    assert "CHSH" in res.violated and "E22" in res.violated


@given(st.floats(0.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_werner_threshold(v):
    # mixing the singlet with white noise: S = 2 sqrt(2) v
    q = hilbert.chsh_quantum_oracle().tables
    d = nc.CorrelationData(v * q + (1 - v) * 0.25)
    s = nc.chsh_value(d)
    assert s == pytest.approx(2 * math.sqrt(2) * v, abs=1e-12)
    if s > 2 + 1e-6:
        assert not nc.kolmogorov_feasible(d).feasible
    if s < 2 - 1e-6:
        assert nc.kolmogorov_feasible(d).feasible


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_random_mixture_round_trip(seed):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.full(16, 0.5))
    d = nc.mixture(w)
    res = nc.kolmogorov_feasible(d)
    assert res.feasible
    assert res.weights.min() >= 0 and res.weights.sum() == pytest.approx(1.0)
    assert np.abs(nc.mixture(res.weights).tables - d.tables).max() <= 1e-9
    assert res.max_residual <= 1e-9


def test_signalling_data_is_infeasible():
    t = np.full((2, 2, 2, 2), 0.25)
    t[0, 0] = [[0.5, 0.5], [0.0, 0.0]]  # Alice's A1 marginal differs between B1 and B2
    res = nc.kolmogorov_feasible(nc.CorrelationData(t))
    assert not res.feasible and res.violated.startswith("no-signalling")


def test_unnormalized_tables_rejected():
    t = np.full((2, 2, 2, 2), 0.25)
    t[1, 1, 0, 0] = 0.35
    with pytest.raises(UnnormalizedTableError):
        nc.chsh_value(nc.CorrelationData(t))
    with pytest.raises(ValueError):
        nc.CorrelationData(np.zeros((2, 2, 4)))


def test_variants_relate_by_relabelling():
    d = hilbert.chsh_quantum_oracle()
    vals = dict(nc.chsh_variants(d))
    assert vals[(1, 1)] == pytest.approx(nc.chsh_value(d))
    assert max(abs(v) for v in vals.values()) == pytest.approx(2 * math.sqrt(2))
