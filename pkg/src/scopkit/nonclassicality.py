"""Bell/CHSH test for classical (Kolmogorovian) representability of 2x2x2x2 correlation data.

Two parties each pick one of two settings and get an outcome in {+1, -1}.
``tables[i, j, a, b]`` is the probability of outcomes ``(a, b)`` (index 0 is
+1, index 1 is -1) when the settings are ``(A_{i+1}, B_{j+1})``.

Feasibility is decided by enumerating basic feasible solutions of the
16-strategy mixing problem: if any mixture reproduces the data, one exists
supported on a linearly independent set of strategy columns (Caratheodory),
and there are only C(16, r) such sets for the rank r of the system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UnnormalizedTableError

OUTCOMES = (1, -1)
# every deterministic local strategy (a1, a2, b1, b2)
STRATEGIES = tuple(itertools.product(OUTCOMES, repeat=4))


@dataclass(frozen=True)
class CorrelationData:
    tables: np.ndarray

    def __post_init__(self):
        t = np.array(self.tables, dtype=float)
        if t.shape != (2, 2, 2, 2):
            raise ValueError(f"expected tables of shape (2, 2, 2, 2), got {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "tables", t)

    def check(self, tol: float = 1e-9) -> None:
        t = self.tables
        if np.any(t < -tol) or np.any(t > 1 + tol):
            raise UnnormalizedTableError("probabilities must lie in [0, 1]")
        for i, j in itertools.product(range(2), repeat=2):
            s = t[i, j].sum()
            if abs(s - 1.0) > tol:
                raise UnnormalizedTableError(f"table (A{i + 1}, B{j + 1}) sums to {s:.12g}")

    def correlators(self) -> np.ndarray:
        """``E[i, j]``: expectation of the outcome product for settings (A_i, B_j)."""
        sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
        return np.einsum("ijab,ab->ij", self.tables, sign)


def strategy_tables(strategy) -> np.ndarray:
    a1, a2, b1, b2 = strategy
    t = np.zeros((2, 2, 2, 2))
    for i, a in enumerate((a1, a2)):
        for j, b in enumerate((b1, b2)):
            t[i, j, OUTCOMES.index(a), OUTCOMES.index(b)] = 1.0
    return t


def mixture(weights) -> CorrelationData:
    w = np.asarray(weights, dtype=float)
    return CorrelationData(np.tensordot(w, _STRATEGY_STACK, axes=1))


_STRATEGY_STACK = np.stack([strategy_tables(s) for s in STRATEGIES])
_A = _STRATEGY_STACK.reshape(16, 16).T  # rows: table cells, columns: strategies


def chsh_value(d: CorrelationData, tol: float = 1e-9) -> float:
    """``S = E11 + E12 + E21 - E22``. ``|S| > 2`` certifies nonclassicality."""
    d.check(tol)
    e = d.correlators()
    return float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])


def chsh_variants(d: CorrelationData) -> list[tuple[tuple[int, int], float]]:
    """The four CHSH expressions keyed by the position of the minus sign.

    Their negatives give the other four facets, so compare ``abs`` against 2.
    """
    e = d.correlators()
    out = []
    for i, j in itertools.product(range(2), repeat=2):
        s = e.sum() - 2 * e[i, j]
        out.append(((i, j), float(s)))
    return out


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    weights: np.ndarray | None = None
    violated: str | None = None
    max_residual: float | None = None

    def __bool__(self):
        return self.feasible


def _no_signalling_violation(t, tol):
    for i in range(2):
        m = t[i, 0].sum(axis=1) - t[i, 1].sum(axis=1)
        if np.abs(m).max() > tol:
            return f"no-signalling: Alice's marginal for A{i + 1} depends on Bob's setting"
    for j in range(2):
        m = t[0, j].sum(axis=0) - t[1, j].sum(axis=0)
        if np.abs(m).max() > tol:
            return f"no-signalling: Bob's marginal for B{j + 1} depends on Alice's setting"
    return None


@lru_cache(maxsize=1)
def _bases():
    """Every linearly independent set of ``rank`` strategy columns, with pseudo-inverses."""
    r = np.linalg.matrix_rank(_A)
    combos = np.array(list(itertools.combinations(range(16), r)))
    sub = _A[:, combos].transpose(1, 0, 2)  # (n_combo, 16, r)
    pinv = np.linalg.pinv(sub)
    independent = np.abs(pinv @ sub - np.eye(r)).max(axis=(1, 2)) < 1e-9
    return combos[independent], sub[independent], pinv[independent]


def kolmogorov_feasible(d: CorrelationData, tol: float = 1e-9) -> FeasibilityResult:
    """Decide whether a mixture of the 16 deterministic strategies reproduces ``d``.

    Returns the mixing weights when feasible, otherwise the name of a violated
    constraint (no-signalling, or the CHSH facet with the largest violation).
    """
    d.check(tol)
    b = d.tables.reshape(16)
    A = _A
    combos, sub, pinv = _bases()
    w = pinv @ b
    resid = np.abs(np.einsum("kij,kj->ki", sub, w) - b).max(axis=1)
    ok = (resid <= tol) & (w.min(axis=1) >= -tol)
    hits = np.flatnonzero(ok)
    if hits.size:
        best = hits[np.argmin(resid[hits])]
        weights = np.zeros(16)
        weights[combos[best]] = np.clip(w[best], 0.0, None)
        weights /= weights.sum()
        res = float(np.abs(A @ weights - b).max())
        return FeasibilityResult(True, weights, None, res)
    why = _no_signalling_violation(d.tables, tol)
    if why is None:
        (i, j), s = max(chsh_variants(d), key=lambda kv: abs(kv[1]))
        if abs(s) > 2 + tol:
            why = f"CHSH facet with minus on E{i + 1}{j + 1}: |S| = {abs(s):.9f} > 2"
        else:
            why = "no basic feasible mixture reproduces the tables"
    return FeasibilityResult(False, None, why, None)
