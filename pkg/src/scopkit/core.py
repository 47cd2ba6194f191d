"""State-context-property systems: registries, transition kernel, weights, collapse.

Tabular systems (:class:`ScopSystem`) and the quantum realization in
:mod:`scopkit.hilbert` both satisfy :class:`ScopRealization`, so the
collapse machinery and the distance measures run unchanged on either.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import EmptyRestrictionError, UnknownCoupleError, UnknownElementError, UnknownEntryError
from .lattice import PropertyLattice
from .report import ValidationReport

EPS_NORM = 1e-9  # constructed data
EPS_FILE = 1e-6  # hand-authored files

Couple = tuple[str, str]
Distribution = list[tuple[Couple, float]]


class CoupleClass(enum.Enum):
    POTENTIALITY = "Potentiality"
    DETERMINISTIC = "Deterministic"
    EIGEN = "Eigen"

    def __str__(self):
        return self.value


@runtime_checkable
class ScopRealization(Protocol):
    """Behaviour shared by tabular and quantum SCOP systems."""

    tolerance: float

    def state_ids(self) -> tuple[str, ...]: ...

    def context_ids(self) -> tuple[str, ...]: ...

    def transition_distribution(self, e: str, p: str) -> Distribution: ...

    def reduced_probability(self, q: str, e: str, p: str) -> float: ...

    def weight(self, p: str, e: str, a: str) -> float: ...


def _freeze(d):
    return MappingProxyType(dict(d))


@dataclass(frozen=True)
class ScopSystem:
    """The quintuple (states, contexts, lattice, kernel, weights).

    ``kernel`` maps a couple ``(e, p)`` to its outcome row, a tuple of
    ``((f, q), prob)`` sorted by ``(f, q)``. ``weights`` maps ``(p, e, a)`` to
    the applicability of property ``a``. Rows missing from the kernel are
    undefined, never an implicit identity. Use :meth:`build` to construct from
    flat records.
    """

    states: Mapping[str, str]
    contexts: Mapping[str, str]
    lattice: PropertyLattice | None
    kernel: Mapping[Couple, tuple[tuple[Couple, float], ...]]
    weights: Mapping[tuple[str, str, str], float] = field(default_factory=dict)
    tolerance: float = EPS_NORM

    def __post_init__(self):
        object.__setattr__(self, "states", _freeze(self.states))
        object.__setattr__(self, "contexts", _freeze(self.contexts))
        kernel = {k: tuple(sorted((tuple(fq), float(pr)) for fq, pr in row)) for k, row in self.kernel.items()}
        object.__setattr__(self, "kernel", _freeze(kernel))
        object.__setattr__(self, "weights", _freeze({k: float(v) for k, v in self.weights.items()}))

    @classmethod
    def build(
        cls,
        states: Iterable[str] | Mapping[str, str],
        contexts: Iterable[str] | Mapping[str, str],
        lattice: PropertyLattice | None = None,
        kernel: Iterable[tuple[str, str, str, str, float]] = (),
        weights: Iterable[tuple[str, str, str, float]] = (),
        tolerance: float = EPS_NORM,
    ) -> "ScopSystem":
        """Assemble a system from ``(e, p, f, q, prob)`` and ``(p, e, a, w)`` records."""
        st = dict(states) if isinstance(states, Mapping) else {s: s for s in states}
        cx = dict(contexts) if isinstance(contexts, Mapping) else {c: c for c in contexts}
        rows: dict[Couple, dict[Couple, float]] = defaultdict(dict)
        for e, p, f, q, prob in kernel:
            if (f, q) in rows[(e, p)]:
                raise ValueError(f"duplicate kernel entry ({e}, {p}) -> ({f}, {q})")
            rows[(e, p)][(f, q)] = float(prob)
        wt: dict[tuple[str, str, str], float] = {}
        for p, e, a, w in weights:
            if (p, e, a) in wt:
                raise ValueError(f"duplicate weight entry ({p}, {e}, {a})")
            wt[(p, e, a)] = float(w)
        return cls(st, cx, lattice, {k: tuple(v.items()) for k, v in rows.items()}, wt, tolerance)

    def state_ids(self) -> tuple[str, ...]:
        return tuple(self.states)

    def context_ids(self) -> tuple[str, ...]:
        return tuple(self.contexts)

    def couples(self) -> list[Couple]:
        return sorted(self.kernel)

    def transition_distribution(self, e: str, p: str) -> Distribution:
        try:
            return list(self.kernel[(e, p)])
        except KeyError:
            raise UnknownCoupleError(f"no kernel row for couple ({e}, {p})") from None

    def reduced_probability(self, q: str, e: str, p: str) -> float:
        return sum(prob for (_, qq), prob in self.transition_distribution(e, p) if qq == q)

    def weight(self, p: str, e: str, a: str) -> float:
        try:
            return self.weights[(p, e, a)]
        except KeyError:
            raise UnknownEntryError(f"no weight for property {a} in state {p} under context {e}") from None

    def validate(self, tolerance: float | None = None) -> ValidationReport:
        return validate_scop(self, tolerance)


def validate_scop(s: ScopSystem, tolerance: float | None = None) -> ValidationReport:
    """Report kernel normalization, negativity, weight-complement and reference violations."""
    tol = s.tolerance if tolerance is None else tolerance
    rep = ValidationReport("scop")
    lat = s.lattice
    for (e, p), row in sorted(s.kernel.items()):
        for name, kind in ((e, "context"), (p, "state")):
            if name not in (s.contexts if kind == "context" else s.states):
                rep.add("dangling", f"kernel row ({e}, {p}) references unknown {kind} {name}", e, p)
        total = 0.0
        for (f, q), prob in row:
            if f not in s.contexts:
                rep.add("dangling", f"kernel entry ({e}, {p}) -> ({f}, {q}) references unknown context {f}", e, p, f, q)
            if q not in s.states:
                rep.add("dangling", f"kernel entry ({e}, {p}) -> ({f}, {q}) references unknown state {q}", e, p, f, q)
            if prob < 0:
                rep.add("kernel-negative", f"kernel entry ({e}, {p}) -> ({f}, {q}) is negative ({prob:.12g})", e, p, f, q)
            elif prob > 1 + tol:
                rep.add("kernel-range", f"kernel entry ({e}, {p}) -> ({f}, {q}) exceeds 1 ({prob:.12g})", e, p, f, q)
            total += prob
        if abs(total - 1.0) > tol:
            rep.add("kernel-row-sum", f"kernel row ({e}, {p}) sums to {total:.12g}", e, p)

    for (p, e, a), w in sorted(s.weights.items()):
        if p not in s.states:
            rep.add("dangling", f"weight ({p}, {e}, {a}) references unknown state {p}", p, e, a)
        if e not in s.contexts:
            rep.add("dangling", f"weight ({p}, {e}, {a}) references unknown context {e}", p, e, a)
        if lat is None or a not in lat:
            rep.add("dangling", f"weight ({p}, {e}, {a}) references unknown property {a}", p, e, a)
        if not -tol <= w <= 1 + tol:
            rep.add("weight-range", f"weight ({p}, {e}, {a}) = {w:.12g} outside [0, 1]", p, e, a)

    if lat is not None:
        comp = lat.complement_map
        for (p, e, a), w in sorted(s.weights.items()):
            ac = comp.get(a)
            if ac is None or ac < a:
                continue  # each complement pair checked once
            wc = s.weights.get((p, e, ac))
            if wc is None:
                continue
            total = w + wc if ac != a else 2 * w
            if abs(total - 1.0) > tol:
                rep.add(
                    "weight-complement",
                    f"complement weights of {a} and {ac} for ({p}, {e}) sum to {total:.12g}",
                    p,
                    e,
                    a,
                    ac,
                )
    return rep


def transition_distribution(s: ScopRealization, e: str, p: str) -> Distribution:
    return s.transition_distribution(e, p)


def reduced_probability(s: ScopRealization, q: str, e: str, p: str) -> float:
    """Probability that ``p`` changes to ``q`` under ``e``, summed over outgoing contexts."""
    return s.reduced_probability(q, e, p)


def weight(s: ScopRealization, p: str, e: str, a: str) -> float:
    return s.weight(p, e, a)


def classify_couple(s: ScopRealization, e: str, p: str, tolerance: float | None = None) -> CoupleClass:
    tol = s.tolerance if tolerance is None else tolerance
    for (f, q), prob in s.transition_distribution(e, p):
        if prob >= 1.0 - tol:
            return CoupleClass.EIGEN if q == p else CoupleClass.DETERMINISTIC
    return CoupleClass.POTENTIALITY


def make_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _draw(dist: Distribution, rng: np.random.Generator) -> Couple:
    # inverse CDF over the canonical (f, q) order
    cdf = np.cumsum([prob for _, prob in dist])
    u = rng.random() * cdf[-1]
    i = int(np.searchsorted(cdf, u, side="right"))
    if i >= len(dist):
        i = int(np.flatnonzero(np.diff(np.concatenate(([0.0], cdf))) > 0)[-1])
    return dist[i][0]


def sample_collapse(s: ScopRealization, e: str, p: str, rng) -> Couple:
    """Draw one collapsed couple ``(f, q)`` from the transition distribution of ``(e, p)``."""
    return _draw(s.transition_distribution(e, p), make_rng(rng))


@dataclass(frozen=True)
class Trajectory:
    couples: tuple[Couple, ...]
    truncated_at: int | None = None

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None

    def __len__(self):
        return len(self.couples)

    def __iter__(self):
        return iter(self.couples)


def collapse_sequence(s: ScopRealization, e0: str, p0: str, steps: int, rng) -> Trajectory:
    """Iterate collapse, feeding each outcome couple back in as the next input.

    The trajectory starts with ``(e0, p0)``. When a step lands on a fixed
    point (the current couple collapses to itself with certainty) the run is
    cut short and ``truncated_at`` records that step.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = make_rng(rng)
    current = (e0, p0)
    out = [current]
    for k in range(1, steps + 1):
        try:
            dist = s.transition_distribution(*current)
        except UnknownCoupleError as exc:
            raise UnknownCoupleError(f"step {k}: {exc}") from None
        nxt = _draw(dist, rng)
        out.append(nxt)
        if nxt == current and any(fq == current and prob >= 1.0 - s.tolerance for fq, prob in dist):
            return Trajectory(tuple(out), k)
        current = nxt
    return Trajectory(tuple(out))


def relativize(s: ScopSystem, a: str, threshold: float = 1.0) -> ScopSystem:
    """Condition ``s`` on property ``a`` being actual.

    A state survives when every recorded weight of ``a`` (over all contexts)
    is at least ``threshold``; states with no recorded weight for ``a``
    survive only if ``a`` is the lattice top, which is always actual. Kernel
    rows keep only surviving targets and are renormalized; rows left with no
    mass are dropped.
    """
    if s.lattice is None or a not in s.lattice:
        raise UnknownElementError(f"unknown property {a!r}")
    by_state: dict[str, list[float]] = defaultdict(list)
    for (p, _e, aa), w in s.weights.items():
        if aa == a:
            by_state[p].append(w)
    keep = []
    for p in s.states:
        ws = by_state.get(p)
        if ws:
            if all(w >= threshold - s.tolerance for w in ws):
                keep.append(p)
        elif a == s.lattice.top:
            keep.append(p)
    if not keep:
        raise EmptyRestrictionError(f"no state has property {a} actual at threshold {threshold}")
    alive = set(keep)
    kernel = {}
    for (e, p), row in s.kernel.items():
        if p not in alive:
            continue
        kept = [(fq, prob) for fq, prob in row if fq[1] in alive]
        total = sum(prob for _, prob in kept)
        if total <= 0:
            continue
        kernel[(e, p)] = tuple((fq, prob / total) for fq, prob in kept)
    weights = {k: w for k, w in s.weights.items() if k[0] in alive}
    states = {p: s.states[p] for p in keep}
    return ScopSystem(states, dict(s.contexts), s.lattice, kernel, weights, s.tolerance)
