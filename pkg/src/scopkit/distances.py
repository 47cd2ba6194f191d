"""Conceptual distance measures.

Representational baselines (prototype and exemplar distances) work on
feature-applicability profiles. The contextual measures come in two kinds:
``d_mu``/``theta_mu`` read the transition probability of a SCOP realization,
``d_p``/``d_w`` compare per-feature profiles of collapse frequencies or
weights, rescaled so the maximal distance is sqrt(2).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .core import ScopRealization, ScopSystem
from .errors import EmptyExemplarSetError, FeatureMismatchError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FeatureProfile:
    """Values in [0, 1] over an ordered feature list."""

    features: tuple[str, ...]
    values: tuple[float, ...]

    def __init__(self, features: Sequence[str], values: Sequence[float]):
        features = tuple(features)
        values = tuple(float(v) for v in values)
        if len(features) != len(values):
            raise FeatureMismatchError(f"{len(features)} features but {len(values)} values")
        if len(set(features)) != len(features):
            raise FeatureMismatchError("duplicate feature in profile")
        for f, v in zip(features, values):
            if not 0.0 <= v <= 1.0 or math.isnan(v):
                raise ValueError(f"value {v} for feature {f} outside [0, 1]")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, m: Mapping[str, float]) -> "FeatureProfile":
        return cls(list(m), list(m.values()))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.features, self.values))

    def array(self) -> np.ndarray:
        return np.array(self.values)

    def __len__(self):
        return len(self.features)


@dataclass(frozen=True)
class ExemplarSet:
    exemplars: tuple[tuple[str, FeatureProfile], ...]

    def __init__(self, exemplars: Iterable[tuple[str, FeatureProfile]]):
        ex = tuple(exemplars)
        if ex:
            feats = ex[0][1].features
            for label, prof in ex:
                if prof.features != feats:
                    raise FeatureMismatchError(f"exemplar {label} uses a different feature list")
        object.__setattr__(self, "exemplars", ex)

    def __len__(self):
        return len(self.exemplars)


def _aligned(a: FeatureProfile, b: FeatureProfile) -> tuple[np.ndarray, np.ndarray]:
    if a.features != b.features:
        raise FeatureMismatchError("profiles do not share the same feature list")
    return a.array(), b.array()


def merge_profiles(a: FeatureProfile, b: FeatureProfile) -> tuple[FeatureProfile, FeatureProfile]:
    """Put two profiles on the union of their features, sorted by id, absent features at 0."""
    feats = sorted(set(a.features) | set(b.features))
    da, db = a.as_dict(), b.as_dict()
    return (
        FeatureProfile(feats, [da.get(f, 0.0) for f in feats]),
        FeatureProfile(feats, [db.get(f, 0.0) for f in feats]),
    )


def prototype_distance(stimulus: FeatureProfile, prototype: FeatureProfile) -> float:
    """Euclidean distance between stimulus and prototype applicabilities."""
    x, y = _aligned(stimulus, prototype)
    return float(np.sqrt(np.sum((x - y) ** 2)))


def exemplar_distance(stimulus: FeatureProfile, exemplars: ExemplarSet) -> float:
    """Sum (not minimum) of Euclidean distances to every stored exemplar."""
    if len(exemplars) == 0:
        raise EmptyExemplarSetError("exemplar set is empty")
    return float(sum(prototype_distance(stimulus, prof) for _, prof in exemplars.exemplars))


def distance_from_probability(mu: float) -> float:
    """``sqrt(2 (1 - sqrt(mu)))``: sqrt(2) at mu = 0, 0 at mu = 1."""
    if not 0.0 <= mu <= 1.0 + 1e-12:
        raise ValueError(f"probability {mu} outside [0, 1]")
    return math.sqrt(2.0 * max(1.0 - math.sqrt(min(mu, 1.0)), 0.0))


def angle_from_probability(mu: float) -> float:
    """``arccos(mu)``. Note this is arccos of the probability itself, not of its root."""
    if not 0.0 <= mu <= 1.0 + 1e-12:
        raise ValueError(f"probability {mu} outside [0, 1]")
    return math.acos(min(mu, 1.0))


def d_mu(s: ScopRealization, q: str, e: str, p: str) -> float:
    """Probability distance from ``p`` to ``q`` under ``e``. Not symmetric in ``p``, ``q``."""
    return distance_from_probability(s.reduced_probability(q, e, p))


def theta_mu(s: ScopRealization, q: str, e: str, p: str) -> float:
    return angle_from_probability(s.reduced_probability(q, e, p))


def _scaled_distance(a: FeatureProfile, b: FeatureProfile, normalized: bool) -> float:
    x, y = _aligned(a, b)
    if x.size == 0:
        raise FeatureMismatchError("profiles have no features")
    raw = float(np.sqrt(np.sum((x - y) ** 2)))
    return SQRT2 / math.sqrt(x.size) * raw if normalized else raw


def d_p(freqs_p: FeatureProfile, freqs_q: FeatureProfile, normalized: bool = True) -> float:
    """Distance between collapse-frequency profiles over a merged feature list."""
    return _scaled_distance(freqs_p, freqs_q, normalized)


def d_w(weights_p: FeatureProfile, weights_q: FeatureProfile, normalized: bool = True) -> float:
    """Distance between weight profiles; ``normalized=False`` drops the sqrt(2)/sqrt(M) factor."""
    return _scaled_distance(weights_p, weights_q, normalized)


@dataclass(frozen=True)
class ComparisonReport:
    features: tuple[str, ...]
    differences: tuple[float, ...]
    max_abs_difference: float
    tolerance: float
    identity_holds: bool


def weight_frequency_comparison(
    freqs: FeatureProfile, weights: FeatureProfile, tolerance: float = 1e-10
) -> ComparisonReport:
    """Compare collapse frequencies with rated weights feature by feature.

    In the pure quantum case the two coincide; ``identity_holds`` says whether
    they agree within ``tolerance``.
    """
    x, y = _aligned(freqs, weights)
    diff = x - y
    worst = float(np.abs(diff).max()) if diff.size else 0.0
    return ComparisonReport(freqs.features, tuple(float(v) for v in diff), worst, tolerance, worst <= tolerance)


def profile_from_weights(s: ScopSystem, p: str, e: str, features: Sequence[str] | None = None) -> FeatureProfile:
    """Weight profile of state ``p`` under context ``e`` read off a weight table.

    Without ``features`` every property with a recorded weight is used, in
    sorted order; with ``features``, missing entries count as 0.
    """
    recorded = {a: w for (pp, ee, a), w in s.weights.items() if pp == p and ee == e}
    if features is None:
        features = sorted(recorded)
    return FeatureProfile(features, [recorded.get(a, 0.0) for a in features])


def frequency_profile(s: ScopRealization, e: str, p: str) -> FeatureProfile:
    """Collapse-frequency profile of ``(e, p)``: ``mu(q, e, p)`` for every reachable ``q``, sorted by id."""
    totals: dict[str, float] = {}
    for (_, q), prob in s.transition_distribution(e, p):
        totals[q] = totals.get(q, 0.0) + prob
    feats = sorted(q for q, v in totals.items() if v > 0.0)
    return FeatureProfile(feats, [min(totals[q], 1.0) for q in feats])
