"""Finite-dimensional complex Hilbert spaces and the pure-quantum SCOP realization.

Vectors are plain complex numpy arrays. The inner product is conjugate-linear
in its first argument and linear in its second. Subspaces carry an explicit
orthonormal basis, so projection is a sum of rank-one terms.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidFamilyError,
    NonUnitStateError,
    RankDeficientError,
    UnknownCoupleError,
    UnknownElementError,
    UnknownEntryError,
)
from .report import ValidationReport

EPS_Q = 1e-9
MAX_DIM = 64
# projections with squared norm at or below this are treated as zero outcomes
ZERO_PROB = 1e-24

_NAME_RE = re.compile(r"^[^\s\[\]()|]+$")
_COLLAPSED_RE = re.compile(r"^(?P<fam>[^\[\]()]+)\[(?P<i>\d+)\]\((?P<inner>.+)\)$")


def as_vector(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if v.size == 0 or v.size > MAX_DIM:
        raise DimensionMismatchError(f"vector dimension {v.size} outside 1..{MAX_DIM}")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


def _pair(x, y):
    x, y = as_vector(x), as_vector(y)
    if x.size != y.size:
        raise DimensionMismatchError(f"dimension mismatch: {x.size} vs {y.size}")
    return x, y


def inner(x, y) -> complex:
    x, y = _pair(x, y)
    return complex(np.vdot(x, y))


def h_norm(x) -> float:
    x = as_vector(x)
    return math.sqrt(max(np.vdot(x, x).real, 0.0))


def h_distance(x, y) -> float:
    x, y = _pair(x, y)
    return h_norm(x - y)


def _require_unit(x, what="state"):
    n = h_norm(x)
    if abs(n - 1.0) > EPS_Q:
        raise NonUnitStateError(f"{what} has norm {n:.12g}, expected 1")


def h_angle(x, y) -> float:
    """Angle ``arccos |<x, y>|`` between two unit vectors."""
    x, y = _pair(x, y)
    _require_unit(x)
    _require_unit(y)
    return math.acos(min(abs(np.vdot(x, y)), 1.0))


def gram_schmidt(vectors: Sequence, dim: int, tol: float = EPS_Q) -> np.ndarray:
    """Orthonormalize ``vectors`` (modified Gram-Schmidt, one reorthogonalization pass).

    Returns a ``dim x k`` matrix with orthonormal columns. Raises
    :class:`RankDeficientError` if any input is (numerically) dependent on
    the ones before it.
    """
    basis: list[np.ndarray] = []
    for idx, v in enumerate(vectors):
        w = as_vector(v, dim).copy()
        scale = h_norm(w)
        if scale == 0.0:
            raise RankDeficientError(f"vector {idx} is zero")
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        n = h_norm(w)
        if n <= tol * scale:
            raise RankDeficientError(f"vector {idx} lies in the span of the previous ones")
        basis.append(w / n)
    if not basis:
        return np.zeros((dim, 0), dtype=complex)
    return np.column_stack(basis)


class Subspace:
    """Closed subspace of C^n held as an orthonormal basis.

    Input vectors are orthonormalized on construction; rank-deficient input
    is rejected.
    """

    def __init__(self, dim: int, vectors: Iterable = ()):
        if not 1 <= dim <= MAX_DIM:
            raise DimensionMismatchError(f"dimension {dim} outside 1..{MAX_DIM}")
        self.dim = dim
        vectors = list(vectors)
        stacked = np.column_stack([as_vector(v, dim) for v in vectors]) if vectors else None
        if stacked is not None and np.abs(stacked.conj().T @ stacked - np.eye(len(vectors))).max() <= 8 * np.finfo(float).eps * dim:
            # already orthonormal to machine precision: keep bit-for-bit
            self.basis = stacked
        else:
            self.basis = gram_schmidt(vectors, dim)
        self.basis.setflags(write=False)

    @classmethod
    def _from_orthonormal(cls, basis: np.ndarray) -> "Subspace":
        sub = cls.__new__(cls)
        sub.dim = basis.shape[0]
        sub.basis = np.array(basis, dtype=complex)
        sub.basis.setflags(write=False)
        return sub

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, i] for i in range(self.rank)]

    @cached_property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def contains(self, x, tol: float = EPS_Q) -> bool:
        x = as_vector(x, self.dim)
        return h_norm(x - project(self, x)) <= tol * max(1.0, h_norm(x))

    def orthocomplement(self) -> "Subspace":
        rest = np.eye(self.dim) - self.projector
        vals, vecs = np.linalg.eigh((rest + rest.conj().T) / 2)
        keep = vecs[:, vals > 0.5]
        return Subspace._from_orthonormal(keep)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rank={self.rank})"


def span(dim: int, *vectors) -> Subspace:
    return Subspace(dim, vectors)


def basis_vector(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def project(m: Subspace, x) -> np.ndarray:
    """Orthogonal projection ``sum_i <b_i, x> b_i`` onto ``m``."""
    x = as_vector(x, m.dim)
    return m.basis @ (m.basis.conj().T @ x)


def q_weight(x, m: Subspace) -> float:
    """Weight ``<x, P_M x>`` of the property ``m`` for the unit state ``x``."""
    x = as_vector(x, m.dim)
    _require_unit(x)
    return float(np.vdot(x, project(m, x)).real)


class SpectralFamily:
    """Mutually orthogonal subspaces meant to add up to the whole space."""

    def __init__(self, parts: Sequence[Subspace], dim: int | None = None):
        parts = list(parts)
        if dim is None:
            if not parts:
                raise DimensionMismatchError("empty family needs an explicit dimension")
            dim = parts[0].dim
        for m in parts:
            if m.dim != dim:
                raise DimensionMismatchError(f"family part of dimension {m.dim} in a dimension-{dim} family")
        self.dim = dim
        self.parts = tuple(parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @cached_property
    def report(self) -> ValidationReport:
        return validate_family(self)


def validate_family(fam: SpectralFamily, tol: float = EPS_Q) -> ValidationReport:
    """Report pairwise non-orthogonality and any completeness deficit."""
    rep = ValidationReport("spectral family")
    for i in range(len(fam.parts)):
        for j in range(i + 1, len(fam.parts)):
            overlap = fam.parts[i].basis.conj().T @ fam.parts[j].basis
            worst = float(np.abs(overlap).max()) if overlap.size else 0.0
            if worst > tol:
                rep.add("orthogonality", f"parts {i} and {j} are not orthogonal (max |<b_i, b_j>| = {worst:.3g})", i, j, worst)
    total = sum(m.rank for m in fam.parts)
    if total != fam.dim:
        rep.add("completeness", f"parts span {total} of {fam.dim} dimensions", total, fam.dim)
    return rep


@dataclass(frozen=True)
class CollapseOutcome:
    index: int
    collapsed: np.ndarray
    prob: float


def q_collapse(fam: SpectralFamily, x) -> list[CollapseOutcome]:
    """Collapse the unit state ``x`` under the measurement ``fam``.

    One outcome per part with a non-zero projection; the probability is the
    squared length of the projection and the collapsed state its normalization.
    """
    if not fam.report.ok:
        raise InvalidFamilyError(fam.report)
    x = as_vector(x, fam.dim)
    _require_unit(x)
    out = []
    for i, m in enumerate(fam.parts):
        coeffs = m.basis.conj().T @ x
        prob = float(np.sum(coeffs.real**2 + coeffs.imag**2))
        if prob <= ZERO_PROB:
            continue
        y = m.basis @ coeffs
        out.append(CollapseOutcome(i, y / math.sqrt(prob), prob))
    return out


def standard_family(dim: int) -> SpectralFamily:
    return SpectralFamily([span(dim, basis_vector(dim, i)) for i in range(dim)], dim)


# quantum SCOP


@dataclass(frozen=True)
class QuantumScop:
    """Sampled quantum SCOP: named unit states, named families, named properties.

    Family parts are also addressable as properties named ``fam[i]``.
    """

    dimension: int
    states: Mapping[str, np.ndarray]
    families: Mapping[str, SpectralFamily]
    properties: Mapping[str, Subspace]

    def validate(self) -> ValidationReport:
        rep = ValidationReport("quantum")
        for kind, names in (("state", self.states), ("family", self.families), ("property", self.properties)):
            for name in names:
                if not _NAME_RE.match(name):
                    rep.add("name", f"{kind} name {name!r} contains reserved characters", name)
        for name, v in self.states.items():
            if len(v) != self.dimension:
                rep.add("dimension", f"state {name} has dimension {len(v)}, expected {self.dimension}", name)
                continue
            n = h_norm(v)
            if abs(n - 1.0) > EPS_Q:
                rep.add("unit-state", f"state {name} has norm {n:.12g}", name)
        for name, fam in self.families.items():
            if fam.dim != self.dimension:
                rep.add("dimension", f"family {name} has dimension {fam.dim}", name)
                continue
            for v in validate_family(fam).violations:
                rep.add(v.check, f"family {name}: {v.message}", name, *v.witness)
        for name, m in self.properties.items():
            if m.dim != self.dimension:
                rep.add("dimension", f"property {name} has dimension {m.dim}", name)
        return rep


class QuantumRealization:
    """:class:`~scopkit.core.ScopRealization` backed by a :class:`QuantumScop`.

    Collapse results are named on demand. A collapsed vector equal (up to
    phase) to the input state keeps the input's name, one equal to a
    registered state takes that name, anything else is called
    ``fam[i](p)`` and can be resolved again later from its name alone.
    """

    tolerance = EPS_Q

    def __init__(self, q: QuantumScop):
        self.q = q

    def state_ids(self) -> tuple[str, ...]:
        return tuple(self.q.states)

    def context_ids(self) -> tuple[str, ...]:
        return tuple(self.q.families)

    def family(self, e: str) -> SpectralFamily:
        try:
            return self.q.families[e]
        except KeyError:
            raise UnknownCoupleError(f"unknown context {e!r}") from None

    def vector(self, p: str) -> np.ndarray:
        v = self.q.states.get(p)
        if v is not None:
            return v
        m = _COLLAPSED_RE.match(p)
        if m is None:
            raise UnknownElementError(f"unknown state {p!r}")
        fam = self.family(m["fam"])
        i = int(m["i"])
        if i >= len(fam):
            raise UnknownElementError(f"family {m['fam']} has no part {i}")
        y = project(fam[i], self.vector(m["inner"]))
        n = h_norm(y)
        if n * n <= ZERO_PROB:
            raise UnknownElementError(f"state {p!r} is a zero projection")
        return y / n

    def _name(self, y, e, i, p, x):
        if abs(abs(np.vdot(x, y)) - 1.0) <= EPS_Q:
            return p
        for name in sorted(self.q.states):
            if abs(abs(np.vdot(self.q.states[name], y)) - 1.0) <= EPS_Q:
                return name
        return f"{e}[{i}]({p})"

    def transition_distribution(self, e: str, p: str):
        fam = self.family(e)
        x = self.vector(p)
        rows = [((e, self._name(o.collapsed, e, o.index, p, x)), o.prob) for o in q_collapse(fam, x)]
        return sorted(rows)

    def reduced_probability(self, q: str, e: str, p: str) -> float:
        return sum(prob for (_, qq), prob in self.transition_distribution(e, p) if qq == q)

    def property_subspace(self, a: str) -> Subspace:
        m = self.q.properties.get(a)
        if m is not None:
            return m
        hit = re.match(r"^(?P<fam>[^\[\]()]+)\[(?P<i>\d+)\]$", a)
        if hit and hit["fam"] in self.q.families and int(hit["i"]) < len(self.q.families[hit["fam"]]):
            return self.q.families[hit["fam"]][int(hit["i"])]
        raise UnknownEntryError(f"unknown property {a!r}")

    def weight(self, p: str, e: str | None, a: str) -> float:
        # weights depend on context only through the property's own measurement
        if e is not None:
            self.family(e)
        return q_weight(self.vector(p), self.property_subspace(a))


def as_scop(q: QuantumScop) -> QuantumRealization:
    rep = q.validate()
    if not rep.ok:
        bad_family = [v for v in rep.violations if v.check in ("orthogonality", "completeness")]
        if bad_family:
            raise InvalidFamilyError(rep)
        raise NonUnitStateError(rep.summary())
    return QuantumRealization(q)


# CHSH oracle

SINGLET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)
# (a1, a2, b1, b2) maximizing S = E11 + E12 + E21 - E22 on the singlet
OPTIMAL_CHSH_ANGLES = (0.0, math.pi / 4, 5 * math.pi / 8, 3 * math.pi / 8)


def _qubit_basis(theta):
    return (
        np.array([math.cos(theta), math.sin(theta)], dtype=complex),
        np.array([-math.sin(theta), math.cos(theta)], dtype=complex),
    )


def product_family(theta_a: float, theta_b: float) -> SpectralFamily:
    """Four-outcome family ``{span(u_a (x) v_b)}`` ordered (++, +-, -+, --)."""
    ua, va = _qubit_basis(theta_a), _qubit_basis(theta_b)
    return SpectralFamily([span(4, np.kron(ua[i], va[j])) for i in range(2) for j in range(2)], 4)


def chsh_quantum_oracle(angles: Sequence[float] = OPTIMAL_CHSH_ANGLES, state=SINGLET):
    """Correlation tables for linear-polarization style measurements on a two-qubit state.

    ``angles`` are ``(a1, a2, b1, b2)``; setting ``theta`` measures the basis
    ``(cos t, sin t), (-sin t, cos t)`` with outcomes +1 and -1. On the
    singlet the correlation is ``E(a, b) = -cos 2(a - b)``.
    """
    from .nonclassicality import CorrelationData

    a1, a2, b1, b2 = (float(t) for t in angles)
    if not all(math.isfinite(t) for t in (a1, a2, b1, b2)):
        raise ValueError("angles must be finite")
    x = as_vector(state, 4)
    tables = np.zeros((2, 2, 2, 2))
    for i, ta in enumerate((a1, a2)):
        for j, tb in enumerate((b1, b2)):
            for o in q_collapse(product_family(ta, tb), x):
                tables[i, j, o.index // 2, o.index % 2] = o.prob
    return CorrelationData(tables)
