"""Finite complete orthocomplemented lattices of properties.

A lattice is given by its elements, a generator order relation (pairs
``(a, b)`` meaning ``a < b``), an orthocomplement map and designated bottom
and top elements. The reflexive-transitive closure of the generator relation
is computed once at construction; meets and joins are then found by scanning
the closed order, never trusted from input.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from functools import cached_property

import numpy as np

from . import kernels
from .errors import InvalidLatticeError, LatticeError, TooManyAtomsError, UnknownElementError
from .report import ValidationReport

MAX_ELEMENTS = 4096
MAX_ATOMS = 16


class PropertyLattice:
    """Finite property lattice with orthocomplementation.

    Parameters
    ----------
    elements : sequence of str
        Element ids, unique.
    order : iterable of (str, str)
        Generator pairs ``(a, b)`` meaning ``a < b``. Need not be closed.
    complement : mapping str -> str
        The orthocomplement. Missing entries are reported by validation.
    bottom, top : str
        Designated ``0`` and ``I``.
    labels : mapping str -> str, optional
        Display labels; default to the ids.
    validate : bool
        Run :meth:`validate` and raise :class:`InvalidLatticeError` on any
        violation. Pass ``False`` to inspect broken structures.
    """

    def __init__(
        self,
        elements: Sequence[str],
        order: Iterable[tuple[str, str]],
        complement: Mapping[str, str],
        bottom: str,
        top: str,
        labels: Mapping[str, str] | None = None,
        validate: bool = True,
    ):
        self._ids = tuple(elements)
        if len(set(self._ids)) != len(self._ids):
            raise LatticeError("duplicate element ids")
        if len(self._ids) == 0:
            raise LatticeError("a lattice needs at least one element")
        if len(self._ids) > MAX_ELEMENTS:
            raise LatticeError(f"{len(self._ids)} elements exceeds the limit of {MAX_ELEMENTS}")
        self._index = {a: i for i, a in enumerate(self._ids)}
        self._labels = {a: a for a in self._ids}
        if labels:
            for a, lab in labels.items():
                self._idx(a)
                self._labels[a] = lab
        self._order = tuple((a, b) for a, b in order)
        n = len(self._ids)
        adj = np.zeros((n, n), dtype=np.uint8)
        for a, b in self._order:
            adj[self._idx(a), self._idx(b)] = 1
        self._leq = kernels.transitive_closure(adj).astype(bool)
        self._comp = {}
        for a, b in complement.items():
            self._idx(a), self._idx(b)
            self._comp[a] = b
        self.bottom = bottom
        self.top = top
        self._idx(bottom), self._idx(top)
        if validate:
            report = self.validate()
            if not report.ok:
                raise InvalidLatticeError(report)

    def _idx(self, a):
        try:
            return self._index[a]
        except (KeyError, TypeError):
            raise UnknownElementError(f"unknown lattice element {a!r}") from None

    @property
    def elements(self) -> tuple[str, ...]:
        return self._ids

    @property
    def order_pairs(self) -> tuple[tuple[str, str], ...]:
        return self._order

    @property
    def complement_map(self) -> dict[str, str]:
        return dict(self._comp)

    def label(self, a: str) -> str:
        self._idx(a)
        return self._labels[a]

    def __len__(self):
        return len(self._ids)

    def __contains__(self, a):
        return a in self._index

    def __eq__(self, other):
        if not isinstance(other, PropertyLattice):
            return NotImplemented
        if set(self._ids) != set(other._ids) or (self.bottom, self.top) != (other.bottom, other.top):
            return False
        perm = [other._index[a] for a in self._ids]
        return self._comp == other._comp and np.array_equal(self._leq, other._leq[np.ix_(perm, perm)])

    def __hash__(self):
        return hash((frozenset(self._ids), self.bottom, self.top))

    def __repr__(self):
        return f"PropertyLattice({len(self._ids)} elements, bottom={self.bottom!r}, top={self.top!r})"

    # order and operations

    def leq(self, a: str, b: str) -> bool:
        return bool(self._leq[self._idx(a), self._idx(b)])

    def _glb_index(self, idxs):
        lower = np.ones(len(self._ids), dtype=bool)
        for i in idxs:
            lower &= self._leq[:, i]
        cand = np.flatnonzero(lower)
        if cand.size == 0:
            return -1
        # greatest lower bound: a lower bound sitting above every other lower bound
        above_all = self._leq[np.ix_(cand, cand)].all(axis=0)
        hits = cand[above_all]
        return int(hits[0]) if hits.size else -1

    def _lub_index(self, idxs):
        upper = np.ones(len(self._ids), dtype=bool)
        for i in idxs:
            upper &= self._leq[i, :]
        cand = np.flatnonzero(upper)
        if cand.size == 0:
            return -1
        below_all = self._leq[np.ix_(cand, cand)].all(axis=1)
        hits = cand[below_all]
        return int(hits[0]) if hits.size else -1

    def meet(self, s: Iterable[str]) -> str:
        """Greatest lower bound of ``s``; the empty meet is the top."""
        idxs = [self._idx(a) for a in s]
        g = self._glb_index(idxs)
        if g < 0:
            raise LatticeError(f"no infimum for {sorted(set(s))}")
        return self._ids[g]

    def join(self, s: Iterable[str]) -> str:
        """Least upper bound of ``s``; the empty join is the bottom."""
        idxs = [self._idx(a) for a in s]
        g = self._lub_index(idxs)
        if g < 0:
            raise LatticeError(f"no supremum for {sorted(set(s))}")
        return self._ids[g]

    def complement(self, a: str) -> str:
        self._idx(a)
        try:
            return self._comp[a]
        except KeyError:
            raise UnknownElementError(f"no complement recorded for {a!r}") from None

    @cached_property
    def meet_table(self) -> np.ndarray:
        return kernels.meet_table(self._leq.astype(np.uint8))

    @cached_property
    def join_table(self) -> np.ndarray:
        return kernels.meet_table(np.ascontiguousarray(self._leq.T, dtype=np.uint8))

    # validation

    def validate(self, weak_modularity: bool = False) -> ValidationReport:
        """Check every partial-order, completeness and orthocomplement axiom.

        With ``weak_modularity=True`` the orthomodular law
        ``a <= b  =>  b = a v (b ^ a')`` is evaluated as well; the outcome goes
        to ``report.notes`` and never counts as a violation.
        """
        ids = self._ids
        n = len(ids)
        leq = self._leq
        rep = ValidationReport("lattice")

        both = leq & leq.T
        np.fill_diagonal(both, False)
        for i, j in zip(*np.nonzero(np.triu(both))):
            rep.add("antisymmetry", f"{ids[i]} < {ids[j]} and {ids[j]} < {ids[i]} but they differ", ids[i], ids[j])

        # completeness: every pair has meet/join, and least/greatest elements exist
        mt, jt = self.meet_table, self.join_table
        for table, check, word in ((mt, "infimum", "meet"), (jt, "supremum", "join")):
            bad = np.argwhere(np.triu(table < 0))
            for i, j in bad:
                rep.add(check, f"{word} of {ids[i]} and {ids[j]} does not exist", ids[i], ids[j])
        least = self._glb_index(range(n))
        greatest = self._lub_index(range(n))
        if least < 0:
            rep.add("infimum", "no least element", *ids)
        elif ids[least] != self.bottom:
            rep.add("bottom", f"designated bottom {self.bottom} is not the least element {ids[least]}", self.bottom, ids[least])
        if greatest < 0:
            rep.add("supremum", "no greatest element", *ids)
        elif ids[greatest] != self.top:
            rep.add("top", f"designated top {self.top} is not the greatest element {ids[greatest]}", self.top, ids[greatest])

        missing = [a for a in ids if a not in self._comp]
        for a in missing:
            rep.add("complement-total", f"{a} has no complement", a)
        have = [a for a in ids if a in self._comp]
        comp_idx = {self._index[a]: self._index[self._comp[a]] for a in have}

        for i, c in comp_idx.items():
            cc = comp_idx.get(c)
            if cc is not None and cc != i:
                rep.add("involution", f"({ids[i]}')' = {ids[cc]}, expected {ids[i]}", ids[i], ids[c])

        for i, j in zip(*np.nonzero(leq)):
            if i == j or i not in comp_idx or j not in comp_idx:
                continue
            if not leq[comp_idx[j], comp_idx[i]]:
                rep.add(
                    "order-reversal",
                    f"{ids[i]} < {ids[j]} but {ids[comp_idx[j]]} is not below {ids[comp_idx[i]]}",
                    ids[i],
                    ids[j],
                )

        bot_i, top_i = self._index[self.bottom], self._index[self.top]
        for i, c in comp_idx.items():
            m = mt[i, c]
            if m >= 0 and m != bot_i:
                rep.add("meet-complement", f"{ids[i]} ^ {ids[c]} = {ids[m]}, not {self.bottom}", ids[i], ids[c])
            j = jt[i, c]
            if j >= 0 and j != top_i:
                rep.add("join-complement", f"{ids[i]} v {ids[c]} = {ids[j]}, not {self.top}", ids[i], ids[c])

        if weak_modularity:
            if rep.ok:
                witness = self._orthomodular_witness(comp_idx)
                rep.notes["weakly_modular"] = witness is None
                if witness is not None:
                    rep.notes["weak_modularity_witness"] = witness
            else:
                rep.notes["weakly_modular"] = None
        return rep

    def _orthomodular_witness(self, comp_idx):
        mt, jt, ids = self.meet_table, self.join_table, self._ids
        for i, j in zip(*np.nonzero(self._leq)):
            if jt[i, mt[j, comp_idx[i]]] != j:
                return (ids[i], ids[j])
        return None


def leq(l: PropertyLattice, a: str, b: str) -> bool:
    return l.leq(a, b)


def meet(l: PropertyLattice, s: Iterable[str]) -> str:
    return l.meet(s)


def join(l: PropertyLattice, s: Iterable[str]) -> str:
    return l.join(s)


def complement(l: PropertyLattice, a: str) -> str:
    return l.complement(a)


def validate_lattice(l: PropertyLattice, weak_modularity: bool = False) -> ValidationReport:
    return l.validate(weak_modularity=weak_modularity)


def subset_id(atoms: Iterable[str]) -> str:
    return "{" + ",".join(atoms) + "}"


def powerset_lattice(atoms: Sequence[str], validate: bool = True) -> PropertyLattice:
    """Boolean lattice of all subsets of ``atoms`` with set complement.

    Element ids are written ``{x,y}`` with atoms in the given order; the empty
    set is ``{}``.
    """
    atoms = list(atoms)
    if len(set(atoms)) != len(atoms):
        raise LatticeError("atom labels must be distinct")
    if len(atoms) > MAX_ATOMS:
        raise TooManyAtomsError(f"{len(atoms)} atoms; at most {MAX_ATOMS} allowed")
    k = len(atoms)
    if 2**k > MAX_ELEMENTS:
        raise LatticeError(f"{2**k} elements exceeds the dense-order limit of {MAX_ELEMENTS}")
    name = [subset_id(atoms[i] for i in range(k) if m >> i & 1) for m in range(2**k)]
    full = 2**k - 1
    order = [(name[m], name[m | 1 << i]) for m in range(2**k) for i in range(k) if not m >> i & 1]
    comp = {name[m]: name[full ^ m] for m in range(2**k)}
    return PropertyLattice(name, order, comp, name[0], name[full], validate=validate)


def chain_lattice(ids: Sequence[str], complement: Mapping[str, str], validate: bool = False) -> PropertyLattice:
    """Totally ordered lattice ``ids[0] < ids[1] < ...`` (mostly for tests)."""
    order = list(zip(ids, ids[1:]))
    return PropertyLattice(ids, order, complement, ids[0], ids[-1], validate=validate)
