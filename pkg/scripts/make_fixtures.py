"""Regenerate the computed fixtures in src/scopkit/data (singlet, classical mixture, random quantum)."""

from pathlib import Path

import numpy as np

from scopkit.docfile import ScopDocument, dump_document
from scopkit.hilbert import QuantumScop, SpectralFamily, Subspace, chsh_quantum_oracle
from scopkit.nonclassicality import STRATEGIES, mixture

DATA = Path(__file__).resolve().parents[1] / "src" / "scopkit" / "data"


def write(name, doc, header):
    (DATA / name).write_text(f"# {header}\n" + dump_document(doc), encoding="utf-8")


def random_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_family(rng, n, sizes):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    parts, k = [], 0
    for s in sizes:
        parts.append(Subspace(n, [q[:, i] for i in range(k, k + s)]))
        k += s
    return SpectralFamily(parts, n)


def main():
    write("singlet_chsh.scop", ScopDocument(correlations=chsh_quantum_oracle()), "Singlet correlations at the CHSH-optimal angles (0, pi/4, 5pi/8, 3pi/8).")

    w = np.zeros(16)
    w[STRATEGIES.index((1, 1, 1, 1))] = 0.5
    w[STRATEGIES.index((1, -1, 1, -1))] = 0.25
    w[STRATEGIES.index((-1, 1, -1, -1))] = 0.25
    write("classical_chsh.scop", ScopDocument(correlations=mixture(w)), "Mixture 1/2, 1/4, 1/4 of three deterministic local strategies.")

    rng = np.random.default_rng(20021)
    n = 4
    states = {f"s{i}": random_unit(rng, n) for i in range(4)}
    families = {"a": random_family(rng, n, [1, 1, 2]), "b": random_family(rng, n, [2, 2]), "c": random_family(rng, n, [1, 1, 1, 1])}
    props = {"m": Subspace(n, [random_unit(rng, n), random_unit(rng, n)])}
    write("random_quantum.scop", ScopDocument(quantum=QuantumScop(n, states, families, props)), "Random dimension-4 quantum fixture (seed 20021).")


if __name__ == "__main__":
    main()
