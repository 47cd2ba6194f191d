from pathlib import Path

import numpy as np
import pytest

from scopkit.cli import bundled, run
from scopkit.docfile import load_document

HERE = Path(__file__).resolve().parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"

_RESULTS_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS_KEY] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_RESULTS_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record and print one PASS/FAIL line, then assert."""

    def record(n: int, title: str, ok: bool, detail: str):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})"
        print(line)
        request.config.stash[_RESULTS_KEY].append(line)
        assert ok, line

    return record


@pytest.fixture
def data():
    return bundled


@pytest.fixture
def example():
    return load_document(bundled("example.scop")).system


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cli(*argv):
    return run([str(a) for a in argv])


def random_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_family(rng, n, sizes=None):
    """A random spectral family: an orthonormal basis split into consecutive blocks."""
    from scopkit.hilbert import SpectralFamily, Subspace

    if sizes is None:
        k = int(rng.integers(1, n + 1))
        cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else []
        bounds = [0, *cuts, n]
        sizes = [int(b - a) for a, b in zip(bounds, bounds[1:])]
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    parts, k = [], 0
    for s in sizes:
        parts.append(Subspace(n, [q[:, i] for i in range(k, k + s)]))
        k += s
    return SpectralFamily(parts, n)
