"""Acceptance criteria: one PASS/FAIL line per criterion (see the terminal summary)."""

import itertools
import math
import time
from decimal import Decimal, getcontext

import numpy as np
from scipy import stats

from conftest import FIXTURES, GOLDEN, cli, random_family, random_unit
from scopkit import core, distances, hilbert, nonclassicality
from scopkit.cli import bundled
from scopkit.docfile import load_document
from scopkit.lattice import PropertyLattice, chain_lattice, powerset_lattice


def test_01_probability_distance_boundaries(criterion):
    t0 = time.perf_counter()
    devs = [
        abs(distances.distance_from_probability(0.0) - math.sqrt(2)),
        abs(distances.angle_from_probability(0.0) - math.pi / 2),
        abs(distances.distance_from_probability(1.0) - 0.0),
        abs(distances.angle_from_probability(1.0) - 0.0),
    ]
    dt = time.perf_counter() - t0
    worst = max(devs)
    criterion(1, "d_mu/theta_mu boundary cases", worst <= 1e-12 and dt < 1.0, f"max dev {worst:.1e} <= 1e-12, {dt:.3f}s < 1s")


def test_02_weight_equals_collapse_probability(criterion):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, n = 0.0, 0
    for _ in range(1200):
        dim = int(rng.integers(2, 9))
        fam = random_family(rng, dim)
        x = random_unit(rng, dim)
        probs = {o.index: o.prob for o in hilbert.q_collapse(fam, x)}
        for i, m in enumerate(fam.parts):
            worst = max(worst, abs(hilbert.q_weight(x, m) - probs.get(i, 0.0)))
        n += 1
    dt = time.perf_counter() - t0
    criterion(2, "quantum weight = collapse probability", n >= 1000 and worst < 1e-10 and dt < 10, f"{n} instances, dims 2-8, max dev {worst:.1e} < 1e-10, {dt:.2f}s < 10s")


def test_03_hilbert_distance_matches_probability_distance(criterion):
    rng = np.random.default_rng(7)
    worst, n = 0.0, 0
    while n < 1200:
        dim = int(rng.integers(2, 9))
        x, y = random_unit(rng, dim), random_unit(rng, dim)
        # rotate y's phase so that <x, y> is real and nonnegative
        z = hilbert.inner(x, y)
        if abs(z) < 1e-12:
            continue
        y = y * (abs(z) / z)
        mu = abs(hilbert.inner(x, y)) ** 2
        worst = max(worst, abs(hilbert.h_distance(x, y) - distances.distance_from_probability(mu)))
        n += 1
    criterion(3, "Hilbert distance = d_mu on real nonnegative overlaps", worst < 1e-10, f"{n} pairs, max dev {worst:.1e} < 1e-10")


def _mutations():
    """The six broken structures with the check each must trip."""
    chain_ids = ["0", "a", "b", "1"]
    yield "broken involution", "involution", PropertyLattice(
        ["0", "a", "b", "c", "1"],
        [("0", x) for x in "abc"] + [(x, "1") for x in "abc"],
        {"0": "1", "1": "0", "a": "b", "b": "c", "c": "a"},
        "0",
        "1",
        validate=False,
    )
    yield "broken order-reversal", "order-reversal", chain_lattice(chain_ids, {"0": "1", "1": "0", "a": "a", "b": "b"})
    yield "a ^ a' != 0", "meet-complement", chain_lattice(chain_ids, {"0": "1", "1": "0", "a": "b", "b": "a"})
    # in the 3-chain 0 < m < 1 with m' = m the meet m ^ m' = m is not 0
    # and the join m v m' = m is not 1
    yield "a v a' != I", "join-complement", chain_lattice(["0", "m", "1"], {"0": "1", "1": "0", "m": "m"})
    yield "missing infimum", "infimum", PropertyLattice(
        ["0", "a", "b", "c", "d", "1"],
        [("0", "a"), ("0", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "1"), ("d", "1")],
        {"0": "1", "1": "0", "a": "d", "d": "a", "b": "c", "c": "b"},
        "0",
        "1",
        validate=False,
    )
    base = powerset_lattice(["x", "y"], validate=False)
    yield "broken antisymmetry", "antisymmetry", PropertyLattice(
        base.elements,
        list(base.order_pairs) + [("{x,y}", "{x}")],
        base.complement_map,
        base.bottom,
        base.top,
        validate=False,
    )


def test_04_lattice_axiom_suite(criterion):
    t0 = time.perf_counter()
    clean = all(powerset_lattice([f"a{i}" for i in range(k)], validate=False).validate().ok for k in range(0, 6))
    detected = []
    for name, check, lat in _mutations():
        hits = [v for v in lat.validate().violations if v.check == check]
        detected.append((name, bool(hits) and all(len(v.witness) > 0 for v in hits)))
    dt = time.perf_counter() - t0
    missed = [n for n, ok in detected if not ok]
    ok = clean and not missed and len(detected) == 6 and dt < 5
    criterion(4, "lattice axiom suite", ok, f"powersets 0-5 atoms clean={clean}, {6 - len(missed)}/6 mutations caught with witness, {dt:.2f}s < 5s")


def test_05_normalization_invariants(criterion):
    tol = 1e-9
    worst = 0.0
    # tabular fixture: kernel rows and complement weights
    s = load_document(bundled("example.scop")).system
    assert s.validate(tolerance=tol).ok
    for key, row in s.kernel.items():
        worst = max(worst, abs(sum(p for _, p in row) - 1.0))
    lat = s.lattice
    for (p, e, a), w in s.weights.items():
        wc = s.weights.get((p, e, lat.complement(a)))
        if wc is not None:
            worst = max(worst, abs(w + wc - 1.0))
    # quantum fixtures: transition distributions and property/orthocomplement weights
    for name in ("quantum.scop", "random_quantum.scop"):
        q = load_document(bundled(name)).quantum
        r = hilbert.as_scop(q)
        for p in q.states:
            for e in q.families:
                worst = max(worst, abs(sum(pr for _, pr in r.transition_distribution(e, p)) - 1.0))
            for m in q.properties.values():
                x = q.states[p]
                worst = max(worst, abs(hilbert.q_weight(x, m) + hilbert.q_weight(x, m.orthocomplement()) - 1.0))
    # correlation fixtures
    for name in ("classical_chsh.scop", "singlet_chsh.scop"):
        t = load_document(bundled(name)).correlations.tables
        worst = max(worst, float(np.abs(t.sum(axis=(2, 3)) - 1.0).max()))
    rejected = [cli("validate", "--file", FIXTURES / f)[0] == 1 for f in ("bad_rowsum.scop", "bad_complement.scop")]
    ok = worst <= tol and all(rejected)
    criterion(5, "normalization invariants", ok, f"max deviation {worst:.1e} <= 1e-9 on bundled fixtures, mutated fixtures rejected={all(rejected)}")


def _hand_distance(mu: str) -> Decimal:
    getcontext().prec = 40
    return (2 * (1 - Decimal(mu).sqrt())).sqrt()


def test_06_petfish_demo(criterion):
    code, out = cli("petfish")
    golden = (GOLDEN / "petfish.txt").read_text(encoding="utf-8")
    expected = [_hand_distance(m).quantize(Decimal("1e-9")) for m in ("0.05", "0.05", "0.90")]
    printed = [Decimal(line.split()[-1]) for line in out.splitlines() if line.strip().startswith("d_mu(")]
    ok = code == 0 and out == golden and printed == expected and "guppy effect present" in out
    criterion(6, "Pet Fish demo", ok, f"d_mu = {', '.join(map(str, printed))} (hand: {', '.join(map(str, expected))}), verdict present, golden byte-identical={out == golden}")


def test_07_baseline_contrast(criterion):
    doc = load_document(bundled("petfish.scop"))
    pf = doc.petfish
    prof = pf.profiles
    ref = prof[pf.weights[0]]
    conj = distances.d_w(*distances.merge_profiles(ref, prof[pf.weights[-1]]))
    stim = prof[pf.stimulus]
    base = {}
    for concept, key in pf.prototypes.items():
        base[f"prototype {concept}"] = distances.prototype_distance(stim, prof[key])
    for concept, rows in pf.exemplars.items():
        ex = distances.ExemplarSet([(s, prof[(s, c)]) for s, c in rows])
        base[f"exemplar {concept}"] = distances.exemplar_distance(stim, ex)
    ok = len(base) == 4 and all(d > conj for d in base.values())
    detail = ", ".join(f"{k} {v:.3f}" for k, v in base.items())
    criterion(7, "baseline contrast", ok, f"{detail} all > conjunction d_w {conj:.3f}")


def test_08_chsh(criterion):
    t0 = time.perf_counter()
    det = max(abs(nonclassicality.chsh_value(nonclassicality.CorrelationData(nonclassicality.strategy_tables(s)))) for s in nonclassicality.STRATEGIES)
    singlet = hilbert.chsh_quantum_oracle()
    s = nonclassicality.chsh_value(singlet)
    infeasible = not nonclassicality.kolmogorov_feasible(singlet).feasible
    rng = np.random.default_rng(99)
    worst = 0.0
    feasible = True
    for _ in range(25):
        w = rng.dirichlet(np.full(16, 0.3))
        d = nonclassicality.mixture(w)
        res = nonclassicality.kolmogorov_feasible(d)
        feasible &= res.feasible
        if res.feasible:
            worst = max(worst, float(np.abs(nonclassicality.mixture(res.weights).tables - d.tables).max()))
    dt = time.perf_counter() - t0
    ok = det <= 2 and abs(s - 2 * math.sqrt(2)) <= 1e-9 and infeasible and feasible and worst <= 1e-9 and dt < 5
    criterion(8, "CHSH", ok, f"deterministic max |S| = {det:g}, singlet S = {s:.12f}, infeasible={infeasible}, 25 mixtures feasible={feasible} (witness dev {worst:.1e}), {dt:.2f}s < 5s")


def test_09_determinism(criterion):
    runs = [
        ("collapse", "--file", bundled("example.scop"), "--state", "p", "--context", "k", "--steps", "20", "--seed", "42"),
        ("collapse", "--file", bundled("example.scop"), "--state", "p", "--context", "e", "--steps", "5", "--seed", "7", "--format", "structured"),
    ]
    same = all(cli(*r) == cli(*r) for r in runs)
    criterion(9, "determinism", same, f"{len(runs)} seeded commands byte-identical across two runs")


def test_10_sampling_fidelity(criterion):
    s = load_document(bundled("example.scop")).system
    rng = np.random.default_rng(31337)
    pvals = []
    for e, p in (("e", "p"), ("f", "p"), ("k", "p")):
        dist = s.transition_distribution(e, p)
        outcomes = [fq for fq, _ in dist]
        counts = dict.fromkeys(outcomes, 0)
        for _ in range(100_000):
            counts[core.sample_collapse(s, e, p, rng)] += 1
        obs = np.array([counts[o] for o in outcomes])
        exp = np.array([pr for _, pr in dist]) * obs.sum()
        pvals.append(stats.chisquare(obs, exp).pvalue)
    ok = min(pvals) > 0.001
    criterion(10, "sampling fidelity", ok, "chi-square p = " + ", ".join(f"{p:.3f}" for p in pvals) + " > 0.001 at 1e5 draws")
