"""``scop`` command-line front end.

Every command builds a :class:`RunReport` and renders it either as fixed
9-decimal text or as JSON (``--format structured``). Output depends only on
the input bytes and the seed. Exit codes: 0 ok, 1 validation failure, 2 parse
or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from importlib import resources
from pathlib import Path

import numpy as np

from . import core, distances, hilbert, nonclassicality
from .core import classify_couple, collapse_sequence
from .docfile import digest, load_document, load_profiles
from .distances import ExemplarSet
from .errors import ScopError
from .report import ValidationReport

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2
MEASURES = ("dmu", "theta", "dp", "dw", "prototype", "exemplar")
QUANTUM_SUBCOMMANDS = ("validate", "collapse", "weight", "project", "identity")
IDENTITY_TOL = 1e-10


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Fixed 9-decimal rendering, round-half-even on the exact binary value."""
    d = Decimal(float(x)).quantize(Decimal("1e-9"), rounding=ROUND_HALF_EVEN)
    if d.is_zero():
        d = abs(d)
    return format(d, "f")


@dataclass
class RunReport:
    command: str
    seed: int | None = None
    inputs: list[tuple[str, str]] = field(default_factory=list)
    results: list[tuple[str, object]] = field(default_factory=list)
    validation: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK

    def add(self, key: str, value) -> None:
        self.results.append((key, value))

    def add_input(self, path: Path) -> None:
        self.inputs.append((path.name, digest(path.read_bytes())))

    def render_text(self) -> str:
        lines = [f"command: {self.command}", f"seed: {'none' if self.seed is None else self.seed}"]
        lines += [f"input: {name} sha256={h}" for name, h in self.inputs]
        lines.append("results:")
        width = max((len(k) for k, _ in self.results), default=0)
        for k, v in self.results:
            val = fmt(v) if isinstance(v, float) else str(v)
            lines.append(f"  {k.ljust(width)}  {val}" if val else f"  {k}")
        lines.append("validation:")
        lines += [f"  {v}" for v in self.validation] or ["  ok"]
        return "\n".join(lines) + "\n"

    def render_structured(self) -> str:
        def conv(v):
            if isinstance(v, float):
                return float(fmt(v))
            return v

        payload = {
            "command": self.command,
            "seed": self.seed,
            "inputs": [{"name": n, "sha256": h} for n, h in self.inputs],
            "results": [{"name": k, "value": conv(v)} for k, v in self.results],
            "validation": self.validation or ["ok"],
            "exit_code": self.exit_code,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def bundled(name: str) -> Path:
    return Path(str(resources.files("scopkit") / "data" / name))


def _echo(argv: list[str]) -> str:
    out, take = ["scop"], False
    for a in argv:
        if take:
            out.append(os.path.basename(a))
            take = False
        elif a in ("--file", "--profiles"):
            out.append(a)
            take = True
        elif a.startswith(("--file=", "--profiles=")):
            k, v = a.split("=", 1)
            out.append(f"{k}={os.path.basename(v)}")
        else:
            out.append(a)
    return " ".join(out)


def _validation_lines(rep: ValidationReport) -> list[str]:
    return [f"{rep.subject}: {v}" for v in rep.violations]


def _load(args, rep: RunReport, default: str | None = None, validate=True):
    path = Path(args.file) if args.file else (bundled(default) if default else None)
    if path is None:
        raise UsageError("--file is required")
    doc = load_document(path, validate=validate)
    rep.add_input(path)
    return doc, path


def _realization(doc):
    if doc.system is not None:
        rep = doc.system.validate()
        if not rep.ok:
            return None, rep
        return doc.system, None
    if doc.quantum is not None:
        return hilbert.as_scop(doc.quantum), None
    raise UsageError("document has neither a tabular SCOP nor a quantum section")


def _pairs(args, n_min, n_max=None):
    states, contexts = args.state or [], args.context or []
    if len(states) != len(contexts):
        raise UsageError("give one --context per --state")
    if len(states) < n_min or (n_max is not None and len(states) > n_max):
        want = f"{n_min}" if n_max == n_min else f"at least {n_min}"
        raise UsageError(f"measure {args.measure} needs {want} --state/--context pairs")
    return list(zip(states, contexts))


def _profile(table, key):
    try:
        return table[key]
    except KeyError:
        raise UsageError(f"no profile row for state {key[0]!r}, context {key[1]!r}") from None


# commands


def cmd_validate(args, rep: RunReport) -> int:
    doc, _ = _load(args, rep, validate=False)
    reports = []
    if doc.lattice is not None:
        reports.append(doc.lattice.validate())
    if doc.system is not None:
        reports.append(doc.system.validate())
    if doc.quantum is not None:
        reports.append(doc.quantum.validate())
    if doc.petfish is not None:
        reports.append(validate_petfish(doc.petfish))
    if doc.correlations is not None:
        r = ValidationReport("correlations")
        try:
            doc.correlations.check(core.EPS_FILE)
        except ScopError as exc:
            r.add("normalization", str(exc))
        reports.append(r)
    for r in reports:
        rep.add(r.subject, "valid" if r.ok else f"{len(r.violations)} violation(s)")
        rep.validation += _validation_lines(r)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_INVALID


def validate_petfish(pf) -> ValidationReport:
    """Check that every probability lies in [0, 1] and every profile reference resolves."""
    r = ValidationReport("petfish")
    for c, mu in pf.mu.items():
        if not 0.0 <= mu <= 1.0:
            r.add("mu-range", f"mu for context {c} is {mu}, outside [0, 1]", c)
    refs = list(pf.weights) + ([pf.stimulus] if pf.stimulus else []) + list(pf.prototypes.values())
    refs += [k for rows in pf.exemplars.values() for k in rows]
    for key in refs:
        if key not in pf.profiles:
            r.add("profile-reference", f"no profile row for state {key[0]}, context {key[1]}", *key)
    return r


def cmd_distance(args, rep: RunReport) -> int:
    if args.measure is None:
        raise UsageError(f"--measure is required (one of {', '.join(MEASURES)})")
    doc, path = _load(args, rep)
    m = args.measure
    profiles = None
    if args.profiles:
        ppath = Path(args.profiles)
        profiles = load_profiles(ppath)
        rep.add_input(ppath)
    elif doc.petfish is not None and doc.petfish.profiles:
        profiles = doc.petfish.profiles

    if m in ("dmu", "theta"):
        states, contexts = args.state or [], args.context or []
        if len(states) != 2 or len(contexts) != 1:
            raise UsageError(f"measure {m} needs --state P --state Q --context E")
        real, bad = _realization(doc)
        if bad is not None:
            rep.validation += _validation_lines(bad)
            return EXIT_INVALID
        p, q = states
        (e,) = contexts
        mu = real.reduced_probability(q, e, p)
        rep.add(f"mu({q}, {e}, {p})", mu)
        if m == "dmu":
            rep.add(f"d_mu({q}, {e}, {p})", distances.distance_from_probability(mu))
        else:
            rep.add(f"theta_mu({q}, {e}, {p})", distances.angle_from_probability(mu))
        return EXIT_OK

    if m in ("dw", "dp"):
        (p, e), (q, f) = _pairs(args, 2, 2)
        if profiles is not None:
            a, b = _profile(profiles, (p, e)), _profile(profiles, (q, f))
        elif doc.system is not None:
            if m == "dw":
                a = distances.profile_from_weights(doc.system, p, e)
                b = distances.profile_from_weights(doc.system, q, f)
            else:
                a = distances.frequency_profile(doc.system, e, p)
                b = distances.frequency_profile(doc.system, f, q)
        else:
            raise UsageError(f"measure {m} needs --profiles or a tabular SCOP")
        a, b = distances.merge_profiles(a, b)
        fn = distances.d_w if m == "dw" else distances.d_p
        name = "d_w" if m == "dw" else "d_p"
        rep.add("features", len(a))
        rep.add(f"{name}({q}, {e}, {f}, {p})", fn(a, b))
        rep.add(f"{name}_unnormalized({q}, {e}, {f}, {p})", fn(a, b, normalized=False))
        return EXIT_OK

    if profiles is None:
        raise UsageError(f"measure {m} needs --profiles")
    if m == "prototype":
        (s, sc), (t, tc) = _pairs(args, 2, 2)
        rep.add(f"prototype_distance({s}, {t})", distances.prototype_distance(_profile(profiles, (s, sc)), _profile(profiles, (t, tc))))
        return EXIT_OK
    pairs = _pairs(args, 2)
    (s, sc), rest = pairs[0], pairs[1:]
    ex = ExemplarSet([(st, _profile(profiles, (st, cx))) for st, cx in rest])
    rep.add(f"exemplar_distance({s}; {len(rest)} exemplars)", distances.exemplar_distance(_profile(profiles, (s, sc)), ex))
    return EXIT_OK


def cmd_collapse(args, rep: RunReport) -> int:
    if not args.state or not args.context or len(args.state) != 1 or len(args.context) != 1:
        raise UsageError("collapse needs exactly one --state and one --context")
    steps = args.steps or 0
    if steps < 0:
        raise UsageError("--steps must be non-negative")
    if steps > 0 and args.seed is None:
        raise UsageError("--seed is required when --steps > 0")
    rep.seed = args.seed
    doc, _ = _load(args, rep)
    real, bad = _realization(doc)
    if bad is not None:
        rep.validation += _validation_lines(bad)
        return EXIT_INVALID
    e, p = args.context[0], args.state[0]
    rep.add("couple", f"({e}, {p})")
    rep.add("class", str(classify_couple(real, e, p)))
    for (f, q), prob in real.transition_distribution(e, p):
        rep.add(f"mu({f}, {q}, {e}, {p})", prob)
    if steps > 0:
        traj = collapse_sequence(real, e, p, steps, np.random.default_rng(args.seed))
        for k, (f, q) in enumerate(traj.couples):
            rep.add(f"step {k}", f"({f}, {q})")
        rep.add("truncated", "no" if traj.truncated_at is None else f"fixed point at step {traj.truncated_at}")
    return EXIT_OK


def petfish_analysis(doc, rep: RunReport) -> int:
    pf = doc.petfish
    if pf is None:
        raise UsageError("data file has no [petfish] section")
    if len(pf.mu) != 3:
        raise UsageError("[petfish] needs exactly three mu records (pet, fish, pet fish contexts)")
    if len(pf.weights) != 4:
        raise UsageError("[petfish] needs four weights records (reference first)")
    (ce, me), (cf, mf), (cg, mg) = pf.mu.items()
    dm = {}
    for c, mu in ((ce, me), (cf, mf), (cg, mg)):
        dm[c] = distances.distance_from_probability(mu)
        rep.add(f"mu(q, {c}, p)", mu)
    for c in (ce, cf, cg):
        rep.add(f"d_mu(q, {c}, p)", dm[c])
    effect = dm[cg] < min(dm[ce], dm[cf])
    rep.add("guppy effect", "guppy effect present" if effect else "no effect")

    ref_key, *others = pf.weights
    ref = _profile(pf.profiles, ref_key)
    dws = []
    for key in others:
        a, b = distances.merge_profiles(ref, _profile(pf.profiles, key))
        nrm, raw = distances.d_w(a, b), distances.d_w(a, b, normalized=False)
        dws.append(nrm)
        rep.add(f"d_w({ref_key[0]}, {key[0]})", nrm)
        rep.add(f"d_w_unnormalized({ref_key[0]}, {key[0]})", raw)

    if pf.stimulus is not None and pf.prototypes:
        stim = _profile(pf.profiles, pf.stimulus)
        conj = dws[-1]
        base = []
        for concept, key in pf.prototypes.items():
            d = distances.prototype_distance(stim, _profile(pf.profiles, key))
            base.append(d)
            rep.add(f"prototype_distance({pf.stimulus[0]}, {concept})", d)
        for concept, rows in pf.exemplars.items():
            ex = ExemplarSet([(s, _profile(pf.profiles, (s, c))) for s, c in rows])
            d = distances.exemplar_distance(stim, ex)
            base.append(d)
            rep.add(f"exemplar_distance({pf.stimulus[0]}, {concept})", d)
        contrast = all(d > conj for d in base)
        rep.add("baseline contrast", "every baseline distance exceeds the conjunction d_w" if contrast else "not shown")
    return EXIT_OK


def cmd_petfish(args, rep: RunReport) -> int:
    doc, path = _load(args, rep, default="petfish.scop")
    if doc.petfish is not None and doc.petfish.profiles_path:
        csv_path = Path(doc.petfish.profiles_path)
        rep.add_input(csv_path if csv_path.is_absolute() else path.parent / csv_path)
    return petfish_analysis(doc, rep)


def cmd_chsh(args, rep: RunReport) -> int:
    doc, _ = _load(args, rep)
    if doc.correlations is None:
        raise UsageError("data file has no [correlations] section")
    d = doc.correlations
    s = nonclassicality.chsh_value(d, tol=core.EPS_FILE)
    rep.add("S", s)
    rep.add("|S| > 2", "yes (nonclassical)" if abs(s) > 2 + core.EPS_FILE else "no")
    res = nonclassicality.kolmogorov_feasible(d, tol=core.EPS_FILE)
    if res.feasible:
        rep.add("kolmogorov model", "feasible")
        for strat, w in zip(nonclassicality.STRATEGIES, res.weights):
            if w > core.EPS_FILE:
                label = " ".join(f"{n}={'+' if v > 0 else '-'}" for n, v in zip(("A1", "A2", "B1", "B2"), strat))
                rep.add(f"weight[{label}]", float(w))
    else:
        rep.add("kolmogorov model", "infeasible")
        rep.add("violated", res.violated)
    return EXIT_OK


def cmd_quantum(args, rep: RunReport) -> int:
    doc, _ = _load(args, rep)
    if doc.quantum is None:
        raise UsageError("document has no [quantum] section")
    qs = doc.quantum
    sub = args.subcommand
    if sub == "validate":
        r = qs.validate()
        rep.add("quantum", "valid" if r.ok else f"{len(r.violations)} violation(s)")
        rep.validation += _validation_lines(r)
        return EXIT_OK if r.ok else EXIT_INVALID
    real = hilbert.as_scop(qs)
    if sub == "identity":
        worst, n = 0.0, 0
        for p in sorted(qs.states):
            x = qs.states[p]
            for name in sorted(qs.families):
                fam = qs.families[name]
                probs = {o.index: o.prob for o in hilbert.q_collapse(fam, x)}
                for i, m in enumerate(fam.parts):
                    worst = max(worst, abs(hilbert.q_weight(x, m) - probs.get(i, 0.0)))
                    n += 1
        rep.add("pairs checked", n)
        ok = worst < IDENTITY_TOL
        rep.add("weight = collapse probability", f"identity holds (max dev < {IDENTITY_TOL:g})" if ok else f"identity fails (max dev {worst:.3e})")
        return EXIT_OK if ok else EXIT_INVALID
    if not args.state or len(args.state) != 1:
        raise UsageError(f"quantum {sub} needs one --state")
    p = args.state[0]
    x = real.vector(p)
    if sub == "collapse":
        if not args.context or len(args.context) != 1:
            raise UsageError("quantum collapse needs one --context (a family)")
        e = args.context[0]
        fam = real.family(e)
        for o in hilbert.q_collapse(fam, x):
            rep.add(f"outcome {o.index} prob", o.prob)
            rep.add(f"outcome {o.index} state", _vec(o.collapsed))
            rep.add(f"outcome {o.index} weight", hilbert.q_weight(x, fam[o.index]))
        return EXIT_OK
    if sub == "weight":
        names = sorted(qs.properties) + [f"{f}[{i}]" for f in sorted(qs.families) for i in range(len(qs.families[f]))]
        for a in names:
            rep.add(f"nu({p}, {a})", real.weight(p, None, a))
        return EXIT_OK
    # project
    if not args.property:
        raise UsageError("quantum project needs --property")
    y = hilbert.project(real.property_subspace(args.property), x)
    rep.add(f"P_{args.property}({p})", _vec(y))
    return EXIT_OK


def _vec(v) -> str:
    return " ".join(f"({fmt(z.real)},{fmt(z.imag)})" for z in v)


COMMANDS = {
    "validate": cmd_validate,
    "distance": cmd_distance,
    "collapse": cmd_collapse,
    "petfish": cmd_petfish,
    "chsh": cmd_chsh,
    "quantum": cmd_quantum,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--file", help="SCOP definition / data document")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--seed", type=int, help="seed for stochastic commands (mandatory there)")
    common.add_argument("--state", action="append", help="state id (repeatable)")
    common.add_argument("--context", action="append", help="context id (repeatable)")

    parser = _Parser(prog="scop", description="State-context-property workbench")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("validate", parents=[common], help="validate every section of a document")
    d = sub.add_parser("distance", parents=[common], help="conceptual distances")
    d.add_argument("--measure", choices=MEASURES)
    d.add_argument("--profiles", help="feature-profile CSV")
    c = sub.add_parser("collapse", parents=[common], help="classify a couple and sample collapses")
    c.add_argument("--steps", type=int, default=0)
    sub.add_parser("petfish", parents=[common], help="Pet Fish analysis (bundled data by default)")
    sub.add_parser("chsh", parents=[common], help="CHSH value and classical feasibility")
    q = sub.add_parser("quantum", parents=[common], help="Hilbert-space operations")
    q.add_argument("subcommand", choices=QUANTUM_SUBCOMMANDS)
    q.add_argument("--property")
    return parser


def run(argv: list[str]) -> tuple[int, str]:
    """Run one command; returns ``(exit_code, output)`` without touching stdout."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    rep = RunReport(_echo(argv), seed=getattr(args, "seed", None))
    try:
        code = COMMANDS[args.command](args, rep)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    except ScopError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    rep.exit_code = code
    out = rep.render_structured() if args.format == "structured" else rep.render_text()
    return code, out


def main(argv: list[str] | None = None) -> int:
    code, out = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code != EXIT_USAGE else sys.stderr
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
