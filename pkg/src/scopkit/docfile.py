"""Reading and writing SCOP definition documents, feature-profile CSVs and correlation tables.

A document is line oriented. ``[section]`` headers open a section, every other
non-blank line is one record: a keyword followed by whitespace-separated
tokens, double quotes for tokens with spaces, ``#`` starts a comment::

    [lattice]
    powerset swims flies          # or element/order/complement/bottom/top
    [states]
    state p "pet"
    [contexts]
    context e "name a pet"
    [kernel]
    e p e q 0.5                   # e p -> f q with probability
    [weights]
    p e {swims} 0.8               # state context property weight
    [quantum]
    dimension 2
    state psi (0.7071067811865476,0) (0.7071067811865476,0)
    vector up (1,0) (0,0)
    family z : up | down          # parts separated by '|'
    property spin_up up
    [petfish]
    mu e 0.05 "name a pet"
    profiles petfish_profiles.csv
    weights guppy rate_guppy
    [correlations]
    table A1 B1 0.25 0.25 0.25 0.25   # p(++) p(+-) p(-+) p(--)

Records keep their source line and column so errors can point at them.
"""

from __future__ import annotations

import csv
import hashlib
import io
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import EPS_FILE, ScopSystem
from .distances import FeatureProfile
from .errors import InvalidLatticeError, ParseError, ScopError
from .hilbert import QuantumScop, SpectralFamily, Subspace
from .lattice import PropertyLattice, powerset_lattice
from .nonclassicality import CorrelationData

SECTIONS = ("lattice", "states", "contexts", "kernel", "weights", "quantum", "petfish", "correlations")

_TOKEN_RE = re.compile(r'"(?P<q>[^"]*)"|(?P<w>[^\s"]+)')
_HEADER_RE = re.compile(r"^\[(?P<name>[a-z_]+)\]$")
_COMPLEX_RE = re.compile(r"^\(\s*(?P<re>[^,()]+)\s*,\s*(?P<im>[^,()]+)\s*\)$")


@dataclass(frozen=True)
class Token:
    text: str
    column: int
    quoted: bool = False


@dataclass(frozen=True)
class Record:
    line: int
    tokens: tuple[Token, ...]

    @property
    def keyword(self) -> str:
        return self.tokens[0].text

    @property
    def args(self) -> tuple[Token, ...]:
        return self.tokens[1:]


@dataclass
class PetfishData:
    mu: dict[str, float] = field(default_factory=dict)
    mu_labels: dict[str, str] = field(default_factory=dict)
    profiles_path: str | None = None
    weights: list[tuple[str, str]] = field(default_factory=list)
    stimulus: tuple[str, str] | None = None
    prototypes: dict[str, tuple[str, str]] = field(default_factory=dict)
    exemplars: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    profiles: dict[tuple[str, str], FeatureProfile] = field(default_factory=dict)


@dataclass
class ScopDocument:
    source: str = "<input>"
    lattice: PropertyLattice | None = None
    system: ScopSystem | None = None
    quantum: QuantumScop | None = None
    petfish: PetfishData | None = None
    correlations: CorrelationData | None = None
    sections: tuple[str, ...] = ()


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def tokenize(line: str, lineno: int, source: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(line):
        if line[pos].isspace():
            pos += 1
            continue
        if line[pos] == "#":
            break
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise ParseError("unterminated quoted string", lineno, pos + 1, source)
        if m["q"] is not None:
            out.append(Token(m["q"], pos + 1, True))
        else:
            out.append(Token(m["w"], pos + 1))
        pos = m.end()
    return out


def split_sections(text: str, source: str = "<input>") -> dict[str, list[Record]]:
    sections: dict[str, list[Record]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            col = raw.index("[") + 1
            body = stripped.split("#", 1)[0].strip()
            m = _HEADER_RE.match(body)
            if m is None:
                raise ParseError(f"malformed section header {body!r}", lineno, col, source)
            name = m["name"]
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno, col + 1, source)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", lineno, col, source)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ParseError("record outside of any section", lineno, raw.index(stripped[0]) + 1, source)
        toks = tokenize(raw, lineno, source)
        if toks:
            sections[current].append(Record(lineno, tuple(toks)))
    return sections


class _Ctx:
    def __init__(self, source):
        self.source = source

    def err(self, msg, rec: Record, tok: Token | None = None):
        col = tok.column if tok is not None else rec.tokens[0].column
        return ParseError(msg, rec.line, col, self.source)

    def nargs(self, rec, n, usage):
        if len(rec.args) not in (n if isinstance(n, tuple) else (n,)):
            raise self.err(f"expected: {rec.keyword} {usage}", rec)

    def number(self, rec, tok):
        try:
            return float(tok.text)
        except ValueError:
            raise self.err(f"not a number: {tok.text!r}", rec, tok) from None

    def integer(self, rec, tok):
        try:
            return int(tok.text)
        except ValueError:
            raise self.err(f"not an integer: {tok.text!r}", rec, tok) from None

    def complex(self, rec, tok):
        m = _COMPLEX_RE.match(tok.text)
        if m is None:
            raise self.err(f"expected a complex number written (re,im), got {tok.text!r}", rec, tok)
        try:
            return complex(float(m["re"]), float(m["im"]))
        except ValueError:
            raise self.err(f"bad complex number {tok.text!r}", rec, tok) from None


def _parse_lattice(records, ctx, validate):
    elements: list[str] = []
    labels: dict[str, str] = {}
    order: list[tuple[str, str]] = []
    explicit: dict[str, str] = {}
    bottom = top = None
    seen = set()
    for rec in records:
        kw = rec.keyword
        if kw == "powerset":
            base = powerset_lattice([t.text for t in rec.args], validate=False)
            for a in base.elements:
                if a not in seen:
                    elements.append(a)
                    seen.add(a)
            order.extend(base.order_pairs)
            for a, b in base.complement_map.items():
                explicit.setdefault(a, b)
            bottom = bottom or base.bottom
            top = top or base.top
        elif kw == "element":
            ctx.nargs(rec, (1, 2), "ID [LABEL]")
            a = rec.args[0].text
            if a in seen:
                raise ctx.err(f"duplicate element {a}", rec, rec.args[0])
            elements.append(a)
            seen.add(a)
            if len(rec.args) == 2:
                labels[a] = rec.args[1].text
        elif kw == "order":
            ctx.nargs(rec, 2, "LOWER UPPER")
            order.append((rec.args[0].text, rec.args[1].text))
        elif kw == "complement":
            ctx.nargs(rec, 2, "A COMPLEMENT_OF_A")
            a = rec.args[0].text
            if a in explicit:
                raise ctx.err(f"complement of {a} given twice", rec, rec.args[0])
            explicit[a] = rec.args[1].text
        elif kw in ("bottom", "top"):
            ctx.nargs(rec, 1, "ID")
            if kw == "bottom":
                bottom = rec.args[0].text
            else:
                top = rec.args[0].text
        else:
            raise ctx.err(f"unknown lattice record {kw!r}", rec)
        for tok in rec.args if kw in ("order", "complement", "bottom", "top") else ():
            if tok.text not in seen:
                raise ctx.err(f"unknown lattice element {tok.text!r}", rec, tok)
    if not elements:
        raise ParseError("lattice section declares no elements", None, None, ctx.source)
    if bottom is None or top is None:
        line = records[0].line if records else None
        raise ParseError("lattice section needs both bottom and top records", line, 1, ctx.source)
    comp = dict(explicit)
    for a, b in explicit.items():
        comp.setdefault(b, a)
    try:
        return PropertyLattice(elements, order, comp, bottom, top, labels=labels, validate=validate)
    except InvalidLatticeError as exc:
        raise ParseError(f"invalid lattice: {exc.report.summary()}", records[0].line, 1, ctx.source) from exc


def _parse_registry(records, ctx, kw_expected):
    out: dict[str, str] = {}
    for rec in records:
        if rec.keyword != kw_expected:
            raise ctx.err(f"expected a {kw_expected!r} record", rec)
        ctx.nargs(rec, (1, 2), "ID [LABEL]")
        name = rec.args[0].text
        if name in out:
            raise ctx.err(f"duplicate {kw_expected} {name}", rec, rec.args[0])
        out[name] = rec.args[1].text if len(rec.args) == 2 else name
    return out


def _parse_kernel(records, ctx):
    rows = []
    seen = set()
    for rec in records:
        if len(rec.tokens) != 5:
            raise ctx.err("kernel record must be: E P F Q PROB", rec)
        e, p, f, q = (t.text for t in rec.tokens[:4])
        if (e, p, f, q) in seen:
            raise ctx.err(f"duplicate kernel entry ({e}, {p}) -> ({f}, {q})", rec)
        seen.add((e, p, f, q))
        rows.append((e, p, f, q, ctx.number(rec, rec.tokens[4])))
    return rows


def _parse_weights(records, ctx):
    rows = []
    seen = set()
    for rec in records:
        if len(rec.tokens) != 4:
            raise ctx.err("weight record must be: P E A WEIGHT", rec)
        p, e, a = (t.text for t in rec.tokens[:3])
        if (p, e, a) in seen:
            raise ctx.err(f"duplicate weight ({p}, {e}, {a})", rec)
        seen.add((p, e, a))
        rows.append((p, e, a, ctx.number(rec, rec.tokens[3])))
    return rows


def _parse_quantum(records, ctx):
    dim = None
    states: dict[str, np.ndarray] = {}
    vectors: dict[str, np.ndarray] = {}
    fam_recs = []
    prop_recs = []
    for rec in records:
        kw = rec.keyword
        if kw == "dimension":
            ctx.nargs(rec, 1, "N")
            dim = ctx.integer(rec, rec.args[0])
            if not 1 <= dim <= 64:
                raise ctx.err("dimension must be between 1 and 64", rec, rec.args[0])
        elif kw in ("state", "vector"):
            if dim is None:
                raise ctx.err("dimension must come before vectors", rec)
            if len(rec.args) != dim + 1:
                raise ctx.err(f"{kw} needs a name and {dim} components", rec)
            name = rec.args[0].text
            if name in states or name in vectors:
                raise ctx.err(f"duplicate vector name {name}", rec, rec.args[0])
            v = np.array([ctx.complex(rec, t) for t in rec.args[1:]], dtype=complex)
            (states if kw == "state" else vectors)[name] = v
        elif kw == "family":
            fam_recs.append(rec)
        elif kw == "property":
            prop_recs.append(rec)
        else:
            raise ctx.err(f"unknown quantum record {kw!r}", rec)
    if dim is None:
        raise ParseError("quantum section needs a dimension record", records[0].line if records else None, 1, ctx.source)
    known = {**vectors, **states}

    def subspace(rec, toks):
        vs = []
        for t in toks:
            if t.text not in known:
                raise ctx.err(f"unknown vector {t.text!r}", rec, t)
            vs.append(known[t.text])
        try:
            return Subspace(dim, vs)
        except ScopError as exc:
            raise ctx.err(f"bad subspace: {exc}", rec, toks[0] if toks else None) from None

    families = {}
    for rec in fam_recs:
        if len(rec.args) < 3 or rec.args[1].text != ":":
            raise ctx.err("family record must be: family NAME : V ... | V ...", rec)
        name = rec.args[0].text
        if name in families:
            raise ctx.err(f"duplicate family {name}", rec, rec.args[0])
        parts, cur = [], []
        for t in rec.args[2:]:
            if t.text == "|":
                parts.append(cur)
                cur = []
            else:
                cur.append(t)
        parts.append(cur)
        if any(not p for p in parts):
            raise ctx.err("empty family part", rec)
        families[name] = SpectralFamily([subspace(rec, p) for p in parts], dim)
    properties = {}
    for rec in prop_recs:
        if len(rec.args) < 1:
            raise ctx.err("property record must be: property NAME V ...", rec)
        name = rec.args[0].text
        if name in properties:
            raise ctx.err(f"duplicate property {name}", rec, rec.args[0])
        properties[name] = subspace(rec, rec.args[1:])
    return QuantumScop(dim, states, families, properties)


def _parse_petfish(records, ctx):
    pf = PetfishData()
    for rec in records:
        kw, a = rec.keyword, rec.args
        if kw == "mu":
            ctx.nargs(rec, (2, 3), "CONTEXT PROB [LABEL]")
            pf.mu[a[0].text] = ctx.number(rec, a[1])
            if len(a) == 3:
                pf.mu_labels[a[0].text] = a[2].text
        elif kw == "profiles":
            ctx.nargs(rec, 1, "CSV_PATH")
            pf.profiles_path = a[0].text
        elif kw == "weights":
            ctx.nargs(rec, 2, "STATE CONTEXT")
            pf.weights.append((a[0].text, a[1].text))
        elif kw == "stimulus":
            ctx.nargs(rec, 2, "STATE CONTEXT")
            pf.stimulus = (a[0].text, a[1].text)
        elif kw == "prototype":
            ctx.nargs(rec, 3, "CONCEPT STATE CONTEXT")
            pf.prototypes[a[0].text] = (a[1].text, a[2].text)
        elif kw == "exemplar":
            ctx.nargs(rec, 3, "CONCEPT STATE CONTEXT")
            pf.exemplars.setdefault(a[0].text, []).append((a[1].text, a[2].text))
        else:
            raise ctx.err(f"unknown petfish record {kw!r}", rec)
    return pf


def _parse_correlations(records, ctx):
    tables = np.full((2, 2, 2, 2), np.nan)
    for rec in records:
        if rec.keyword != "table" or len(rec.args) != 6:
            raise ctx.err("correlation record must be: table A1|A2 B1|B2 P++ P+- P-+ P--", rec)
        sa, sb = rec.args[0].text, rec.args[1].text
        if sa not in ("A1", "A2"):
            raise ctx.err("first setting must be A1 or A2", rec, rec.args[0])
        if sb not in ("B1", "B2"):
            raise ctx.err("second setting must be B1 or B2", rec, rec.args[1])
        i, j = int(sa[1]) - 1, int(sb[1]) - 1
        if not np.isnan(tables[i, j]).all():
            raise ctx.err(f"table {sa} {sb} given twice", rec)
        vals = [ctx.number(rec, t) for t in rec.args[2:]]
        tables[i, j] = np.array(vals).reshape(2, 2)
    if np.isnan(tables).any():
        raise ParseError("correlations need all four tables A1/A2 x B1/B2", records[-1].line if records else None, 1, ctx.source)
    return CorrelationData(tables)


def parse_document(text: str, source: str = "<input>", base_dir: Path | None = None, validate: bool = True) -> ScopDocument:
    """Parse document text.

    With ``validate=True`` the lattice is validated eagerly (an invalid one is
    a parse error). Kernel and weight checks are left to
    :func:`scopkit.core.validate_scop`, which reports rather than raises.
    """
    ctx = _Ctx(source)
    secs = split_sections(text, source)
    doc = ScopDocument(source=source, sections=tuple(secs))
    if "lattice" in secs:
        doc.lattice = _parse_lattice(secs["lattice"], ctx, validate)
    tabular = [s for s in ("states", "contexts", "kernel", "weights") if s in secs]
    if tabular:
        states = _parse_registry(secs.get("states", []), ctx, "state")
        contexts = _parse_registry(secs.get("contexts", []), ctx, "context")
        kernel = _parse_kernel(secs.get("kernel", []), ctx)
        weights = _parse_weights(secs.get("weights", []), ctx)
        doc.system = ScopSystem.build(states, contexts, doc.lattice, kernel, weights, tolerance=EPS_FILE)
    if "quantum" in secs:
        doc.quantum = _parse_quantum(secs["quantum"], ctx)
    if "petfish" in secs:
        doc.petfish = _parse_petfish(secs["petfish"], ctx)
        if doc.petfish.profiles_path is not None:
            path = Path(doc.petfish.profiles_path)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            doc.petfish.profiles = load_profiles(path)
    if "correlations" in secs:
        doc.correlations = _parse_correlations(secs["correlations"], ctx)
    return doc


def load_document(path, validate: bool = True) -> ScopDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", source=path.name) from None
    return parse_document(text, source=path.name, base_dir=path.parent, validate=validate)


# feature-profile CSV


def parse_profiles(text: str, source: str = "<csv>") -> dict[tuple[str, str], FeatureProfile]:
    """Rows of ``state,context,<feature values...>`` under a ``state,context,<features...>`` header."""
    reader = csv.reader(io.StringIO(text))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty profile file", 1, 1, source)
    hline, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 3 or header[0] != "state" or header[1] != "context":
        raise ParseError("header must be: state,context,<feature>,...", hline, 1, source)
    feats = header[2:]
    if len(set(feats)) != len(feats):
        raise ParseError("duplicate feature column", hline, 3, source)
    out = {}
    for n, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", n, 1, source)
        key = (row[0].strip(), row[1].strip())
        if key in out:
            raise ParseError(f"duplicate row for {key}", n, 1, source)
        vals = []
        for k, cell in enumerate(row[2:], start=3):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", n, k, source) from None
            if not 0.0 <= v <= 1.0:
                raise ParseError(f"value {v} outside [0, 1]", n, k, source)
            vals.append(v)
        out[key] = FeatureProfile(feats, vals)
    return out


def load_profiles(path) -> dict[tuple[str, str], FeatureProfile]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", source=path.name) from None
    return parse_profiles(text, source=path.name)


def dump_profiles(profiles: Mapping[tuple[str, str], FeatureProfile]) -> str:
    items = sorted(profiles.items())
    feats = items[0][1].features if items else ()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "context", *feats])
    for (s, c), prof in items:
        if prof.features != feats:
            raise ValueError("all profiles must share one feature list")
        w.writerow([s, c, *(repr(v) for v in prof.values)])
    return buf.getvalue()


# serialization


def _q(s: str) -> str:
    return f'"{s}"' if (not s or any(ch.isspace() for ch in s) or "#" in s or '"' in s) else s


def _c(z: complex) -> str:
    return f"({float(z.real)!r},{float(z.imag)!r})"


def dump_document(doc: ScopDocument) -> str:
    """Serialize in canonical order; :func:`parse_document` reads it back to an equivalent document."""
    out: list[str] = []
    lat = doc.lattice
    if lat is not None:
        out.append("[lattice]")
        for a in lat.elements:
            lab = lat.label(a)
            out.append(f"element {_q(a)}" + (f" {_q(lab)}" if lab != a else ""))
        for a, b in sorted(set(lat.order_pairs)):
            out.append(f"order {_q(a)} {_q(b)}")
        for a, b in sorted(lat.complement_map.items()):
            out.append(f"complement {_q(a)} {_q(b)}")
        out.append(f"bottom {_q(lat.bottom)}")
        out.append(f"top {_q(lat.top)}")
        out.append("")
    s = doc.system
    if s is not None:
        out.append("[states]")
        for p in sorted(s.states):
            lab = s.states[p]
            out.append(f"state {_q(p)}" + (f" {_q(lab)}" if lab != p else ""))
        out.append("")
        out.append("[contexts]")
        for e in sorted(s.contexts):
            lab = s.contexts[e]
            out.append(f"context {_q(e)}" + (f" {_q(lab)}" if lab != e else ""))
        out.append("")
        out.append("[kernel]")
        for (e, p) in sorted(s.kernel):
            for (f, q), prob in s.kernel[(e, p)]:
                out.append(f"{_q(e)} {_q(p)} {_q(f)} {_q(q)} {prob!r}")
        out.append("")
        if s.weights:
            out.append("[weights]")
            for (p, e, a), w in sorted(s.weights.items()):
                out.append(f"{_q(p)} {_q(e)} {_q(a)} {w!r}")
            out.append("")
    qs = doc.quantum
    if qs is not None:
        out.append("[quantum]")
        out.append(f"dimension {qs.dimension}")
        for name in sorted(qs.states):
            out.append(f"state {name} " + " ".join(_c(z) for z in qs.states[name]))
        for kind, table in (("family", qs.families), ("property", qs.properties)):
            for name in sorted(table):
                parts = table[name].parts if kind == "family" else [table[name]]
                refs = []
                for i, m in enumerate(parts):
                    names = []
                    for k, v in enumerate(m.vectors()):
                        vname = f"_{kind}.{name}.{i}.{k}"
                        out.append(f"vector {vname} " + " ".join(_c(z) for z in v))
                        names.append(vname)
                    refs.append(" ".join(names))
                if kind == "family":
                    out.append(f"family {name} : " + " | ".join(refs))
                else:
                    out.append(f"property {name} {refs[0]}".rstrip())
        out.append("")
    pf = doc.petfish
    if pf is not None:
        out.append("[petfish]")
        for e, m in pf.mu.items():
            out.append(f"mu {_q(e)} {m!r}" + (f" {_q(pf.mu_labels[e])}" if e in pf.mu_labels else ""))
        if pf.profiles_path:
            out.append(f"profiles {_q(pf.profiles_path)}")
        for st, cx in pf.weights:
            out.append(f"weights {_q(st)} {_q(cx)}")
        if pf.stimulus:
            out.append(f"stimulus {_q(pf.stimulus[0])} {_q(pf.stimulus[1])}")
        for concept, (st, cx) in pf.prototypes.items():
            out.append(f"prototype {_q(concept)} {_q(st)} {_q(cx)}")
        for concept, rows in pf.exemplars.items():
            for st, cx in rows:
                out.append(f"exemplar {_q(concept)} {_q(st)} {_q(cx)}")
        out.append("")
    cd = doc.correlations
    if cd is not None:
        out.append("[correlations]")
        for i in range(2):
            for j in range(2):
                vals = " ".join(repr(float(v)) for v in cd.tables[i, j].reshape(4))
                out.append(f"table A{i + 1} B{j + 1} {vals}")
        out.append("")
    return "\n".join(out)
