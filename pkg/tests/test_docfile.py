import numpy as np
import pytest

from conftest import FIXTURES
from scopkit.docfile import dump_document, dump_profiles, load_document, parse_document, parse_profiles, split_sections
from scopkit.errors import ParseError

BUNDLED = ["example.scop", "petfish.scop", "quantum.scop", "random_quantum.scop", "classical_chsh.scop", "singlet_chsh.scop"]


@pytest.mark.parametrize("name", BUNDLED)
def test_round_trip(data, name):
    doc = load_document(data(name))
    text = dump_document(doc)
    again = parse_document(text, base_dir=data(name).parent)
    assert dump_document(again) == text
    if doc.system is not None:
        assert again.system == doc.system
    if doc.lattice is not None:
        assert again.lattice.elements == doc.lattice.elements
        assert np.array_equal(again.lattice._leq, doc.lattice._leq)
    if doc.quantum is not None:
        for k, v in doc.quantum.states.items():
            assert np.allclose(again.quantum.states[k], v, atol=0)
        for k, fam in doc.quantum.families.items():
            for m1, m2 in zip(fam.parts, again.quantum.families[k].parts):
                assert np.allclose(m1.projector, m2.projector, atol=1e-12)
    if doc.correlations is not None:
        assert np.array_equal(again.correlations.tables, doc.correlations.tables)


def test_profiles_round_trip(data):
    doc = load_document(data("petfish.scop"))
    text = dump_profiles(doc.petfish.profiles)
    assert parse_profiles(text) == doc.petfish.profiles


def test_malformed_header_location():
    with pytest.raises(ParseError) as info:
        load_document(FIXTURES / "malformed_header.scop")
    err = info.value
    assert (err.line, err.column) == (37, 1)
    assert str(err).startswith("malformed_header.scop:37:1:")


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("[states]\nstate p\n[states]\n", 3, 1, "duplicate section"),
        ("[bogus]\n", 1, 2, "unknown section"),
        ("state p\n", 1, 1, "outside"),
        ("[states]\nstate p\n[contexts]\ncontext e\n[kernel]\ne p e p zero\n", 6, 9, "number"),
        ("[correlations]\ntable A3 B1 1 0 0 0\n", 2, 7, "A1 or A2"),
        ('[states]\nstate "unterminated\n', 2, 7, ""),
    ],
)
def test_parse_errors_carry_location(text, line, col, fragment):
    with pytest.raises(ParseError) as info:
        parse_document(text, source="t.scop")
    assert (info.value.line, info.value.column) == (line, col)
    assert fragment in str(info.value)


def test_invalid_lattice_is_a_parse_error():
    text = "[lattice]\nelement 0\nelement a\nelement 1\norder 0 a\norder a 1\ncomplement 0 1\ncomplement a a\nbottom 0\ntop 1\n"
    with pytest.raises(ParseError, match="meet-complement"):
        parse_document(text)
    doc = parse_document(text, validate=False)
    assert not doc.lattice.validate().ok


def test_comments_and_quotes():
    secs = split_sections('# header\n[states]\nstate p "a # not a comment" # comment\n')
    (rec,) = secs["states"]
    assert [t.text for t in rec.tokens] == ["state", "p", "a # not a comment"]


def test_powerset_shorthand():
    doc = parse_document("[lattice]\npowerset x y\n")
    assert len(doc.lattice) == 4 and doc.lattice.top == "{x,y}"


def test_missing_file():
    with pytest.raises(ParseError, match="cannot read"):
        load_document("/nonexistent/x.scop")
