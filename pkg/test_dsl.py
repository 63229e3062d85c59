"""
Tests for the specification text format and its printer.
"""
from fractions import Fraction

import pytest

from app.exceptions import ParseError, SemanticError
from app.models.mecs import Mecs
from app.models.smts import Smts
from app.services.dsl import format_smts, format_spec, parse_spec
from app.services.operators import compose
from conftest import act, delay

LOOP = """
smts L {
  initial s;
  must s -> t : delta@[1,2];
  may s -> t : delta@[0,inf];
  must t -> s : get;
  may t -> s : get;
}
"""


def test_fig1_file(fig1):
    assert sorted(fig1.names) == ["S", "S1", "S2", "T"]
    s = fig1.get("S")
    assert isinstance(s, Mecs)
    assert len(s.locations) == 3
    assert len(s.must) == 3
    assert len(s.may) == 4
    assert fig1.settings.timing == "urgent"
    assert fig1.settings.clock_cap == 6
    assert fig1.settings.step == Fraction(1)


def test_empty_file():
    spec = parse_spec("  # nothing here\n")
    assert spec.names == []
    assert format_spec(spec) == ""


def test_must_edges_imply_may_edges():
    spec = parse_spec("mecs A { initial q; must q -> r : grant [grant<=2]; }")
    a = spec.get("A")
    assert a.check_consistency() == []
    assert len(a.may) == 1


def test_smts_block():
    spec = parse_spec(LOOP)
    loop = spec.get("L")
    assert isinstance(loop, Smts)
    assert ("s", delay(1, 2), "t") in loop.must
    assert ("t", act("get"), "s") in loop.may


def test_fig1_round_trip(fig1, fig1_text):
    again = parse_spec(format_spec(fig1))
    assert again.mecs == fig1.mecs
    assert again.settings == fig1.settings


def test_smts_printing_is_stable():
    loop = parse_spec(LOOP).get("L")
    product = compose(loop, loop)
    text = format_smts("P", product)
    assert format_smts("P", parse_spec(text).get("P")) == text


@pytest.mark.parametrize("text", [
    "mecs A { initial q; must q -> r : a [a < 2]; }",
    "mecs A { initial q; must q -> r a; }",
    "smts L { initial s; must s -> t : delta; }",
    "settings { timing eventually; }",
    "graph G { }",
    "mecs A { initial q;",
])
def test_syntax_errors(text):
    with pytest.raises(ParseError) as info:
        parse_spec(text)
    assert info.value.line >= 1


@pytest.mark.parametrize("text", [
    "mecs A { must q -> r : a; }",
    "mecs A { alphabet a; initial q; must q -> r : a [b<=2]; }",
    "mecs A { alphabet a; initial q; must q -> r : b; }",
    "smts L { alphabet a; initial s; may s -> t : b; }",
    "mecs A { alphabet a, delta; initial q; }",
    "mecs A { initial q; must q -> r : a [a<=1 & a>=3]; }",
    "smts L { initial s; must s -> t : get@[1,2]; may s -> t : get@[1,2]; }",
    "smts L { initial s; must s -> t : delta@[0,2]; }",
    "mecs A { initial q; } mecs A { initial r; }",
])
def test_semantic_errors(text):
    with pytest.raises(SemanticError):
        parse_spec(text)


def test_error_positions():
    with pytest.raises(ParseError) as info:
        parse_spec("mecs A {\n  initial q;\n  must q -> r : a [a ? 2];\n}")
    assert info.value.line == 3
    assert info.value.column == 22
