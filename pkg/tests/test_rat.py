from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from efd.rat import fmt_rat, parse_rat


def test_parse_plain_forms():
    assert parse_rat("1/2") == Fraction(1, 2)
    assert parse_rat("-3/6") == Fraction(-1, 2)
    assert parse_rat("7") == Fraction(7)
    assert parse_rat(4) == Fraction(4)
    assert parse_rat(" 2/4 ") == Fraction(1, 2)


def test_fmt_always_carries_slash():
    assert fmt_rat(Fraction(0)) == "0/1"
    assert fmt_rat(Fraction(3)) == "3/1"
    assert fmt_rat(Fraction(-1, 2)) == "-1/2"
    assert fmt_rat(Fraction(2, 4)) == "1/2"


@pytest.mark.parametrize("bad", ["1/0", "1/-2", "a/b", "1.5", ""])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_rat(bad)


def test_parse_rejects_floats_and_bools():
    with pytest.raises(ValueError):
        parse_rat(1.5)  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        parse_rat(True)  # type: ignore[arg-type]


@given(st.fractions())
def test_round_trip(q: Fraction):
    assert parse_rat(fmt_rat(q)) == q
