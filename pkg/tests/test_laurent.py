from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from specnet.laurent import LaurentPoly, parse_laurent, solve_rational

GENS = ("s_1", "s_2", "s_3")


def gen(name):
    return LaurentPoly.generator(GENS, name)


def test_basic_arithmetic():
    s1, s2 = gen("s_1"), gen("s_2")
    p = s1 * s2 - 1
    q = p * p
    assert q == s1 ** 2 * s2 ** 2 - 2 * s1 * s2 + 1


def test_inverse_and_units():
    s1 = gen("s_1")
    assert (s1 ** -3) * s1 ** 3 == 1
    assert not (s1 + 1).is_unit_monomial()
    with pytest.raises(ValueError):
        (s1 + 1).inverse()


def test_parse_round_trip():
    text = "s_2 - 1/s_1 - 1/s_3 + 1/(s_3^2*s_2)"
    p = parse_laurent(text, GENS)
    s1, s2, s3 = (gen(g) for g in GENS)
    assert p == s2 - s1 ** -1 - s3 ** -1 + s3 ** -2 * s2 ** -1
    assert parse_laurent(str(p), GENS) == p


def test_canonical_string_is_sorted():
    p = parse_laurent("1/s_1 + s_1 + s_2^2", GENS)
    assert str(p) == "s_2^2 + s_1 + s_1^-1"


@st.composite
def laurents(draw):
    terms = {}
    for _ in range(draw(st.integers(0, 5))):
        mon = tuple(draw(st.integers(-3, 3)) for _ in GENS)
        terms[mon] = draw(st.integers(-9, 9))
    return LaurentPoly(GENS, terms)


@given(laurents(), laurents(), laurents())
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a


@given(laurents())
def test_string_parse_round_trip(p):
    assert parse_laurent(str(p), GENS) == p


def test_solve_rational():
    sol = solve_rational([[2, 0], [0, 4]], [1, 2])
    assert sol == [Fraction(1, 2), Fraction(1, 2)]
    assert solve_rational([[1, 1], [1, 1]], [0, 1]) is None
    sol = solve_rational([[1, 1]], [3])  # underdetermined: free var -> 0
    assert sol == [Fraction(3), Fraction(0)]
