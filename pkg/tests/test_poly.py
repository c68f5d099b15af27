from fractions import Fraction

import pytest
import sympy

from pmechanics.poly import (
    LAMBDA_NAME,
    Poly,
    PolyParseError,
    canonical_pairs,
    monomial_basis,
    parse_observable,
    phase_space_gens,
)

GENS = ("q", "p")


def to_sympy(f: Poly):
    syms = sympy.symbols(f.gens)
    return sympy.expand(sum(sympy.nsimplify(c) * sympy.Mul(*[s**k for s, k in zip(syms, e)]) for e, c in f.terms.items()))


@pytest.mark.parametrize(
    "text",
    ["q^3 - 2*q*p + 1/3", "(q + p)^4", "q*(p - 1/2)^2 - 7", "-(q^2) + p^2/5", "3", "q**2 * p"],
)
def test_parse_matches_sympy(text):
    f = Poly.parse(text, GENS)
    q, p = sympy.symbols("q p")
    expected = sympy.expand(sympy.sympify(text.replace("^", "**"), locals={"q": q, "p": p}))
    assert sympy.simplify(to_sympy(f) - expected) == 0


def test_coefficients_are_exact():
    f = Poly.parse("q/3 + p/7", GENS)
    assert f.coeff((1, 0)) == Fraction(1, 3)
    assert f.coeff((0, 1)) == Fraction(1, 7)


@pytest.mark.parametrize("bad", ["q^^2", "z", "q^p", "q +", "sin(q)", "q^-1", "q/p", ""])
def test_parse_errors(bad):
    with pytest.raises(PolyParseError):
        Poly.parse(bad, GENS)


def test_arithmetic_against_sympy():
    f = Poly.parse("q^2 - p + 2", GENS)
    g = Poly.parse("q*p + 1/2", GENS)
    q, p = sympy.symbols("q p")
    for got, want in [
        (f + g, (q**2 - p + 2) + (q * p + sympy.Rational(1, 2))),
        (f - g, (q**2 - p + 2) - (q * p + sympy.Rational(1, 2))),
        (f * g, (q**2 - p + 2) * (q * p + sympy.Rational(1, 2))),
        (f**3, (q**2 - p + 2) ** 3),
    ]:
        assert sympy.expand(to_sympy(got) - want) == 0


def test_diff_and_degree():
    f = Poly.parse("q^3*p^2 + q", GENS)
    assert f.diff("q") == Poly.parse("3*q^2*p^2 + 1", GENS)
    assert f.diff("p").diff("p").diff("p").is_zero()
    assert f.total_degree() == 5
    assert f.degree("p") == 2
    assert Poly.zero(GENS).total_degree() < 0


def test_evaluation_and_subs():
    f = Poly.parse("q^2*p - 3", GENS)
    assert f(2, 5) == 17
    assert f.subs({"q": 2}) == Poly.parse("4*p - 3", GENS)


def test_with_gens_embeds_and_rejects():
    f = Poly.parse("q^2", ("q",))
    g = f.with_gens(GENS)
    assert g == Poly.parse("q^2", GENS)
    with pytest.raises(ValueError):
        Poly.parse("q*p", GENS).with_gens(("q",))


def test_grade_extracts_lambda_powers():
    gens = phase_space_gens(1, formal=True)
    assert LAMBDA_NAME in gens
    f = Poly.parse(f"q + 2*{LAMBDA_NAME}^2*p", gens)
    assert f.grade(LAMBDA_NAME, 2) == Poly.parse("2*p", gens)
    assert f.grade(LAMBDA_NAME, 0) == Poly.parse("q", gens)


def test_observable_aliases_for_higher_n():
    f = parse_observable("q1*p2 - q2*p1", 2, formal=False)
    assert f.gens == phase_space_gens(2)
    assert canonical_pairs(f.gens) == [(0, 2), (1, 3)]


def test_monomial_basis_counts():
    # number of monomials of degree <= d in m variables is C(m + d, d)
    assert len(monomial_basis(GENS, 4)) == 15
    assert len(monomial_basis(("a", "b", "c"), 3)) == 20


def test_str_roundtrip():
    f = Poly.parse("9*q^2*p^2 - 1/2*q + 4", GENS)
    assert Poly.parse(str(f), GENS) == f
