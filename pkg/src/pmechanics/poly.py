"""Sparse multivariate polynomials with exact (or arbitrary ring) coefficients.

A :class:`Poly` is a mapping from exponent tuples to coefficients over a fixed
tuple of generator names.  Coefficients may be ``int``/``Fraction`` (the exact
default), ``float``/``complex``, or any ring element supporting ``+``, ``*``
and comparison with ``0`` -- e.g. :class:`pmechanics.clifford.Multivector`.
Products keep the left/right order of coefficients, so noncommutative
coefficient rings are handled correctly.

Text input uses a plain monomial grammar::

    >>> Poly.parse("3*q^2*p - 1/2*lam^2", ("q", "p", "lam"))
    Poly('3*q^2*p - 1/2*lam^2', gens=('q', 'p', 'lam'))
"""

from __future__ import annotations

import ast
import numbers
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

Exps = tuple


class PolyParseError(ValueError):
    """Raised when polynomial text cannot be parsed."""


def _is_zero(c: Any) -> bool:
    try:
        return c == 0
    except Exception:  # pragma: no cover - exotic coefficient types
        return False


class Poly:
    """Immutable sparse polynomial over named generators."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: Sequence[str], terms: Mapping[Exps, Any] | None = None):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generator names in {gens}")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(gens):
                raise ValueError(f"exponent {exps} does not match gens {gens}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent {exps}")
            if not _is_zero(c):
                clean[exps] = c
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, gens: Sequence[str]) -> "Poly":
        return cls(gens)

    @classmethod
    def const(cls, gens: Sequence[str], c: Any) -> "Poly":
        return cls(gens, {(0,) * len(tuple(gens)): c})

    @classmethod
    def var(cls, gens: Sequence[str], name: str, coeff: Any = 1) -> "Poly":
        gens = tuple(gens)
        e = [0] * len(gens)
        e[gens.index(name)] = 1
        return cls(gens, {tuple(e): coeff})

    @classmethod
    def parse(cls, text: str, gens: Sequence[str], aliases: Mapping[str, str] | None = None) -> "Poly":
        """Parse ``text`` (``^`` or ``**`` for powers) into a polynomial over ``gens``."""
        gens = tuple(gens)
        aliases = dict(aliases or {})
        src = text.replace("^", "**").strip()
        if not src:
            raise PolyParseError("empty polynomial")
        try:
            tree = ast.parse(src, mode="eval")
        except SyntaxError as exc:
            raise PolyParseError(f"cannot parse {text!r}: {exc.msg}") from None

        def walk(node):
            if isinstance(node, ast.Expression):
                return walk(node.body)
            if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
                return cls.const(gens, Fraction(str(node.value)))
            if isinstance(node, ast.Name):
                name = aliases.get(node.id, node.id)
                if name not in gens:
                    raise PolyParseError(f"unknown variable {node.id!r}; expected one of {gens}")
                return cls.var(gens, name)
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                v = walk(node.operand)
                return -v if isinstance(node.op, ast.USub) else v
            if isinstance(node, ast.BinOp):
                left, right = walk(node.left), walk(node.right)
                if isinstance(node.op, ast.Add):
                    return left + right
                if isinstance(node.op, ast.Sub):
                    return left - right
                if isinstance(node.op, ast.Mult):
                    return left * right
                if isinstance(node.op, ast.Div):
                    if not right.is_constant() or right.constant_term() == 0:
                        raise PolyParseError("division only by nonzero numeric constants")
                    return left * (Fraction(1) / Fraction(right.constant_term()))
                if isinstance(node.op, ast.Pow):
                    if not right.is_constant():
                        raise PolyParseError("exponent must be a constant")
                    e = right.constant_term()
                    if Fraction(e).denominator != 1 or e < 0:
                        raise PolyParseError(f"exponent must be a nonnegative integer, got {e}")
                    return left ** int(e)
            raise PolyParseError(f"unsupported syntax in {text!r}: {ast.dump(node)[:60]}")

        return walk(tree)

    # -- inspection -------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.gens)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Any:
        return self.terms.get((0,) * self.nvars, 0)

    def total_degree(self, among: Iterable[str] | None = None) -> int:
        """Maximal total degree, optionally counting only generators ``among``."""
        if not self.terms:
            return -1
        idx = range(self.nvars) if among is None else [self.gens.index(g) for g in among]
        return max(sum(e[i] for i in idx) for e in self.terms)

    def degree(self, name: str) -> int:
        i = self.gens.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coeff(self, exps: Exps) -> Any:
        return self.terms.get(tuple(exps), 0)

    def monomials(self) -> list[Exps]:
        return sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.gens != self.gens:
                raise ValueError(f"generator mismatch: {self.gens} vs {other.gens}")
            return other
        return Poly.const(self.gens, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(self.gens, out)

    def __radd__(self, other):
        return self._coerce(other) + self

    def __neg__(self):
        return Poly(self.gens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.gens, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                v = ca * cb
                out[e] = out[e] + v if e in out else v
        return Poly(self.gens, out)

    def __rmul__(self, other):
        # scalar on the left; keeps coefficient order for noncommutative rings
        return Poly(self.gens, {e: other * c for e, c in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral) or k < 0:
            raise ValueError("power must be a nonnegative integer")
        result = Poly.const(self.gens, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            if other.gens != self.gens:
                return False
            return (self - other).is_zero()
        return (self - Poly.const(self.gens, other)).is_zero()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    # -- calculus / transforms --------------------------------------------

    def diff(self, name: str) -> "Poly":
        i = self.gens.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.gens, out)

    def map_coeffs(self, fn: Callable[[Any], Any]) -> "Poly":
        return Poly(self.gens, {e: fn(c) for e, c in self.terms.items()})

    def with_gens(self, gens: Sequence[str]) -> "Poly":
        """Re-express over ``gens`` (a superset, or a subset covering all used generators)."""
        gens = tuple(gens)
        pos = {g: i for i, g in enumerate(gens)}
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(gens)
            for g, k in zip(self.gens, e):
                if k:
                    if g not in pos:
                        raise ValueError(f"generator {g!r} in use, cannot drop it")
                    ne[pos[g]] = k
            out[tuple(ne)] = c
        return Poly(gens, out)

    def grade(self, name: str, k: int) -> "Poly":
        """Part of ``self`` with exactly ``name``**k, with that power removed."""
        i = self.gens.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                ne = list(e)
                ne[i] = 0
                out[tuple(ne)] = c
        return Poly(self.gens, out)

    def subs(self, values: Mapping[str, Any]) -> "Poly":
        """Substitute numbers for some generators; the generator set is kept."""
        idx = {self.gens.index(k): v for k, v in values.items()}
        out: dict = {}
        for e, c in self.terms.items():
            factor = 1
            ne = list(e)
            for i, v in idx.items():
                if e[i]:
                    factor = factor * v ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            v = c * factor
            out[ne] = out[ne] + v if ne in out else v
        return Poly(self.gens, out)

    def __call__(self, *args, **kwargs):
        """Evaluate at numbers or numpy arrays (positional in ``gens`` order, or by name)."""
        if args and kwargs:
            raise TypeError("pass values positionally or by name, not both")
        if kwargs:
            missing = [g for g in self.gens if g not in kwargs and self.degree(g) > 0]
            if missing:
                raise TypeError(f"missing values for {missing}")
            args = [kwargs.get(g, 0) for g in self.gens]
        if len(args) != self.nvars:
            raise TypeError(f"expected {self.nvars} values, got {len(args)}")
        total = 0
        for e, c in self.terms.items():
            term = c
            for a, k in zip(args, e):
                if k:
                    term = term * a**k
            total = total + term
        return total

    def to_float(self) -> "Poly":
        return self.map_coeffs(lambda c: complex(c) if isinstance(c, complex) else float(c))

    def coeff_norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.sqrt(sum(abs(complex(c)) ** 2 for c in self.terms.values())))

    # -- display ----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in self.monomials():
            c = self.terms[e]
            mono = "*".join(
                g if k == 1 else f"{g}^{k}" for g, k in zip(self.gens, e) if k
            )
            if isinstance(c, (int, Fraction, float)) and not isinstance(c, bool):
                sign = "-" if c < 0 else "+"
                mag = -c if c < 0 else c
                if mono and mag == 1:
                    body = mono
                else:
                    body = f"{mag}*{mono}" if mono else f"{mag}"
            else:
                sign, body = "+", (f"({c})*{mono}" if mono else f"({c})")
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, gens={self.gens})"


def phase_space_gens(n: int, formal: bool = False) -> tuple[str, ...]:
    """Generator names for ``n`` degrees of freedom: ``q, p`` or ``q1..qn, p1..pn``."""
    if n < 1:
        raise ValueError("need at least one degree of freedom")
    if n == 1:
        gens = ("q", "p")
    else:
        gens = tuple(f"q{j}" for j in range(1, n + 1)) + tuple(f"p{j}" for j in range(1, n + 1))
    return gens + (LAMBDA_NAME,) if formal else gens


LAMBDA_NAME = "lam"


def phase_space_aliases(n: int) -> dict[str, str]:
    return {"q1": "q", "p1": "p"} if n == 1 else {"q": "q1", "p": "p1"}


def parse_observable(text: str, n: int = 1, formal: bool = True) -> Poly:
    """Parse a phase-space observable; ``lam`` denotes the formal deformation parameter."""
    return Poly.parse(text, phase_space_gens(n, formal), phase_space_aliases(n))


def canonical_pairs(gens: Sequence[str]) -> list[tuple[int, int]]:
    """Indices of (q_j, p_j) generator pairs present in ``gens``."""
    gens = tuple(gens)
    if "q" in gens and "p" in gens:
        return [(gens.index("q"), gens.index("p"))]
    pairs = []
    j = 1
    while f"q{j}" in gens and f"p{j}" in gens:
        pairs.append((gens.index(f"q{j}"), gens.index(f"p{j}")))
        j += 1
    if not pairs:
        raise ValueError(f"no canonical (q, p) pairs among {gens}")
    return pairs


def monomial_basis(gens: Sequence[str], max_degree: int, among: Sequence[str] | None = None) -> list[Exps]:
    """All exponent tuples of total degree <= ``max_degree`` in generators ``among``."""
    gens = tuple(gens)
    among = tuple(gens if among is None else among)
    idx = [gens.index(g) for g in among]
    out: list[Exps] = []

    def rec(pos, left, cur):
        if pos == len(idx):
            e = [0] * len(gens)
            for i, k in zip(idx, cur):
                e[i] = k
            out.append(tuple(e))
            return
        for k in range(left + 1):
            rec(pos + 1, left - k, cur + [k])

    rec(0, max_degree, [])
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out
