"""Heisenberg group H^n and Galilean group G^{n+1}: group laws, coadjoint orbits, Lie algebras.

Coordinates are exponential coordinates, so the algebra and the group share
them.  All arithmetic is generic: ``Fraction`` inputs stay exact, floats stay
floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence, Union

import numpy as np


class DimensionMismatchError(ValueError):
    pass


def _vec(v) -> tuple:
    if isinstance(v, (int, float, Fraction, complex)) or np.isscalar(v):
        return (v,)
    return tuple(v)


def symplectic_form(x: Sequence, y: Sequence, x2: Sequence, y2: Sequence) -> Any:
    """omega(x, y; x', y') = x . y' - x' . y."""
    x, y, x2, y2 = _vec(x), _vec(y), _vec(x2), _vec(y2)
    if not len(x) == len(y) == len(x2) == len(y2):
        raise DimensionMismatchError("symplectic_form: vector lengths differ")
    if not x:
        return 0
    total = x[0] * y2[0] - x2[0] * y[0]
    for j in range(1, len(x)):
        total += x[j] * y2[j] - x2[j] * y[j]
    return total


@dataclass(frozen=True)
class HeisenbergElement:
    """Point (s, x, y) of H^n with s scalar and x, y of length n."""

    s: Any
    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", _vec(self.x))
        object.__setattr__(self, "y", _vec(self.y))
        if len(self.x) != len(self.y) or not self.x:
            raise DimensionMismatchError("x and y must have the same positive length")

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, n: int) -> "HeisenbergElement":
        return cls(Fraction(0), (Fraction(0),) * n, (Fraction(0),) * n)

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return h_multiply(self, other)

    def inverse(self) -> "HeisenbergElement":
        return h_inverse(self)


@dataclass(frozen=True)
class GalileanElement:
    """Point (s, x, y) of G^{n+1}: s and y of length n+1, x a scalar."""

    s: tuple
    x: Any
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "s", _vec(self.s))
        object.__setattr__(self, "y", _vec(self.y))
        if len(self.s) != len(self.y) or not self.s:
            raise DimensionMismatchError("s and y must have the same positive length")

    @property
    def dim(self) -> int:
        """Spacetime dimension n+1."""
        return len(self.s)

    @classmethod
    def identity(cls, dim: int) -> "GalileanElement":
        z = (Fraction(0),) * dim
        return cls(z, Fraction(0), z)

    def __mul__(self, other: "GalileanElement") -> "GalileanElement":
        return g_multiply(self, other)

    def inverse(self) -> "GalileanElement":
        return g_inverse(self)


def h_multiply(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    if g.n != h.n:
        raise DimensionMismatchError(f"H^{g.n} times H^{h.n}")
    half = Fraction(1, 2)
    s = g.s + h.s + half * symplectic_form(g.x, g.y, h.x, h.y)
    return HeisenbergElement(
        s,
        tuple(a + b for a, b in zip(g.x, h.x)),
        tuple(a + b for a, b in zip(g.y, h.y)),
    )


def h_inverse(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-g.s, tuple(-a for a in g.x), tuple(-a for a in g.y))


def g_multiply(g: GalileanElement, h: GalileanElement) -> GalileanElement:
    if g.dim != h.dim:
        raise DimensionMismatchError(f"G^{g.dim} times G^{h.dim}")
    half = Fraction(1, 2)
    s = tuple(
        sm + hm + half * symplectic_form(g.x, ym, h.x, hym)
        for sm, hm, ym, hym in zip(g.s, h.s, g.y, h.y)
    )
    return GalileanElement(s, g.x + h.x, tuple(a + b for a, b in zip(g.y, h.y)))


def g_inverse(g: GalileanElement) -> GalileanElement:
    return GalileanElement(tuple(-a for a in g.s), -g.x, tuple(-a for a in g.y))


# -- coadjoint orbits -------------------------------------------------------


@dataclass(frozen=True)
class CoadjointPoint:
    """(hbar, q, p) in the dual of the Heisenberg Lie algebra."""

    hbar: Any
    q: tuple
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", _vec(self.q))
        object.__setattr__(self, "p", _vec(self.p))
        if len(self.q) != len(self.p):
            raise DimensionMismatchError("q and p must have the same length")


@dataclass(frozen=True)
class Plane:
    """Orbit O_hbar = {(hbar, q, p)}: a copy of R^{2n}."""

    hbar: Any


@dataclass(frozen=True)
class Point:
    """Single-point orbit O_(q,p) at hbar = 0."""

    q: tuple
    p: tuple


OrbitTag = Union[Plane, Point]


def coadjoint(g: HeisenbergElement, F: CoadjointPoint) -> CoadjointPoint:
    """(hbar, q, p) -> (hbar, q + hbar*y, p - hbar*x)."""
    if g.n != len(F.q):
        raise DimensionMismatchError("group element and coadjoint point differ in n")
    return CoadjointPoint(
        F.hbar,
        tuple(q + F.hbar * y for q, y in zip(F.q, g.y)),
        tuple(p - F.hbar * x for p, x in zip(F.p, g.x)),
    )


def classify_orbit(F: CoadjointPoint) -> OrbitTag:
    if F.hbar != 0:
        return Plane(F.hbar)
    return Point(F.q, F.p)


# -- Lie algebras -----------------------------------------------------------


def heisenberg_basis(n: int) -> list[str]:
    return ["S"] + [f"X{j}" for j in range(1, n + 1)] + [f"Y{j}" for j in range(1, n + 1)]


def galilean_basis(dim: int) -> list[str]:
    return [f"S{mu}" for mu in range(dim)] + ["X"] + [f"Y{mu}" for mu in range(dim)]


def algebra_commutators(n: int, group: str = "heisenberg") -> dict[tuple[str, str], dict[str, int]]:
    """Nonzero structure constants ``{(A, B): {C: c}}`` meaning [A, B] = sum c*C.

    ``group="heisenberg"``: [X_i, Y_j] = delta_ij S on h^n.
    ``group="galilean"``: [X, Y_mu] = S_mu with ``n`` the spacetime dimension n+1.
    Only pairs (A, B) in basis order with A before B are listed; the rest follow
    by antisymmetry.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table: dict[tuple[str, str], dict[str, int]] = {}
    if group == "heisenberg":
        for j in range(1, n + 1):
            table[(f"X{j}", f"Y{j}")] = {"S": 1}
    elif group == "galilean":
        for mu in range(n):
            table[("X", f"Y{mu}")] = {f"S{mu}": 1}
    else:
        raise ValueError(f"unknown group {group!r}")
    return table


def matrix_realization(n: int, group: str = "heisenberg") -> dict[str, np.ndarray]:
    """Faithful strictly upper-triangular matrices for the basis vector fields.

    Heisenberg (size n+2): X_j = E_{0,j}, Y_j = E_{j,n+1}, S = E_{0,n+1}.
    Galilean with spacetime dimension ``n`` (size n+2): X = E_{0,1},
    Y_mu = E_{1,mu+2}, S_mu = E_{0,mu+2}.
    """
    size = n + 2

    def E(i, j):
        m = np.zeros((size, size), dtype=object)
        m[:, :] = Fraction(0)
        m[i, j] = Fraction(1)
        return m

    if group == "heisenberg":
        mats = {"S": E(0, n + 1)}
        for j in range(1, n + 1):
            mats[f"X{j}"] = E(0, j)
            mats[f"Y{j}"] = E(j, n + 1)
        return mats
    if group == "galilean":
        mats = {"X": E(0, 1)}
        for mu in range(n):
            mats[f"S{mu}"] = E(0, mu + 2)
            mats[f"Y{mu}"] = E(1, mu + 2)
        return mats
    raise ValueError(f"unknown group {group!r}")


def matrix_commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a.dot(b) - b.dot(a)


def decompose(m: np.ndarray, basis: dict[str, np.ndarray]) -> dict[str, Any]:
    """Coordinates of ``m`` in a basis of matrix units (each basis matrix has one unit entry)."""
    out = {}
    rest = m.copy()
    for name, bm in basis.items():
        (i,), (j,) = np.nonzero(bm != 0)
        c = rest[i, j]
        if c != 0:
            out[name] = c
            rest[i, j] = Fraction(0)
    if any(v != 0 for v in rest.flat):
        raise ValueError("matrix not in the span of the basis")
    return out


def structure_constants_from_matrices(n: int, group: str = "heisenberg") -> dict[tuple[str, str], dict[str, Any]]:
    """Recompute the commutator table from :func:`matrix_realization`."""
    mats = matrix_realization(n, group)
    names = heisenberg_basis(n) if group == "heisenberg" else galilean_basis(n)
    table = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            c = decompose(matrix_commutator(mats[a], mats[b]), mats)
            if c:
                table[(a, b)] = c
    return table


def exp_matrix(element, group: str = "heisenberg") -> np.ndarray:
    """exp of the algebra element with the same coordinates (A^3 = 0, so I + A + A^2/2)."""
    if group == "heisenberg":
        n = element.n
        mats = matrix_realization(n, group)
        A = element.s * mats["S"]
        for j in range(1, n + 1):
            A = A + element.x[j - 1] * mats[f"X{j}"] + element.y[j - 1] * mats[f"Y{j}"]
    else:
        n = element.dim
        mats = matrix_realization(n, group)
        A = element.x * mats["X"]
        for mu in range(n):
            A = A + element.s[mu] * mats[f"S{mu}"] + element.y[mu] * mats[f"Y{mu}"]
    size = A.shape[0]
    I = np.zeros((size, size), dtype=object)
    I[:, :] = Fraction(0)
    for i in range(size):
        I[i, i] = Fraction(1)
    return I + A + A.dot(A) * Fraction(1, 2)


def log_matrix(M: np.ndarray, n: int, group: str = "heisenberg"):
    """Inverse of :func:`exp_matrix` on unipotent matrices of the realization."""
    size = M.shape[0]
    N = M.copy()
    for i in range(size):
        N[i, i] = N[i, i] - 1
    A = N - N.dot(N) * Fraction(1, 2)
    coords = decompose(A, matrix_realization(n, group))
    z = Fraction(0)
    if group == "heisenberg":
        return HeisenbergElement(
            coords.get("S", z),
            tuple(coords.get(f"X{j}", z) for j in range(1, n + 1)),
            tuple(coords.get(f"Y{j}", z) for j in range(1, n + 1)),
        )
    return GalileanElement(
        tuple(coords.get(f"S{mu}", z) for mu in range(n)),
        coords.get("X", z),
        tuple(coords.get(f"Y{mu}", z) for mu in range(n)),
    )
