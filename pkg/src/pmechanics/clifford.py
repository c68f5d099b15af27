"""Clifford algebra over a diagonal metric of arbitrary signature.

Basis blades are encoded as bitmasks (bit ``mu`` set <=> generator ``e^mu``
present) and kept in ascending index order; the reordering sign comes from
transposition parity.  Coefficients are exact ``Fraction`` by default but any
commutative scalar ring works (floats, complex, sympy expressions).

Two normalizations of the generator relation are supported:

``"standard"``  e^mu e^nu + e^nu e^mu = 2 eta^{mu nu}, so (e^mu)^2 = eta^{mu mu}
``"literal"``   e^mu e^nu + e^nu e^mu = eta^{mu nu},   so (e^mu)^2 = eta^{mu mu} / 2
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

CONVENTIONS = ("standard", "literal")


class MetricMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Metric:
    """Diagonal metric ``eta = diag(diag)`` together with the generator normalization."""

    diag: tuple
    convention: str = "standard"

    def __post_init__(self):
        diag = tuple(Fraction(d) if not isinstance(d, float) else d for d in self.diag)
        if len(diag) < 1:
            raise ValueError("metric dimension must be >= 1")
        if any(d == 0 for d in diag):
            raise ValueError(f"diagonal metric entries must be nonzero: {self.diag}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        object.__setattr__(self, "diag", diag)

    @classmethod
    def from_signature(cls, p: int, q: int, convention: str = "standard") -> "Metric":
        """``p`` entries ``+1`` followed by ``q`` entries ``-1``."""
        return cls((1,) * p + (-1,) * q, convention)

    @property
    def dim(self) -> int:
        return len(self.diag)

    def square(self, mu: int) -> Any:
        """Value of (e^mu)^2 under the chosen normalization."""
        d = self.diag[mu]
        return d if self.convention == "standard" else d / 2

    def lower(self, mu: int) -> Any:
        """eta_{mu mu} = 1 / eta^{mu mu}."""
        return 1 / self.diag[mu]


def reorder_sign(a: int, b: int) -> int:
    """Sign of bringing the product of ascending blades ``a`` and ``b`` into ascending order."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def blade_table(metric: Metric) -> tuple[np.ndarray, tuple[tuple[Any, ...], ...]]:
    """Product table: ``index[a, b] = a ^ b`` and exact ``factor[a][b]`` (sign times metric squares)."""
    n = 1 << metric.dim
    index = np.empty((n, n), dtype=np.intp)
    factor = []
    for a in range(n):
        row = []
        for b in range(n):
            index[a, b] = a ^ b
            f = Fraction(reorder_sign(a, b)) if not any(isinstance(d, float) for d in metric.diag) else float(reorder_sign(a, b))
            common = a & b
            mu = 0
            while common:
                if common & 1:
                    f = f * metric.square(mu)
                common >>= 1
                mu += 1
            row.append(f)
        factor.append(tuple(row))
    return index, tuple(factor)


@lru_cache(maxsize=None)
def dense_table(metric: Metric) -> tuple[np.ndarray, np.ndarray]:
    """Float version of :func:`blade_table` for the array kernels."""
    index, factor = blade_table(metric)
    return index, np.array([[float(f) for f in row] for row in factor], dtype=np.float64)


def _blade_bits(blade: int | Iterable[int], dim: int) -> int:
    if isinstance(blade, (int, np.integer)):
        bits = int(blade)
    else:
        idx = list(blade)
        if len(set(idx)) != len(idx):
            raise ValueError(f"repeated index in blade {idx}")
        bits = 0
        for mu in idx:
            if not 0 <= mu < dim:
                raise IndexError(f"blade index {mu} out of range for dim {dim}")
            bits |= 1 << mu
    if not 0 <= bits < (1 << dim):
        raise IndexError(f"blade {blade} out of range for dim {dim}")
    return bits


def bits_to_indices(bits: int) -> tuple[int, ...]:
    return tuple(mu for mu in range(bits.bit_length()) if bits >> mu & 1)


class Multivector:
    """Immutable element of the Clifford algebra of ``metric``.

    ``coeffs`` maps blade bitmasks to scalar coefficients; zero entries are
    dropped so equality is structural.
    """

    __slots__ = ("metric", "_c")

    def __init__(self, metric: Metric, coeffs: Mapping[int, Any] | None = None):
        c = {}
        for blade, v in (coeffs or {}).items():
            bits = _blade_bits(blade, metric.dim)
            if bits in c:
                v = c[bits] + v
            c[bits] = v
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "_c", {k: v for k, v in c.items() if not _zero(v)})

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @classmethod
    def scalar(cls, metric: Metric, value: Any) -> "Multivector":
        return cls(metric, {0: value})

    @classmethod
    def from_blades(cls, metric: Metric, blades: Mapping[tuple[int, ...], Any]) -> "Multivector":
        """Build from index-subset keys, e.g. ``{(): 1, (0, 1): 2}``.

        Unordered subsets are reordered with the appropriate sign.
        """
        out: dict = {}
        for idx, v in blades.items():
            idx = tuple(idx)
            bits = _blade_bits(idx, metric.dim)
            # sign of sorting the index list into ascending order
            inv = sum(1 for i in range(len(idx)) for j in range(i + 1, len(idx)) if idx[i] > idx[j])
            v = -v if inv & 1 else v
            out[bits] = out[bits] + v if bits in out else v
        return cls(metric, out)

    @property
    def coeffs(self) -> dict[int, Any]:
        return dict(self._c)

    def blades(self) -> dict[tuple[int, ...], Any]:
        return {bits_to_indices(b): v for b, v in sorted(self._c.items())}

    def __getitem__(self, blade) -> Any:
        return self._c.get(_blade_bits(blade, self.metric.dim), 0)

    def scalar_part(self) -> Any:
        return self._c.get(0, 0)

    def grade(self, k: int) -> "Multivector":
        return Multivector(self.metric, {b: v for b, v in self._c.items() if bin(b).count("1") == k})

    def is_scalar(self) -> bool:
        return all(b == 0 for b in self._c)

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        out = np.zeros(1 << self.metric.dim, dtype=dtype)
        for b, v in self._c.items():
            out[b] = v
        return out

    @classmethod
    def from_dense(cls, metric: Metric, values: Sequence[Any]) -> "Multivector":
        if len(values) != 1 << metric.dim:
            raise ValueError("dense vector has wrong length")
        return cls(metric, {b: v for b, v in enumerate(values)})

    def map(self, fn) -> "Multivector":
        return Multivector(self.metric, {b: fn(v) for b, v in self._c.items()})

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Multivector"):
        if other.metric != self.metric:
            raise MetricMismatchError(f"metric mismatch: {self.metric} vs {other.metric}")

    def _lift(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            self._check(other)
            return other
        return Multivector.scalar(self.metric, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._c)
        for b, v in other._c.items():
            out[b] = out[b] + v if b in out else v
        return Multivector(self.metric, out)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.metric, {b: -v for b, v in self._c.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Multivector):
            return Multivector(self.metric, {b: v * other for b, v in self._c.items()})
        return geometric_product(self, other)

    def __rmul__(self, other):
        return Multivector(self.metric, {b: other * v for b, v in self._c.items()})

    def __truediv__(self, other):
        if isinstance(other, Multivector):
            raise TypeError("division by a multivector is not supported")
        if isinstance(other, int):
            other = Fraction(other)
        return Multivector(self.metric, {b: v / other for b, v in self._c.items()})

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return self.metric == other.metric and (self - other)._c == {}
        try:
            return (self - Multivector.scalar(self.metric, other))._c == {}
        except TypeError:
            return NotImplemented

    __hash__ = None

    def __repr__(self):
        if not self._c:
            return "Multivector(0)"
        parts = []
        for b, v in sorted(self._c.items()):
            name = "1" if b == 0 else "e" + "".join(str(mu) for mu in bits_to_indices(b))
            parts.append(f"{v}*{name}")
        return "Multivector(" + " + ".join(parts) + ")"


def _zero(v) -> bool:
    try:
        return v == 0
    except Exception:  # pragma: no cover
        return False


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    """Clifford product of two multivectors over the same metric."""
    if a.metric != b.metric:
        raise MetricMismatchError(f"metric mismatch: {a.metric} vs {b.metric}")
    index, factor = blade_table(a.metric)
    out: dict = {}
    for ba, va in a._c.items():
        frow = factor[ba]
        for bb, vb in b._c.items():
            r = ba ^ bb
            v = frow[bb] * va * vb
            out[r] = out[r] + v if r in out else v
    return Multivector(a.metric, out)


def generator(metric: Metric, mu: int) -> Multivector:
    """The grade-1 blade e^mu."""
    if not 0 <= mu < metric.dim:
        raise IndexError(f"generator index {mu} out of range for dim {metric.dim}")
    return Multivector(metric, {1 << mu: Fraction(1)})


def lower_index(metric: Metric, mu: int) -> Multivector:
    """e_mu = eta_{mu mu} e^mu for a diagonal metric."""
    if not 0 <= mu < metric.dim:
        raise IndexError(f"generator index {mu} out of range for dim {metric.dim}")
    return Multivector(metric, {1 << mu: metric.lower(mu)})


def anticommutator(a: Multivector, b: Multivector) -> Multivector:
    return a * b + b * a


def anticommutator_table(metric: Metric) -> list[list[Multivector]]:
    """``table[mu][nu] = e^mu e^nu + e^nu e^mu``."""
    gens = [generator(metric, mu) for mu in range(metric.dim)]
    return [[anticommutator(a, b) for b in gens] for a in gens]


def expected_anticommutator(metric: Metric, mu: int, nu: int) -> Any:
    """Scalar the generator relation prescribes for ``{e^mu, e^nu}``."""
    if mu != nu:
        return 0
    return 2 * metric.square(mu)


def dense_product(a: np.ndarray, b: np.ndarray, metric: Metric) -> np.ndarray:
    """Geometric product of stacked dense multivectors (shape ``(..., 2**dim)``)."""
    from ._kernels import clifford_product_dense

    index, factor = dense_table(metric)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    shape = np.broadcast_shapes(a.shape, b.shape)
    a2 = np.ascontiguousarray(np.broadcast_to(a, shape).reshape(-1, shape[-1]))
    b2 = np.ascontiguousarray(np.broadcast_to(b, shape).reshape(-1, shape[-1]))
    return clifford_product_dense(a2, b2, index, factor).reshape(shape)
