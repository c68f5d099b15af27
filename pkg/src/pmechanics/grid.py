"""Sampled phase-space functions and group kernels on uniform periodic lattices.

Axes are half-open windows ``[lo, hi)`` with ``n`` points.  Fourier pairs use
centred axes (index ``n // 2`` sits at the origin) with conjugate steps
``dq * dx = 1 / n``, so the discrete transforms below are exact DFTs.
"""

from __future__ import annotations

import csv
import json
import os
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft as sfft

MAGIC = b"PMGRID\x01"


def fft_workers() -> int:
    """Thread count for FFTs, from ``PMECH_THREADS`` (default 1 for bit-reproducibility)."""
    try:
        return max(1, int(os.environ.get("PMECH_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("an axis needs at least two points")
        if not self.hi > self.lo:
            raise ValueError(f"empty axis window [{self.lo}, {self.hi})")

    @classmethod
    def centered(cls, n: int, step: float) -> "Axis":
        lo = -(n // 2) * step
        return cls(lo, lo + n * step, n)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``"lo,hi,N"`` as used by the ``--grid`` flag."""
        try:
            lo, hi, n = text.split(",")
            return cls(float(lo), float(hi), int(n))
        except ValueError as exc:
            raise ValueError(f"bad axis spec {text!r}; expected lo,hi,N") from exc

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / self.n

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def points(self) -> np.ndarray:
        return self.lo + self.step * np.arange(self.n)

    @property
    def is_centered(self) -> bool:
        return abs(self.lo + (self.n // 2) * self.step) <= 1e-12 * max(1.0, abs(self.step))

    def conjugate(self) -> "Axis":
        """Centred Fourier-dual axis with step ``1 / (n * step)``."""
        return Axis.centered(self.n, 1.0 / (self.n * self.step))

    def frequencies(self) -> np.ndarray:
        return sfft.fftfreq(self.n, d=self.step)


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Complex samples of f(q_1..q_n, p_1..p_n) on a product lattice.

    ``axes`` lists the q axes first, then the p axes.
    """

    axes: tuple
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) % 2 or not axes:
            raise ValueError("need an even, nonzero number of axes (q's then p's)")
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != tuple(a.n for a in axes):
            raise ValueError(f"sample shape {samples.shape} does not match axes")
        if not np.all(np.isfinite(samples)):
            raise ValueError("grid samples must be finite")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return len(self.axes) // 2

    @property
    def cell(self) -> float:
        return float(np.prod([a.step for a in self.axes]))

    @classmethod
    def from_function(cls, axes: Sequence[Axis], fn) -> "PhaseGrid":
        return cls(tuple(axes), fn(*np.meshgrid(*[a.points for a in axes], indexing="ij")))

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[a.points for a in self.axes], indexing="ij")

    def with_samples(self, samples) -> "PhaseGrid":
        return PhaseGrid(self.axes, samples)

    def norm(self) -> float:
        """Discrete L^2 norm."""
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.cell))

    def __add__(self, other: "PhaseGrid") -> "PhaseGrid":
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "PhaseGrid") -> "PhaseGrid":
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, c) -> "PhaseGrid":
        return self.with_samples(self.samples * c)

    __rmul__ = __mul__

    # -- serialization ----------------------------------------------------

    def column_names(self) -> list[str]:
        if self.n == 1:
            return ["q", "p"]
        return [f"q{j}" for j in range(1, self.n + 1)] + [f"p{j}" for j in range(1, self.n + 1)]

    def to_csv(self, path) -> None:
        """Columnar text: one row per lattice point, coordinates then Re f, Im f."""
        mesh = self.mesh()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.column_names() + ["re", "im"])
            cols = [m.ravel() for m in mesh]
            vals = self.samples.ravel()
            for i in range(vals.size):
                w.writerow([repr(float(c[i])) for c in cols] + [repr(float(vals[i].real)), repr(float(vals[i].imag))])

    @classmethod
    def from_csv(cls, path) -> "PhaseGrid":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], np.array(rows[1:], dtype=np.float64)
        ncoord = len(header) - 2
        axes = []
        for k in range(ncoord):
            pts = np.unique(body[:, k])
            step = (pts[-1] - pts[0]) / (len(pts) - 1)
            axes.append(Axis(float(pts[0]), float(pts[0] + len(pts) * step), len(pts)))
        shape = tuple(a.n for a in axes)
        samples = (body[:, -2] + 1j * body[:, -1]).reshape(shape)
        return cls(tuple(axes), samples)

    def to_binary(self, path, extra: dict | None = None) -> None:
        header = {
            "kind": "phase_grid",
            "n": self.n,
            "axes": [[a.lo, a.hi, a.n] for a in self.axes],
            "dtype": "complex128",
            "order": "C",
        }
        header.update(extra or {})
        write_binary(path, header, self.samples)

    @classmethod
    def from_binary(cls, path) -> "PhaseGrid":
        header, data = read_binary(path)
        axes = tuple(Axis(*a) for a in header["axes"])
        return cls(axes, data.reshape(tuple(a.n for a in axes)))


def write_binary(path, header: dict, data: np.ndarray) -> None:
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(data, dtype="<c16").tobytes())


def read_binary(path) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise ValueError(f"{path}: not a pmechanics grid file")
        (size,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(size))
        data = np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
    return header, data


@dataclass(frozen=True, eq=False)
class TwistedKernel:
    """Partial Fourier transform k_s(hbar; x, y) of a kernel on H^1, on a centred (x, y) lattice."""

    hbar: float
    x_axis: Axis
    y_axis: Axis
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.x_axis.n, self.y_axis.n):
            raise ValueError("kernel samples do not match the lattice")
        if not (self.x_axis.is_centered and self.y_axis.is_centered):
            raise ValueError("twisted kernels live on centred lattices")
        if not np.all(np.isfinite(samples)):
            raise ValueError("kernel samples must be finite")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def cell(self) -> float:
        return self.x_axis.step * self.y_axis.step

    def with_samples(self, samples) -> "TwistedKernel":
        return TwistedKernel(self.hbar, self.x_axis, self.y_axis, samples)

    def same_lattice(self, other: "TwistedKernel") -> bool:
        return self.x_axis == other.x_axis and self.y_axis == other.y_axis

    def edge_ratio(self) -> float:
        """Largest modulus on the lattice boundary relative to the global maximum."""
        s = np.abs(self.samples)
        top = s.max()
        if top == 0:
            return 0.0
        edge = max(s[0].max(), s[-1].max(), s[:, 0].max(), s[:, -1].max())
        return float(edge / top)

    def __add__(self, other):
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, c):
        return self.with_samples(self.samples * c)

    __rmul__ = __mul__

    def to_binary(self, path) -> None:
        header = {
            "kind": "twisted_kernel",
            "hbar": self.hbar,
            "axes": [[a.lo, a.hi, a.n] for a in (self.x_axis, self.y_axis)],
            "dtype": "complex128",
            "order": "C",
        }
        write_binary(path, header, self.samples)

    @classmethod
    def from_binary(cls, path) -> "TwistedKernel":
        header, data = read_binary(path)
        xa, ya = (Axis(*a) for a in header["axes"])
        return cls(header["hbar"], xa, ya, data.reshape(xa.n, ya.n))


# alias used by the representation layer
KernelOnGroup = TwistedKernel


def symbol_to_kernel(symbol: PhaseGrid, hbar: float) -> TwistedKernel:
    """k(x, y) = integral a(q, p) exp(+2 pi i (q x + p y)) dq dp via a centred DFT."""
    if symbol.n != 1:
        raise ValueError("kernel transforms are implemented for one degree of freedom")
    qa, pa = symbol.axes
    if not (qa.is_centered and pa.is_centered):
        raise ValueError("symbol grid must be centred")
    a = sfft.ifftshift(symbol.samples)
    k = sfft.fftshift(sfft.ifft2(a, workers=fft_workers())) * (qa.n * pa.n * qa.step * pa.step)
    return TwistedKernel(hbar, qa.conjugate(), pa.conjugate(), k)


def kernel_to_symbol(kernel: TwistedKernel) -> PhaseGrid:
    """a(q, p) = integral k(x, y) exp(-2 pi i (q x + p y)) dx dy; inverse of :func:`symbol_to_kernel`."""
    k = sfft.ifftshift(kernel.samples)
    a = sfft.fftshift(sfft.fft2(k, workers=fft_workers())) * kernel.cell
    return PhaseGrid((kernel.x_axis.conjugate(), kernel.y_axis.conjugate()), a)
