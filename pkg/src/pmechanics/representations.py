"""Representations of H^n on sampled phase-space functions.

``rho_h`` is the Schroedinger-type representation on functions of (q, p)
with central character exp(-2 pi i hbar s); ``rho_classical`` the
one-dimensional representations at hbar = 0.  Sub-grid shifts are done by
Fourier phase ramps, which are exact for band-limited periodic data and
unitary on the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .grid import Axis, PhaseGrid, TwistedKernel, fft_workers
from .groups import HeisenbergElement, h_multiply

SCHEMES = ("spectral", "fd4", "fd2")


class TruncationError(ValueError):
    """A shift or kernel does not fit inside the lattice window."""


def _freq_mesh(axes) -> list[np.ndarray]:
    return np.meshgrid(*[a.frequencies() for a in axes], indexing="ij")


def fourier_shift(f: PhaseGrid, shifts) -> PhaseGrid:
    """Samples of ``f(v - shifts)`` (one shift per axis) via a phase ramp in frequency space."""
    shifts = [float(s) for s in shifts]
    for ax, a in zip(f.axes, shifts):
        if abs(a) > ax.length / 2:
            raise TruncationError(f"shift {a} exceeds half the window {ax.length}")
    F = sfft.fftn(f.samples, workers=fft_workers())
    phase = sum(nu * a for nu, a in zip(_freq_mesh(f.axes), shifts))
    return f.with_samples(sfft.ifftn(F * np.exp(-2j * math.pi * phase), workers=fft_workers()))


def _check_hbar(hbar) -> None:
    if hbar == 0:
        raise ValueError("hbar = 0: use rho_classical")


def rho_h(hbar: float, g: HeisenbergElement, f: PhaseGrid) -> PhaseGrid:
    """[rho_hbar(s, x, y) f](q, p) = exp(-2 pi i (hbar s + q x + p y)) f(q - hbar y/2, p + hbar x/2)."""
    _check_hbar(hbar)
    if g.n != f.n:
        raise ValueError(f"group element for n={g.n} acting on a grid with n={f.n}")
    x = [float(v) for v in g.x]
    y = [float(v) for v in g.y]
    shifted = fourier_shift(f, [hbar * v / 2 for v in y] + [-hbar * v / 2 for v in x])
    mesh = f.mesh()
    n = f.n
    expo = hbar * float(g.s) + sum(mesh[j] * x[j] + mesh[n + j] * y[j] for j in range(n))
    return f.with_samples(np.exp(-2j * math.pi * expo) * shifted.samples)


def rho_classical(qp, g: HeisenbergElement) -> complex:
    """One-dimensional representation at hbar = 0: exp(-2 pi i (q x + p y))."""
    q, p = qp
    q = np.atleast_1d(q)
    p = np.atleast_1d(p)
    phase = sum(float(a) * float(b) for a, b in zip(q, g.x)) + sum(float(a) * float(b) for a, b in zip(p, g.y))
    return complex(np.exp(-2j * math.pi * phase))


def homomorphism_defect(hbar: float, g1: HeisenbergElement, g2: HeisenbergElement, f: PhaseGrid) -> float:
    """|| rho(g1) rho(g2) f - rho(g1 g2) f || / || f ||."""
    lhs = rho_h(hbar, g1, rho_h(hbar, g2, f))
    rhs = rho_h(hbar, h_multiply(g1, g2), f)
    return (lhs - rhs).norm() / f.norm()


def edge_mass(f: PhaseGrid, width: int = 2) -> float:
    """Fraction of the L^2 mass in a border of ``width`` cells (a truncation indicator)."""
    s = np.abs(f.samples) ** 2
    inner = s[tuple(slice(width, -width) for _ in f.axes)].sum()
    total = s.sum()
    return float((total - inner) / total) if total else 0.0


# -- derivatives ------------------------------------------------------------


def derivative(f: PhaseGrid, axis: int, scheme: str = "spectral") -> np.ndarray:
    """Periodic derivative of the samples along ``axis``."""
    h = f.axes[axis].step
    s = f.samples
    if scheme == "spectral":
        nu = f.axes[axis].frequencies()
        if f.axes[axis].n % 2 == 0:
            nu = nu.copy()
            nu[f.axes[axis].n // 2] = 0.0
        shape = [1] * s.ndim
        shape[axis] = -1
        F = sfft.fft(s, axis=axis, workers=fft_workers())
        return sfft.ifft(F * (2j * math.pi * nu).reshape(shape), axis=axis, workers=fft_workers())
    if scheme == "fd4":
        return (
            -np.roll(s, -2, axis) + 8 * np.roll(s, -1, axis) - 8 * np.roll(s, 1, axis) + np.roll(s, 2, axis)
        ) / (12 * h)
    if scheme == "fd2":
        return (np.roll(s, -1, axis) - np.roll(s, 1, axis)) / (2 * h)
    raise ValueError(f"scheme must be one of {SCHEMES}")


@dataclass(frozen=True)
class DerivedOps:
    """Grid operators for the derived representation, with fixed coefficients.

    ``S = -2 pi i hbar I``, ``X_j = hbar d/dp_j + (i/2) q_j``,
    ``Y_j = -hbar d/dq_j + (i/2) p_j``.
    """

    hbar: float
    scheme: str = "spectral"

    def S(self, f: PhaseGrid) -> PhaseGrid:
        return f * (-2j * math.pi * self.hbar)

    def X(self, j: int, f: PhaseGrid) -> PhaseGrid:
        n = f.n
        q = f.mesh()[j]
        return f.with_samples(self.hbar * derivative(f, n + j, self.scheme) + 0.5j * q * f.samples)

    def Y(self, j: int, f: PhaseGrid) -> PhaseGrid:
        p = f.mesh()[f.n + j]
        return f.with_samples(-self.hbar * derivative(f, j, self.scheme) + 0.5j * p * f.samples)

    def commutator_XY(self, j: int, f: PhaseGrid) -> PhaseGrid:
        return self.X(j, self.Y(j, f)) - self.Y(j, self.X(j, f))


def derived_ops(hbar: float, scheme: str = "spectral") -> DerivedOps:
    _check_hbar(hbar)
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    return DerivedOps(hbar, scheme)


def commutator_constant(hbar: float, f: PhaseGrid, j: int = 0, scheme: str = "spectral") -> complex:
    """Least-squares ``c`` with ``[dX_j, dY_j] f = c * hbar * f``."""
    ops = derived_ops(hbar, scheme)
    lhs = ops.commutator_XY(j, f).samples.ravel()
    ref = f.samples.ravel() * hbar
    return complex(np.vdot(ref, lhs) / np.vdot(ref, ref))


# -- Fock space -------------------------------------------------------------


def dbar(hbar: float, j: int = 0, scheme: str = "spectral") -> Callable[[PhaseGrid], PhaseGrid]:
    """D^j = (hbar/2)(d/dp_j + i d/dq_j) + 2 pi (p_j + i q_j)."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")

    def apply(f: PhaseGrid) -> PhaseGrid:
        n = f.n
        if not 0 <= j < n:
            raise IndexError(f"dimension index {j} out of range for n={n}")
        mesh = f.mesh()
        q, p = mesh[j], mesh[n + j]
        d = 0.5 * hbar * (derivative(f, n + j, scheme) + 1j * derivative(f, j, scheme))
        return f.with_samples(d + 2 * math.pi * (p + 1j * q) * f.samples)

    return apply


def fock_residual(hbar: float, f: PhaseGrid, scheme: str = "spectral") -> float:
    """max_j of the discrete L^2 norm of D^j f (zero for Fock-space members)."""
    if hbar <= 0:
        raise ValueError("the Fock test needs hbar > 0")
    return max(dbar(hbar, j, scheme)(f).norm() for j in range(f.n))


def vacuum(axes, hbar: float) -> PhaseGrid:
    """exp(-2 pi (q^2 + p^2) / hbar)."""
    return PhaseGrid.from_function(
        axes, lambda *v: np.exp(-2 * math.pi * sum(c**2 for c in v) / hbar)
    )


def coherent_state(hbar: float, g: HeisenbergElement, axes) -> PhaseGrid:
    return rho_h(hbar, g, vacuum(axes, hbar))


# -- kernels ----------------------------------------------------------------


def rho_of_kernel(
    hbar: float, k: TwistedKernel, f: PhaseGrid, support_tol: float = 1e-12, drop_below: float = 1e-16
) -> PhaseGrid:
    """Trapezoidal quadrature of int k(hbar; x, y) rho_hbar(0, x, y) f dx dy.

    Only the partial Fourier transform ``k(hbar; ., .)`` enters.  Lattice
    entries smaller than ``drop_below`` times the largest are skipped.  Raises
    :class:`TruncationError` when the kernel has not decayed at the window edge.
    """
    _check_hbar(hbar)
    if k.hbar != hbar:
        raise ValueError(f"kernel carries hbar={k.hbar}, representation uses {hbar}")
    if f.n != 1:
        raise ValueError("kernels are implemented for one degree of freedom")
    if k.edge_ratio() > support_tol:
        raise TruncationError("kernel support exceeds the quadrature window")
    qax, pax = f.axes
    if abs(hbar) * max(k.y_axis.length, k.x_axis.length) / 4 > min(qax.length, pax.length) / 2:
        raise TruncationError("kernel window shifts beyond the phase-space window")
    F = sfft.fftn(f.samples, workers=fft_workers())
    nu_q, nu_p = _freq_mesh(f.axes)
    q, p = f.mesh()
    out = np.zeros_like(f.samples)
    xs, ys = k.x_axis.points, k.y_axis.points
    mag = np.abs(k.samples)
    keep = mag > drop_below * mag.max() if mag.size and mag.max() > 0 else mag > 0
    for i, j in zip(*np.nonzero(keep)):
        x, y = xs[i], ys[j]
        ramp = np.exp(-2j * math.pi * (nu_q * (hbar * y / 2) - nu_p * (hbar * x / 2)))
        shifted = sfft.ifftn(F * ramp, workers=fft_workers())
        out += k.samples[i, j] * np.exp(-2j * math.pi * (q * x + p * y)) * shifted
    return f.with_samples(out * k.cell)


def point_kernel(hbar: float, x_axis: Axis, y_axis: Axis, i: int, j: int) -> TwistedKernel:
    """Lattice delta at (x_i, y_j) with unit integral."""
    s = np.zeros((x_axis.n, y_axis.n), dtype=np.complex128)
    s[i, j] = 1.0 / (x_axis.step * y_axis.step)
    return TwistedKernel(hbar, x_axis, y_axis, s)
