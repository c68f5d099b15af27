"""Observable dynamics: Hamilton equations at hbar = 0 and the deformed flow at hbar != 0.

The flow of an observable is ``df/dt = ub(f, H)``; with this order the
harmonic oscillator rotates as Hamilton's equations say (``dq/dt = dH/dp``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .brackets import lam_from_hbar, poisson_bracket, ub_bracket_poly
from .poly import LAMBDA_NAME, Poly, monomial_basis, parse_observable, phase_space_gens


class BlowUpError(FloatingPointError):
    """The state became non-finite."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite state at step {step} (t = {t:g})")
        self.step = step
        self.t = t


class TruncationRequiredError(ValueError):
    pass


@dataclass(frozen=True)
class HamiltonianSpec:
    H: Poly
    n: int = 1

    def __post_init__(self):
        gens = phase_space_gens(self.n)
        if self.H.gens != gens:
            if LAMBDA_NAME in self.H.gens and self.H.degree(LAMBDA_NAME) > 0:
                raise ValueError("a Hamiltonian cannot depend on the deformation parameter")
            object.__setattr__(self, "H", self.H.with_gens(gens))

    @classmethod
    def parse(cls, text: str, n: int = 1) -> "HamiltonianSpec":
        return cls(parse_observable(text, n, formal=False), n)

    @property
    def degree(self) -> int:
        return self.H.total_degree()

    @property
    def gens(self) -> tuple[str, ...]:
        return self.H.gens

    def is_separable(self) -> bool:
        """True when no monomial mixes positions and momenta."""
        n = self.n
        return all(not (any(e[:n]) and any(e[n:])) for e in self.H.terms)


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    states: Any
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.states):
            raise ValueError("times and states must have equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)

    @property
    def final(self):
        return self.states[-1]


class _Evaluator:
    """Vectorised float evaluation of a polynomial."""

    def __init__(self, poly: Poly):
        mons = list(poly.terms)
        self.exps = np.array(mons, dtype=np.int64).reshape(len(mons), poly.nvars)
        self.coeffs = np.array([float(poly.terms[m]) for m in mons], dtype=float)

    def __call__(self, z: np.ndarray) -> float:
        if not len(self.coeffs):
            return 0.0
        return float(self.coeffs @ np.prod(z[None, :] ** self.exps, axis=1))


def _steps(t_end: float, dt: float) -> list[float]:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    k = int(math.floor(t_end / dt + 1e-9))
    hs = [dt] * k
    rest = t_end - k * dt
    if rest > 1e-12 * t_end:
        hs.append(rest)
    return hs


def evolve_classical(
    H: HamiltonianSpec, q0, p0, t_end: float, dt: float, method: str = "rk4", record_every: int = 1
) -> TrajectoryRecord:
    """Integrate dq/dt = dH/dp, dp/dt = -dH/dq.

    ``method="rk4"`` is the classical fourth-order scheme; ``"leapfrog"``
    (kick-drift-kick, separable H only) is the symplectic cross-check.
    """
    n = H.n
    z = np.concatenate([np.atleast_1d(np.asarray(q0, float)), np.atleast_1d(np.asarray(p0, float))])
    if z.size != 2 * n:
        raise ValueError(f"initial state has {z.size} entries, expected {2 * n}")
    gens = H.gens
    dHdq = [_Evaluator(H.H.diff(g)) for g in gens[:n]]
    dHdp = [_Evaluator(H.H.diff(g)) for g in gens[n:]]
    energy = _Evaluator(H.H)

    def rhs(w):
        return np.array([f(w) for f in dHdp] + [-f(w) for f in dHdq])

    if method == "leapfrog" and not H.is_separable():
        raise ValueError("leapfrog needs a separable Hamiltonian")
    if method not in ("rk4", "leapfrog"):
        raise ValueError(f"unknown method {method!r}")

    times, states, energies = [0.0], [z.copy()], [energy(z)]
    t = 0.0
    for k, h in enumerate(_steps(t_end, dt), start=1):
        if method == "rk4":
            k1 = rhs(z)
            k2 = rhs(z + 0.5 * h * k1)
            k3 = rhs(z + 0.5 * h * k2)
            k4 = rhs(z + h * k3)
            z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            z = z.copy()
            z[n:] -= 0.5 * h * np.array([f(z) for f in dHdq])
            z[:n] += h * np.array([f(z) for f in dHdp])
            z[n:] -= 0.5 * h * np.array([f(z) for f in dHdq])
        t += h
        if not np.all(np.isfinite(z)):
            raise BlowUpError(k, t)
        if k % record_every == 0 or abs(t - t_end) <= 1e-12 * max(1.0, t_end):
            times.append(t)
            states.append(z.copy())
            energies.append(energy(z))
    energies = np.array(energies)
    meta = {
        "integrator": method,
        "dt": dt,
        "hbar": 0.0,
        "energy": energies,
        "energy_drift": float(np.max(np.abs(energies - energies[0]))),
    }
    return TrajectoryRecord(np.array(times), np.array(states), meta)


# -- coefficient-space flow -------------------------------------------------


def flow_matrix(H: HamiltonianSpec, basis: list, hbar: float | None) -> np.ndarray:
    """Matrix of f -> ub(f, H) on ``basis`` (exponent tuples); terms outside the basis are dropped.

    ``hbar=None`` or ``0`` gives the Poisson flow.
    """
    pos = {e: i for i, e in enumerate(basis)}
    M = np.zeros((len(basis), len(basis)))
    for j, e in enumerate(basis):
        m = Poly(H.gens, {e: 1})
        if hbar:
            img = ub_bracket_poly(m, H.H, lam_from_hbar(hbar))
        else:
            img = poisson_bracket(m, H.H)
        for ei, c in img.terms.items():
            i = pos.get(ei)
            if i is not None:
                M[i, j] += float(c)
    return M


def _basis_degree(H: HamiltonianSpec, f0: Poly, truncation: int | None) -> int:
    d0 = max(f0.total_degree(), 0)
    if H.degree <= 2:
        return d0 if truncation is None else max(d0, truncation)
    if truncation is None:
        raise TruncationRequiredError(
            f"deg H = {H.degree} > 2: the flow leaves every finite degree; pass a truncation degree"
        )
    if truncation < d0:
        raise ValueError(f"truncation {truncation} below the degree {d0} of the initial observable")
    return truncation


def _rk4_linear(M: np.ndarray, c0: np.ndarray, hs: list[float], record_every: int):
    c = c0.copy()
    times, coeffs = [0.0], [c.copy()]
    t = 0.0
    last = len(hs)
    for k, h in enumerate(hs, start=1):
        k1 = M @ c
        k2 = M @ (c + 0.5 * h * k1)
        k3 = M @ (c + 0.5 * h * k2)
        k4 = M @ (c + h * k3)
        c = c + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        if not np.all(np.isfinite(c)):
            raise BlowUpError(k, t)
        if k % record_every == 0 or k == last:
            times.append(t)
            coeffs.append(c.copy())
    return np.array(times), np.array(coeffs)


def evolve_observable_moyal(
    H: HamiltonianSpec,
    f0: Poly,
    hbar: float,
    t_end: float,
    dt: float,
    truncation: int | None = None,
    record_every: int = 1,
) -> TrajectoryRecord:
    """Evolve ``f0`` under df/dt = ub(f, H) with deformation ``hbar / (4 pi)``.

    For deg H <= 2 the flow preserves the degree of ``f0`` and is exact in
    coefficient space; otherwise ``truncation`` fixes the basis degree.
    States are polynomials; ``metadata["coefficients"]`` holds the raw array.
    """
    if f0.gens != H.gens:
        f0 = f0.with_gens(H.gens)
    D = _basis_degree(H, f0, truncation)
    basis = monomial_basis(H.gens, D)
    M = flow_matrix(H, basis, hbar)
    c0 = np.array([float(f0.coeff(e)) for e in basis])
    times, coeffs = _rk4_linear(M, c0, _steps(t_end, dt), record_every)
    states = [Poly(H.gens, {e: float(v) for e, v in zip(basis, row) if v != 0.0}) for row in coeffs]
    meta = {
        "integrator": "rk4",
        "dt": dt,
        "hbar": hbar,
        "basis": basis,
        "basis_degree": D,
        "coefficients": coeffs,
    }
    return TrajectoryRecord(times, states, meta)


@dataclass(frozen=True)
class GapTable:
    hbars: tuple
    gaps: tuple
    slope: float

    def rows(self):
        return list(zip(self.hbars, self.gaps))


def moyal_vs_poisson_gap(
    H: HamiltonianSpec,
    f0: Poly,
    hbar_list,
    t: float,
    dt: float = 1e-2,
    truncation: int | None = None,
) -> GapTable:
    """Coefficient-space distance at time ``t`` between the deformed and Poisson flows.

    The slope is the least-squares log-log fit over the nonzero gaps (``nan``
    when fewer than two are nonzero).
    """
    if f0.gens != H.gens:
        f0 = f0.with_gens(H.gens)
    D = _basis_degree(H, f0, truncation)
    basis = monomial_basis(H.gens, D)
    c0 = np.array([float(f0.coeff(e)) for e in basis])
    hs = _steps(t, dt)
    _, ref = _rk4_linear(flow_matrix(H, basis, 0.0), c0, hs, len(hs))
    gaps = []
    for hb in hbar_list:
        if hb == 0:
            gaps.append(0.0)
            continue
        _, cur = _rk4_linear(flow_matrix(H, basis, hb), c0, hs, len(hs))
        gaps.append(float(np.linalg.norm(cur[-1] - ref[-1])))
    pts = [(math.log(abs(h)), math.log(g)) for h, g in zip(hbar_list, gaps) if h and g > 0]
    slope = float(np.polyfit(*zip(*pts), 1)[0]) if len(pts) >= 2 else float("nan")
    return GapTable(tuple(hbar_list), tuple(gaps), slope)
