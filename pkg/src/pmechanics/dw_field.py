"""Covariant (De Donder-Weyl) field theory for one scalar field.

Variables: the field ``q`` and, on the Lagrangian side, velocities ``v_mu``
standing for ``d_mu q``; on the Hamiltonian side polymomenta ``p^mu``.
Polynomials use the generator names ``("q", "v0", ...)`` and
``("q", "p0", ...)``.

The lattice integrator treats ``u^0`` as time for Hamiltonians of the form
``H = a0/2 (p^0)^2 + a1/2 (p^1)^2 + m^2/2 q^2`` (hyperbolic when a0/a1 < 0).
``p^1`` lives on half-sites so that ``d_1 q = a1 p^1`` holds exactly on the
lattice; ``p^0`` is staggered in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
import sympy

from ._kernels import kg_leapfrog
from .brackets import antiderivative, antiderivative_multiplier
from .clifford import Metric, MetricMismatchError, Multivector, dense_product, generator, lower_index
from .dynamics import BlowUpError, HamiltonianSpec, evolve_classical
from .poly import Poly


class DegenerateKineticError(ValueError):
    """The kinetic (Hessian) form is singular or not constant."""


class CFLViolationError(ValueError):
    pass


def lagrangian_gens(dim: int) -> tuple[str, ...]:
    return ("q",) + tuple(f"v{mu}" for mu in range(dim))


def dw_gens(dim: int) -> tuple[str, ...]:
    return ("q",) + tuple(f"p{mu}" for mu in range(dim))


@dataclass(frozen=True)
class LagrangianSpec:
    L: Poly
    metric: Metric

    def __post_init__(self):
        if self.L.gens != lagrangian_gens(self.metric.dim):
            object.__setattr__(self, "L", self.L.with_gens(lagrangian_gens(self.metric.dim)))

    @classmethod
    def parse(cls, text: str, metric: Metric) -> "LagrangianSpec":
        return cls(Poly.parse(text, lagrangian_gens(metric.dim)), metric)


@dataclass(frozen=True)
class DWHamiltonian:
    H: Poly
    metric: Metric

    def __post_init__(self):
        if self.H.gens != dw_gens(self.metric.dim):
            object.__setattr__(self, "H", self.H.with_gens(dw_gens(self.metric.dim)))

    @classmethod
    def parse(cls, text: str, metric: Metric) -> "DWHamiltonian":
        return cls(Poly.parse(text, dw_gens(metric.dim)), metric)

    @property
    def dim(self) -> int:
        return self.metric.dim


def free_scalar_lagrangian(metric: Metric, mass) -> LagrangianSpec:
    """L = 1/2 eta^{mu mu} v_mu^2 - 1/2 m^2 q^2."""
    gens = lagrangian_gens(metric.dim)
    m2 = Fraction(mass) ** 2 if not isinstance(mass, float) else mass**2
    L = Poly.var(gens, "q") ** 2 * (-m2 / 2)
    for mu in range(metric.dim):
        L = L + Poly.var(gens, f"v{mu}") ** 2 * (metric.diag[mu] / 2)
    return LagrangianSpec(L, metric)


def free_scalar_hamiltonian(metric: Metric, mass) -> DWHamiltonian:
    """H = 1/2 eta_{mu mu} (p^mu)^2 + 1/2 m^2 q^2."""
    gens = dw_gens(metric.dim)
    m2 = Fraction(mass) ** 2 if not isinstance(mass, float) else mass**2
    H = Poly.var(gens, "q") ** 2 * (m2 / 2)
    for mu in range(metric.dim):
        H = H + Poly.var(gens, f"p{mu}") ** 2 * (metric.lower(mu) / 2)
    return DWHamiltonian(H, metric)


# -- Legendre transform -----------------------------------------------------


def _compose(F: Poly, mapping: dict[str, Poly], gens: tuple[str, ...]) -> Poly:
    """Substitute polynomials (over ``gens``) for the generators of ``F``."""
    out = Poly.zero(gens)
    images = [mapping[g] for g in F.gens]
    for e, c in F.terms.items():
        term = Poly.const(gens, c)
        for img, k in zip(images, e):
            if k:
                term = term * img**k
        out = out + term
    return out


def _to_fraction(x) -> Fraction:
    x = sympy.nsimplify(x)
    return Fraction(int(x.p), int(x.q))


def _legendre(F: Poly, src: tuple[str, ...], dst: tuple[str, ...]):
    """Legendre transform of ``F`` in the variables ``src[1:]`` (``src[0]`` is the spectator q).

    Returns ``(conjugates over src, inverse map over dst, transformed over dst)``.
    """
    names = src[1:]
    if F.total_degree(among=names) > 2:
        raise DegenerateKineticError("only quadratic dependence on the transformed variables is supported")
    dim = len(names)
    K = sympy.zeros(dim, dim)
    for a, na in enumerate(names):
        for b, nb in enumerate(names):
            d2 = F.diff(na).diff(nb)
            if not d2.is_constant():
                raise DegenerateKineticError("kinetic form depends on the field")
            K[a, b] = sympy.nsimplify(d2.constant_term())
    if K.det() == 0:
        raise DegenerateKineticError("kinetic form is not invertible")
    Kinv = K.inv()
    zero_v = {n: 0 for n in names}
    conj = [F.diff(n) for n in names]
    offsets = [c.subs(zero_v).with_gens(src) for c in conj]
    # offsets depend on q only; re-express over dst
    offsets_dst = [_compose(o, {src[0]: Poly.var(dst, dst[0]), **{n: Poly.zero(dst) for n in names}}, dst) for o in offsets]
    inverse = []
    for a in range(dim):
        v = Poly.zero(dst)
        for b in range(dim):
            kab = _to_fraction(Kinv[a, b])
            if kab:
                v = v + (Poly.var(dst, dst[1 + b]) - offsets_dst[b]) * kab
        inverse.append(v)
    mapping = {src[0]: Poly.var(dst, dst[0]), **{n: inverse[a] for a, n in enumerate(names)}}
    G = sum((Poly.var(dst, dst[1 + a]) * inverse[a] for a in range(dim)), Poly.zero(dst)) - _compose(F, mapping, dst)
    return conj, inverse, G


@dataclass(frozen=True)
class LegendreResult:
    polymomenta: list  # p^mu = dL/dv_mu, over Lagrangian generators
    velocities: list  # v_mu(q, p), over DW generators
    hamiltonian: DWHamiltonian


def dw_legendre(L: LagrangianSpec) -> LegendreResult:
    """p^mu = dL/dv_mu, H = p^mu v_mu(p) - L(q, v(p)), exact."""
    dim = L.metric.dim
    conj, vel, H = _legendre(L.L, lagrangian_gens(dim), dw_gens(dim))
    return LegendreResult(conj, vel, DWHamiltonian(H, L.metric))


def inverse_legendre(H: DWHamiltonian) -> LagrangianSpec:
    """v_mu = dH/dp^mu, L = p^mu v_mu - H(q, p(v)); the inverse of :func:`dw_legendre`."""
    dim = H.dim
    _, _, L = _legendre(H.H, dw_gens(dim), lagrangian_gens(dim))
    return LagrangianSpec(L, H.metric)


def dw_rhs(H: DWHamiltonian, q, p: Sequence) -> tuple[list, Any]:
    """(dH/dp^mu for each mu, -dH/dq) evaluated at site values (numbers or arrays)."""
    gens = H.H.gens
    if len(p) != H.dim:
        raise ValueError(f"expected {H.dim} polymomenta, got {len(p)}")
    args = [q, *p]
    grad_p = [H.H.diff(g)(*args) for g in gens[1:]]
    return grad_p, -H.H.diff("q")(*args)


# -- lattice integration ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class DWState:
    """Fields on a spacetime lattice with collocated values.

    ``q`` has the lattice shape ``(N0, N1, ...)``; ``p`` has shape
    ``(dim, N0, N1, ...)``.  ``steps`` are the lattice spacings per axis.
    """

    steps: tuple
    q: np.ndarray
    p: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if q.ndim != len(self.steps):
            raise ValueError("one step per lattice axis required")
        if p.shape != (len(self.steps),) + q.shape:
            raise ValueError(f"polymomenta shape {p.shape} does not match field shape {q.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("lattice fields must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return len(self.steps)

    @property
    def shape(self) -> tuple:
        return self.q.shape


def kg_coefficients(H: DWHamiltonian) -> tuple[float, float, float]:
    """(a0, a1, m^2) of a 1+1 Hamiltonian a0/2 p0^2 + a1/2 p1^2 + m^2/2 q^2."""
    if H.dim != 2:
        raise ValueError("Klein-Gordon lattice integration is implemented in 1+1 dimensions")
    allowed = {(0, 2, 0): "a0", (0, 0, 2): "a1", (2, 0, 0): "m2"}
    vals = {"a0": 0.0, "a1": 0.0, "m2": 0.0}
    for e, c in H.H.terms.items():
        if e not in allowed:
            raise ValueError("integrate_dw supports H = a0/2 p0^2 + a1/2 p1^2 + m^2/2 q^2 only")
        vals[allowed[e]] = 2 * float(c)
    return vals["a0"], vals["a1"], vals["m2"]


def wave_speed(a0: float, a1: float) -> float:
    if a1 == 0 or a0 / a1 >= 0:
        raise ValueError("the DW system is not hyperbolic (needs a0/a1 < 0)")
    return math.sqrt(-a0 / a1)


def kg_dispersion(k, a0: float, a1: float, mass2: float):
    """Continuum omega(k) = sqrt(a0 m^2 - (a0/a1) k^2)."""
    return np.sqrt(a0 * mass2 - (a0 / a1) * np.asarray(k) ** 2)


def lattice_dispersion(k, a0: float, a1: float, mass2: float, dt: float, du: float):
    """omega of the staggered leapfrog: sin^2(w dt/2) = dt^2/4 (a0 m^2 + c^2 (2/du)^2 sin^2(k du/2))."""
    c2 = -a0 / a1
    rhs = dt**2 / 4 * (a0 * mass2 + c2 * (2 / du) ** 2 * np.sin(np.asarray(k) * du / 2) ** 2)
    return 2 / dt * np.arcsin(np.sqrt(rhs))


def integrate_dw(
    H: DWHamiltonian,
    q0,
    p0,
    dt: float,
    n_steps: int,
    du: float | None = None,
    record_every: int = 1,
) -> DWState:
    """Evolve Cauchy data on the slice u^0 = 0 by the DW Hamilton equations.

    1+1 dimensions: ``q0``, ``p0`` are arrays on a periodic row with spacing
    ``du``; ``p^1`` is initialised from the constraint ``d_1 q = a1 p^1``.
    0+1 dimensions: particle mechanics with ``p0`` the momentum.
    """
    if dt <= 0 or n_steps < 1:
        raise ValueError("need dt > 0 and at least one step")
    if H.dim == 1:
        return _integrate_time_only(H, q0, p0, dt, n_steps, record_every)
    a0, a1, m2 = kg_coefficients(H)
    c = wave_speed(a0, a1)
    if du is None or du <= 0:
        raise ValueError("a positive spatial step du is required")
    if c * dt > du * (1 + 1e-12):
        raise CFLViolationError(f"c*dt = {c * dt:g} exceeds du = {du:g}")
    if dt**2 * (a0 * m2 / 4 + c**2 / du**2) > 1 + 1e-12:
        raise CFLViolationError("time step above the mass-corrected stability bound")
    q0 = np.asarray(q0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    if q0.shape != p0.shape or q0.ndim != 1:
        raise ValueError("Cauchy data must be two equal-length 1-D arrays")
    p1 = (np.roll(q0, -1) - q0) / (du * a1)
    q_rec, p1_rec, p0m, p0p = kg_leapfrog(q0, p0, p1, a0, a1, m2, dt, du, n_steps, record_every)
    q_rec, p1_rec, p0m, p0p = (np.asarray(a) for a in (q_rec, p1_rec, p0m, p0p))
    if not all(np.all(np.isfinite(a)) for a in (q_rec, p1_rec, p0m, p0p)):
        bad = int(np.argmax(~np.isfinite(q_rec).all(axis=1))) * record_every
        raise BlowUpError(bad, bad * dt)
    p0_site = 0.5 * (p0m + p0p)
    p1_site = 0.5 * (p1_rec + np.roll(p1_rec, 1, axis=1))
    q_next = q_rec + dt * a0 * p0p
    dq = lambda a: np.roll(a, -1, axis=-1) - a  # noqa: E731
    shadow = du * (
        0.5 * a0 * np.sum(p0p**2, axis=1)
        + 0.5 * m2 * np.sum(q_next * q_rec, axis=1)
        - np.sum(dq(q_next) * dq(q_rec), axis=1) / (2 * a1 * du**2)
    )
    naive = du * (
        0.5 * a0 * np.sum(p0_site**2, axis=1)
        + 0.5 * m2 * np.sum(q_rec**2, axis=1)
        - np.sum(dq(q_rec) ** 2, axis=1) / (2 * a1 * du**2)
    )
    constraint = float(np.max(np.abs(dq(q_rec) / du - a1 * p1_rec)))
    meta = {
        "integrator": "staggered-leapfrog",
        "dt": dt,
        "du": du,
        "record_every": record_every,
        "a0": a0,
        "a1": a1,
        "mass2": m2,
        "times": dt * record_every * np.arange(q_rec.shape[0]),
        "energy_shadow": shadow,
        "energy_naive": naive,
        "constraint_residual": constraint,
        "p0_half": p0p,
        "p1_half_site": p1_rec,
    }
    return DWState((dt * record_every, du), q_rec, np.stack([p0_site, p1_site]), meta)


def _integrate_time_only(H: DWHamiltonian, q0, p0, dt, n_steps, record_every) -> DWState:
    ham = HamiltonianSpec(Poly(("q", "p"), H.H.terms), 1)
    method = "leapfrog" if ham.is_separable() else "rk4"
    rec = evolve_classical(ham, float(q0), float(p0), n_steps * dt, dt, method=method, record_every=record_every)
    states = np.asarray(rec.states)
    meta = {"integrator": method, "dt": dt, "times": rec.times, "energy": rec.metadata["energy"]}
    return DWState((dt * record_every,), states[:, 0], states[:, 1][None, :], meta)


def energy_drift(state: DWState, which: str = "shadow") -> float:
    """max |E(t) - E(0)| / |E(0)| for the recorded lattice energies."""
    E = np.asarray(state.metadata[f"energy_{which}"])
    return float(np.max(np.abs(E - E[0])) / abs(E[0]))


def plane_wave_data(k: float, H: DWHamiltonian, n_sites: int, du: float, amplitude: float = 1.0):
    """Cauchy data (u1, q, p0) of q = A cos(k u1 - omega u0) at u0 = 0."""
    a0, a1, m2 = kg_coefficients(H)
    omega = float(kg_dispersion(k, a0, a1, m2))
    u = du * np.arange(n_sites)
    return u, amplitude * np.cos(k * u), amplitude * omega * np.sin(k * u) / a0


def plane_wave_state(H: DWHamiltonian, k: float, shape: tuple[int, int], steps: tuple[float, float], amplitude: float = 1.0) -> DWState:
    """Exact collocated plane-wave solution of the DW equations on a lattice."""
    a0, a1, m2 = kg_coefficients(H)
    omega = float(kg_dispersion(k, a0, a1, m2))
    u0 = steps[0] * np.arange(shape[0])[:, None]
    u1 = steps[1] * np.arange(shape[1])[None, :]
    phase = k * u1 - omega * u0
    q = amplitude * np.cos(phase)
    p0 = amplitude * omega * np.sin(phase) / a0
    p1 = -amplitude * k * np.sin(phase) / a1
    return DWState(tuple(steps), q, np.stack([p0, p1]), {"k": k, "omega": omega})


def lattice_wavenumber(j: int, n_sites: int, du: float) -> float:
    """Wavenumber of the j-th periodic mode."""
    return 2 * math.pi * j / (n_sites * du)


def measure_dispersion(state: DWState, k: float) -> float:
    """Frequency of mode ``k`` from the three-term recurrence a_{n+1} + a_{n-1} = 2 cos(w dt) a_n."""
    dt = state.steps[0]
    u = state.steps[1] * np.arange(state.shape[1])
    a = state.q @ np.exp(-1j * k * u)
    num = np.real(np.vdot(a[1:-1], a[2:] + a[:-2]))
    den = 2 * np.real(np.vdot(a[1:-1], a[1:-1]))
    return float(np.arccos(np.clip(num / den, -1.0, 1.0)) / dt)


# -- Clifford-valued observables -------------------------------------------


def clifford_lift(poly: Poly, metric: Metric) -> Poly:
    """Scalar-coefficient polynomial as a multivector-coefficient one."""
    return poly.map_coeffs(lambda c: c if isinstance(c, Multivector) else Multivector.scalar(metric, c))


def combined_polymomenta(metric: Metric) -> Poly:
    """P = e_nu p^nu."""
    gens = dw_gens(metric.dim)
    out = Poly.zero(gens)
    for nu in range(metric.dim):
        out = out + Poly(gens, {tuple(1 if g == f"p{nu}" else 0 for g in gens): lower_index(metric, nu)})
    return out


def _check_metric(k: Poly, metric: Metric) -> None:
    for c in k.terms.values():
        if isinstance(c, Multivector) and c.metric != metric:
            raise MetricMismatchError(f"coefficient metric {c.metric} differs from {metric}")


def clifford_field_bracket(k1: Poly, k2: Poly, metric: Metric) -> Poly:
    """sum_mu (dk1/dq) e^mu (dk2/dp^mu) - (dk1/dp^mu) e^mu (dk2/dq), coefficient order kept."""
    if k1.gens != k2.gens or k1.gens != dw_gens(metric.dim):
        raise ValueError(f"observables must be polynomials over {dw_gens(metric.dim)}")
    _check_metric(k1, metric)
    _check_metric(k2, metric)
    k1 = clifford_lift(k1, metric)
    k2 = clifford_lift(k2, metric)
    out = clifford_lift(Poly.zero(k1.gens), metric)
    d1q, d2q = k1.diff("q"), k2.diff("q")
    for mu in range(metric.dim):
        e = generator(metric, mu)
        pm = f"p{mu}"
        out = out + (d1q * e) * k2.diff(pm) - (k1.diff(pm) * e) * d2q
    return out


def evaluate_clifford(poly: Poly, metric: Metric, values: Sequence[np.ndarray]) -> np.ndarray:
    """Dense multivector field (shape ``(..., 2**dim)``) of a Clifford polynomial at lattice values."""
    values = [np.asarray(v, dtype=float) for v in values]
    shape = np.broadcast_shapes(*(v.shape for v in values))
    out = np.zeros(shape + (1 << metric.dim,))
    for e, c in poly.terms.items():
        mono = np.ones(shape)
        for v, k in zip(values, e):
            if k:
                mono = mono * v**k
        coeff = c.to_dense() if isinstance(c, Multivector) else Multivector.scalar(metric, c).to_dense()
        out += mono[..., None] * coeff
    return out


_STENCILS = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}


def lattice_derivative(f: np.ndarray, axis: int, step: float, order: int = 2) -> np.ndarray:
    """Periodic central difference of ``order`` 2 or 4 along ``axis``."""
    try:
        stencil = _STENCILS[order]
    except KeyError:
        raise ValueError("difference order must be 2 or 4") from None
    out = np.zeros_like(f, dtype=float)
    for shift, w in stencil:
        out += w * (np.roll(f, -shift, axis) - np.roll(f, shift, axis))
    return out / step


def _trim(a: np.ndarray, periodic: Sequence[bool], width: int) -> np.ndarray:
    idx = tuple(slice(None) if per else slice(width, -width) for per in periodic)
    return a[idx]


def dirac_pairing(
    f: np.ndarray, steps: Sequence[float], metric: Metric, order: int = 2, periodic: Sequence[bool] | None = None
) -> np.ndarray:
    """-1/2 (e^mu d_mu f + d_mu f e^mu) on interior sites.

    ``f`` is a dense multivector field of shape ``(*lattice, 2**dim)``.
    Non-periodic axes (by default u^0) lose ``order // 2`` sites at each end.
    """
    f = np.asarray(f, dtype=float)
    lattice = f.shape[:-1]
    if len(lattice) != metric.dim or len(steps) != metric.dim:
        raise ValueError("lattice rank must equal the metric dimension")
    if f.shape[-1] != 1 << metric.dim:
        raise ValueError("field is not a dense multivector array for this metric")
    periodic = tuple(periodic) if periodic is not None else (False,) + (True,) * (metric.dim - 1)
    w = order // 2
    for n, per in zip(lattice, periodic):
        if not per and n <= 2 * w:
            raise ValueError("no interior sites: the difference stencil reaches the boundary everywhere")
    out = np.zeros_like(f)
    for mu in range(metric.dim):
        e = generator(metric, mu).to_dense()
        d = lattice_derivative(f, mu, steps[mu], order)
        out -= 0.5 * (dense_product(e, d, metric) + dense_product(d, e, metric))
    return _trim(out, periodic, w)


@dataclass
class ReductionReport:
    field_residual: list
    field_constant: float
    field_variance: float
    momentum_residual: float
    momentum_constant: float
    momentum_variance: float
    momentum_off_scalar: float
    interior_sites: int

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in self.__dict__.items()}


def _ratio_stats(lhs: np.ndarray, rhs: np.ndarray, mask_ratio: float) -> tuple[float, float]:
    lhs, rhs = lhs.ravel(), rhs.ravel()
    top = np.max(np.abs(rhs)) if rhs.size else 0.0
    if top == 0:
        return float("nan"), 0.0
    sel = np.abs(rhs) > mask_ratio * top
    const = float(np.dot(lhs[sel], rhs[sel]) / np.dot(rhs[sel], rhs[sel]))
    return const, float(np.var(lhs[sel] / rhs[sel]))


def verify_field_reduction(H: DWHamiltonian, state: DWState, order: int = 4, mask_ratio: float = 0.1) -> ReductionReport:
    """Compare Dirac pairings of ``q`` and of ``P = e_nu p^nu`` with their field brackets against ``H``.

    Field equation: pairing(k) = c * {H, k}.  For ``k = q`` the blade-e^mu
    components give -d_mu q against -dH/dp^mu; for ``k = P`` the scalar parts
    give -(e^mu e_mu) d_mu p^mu against (dH/dq) sum_mu e^mu e_mu.  Each
    constant ``c`` is fitted over sites where the bracket is not small, and
    its per-site variance measures site independence.
    """
    metric = H.metric
    if state.dim != metric.dim:
        raise ValueError("state and Hamiltonian differ in spacetime dimension")
    gens = H.H.gens
    w = order // 2
    periodic = (False,) + (True,) * (metric.dim - 1)
    values_full = [state.q, *state.p]
    values = [_trim(v, periodic, w) for v in values_full]

    q_poly = clifford_lift(Poly.var(gens, "q"), metric)
    P_poly = combined_polymomenta(metric)
    Hc = clifford_lift(H.H, metric)

    q_field = evaluate_clifford(q_poly, metric, values_full)
    lhs_q = dirac_pairing(q_field, state.steps, metric, order, periodic)
    rhs_q = evaluate_clifford(clifford_field_bracket(Hc, q_poly, metric), metric, values)

    P_field = evaluate_clifford(P_poly, metric, values_full)
    lhs_P = dirac_pairing(P_field, state.steps, metric, order, periodic)
    rhs_P = evaluate_clifford(clifford_field_bracket(Hc, P_poly, metric), metric, values)

    vec = [1 << mu for mu in range(metric.dim)]
    c_field, v_field = _ratio_stats(lhs_q[..., vec], rhs_q[..., vec], mask_ratio)
    c_field_used = 1.0 if math.isnan(c_field) else c_field
    res_field = [float(np.max(np.abs(lhs_q[..., b] - c_field_used * rhs_q[..., b]))) for b in vec]

    c_mom, v_mom = _ratio_stats(lhs_P[..., 0], rhs_P[..., 0], mask_ratio)
    c_mom_used = 0.0 if math.isnan(c_mom) else c_mom
    res_mom = float(np.max(np.abs(lhs_P[..., 0] - c_mom_used * rhs_P[..., 0])))
    off = float(np.max(np.abs(lhs_P[..., 1:]))) if lhs_P.size else 0.0
    return ReductionReport(res_field, c_field, v_field, res_mom, c_mom, v_mom, off, int(np.prod(lhs_q.shape[:-1])))


# -- Galilean antiderivatives ----------------------------------------------


def s_symbols(dim: int) -> tuple:
    return tuple(sympy.Symbol(f"s{mu}", real=True) for mu in range(dim))


def galilean_antiderivative(mu: int, hbar, dim: int, expr=None):
    """Component A_mu: multiplier 2 pi/(i hbar) on exp(2 pi i hbar s_mu), or s_mu -> 4 pi^2 s_mu at hbar = 0.

    Without ``expr`` returns the multiplier (hbar != 0) or the symbol
    ``4 pi^2 s_mu`` (hbar = 0); with ``expr`` applies A_mu to it, acting on
    the ``s_mu`` slot only.
    """
    if not 0 <= mu < dim:
        raise IndexError(f"component {mu} out of range for dimension {dim}")
    s_mu = s_symbols(dim)[mu]
    if expr is None:
        if hbar == 0:
            return 4 * sympy.pi**2 * s_mu
        return antiderivative_multiplier(hbar)
    return antiderivative(expr, hbar, s_mu)


def composite_antiderivative(metric: Metric, hbars: Sequence, expr) -> list[tuple[Multivector, Any]]:
    """A = e^mu A_mu as the list [(e^mu, A_mu expr)]; ``hbars[mu]`` is the character of slot mu."""
    if len(hbars) != metric.dim:
        raise ValueError("one central parameter per component required")
    return [
        (generator(metric, mu), galilean_antiderivative(mu, hbars[mu], metric.dim, expr))
        for mu in range(metric.dim)
    ]


def galilean_character(hbars: Sequence) -> sympy.Expr:
    """exp(2 pi i sum_mu hbar_mu s_mu)."""
    s = s_symbols(len(hbars))
    return sympy.exp(2 * sympy.pi * sympy.I * sum(sympy.nsimplify(h) * sm for h, sm in zip(hbars, s)))


def central_times_antiderivative(mu: int, hbars: Sequence, expr=None) -> sympy.Expr:
    """(S_mu A_mu expr) / expr, simplified; equals 4 pi^2 on characters."""
    dim = len(hbars)
    s_mu = s_symbols(dim)[mu]
    if expr is None:
        expr = galilean_character(hbars) if hbars[mu] != 0 else s_mu**2
    image = galilean_antiderivative(mu, hbars[mu], dim, expr)
    return sympy.simplify(sympy.diff(image, s_mu) / expr)
