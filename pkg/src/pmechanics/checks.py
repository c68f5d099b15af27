"""Invariant checks with measured values, shared by ``pmech verify`` and the test suite.

Each check returns a :class:`CheckResult` holding its measurements, the
tolerance it was held to, and the wall time it took.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import brackets as br
from . import clifford as cl
from . import dw_field as dw
from . import dynamics as dy
from . import groups as gr
from . import representations as rep
from .grid import Axis, PhaseGrid
from .poly import Poly, parse_observable, phase_space_gens


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    runtime: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{flag}] {self.name} ({self.runtime:.2f}s): {shown}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": _jsonable(self.measured),
            "tolerance": _jsonable(self.tolerance),
            "runtime": self.runtime,
        }


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def _timed(fn: Callable[..., CheckResult]) -> Callable[..., CheckResult]:
    def wrapper(*args, **kwargs) -> CheckResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rat(rng: random.Random, span: int = 50, den: int = 20) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_poly(rng: random.Random, gens, max_degree: int, n_terms: int) -> Poly:
    terms = {}
    for _ in range(n_terms):
        deg = rng.randint(0, max_degree)
        e = [0] * len(gens)
        for _ in range(deg):
            e[rng.randrange(len(gens))] += 1
        terms[tuple(e)] = _rat(rng, 9, 5)
    return Poly(gens, terms)


# -- 1, 2: groups -----------------------------------------------------------


@_timed
def check_group_laws(seed: int = 0, triples: int = 1000) -> CheckResult:
    """Associativity, identity and inverse laws for both group laws, exact."""
    rng = random.Random(seed)
    failures = 0
    half = triples // 2
    units: list[bool] = []
    for n in (1, 2):
        e = gr.HeisenbergElement.identity(n)
        for _ in range(half):
            a, b, c = (
                gr.HeisenbergElement(_rat(rng), [_rat(rng) for _ in range(n)], [_rat(rng) for _ in range(n)])
                for _ in range(3)
            )
            ok = (a * b) * c == a * (b * c)
            if len(units) < 100:
                units.append(a * e == a and e * a == a and a * a.inverse() == e)
            failures += not ok
    for d in (2, 4):
        e = gr.GalileanElement.identity(d)
        for _ in range(half):
            a, b, c = (
                gr.GalileanElement([_rat(rng) for _ in range(d)], _rat(rng), [_rat(rng) for _ in range(d)])
                for _ in range(3)
            )
            ok = (a * b) * c == a * (b * c)
            if len(units) < 200:
                units.append(a * e == a and e * a == a and a * a.inverse() == e)
            failures += not ok
    failures += units.count(False)
    return CheckResult("group laws", failures == 0, {"failures": failures, "triples": 4 * half, "unit_checks": len(units)})


@_timed
def check_coadjoint_orbits(seed: int = 0, trials: int = 1000) -> CheckResult:
    """Orbit tag invariant under the coadjoint action; hbar = 0 points fixed."""
    rng = random.Random(seed)
    failures = 0
    for i in range(trials):
        n = 1 + i % 3
        hbar = Fraction(0) if i % 4 == 0 else _rat(rng)
        F = gr.CoadjointPoint(hbar, [_rat(rng) for _ in range(n)], [_rat(rng) for _ in range(n)])
        g = gr.HeisenbergElement(_rat(rng), [_rat(rng) for _ in range(n)], [_rat(rng) for _ in range(n)])
        G = gr.coadjoint(g, F)
        ok = gr.classify_orbit(G) == gr.classify_orbit(F)
        if hbar == 0:
            ok = ok and G == F
        failures += not ok
    return CheckResult("coadjoint orbits", failures == 0, {"failures": failures, "trials": trials})


# -- 3, 4, 5: brackets ------------------------------------------------------


@_timed
def check_poisson_algebra(seed: int = 0, trials: int = 12) -> CheckResult:
    """Antisymmetry, Leibniz and Jacobi of the Poisson bracket on random polynomials."""
    rng = random.Random(seed)
    failures = 0
    pb = br.poisson_bracket
    for i in range(trials):
        gens = phase_space_gens(1 + i % 3)
        f, g, h = (random_poly(rng, gens, rng.randint(1, 6), 4) for _ in range(3))
        ok = pb(f, g) == -pb(g, f)
        ok = ok and pb(f * g, h) == f * pb(g, h) + pb(f, h) * g
        ok = ok and (pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))).is_zero()
        failures += not ok
    return CheckResult("Poisson algebra", failures == 0, {"failures": failures, "trials": trials})


@_timed
def check_ub_formal(seed: int = 0, trials: int = 6) -> CheckResult:
    """Formal-lam ub bracket: lam^0 part is Poisson, {q^3, p^3}, Jacobi."""
    rng = random.Random(seed)
    failures = 0
    for i in range(trials):
        n = 1 + i % 2
        gens = phase_space_gens(n)
        f, g = (random_poly(rng, gens, rng.randint(1, 5), 4) for _ in range(2))
        ub = br.ub_bracket_poly(f, g)
        lam0 = ub.grade("lam", 0)
        failures += lam0 != br.poisson_bracket(f, g).with_gens(ub.gens)
    q3p3 = br.ub_bracket_poly(parse_observable("q^3", 1, False), parse_observable("p^3", 1, False))
    expected = parse_observable("9*q^2*p^2 - 6*lam^2")
    formal_ok = q3p3 == expected
    hbar = 0.37
    lam = br.lam_from_hbar(hbar)
    numeric = br.ub_bracket_poly(parse_observable("q^3", 1, False), parse_observable("p^3", 1, False), lam)
    numeric_err = abs(numeric.constant_term() + 6 * lam**2) + abs(numeric.coeff((2, 2)) - 9)
    jacobi_fail = 0
    for _ in range(3):
        gens = phase_space_gens(1)
        f, g, h = (random_poly(rng, gens, 4, 3) for _ in range(3))
        ub = br.ub_bracket_poly
        total = ub(f, ub(g, h)) + ub(g, ub(h, f)) + ub(h, ub(f, g))
        jacobi_fail += not total.is_zero()
    ok = failures == 0 and formal_ok and numeric_err < 1e-14 and jacobi_fail == 0
    return CheckResult(
        "ub bracket (formal)",
        ok,
        {
            "lam0_failures": failures,
            "q3p3": str(q3p3),
            "numeric_error": numeric_err,
            "jacobi_failures": jacobi_fail,
        },
        {"numeric_error": 1e-14},
    )


CUBIC_PAIRS = (("q^3 + q*p", "p^3 - 2*q"), ("q^2*p + 3*p", "q*p^2 - q^3"), ("q^3", "p^3"))


@_timed
def check_hbar_scaling(hbars=(1e-1, 1e-2, 1e-3, 1e-4), tol: float = 0.1) -> CheckResult:
    """log-log slope of ||ub - Poisson|| against hbar on cubic pairs."""
    slopes = []
    for fs, gs in CUBIC_PAIRS:
        f, g = parse_observable(fs, 1, False), parse_observable(gs, 1, False)
        gaps = [br.bracket_gap(f, g, br.lam_from_hbar(h)) for h in hbars]
        slopes.append(float(np.polyfit(np.log(hbars), np.log(gaps), 1)[0]))
    ok = all(abs(s - 2.0) <= tol for s in slopes)
    return CheckResult("hbar -> 0 scaling", ok, {"slopes": slopes}, {"slope": f"2 +- {tol}"})


CROSS_PAIRS = (
    ("q^3 + q*p", "p^3 + 2*q - 1", 0.5),
    ("q^2*p", "q*p^2 + p", 0.25),
    ("q^3", "p^3", 0.5),
    ("q*p + q^2", "p^2 - q^3", 0.25),
    ("q^2 - p^2 + q*p^3", "q^3*p", 0.4),
)


@_timed
def check_cross_backend(n: int = 256, order: int = 17, tol: float = 1e-5, pairs=CROSS_PAIRS) -> CheckResult:
    """Lattice twisted-convolution bracket against the symbol series, with lam fitted."""
    axes = br.symbol_lattice(n)
    errors, ratios = [], []
    for fs, gs, hbar in pairs:
        f = br.GaussianSymbol(parse_observable(fs, 1, False).to_float(), math.pi)
        g = br.GaussianSymbol(parse_observable(gs, 1, False).to_float(), math.pi)
        grid = br.grid_bracket_symbol(f, g, hbar, axes)
        terms = br.ub_series_enveloped(f, g, order)
        lam = br.lam_from_hbar(hbar)
        ref = br.evaluate_series(terms, lam, axes)
        errors.append(float(np.max(np.abs(grid.samples - ref.samples)) / np.max(np.abs(ref.samples))))
        ratios.append(br.fit_deformation(grid, terms, lam) / lam)
    ok = max(errors) < tol and max(abs(r - 1) for r in ratios) < 1e-6
    return CheckResult(
        "cross-backend bracket",
        ok,
        {"max_rel_error": max(errors), "errors": errors, "lam_fit_over_hbar_4pi": ratios},
        {"rel_error": tol, "lam_ratio": 1e-6},
    )


# -- 7, 8: representations --------------------------------------------------


def _gaussian(axes, q0=0.3, p0=-0.2) -> PhaseGrid:
    return PhaseGrid.from_function(axes, lambda q, p: np.exp(-math.pi * ((q - q0) ** 2 + (p - p0) ** 2)))


@_timed
def check_homomorphism(seed: int = 0, pairs: int = 10, n: int = 256, tol: float = 1e-6) -> CheckResult:
    """rho(g1) rho(g2) = rho(g1 g2) on Gaussian data, its refinement trend, and norm preservation."""
    rng = np.random.default_rng(seed)
    hbar = 0.8
    elems = [
        (
            gr.HeisenbergElement(*rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)),
            gr.HeisenbergElement(*rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)),
        )
        for _ in range(pairs)
    ]
    ax = Axis(-8, 8, n)
    f = _gaussian((ax, ax))
    defects = [rep.homomorphism_defect(hbar, a, b, f) for a, b in elems]
    norm_dev = max(abs(rep.rho_h(hbar, a, f).norm() / f.norm() - 1) for a, _ in elems)
    bound = 1e-12 + 2 * rep.edge_mass(f)
    ladder = []
    for m in (48, 64, 96):
        axm = Axis(-8, 8, m)
        fm = _gaussian((axm, axm))
        ladder.append(max(rep.homomorphism_defect(hbar, a, b, fm) for a, b in elems[:3]))
    decreasing = all(b < a or a < 1e-12 for a, b in zip(ladder, ladder[1:]))
    ok = max(defects) < tol and decreasing and norm_dev <= bound
    return CheckResult(
        "representation homomorphism",
        ok,
        {"max_defect": max(defects), "refinement": ladder, "norm_deviation": norm_dev, "norm_bound": bound},
        {"defect": tol},
    )


def fd_order(values, refinement: float = 2.0) -> list[float]:
    return [math.log(a / b) / math.log(refinement) for a, b in zip(values, values[1:])]


@_timed
def check_fock_vacuum(tol: float = 1e-8) -> CheckResult:
    """Vacuum annihilated by D: spectral residual at 256^2 and finite-difference orders."""
    hbar = 1.0
    ax = Axis(-6, 6, 256)
    v = rep.vacuum((ax, ax), hbar)
    spectral = rep.fock_residual(hbar, v) / v.norm()
    fd4, fd2 = [], []
    for n in (128, 256, 512):
        a = Axis(-6, 6, n)
        vn = rep.vacuum((a, a), hbar)
        fd4.append(rep.fock_residual(hbar, vn, "fd4") / vn.norm())
        fd2.append(rep.fock_residual(hbar, vn, "fd2") / vn.norm())
    o4, o2 = fd_order(fd4), fd_order(fd2)
    ok = spectral < tol and abs(o4[-1] - 4) < 0.3 and abs(o2[-1] - 2) < 0.2
    return CheckResult(
        "Fock vacuum",
        ok,
        {"spectral_residual": spectral, "fd4_orders": o4, "fd2_orders": o2},
        {"spectral": tol, "fd4_order": "4 +- 0.3", "fd2_order": "2 +- 0.2"},
    )


# -- 9: dynamics ------------------------------------------------------------


@_timed
def check_dynamics(tol: float = 1e-8, slope_tol: float = 0.15) -> CheckResult:
    """Harmonic trajectory, hbar-independence for quadratic H, O(hbar^2) quartic gap."""
    H = dy.HamiltonianSpec.parse("(p^2 + q^2)/2")
    rec = dy.evolve_classical(H, 1.0, 0.0, 2 * math.pi, 1e-3)
    qf, pf = rec.final
    harmonic_err = max(abs(qf - 1.0), abs(pf - 0.0))

    quad = dy.HamiltonianSpec.parse("p^2/2 + q^2/2 + q*p/3")
    t_end = 1.5
    ref = dy.evolve_classical(quad, 0.7, -0.4, t_end, 1e-3)
    worst = 0.0
    for f0 in ("q", "p"):
        obs = parse_observable(f0, 1, False)
        base = dy.evolve_observable_moyal(quad, obs, 0.0, t_end, 1e-3).final
        for hbar in (0.1, 1.0, 10.0):
            moyal = dy.evolve_observable_moyal(quad, obs, hbar, t_end, 1e-3).final
            worst = max(worst, (moyal - base).coeff_norm())
        classical = ref.final[0] if f0 == "q" else ref.final[1]
        worst = max(worst, abs(base(0.7, -0.4) - classical))

    quartic = dy.HamiltonianSpec.parse("p^2/2 + q^2/2 + q^4/4")
    table = dy.moyal_vs_poisson_gap(quartic, parse_observable("q", 1, False), [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], 1.0, 1e-2, truncation=7)
    ok = harmonic_err < tol and worst < tol and abs(table.slope - 2) <= slope_tol
    return CheckResult(
        "dynamics",
        ok,
        {"harmonic_error": harmonic_err, "quadratic_moyal_vs_classical": worst, "quartic_slope": table.slope},
        {"harmonic": tol, "slope": f"2 +- {slope_tol}"},
    )


# -- 10: Clifford -----------------------------------------------------------


def random_multivector(rng: random.Random, metric: cl.Metric, nonzero: int = 4) -> cl.Multivector:
    size = 1 << metric.dim
    return cl.Multivector(metric, {rng.randrange(size): _rat(rng, 9, 7) for _ in range(nonzero)})


@_timed
def check_clifford(seed: int = 0, triples: int = 1000) -> CheckResult:
    """Generator anticommutators and associativity, exact."""
    table_fail = 0
    sigs = ((1, 1), (1, 3), (2, 0))
    for p, q in sigs:
        for conv in cl.CONVENTIONS:
            m = cl.Metric.from_signature(p, q, conv)
            tab = cl.anticommutator_table(m)
            for mu in range(m.dim):
                for nu in range(m.dim):
                    table_fail += tab[mu][nu] != cl.expected_anticommutator(m, mu, nu)
    rng = random.Random(seed)
    assoc_fail = 0
    metrics = [cl.Metric.from_signature(p, q) for p, q in sigs]
    for i in range(triples):
        m = metrics[i % len(metrics)]
        a, b, c = (random_multivector(rng, m) for _ in range(3))
        assoc_fail += (a * b) * c != a * (b * c)
    ok = table_fail == 0 and assoc_fail == 0
    return CheckResult("Clifford core", ok, {"table_failures": table_fail, "assoc_failures": assoc_fail})


# -- 11, 12: fields ---------------------------------------------------------


@_timed
def check_dw_chain(disp_tol: float = 0.01, drift_tol: float = 1e-6) -> CheckResult:
    """Legendre transform, lattice dispersion for k du <= 0.3, energy drift over 10 periods."""
    metric = cl.Metric.from_signature(1, 1)
    mass = Fraction(3, 2)
    leg = dw.dw_legendre(dw.free_scalar_lagrangian(metric, mass))
    legendre_ok = leg.hamiltonian.H == dw.free_scalar_hamiltonian(metric, mass).H
    inverse_ok = dw.inverse_legendre(leg.hamiltonian).L == dw.free_scalar_lagrangian(metric, mass).L

    H = dw.free_scalar_hamiltonian(metric, 1.0)
    n_sites, du = 256, 0.05
    rel_errors, drifts, kdus = [], [], []
    for j in (1, 4, 8, 12):
        k = dw.lattice_wavenumber(j, n_sites, du)
        _, q0, p0 = dw.plane_wave_data(k, H, n_sites, du)
        omega = float(dw.kg_dispersion(k, 1.0, -1.0, 1.0))
        dt = 0.5 * du
        steps = int(math.ceil(10 * 2 * math.pi / omega / dt))
        st = dw.integrate_dw(H, q0, p0, dt, steps, du=du)
        rel_errors.append(abs(dw.measure_dispersion(st, k) / omega - 1))
        drifts.append(dw.energy_drift(st))
        kdus.append(k * du)
    ok = legendre_ok and inverse_ok and max(rel_errors) < disp_tol and max(drifts) < drift_tol
    return CheckResult(
        "DW chain",
        ok,
        {
            "hamiltonian": str(leg.hamiltonian.H),
            "legendre_exact": legendre_ok,
            "involution": inverse_ok,
            "k_du": kdus,
            "dispersion_rel_error": rel_errors,
            "energy_drift": max(drifts),
        },
        {"dispersion": disp_tol, "drift": drift_tol},
    )


@_timed
def check_field_reduction(var_tol: float = 1e-10) -> CheckResult:
    """Reduction constants on exact plane waves and S_mu A_mu = 4 pi^2 on characters."""
    import sympy

    out = {}
    ok = True
    for conv in cl.CONVENTIONS:
        metric = cl.Metric.from_signature(1, 1, conv)
        H = dw.free_scalar_hamiltonian(metric, 1.0)
        reports = []
        for n in (64, 128):
            du = 0.05 * 128 / n
            k = dw.lattice_wavenumber(3, n, du)
            reports.append(dw.verify_field_reduction(H, dw.plane_wave_state(H, k, (n, n), (du, du))))
        coarse, fine = reports
        order = math.log(max(coarse.field_residual) / max(fine.field_residual), 2)
        dim = metric.dim
        ok_conv = (
            fine.field_variance < var_tol
            and fine.momentum_variance < var_tol
            and abs(fine.field_constant - 1) < 1e-4
            and abs(fine.momentum_constant - 1 / dim) < 1e-4
            and fine.momentum_off_scalar < 1e-12
            and order > 3.5
        )
        ok = ok and ok_conv
        out[conv] = {
            "c_q": fine.field_constant,
            "c_P": fine.momentum_constant,
            "var_q": fine.field_variance,
            "var_P": fine.momentum_variance,
            "residual_order": order,
        }
    four_pi2 = 4 * sympy.pi**2
    anti_ok = True
    for hbars in ((sympy.Rational(1, 3), 2), (1, 0), (0, 0, sympy.Rational(-5, 2), 1)):
        for mu in range(len(hbars)):
            anti_ok = anti_ok and sympy.simplify(dw.central_times_antiderivative(mu, hbars) - four_pi2) == 0
    out["S_A_equals_4pi2"] = anti_ok
    return CheckResult("field reduction", ok and anti_ok, out, {"variance": var_tol})


SUITES: dict[str, list[Callable[..., CheckResult]]] = {
    "groups": [check_group_laws, check_coadjoint_orbits],
    "brackets": [check_poisson_algebra, check_ub_formal, check_hbar_scaling, check_cross_backend],
    "representations": [check_homomorphism, check_fock_vacuum],
    "dynamics": [check_dynamics],
    "clifford": [check_clifford],
    "fields": [check_dw_chain, check_field_reduction],
}
SUITES["all"] = [c for name in ("groups", "brackets", "representations", "dynamics", "clifford", "fields") for c in SUITES[name]]


def run_suite(name: str) -> list[CheckResult]:
    try:
        checks = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return [c() for c in checks]
