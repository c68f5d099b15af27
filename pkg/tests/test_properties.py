import math

import numpy as np
from hypothesis import given, strategies as st

from pmechanics import brackets as br
from pmechanics import dw_field as dw
from pmechanics import representations as rep
from pmechanics.clifford import Metric, Multivector, anticommutator, generator
from pmechanics.grid import Axis, PhaseGrid, TwistedKernel
from pmechanics.groups import CoadjointPoint, GalileanElement, HeisenbergElement, coadjoint
from pmechanics.poly import Poly

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small_rats = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def heisenberg(n):
    return st.builds(
        HeisenbergElement, rats, st.lists(rats, min_size=n, max_size=n), st.lists(rats, min_size=n, max_size=n)
    )


def galilean(dim):
    return st.builds(
        GalileanElement, st.lists(rats, min_size=dim, max_size=dim), rats, st.lists(rats, min_size=dim, max_size=dim)
    )


def polys(gens=("q", "p"), max_degree=4):
    exps = st.tuples(*[st.integers(0, max_degree) for _ in gens]).filter(lambda e: sum(e) <= max_degree)
    return st.dictionaries(exps, small_rats, max_size=5).map(lambda d: Poly(gens, d))


@st.composite
def multivectors(draw, metric):
    coeffs = draw(st.dictionaries(st.integers(0, (1 << metric.dim) - 1), small_rats, max_size=6))
    return Multivector(metric, coeffs)


# -- groups -------------------------------------------------------------------


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(heisenberg(n), heisenberg(n), heisenberg(n))))
def test_heisenberg_associative(triple):
    a, b, c = triple
    assert (a * b) * c == a * (b * c)


@given(st.integers(1, 3).flatmap(heisenberg))
def test_heisenberg_inverse(a):
    e = HeisenbergElement.identity(a.n)
    assert a * a.inverse() == e == a.inverse() * a


@given(st.integers(1, 4).flatmap(lambda d: st.tuples(galilean(d), galilean(d), galilean(d))))
def test_galilean_associative_with_inverse(triple):
    a, b, c = triple
    assert (a * b) * c == a * (b * c)
    assert a * a.inverse() == GalileanElement.identity(a.dim)


@given(rats, rats, rats, heisenberg(1), heisenberg(1))
def test_coadjoint_action_composes(h, q, p, g1, g2):
    F = CoadjointPoint(h, [q], [p])
    assert coadjoint(g1, coadjoint(g2, F)) == coadjoint(g1 * g2, F)


@given(heisenberg(1), heisenberg(1))
def test_center_is_central(a, b):
    # commutator lands in the centre: x and y parts cancel
    c = a * b * a.inverse() * b.inverse()
    assert c.x == (0,) and c.y == (0,)


# -- Clifford -----------------------------------------------------------------

M13 = Metric.from_signature(1, 3)
M_ODD = Metric((2, -1, 3))


@given(multivectors(M13), multivectors(M13), multivectors(M13))
def test_clifford_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(multivectors(M_ODD), multivectors(M_ODD), multivectors(M_ODD))
def test_clifford_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(st.sampled_from(["standard", "literal"]), st.integers(0, 3), st.integers(0, 3))
def test_generator_relation(conv, mu, nu):
    m = Metric.from_signature(1, 3, conv)
    got = anticommutator(generator(m, mu), generator(m, nu))
    factor = 2 if conv == "standard" else 1
    assert got == Multivector.scalar(m, factor * m.diag[mu] if mu == nu else 0)


# -- brackets -----------------------------------------------------------------


@given(polys(), polys())
def test_poisson_antisymmetric(f, g):
    assert br.poisson_bracket(f, g) == -br.poisson_bracket(g, f)


@given(polys(max_degree=3), polys(max_degree=3), polys(max_degree=3))
def test_poisson_jacobi(f, g, h):
    pb = br.poisson_bracket
    assert (pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))).is_zero()


@given(polys(max_degree=3), polys(max_degree=3), polys(max_degree=3))
def test_poisson_leibniz(f, g, h):
    pb = br.poisson_bracket
    assert pb(f, g * h) == pb(f, g) * h + g * pb(f, h)


@given(polys(max_degree=5), polys(max_degree=5))
def test_ub_antisymmetric_and_classical_limit(f, g):
    ub = br.ub_bracket_poly(f, g)
    assert ub == -br.ub_bracket_poly(g, f)
    assert ub.subs({"lam": 0}).with_gens(f.gens) == br.poisson_bracket(f, g)


@given(polys(max_degree=2), polys(max_degree=6), st.floats(0.01, 2.0))
def test_ub_with_quadratic_is_poisson(f, g, lam):
    assert br.ub_bracket_poly(f, g, lam) == br.poisson_bracket(f, g).to_float()


@given(polys(max_degree=4), polys(max_degree=4))
def test_ub_only_even_powers_of_lambda(f, g):
    ub = br.ub_bracket_poly(f, g)
    k = ub.gens.index("lam")
    assert all(e[k] % 2 == 0 for e in ub.terms)


@given(polys(max_degree=4), polys(max_degree=3), polys(max_degree=3))
def test_poly_ring_axioms(f, g, h):
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f - f == Poly.zero(f.gens)


@given(polys(max_degree=5))
def test_poly_str_roundtrip(f):
    assert Poly.parse(str(f), f.gens) == f


# -- kernels and representations ------------------------------------------------


@given(
    st.integers(3, 9),
    st.floats(0.05, 2.0),
    st.floats(0.1, 1.0),
    st.sampled_from([1, -1]),
    st.integers(0, 2**32 - 1),
)
def test_fft_equals_direct(n, hbar, step, sign, seed):
    rng = np.random.default_rng(seed)
    ax = Axis.centered(n, step)
    k1 = TwistedKernel(hbar, ax, ax, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    k2 = TwistedKernel(hbar, ax, ax, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    a = br.twisted_convolution(k1, k2, sign, "fft").samples
    b = br.twisted_convolution(k1, k2, sign, "direct").samples
    assert np.max(np.abs(a - b)) <= 1e-11 * max(1.0, np.max(np.abs(b)))


# Nyquist 6.7 leaves room for the frequency shifts of |x|, |y| <= 2
AX = Axis(-6, 6, 160)
F0 = PhaseGrid.from_function((AX, AX), lambda q, p: np.exp(-math.pi * ((q - 0.3) ** 2 + (p + 0.2) ** 2)))
coord = st.floats(-1.0, 1.0)


@given(coord, coord, coord, coord, coord, coord, st.floats(0.2, 1.5))
def test_rho_homomorphism_and_unitarity(s1, x1, y1, s2, x2, y2, hbar):
    g1 = HeisenbergElement(s1, [x1], [y1])
    g2 = HeisenbergElement(s2, [x2], [y2])
    assert rep.homomorphism_defect(hbar, g1, g2, F0) < 1e-9
    assert abs(rep.rho_h(hbar, g1, F0).norm() / F0.norm() - 1) < 1e-12


@given(coord, coord, st.floats(0.5, 2.0))
def test_coherent_states_are_annihilated(x, y, hbar):
    ax = Axis(-6, 6, 256)
    c = rep.coherent_state(hbar, HeisenbergElement(0.0, [x], [y]), (ax, ax))
    assert rep.fock_residual(hbar, c) < 1e-9 * max(1.0, c.norm())


# -- fields -------------------------------------------------------------------


@given(
    st.fractions(min_value=1, max_value=5, max_denominator=4),
    st.fractions(min_value=1, max_value=5, max_denominator=4),
    small_rats,
    small_rats,
)
def test_legendre_is_an_involution(a, b, c, m):
    L = dw.LagrangianSpec(
        Poly.parse(f"({a})/2*v0^2 - ({b})/2*v1^2 + ({c})*q*v1 - ({m})*q^2", dw.lagrangian_gens(2)),
        Metric.from_signature(1, 1),
    )
    H = dw.dw_legendre(L).hamiltonian
    assert dw.inverse_legendre(H).L == L.L


@given(st.integers(1, 6), st.floats(0.2, 0.5), st.floats(0.0, 2.0))
def test_leapfrog_shadow_energy(j, courant, mass):
    H = dw.free_scalar_hamiltonian(Metric.from_signature(1, 1), mass)
    n, du = 64, 0.1
    k = dw.lattice_wavenumber(j, n, du)
    _, q0, p0 = dw.plane_wave_data(k, H, n, du)
    st_ = dw.integrate_dw(H, q0, p0, courant * du, 400, du=du, record_every=20)
    assert dw.energy_drift(st_) < 1e-10
