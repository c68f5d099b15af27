import math

import numpy as np
import pytest

from pmechanics import brackets as br
from pmechanics import representations as rep
from pmechanics.grid import Axis, PhaseGrid, TwistedKernel
from pmechanics.groups import HeisenbergElement


def gauss(q, p, q0=0.3, p0=-0.2, a=math.pi):
    return np.exp(-a * ((q - q0) ** 2 + (p - p0) ** 2))


AX = Axis(-8, 8, 128)
F = PhaseGrid.from_function((AX, AX), gauss)


@pytest.mark.parametrize("s,x,y", [(0.3, 0.5, -1.0), (-1.2, 2.0, 0.7), (0.0, 0.0, 1.5)])
def test_rho_matches_closed_form(s, x, y):
    hbar = 0.8
    got = rep.rho_h(hbar, HeisenbergElement(s, [x], [y]), F)
    q, p = F.mesh()
    want = np.exp(-2j * math.pi * (hbar * s + q * x + p * y)) * gauss(q - hbar * y / 2, p + hbar * x / 2)
    np.testing.assert_allclose(got.samples, want, atol=1e-12)


def test_rho_is_unitary_and_a_homomorphism():
    rng = np.random.default_rng(0)
    for _ in range(5):
        s1, x1, y1, s2, x2, y2 = rng.uniform(-1, 1, 6)
        g1 = HeisenbergElement(s1, [x1], [y1])
        g2 = HeisenbergElement(s2, [x2], [y2])
        assert rep.homomorphism_defect(0.8, g1, g2, F) < 1e-12
        assert rep.rho_h(0.8, g1, F).norm() == pytest.approx(F.norm(), rel=1e-12)


def test_central_character():
    g = HeisenbergElement(0.25, [0.0], [0.0])
    out = rep.rho_h(2.0, g, F)
    np.testing.assert_allclose(out.samples, np.exp(-2j * math.pi * 0.5) * F.samples, atol=1e-14)


def test_two_degrees_of_freedom():
    g1 = HeisenbergElement(0.1, [0.2, -0.3], [0.4, 0.1])
    g2 = HeisenbergElement(-0.5, [0.3, 0.3], [-0.2, 0.6])
    defects = []
    for n in (32, 40):
        ax = Axis(-4, 4, n)
        f = PhaseGrid.from_function(
            (ax,) * 4, lambda q1, q2, p1, p2: np.exp(-math.pi * (q1**2 + q2**2 + p1**2 + p2**2))
        )
        defects.append(rep.homomorphism_defect(0.7, g1, g2, f))
    # the phase factors move spectral mass towards Nyquist, so the defect is a resolution effect
    assert defects[1] < 1e-5 < defects[0]


def test_classical_characters():
    g = HeisenbergElement(9.0, [0.5], [0.25])
    assert rep.rho_classical((1.0, 2.0), g) == pytest.approx(np.exp(-2j * math.pi * (0.5 + 0.5)))
    h = HeisenbergElement(1.0, [0.1], [0.3])
    assert rep.rho_classical((1.0, 2.0), g * h) == pytest.approx(
        rep.rho_classical((1.0, 2.0), g) * rep.rho_classical((1.0, 2.0), h)
    )


def test_rho_rejects_bad_input():
    with pytest.raises(ValueError):
        rep.rho_h(0.0, HeisenbergElement(0, [0], [0]), F)
    with pytest.raises(ValueError):
        rep.rho_h(1.0, HeisenbergElement(0, [0, 0], [0, 0]), F)
    with pytest.raises(rep.TruncationError):
        rep.rho_h(1.0, HeisenbergElement(0, [0], [40.0]), F)


# -- derivatives and derived operators ----------------------------------------


def test_spectral_derivative_of_gaussian():
    q, p = F.mesh()
    dq = rep.derivative(F, 0, "spectral")
    np.testing.assert_allclose(dq, -2 * math.pi * (q - 0.3) * F.samples, atol=1e-10)


@pytest.mark.parametrize("scheme,order", [("fd2", 2), ("fd4", 4)])
def test_finite_difference_orders(scheme, order):
    errs = []
    for n in (128, 256):
        ax = Axis(-6, 6, n)
        f = PhaseGrid.from_function((ax, ax), gauss)
        q, p = f.mesh()
        exact = -2 * math.pi * (p + 0.2) * f.samples
        errs.append(np.max(np.abs(rep.derivative(f, 1, scheme) - exact)))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(order, abs=0.15)


def test_derived_operators_closed_form():
    hbar = 0.6
    ops = rep.derived_ops(hbar)
    q, p = F.mesh()
    fq = -2 * math.pi * (q - 0.3) * F.samples
    fp = -2 * math.pi * (p + 0.2) * F.samples
    np.testing.assert_allclose(ops.X(0, F).samples, hbar * fp + 0.5j * q * F.samples, atol=1e-10)
    np.testing.assert_allclose(ops.Y(0, F).samples, -hbar * fq + 0.5j * p * F.samples, atol=1e-10)
    np.testing.assert_allclose(ops.S(F).samples, -2j * math.pi * hbar * F.samples)


@pytest.mark.parametrize("hbar", [0.3, 1.0, 2.5])
def test_commutator_constant_is_i(hbar):
    c = rep.commutator_constant(hbar, F)
    assert abs(c - 1j) < 1e-10


def test_unknown_scheme():
    with pytest.raises(ValueError):
        rep.derived_ops(1.0, "fd6")
    with pytest.raises(ValueError):
        rep.derivative(F, 0, "fd6")


# -- Fock space ---------------------------------------------------------------


def test_vacuum_is_annihilated():
    ax = Axis(-6, 6, 128)
    v = rep.vacuum((ax, ax), 1.0)
    assert rep.fock_residual(1.0, v) < 1e-12 * v.norm() + 1e-14


def test_dbar_on_q_times_vacuum():
    # D(q v) = (i hbar / 2) v because D v = 0
    hbar = 1.3
    ax = Axis(-6, 6, 128)
    v = rep.vacuum((ax, ax), hbar)
    q, _ = v.mesh()
    out = rep.dbar(hbar)(v.with_samples(q * v.samples))
    np.testing.assert_allclose(out.samples, 0.5j * hbar * v.samples, atol=1e-12)


def test_coherent_states_stay_in_fock_space():
    ax = Axis(-6, 6, 128)
    c = rep.coherent_state(1.0, HeisenbergElement(0.0, [0.5], [-0.3]), (ax, ax))
    assert rep.fock_residual(1.0, c) < 1e-12
    q, _ = c.mesh()
    assert rep.fock_residual(1.0, c.with_samples(q * c.samples)) > 0.1 * c.norm()


def test_fock_needs_positive_hbar():
    with pytest.raises(ValueError):
        rep.fock_residual(-1.0, F)
    with pytest.raises(IndexError):
        rep.dbar(1.0, j=3)(F)


# -- kernels ------------------------------------------------------------------

KAX = Axis.centered(16, 0.25)
SMALL = Axis(-6, 6, 96)
FS = PhaseGrid.from_function((SMALL, SMALL), gauss)


def test_point_kernel_is_a_group_element():
    hbar = 0.8
    k = rep.point_kernel(hbar, KAX, KAX, 11, 5)
    got = rep.rho_of_kernel(hbar, k, FS, support_tol=1.0)
    want = rep.rho_h(hbar, HeisenbergElement(0.0, [KAX.points[11]], [KAX.points[5]]), FS)
    np.testing.assert_allclose(got.samples, want.samples, atol=1e-12)


def gaussian_kernel(hbar, c=(0.0, 0.0), phase=0.0):
    x, y = np.meshgrid(KAX.points, KAX.points, indexing="ij")
    s = np.exp(-8 * ((x - c[0]) ** 2 + (y - c[1]) ** 2) + 1j * phase * x)
    s[np.abs(s) < 1e-300] = 0
    return TwistedKernel(hbar, KAX, KAX, s)


def test_kernel_action_is_linear():
    hbar = 0.8
    k1, k2 = gaussian_kernel(hbar, (0.2, 0.0)), gaussian_kernel(hbar, (0.0, -0.3), 1.0)
    both = rep.rho_of_kernel(hbar, k1 * 2.0 + k2 * (1 - 1j), FS, support_tol=1e-3)
    sep = rep.rho_of_kernel(hbar, k1, FS, support_tol=1e-3) * 2.0 + rep.rho_of_kernel(hbar, k2, FS, support_tol=1e-3) * (
        1 - 1j
    )
    np.testing.assert_allclose(both.samples, sep.samples, atol=1e-12)


def test_antiderivative_scales_the_operator():
    hbar = 0.8
    k = gaussian_kernel(hbar, (0.1, 0.1))
    lhs = rep.rho_of_kernel(hbar, br.antiderivative(k), FS, support_tol=1e-3)
    rhs = rep.rho_of_kernel(hbar, k, FS, support_tol=1e-3) * (2 * math.pi / (1j * hbar))
    np.testing.assert_allclose(lhs.samples, rhs.samples, atol=1e-10)


def test_kernel_support_is_checked():
    hbar = 0.8
    wide = TwistedKernel(hbar, KAX, KAX, np.ones((16, 16)))
    with pytest.raises(rep.TruncationError):
        rep.rho_of_kernel(hbar, wide, FS)
    with pytest.raises(ValueError):
        rep.rho_of_kernel(0.5, gaussian_kernel(hbar), FS)


def test_edge_mass_flags_truncation():
    narrow = PhaseGrid.from_function((SMALL, SMALL), gauss)
    wide = PhaseGrid.from_function((SMALL, SMALL), lambda q, p: gauss(q, p, a=0.01))
    assert rep.edge_mass(narrow) < 1e-20
    assert rep.edge_mass(wide) > 1e-3


def test_twisted_convolution_intertwines_composition():
    # the product kernel is wider than its factors, so it gets a larger window
    hbar = 0.8
    wide = Axis.centered(24, 0.25)
    x, y = np.meshgrid(wide.points, wide.points, indexing="ij")
    k1 = TwistedKernel(hbar, wide, wide, np.exp(-8 * ((x - 0.2) ** 2 + (y + 0.1) ** 2)))
    k2 = TwistedKernel(hbar, wide, wide, np.exp(-8 * ((x + 0.1) ** 2 + (y - 0.2) ** 2) + 0.5j * x))
    act = lambda k, f: rep.rho_of_kernel(hbar, k, f, support_tol=1e-3)  # noqa: E731
    lhs = act(br.twisted_convolution(k1, k2), FS)
    rhs = act(k1, act(k2, FS))
    assert (lhs - rhs).norm() / rhs.norm() < 1e-12
