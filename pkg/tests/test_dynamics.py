import math

import numpy as np
import pytest

from pmechanics import dynamics as dy
from pmechanics.poly import monomial_basis, parse_observable

OSC = dy.HamiltonianSpec.parse("(p^2 + q^2)/2")


def test_oscillator_rk4_matches_rotation():
    rec = dy.evolve_classical(OSC, 1.0, 0.5, 2 * math.pi, 1e-3)
    q, p = rec.final
    assert abs(q - 1.0) < 1e-10 and abs(p - 0.5) < 1e-10
    t = rec.times
    np.testing.assert_allclose(rec.states[:, 0], np.cos(t) + 0.5 * np.sin(t), atol=1e-10)
    assert rec.metadata["energy_drift"] < 1e-10


def test_leapfrog_is_second_order_and_bounded():
    errs = []
    for dt in (1e-2, 5e-3):
        rec = dy.evolve_classical(OSC, 1.0, 0.0, 10.0, dt, method="leapfrog")
        errs.append(abs(rec.final[0] - math.cos(10.0)))
        assert rec.metadata["energy_drift"] < dt**2
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


def test_leapfrog_needs_separable_hamiltonian():
    H = dy.HamiltonianSpec.parse("q*p + p^2")
    assert not H.is_separable()
    with pytest.raises(ValueError):
        dy.evolve_classical(H, 1.0, 0.0, 1.0, 0.1, method="leapfrog")
    with pytest.raises(ValueError):
        dy.evolve_classical(OSC, 1.0, 0.0, 1.0, 0.1, method="euler")


def test_non_separable_energy_conservation():
    H = dy.HamiltonianSpec.parse("(p^2 + q^2)/2 + q^2*p^2/4")
    rec = dy.evolve_classical(H, 0.7, -0.3, 5.0, 1e-3)
    assert rec.metadata["energy_drift"] < 1e-10


def test_record_every_and_final_partial_step():
    rec = dy.evolve_classical(OSC, 1.0, 0.0, 1.05, 0.1, record_every=5)
    assert rec.times[-1] == pytest.approx(1.05)
    assert np.all(np.diff(rec.times) > 0)
    assert len(rec.times) == 4  # t = 0, 0.5, 1.0, 1.05


def test_blow_up_is_reported():
    H = dy.HamiltonianSpec.parse("p^2/2 - q^6")
    with np.errstate(all="ignore"), pytest.raises(dy.BlowUpError) as info:
        dy.evolve_classical(H, 2.0, 0.0, 50.0, 0.1)
    assert info.value.step > 0


def test_trajectory_record_validates_times():
    with pytest.raises(ValueError):
        dy.TrajectoryRecord(np.array([0.0, 0.0]), np.zeros((2, 2)), {})


def test_two_degrees_of_freedom():
    H = dy.HamiltonianSpec.parse("(p1^2 + q1^2)/2 + (p2^2 + 4*q2^2)/2", n=2)
    rec = dy.evolve_classical(H, [1.0, 1.0], [0.0, 0.0], 1.0, 1e-3)
    q1, q2, p1, p2 = rec.final
    assert q1 == pytest.approx(math.cos(1.0), abs=1e-10)
    assert q2 == pytest.approx(math.cos(2.0), abs=1e-10)


# -- observable flows ---------------------------------------------------------


def test_observable_flow_is_composition_with_classical_flow():
    f0 = parse_observable("q^3 + q*p - 2*p^2", 1, False)
    t = 1.3
    m = dy.evolve_observable_moyal(OSC, f0, 0.5, t, 1e-3)
    for q, p in [(0.4, -1.1), (1.0, 2.0)]:
        qt = q * math.cos(t) + p * math.sin(t)
        pt = -q * math.sin(t) + p * math.cos(t)
        assert m.final(q, p) == pytest.approx(f0(qt, pt), abs=1e-10)


def test_quadratic_hamiltonian_flow_independent_of_hbar():
    f0 = parse_observable("q^4 - q*p^2", 1, False)
    a = dy.evolve_observable_moyal(OSC, f0, 0.0, 1.0, 1e-2).metadata["coefficients"]
    b = dy.evolve_observable_moyal(OSC, f0, 0.9, 1.0, 1e-2).metadata["coefficients"]
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_higher_degree_needs_truncation():
    H = dy.HamiltonianSpec.parse("p^2/2 + q^4/4")
    f0 = parse_observable("q^2", 1, False)
    with pytest.raises(dy.TruncationRequiredError):
        dy.evolve_observable_moyal(H, f0, 0.1, 1.0, 0.01)
    with pytest.raises(ValueError):
        dy.evolve_observable_moyal(H, parse_observable("q^5", 1, False), 0.1, 1.0, 0.01, truncation=4)


def test_flow_matrix_correction_is_hbar_squared():
    H = dy.HamiltonianSpec.parse("p^2/2 + q^4/4")
    basis = monomial_basis(H.gens, 6)
    M0 = dy.flow_matrix(H, basis, 0.0)
    d1 = dy.flow_matrix(H, basis, 0.2) - M0
    d2 = dy.flow_matrix(H, basis, 0.1) - M0
    assert np.abs(d1).max() / np.abs(d2).max() == pytest.approx(4.0, rel=1e-12)


def test_gap_slope_for_quartic():
    H = dy.HamiltonianSpec.parse("p^2/2 + q^4/4")
    table = dy.moyal_vs_poisson_gap(H, parse_observable("p^3", 1, False), [0.2, 0.1, 0.05], 0.5, truncation=6)
    assert table.slope == pytest.approx(2.0, abs=0.05)
    assert len(table.rows()) == 3


def test_gap_vanishes_for_oscillator():
    table = dy.moyal_vs_poisson_gap(OSC, parse_observable("q^3", 1, False), [0.5, 0.1], 1.0)
    assert max(table.gaps) < 1e-14
    assert math.isnan(table.slope)
