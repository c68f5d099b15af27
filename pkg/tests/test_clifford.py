import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from pmechanics.clifford import (
    Metric,
    MetricMismatchError,
    Multivector,
    anticommutator_table,
    dense_product,
    expected_anticommutator,
    generator,
    lower_index,
)

# Dirac matrices: gamma0^2 = 1, gammai^2 = -1
_S = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
_I2, _Z2 = np.eye(2), np.zeros((2, 2))
DIRAC = [np.block([[_I2, _Z2], [_Z2, -_I2]])] + [np.block([[_Z2, s], [-s, _Z2]]) for s in _S]


def gammas(metric):
    if metric.diag == (1, -1, -1, -1):
        mats = DIRAC
    elif metric.diag == (1, -1):
        mats = [np.array([[0, 1], [1, 0]]), np.array([[0, 1], [-1, 0]])]
    elif metric.diag == (1, 1, 1):
        mats = _S
    else:
        raise NotImplementedError
    scale = 1.0 if metric.convention == "standard" else 1 / math.sqrt(2)
    return [m * scale for m in mats]


def to_matrix(a: Multivector):
    g = gammas(a.metric)
    size = g[0].shape[0]
    out = np.zeros((size, size), dtype=complex)
    for blade, c in a.blades().items():
        m = np.eye(size, dtype=complex)
        for mu in blade:
            m = m @ g[mu]
        out += float(c) * m
    return out


def random_mv(rng, metric):
    return Multivector(metric, {b: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for b in range(1 << metric.dim)})


METRICS = [
    Metric.from_signature(1, 3),
    Metric.from_signature(1, 1),
    Metric((1, 1, 1)),
    Metric.from_signature(1, 3, "literal"),
    Metric.from_signature(1, 1, "literal"),
]


@pytest.mark.parametrize("metric", METRICS, ids=lambda m: f"{m.diag}-{m.convention}")
def test_product_matches_matrix_representation(metric):
    rng = random.Random(0)
    for _ in range(40):
        a, b = random_mv(rng, metric), random_mv(rng, metric)
        np.testing.assert_allclose(to_matrix(a * b), to_matrix(a) @ to_matrix(b), atol=1e-10)


@pytest.mark.parametrize("metric", METRICS, ids=lambda m: f"{m.diag}-{m.convention}")
def test_anticommutators(metric):
    table = anticommutator_table(metric)
    factor = 2 if metric.convention == "standard" else 1
    for mu, nu in itertools.product(range(metric.dim), repeat=2):
        want = factor * metric.diag[mu] if mu == nu else 0
        assert table[mu][nu].is_scalar()
        assert table[mu][nu].scalar_part() == want == expected_anticommutator(metric, mu, nu)


def test_lower_index_contracts_to_dimension():
    m = Metric.from_signature(1, 3)
    total = sum((generator(m, mu) * lower_index(m, mu) for mu in range(4)), Multivector.scalar(m, 0))
    assert total == Multivector.scalar(m, 4)


def test_associativity_exact():
    rng = random.Random(5)
    m = Metric((2, -3, Fraction(1, 2)))
    for _ in range(50):
        a, b, c = (random_mv(rng, m) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_dense_product_agrees_with_sparse():
    rng = random.Random(2)
    m = Metric.from_signature(1, 3)
    pairs = [(random_mv(rng, m), random_mv(rng, m)) for _ in range(20)]
    A = np.array([a.to_dense() for a, _ in pairs])
    B = np.array([b.to_dense() for _, b in pairs])
    C = dense_product(A, B, m)
    for row, (a, b) in zip(C, pairs):
        np.testing.assert_allclose(row, (a * b).to_dense(), atol=1e-12)


def test_metric_mismatch_and_validation():
    a = generator(Metric.from_signature(1, 1), 0)
    b = generator(Metric.from_signature(1, 3), 0)
    with pytest.raises(MetricMismatchError):
        a * b
    with pytest.raises(ValueError):
        Metric((1, 0))
    with pytest.raises(ValueError):
        Metric((1, -1), "other")


def test_blade_accessors():
    m = Metric.from_signature(1, 1)
    e01 = generator(m, 0) * generator(m, 1)
    assert e01[(0, 1)] == 1
    assert (generator(m, 1) * generator(m, 0))[(0, 1)] == -1
    assert e01.grade(2) == e01
    assert e01.grade(0) == Multivector.scalar(m, 0)
