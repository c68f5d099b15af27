import os
import subprocess
import sys

import numpy as np
import pytest

from pmechanics import _kernels
from pmechanics.clifford import Metric, dense_table

needs_compiled = pytest.mark.skipif(_kernels.compiled is None, reason="compiled kernels not built")


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")
    assert (_kernels.BACKEND == "cython") == (_kernels.compiled is not None)


def test_env_var_forces_fallback():
    env = dict(os.environ, PMECH_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import pmechanics._kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


@needs_compiled
@pytest.mark.parametrize("shape", [(7, 7), (10, 13)])
def test_twisted_convolution_backends_agree(shape):
    rng = np.random.default_rng(0)
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    b = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    for sign in (1, -1):
        c = _kernels.compiled.twisted_convolution_direct(a, b, 0.2, 0.3, 0.9, sign)
        p = _kernels.python.twisted_convolution_direct(a, b, 0.2, 0.3, 0.9, sign)
        np.testing.assert_allclose(c, p, atol=1e-12)


@needs_compiled
@pytest.mark.parametrize("metric", [Metric.from_signature(1, 3), Metric((2, -1, 0.5)), Metric.from_signature(1, 1, "literal")])
def test_clifford_backends_agree(metric):
    rng = np.random.default_rng(1)
    size = 1 << metric.dim
    a = rng.standard_normal((50, size))
    b = rng.standard_normal((50, size))
    index, factor = dense_table(metric)
    c = _kernels.compiled.clifford_product_dense(a, b, index, factor)
    p = _kernels.python.clifford_product_dense(a, b, index, factor)
    np.testing.assert_allclose(c, p, atol=1e-12)


@needs_compiled
def test_clifford_kernel_accepts_read_only_views():
    metric = Metric.from_signature(1, 1)
    index, factor = dense_table(metric)
    a = np.broadcast_to(np.arange(4.0), (3, 4))
    out = _kernels.compiled.clifford_product_dense(a, a, index, factor)
    assert out.shape == (3, 4)


@needs_compiled
@pytest.mark.parametrize("m2", [0.0, 2.0])
def test_leapfrog_backends_agree(m2):
    n = 64
    u = np.arange(n) / n
    q = np.cos(2 * np.pi * u) + 0.1 * np.sin(6 * np.pi * u)
    p0 = np.sin(2 * np.pi * u)
    p1 = (np.roll(q, -1) - q) / (-0.05)
    c = _kernels.compiled.kg_leapfrog(q, p0, p1, 1.0, -1.0, m2, 0.02, 0.05, 300, 7)
    p = _kernels.python.kg_leapfrog(q, p0, p1, 1.0, -1.0, m2, 0.02, 0.05, 300, 7)
    for x, y in zip(c, p):
        np.testing.assert_allclose(np.asarray(x), np.asarray(y), atol=1e-12)
