"""Compiled and fallback kernels must agree bit-for-bit on the public API."""
import math

import numpy as np
import pytest

from cvxlab import _core_py

compiled = pytest.importorskip("cvxlab._core",
                               reason="compiled kernels not built")


def _pairs(seed, batch=64, dim=3):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((batch, dim)) + 1j * rng.standard_normal((batch, dim))
    B = rng.standard_normal((batch, dim)) + 1j * rng.standard_normal((batch, dim))
    return A, B


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0, math.inf])
def test_lp_norm_parity(p):
    A, _ = _pairs(0)
    for row in A:
        assert compiled.lp_norm(row, p) == pytest.approx(
            _core_py.lp_norm(row, p), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_lp_norms_parity(p):
    A, _ = _pairs(1)
    got = np.asarray(compiled.lp_norms(A, p))
    want = np.asarray(_core_py.lp_norms(A, p))
    assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


def test_weighted_norms_parity():
    A, _ = _pairs(2)
    w = np.array([0.5, 2.0, 1.25])
    for p in (1.0, 2.5, math.inf):
        got = np.asarray(compiled.lp_norms(A, p, w))
        want = np.asarray(_core_py.lp_norms(A, p, w))
        assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("p,q", [(1.0, 1.0), (2.0, 2.0), (math.inf, 1.0),
                                 (1.5, 0.5), (4.0, 2.0)])
def test_circle_qpow_sum_parity(p, q):
    A, B = _pairs(3, batch=8)
    for a, b in zip(A, B):
        got = compiled.circle_qpow_sum(a, b, p, q, 32, 0.1, 2 * np.pi / 32)
        want = _core_py.circle_qpow_sum(a, b, p, q, 32, 0.1, 2 * np.pi / 32)
        assert got == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("p,q", [(1.0, 1.0), (2.0, 2.0), (math.inf, 2.0)])
def test_circle_qpow_means_parity(p, q):
    A, B = _pairs(4)
    got = np.asarray(compiled.circle_qpow_means(A, B, p, q, 64))
    want = np.asarray(_core_py.circle_qpow_means(A, B, p, q, 64))
    assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


def test_backend_reports_which_kernels_run():
    import cvxlab.backend as backend
    assert backend.BACKEND in ("compiled", "python")
