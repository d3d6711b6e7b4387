"""Means over circles a + r e^{i theta} b.

Trapezoid rule on equispaced angles, which is spectrally accurate for
smooth integrands on the torus. Adaptive evaluation starts at 8 nodes and
doubles, reusing previous function values, until successive values agree
to tolerance; the interleaved offsets keep every level equispaced.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import spaces
from .backend import kernels
from .errors import ContractViolation, EvaluationError


@dataclass(frozen=True)
class QuadratureControls:
    tol: float = 1e-10
    max_nodes: int = 2**16
    start_nodes: int = 8

    def validated(self):
        if self.tol <= 0:
            raise ContractViolation("tol must be positive")
        n = self.start_nodes
        if n < 8 or (n & (n - 1)):
            raise ContractViolation("start_nodes must be a power of two >= 8")
        if self.max_nodes < 2 * n:
            raise ContractViolation("max_nodes must allow at least one doubling")
        return self


DEFAULT_CONTROLS = QuadratureControls()


@dataclass(frozen=True)
class CircleMeanResult:
    """value: the mean (power mean for norms); err_estimate: last doubling
    increment on the value scale; converged False means max_nodes was hit."""

    value: float
    nodes_used: int
    err_estimate: float
    converged: bool = True


def _kernel_qpow_sum(space, a, b, q, n, theta0, dtheta):
    if space.family in ("lp", "hilbert", "weighted_lp"):
        return float(kernels.circle_qpow_sum(a, b, space.p, q, n, theta0, dtheta,
                                             space.weights))
    th = theta0 + dtheta * np.arange(n)
    pts = a[None, :] + np.exp(1j * th)[:, None] * b[None, :]
    vals = spaces.norms(space, pts) ** q
    return float(np.sum(vals))


def qpow_mean_fixed(space, a, b, q, n_nodes) -> float:
    """Mean of ||a + e^{i theta} b||^q over n_nodes equispaced angles."""
    a = spaces.as_cvec(a, space.dim)
    b = spaces.as_cvec(b, space.dim)
    if q <= 0:
        raise ContractViolation("q must be positive")
    if n_nodes < 1:
        raise ContractViolation("n_nodes must be >= 1")
    return _kernel_qpow_sum(space, a, b, q, n_nodes, 0.0, 2.0 * math.pi / n_nodes) / n_nodes


def power_mean_fixed(space, a, b, q, n_nodes) -> float:
    """q-th power mean of the norm over n_nodes equispaced angles."""
    mq = qpow_mean_fixed(space, a, b, q, n_nodes)
    return mq ** (1.0 / q)


def qpow_mean_adaptive(space, a, b, q, ctrl=None):
    """Adaptive q-power mean of the norm.

    Returns (mq, nodes_used, err_estimate, converged) where mq is the mean
    of q-th powers and err_estimate is the last increment of mq**(1/q).
    """
    ctrl = (ctrl or DEFAULT_CONTROLS).validated()
    a = spaces.as_cvec(a, space.dim)
    b = spaces.as_cvec(b, space.dim)
    if q <= 0:
        raise ContractViolation("q must be positive")
    n = ctrl.start_nodes
    acc = _kernel_qpow_sum(space, a, b, q, n, 0.0, 2.0 * math.pi / n)
    value = (acc / n) ** (1.0 / q)
    while 2 * n <= ctrl.max_nodes:
        acc += _kernel_qpow_sum(space, a, b, q, n, math.pi / n, 2.0 * math.pi / n)
        n *= 2
        new_value = (acc / n) ** (1.0 / q)
        err = abs(new_value - value)
        value = new_value
        if err <= ctrl.tol:
            return acc / n, n, err, True
    warnings.warn(
        f"circle power mean did not converge below {ctrl.tol} at {n} nodes "
        f"(last increment {err:.3e})", RuntimeWarning)
    return acc / n, n, err, False


def power_mean_on_circle(space, a, b, q, ctrl=None) -> CircleMeanResult:
    """Adaptive q-th power mean of ||a + e^{i theta} b|| over the circle."""
    mq, n, err, ok = qpow_mean_adaptive(space, a, b, q, ctrl)
    return CircleMeanResult(mq ** (1.0 / q), n, err, ok)


def _field_batch(f, pts):
    batch = getattr(f, "batch", None)
    if batch is not None:
        return np.asarray(batch(pts), dtype=np.float64)
    return np.array([float(f(p)) for p in pts], dtype=np.float64)


def _field_level_sum(f, a, b, n, theta0, dtheta):
    """Sum of field values at one refinement level; None signals a -inf node."""
    th = theta0 + dtheta * np.arange(n)
    pts = a[None, :] + np.exp(1j * th)[:, None] * b[None, :]
    vals = _field_batch(f, pts)
    bad = np.isnan(vals) | (vals == math.inf)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise EvaluationError(
            f"field returned {vals[j]!r} on the circle at theta={th[j]:.12g}",
            point=pts[j], theta=float(th[j]))
    if np.any(vals == -math.inf):
        return None
    return float(np.sum(vals))


def mean_fixed(f, a, b, n_nodes) -> float:
    """Plain mean of a scalar field over n_nodes equispaced circle points."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    s = _field_level_sum(f, a, b, n_nodes, 0.0, 2.0 * math.pi / n_nodes)
    return -math.inf if s is None else s / n_nodes


def mean_on_circle(f, a, b, ctrl=None) -> CircleMeanResult:
    """Adaptive mean of a scalar field over the circle a + e^{i theta} b.

    f is any callable CVec -> float; an optional f.batch taking a stacked
    (m, dim) array short-circuits the per-point loop. A -inf value makes
    the mean -inf (upper-semicontinuous fields); NaN or +inf raise.
    """
    ctrl = (ctrl or DEFAULT_CONTROLS).validated()
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    n = ctrl.start_nodes
    acc = _field_level_sum(f, a, b, n, 0.0, 2.0 * math.pi / n)
    if acc is None:
        return CircleMeanResult(-math.inf, n, 0.0, True)
    value = acc / n
    while 2 * n <= ctrl.max_nodes:
        inc = _field_level_sum(f, a, b, n, math.pi / n, 2.0 * math.pi / n)
        if inc is None:
            return CircleMeanResult(-math.inf, 2 * n, 0.0, True)
        acc += inc
        n *= 2
        new_value = acc / n
        err = abs(new_value - value)
        value = new_value
        if err <= ctrl.tol:
            return CircleMeanResult(value, n, err, True)
    warnings.warn(
        f"circle mean did not converge below {ctrl.tol} at {n} nodes "
        f"(last increment {err:.3e})", RuntimeWarning)
    return CircleMeanResult(value, n, err, False)
