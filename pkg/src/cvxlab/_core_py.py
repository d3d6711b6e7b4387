"""Pure-python (numpy) kernels.

Mirror of the compiled extension in _core.pyx; the backend module picks
one of the two at import time. Every function here must keep exactly the
same signature and semantics as its compiled twin.

Conventions: vectors are 1-d complex128 arrays, batches are 2-d (rows are
vectors). p is the norm exponent (p > 0, math.inf allowed), w an optional
positive weight vector of matching length.
"""
import math

import numpy as np

BACKEND_NAME = "python"


def lp_norm(z, p, w=None):
    """Weighted p-norm of a single complex vector. p < 1 gives the quasi-norm."""
    az = np.abs(z)
    if w is not None:
        az = w * az if p == math.inf else np.power(w, 1.0 / p) * az
        # note: weighted sup norm scales coordinates directly; finite p
        # weights the p-th powers, i.e. (sum w_k |z_k|^p)^(1/p).
    if p == math.inf:
        return float(az.max()) if az.size else 0.0
    if p == 2.0:
        return float(np.sqrt(np.sum(az * az)))
    if p == 1.0:
        return float(np.sum(az))
    return float(np.sum(az**p) ** (1.0 / p))


def lp_norms(Z, p, w=None):
    """Row-wise weighted p-norms of a batch. Returns a float64 vector."""
    az = np.abs(Z)
    if w is not None:
        az = (w * az) if p == math.inf else (np.power(w, 1.0 / p)[None, :] * az)
    if p == math.inf:
        return az.max(axis=1) if az.shape[1] else np.zeros(az.shape[0])
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", az, az))
    if p == 1.0:
        return az.sum(axis=1)
    return az.__pow__(p).sum(axis=1) ** (1.0 / p)


def circle_qpow_sum(a, b, p, q, n_nodes, theta0, dtheta, w=None):
    """Sum over j of ||a + e^{i(theta0 + j dtheta)} b||_p^q, j = 0..n_nodes-1.

    Summation order is the node order so that node-doubling refinements
    can combine partial sums deterministically.
    """
    th = theta0 + dtheta * np.arange(n_nodes)
    pts = a[None, :] + np.exp(1j * th)[:, None] * b[None, :]
    norms = lp_norms(pts, p, w)
    if q == 1.0:
        vals = norms
    elif q == 2.0:
        vals = norms * norms
    else:
        vals = norms**q
    # a plain python loop keeps the sum order identical to the compiled twin
    acc = 0.0
    for v in vals:
        acc += v
    return acc


def circle_qpow_means(A, B, p, q, n_nodes, w=None):
    """Mean of ||a_i + e^{i theta} b_i||_p^q over n_nodes equispaced angles,
    for every row pair (a_i, b_i). Returns a float64 vector of means."""
    th = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    phases = np.exp(1j * th)
    m, n = A.shape
    out = np.empty(m)
    # chunk the batch to bound the (chunk, nodes, dim) intermediate
    chunk = max(1, int(2_000_000 // max(1, n_nodes * n)))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        pts = A[lo:hi, None, :] + phases[None, :, None] * B[lo:hi, None, :]
        norms = lp_norms(pts.reshape(-1, n), p, w).reshape(hi - lo, n_nodes)
        if q == 1.0:
            vals = norms
        elif q == 2.0:
            vals = norms * norms
        else:
            vals = norms**q
        out[lo:hi] = vals.mean(axis=1)
    return out
