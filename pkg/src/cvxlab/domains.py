"""Domains cut out by a defining function rho < 0.

Builds ball domains over normed spaces, samples their boundaries, computes
tangential Levi data at boundary points, certifies the largest analytic
disc through a point, and runs the exhaustion-function and unit-ball
convexity checks built on those pieces.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import circle, moduli, pshlab, spaces
from .errors import (ContractViolation, DegenerateDefiningFunction,
                     NoDataError, NonSmoothPoint, NumericFailure,
                     SamplingError)

GRAD_FLOOR = 1e-7          # below this the defining function is degenerate
SMOOTH_DISAGREE = 1e-3     # one-sided slope mismatch that flags a kink
BOUNDARY_RHO_TOL = 1e-10


@dataclass
class DomainSpec:
    """The open set {rho < 0} with bookkeeping for sampling.

    kind records how rho was built: "p_power" (sum |z_k|^p - R^p, smooth for
    even integer p), "norm" (||z|| - R), or "custom".
    """

    rho: pshlab.FieldOracle
    dim: int
    box: np.ndarray
    interior_point: np.ndarray
    smooth: bool = True
    name: str = ""
    kind: str = "custom"
    space: Optional[spaces.SpaceSpec] = None
    radius: float = 0.0


RHO_KINDS = ("p_power", "norm_minus_one")


def ball_of(space: spaces.SpaceSpec, radius: float = 1.0,
            rho_kind: Optional[str] = None) -> DomainSpec:
    """Ball {||z|| < radius} with the smoothest defining function available.

    Even integer p gives the polynomial sum |z_k|^p - radius^p; every other
    family falls back to ||z|| - radius, which has kinks the Levi machinery
    must detect rather than average over. rho_kind forces the choice.
    """
    if radius <= 0:
        raise ContractViolation("radius must be positive")
    n = space.dim
    p = space.p
    p_power = (space.family == "hilbert"
               or (space.family in ("lp", "weighted_lp")
                   and p is not None and math.isfinite(p)
                   and p >= 2 and float(p) == int(p) and int(p) % 2 == 0))
    if rho_kind is not None:
        if rho_kind not in RHO_KINDS:
            raise ContractViolation(f"unknown rho kind {rho_kind!r}")
        if rho_kind == "p_power" and not p_power:
            raise ContractViolation(
                "p_power defining function needs even integer p or a hilbert space")
        p_power = rho_kind == "p_power"
    if p_power:
        pw = 2.0 if space.family == "hilbert" else float(p)
        w = space.weights

        def fn(z):
            az = np.abs(np.asarray(z, dtype=np.complex128)) ** pw
            if w is not None:
                az = az * w
            return float(np.sum(az)) - radius ** pw

        def batch(Z):
            az = np.abs(np.asarray(Z, dtype=np.complex128)) ** pw
            if w is not None:
                az = az * w[None, :]
            return np.sum(az, axis=1) - radius ** pw

        rho = pshlab.FieldOracle(fn, dim=n, batch=batch,
                                 name=f"{space.label}-ball-p{pw:g}")
        kind, smooth = "p_power", True
    else:
        rho = pshlab.FieldOracle(
            lambda z: float(spaces.norm(space, z)) - radius,
            batch=lambda Z: spaces.norms(space, Z) - radius,
            dim=n, smoothness_hint="lipschitz",
            name=f"{space.label}-ball-norm")
        kind, smooth = "norm_minus_one", space.family == "hilbert"
    half = 1.1 * radius * max(1.0, space.triangle_constant)
    box = np.tile([-half, half], (2 * n, 1))
    return DomainSpec(rho, n, box, np.zeros(n, dtype=np.complex128),
                      smooth, f"ball({space.label},{radius:g})", kind,
                      space, float(radius))


def _rho_batch(domain, Z):
    b = domain.rho.batch
    if b is not None:
        return np.asarray(b(Z), dtype=np.float64)
    return np.array([float(domain.rho(z)) for z in Z])


def interior_sample(domain: DomainSpec, count: int, seed=0, depth=0.0,
                    max_tries=2000) -> np.ndarray:
    """Rejection-sample points with rho <= -depth inside the domain box."""
    rng = spaces.rng_for(seed, "interior", domain.name)
    lo, hi = domain.box[:, 0], domain.box[:, 1]
    out = np.empty((count, domain.dim), dtype=np.complex128)
    got = 0
    for _ in range(max_tries):
        if got == count:
            break
        raw = lo + (hi - lo) * rng.random((max(count - got, 16), 2 * domain.dim))
        Z = raw[:, 0::2] + 1j * raw[:, 1::2]
        vals = _rho_batch(domain, Z)
        good = Z[vals <= -depth]
        take = min(len(good), count - got)
        out[got:got + take] = good[:take]
        got += take
    if got < count:
        raise SamplingError(f"only {got}/{count} interior points at depth {depth}")
    return out


def boundary_sample(domain: DomainSpec, count: int, seed=0) -> np.ndarray:
    """Points on {rho = 0}: rays from the interior point, sign bisection."""
    rng = spaces.rng_for(seed, "boundary", domain.name)
    n = domain.dim
    raw = rng.standard_normal((count, 2 * n))
    U = raw[:, 0::2] + 1j * raw[:, 1::2]
    U = U / np.linalg.norm(U, axis=1)[:, None]
    x0 = domain.interior_point
    if float(domain.rho(x0)) >= 0:
        raise ContractViolation("interior_point is not interior")
    span = float(np.max(domain.box[:, 1] - domain.box[:, 0]))
    out = np.empty((count, n), dtype=np.complex128)
    for i in range(count):
        u = U[i]
        t_hi = 1e-3 * span
        for _ in range(80):
            if float(domain.rho(x0 + t_hi * u)) > 0:
                break
            t_hi *= 2.0
            if t_hi > 1e3 * span:
                raise SamplingError("ray never left the domain; unbounded?")
        t_lo = 0.0
        while t_hi - t_lo > 1e-15 * max(1.0, t_hi):
            mid = 0.5 * (t_lo + t_hi)
            if float(domain.rho(x0 + mid * u)) > 0:
                t_hi = mid
            else:
                t_lo = mid
        pt = x0 + 0.5 * (t_lo + t_hi) * u
        r = float(domain.rho(pt))
        if abs(r) > BOUNDARY_RHO_TOL:
            raise NumericFailure(f"boundary residual {r:.3e} at sample {i}")
        out[i] = pt
    return out


# --- analytic disc radii ----------------------------------------------------


def _disc_feasible(domain, a, v, r, nodes):
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    pts = a[None, :] + r * np.exp(1j * th)[:, None] * v[None, :]
    return float(np.max(_rho_batch(domain, pts))) < 0.0


def disc_radius(domain: DomainSpec, a, v, nodes=64) -> float:
    """Largest r with the closed disc a + r conj(D) v inside the domain,
    certified by rho < 0 on a 256-node circle at the returned radius."""
    a = spaces.as_cvec(a, domain.dim)
    v = np.asarray(v, dtype=np.complex128)
    if float(domain.rho(a)) >= 0:
        return 0.0
    span = float(np.max(domain.box[:, 1] - domain.box[:, 0]))
    r_hi = 1e-6 * span
    for _ in range(80):
        if not _disc_feasible(domain, a, v, r_hi, nodes):
            break
        r_hi *= 2.0
        if r_hi > 1e3 * span:
            raise SamplingError("disc never hit the boundary; unbounded?")
    else:
        raise SamplingError("disc never hit the boundary")
    r_lo = 0.0
    while r_hi - r_lo > 1e-10 * max(1e-6, r_hi):
        mid = 0.5 * (r_lo + r_hi)
        if _disc_feasible(domain, a, v, mid, nodes):
            r_lo = mid
        else:
            r_hi = mid
    # re-certify against a finer circle; shrink if the coarse grid missed
    while r_lo > 0 and not _disc_feasible(domain, a, v, r_lo, 256):
        r_lo *= 1.0 - 1e-6
    return r_lo


def ball_disc_radii(space: spaces.SpaceSpec, radius, A, B, nodes=64,
                    iters=60) -> np.ndarray:
    """disc_radius for many (a, b) pairs in a norm ball, one bisection for
    all rows. B rows should be unit vectors in the space norm."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    m = A.shape[0]
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    ph = np.exp(1j * th)

    def max_norm(s):
        pts = A[:, None, :] + s[:, None, None] * ph[None, :, None] * B[:, None, :]
        flat = pts.reshape(m * nodes, -1)
        return spaces.norms(space, flat).reshape(m, nodes).max(axis=1)

    base = spaces.norms(space, A)
    if np.any(base >= radius):
        raise ContractViolation("all centers must be strictly inside the ball")
    lo = np.zeros(m)
    hi = np.full(m, 1e-3 * radius)
    for _ in range(80):
        bad = max_norm(hi) < radius
        if not np.any(bad):
            break
        hi[bad] *= 2.0
        if np.max(hi) > 1e6 * radius:
            raise NumericFailure("vector disc search diverged")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        feas = max_norm(mid) < radius
        lo = np.where(feas, mid, lo)
        hi = np.where(feas, hi, mid)
    return lo


# --- Levi geometry on the boundary ------------------------------------------


@dataclass
class LeviReport:
    point: np.ndarray
    gradient: np.ndarray
    tangent_basis: np.ndarray          # (n-1, n), unitary rows
    levi_tangential: pshlab.HermitianMatrix
    min_eigenvalue: float
    grad_norm: float
    smooth_ok: bool


def smoothness_probe(f, a, h=None):
    """Compare one-sided slopes along every real coordinate direction;
    raise NonSmoothPoint when they disagree beyond SMOOTH_DISAGREE."""
    a = spaces.as_cvec(a)
    n = a.shape[0]
    if h is None:
        h = 1e-5 * (1.0 + float(np.linalg.norm(a)))
    fa = float(f(a))
    worst = 0.0
    for k in range(n):
        for unit in (1.0, 1j):
            e = np.zeros(n, dtype=np.complex128)
            e[k] = unit
            fwd = (float(f(a + h * e)) - fa) / h
            bwd = (fa - float(f(a - h * e))) / h
            scale = max(1.0, abs(fwd), abs(bwd))
            worst = max(worst, abs(fwd - bwd) / scale)
    if worst > SMOOTH_DISAGREE:
        raise NonSmoothPoint(f"one-sided slopes disagree by {worst:.3e}",
                             point=a, disagreement=worst)
    return worst


def tangent_frame(gradient) -> np.ndarray:
    """Unitary basis of the complex tangent space {b : sum b_k g_k = 0}."""
    g = np.asarray(gradient, dtype=np.complex128)
    n = g.shape[0]
    if n == 1:
        return np.empty((0, 1), dtype=np.complex128)
    normal = np.conj(g) / np.linalg.norm(g)
    M = np.eye(n, dtype=np.complex128)
    M[:, 0] = normal
    # push the column most aligned with the normal out of the way
    k = int(np.argmax(np.abs(normal)))
    if k != 0:
        M[:, k] = np.eye(n, dtype=np.complex128)[:, 0]
    Q, _ = np.linalg.qr(M)
    # first column of Q spans the normal; the rest is the tangent frame
    return np.ascontiguousarray(Q[:, 1:].T)


def levi_report(domain: DomainSpec, a, r0=None, ctrl=None,
                probe_smoothness=True) -> LeviReport:
    """Tangential Levi form of the defining function at a boundary point."""
    a = spaces.as_cvec(a, domain.dim)
    worst = 0.0
    if probe_smoothness:
        worst = smoothness_probe(domain.rho, a)
    g = pshlab.gradient_dprime(domain.rho, a)
    gn = float(np.linalg.norm(g))
    if gn <= GRAD_FLOOR:
        raise DegenerateDefiningFunction(
            f"|grad rho| = {gn:.3e} at a boundary point")
    basis = tangent_frame(g)
    if basis.shape[0] == 0:
        H = pshlab.HermitianMatrix(np.zeros((0, 0), dtype=np.complex128), 0.0)
        return LeviReport(a, g, basis, H, math.inf, gn, True)
    H = pshlab.levi_matrix(domain.rho, a, basis=basis, r0=r0, ctrl=ctrl)
    eig = float(np.linalg.eigvalsh(H.values).min())
    return LeviReport(a, g, basis, H, eig, gn, worst <= SMOOTH_DISAGREE)


@dataclass
class BoundaryScanReport:
    n_points: int
    n_skipped: int
    worst_min_eig: float
    witness: Optional[np.ndarray]
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_min_eig >= -self.tol


def strict_levi_scan(domain: DomainSpec, count=50, seed=0, tol=1e-8,
                     r0=None, ctrl=None) -> BoundaryScanReport:
    """Minimum tangential Levi eigenvalue over sampled boundary points.

    Points where the defining function shows a kink are counted and
    skipped; if everything is skipped there is no verdict to report.
    """
    pts = boundary_sample(domain, count, seed)
    worst = math.inf
    wit = None
    skipped = 0
    for a in pts:
        try:
            rep = levi_report(domain, a, r0=r0, ctrl=ctrl)
        except NonSmoothPoint:
            skipped += 1
            continue
        if rep.min_eigenvalue < worst:
            worst = rep.min_eigenvalue
            wit = a
    if wit is None and count > 0:
        raise NoDataError(f"all {count} boundary points skipped as non-smooth")
    return BoundaryScanReport(count, skipped, float(worst), wit, tol)


# --- exhaustion functions ----------------------------------------------------


def _log_inv_rho(domain) -> pshlab.FieldOracle:
    """-log|rho| = -log(-rho) on the interior; +inf outside is an error the
    quadrature surfaces rather than averages over."""
    base_batch = domain.rho.batch

    def fn(z):
        v = float(domain.rho(z))
        return -math.log(-v) if v < 0 else math.inf

    batch = None
    if base_batch is not None:
        def batch(Z):
            v = np.asarray(base_batch(Z), dtype=np.float64)
            out = np.full(v.shape, np.inf)
            neg = v < 0
            out[neg] = -np.log(-v[neg])
            return out

    return pshlab.FieldOracle(fn, dim=domain.dim, batch=batch,
                              name=f"-log|rho| of {domain.name}")


def exhaustion_identity_residual(domain: DomainSpec, a, b, r0=None,
                                 ctrl=None) -> float:
    """Relative mismatch between the Levi form of -log|rho| and its two
    expansion terms (curvature of rho over |rho|, squared holomorphic
    derivative over rho^2) at an interior point."""
    a = spaces.as_cvec(a, domain.dim)
    b = np.asarray(b, dtype=np.complex128)
    rho_a = float(domain.rho(a))
    if rho_a >= 0:
        raise ContractViolation("identity is checked at interior points")
    u = _log_inv_rho(domain)
    bn = float(np.linalg.norm(b))
    safe = 0.2 * disc_radius(domain, a, b / bn) / bn
    r_use = min(r0 if r0 is not None else pshlab.default_radius(a), safe)
    lhs = pshlab.levi_quadratic(u, a, b, r0=r_use, ctrl=ctrl)
    term1 = pshlab.levi_quadratic(domain.rho, a, b, r0=r_use, ctrl=ctrl) / abs(rho_a)
    term2 = abs(pshlab.dprime(domain.rho, a, b)) ** 2 / rho_a ** 2
    rhs = term1 + term2
    return abs(lhs - rhs) / max(1.0, abs(rhs))


@dataclass
class ExhaustionReport:
    passed: bool
    worst_margin: float
    witness: Optional[tuple]
    inf_phi_rho: float
    threshold: float
    n_samples: int
    n_skipped: int
    tol: float


def exhaustion_check(domain: DomainSpec, phi, samples=100, seed=0,
                     depth=0.02, tol=1e-6, threshold=1e-6,
                     ctrl=None) -> ExhaustionReport:
    """Check -log|rho| has circle-mean curvature at least phi pointwise.

    phi is a callable on interior points (a float is promoted to the
    constant function). Also reports inf phi * |rho| over the samples,
    which must clear `threshold` for the curvature bound to be usable
    uniformly.
    """
    if not callable(phi):
        c = float(phi)
        phi = lambda z: c
    u = _log_inv_rho(domain)
    rng = spaces.rng_for(seed, "exhaustion", domain.name)
    A = interior_sample(domain, samples, seed=seed, depth=depth)
    raw = rng.standard_normal((samples, 2 * domain.dim))
    B = raw[:, 0::2] + 1j * raw[:, 1::2]
    B = B / np.linalg.norm(B, axis=1)[:, None]
    worst = math.inf
    wit = None
    inf_pr = math.inf
    skipped = 0
    for i in range(samples):
        a, b = A[i], B[i]
        rho_a = float(domain.rho(a))
        if rho_a >= 0:
            raise SamplingError("interior sampler produced a non-interior point")
        inf_pr = min(inf_pr, float(phi(a)) * abs(rho_a))
        safe = 0.2 * disc_radius(domain, a, b)
        if safe <= 0:
            skipped += 1
            continue
        r_use = min(pshlab.default_radius(a), safe)
        lev = pshlab.levi_quadratic(u, a, b, r0=r_use, ctrl=ctrl)
        m = lev - float(phi(a))
        if m < worst:
            worst = m
            wit = (a, b, r_use)
    if wit is None:
        raise NoDataError("no exhaustion sample was usable")
    passed = worst >= -tol and inf_pr >= threshold
    return ExhaustionReport(passed, float(worst), wit, float(inf_pr),
                            threshold, samples, skipped, tol)


# --- unit-ball convexity check ----------------------------------------------


@dataclass
class UniformBallReport:
    passed: bool
    skipped: bool
    reason: str
    lam_hat: float
    lam0: float
    worst_margin: float
    witness: Optional[tuple]
    n_pairs: int
    slack: float
    safety: float


def unit_ball_uniform_check(space: spaces.SpaceSpec, pairs=2000, seed=0,
                            budget=4096, slack=1e-8, safety=0.9,
                            ctrl=None) -> UniformBallReport:
    """Second-order growth of circle means of the norm on discs in 2B.

    Estimates the r=2, q=1 convexity constant, converts it to the
    quadratic gain sqrt(lam/4 + 1/4) - 1/2, and checks
    mean ||a + e^{it} b|| >= ||a|| + safety * gain * ||b||^2 over sampled
    discs a + conj(D) b contained in the ball of radius 2. A constant
    estimate at numerical zero means no gain is claimable; the check is
    then skipped, not failed.
    """
    est = moduli.estimate_I(space, r=2, q=1, budget=budget,
                            seed=seed, ctrl=ctrl)
    lam_hat = est.lambda_estimate
    if lam_hat <= 1e-6:
        return UniformBallReport(True, True, "no convexity gain detected",
                                 lam_hat, 0.0, math.inf, None, 0, slack, safety)
    lam0 = math.sqrt(lam_hat / 4.0 + 0.25) - 0.5
    rng = spaces.rng_for(seed, "unit-ball-check", space.label)
    ahat = spaces.random_unit(space, pairs, seed=rng.integers(0, 2**31))
    bhat = spaces.random_unit(space, pairs, seed=rng.integers(0, 2**31))
    ta = 1.9 * rng.random(pairs)
    A = ta[:, None] * ahat
    r_star = ball_disc_radii(space, 2.0, A, bhat)
    sb = safety * rng.random(pairs) * r_star
    worst = math.inf
    wit = None
    q = 1.0
    for i in range(pairs):
        if sb[i] <= 0:
            continue
        b = sb[i] * bhat[i]
        mean = circle.power_mean_on_circle(space, A[i], b, q, ctrl).value
        margin = mean - ta[i] - safety * lam0 * sb[i] ** 2
        if margin < worst:
            worst = margin
            wit = (A[i], b)
    passed = bool(worst >= -slack)
    return UniformBallReport(passed, False, "", float(lam_hat), lam0,
                             float(worst), wit, pairs, slack, safety)


# --- serialization -----------------------------------------------------------


def domain_from_json_dict(d: dict) -> DomainSpec:
    """Build a ball domain from {"ball_of": <space>, "rho": kind, "radius": R}."""
    from .errors import SchemaError
    allowed = {"ball_of", "rho", "radius"}
    unknown = set(d) - allowed
    if unknown:
        raise SchemaError(f"unknown domain keys: {sorted(unknown)}")
    if "ball_of" not in d:
        raise SchemaError("domain JSON needs a ball_of space")
    sp = d["ball_of"]
    space = (spaces.parse_space(sp) if isinstance(sp, str)
             else spaces.space_from_json_dict(sp))
    kind = d.get("rho")
    if kind == "custom":
        raise SchemaError("custom defining functions cannot be deserialized")
    return ball_of(space, float(d.get("radius", 1.0)), rho_kind=kind)


def parse_domain(text: str) -> DomainSpec:
    """Domain mini-grammar: inline JSON, or `ball:<space spec>[:radius]`."""
    text = text.strip()
    if text.startswith("{"):
        import json
        return domain_from_json_dict(json.loads(text))
    if text.startswith("ball:"):
        from .errors import SchemaError
        rest = text[5:]
        try:
            return ball_of(spaces.parse_space(rest))
        except SchemaError:
            pass  # maybe the last field is a radius
        head, _, tail = rest.rpartition(":")
        try:
            return ball_of(spaces.parse_space(head), float(tail))
        except ValueError as exc:
            raise SchemaError(f"bad domain spec {text!r}") from exc
    # bare space spec means its unit ball
    return ball_of(spaces.parse_space(text))
