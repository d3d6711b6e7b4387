"""Convexity moduli and the pl-convexity constant, by certified search.

Every estimator follows the same recipe: draw a seeded batch of candidate
pairs (one matrix row per sample, so a doubled budget extends the stream
without disturbing its prefix), keep the feasible ones, then polish the
best few with a derivative-free pattern search whose iterates stay
feasible. Reported values are exact objectives of feasible witnesses, so
they are certified upper bounds of the true infima, and they can only
improve as the budget doubles: refinement starts and re-evaluation
candidates are chosen per halving prefix of the sample stream, making the
candidate set of a doubled budget a superset of the smaller one.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from . import circle, spaces
from .backend import kernels
from .errors import (ContractViolation, InfeasibleError, NotUniformlyConvex,
                     SchemaError)

DEFAULT_BUDGET = 4096
MIN_DIR_NORM = 1e-3      # lower cap on ||b|| in the pl objective (noise floor)
MAX_DIR_NORM = 3.0       # beyond this the tail bound of the pl constant applies
FEAS = 1.0 - 1e-12       # multiplicative slack on >= feasibility constraints
PREFIX_FLOOR = 64
SWEEP_CAP = 200
STARTS_PER_PREFIX = 2
REEVALS_PER_PREFIX = 3
REFINE_NODES = 128       # fixed quadrature during pattern search (H and I)

CURVE_KINDS = ("delta_X", "delta_q", "Delta_q", "H_p")


@dataclass
class ModulusEstimate:
    value: float
    witness: tuple
    err_flag: bool = False
    meta: dict = field(default_factory=dict)


@dataclass
class ModulusCurve:
    """Estimated modulus on an eps grid. values[i] is a certified upper
    bound produced with `budget` samples from `seed`; err_flags mark
    emptiness or quadrature warnings."""

    kind: str
    exponent: Optional[float]
    eps_grid: np.ndarray
    values: np.ndarray
    budget: int
    seed: int
    err_flags: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["eps,value,budget,err_flag"]
        for e, v, f in zip(self.eps_grid, self.values, self.err_flags):
            lines.append(f"{float(e)!r},{float(v)!r},{self.budget},{int(f)}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "eps_grid": [float(e) for e in self.eps_grid],
            "values": [float(v) for v in self.values],
            "budget": self.budget,
            "seed": self.seed,
            "err_flags": [bool(f) for f in self.err_flags],
        }
        if self.exponent is not None:
            d["exponent"] = float(self.exponent)
        return d


@dataclass
class PLConstant:
    """Upper bound for the r-uniform pl-convexity constant with circle
    exponent q.

    lambda_estimate = min over witnesses of
      (q-power-mean(||a + e^{i t} b||)^r - ||a||^r) / ||b||^r,  ||a|| = 1,
    restricted to MIN_DIR_NORM <= ||b|| <= MAX_DIR_NORM and clamped to 1.
    tail_bound = (2^r - 1)/3^r bounds the objective from below on normed
    spaces once ||b|| > 3; tail_covered reports whether the estimate sits
    under that bound, i.e. whether restricting ||b|| could have hidden a
    smaller infimum.
    """

    r: float
    q: float
    lambda_estimate: float
    witness_a: Optional[np.ndarray]
    witness_b: Optional[np.ndarray]
    budget: int
    seed: int
    tail_bound: float
    tail_covered: bool
    clamped: bool = False
    meta: dict = field(default_factory=dict)


def _sample_pairs(space, budget, seed, tag, extras=0):
    """One (budget, 4n + extras) draw; rows are samples, so prefixes nest."""
    n = space.dim
    rng = spaces.rng_for(seed, "moduli", tag, space.label)
    raw = rng.standard_normal((budget, 4 * n + extras))
    x = raw[:, 0:2 * n:2] + 1j * raw[:, 1:2 * n:2]
    y = raw[:, 2 * n:4 * n:2] + 1j * raw[:, 2 * n + 1:4 * n:2]
    return x, y, ndtr(raw[:, 4 * n:])  # extras become uniforms in (0, 1)


def _unitize(space, V):
    nv = spaces.norms(space, V)
    nv = np.where(nv < 1e-300, 1.0, nv)
    return V / nv[:, None]


def _halving_prefixes(budget):
    out = []
    b = int(budget)
    while b >= PREFIX_FLOOR:
        out.append(b)
        b //= 2
    return out or [int(budget)]


def _select_starts(objs, rows, prefixes):
    """Indices of the best few candidates within each nested sample prefix.

    The top-k set of a prefix depends only on that prefix's rows, so the
    union over a doubled budget's prefixes contains this one's: refinement
    can only add candidates as the budget grows.
    """
    chosen, seen = [], set()
    order = np.argsort(objs, kind="stable")
    for pref in prefixes:
        taken = 0
        for idx in order:
            if rows[idx] >= pref:
                continue
            i = int(idx)
            if i not in seen:
                chosen.append(i)
                seen.add(i)
            taken += 1
            if taken >= STARTS_PER_PREFIX:
                break
    return chosen


def _pattern_refine(objective, project, start, floor=None,
                    step0=0.25, sweeps=SWEEP_CAP, step_min=1e-10):
    """Greedy coordinate-wise pattern search over a tuple of complex vectors.

    Moves perturb one coordinate's real or imaginary part by +-step, with a
    zero-snap pass that zeroes a coordinate when that does not hurt the
    objective (within 1e-15), producing exact sparse witnesses. project()
    must return a feasible repaired tuple or None to reject the move. The
    step halves after a sweep with no improvement.
    """
    pt = project(tuple(np.array(v, dtype=np.complex128) for v in start))
    if pt is None:
        return None
    best = objective(pt)
    step = step0
    for _ in range(sweeps):
        if floor is not None and best <= floor + 1e-13:
            break
        improved = False
        for vi in range(len(pt)):
            for k in range(pt[vi].shape[0]):
                for dv in (step, -step, 1j * step, -1j * step):
                    cand = tuple(v.copy() for v in pt)
                    cand[vi][k] += dv
                    cand = project(cand)
                    if cand is None:
                        continue
                    val = objective(cand)
                    if val < best:
                        best, pt, improved = val, cand, True
                if pt[vi][k] != 0:
                    cand = tuple(v.copy() for v in pt)
                    cand[vi][k] = 0.0
                    cand = project(cand)
                    if cand is not None:
                        val = objective(cand)
                        if val < best:
                            best, pt, improved = val, cand, True
                        elif val <= best + 1e-15:
                            best, pt = val, cand  # exact sparse witness
        if not improved:
            step *= 0.5
            if step < step_min:
                break
    return best, pt


def _phase_align(space, X, Y):
    """Rotate each coordinate of y onto x's phase ray, renormalized.
    Maximizes ||x + y|| coordinate-wise for lp norms, a strong seed for
    the uniform-convexity search."""
    ax = np.abs(X)
    ph = np.where(ax > 0, X / np.where(ax > 0, ax, 1.0), 1.0)
    return _unitize(space, np.abs(Y) * ph)


# ---------------------------------------------------------------------------
# delta_X: inf 1 - ||x+y||/2  over ||x|| <= 1, ||y|| <= 1, ||x-y|| >= eps


def estimate_delta(space, eps, budget=DEFAULT_BUDGET, seed=0) -> ModulusEstimate:
    if eps <= 0:
        raise ContractViolation("eps must be positive")
    budget = int(budget)
    x, y, _ = _sample_pairs(space, budget, seed, f"delta:eps={eps!r}")
    x = _unitize(space, x)
    y = _unitize(space, y)

    rows = np.arange(budget)
    variants = [y, -y, _phase_align(space, x, y), _unitize(space, -x + 0.2 * y)]
    X = np.concatenate([x] * len(variants))
    Y = np.concatenate(variants)
    R = np.concatenate([rows] * len(variants))
    feas = spaces.norms(space, X - Y) >= eps * FEAS
    objs = 1.0 - spaces.norms(space, X + Y) / 2.0

    def objective(pt):
        return 1.0 - spaces.norm(space, pt[0] + pt[1]) / 2.0

    def project(pt):
        px, py = pt
        nx = spaces.norm(space, px)
        ny = spaces.norm(space, py)
        if nx < 1e-300 or ny < 1e-300:
            return None
        px = px / nx
        py = py / ny
        if spaces.norm(space, px - py) < eps * FEAS:
            return None
        return (px, py)

    floor = 0.0 if not space.is_quasi else None
    best_val, best_wit = math.inf, None
    pool = np.flatnonzero(feas)
    if pool.size:
        for j in _select_starts(objs[pool], R[pool], _halving_prefixes(budget)):
            i = pool[j]
            res = _pattern_refine(objective, project, (X[i], Y[i]), floor=floor)
            if res and res[0] < best_val:
                best_val, best_wit = res
        i = int(pool[np.argmin(objs[pool])])
        if objs[i] < best_val:
            best_val, best_wit = float(objs[i]), (X[i], Y[i])

    # antipodal pairs are feasible whenever eps <= 2||u||; they certify the
    # trivial value 1 when random sampling finds nothing
    e1 = np.zeros(space.dim, dtype=np.complex128)
    e1[0] = 1.0
    u = _unitize(space, e1[None, :])[0]
    if spaces.norm(space, 2.0 * u) >= eps * FEAS and 1.0 < best_val:
        best_val, best_wit = 1.0, (u, -u)
    if best_wit is None:
        raise InfeasibleError(
            f"no pair with ||x-y|| >= {eps} found (eps beyond the diameter?)")
    return ModulusEstimate(float(best_val), best_wit,
                           meta={"eps": eps, "budget": budget, "seed": seed})


def modulus_delta(space, eps, budget=DEFAULT_BUDGET, seed=0) -> float:
    """Uniform-convexity modulus inf{1 - ||x+y||/2 : ||x-y|| >= eps} (upper bound)."""
    return estimate_delta(space, eps, budget, seed).value


# ---------------------------------------------------------------------------
# delta_q: inf 1 - ||x||  over ||x+y||^q + ||x-y||^q <= 2, ||y|| >= eps


def _gq_batch(space, X, Y, q):
    return spaces.norms(space, X + Y) ** q + spaces.norms(space, X - Y) ** q


def estimate_delta_q(space, eps, q, budget=DEFAULT_BUDGET, seed=0) -> ModulusEstimate:
    if eps <= 0 or q <= 0:
        raise ContractViolation("eps and q must be positive")
    budget = int(budget)
    meta = {"eps": eps, "q": q, "budget": budget, "seed": seed}
    zero_pair = (np.zeros(space.dim, np.complex128),
                 np.zeros(space.dim, np.complex128))
    # x = 0 pairs with ||y|| = eps are feasible exactly when eps <= 1; for
    # normed spaces eps > 1 is provably empty (the q-mean dominates ||y||)
    if eps > 1.0 and not space.is_quasi:
        return ModulusEstimate(1.0, zero_pair, err_flag=True,
                               meta={**meta, "empty": True})

    x, y, ex = _sample_pairs(space, budget, seed, f"delta_q:eps={eps!r}:q={q!r}",
                             extras=1)
    xhat = _unitize(space, x)
    t = eps * (1.0 + 0.5 * ex[:, 0] ** 3)
    if eps <= 1.0:
        t = np.minimum(t, 1.0)  # keep x = 0 feasible for every row
    Y = _unitize(space, y) * t[:, None]

    # largest s with ||s x + y||^q + ||s x - y||^q <= 2, batched bisection
    ok = _gq_batch(space, 0.0 * xhat, Y, q) <= 2.0
    s_lo = np.zeros(budget)
    s_hi = np.ones(budget)
    for _ in range(40):
        g = _gq_batch(space, s_hi[:, None] * xhat, Y, q)
        grow = ok & (g <= 2.0)
        if not np.any(grow):
            break
        s_lo[grow] = s_hi[grow]
        s_hi[grow] *= 2.0
    for _ in range(60):
        mid = 0.5 * (s_lo + s_hi)
        g = _gq_batch(space, mid[:, None] * xhat, Y, q)
        good = ok & (g <= 2.0)
        s_lo[good] = mid[good]
        s_hi[~good & ok] = mid[~good & ok]
    XS = s_lo[:, None] * xhat
    vals = 1.0 - spaces.norms(space, XS)

    def objective(pt):
        return 1.0 - spaces.norm(space, pt[0])

    def project(pt):
        px, py = pt
        ny = spaces.norm(space, py)
        if ny < 1e-300:
            return None
        if ny < eps * FEAS:
            py = py * (eps / ny)
        if _gq_batch(space, px[None, :], py[None, :], q)[0] > 2.0:
            return None
        return (px, py)

    floor = 0.0 if not space.is_quasi else None
    best_val, best_wit = math.inf, None
    pool = np.flatnonzero(ok)
    if pool.size:
        for j in _select_starts(vals[pool], pool, _halving_prefixes(budget)):
            i = pool[j]
            res = _pattern_refine(objective, project, (XS[i], Y[i]), floor=floor)
            if res and res[0] < best_val:
                best_val, best_wit = res
        i = int(pool[np.argmin(vals[pool])])
        if vals[i] < best_val:
            best_val, best_wit = float(vals[i]), (XS[i], Y[i])
    if best_wit is None:
        return ModulusEstimate(1.0, zero_pair, err_flag=True,
                               meta={**meta, "empty": True})
    return ModulusEstimate(float(best_val), best_wit, meta=meta)


def modulus_delta_q(space, eps, q, budget=DEFAULT_BUDGET, seed=0) -> float:
    """Modulus with the q-power parallelogram constraint (certified upper
    bound). An empty constraint set yields 1.0, flagged on the estimate."""
    return estimate_delta_q(space, eps, q, budget, seed).value


# ---------------------------------------------------------------------------
# Delta_q: inf ((||x+y||^q + ||x-y||^q)/2)^(1/q) - 1  over ||x|| = 1, ||y|| >= eps


def _power_mean_excess(space, x, y, q):
    """((||x+y||^q + ||x-y||^q)/2)^(1/q) - 1, stable near zero."""
    a = spaces.norm(space, x + y)
    b = spaces.norm(space, x - y)
    if a == 0.0 and b == 0.0:
        return -1.0
    la = q * math.log(a) if a > 0 else -math.inf
    lb = q * math.log(b) if b > 0 else -math.inf
    return math.expm1((np.logaddexp(la, lb) - math.log(2.0)) / q)


def estimate_Delta_q(space, eps, q, budget=DEFAULT_BUDGET, seed=0) -> ModulusEstimate:
    if eps <= 0 or q <= 0:
        raise ContractViolation("eps and q must be positive")
    budget = int(budget)
    x, y, ex = _sample_pairs(space, budget, seed, f"Delta_q:eps={eps!r}:q={q!r}",
                             extras=1)
    X = _unitize(space, x)
    t = eps * (1.0 + 0.5 * ex[:, 0] ** 3)
    Y = _unitize(space, y) * t[:, None]
    vals = np.array([_power_mean_excess(space, X[i], Y[i], q)
                     for i in range(budget)])

    def objective(pt):
        return _power_mean_excess(space, pt[0], pt[1], q)

    def project(pt):
        px, py = pt
        nx = spaces.norm(space, px)
        ny = spaces.norm(space, py)
        if nx < 1e-300 or ny < 1e-300:
            return None
        px = px / nx
        if ny < eps * FEAS:
            py = py * (eps / ny)
        return (px, py)

    floor = 0.0 if not space.is_quasi else None
    best_val, best_wit = math.inf, None
    for i in _select_starts(vals, np.arange(budget), _halving_prefixes(budget)):
        res = _pattern_refine(objective, project, (X[i], Y[i]), floor=floor)
        if res and res[0] < best_val:
            best_val, best_wit = res
    i = int(np.argmin(vals))
    if vals[i] < best_val:
        best_val, best_wit = float(vals[i]), (X[i], Y[i])
    return ModulusEstimate(float(best_val), best_wit,
                           meta={"eps": eps, "q": q, "budget": budget, "seed": seed})


def modulus_Delta_q(space, eps, q, budget=DEFAULT_BUDGET, seed=0) -> float:
    """Power-mean convexity modulus (certified upper bound)."""
    return estimate_Delta_q(space, eps, q, budget, seed).value


# ---------------------------------------------------------------------------
# H_p: inf (mean of ||x + e^{i theta} y||^p)^(1/p) - 1  over ||x|| = 1, ||y|| = eps


def _qpow_means_batch(space, X, Y, p, nodes):
    if space.family in ("lp", "hilbert", "weighted_lp"):
        return np.asarray(kernels.circle_qpow_means(X, Y, space.p, p, nodes,
                                                    space.weights))
    return np.array([circle.qpow_mean_fixed(space, X[i], Y[i], p, nodes)
                     for i in range(X.shape[0])])


def estimate_H_p(space, eps, p, budget=DEFAULT_BUDGET, seed=0,
                 ctrl=None) -> ModulusEstimate:
    if eps <= 0 or p <= 0:
        raise ContractViolation("eps and p must be positive")
    budget = int(budget)
    x, y, _ = _sample_pairs(space, budget, seed, f"H:eps={eps!r}:p={p!r}")
    X = _unitize(space, x)
    Y = _unitize(space, y) * eps
    vals = np.expm1(np.log(_qpow_means_batch(space, X, Y, p, 64)) / p)

    def objective(pt):
        m = circle.qpow_mean_fixed(space, pt[0], pt[1], p, REFINE_NODES)
        return math.expm1(math.log(m) / p)

    def project(pt):
        px, py = pt
        nx = spaces.norm(space, px)
        ny = spaces.norm(space, py)
        if nx < 1e-300 or ny < 1e-300:
            return None
        return (px / nx, py * (eps / ny))

    prefixes = _halving_prefixes(budget)
    finalists = []
    if float(vals.max() - vals.min()) > 1e-12:
        floor = 0.0 if not space.is_quasi else None
        for i in _select_starts(vals, np.arange(budget), prefixes):
            res = _pattern_refine(objective, project, (X[i], Y[i]), floor=floor)
            if res:
                finalists.append(res[1])
    for pref in prefixes:
        for i in np.argsort(vals[:pref], kind="stable")[:REEVALS_PER_PREFIX]:
            finalists.append((X[i], Y[i]))

    best_val, best_wit, flag = math.inf, None, False
    for wx, wy in finalists:
        mq, _, _, okq = circle.qpow_mean_adaptive(space, wx, wy, p, ctrl)
        val = math.expm1(math.log(mq) / p)
        if val < best_val:
            best_val, best_wit, flag = val, (wx, wy), not okq
    return ModulusEstimate(float(best_val), best_wit, err_flag=flag,
                           meta={"eps": eps, "p": p, "budget": budget, "seed": seed})


def modulus_H_p(space, eps, p, budget=DEFAULT_BUDGET, seed=0) -> float:
    """Circle-mean convexity modulus (certified upper bound)."""
    return estimate_H_p(space, eps, p, budget, seed).value


# ---------------------------------------------------------------------------
# pl-convexity constant


def objective_I(space, a, b, r, q, ctrl=None) -> float:
    """(q-power circle mean of the norm)^r minus ||a||^r, over ||b||^r.

    Written as homogeneous expm1/log expressions so values near zero keep
    full relative accuracy, and joint rescaling of (a, b) cancels exactly
    up to rounding.
    """
    a = spaces.as_cvec(a, space.dim)
    b = spaces.as_cvec(b, space.dim)
    na = spaces.norm(space, a)
    nb = spaces.norm(space, b)
    if nb <= 0:
        raise ContractViolation("b must be nonzero")
    mq, _, _, _ = circle.qpow_mean_adaptive(space, a, b, q, ctrl)
    if na == 0.0:
        return mq ** (r / q) / nb**r
    return (na**r) * math.expm1((r / q) * math.log(mq / na**q)) / nb**r


def estimate_I(space, r, q, budget=DEFAULT_BUDGET, seed=0, ctrl=None) -> PLConstant:
    """Estimate the best constant in the r-uniform pl-convexity inequality
    with circle exponent q. Returns a certified upper bound with witness."""
    if r <= 0 or q <= 0:
        raise ContractViolation("r and q must be positive")
    budget = int(budget)
    a, b, ex = _sample_pairs(space, budget, seed, f"I:r={r!r}:q={q!r}", extras=1)
    A = _unitize(space, a)
    t = np.clip(MAX_DIR_NORM * ex[:, 0] ** 1.5, MIN_DIR_NORM, MAX_DIR_NORM)
    B = _unitize(space, b) * t[:, None]
    mq = _qpow_means_batch(space, A, B, q, 64)
    vals = np.expm1((r / q) * np.log(mq)) / t**r

    def objective(pt):
        m = circle.qpow_mean_fixed(space, pt[0], pt[1], q, REFINE_NODES)
        nb = spaces.norm(space, pt[1])
        return math.expm1((r / q) * math.log(m)) / nb**r

    def project(pt):
        pa, pb = pt
        na = spaces.norm(space, pa)
        nb = spaces.norm(space, pb)
        if na < 1e-300 or nb < 1e-300:
            return None
        pa = pa / na
        if nb < MIN_DIR_NORM:
            pb = pb * (MIN_DIR_NORM / nb)
        elif nb > MAX_DIR_NORM:
            pb = pb * (MAX_DIR_NORM / nb)
        return (pa, pb)

    prefixes = _halving_prefixes(budget)
    finalists = []
    if float(vals.max() - vals.min()) > 1e-12:
        floor = 0.0 if not space.is_quasi else None
        for i in _select_starts(vals, np.arange(budget), prefixes):
            res = _pattern_refine(objective, project, (A[i], B[i]), floor=floor)
            if res:
                finalists.append(res[1])
    for pref in prefixes:
        for i in np.argsort(vals[:pref], kind="stable")[:REEVALS_PER_PREFIX]:
            finalists.append((A[i], B[i]))

    best_val, best_wit = math.inf, None
    for wa, wb in finalists:
        val = objective_I(space, wa, wb, r, q, ctrl)
        if val < best_val:
            best_val, best_wit = val, (wa, wb)

    tail = (2.0**r - 1.0) / 3.0**r
    clamped = best_val > 1.0
    lam = min(best_val, 1.0)
    return PLConstant(
        r=float(r), q=float(q), lambda_estimate=float(lam),
        witness_a=best_wit[0], witness_b=best_wit[1],
        budget=budget, seed=int(seed),
        tail_bound=tail, tail_covered=bool(lam <= tail + 1e-12),
        clamped=clamped,
        meta={"dir_cap": (MIN_DIR_NORM, MAX_DIR_NORM),
              "raw_min": float(best_val)})


# ---------------------------------------------------------------------------
# curves and power-law fits


def modulus_curve(space, kind, eps_grid, budget=DEFAULT_BUDGET, seed=0,
                  exponent=None) -> ModulusCurve:
    """Estimate one modulus on an eps grid. kind is one of delta_X,
    delta_q, Delta_q, H_p; the latter three need `exponent`."""
    if kind not in CURVE_KINDS:
        raise SchemaError(f"unknown modulus kind {kind!r}")
    if kind != "delta_X" and (exponent is None or exponent <= 0):
        raise ContractViolation(f"{kind} requires a positive exponent")
    eps_grid = np.asarray(eps_grid, dtype=np.float64)
    if eps_grid.ndim != 1 or eps_grid.size == 0 or np.any(eps_grid <= 0):
        raise ContractViolation("eps grid must be 1-d and positive")
    values = np.empty(eps_grid.size)
    flags = np.zeros(eps_grid.size, dtype=bool)
    for i, eps in enumerate(eps_grid):
        e = float(eps)
        if kind == "delta_X":
            est = estimate_delta(space, e, budget, seed)
        elif kind == "delta_q":
            est = estimate_delta_q(space, e, exponent, budget, seed)
        elif kind == "Delta_q":
            est = estimate_Delta_q(space, e, exponent, budget, seed)
        else:
            est = estimate_H_p(space, e, exponent, budget, seed)
        values[i] = est.value
        flags[i] = est.err_flag
    # Each modulus is nondecreasing in eps and every estimate is an upper
    # bound, so a witness found at larger eps still bounds the value at
    # smaller eps (for H_p shrink y radially; the circle mean only drops).
    # Running the minimum from the right keeps certification and removes
    # per-point optimizer wobble that would otherwise break monotonicity.
    order = np.argsort(eps_grid, kind="stable")
    run, run_flag = math.inf, False
    for j in order[::-1]:
        if values[j] < run:
            run, run_flag = values[j], flags[j]
        else:
            values[j] = run
            flags[j] = run_flag
    return ModulusCurve(kind, exponent, eps_grid, values, int(budget), int(seed),
                        flags)


def fit_power_constant(curve: ModulusCurve, r) -> float:
    """Smallest C >= 1 with curve(eps) >= (eps/C)^r on the curve's grid.

    A zero or negative curve value means no power law of this exponent fits.
    """
    if r <= 0:
        raise ContractViolation("r must be positive")
    if np.any(curve.values <= 0):
        j = int(np.argmin(curve.values))
        raise NotUniformlyConvex(
            f"curve value {curve.values[j]!r} at eps={curve.eps_grid[j]!r} "
            "is not positive; no power bound exists")
    C = float(np.max(curve.eps_grid / curve.values ** (1.0 / r)))
    return max(C, 1.0)
