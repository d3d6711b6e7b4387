"""Counterexample-search suites for the quantitative inequalities.

Each suite samples its inequality under a fixed seed and reports the worst
margin found, with the achieving witness serialized so the margin can be
re-evaluated later. Estimated constants entering an inequality are upper
bounds of true infima; safety factors compensating for that are explicit
in the report. A suite never certifies a theorem; it fails to find a
counterexample.

Single-check suites (thm51, weissler) report raw margins against their
slack. Multi-check suites report slack-normalized margins (raw divided by
the check's own slack) against tolerance 1: every sub-check then shares
one pass line.
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import ndtr

from . import backend, circle, domains, moduli, spaces
from .errors import ContractViolation, SchemaError
from .reports import VerdictReport, decode_cvec

SUITE_NAMES = ("thm51", "sec6_chain", "sec7_equiv", "weissler", "known_facts")
PAIR_SLACK = 1e-8
LEMMA_SLACK = 1e-12
WEISSLER_SLACK = 1e-9


def _space_of(params):
    sp = params.get("space")
    if sp is None:
        raise ContractViolation("suite params need a space")
    if isinstance(sp, spaces.SpaceSpec):
        return sp
    if isinstance(sp, dict):
        return spaces.space_from_json_dict(sp)
    return spaces.parse_space(sp)


def _ctrl_of(params):
    tol = params.get("tol")
    max_nodes = params.get("max_nodes")
    if tol is None and max_nodes is None:
        return None
    base = circle.QuadratureControls()
    return circle.QuadratureControls(
        tol=float(tol) if tol is not None else base.tol,
        max_nodes=int(max_nodes) if max_nodes is not None else base.max_nodes)


def _pmap(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _space_tag(space):
    return space.to_json_dict() if space.family != "custom" else space.label


# --- margin functions (shared by suites and replay) --------------------------


def thm51_margin(space, a, b, lam0, safety, ctrl=None) -> float:
    mean = circle.power_mean_on_circle(space, a, b, 1.0, ctrl).value
    na = float(spaces.norm(space, a))
    nb = float(spaces.norm(space, b))
    return mean - na - safety * lam0 * nb * nb


def weissler_margin(space, x, y, p, q, r, ctrl=None) -> float:
    y = np.asarray(y, dtype=np.complex128)
    mp = circle.power_mean_on_circle(space, x, y, p, ctrl).value
    mq = circle.power_mean_on_circle(space, x, r * y, q, ctrl).value
    return mp - mq


def lemma1_margin(t, C, r) -> float:
    """(C^-r t^(1-r) + t)^r - t^r - r/C^r, computed without cancellation."""
    t, C, r = float(t), float(C), float(r)
    lhs = t ** r * math.expm1(r * math.log1p(C ** (-r) * t ** (-r)))
    return lhs - r / C ** r


def _lemma2_g(x, r):
    return ((x + 2.0) ** r - 1.0) / (x + 3.0) ** r


def lemma2_margin(x1, x2, r) -> float:
    return _lemma2_g(float(x2), float(r)) - _lemma2_g(float(x1), float(r))


def pl_margin(space, x, y, lam_q, q, r, ctrl=None) -> float:
    mq = circle.power_mean_on_circle(space, x, y, q, ctrl).value
    nx = float(spaces.norm(space, x))
    ny = float(spaces.norm(space, y))
    return mq - (nx ** r + lam_q * ny ** r) ** (1.0 / r)


def k_from_lambda(lam, r) -> float:
    if lam <= 0:
        return math.inf
    return (r / (4.0 ** (1.0 - r) * lam)) ** (1.0 / r)


def converse_margin(space, x, y, lam_p, p, r, ctrl=None) -> float:
    mp = circle.power_mean_on_circle(space, x, y, p, ctrl).value
    eps = float(spaces.norm(space, y))
    return mp - (1.0 + lam_p * eps ** r) ** (1.0 / r)


# --- replayable curve-point margins ------------------------------------------
# Curve values are running minima over all larger grid eps, so a single
# point only replays together with the tail of the grid it was fit on;
# eps_tail[0] is the point the check is about.


def delta_dom_margin(space, eps_tail, q, C_q, r, budget, seed) -> float:
    curve = moduli.modulus_curve(space, "Delta_q", eps_tail, budget, seed,
                                 exponent=q)
    return float(curve.values[0]) - (float(curve.eps_grid[0]) / C_q) ** r


def chain_margin(space, eps_tail, q, budget, seed) -> float:
    tail = np.asarray(eps_tail, dtype=np.float64)
    big = moduli.modulus_curve(space, "Delta_q", tail, budget, seed,
                               exponent=q)
    small = moduli.modulus_curve(space, "delta_q", tail / 4.0, budget, seed,
                                 exponent=q)
    return float(big.values[0]) - float(small.values[0])


def forward_margin(space, eps_tail, p, K, r, budget, seed) -> float:
    curve = moduli.modulus_curve(space, "H_p", eps_tail, budget, seed,
                                 exponent=p)
    bound = 0.0 if math.isinf(K) else (float(curve.eps_grid[0]) / K) ** r
    return float(curve.values[0]) - bound


# --- suite assembly ----------------------------------------------------------


class _Checks:
    """Accumulates (margin, slack, witness); the worst normalized margin
    becomes the suite verdict."""

    def __init__(self):
        self.rows = []

    def add(self, name, margin, slack, **fields):
        self.rows.append((float(margin), float(slack),
                          {"check": name, "slack": slack, **fields}))

    def verdict(self):
        if not self.rows:
            raise ContractViolation("suite produced no checks")
        normed = [m / s for m, s, _ in self.rows]
        i = int(np.argmin(normed))
        return float(normed[i]), self.rows[i][2]


def _report(suite, params, n_samples, worst, witness, tolerance, t0, extras):
    return VerdictReport(
        suite=suite, params=params, n_samples=int(n_samples),
        worst_margin=float(worst), witness=witness,
        passed=worst >= -tolerance, tolerance=float(tolerance),
        runtime_ms=int((time.perf_counter() - t0) * 1000.0), extras=extras)


def _suite_thm51(params, seed, t0):
    space = _space_of(params)
    pairs = int(params.get("pairs", 2000))
    budget = int(params.get("budget", 4096))
    slack = float(params.get("slack", PAIR_SLACK))
    safety = float(params.get("safety", 0.9))
    ctrl = _ctrl_of(params)
    rep = domains.unit_ball_uniform_check(space, pairs=pairs, seed=seed,
                                          budget=budget, slack=slack,
                                          safety=safety, ctrl=ctrl)
    stored = {"space": _space_tag(space), "pairs": pairs, "budget": budget,
              "safety": safety}
    if rep.skipped:
        extras = {"skipped": True, "reason": rep.reason, "lam_hat": rep.lam_hat}
        return _report("thm51", stored, 0, 0.0, None, slack, t0, extras)
    a, b = rep.witness
    margin = thm51_margin(space, a, b, rep.lam0, safety, ctrl)
    witness = {"check": "thm51", "slack": slack, "a": a, "b": b,
               "lam0": rep.lam0, "safety": safety}
    extras = {"lam_hat": rep.lam_hat, "lam0": rep.lam0, "safety": safety}
    return _report("thm51", stored, pairs, margin, witness, slack, t0, extras)


def _suite_weissler(params, seed, t0):
    space = _space_of(params)
    p = float(params["p"]) if "p" in params else None
    q = float(params["q"]) if "q" in params else None
    if p is None or q is None:
        raise ContractViolation("weissler needs p and q")
    if not (1.0 < p < q < math.inf):
        raise ContractViolation("weissler requires 1 < p < q < inf")
    r_cap = math.sqrt((p - 1.0) / (q - 1.0))
    r = float(params.get("r", r_cap))
    if r > r_cap + 1e-15:
        raise ContractViolation(f"radius {r} exceeds sqrt((p-1)/(q-1)) = {r_cap}")
    pairs = int(params.get("pairs", 2000))
    slack = float(params.get("slack", WEISSLER_SLACK))
    ctrl = _ctrl_of(params)
    threads = params.get("threads", backend.thread_count(None))

    rng = spaces.rng_for(seed, "verify", "weissler", space.label)
    raw = rng.standard_normal((pairs, 4 * space.dim + 1))
    n = space.dim
    X = _unit_rows(space, raw[:, 0:2 * n:2] + 1j * raw[:, 1:2 * n:2])
    Yh = _unit_rows(space, raw[:, 2 * n:4 * n:2] + 1j * raw[:, 2 * n + 1:4 * n:2])
    t = 2.0 * ndtr(raw[:, 4 * n])
    Y = Yh * t[:, None]

    margins = _pmap(lambda i: weissler_margin(space, X[i], Y[i], p, q, r, ctrl),
                    range(pairs), threads)
    i = int(np.argmin(margins))
    witness = {"check": "weissler", "slack": slack, "x": X[i], "y": Y[i],
               "p": p, "q": q, "r": r}
    stored = {"space": _space_tag(space), "p": p, "q": q, "r": r,
              "pairs": pairs}
    extras = {"violations": int(np.sum(np.asarray(margins) < -slack))}
    return _report("weissler", stored, pairs, margins[i], witness, slack,
                   t0, extras)


def _unit_rows(space, V):
    nv = spaces.norms(space, V)
    nv = np.where(nv == 0, 1.0, nv)
    return V / nv[:, None]


def _suite_sec6(params, seed, t0):
    space = _space_of(params)
    r = float(params.get("r", 2.0))
    q = float(params.get("q", 2.0))
    if r < 2:
        raise ContractViolation("r-uniform convexity needs r >= 2")
    budget = int(params.get("budget", 4096))
    pairs = int(params.get("pairs", 2000))
    ctrl = _ctrl_of(params)
    threads = params.get("threads", backend.thread_count(None))
    # ascending grids so each check's replay tail is a suffix
    delta_grid = np.sort(np.asarray(params.get("delta_grid",
                                               np.linspace(0.25, 2.0, 8))))
    big_grid = np.sort(np.asarray(params.get("Delta_grid",
                                             np.linspace(0.25, 3.0, 8))))

    checks = _Checks()

    # modulus curves and their power-law constants
    delta_curve = moduli.modulus_curve(space, "delta_X", delta_grid,
                                       budget, seed)
    C = moduli.fit_power_constant(delta_curve, r)  # raises if not convex
    big_curve = moduli.modulus_curve(space, "Delta_q", big_grid, budget,
                                     seed, exponent=q)
    C_q = moduli.fit_power_constant(big_curve, r)
    lam_q = min(1.0, r / C_q ** r, (2.0 ** r - 1.0) / 3.0 ** r)

    # scalar lemma grids
    t_grid = np.logspace(-3, 3, 400)
    for Cval in sorted({1.0, 2.0, float(np.round(C_q, 12))}):
        for tv in t_grid:
            checks.add("lemma1", lemma1_margin(tv, Cval, r), LEMMA_SLACK,
                       t=float(tv), C=float(Cval), r=r)
    x_grid = np.logspace(-6, math.log10(50.0), 400)
    for x1, x2 in zip(x_grid[:-1], x_grid[1:]):
        checks.add("lemma2", lemma2_margin(x1, x2, r), LEMMA_SLACK,
                   x1=float(x1), x2=float(x2), r=r)

    # the Delta_q curve dominates its own power law on the grid
    for i, (eps, val) in enumerate(zip(big_curve.eps_grid, big_curve.values)):
        checks.add("delta_dom", float(val) - (float(eps) / C_q) ** r,
                   PAIR_SLACK, eps=float(eps),
                   eps_tail=[float(e) for e in big_curve.eps_grid[i:]],
                   q=q, C_q=C_q, r=r, budget=budget, seed=seed)

    # chain: the x-normalization modulus at eps/4 under the symmetric one
    small_curve = moduli.modulus_curve(space, "delta_q", big_grid / 4.0,
                                       budget, seed, exponent=q)
    for i, (eps, big_v, small_v) in enumerate(zip(big_grid, big_curve.values,
                                                  small_curve.values)):
        checks.add("chain", float(big_v) - float(small_v), PAIR_SLACK,
                   eps=float(eps),
                   eps_tail=[float(e) for e in big_grid[i:]],
                   q=q, budget=budget, seed=seed)

    # final PL inequality on sampled pairs
    rng = spaces.rng_for(seed, "verify", "sec6-pairs", space.label)
    n = space.dim
    raw = rng.standard_normal((pairs, 4 * n + 1))
    X = _unit_rows(space, raw[:, 0:2 * n:2] + 1j * raw[:, 1:2 * n:2])
    Yh = _unit_rows(space, raw[:, 2 * n:4 * n:2] + 1j * raw[:, 2 * n + 1:4 * n:2])
    t = 4.0 * ndtr(raw[:, 4 * n])
    Y = Yh * t[:, None]
    margins = _pmap(lambda i: pl_margin(space, X[i], Y[i], lam_q, q, r, ctrl),
                    range(pairs), threads)
    for i, m in enumerate(margins):
        checks.add("pl_pairs", m, PAIR_SLACK, x=X[i], y=Y[i],
                   lam_q=lam_q, q=q, r=r)

    worst, witness = checks.verdict()
    stored = {"space": _space_tag(space), "r": r, "q": q, "budget": budget,
              "pairs": pairs}
    extras = {
        "C": C, "C_q": C_q, "lambda_q": lam_q,
        "delta_curve": {"eps": delta_curve.eps_grid.tolist(),
                        "values": delta_curve.values.tolist()},
        "Delta_curve": {"eps": big_curve.eps_grid.tolist(),
                        "values": big_curve.values.tolist()},
        "pl_violations": int(np.sum(np.asarray(margins) < -PAIR_SLACK)),
    }
    return _report("sec6_chain", stored, len(checks.rows), worst, witness,
                   1.0, t0, extras)


def _suite_sec7(params, seed, t0):
    space = _space_of(params)
    p = float(params.get("p", 1.0))
    r = float(params.get("r", 2.0))
    budget = int(params.get("budget", 4096))
    pairs = int(params.get("pairs", 1000))
    ctrl = _ctrl_of(params)
    threads = params.get("threads", backend.thread_count(None))
    eps_grid = np.sort(np.asarray(params.get("eps_grid",
                                             np.linspace(0.1, 1.0, 10))))

    checks = _Checks()
    est = moduli.estimate_I(space, r, p, budget=budget, seed=seed, ctrl=ctrl)
    lam_hat = est.lambda_estimate
    K = k_from_lambda(lam_hat, r)
    k_floor = (2.0 * 4.0 ** (r - 1.0)) ** (1.0 / r)
    if math.isfinite(K):
        checks.add("k_consistency", K - k_floor, 1e-9, lam_hat=lam_hat, r=r)

    curve = moduli.modulus_curve(space, "H_p", eps_grid, budget, seed,
                                 exponent=p)
    for i, (eps, val) in enumerate(zip(curve.eps_grid, curve.values)):
        checks.add("forward", float(val) -
                   (0.0 if math.isinf(K) else (float(eps) / K) ** r),
                   PAIR_SLACK, eps=float(eps),
                   eps_tail=[float(e) for e in curve.eps_grid[i:]],
                   p=p, K=K, r=r, budget=budget, seed=seed)

    extras = {"lam_hat": lam_hat, "K": K,
              "H_curve": {"eps": curve.eps_grid.tolist(),
                          "values": curve.values.tolist()}}

    # converse: fit K_p from the curve, check the lambda_p inequality on
    # pairs restricted to eps <= 1/K_p
    if np.all(curve.values > 0):
        K_p = max(1.0, float(np.max(
            (curve.eps_grid ** r / curve.values) ** (1.0 / (r + 1.0)))))
        lam_p = 1.0 / K_p ** (r + 1.0)
        extras["K_p"] = K_p
        extras["lambda_p"] = lam_p
        rng = spaces.rng_for(seed, "verify", "sec7-pairs", space.label)
        n = space.dim
        raw = rng.standard_normal((pairs, 4 * n + 1))
        X = _unit_rows(space, raw[:, 0:2 * n:2] + 1j * raw[:, 1:2 * n:2])
        Yh = _unit_rows(space,
                        raw[:, 2 * n:4 * n:2] + 1j * raw[:, 2 * n + 1:4 * n:2])
        eps_s = ndtr(raw[:, 4 * n]) / K_p
        Y = Yh * eps_s[:, None]
        margins = _pmap(
            lambda i: converse_margin(space, X[i], Y[i], lam_p, p, r, ctrl),
            range(pairs), threads)
        for i, m in enumerate(margins):
            checks.add("converse", m, PAIR_SLACK, x=X[i], y=Y[i],
                       lam_p=lam_p, p=p, r=r)
        # the fitted lambda_p is only certified on eps <= 1/K_p; beyond
        # that, margins are recorded for observation, not for the verdict
        ext_n = min(200, pairs)
        eps_e = 1.0 / K_p + (2.0 - 1.0 / K_p) * ndtr(raw[:ext_n, 4 * n])
        Ye = Yh[:ext_n] * eps_e[:, None]
        ext = [converse_margin(space, X[i], Ye[i], lam_p, p, r, ctrl)
               for i in range(ext_n)]
        extras["extended_range"] = {"n": ext_n, "worst": float(np.min(ext)),
                                    "violations": int(np.sum(np.asarray(ext) < -PAIR_SLACK))}
    else:
        extras["converse_skipped"] = "H_p vanishes on the grid; no finite K_p"

    worst, witness = checks.verdict()
    stored = {"space": _space_tag(space), "p": p, "r": r, "budget": budget,
              "pairs": pairs}
    return _report("sec7_equiv", stored, len(checks.rows), worst, witness,
                   1.0, t0, extras)


def _suite_known_facts(params, seed, t0):
    budget = int(params.get("budget", 2048))
    ctrl = _ctrl_of(params)
    checks = _Checks()

    linf2 = spaces.lp(math.inf, 2)
    h1 = moduli.modulus_H_p(linf2, 0.5, 1.0, budget, seed)
    checks.add("kf_flat_modulus", 1e-9 - h1, 1e-9, eps=0.5, p=1.0,
               budget=budget, seed=seed)

    l42 = spaces.lp(4, 2)
    rep = domains.levi_report(domains.ball_of(l42),
                              np.array([1.0 + 0.0j, 0.0 + 0.0j]), ctrl=ctrl)
    checks.add("kf_levi_degenerate", 1e-6 - abs(rep.min_eigenvalue), 1e-6,
               eig=rep.min_eigenvalue)

    l23 = spaces.lp(2, 3)
    est = moduli.estimate_I(l23, 2.0, 2.0, budget=budget, seed=seed, ctrl=ctrl)
    checks.add("kf_hilbert_constant", 1e-4 - abs(est.lambda_estimate - 1.0),
               1e-4, budget=budget, seed=seed)

    scan = domains.strict_levi_scan(domains.ball_of(l23), count=20,
                                    seed=seed, ctrl=ctrl)
    checks.add("kf_levi_positive", 1e-4 - abs(scan.worst_min_eig - 1.0),
               1e-4, count=20, seed=seed)

    worst, witness = checks.verdict()
    extras = {"h1_linf2": h1, "l4_eig": rep.min_eigenvalue,
              "I22_l2": est.lambda_estimate, "l2_scan_worst": scan.worst_min_eig}
    return _report("known_facts", {"budget": budget}, len(checks.rows),
                   worst, witness, 1.0, t0, extras)


_SUITES = {
    "thm51": _suite_thm51,
    "weissler": _suite_weissler,
    "sec6_chain": _suite_sec6,
    "sec7_equiv": _suite_sec7,
    "known_facts": _suite_known_facts,
}


def run_suite(name, params=None, seed=0) -> VerdictReport:
    """Run one verification suite under a fixed seed.

    Identical (name, params, seed) produce identical reports apart from
    runtime; serialized canonical bytes are byte-stable.
    """
    if name not in _SUITES:
        raise SchemaError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    report = _SUITES[name](dict(params or {}), int(seed), time.perf_counter())
    report.params["seed"] = int(seed)
    return report


# --- replay -------------------------------------------------------------------


def _as_vec(v):
    """Witness vectors arrive as ndarrays in-process, [[re,im],...] from JSON."""
    if isinstance(v, np.ndarray):
        return np.ascontiguousarray(v, dtype=np.complex128)
    return decode_cvec(v)


def _replay_margin(witness, params):
    kind = witness.get("check")
    ctrl = _ctrl_of(params)

    def space():
        sp = params.get("space")
        if isinstance(sp, dict):
            return spaces.space_from_json_dict(sp)
        return spaces.parse_space(sp)

    if kind == "thm51":
        return thm51_margin(space(), _as_vec(witness["a"]),
                            _as_vec(witness["b"]), float(witness["lam0"]),
                            float(witness["safety"]), ctrl)
    if kind == "weissler":
        return weissler_margin(space(), _as_vec(witness["x"]),
                               _as_vec(witness["y"]), float(witness["p"]),
                               float(witness["q"]), float(witness["r"]), ctrl)
    if kind == "lemma1":
        return lemma1_margin(witness["t"], witness["C"], witness["r"])
    if kind == "lemma2":
        return lemma2_margin(witness["x1"], witness["x2"], witness["r"])
    if kind == "delta_dom":
        return delta_dom_margin(space(), [float(e) for e in witness["eps_tail"]],
                                float(witness["q"]), float(witness["C_q"]),
                                float(witness["r"]), int(witness["budget"]),
                                int(witness["seed"]))
    if kind == "chain":
        return chain_margin(space(), [float(e) for e in witness["eps_tail"]],
                            float(witness["q"]),
                            int(witness["budget"]), int(witness["seed"]))
    if kind == "pl_pairs":
        return pl_margin(space(), _as_vec(witness["x"]), _as_vec(witness["y"]),
                         float(witness["lam_q"]), float(witness["q"]),
                         float(witness["r"]), ctrl)
    if kind == "k_consistency":
        r = float(witness["r"])
        K = k_from_lambda(float(witness["lam_hat"]), r)
        return K - (2.0 * 4.0 ** (r - 1.0)) ** (1.0 / r)
    if kind == "forward":
        return forward_margin(space(), [float(e) for e in witness["eps_tail"]],
                              float(witness["p"]), float(witness["K"]),
                              float(witness["r"]), int(witness["budget"]),
                              int(witness["seed"]))
    if kind == "converse":
        return converse_margin(space(), _as_vec(witness["x"]),
                               _as_vec(witness["y"]), float(witness["lam_p"]),
                               float(witness["p"]), float(witness["r"]), ctrl)
    if kind == "kf_flat_modulus":
        h1 = moduli.modulus_H_p(spaces.lp(math.inf, 2), float(witness["eps"]),
                                float(witness["p"]), int(witness["budget"]),
                                int(witness["seed"]))
        return 1e-9 - h1
    if kind == "kf_levi_degenerate":
        rep = domains.levi_report(domains.ball_of(spaces.lp(4, 2)),
                                  np.array([1.0 + 0.0j, 0.0 + 0.0j]))
        return 1e-6 - abs(rep.min_eigenvalue)
    if kind == "kf_hilbert_constant":
        est = moduli.estimate_I(spaces.lp(2, 3), 2.0, 2.0,
                                budget=int(witness["budget"]),
                                seed=int(witness["seed"]))
        return 1e-4 - abs(est.lambda_estimate - 1.0)
    if kind == "kf_levi_positive":
        scan = domains.strict_levi_scan(domains.ball_of(spaces.lp(2, 3)),
                                        count=int(witness["count"]),
                                        seed=int(witness["seed"]))
        return 1e-4 - abs(scan.worst_min_eig - 1.0)
    raise SchemaError(f"unknown witness check {kind!r}")


def replay(report: VerdictReport) -> float:
    """Re-evaluate a report's worst-case margin from its witness.

    Returns the recomputed margin (slack-normalized for multi-check suites);
    raises when it fails to match the stored value to 1e-10.
    """
    if report.witness is None:
        raise ContractViolation("report has no witness to replay")
    raw = _replay_margin(report.witness, report.params)
    slack = float(report.witness["slack"])
    value = raw / slack if report.tolerance == 1.0 else raw
    if abs(value - report.worst_margin) > 1e-10:
        raise ContractViolation(
            f"replayed margin {value!r} does not match stored "
            f"{report.worst_margin!r}")
    return value
