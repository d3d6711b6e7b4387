"""Plurisubharmonicity laboratory.

Scalar fields on C^n probed through circle means: complex directional
derivatives, Levi quadratic forms and matrices by finite differences with
Richardson extrapolation, submean-value scans, strictness estimates, and
grid smoothing with an exact-unit-mass bump kernel.

Fields may return -inf (upper-semicontinuous sentinel); NaN and +inf are
always errors. Finite-difference quantities assume the declared smoothness
hint: "c2" enables Richardson extrapolation, "lipschitz" and "usc" fall
back to the smallest-radius raw estimate.
"""
import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.signal import convolve

from . import circle, spaces
from .errors import (ContractViolation, EvaluationError, NoDataError,
                     NumericFailure, ResolutionError, SamplingError)

SMOOTHNESS_HINTS = ("c2", "lipschitz", "usc")


@dataclass
class FieldOracle:
    """A scalar field f: C^dim -> R u {-inf}.

    fn takes one complex vector; batch (optional) takes a stacked (m, dim)
    array and returns (m,) floats, used by quadrature to avoid per-point
    python overhead.
    """

    fn: Callable
    dim: int
    smoothness_hint: str = "c2"
    batch: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.smoothness_hint not in SMOOTHNESS_HINTS:
            raise ContractViolation(f"unknown smoothness hint {self.smoothness_hint!r}")
        if self.dim < 1:
            raise ContractViolation("dim must be >= 1")

    def __call__(self, z):
        return float(self.fn(z))


def _f_at(f, a):
    """Evaluate a field at one point; NaN/+inf raise, -inf passes through."""
    v = float(f(a))
    if math.isnan(v) or v == math.inf:
        raise EvaluationError(f"field returned {v!r}", point=a)
    return v


# --- complex directional derivative --------------------------------------


def _real_dderiv(f, a, t, h, hint):
    """d/ds f(a + s t) at s = 0 by central differences."""
    def central(step):
        return (_f_at(f, a + step * t) - _f_at(f, a - step * t)) / (2.0 * step)

    d1 = central(h)
    if hint != "c2":
        return d1
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def dprime(f, a, t, h=None) -> complex:
    """Holomorphic part of the directional derivative of f at a along t.

    Combines real derivatives along t and it; for real-valued f the
    antiholomorphic part is the conjugate. The step h applies to the
    direction normalized to Euclidean unit length.
    """
    a = spaces.as_cvec(a)
    t = np.asarray(t, dtype=np.complex128)
    nt = float(np.linalg.norm(t))
    if nt == 0.0:
        return 0.0 + 0.0j
    that = t / nt
    if h is None:
        h = 1e-5 * (1.0 + float(np.linalg.norm(a)))
    hint = getattr(f, "smoothness_hint", "c2")
    du = _real_dderiv(f, a, that, h, hint)
    dv = _real_dderiv(f, a, 1j * that, h, hint)
    return nt * 0.5 * (du - 1j * dv)


def gradient_dprime(f, a, h=None) -> np.ndarray:
    """dprime along each coordinate direction; the covector of f at a."""
    a = spaces.as_cvec(a)
    n = a.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[k] = 1.0
        out[k] = dprime(f, a, e, h)
    return out


# --- Levi quadratic form and matrix ---------------------------------------


def default_radius(a) -> float:
    return 1e-2 * (1.0 + float(np.linalg.norm(a)))


def levi_quadratic(f, a, b, r0=None, ctrl=None, claimed_psh=False) -> float:
    """Levi form L(b, b) of f at a from circle means at shrinking radii.

    The circle-mean gap m(r) = mean f(a + r e^{i theta} b) - f(a) expands
    as L r^2 + O(r^4) for C^2 fields; two Richardson steps on m(r)/r^2
    remove the r^2 and r^4 error terms. Non-C2 hints return the raw
    smallest-radius quotient. With claimed_psh the gaps must not shrink
    as r grows; a violation warns rather than fails (it may be a lie in
    the claim or noise at the tolerance floor).
    """
    a = spaces.as_cvec(a)
    b = np.asarray(b, dtype=np.complex128)
    r0 = float(r0) if r0 is not None else default_radius(a)
    if r0 <= 0:
        raise ContractViolation("r0 must be positive")
    fa = _f_at(f, a)
    if fa == -math.inf:
        raise EvaluationError("Levi form undefined where f = -inf", point=a)
    ms = []
    for r in (r0, r0 / 2.0, r0 / 4.0):
        ms.append(circle.mean_on_circle(f, a, r * b, ctrl).value - fa)
    if claimed_psh and (ms[0] < ms[1] - 1e-9 or ms[1] < ms[2] - 1e-9):
        warnings.warn(f"circle means of a claimed-psh field decrease with "
                      f"radius at {a!r}: {ms}", RuntimeWarning)
    qs = [m / (r * r) for m, r in zip(ms, (r0, r0 / 2.0, r0 / 4.0))]
    if getattr(f, "smoothness_hint", "c2") != "c2":
        return qs[-1]
    r1 = (4.0 * qs[1] - qs[0]) / 3.0
    r2 = (4.0 * qs[2] - qs[1]) / 3.0
    return (16.0 * r2 - r1) / 15.0


@dataclass
class HermitianMatrix:
    """A Hermitian matrix with its pre-symmetrization defect recorded."""

    values: np.ndarray
    asym: float  # max |H - H^dagger| before symmetrization

    def __post_init__(self):
        H = np.asarray(self.values, dtype=np.complex128)
        defect = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
        if defect > 1e-10:
            raise ContractViolation(f"matrix not Hermitian: defect {defect:.3e}")
        self.values = H

    def min_eigenvalue(self) -> float:
        try:
            return float(np.linalg.eigvalsh(self.values).min())
        except np.linalg.LinAlgError as exc:
            raise NumericFailure("eigensolver failed", payload=self.values) from exc


def levi_matrix(f, a, basis=None, r0=None, ctrl=None) -> HermitianMatrix:
    """Levi form as a matrix over `basis` (default: coordinate directions).

    Off-diagonal entries come from the sesquilinear polarization of the
    quadratic form; the result is symmetrized, with the defect recorded.
    """
    a = spaces.as_cvec(a)
    n = a.shape[0]
    if basis is None:
        basis = np.eye(n, dtype=np.complex128)
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[1] != n:
        raise ContractViolation(f"basis must be (k, {n})")
    k = basis.shape[0]

    def Q(v):
        return levi_quadratic(f, a, v, r0, ctrl)

    H = np.zeros((k, k), dtype=np.complex128)
    diag = [Q(basis[i]) for i in range(k)]
    for i in range(k):
        H[i, i] = diag[i]
    for i in range(k):
        for j in range(i + 1, k):
            bi, bj = basis[i], basis[j]
            re = Q(bi + bj) - Q(bi - bj)
            im = Q(bi + 1j * bj) - Q(bi - 1j * bj)
            H[i, j] = 0.25 * (re + 1j * im)
            H[j, i] = np.conj(H[i, j])
    sym = 0.5 * (H + H.conj().T)
    asym = float(np.max(np.abs(H - H.conj().T))) if k else 0.0
    return HermitianMatrix(sym, asym)


# --- regions and scans -----------------------------------------------------


@dataclass
class Region:
    """A box in interleaved real coordinates (re_1, im_1, ..., re_n, im_n),
    optionally intersected with a membership predicate on complex vectors."""

    box: np.ndarray  # (2n, 2) rows of [lo, hi]
    contains: Optional[Callable] = None

    def __post_init__(self):
        b = np.asarray(self.box, dtype=np.float64)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] % 2 or b.shape[0] == 0:
            raise ContractViolation("box must be (2n, 2)")
        if np.any(b[:, 0] >= b[:, 1]):
            raise ContractViolation("box rows must satisfy lo < hi")
        self.box = b

    @property
    def dim(self):
        return self.box.shape[0] // 2

    def point_in(self, z) -> bool:
        x = np.empty(2 * self.dim)
        x[0::2] = np.real(z)
        x[1::2] = np.imag(z)
        if np.any(x < self.box[:, 0]) or np.any(x > self.box[:, 1]):
            return False
        return self.contains(z) if self.contains is not None else True

    def circle_in(self, a, b, r, nodes=64) -> bool:
        if not self.point_in(a):
            return False
        th = 2.0 * np.pi * np.arange(nodes) / nodes
        pts = a[None, :] + r * np.exp(1j * th)[:, None] * b[None, :]
        return all(self.point_in(p) for p in pts)

    def sample(self, rng, count, max_tries=1000):
        lo, hi = self.box[:, 0], self.box[:, 1]
        out = np.empty((count, self.dim), dtype=np.complex128)
        got = 0
        for _ in range(max_tries):
            need = count - got
            if need == 0:
                break
            raw = lo + (hi - lo) * rng.random((need, 2 * self.dim))
            pts = raw[:, 0::2] + 1j * raw[:, 1::2]
            for p in pts:
                if self.contains is None or self.contains(p):
                    out[got] = p
                    got += 1
                    if got == count:
                        break
        if got < count:
            raise SamplingError(
                f"region accepted only {got}/{count} samples; predicate too tight?")
        return out


def box_region(bounds, dim=None, contains=None) -> Region:
    """Region from symmetric scalar bounds or an explicit (2n, 2) array."""
    b = np.asarray(bounds, dtype=np.float64)
    if b.ndim == 0:
        if dim is None:
            raise ContractViolation("dim required with scalar bounds")
        b = np.tile([-float(b), float(b)], (2 * dim, 1))
    return Region(b, contains)


@dataclass
class PshScanReport:
    n_samples: int
    n_skipped: int
    worst_margin: float
    witness: Optional[tuple]  # (a, b, r)
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -self.tol


def psh_scan(f, region: Region, samples=200, seed=0, r_max=0.1, tol=1e-8,
             ctrl=None) -> PshScanReport:
    """Sample submean-value margins mean f(a + r e^{i t} b) - f(a).

    Circles are shrunk (r halving, up to 30 times) until contained in the
    region; uncontainable samples and -inf centers are skipped, never
    silently dropped from the count.
    """
    rng = spaces.rng_for(seed, "psh-scan")
    n = region.dim
    A = region.sample(rng, samples)
    raw = rng.standard_normal((samples, 2 * n))
    B = raw[:, 0::2] + 1j * raw[:, 1::2]
    B = B / np.linalg.norm(B, axis=1)[:, None]
    radii = r_max * rng.random(samples)

    worst = math.inf
    witness = None
    skipped = 0
    for i in range(samples):
        a, b = A[i], B[i]
        r = radii[i] if radii[i] > 0 else r_max
        held = False
        for _ in range(30):
            if region.circle_in(a, b, r):
                held = True
                break
            r *= 0.5
        if not held:
            skipped += 1
            continue
        fa = _f_at(f, a)
        if fa == -math.inf:
            skipped += 1
            continue
        m = circle.mean_on_circle(f, a, r * b, ctrl).value - fa
        if m < worst:
            worst = m
            witness = (a, b, r)
    if witness is None:
        raise NoDataError("every sample was skipped; nothing scanned")
    return PshScanReport(samples, skipped, float(worst), witness, tol)


def strict_avg_phi(f, a, r_max, n_dirs=64, seed=0, norm_fn=None, ctrl=None) -> float:
    """Smallest circle-mean curvature of f at a over sampled directions.

    Directions are normalized by norm_fn (Euclidean by default) and probed
    at radii r_max, r_max/2, r_max/4; returns min (mean - f(a)) / r^2.
    """
    a = spaces.as_cvec(a)
    if r_max <= 0:
        raise ContractViolation("r_max must be positive")
    fa = _f_at(f, a)
    if fa == -math.inf:
        raise EvaluationError("curvature undefined where f = -inf", point=a)
    n = a.shape[0]
    rng = spaces.rng_for(seed, "strict-avg-phi")
    raw = rng.standard_normal((n_dirs, 2 * n))
    B = raw[:, 0::2] + 1j * raw[:, 1::2]
    if norm_fn is None:
        B = B / np.linalg.norm(B, axis=1)[:, None]
    else:
        nb = np.array([float(norm_fn(b)) for b in B])
        B = B / nb[:, None]
    best = math.inf
    for b in B:
        for r in (r_max, r_max / 2.0, r_max / 4.0):
            m = circle.mean_on_circle(f, a, r * b, ctrl).value - fa
            best = min(best, m / (r * r))
    return float(best)


@dataclass
class UniformLambdaReport:
    value: float
    witness: Optional[np.ndarray]
    n_samples: int
    n_skipped: int


def uniform_lambda(f, region: Region, samples=100, seed=0, r_max=0.05,
                   n_dirs=16, norm_fn=None, ctrl=None) -> UniformLambdaReport:
    """Estimate the uniform strictness constant: the infimum over region
    points of the minimal circle-mean curvature (upper bound by sampling)."""
    rng = spaces.rng_for(seed, "uniform-lambda")
    inset = np.column_stack([region.box[:, 0] + r_max, region.box[:, 1] - r_max])
    if np.any(inset[:, 0] >= inset[:, 1]):
        raise ContractViolation("r_max leaves no interior to sample")
    inner = Region(inset, region.contains)
    A = inner.sample(rng, samples)
    best = math.inf
    wit = None
    skipped = 0
    for i in range(samples):
        a = A[i]
        try:
            v = strict_avg_phi(f, a, r_max, n_dirs,
                               seed=int(rng.integers(0, 2**31)),
                               norm_fn=norm_fn, ctrl=ctrl)
        except EvaluationError:
            skipped += 1
            continue
        if v < best:
            best = v
            wit = a
    if wit is None:
        raise NoDataError("every sample was skipped")
    return UniformLambdaReport(float(best), wit, samples, skipped)


# --- grids and mollification ----------------------------------------------


@dataclass
class GridFunction:
    """Samples of a field on a regular box grid in interleaved real
    coordinates. values has one axis per real coordinate."""

    box: np.ndarray  # (d, 2)
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.box, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if b.ndim != 2 or b.shape[1] != 2 or v.ndim != b.shape[0]:
            raise ContractViolation("box (d, 2) must match values ndim d")
        if any(s < 2 for s in v.shape):
            raise ContractViolation("grid needs >= 2 points per axis")
        if not np.all(np.isfinite(v)):
            raise ContractViolation("grid values must be finite")
        self.box = b
        self.values = v

    @property
    def spacing(self) -> np.ndarray:
        sizes = np.array(self.values.shape, dtype=np.float64)
        return (self.box[:, 1] - self.box[:, 0]) / (sizes - 1.0)

    def axes(self):
        return [np.linspace(lo, hi, m)
                for (lo, hi), m in zip(self.box, self.values.shape)]

    def as_field_oracle(self, name="grid") -> FieldOracle:
        interp = RegularGridInterpolator(self.axes(), self.values,
                                         method="linear", bounds_error=False,
                                         fill_value=None)
        d = self.box.shape[0]
        if d % 2:
            raise ContractViolation("field oracle needs an even number of axes")
        n = d // 2

        def to_real(Z):
            X = np.empty((Z.shape[0], d))
            X[:, 0::2] = np.real(Z)
            X[:, 1::2] = np.imag(Z)
            return X

        return FieldOracle(
            fn=lambda z: float(interp(to_real(np.asarray(z)[None, :]))[0]),
            batch=lambda Z: interp(to_real(np.asarray(Z))),
            dim=n, smoothness_hint="lipschitz", name=name)

    def save(self, stem: str):
        """Write stem.json (metadata) and stem.bin (row-major float64)."""
        meta = {
            "box": [[float(lo), float(hi)] for lo, hi in self.box],
            "shape": list(self.values.shape),
            "dtype": "float64",
            "order": "C",
        }
        with open(stem + ".json", "w") as fh:
            json.dump(meta, fh, indent=1)
            fh.write("\n")
        self.values.astype(np.float64).tofile(stem + ".bin")

    def to_csv(self) -> str:
        if self.values.ndim != 2:
            raise ContractViolation("CSV export is for 2-d grids only")
        lines = ["re,im,value"]
        ax0, ax1 = self.axes()
        for i, xv in enumerate(ax0):
            for j, yv in enumerate(ax1):
                lines.append(f"{xv!r},{yv!r},{self.values[i, j]!r}")
        return "\n".join(lines) + "\n"


def load_grid(stem: str) -> GridFunction:
    with open(stem + ".json") as fh:
        meta = json.load(fh)
    vals = np.fromfile(stem + ".bin", dtype=np.float64).reshape(meta["shape"])
    return GridFunction(np.asarray(meta["box"], dtype=np.float64), vals)


def sample_grid(f, box, shape) -> GridFunction:
    """Evaluate a field on a regular grid (box rows pair into complex axes)."""
    box = np.asarray(box, dtype=np.float64)
    axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(box, shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=-1)
    Z = X[:, 0::2] + 1j * X[:, 1::2]
    batch = getattr(f, "batch", None)
    if batch is not None:
        vals = np.asarray(batch(Z), dtype=np.float64)
    else:
        vals = np.array([float(f(z)) for z in Z])
    return GridFunction(box, vals.reshape(shape))


def bump_kernel(spacing, delta) -> np.ndarray:
    """Discrete rotationally-symmetric bump supported on ||x|| < delta,
    normalized so math.fsum of its entries is exactly 1.0."""
    spacing = np.asarray(spacing, dtype=np.float64)
    radii = np.floor(delta / spacing + 1e-12).astype(int)
    if np.any(radii < 2):
        raise ResolutionError(
            f"delta={delta} under twice the grid spacing {spacing.max()}")
    axes = [np.arange(-r, r + 1) * h / delta for r, h in zip(radii, spacing)]
    mesh = np.meshgrid(*axes, indexing="ij")
    rho2 = sum(m * m for m in mesh)
    K = np.where(rho2 < 1.0, np.exp(-1.0 / np.maximum(1.0 - rho2, 1e-300)), 0.0)
    K /= math.fsum(K.ravel())
    center = tuple(r for r in radii)
    for _ in range(50):
        resid = 1.0 - math.fsum(K.ravel())
        if resid == 0.0:
            return K
        K[center] += resid
    raise NumericFailure("kernel mass correction did not converge")


def mollify(grid: GridFunction, delta) -> GridFunction:
    """Smooth a grid field by convolution with the unit-mass bump kernel.

    The output lives on the subgrid at distance >= the kernel radius from
    the boundary (the natural domain where the average is fully informed).
    """
    if delta <= 0:
        raise ContractViolation("delta must be positive")
    K = bump_kernel(grid.spacing, delta)
    radii = [(s - 1) // 2 for s in K.shape]
    if any(2 * r + 1 > m for r, m in zip(radii, grid.values.shape)):
        raise ResolutionError("grid smaller than the kernel support")
    sm = convolve(grid.values, K, mode="valid")
    inset = np.array(radii, dtype=np.float64) * grid.spacing
    box = np.column_stack([grid.box[:, 0] + inset, grid.box[:, 1] - inset])
    return GridFunction(box, sm)


# --- named test fields ------------------------------------------------------


def field_norm(space, power=1.0) -> FieldOracle:
    """||z||^power as a scalar field (batch-enabled)."""
    return FieldOracle(
        fn=lambda z: float(spaces.norm(space, z)) ** power,
        batch=lambda Z: spaces.norms(space, Z) ** power,
        dim=space.dim, smoothness_hint="c2" if power >= 2 else "lipschitz",
        name=f"norm^{power:g}({space.label})")


def field_by_name(name: str, dim: int) -> FieldOracle:
    """Catalog of named fields for the command line and tests."""
    if name == "re_z1":
        return FieldOracle(lambda z: float(np.real(z[0])),
                           batch=lambda Z: np.real(Z[:, 0]).astype(float),
                           dim=dim, name=name)
    if name == "abs_re_z1":
        return FieldOracle(lambda z: abs(float(np.real(z[0]))),
                           batch=lambda Z: np.abs(np.real(Z[:, 0])),
                           dim=dim, smoothness_hint="lipschitz", name=name)
    if name == "norm_sq_l2":
        return field_norm(spaces.lp(2, dim), 2.0)
    if name == "norm_l1":
        return field_norm(spaces.lp(1, dim), 1.0)
    if name == "abs_prod":
        # log-modulus style: |z_1 * ... * z_n|
        return FieldOracle(lambda z: float(np.abs(np.prod(z))),
                           batch=lambda Z: np.abs(np.prod(Z, axis=1)),
                           dim=dim, smoothness_hint="lipschitz", name=name)
    if name == "log_abs_z1":
        def _log1(z):
            m = float(np.abs(z[0]))
            return math.log(m) if m > 0 else -math.inf
        return FieldOracle(_log1, batch=None, dim=dim,
                           smoothness_hint="usc", name=name)
    if name == "log_abs_1mz":
        def _log1m(z):
            m = float(np.abs(1.0 - z[0]))
            return math.log(m) if m > 0 else -math.inf
        return FieldOracle(_log1m, batch=None, dim=dim,
                           smoothness_hint="usc", name=name)
    if name == "neg_norm_sq":
        sp = spaces.lp(2, dim)
        return FieldOracle(lambda z: -float(spaces.norm(sp, z)) ** 2,
                           batch=lambda Z: -spaces.norms(sp, Z) ** 2,
                           dim=dim, name=name)
    raise ContractViolation(f"unknown field name {name!r}")
