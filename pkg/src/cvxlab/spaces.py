"""Finite-dimensional complex normed (and quasi-normed) spaces.

A space is a recipe for measuring vectors in C^n: the p-norm family
(including p < 1 quasi-norms and p = inf), a weighted variant, Schatten
norms on square matrices stored as flattened vectors, and user-supplied
norm oracles. Vectors are 1-d numpy complex128 arrays of length dim.
"""
import json
import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .backend import kernels
from .errors import ContractViolation, NumericFailure, SchemaError

FAMILIES = ("lp", "hilbert", "weighted_lp", "schatten", "custom")

HOMOGENEITY_CHECK_SAMPLES = 100
HOMOGENEITY_CHECK_TOL = 1e-9


def rng_for(seed, *tags):
    """Deterministic generator derived from an integer seed and string tags.

    Distinct tag paths give independent streams; the same path always
    gives the same stream, regardless of call order elsewhere.
    """
    key = tuple(zlib.crc32(str(t).encode()) for t in tags)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def as_cvec(x, dim=None):
    """Coerce to a 1-d complex128 vector, checking shape and finiteness."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ContractViolation(f"expected a 1-d vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ContractViolation(f"expected dim {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ContractViolation("vector has NaN or Inf coordinates")
    return v


@dataclass(frozen=True)
class SpaceSpec:
    """Immutable description of a norm on C^dim.

    p carries the exponent for lp/weighted_lp, the Schatten exponent r
    for schatten, and 2.0 for hilbert. For schatten, dim = side * side
    and vectors are matrices flattened row-major.
    """

    family: str
    p: float
    dim: int
    weights: Optional[np.ndarray] = None
    norm_fn: Optional[Callable] = field(default=None, repr=False, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractViolation(f"unknown family {self.family!r}")
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise ContractViolation("dim must be a positive integer")
        if not (self.p > 0):
            raise ContractViolation("exponent must be positive")
        if self.family == "weighted_lp":
            if self.weights is None:
                raise ContractViolation("weighted_lp requires weights")
            w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (self.dim,) or not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise ContractViolation("weights must be positive finite, length dim")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ContractViolation("weights only apply to weighted_lp")
        if self.family == "schatten":
            side = math.isqrt(self.dim)
            if side * side != self.dim:
                raise ContractViolation("schatten dim must be a perfect square")
        if self.family == "custom" and self.norm_fn is None:
            raise ContractViolation("custom family requires a norm oracle")

    @property
    def side(self):
        """Matrix side length for schatten spaces."""
        return math.isqrt(self.dim)

    @property
    def is_quasi(self):
        return self.p < 1.0

    @property
    def triangle_constant(self):
        """||x+y|| <= c (||x|| + ||y||); 1 for norms, 2^(1/p - 1) below p = 1."""
        return 1.0 if self.p >= 1.0 else 2.0 ** (1.0 / self.p - 1.0)

    @property
    def label(self):
        if self.name:
            return self.name
        if self.family == "lp":
            p = "inf" if self.p == math.inf else f"{self.p:g}"
            return f"lp:{p}:{self.dim}"
        if self.family == "hilbert":
            return f"hilbert:{self.dim}"
        if self.family == "schatten":
            return f"schatten:{self.p:g}:{self.dim}"
        if self.family == "weighted_lp":
            return f"weighted_lp:p={self.p:g}:dim={self.dim}"
        return f"custom:{self.dim}"

    def to_json_dict(self):
        if self.family == "custom":
            raise SchemaError("custom norm oracles cannot be serialized")
        d = {"family": self.family, "p": self.p, "dim": int(self.dim)}
        if self.p == math.inf:
            d["p"] = "inf"
        if self.weights is not None:
            d["weights"] = [float(w) for w in self.weights]
        if self.name:
            d["name"] = self.name
        return d


def lp(p, dim, name=""):
    return SpaceSpec("lp", float(p), int(dim), name=name)


def hilbert(dim, name=""):
    return SpaceSpec("hilbert", 2.0, int(dim), name=name)


def weighted_lp(p, weights, name=""):
    w = np.asarray(weights, dtype=np.float64)
    return SpaceSpec("weighted_lp", float(p), int(w.shape[0]), weights=w, name=name)


def schatten(r, side, name=""):
    return SpaceSpec("schatten", float(r), int(side) * int(side), name=name)


def custom(norm_fn, dim, seed=0, name="custom"):
    """Wrap a user norm oracle, spot-checking positive homogeneity.

    The oracle is evaluated on seeded samples v and scalars c and must
    satisfy N(c v) = |c| N(v) to relative 1e-9, else registration fails.
    """
    spec = SpaceSpec("custom", 1.0, int(dim), norm_fn=norm_fn, name=name)
    rng = rng_for(seed, "custom-homogeneity", name)
    for _ in range(HOMOGENEITY_CHECK_SAMPLES):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        c = (0.1 + 2.0 * rng.random()) * np.exp(2j * np.pi * rng.random())
        base = float(norm_fn(v))
        scaled = float(norm_fn(c * v))
        if not np.isfinite(base) or base < 0:
            raise ContractViolation("norm oracle returned a non-finite or negative value")
        if abs(scaled - abs(c) * base) > HOMOGENEITY_CHECK_TOL * max(1.0, abs(c) * base):
            raise ContractViolation(
                f"norm oracle is not positively homogeneous: "
                f"N(cv)={scaled!r} vs |c|N(v)={abs(c) * base!r}"
            )
    return spec


def _schatten_values(M):
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure("singular value decomposition failed", payload=M) from exc


def norm(space: SpaceSpec, v) -> float:
    """The space's norm of a single vector."""
    v = as_cvec(v, space.dim)
    if space.family in ("lp", "hilbert", "weighted_lp"):
        return float(kernels.lp_norm(v, space.p, space.weights))
    if space.family == "schatten":
        s = _schatten_values(v.reshape(space.side, space.side))
        if space.p == math.inf:
            return float(s.max())
        return float(np.sum(s**space.p) ** (1.0 / space.p))
    val = float(space.norm_fn(v))
    if not np.isfinite(val):
        raise NumericFailure("custom norm oracle returned a non-finite value")
    return val


def norms(space: SpaceSpec, V) -> np.ndarray:
    """Row-wise norms of a batch; same checks as norm()."""
    V = np.asarray(V, dtype=np.complex128)
    if V.ndim != 2 or V.shape[1] != space.dim:
        raise ContractViolation(f"expected batch shape (m, {space.dim})")
    if not np.all(np.isfinite(V)):
        raise ContractViolation("batch has NaN or Inf coordinates")
    if space.family in ("lp", "hilbert", "weighted_lp"):
        return np.asarray(kernels.lp_norms(V, space.p, space.weights))
    if space.family == "schatten":
        s = _schatten_values(V.reshape(-1, space.side, space.side))
        if space.p == math.inf:
            return s.max(axis=1)
        return np.sum(s**space.p, axis=1) ** (1.0 / space.p)
    return np.array([norm(space, row) for row in V])


def random_unit(space: SpaceSpec, count, seed) -> np.ndarray:
    """Seeded batch of unit vectors, rows normalized in the space's norm.

    Directions are isotropic complex Gaussians; each row is drawn from its
    own column block so a longer batch extends a shorter one row-for-row.
    """
    if count < 0:
        raise ContractViolation("count must be >= 0")
    rng = rng_for(seed, "random-unit", space.label)
    raw = rng.standard_normal((int(count), 2 * space.dim))
    V = raw[:, 0::2] + 1j * raw[:, 1::2]
    nv = norms(space, V)
    bad = nv < 1e-300
    if np.any(bad):
        V[bad] = 0.0
        V[bad, 0] = 1.0
        nv = norms(space, V)
    V = V / nv[:, None]
    drift = np.abs(norms(space, V) - 1.0)
    if drift.size and drift.max() > 1e-12:
        # one more polish pass; custom oracles may round worse than lp
        V = V / norms(space, V)[:, None]
        if np.abs(norms(space, V) - 1.0).max() > 1e-12:
            raise NumericFailure("unable to normalize samples to 1e-12")
    return V


def space_from_json_dict(d) -> SpaceSpec:
    """Inverse of to_json_dict, with schema-level validation."""
    if not isinstance(d, dict):
        raise SchemaError("space description must be a JSON object")
    allowed = {"family", "p", "dim", "weights", "name"}
    extra = set(d) - allowed
    if extra:
        raise SchemaError(f"unknown space keys: {sorted(extra)}")
    family = d.get("family")
    if family == "custom":
        raise SchemaError("custom spaces cannot be built from JSON")
    if family not in FAMILIES:
        raise SchemaError(f"unknown family {family!r}")
    if "dim" not in d:
        raise SchemaError("space description requires dim")
    dim = d["dim"]
    if not isinstance(dim, int):
        raise SchemaError("dim must be an integer")
    p = d.get("p", 2.0)
    if p == "inf":
        p = math.inf
    if not isinstance(p, (int, float)):
        raise SchemaError("p must be a number or 'inf'")
    name = d.get("name", "")
    try:
        if family == "weighted_lp":
            return SpaceSpec(family, float(p), dim,
                             weights=np.asarray(d["weights"], dtype=np.float64),
                             name=name)
        if family == "hilbert":
            return hilbert(dim, name=name)
        return SpaceSpec(family, float(p), dim, name=name)
    except KeyError as exc:
        raise SchemaError(f"missing space key: {exc}") from exc
    except ContractViolation as exc:
        raise SchemaError(str(exc)) from exc


def parse_space(text) -> SpaceSpec:
    """Parse the CLI mini-grammar family:param:dim, or inline JSON.

    Examples: lp:2:3, lp:inf:2, lp:0.5:4, schatten:1:4 (dim = side^2),
    hilbert:3. Anything richer (weights, names) goes through JSON.
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            return space_from_json_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"bad space JSON: {exc}") from exc
    parts = text.split(":")
    fam = parts[0]
    try:
        if fam == "hilbert":
            if len(parts) != 2:
                raise SchemaError("hilbert takes one parameter: hilbert:dim")
            return hilbert(int(parts[1]))
        if fam in ("lp", "schatten"):
            if len(parts) != 3:
                raise SchemaError(f"{fam} takes two parameters: {fam}:p:dim")
            p = math.inf if parts[1] == "inf" else float(parts[1])
            dim = int(parts[2])
            if fam == "schatten":
                side = math.isqrt(dim)
                if side * side != dim:
                    raise SchemaError("schatten dim must be a perfect square")
                return schatten(p, side)
            return lp(p, dim)
    except (ValueError, ContractViolation) as exc:
        raise SchemaError(f"bad space spec {text!r}: {exc}") from exc
    raise SchemaError(f"unknown space family in {text!r}")
