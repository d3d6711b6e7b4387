"""Verdict reports: the one serialization format every suite emits.

A report captures what was checked (suite + params), how hard (n_samples),
the worst inequality margin found, the witness achieving it, and the
verdict. Canonical bytes exclude runtime so that re-runs with identical
seeds are byte-identical.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractViolation, SchemaError


def encode_value(v):
    """JSON-able encoding: complex scalars become [re, im], complex vectors
    [[re, im], ...]; numpy scalars collapse to python numbers."""
    if v is None or isinstance(v, (bool, str, int)):
        return v
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if not math.isfinite(f):
            raise ContractViolation(f"non-finite value {f!r} in a report")
        return f
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [encode_value(float(v.real)), encode_value(float(v.imag))]
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            return [encode_value(complex(x)) for x in v.ravel()] \
                if v.ndim == 1 else [encode_value(row) for row in v]
        return v.tolist()
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    raise ContractViolation(f"cannot serialize {type(v).__name__} in a report")


def decode_cvec(obj) -> np.ndarray:
    """Inverse of encode_value for a complex vector: [[re, im], ...]."""
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SchemaError(f"expected [[re, im], ...], got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


@dataclass
class VerdictReport:
    suite: str
    params: dict
    n_samples: int
    worst_margin: float
    witness: Optional[dict]
    passed: bool
    tolerance: float
    runtime_ms: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed != (self.worst_margin >= -self.tolerance):
            raise ContractViolation(
                f"verdict {self.passed} contradicts margin "
                f"{self.worst_margin} at tolerance {self.tolerance}")

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "params": encode_value(self.params),
            "n_samples": int(self.n_samples),
            "worst_margin": encode_value(float(self.worst_margin)),
            "witness": encode_value(self.witness),
            "pass": bool(self.passed),
            "tolerance": float(self.tolerance),
            "runtime_ms": int(self.runtime_ms),
            "extras": encode_value(self.extras),
        }

    def canonical_bytes(self) -> bytes:
        """Deterministic serialization; runtime is observational, not part
        of the report's identity."""
        d = self.to_json_dict()
        d.pop("runtime_ms")
        return json.dumps(d, sort_keys=True, separators=(",", ":"),
                          allow_nan=False).encode()

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1, allow_nan=False) + "\n"


def report_from_json_dict(d: dict) -> VerdictReport:
    required = {"suite", "params", "n_samples", "worst_margin", "witness",
                "pass", "tolerance"}
    missing = required - set(d)
    if missing:
        raise SchemaError(f"report missing keys: {sorted(missing)}")
    extra = set(d) - required - {"runtime_ms", "extras"}
    if extra:
        raise SchemaError(f"unknown report keys: {sorted(extra)}")
    return VerdictReport(
        suite=d["suite"], params=d["params"], n_samples=int(d["n_samples"]),
        worst_margin=float(d["worst_margin"]), witness=d["witness"],
        passed=bool(d["pass"]), tolerance=float(d["tolerance"]),
        runtime_ms=int(d.get("runtime_ms", 0)), extras=d.get("extras", {}))
