"""Kernel backend selection.

The compiled extension is preferred when importable; CVXLAB_BACKEND forces
a choice ("compiled" or "python", "auto" keeps the default). The selected
module is re-exported as `kernels` and its name as `BACKEND`.
"""
import os

from .errors import ContractViolation

_choice = os.environ.get("CVXLAB_BACKEND", "auto").strip().lower() or "auto"
if _choice not in ("auto", "compiled", "python"):
    raise ContractViolation(
        f"CVXLAB_BACKEND must be auto, compiled or python (got {_choice!r})"
    )

kernels = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core as kernels  # type: ignore[attr-defined]
    except ImportError:
        kernels = None
        if _choice == "compiled":
            raise ContractViolation(
                "CVXLAB_BACKEND=compiled but the extension is not built"
            )
if kernels is None:
    from . import _core_py as kernels

BACKEND: str = kernels.BACKEND_NAME


def thread_count(explicit=None):
    """Worker count for per-sample maps: explicit arg, else CVXLAB_THREADS, else 1."""
    if explicit is not None:
        n = int(explicit)
    else:
        n = int(os.environ.get("CVXLAB_THREADS", "1") or "1")
    if n < 1:
        raise ContractViolation("thread count must be >= 1")
    return n
