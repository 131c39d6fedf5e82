"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback is. Set ``FWINTERVENE_PURE_PYTHON=1`` to force the fallback.
"""

import importlib
import os

from . import _kernels_py


def load_backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("fwintervene._kernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends():
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("FWINTERVENE_PURE_PYTHON", "").strip() not in ("", "0"):
    impl = _kernels_py
else:
    try:
        impl = load_backend("cython")
    except ImportError:
        impl = _kernels_py

BACKEND = impl.BACKEND
hash_uniform = impl.hash_uniform
edge_scores = impl.edge_scores
greedy_reduction = impl.greedy_reduction
run_graph_epidemic = impl.run_graph_epidemic

SUSCEPTIBLE, EXPOSED, INFECTIOUS, RECOVERED = 0, 1, 2, 3
MODEL_SEIR, MODEL_SIR, MODEL_SIS = 0, 1, 2
