"""Hot integer kernels, dispatched to numba or to the numpy fallback.

The backend is chosen once at import time from CANTOR_PERM_DISABLE_NUMBA.
Both implementations stay importable so tests and the benchmark can run
them side by side (``backend("numba")`` / ``backend("numpy")``).
"""

from __future__ import annotations

import importlib
from types import ModuleType

import numpy as np

from ._config import numba_requested

F2, BOOL = 0, 1

_EXPORTS = (
    "subset_images",
    "popcounts",
    "ample_masks",
    "lift_matches",
    "zeta_superset",
    "mobius_superset",
    "sr_products",
    "rref_mod_p",
)


def backend(name: str) -> ModuleType:
    if name == "numba":
        return importlib.import_module("cantor_perm._kernels_nb")
    if name == "numpy":
        return importlib.import_module("cantor_perm._kernels_np")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select() -> tuple[str, ModuleType]:
    if numba_requested():
        try:
            return "numba", backend("numba")
        except ImportError:
            pass
    return "numpy", backend("numpy")


BACKEND, _impl = _select()

subset_images = _impl.subset_images
popcounts = _impl.popcounts
ample_masks = _impl.ample_masks
zeta_superset = _impl.zeta_superset
mobius_superset = _impl.mobius_superset
rref_mod_p = _impl.rref_mod_p


def lift_matches(nk: int, proj_idx, targets) -> np.ndarray:
    """Subsets of ``nk`` points whose image under each projection row equals its target.

    Points whose image falls outside some target can never be used, so they
    are dropped before the exponential scan and the result is expanded back.
    """
    proj_idx = np.ascontiguousarray(proj_idx, dtype=np.int64).reshape(-1, nk)
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    keep = np.ones(nk, dtype=np.bool_)
    for p in range(proj_idx.shape[0]):
        keep &= ((targets[p] >> proj_idx[p]) & 1).astype(np.bool_)
    idx = np.flatnonzero(keep)
    if idx.size == nk:
        return _impl.lift_matches(nk, proj_idx, targets)
    sub = _impl.lift_matches(int(idx.size), np.ascontiguousarray(proj_idx[:, idx]), targets)
    out = np.zeros(sub.shape[0], dtype=np.int64)
    for j, k in enumerate(idx):
        out |= ((sub >> j) & 1) << np.int64(k)
    return out


def sr_products(kind: int, r: int, k: int, c: int, left, right) -> np.ndarray:
    left = np.ascontiguousarray(left, dtype=np.int64)
    right = np.ascontiguousarray(right, dtype=np.int64)
    return _impl.sr_products(kind, r, k, c, left, right)
