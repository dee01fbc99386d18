"""Runtime switches read from the environment.

CANTOR_PERM_DISABLE_NUMBA=1   use the pure-numpy kernels even if numba imports
CANTOR_PERM_BUDGET_BITS=N     override every enumeration budget with N bits
"""

from __future__ import annotations

import os

DEFAULT_ENUM_BITS = 24
DEFAULT_ORACLE_BITS = 20
DEFAULT_LIFT_BITS = 22

# Hard ceiling: kernel masks are int64.
MAX_KERNEL_BITS = 62


def numba_requested() -> bool:
    return os.environ.get("CANTOR_PERM_DISABLE_NUMBA", "").strip().lower() in ("", "0", "false", "no")


def budget_bits(default: int) -> int:
    raw = os.environ.get("CANTOR_PERM_BUDGET_BITS")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(0, min(value, MAX_KERNEL_BITS))
