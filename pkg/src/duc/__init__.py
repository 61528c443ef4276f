"""Dual-unitary brickwork circuits.

Gate-level checks and constructions, permutation-map enumeration, transfer
matrix glider spectra, classical orbit simulation, and exact finite-field
recurrence times, with a deterministic CLI on top.
"""

from .builtins import builtin_names, get_builtin
from .gates import Gate, is_dual_unitary, is_perfect, is_unitary
from .perm_maps import PermMap, check_flags, parse, render, to_gate

__version__ = "0.1.0"

__all__ = [
    "Gate",
    "PermMap",
    "builtin_names",
    "check_flags",
    "get_builtin",
    "is_dual_unitary",
    "is_perfect",
    "is_unitary",
    "parse",
    "render",
    "to_gate",
    "__version__",
]
