"""Named example maps used throughout the tests and the CLI.

Each entry is the compact text form understood by perm_maps.parse.  The
N=3 sextet C1/C2, I1/I2, E1/E2 spans the observed dynamical range: the C
pair has no gliders up to width 4, the I pair saturates the glider counts,
the E pair sits in between.  V1/V2 are an N=5 pair differing by a single
outgoing relabeling, MOLS7 is a perfect N=7 map built from orthogonal Latin
squares, and Z4 is the linear map (2a+b, a+2b) on Z_4 with 0 written as 4.
"""

from __future__ import annotations

from .perm_maps import PermMap, parse

BUILTIN_TABLES: dict[str, str] = {
    "table1": "33 23 13 / 31 12 21 / 32 11 22",
    "U1": "12 21 / 11 22",
    "U2": "21 12 / 22 11",
    "C1": "32 22 13 / 23 33 12 / 21 31 11",
    "C2": "13 23 33 / 31 12 22 / 32 21 11",
    "I1": "11 31 21 / 12 23 33 / 13 22 32",
    "I2": "11 21 31 / 12 32 22 / 13 23 33",
    "E1": "32 22 13 / 31 21 12 / 23 33 11",
    "E2": "11 32 21 / 33 13 23 / 12 31 22",
    "V1": "11 25 34 43 52 / 22 31 45 54 13 / 33 42 51 15 24 / "
    "44 53 12 21 35 / 55 14 23 32 41",
    "V2": "11 55 34 23 42 / 52 31 25 44 13 / 33 22 41 15 54 / "
    "24 43 12 51 35 / 45 14 53 32 21",
    "MOLS7": "11 22 33 44 55 66 77 / 24 16 41 35 67 73 52 / "
    "36 45 12 23 71 57 64 / 47 51 65 72 26 34 13 / "
    "53 37 76 61 14 42 25 / 62 74 27 56 43 15 31 / "
    "75 63 54 17 32 21 46",
    "Z4": "33 41 13 21 / 14 22 34 42 / 31 43 11 23 / 12 24 32 44",
}


def get_builtin(name: str) -> PermMap:
    try:
        return parse(BUILTIN_TABLES[name])
    except KeyError:
        known = ", ".join(sorted(BUILTIN_TABLES))
        raise ValueError(f"unknown builtin {name!r}; known: {known}") from None


def builtin_names() -> list[str]:
    return sorted(BUILTIN_TABLES)
