"""Permutation maps (a, b) -> (c, d) on pairs of digits 1..n.

A map is stored as the two n x n value tables C and D, row index a, column
index b, so that c = C[a][b] and d = D[a][b].  The compact text form writes
the cell pairs row by row, rows separated by " / ":

    33 23 13 / 31 12 21 / 32 11 22

For n >= 10 each cell is written "(c,d)" instead of the two-digit form.

Bijectivity of the pairings (a,b) -> (c,d), (a,c) -> (b,d) and (a,d) -> (b,c)
classifies a map as a permutation gate, a dual-unitary one and a perfect
one; dual unitarity is equivalent to C being row-Latin and D column-Latin
with all cell pairs distinct.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from .gates import Gate


class PermMap:
    """A pair map given by value tables c = C[a][b], d = D[a][b] (1-based)."""

    __slots__ = ("n", "cc", "dd")

    def __init__(self, cc, dd):
        self.cc = np.asarray(cc, dtype=np.int64)
        self.dd = np.asarray(dd, dtype=np.int64)
        n = self.cc.shape[0]
        if self.cc.shape != (n, n) or self.dd.shape != (n, n):
            raise ValueError("C and D must be square tables of the same size")
        for t in (self.cc, self.dd):
            if t.min() < 1 or t.max() > n:
                raise ValueError("table values must lie in 1..n")
        self.n = n

    def __call__(self, a: int, b: int) -> tuple[int, int]:
        return int(self.cc[a - 1, b - 1]), int(self.dd[a - 1, b - 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermMap):
            return NotImplemented
        return bool(
            self.n == other.n
            and np.array_equal(self.cc, other.cc)
            and np.array_equal(self.dd, other.dd)
        )

    def __hash__(self):
        return hash((self.n, self.cc.tobytes(), self.dd.tobytes()))

    def __repr__(self):
        return f"PermMap({render(self)!r})"

    def codes(self) -> np.ndarray:
        """Flat cell codes (c-1)*n + (d-1) in row-major cell order."""
        return ((self.cc - 1) * self.n + (self.dd - 1)).reshape(-1)

    @staticmethod
    def from_codes(codes: np.ndarray, n: int) -> "PermMap":
        codes = np.asarray(codes, dtype=np.int64).reshape(n, n)
        return PermMap(codes // n + 1, codes % n + 1)


def render(m: PermMap) -> str:
    """Compact text form; parse() inverts it exactly."""
    cells = []
    for a in range(m.n):
        row = []
        for b in range(m.n):
            c, d = int(m.cc[a, b]), int(m.dd[a, b])
            row.append(f"{c}{d}" if m.n <= 9 else f"({c},{d})")
        cells.append(" ".join(row))
    return " / ".join(cells)


def parse(text: str) -> PermMap:
    rows = [r.strip() for r in text.strip().split("/")]
    table = []
    for row in rows:
        cells = []
        for tok in row.split():
            pair = re.fullmatch(r"\((\d+),(\d+)\)", tok)
            if pair:
                cells.append((int(pair.group(1)), int(pair.group(2))))
            elif re.fullmatch(r"\d\d", tok):
                cells.append((int(tok[0]), int(tok[1])))
            else:
                raise ValueError(f"cannot parse cell {tok!r}")
        table.append(cells)
    n = len(table)
    if any(len(r) != n for r in table):
        raise ValueError("table is not square")
    cc = [[c for c, _ in r] for r in table]
    dd = [[d for _, d in r] for r in table]
    return PermMap(cc, dd)


@dataclass(frozen=True)
class MapFlags:
    bijective: bool
    dual_unitary: bool
    perfect: bool
    self_orthogonal: bool


def check_flags(m: PermMap) -> MapFlags:
    """Classify by direct bijectivity of the three leg pairings."""
    n = m.n
    aa, bb = np.indices((n, n))
    cc, dd = m.cc - 1, m.dd - 1

    def bij(x, y):
        return len(np.unique(x * n + y)) == n * n

    cd = bij(cc, dd)
    ac_bd = bij(aa, cc) and bij(bb, dd)
    ad_bc = bij(aa, dd) and bij(bb, cc)
    return MapFlags(
        bijective=cd,
        dual_unitary=cd and ac_bd,
        perfect=cd and ac_bd and ad_bc,
        self_orthogonal=bool(np.array_equal(m.dd, m.cc.T)),
    )


def is_noninteracting(m: PermMap) -> bool:
    """True when the map factors as (A (x) B) P, i.e. c depends only on b
    and d only on a."""
    return bool(np.all(m.cc == m.cc[0:1, :]) and np.all(m.dd == m.dd[:, 0:1]))


def to_gate(m: PermMap) -> Gate:
    """The 0/1 unitary with U^{cd}_{ab} = [m(a,b) == (c,d)]."""
    n = m.n
    t = np.zeros((n, n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            t[a, b, m.cc[a, b] - 1, m.dd[a, b] - 1] = 1.0
    return Gate.from_tensor(t)


def from_gate(g: Gate, atol: float = 1e-10) -> PermMap:
    """Extract the map from a homogeneous 0/1 permutation gate.

    Raises when any column is not a single unit entry within atol."""
    if not g.homogeneous:
        raise ValueError("permutation maps need a homogeneous gate")
    n = g.n
    t = np.abs(g.tensor())
    cc = np.zeros((n, n), dtype=np.int64)
    dd = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            pos = np.unravel_index(np.argmax(t[a, b]), (n, n))
            rest = t[a, b].copy()
            rest[pos] = 0.0
            if abs(t[a, b][pos] - 1.0) > atol or rest.max() > atol:
                raise ValueError("gate is not a permutation gate")
            cc[a, b], dd[a, b] = pos[0] + 1, pos[1] + 1
    return PermMap(cc, dd)


def yang_baxter_holds(m: PermMap) -> bool:
    """Exhaustive check of m12 m23 m12 = m23 m12 m23 on digit triples."""

    def m12(x):
        c, d = m(x[0], x[1])
        return (c, d, x[2])

    def m23(x):
        c, d = m(x[1], x[2])
        return (x[0], c, d)

    for x in itertools.product(range(1, m.n + 1), repeat=3):
        if m12(m23(m12(x))) != m23(m12(m23(x))):
            return False
    return True


# ---------------------------------------------------------------------------
# circuit-equivalence transformations


def space_reflect(m: PermMap) -> PermMap:
    """P U P: the reflected map sends (a,b) to the swapped image of (b,a)."""
    return PermMap(m.dd.T, m.cc.T)


def time_reflect(m: PermMap) -> PermMap:
    """U^t of a permutation gate is its inverse map; requires bijectivity."""
    n = m.n
    perm = m.codes()
    if len(np.unique(perm)) != n * n:
        raise ValueError("time reflection needs a bijective map")
    return PermMap.from_codes(np.argsort(perm), n)


def reshuffle(m: PermMap) -> PermMap:
    """U^R as a map (c,a) -> (d,b); defined when m is dual unitary."""
    if not check_flags(m).dual_unitary:
        raise ValueError("reshuffle of a permutation map needs dual unitarity")
    n = m.n
    cc = np.zeros((n, n), dtype=np.int64)
    dd = np.zeros((n, n), dtype=np.int64)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            c, d = m(a, b)
            cc[c - 1, a - 1] = d
            dd[c - 1, a - 1] = b
    return PermMap(cc, dd)


def diag_similarity(m: PermMap, sa, sb) -> PermMap:
    """(A (x) B) U (B^dag (x) A^dag) for permutations A = sa, B = sb.

    sa and sb are sequences with sa[j-1] = image of j, 1-based values.
    """
    n = m.n
    sa = np.asarray(sa, dtype=np.int64) - 1
    sb = np.asarray(sb, dtype=np.int64) - 1
    inv_a, inv_b = np.argsort(sa), np.argsort(sb)
    cc = np.zeros((n, n), dtype=np.int64)
    dd = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            c, d = m(int(inv_b[a]) + 1, int(inv_a[b]) + 1)
            cc[a, b] = sa[c - 1] + 1
            dd[a, b] = sb[d - 1] + 1
    return PermMap(cc, dd)


# ---------------------------------------------------------------------------
# canonical forms and enumeration
#
# The equivalence group is generated by space reflection, time reflection
# and the diagonal similarities; reshuffling is kept out of the group and
# only reported as a diagnostic.  The canonical form is the minimum of the
# orbit under the row-major cell serialization (c before d in every cell).


def _perm_gathers(n: int):
    """(cell gather, code relabel) index pairs for all diagonal similarities."""
    perms = list(itertools.permutations(range(n)))
    gathers = []
    aa, bb = np.indices((n, n))
    cgrid, dgrid = np.indices((n, n))
    for sa in perms:
        sa = np.array(sa)
        inv_a = np.argsort(sa)
        for sb in perms:
            sb = np.array(sb)
            inv_b = np.argsort(sb)
            cell = (inv_b[aa] * n + inv_a[bb]).reshape(-1)
            code = (sa[cgrid] * n + sb[dgrid]).reshape(-1)
            gathers.append((cell, code))
    return gathers


def _orbit_codes(flat: np.ndarray, n: int, gathers) -> np.ndarray:
    """All 4 (n!)^2 group images of the given maps; flat has shape (M, n*n)."""
    n2 = n * n
    tr = np.arange(n2).reshape(n, n).T.reshape(-1)
    swap = (np.arange(n2) % n) * n + np.arange(n2) // n

    variants = []
    inv = np.argsort(flat, axis=1)
    for base in (flat, inv):
        refl = swap[base[:, tr]]
        for x in (base, refl):
            for cell, code in gathers:
                variants.append(code[x[:, cell]])
    return np.stack(variants)  # (|G|, M, n*n)


def _pack(codes: np.ndarray) -> np.ndarray:
    """Pack code rows (values < n*n <= 16) into one uint64 per map, preserving
    lexicographic order; limited to n <= 4."""
    n2 = codes.shape[-1]
    weights = (16 ** np.arange(n2 - 1, -1, -1, dtype=np.uint64))
    return (codes.astype(np.uint64) * weights).sum(axis=-1)


def _unpack(packed: int, n: int) -> np.ndarray:
    digits = []
    for _ in range(n * n):
        digits.append(packed % 16)
        packed //= 16
    return np.array(digits[::-1], dtype=np.int64)


def canonical_form(m: PermMap) -> PermMap:
    """Lexicographically minimal representative of the equivalence class."""
    if m.n > 4:
        raise ValueError("canonical forms are limited to n <= 4")
    if not check_flags(m).bijective:
        raise ValueError("canonical forms need a bijective map")
    gathers = _perm_gathers(m.n)
    orbit = _orbit_codes(m.codes()[None, :], m.n, gathers)[:, 0, :]
    packed = _pack(orbit)
    return PermMap.from_codes(orbit[int(np.argmin(packed))], m.n)


def _row_latin_squares(n: int) -> np.ndarray:
    perms = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)
    rows = [perms[list(idx)] for idx in itertools.product(range(len(perms)), repeat=n)]
    return np.stack(rows)  # (n!^n, n, n)


@dataclass
class EquivClassReport:
    n: int
    map_count: int
    class_count: int
    representatives: list[PermMap]
    class_sizes: list[int]
    perfect: list[bool]
    non_interacting: list[bool]
    reshuffle_class_count: int | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "map_count": self.map_count,
            "class_count": self.class_count,
            "classes": [
                {
                    "representative": render(rep),
                    "size": size,
                    "perfect": perf,
                    "non_interacting": noni,
                }
                for rep, size, perf, noni in zip(
                    self.representatives,
                    self.class_sizes,
                    self.perfect,
                    self.non_interacting,
                )
            ],
            "reshuffle_class_count": self.reshuffle_class_count,
        }


def enumerate_du(
    n: int, max_n: int = 3, with_reshuffle_diagnostic: bool = False
) -> EquivClassReport:
    """Enumerate all dual-unitary permutation maps up to circuit equivalence.

    The search space is row-Latin C against column-Latin D filtered by
    orthogonality of the cell pairs.  n = 4 blows the raw space up to
    (4!)^8 ~ 1.1e11 table pairs (CPU-days); pass max_n=4 to attempt it
    anyway.  Larger n is refused outright.
    """
    space = float(math.factorial(n)) ** (2 * n)
    if n > 4:
        raise ValueError(
            f"n={n} is out of reach: the raw search space holds ~{space:.1e} table pairs"
        )
    if n > max_n:
        raise ValueError(
            f"n={n} exceeds max_n={max_n}: ~{space:.1e} raw table pairs before "
            "the orthogonality filter; pass a larger max_n to run anyway"
        )

    row_latin = _row_latin_squares(n)  # candidate C tables
    d_flat = row_latin.transpose(0, 2, 1).reshape(len(row_latin), -1)  # D tables

    gathers = _perm_gathers(n)
    classes: dict[int, list] = {}
    map_count = 0
    for c_tab in row_latin:
        codes = (c_tab.reshape(-1) - 1)[None, :] * n + (d_flat - 1)
        srt = np.sort(codes, axis=1)
        ok = np.all(srt[:, 1:] != srt[:, :-1], axis=1)
        block = codes[ok]
        if not len(block):
            continue
        map_count += len(block)
        canon = _pack(_orbit_codes(block, n, gathers)).min(axis=0)
        for key in canon:
            entry = classes.setdefault(int(key), [0])
            entry[0] += 1

    reps = [PermMap.from_codes(_unpack(k, n), n) for k in sorted(classes)]
    report = EquivClassReport(
        n=n,
        map_count=map_count,
        class_count=len(classes),
        representatives=reps,
        class_sizes=[classes[k][0] for k in sorted(classes)],
        perfect=[check_flags(r).perfect for r in reps],
        non_interacting=[is_noninteracting(r) for r in reps],
    )

    if with_reshuffle_diagnostic:
        merged: set[frozenset[int]] = set()
        for key in classes:
            m = PermMap.from_codes(_unpack(key, n), n)
            kr = int(_pack(_orbit_codes(reshuffle(m).codes()[None, :], n, gathers)).min())
            merged.add(frozenset((key, kr)))
        # classes merge pairwise when the reshuffle leaves the group orbit
        report.reshuffle_class_count = len(merged)
    return report
