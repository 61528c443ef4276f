"""Exact order analysis of the additive brickwork map over F_p.

The one-period update of the pair map (a, b) -> (a+b, a-b) on a ring of L
sites is the L x L matrix V = B A over F_p, with A block diagonal in the
(1 1; 1 -1) blocks and B its one-site translate.  The recurrence time of
the automaton is the order of V in GL_L(F_p); it is computed exactly by
descending from a known multiple p (p^{2s} - 1), and every reported order
carries the certificate V^T = I with V^{T/q} != I for each prime q | T.

All arithmetic is over the integers; no floating point is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gf import GF, GFElem, factorint, is_prime, multiplicative_order

DIRECT_CAP = 10 ** 6


@dataclass
class BrickworkMatrix:
    L: int
    p: int
    V: np.ndarray


@dataclass
class OrderReport:
    L: int
    p: int
    T: int
    n: int | None
    s: int | None
    multiple: int
    multiple_factors: dict[int, int]
    method: str
    certified: bool
    caveats: list[str] = field(default_factory=list)


def _pair_blocks(L: int, p: int, start: int) -> np.ndarray:
    m = np.zeros((L, L), dtype=np.int64)
    for k in range(0, L, 2):
        i, j = (start + k) % L, (start + k + 1) % L
        m[i, i] = 1
        m[i, j] = 1
        m[j, i] = 1
        m[j, j] = p - 1
    return m


def _shift(L: int) -> np.ndarray:
    c = np.zeros((L, L), dtype=np.int64)
    for i in range(L):
        c[(i + 1) % L, i] = 1
    return c


def build_v(L: int, p: int) -> BrickworkMatrix:
    """The full-period matrix V = B A on L sites over F_p.

    Sites alternate y_1, z_1, y_2, z_2, ...; A couples (y_j, z_j), B the
    translated pairs, so one period sends the components to
    Y_j = y_{j-1} - y_j - z_{j-1} - z_j and Z_j = y_j + y_{j+1} - z_j + z_{j+1}."""
    if L % 2 or L < 2:
        raise ValueError("L must be even and >= 2")
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    a = _pair_blocks(L, p, 0)
    b = _pair_blocks(L, p, 1)
    c = _shift(L)
    assert np.array_equal(b, c @ a @ c.T % p)
    v = b @ a % p

    rng = np.random.default_rng(12345)
    half = L // 2
    for _ in range(3):
        x = rng.integers(0, p, size=L)
        y, z = x[0::2], x[1::2]
        out = v @ x % p
        for j in range(half):
            yj = (y[j - 1] - y[j] - z[j - 1] - z[j]) % p
            zj = (y[j] + y[(j + 1) % half] - z[j] + z[(j + 1) % half]) % p
            assert out[2 * j] == yj and out[2 * j + 1] == zj
    return BrickworkMatrix(L=L, p=p, V=v)


def _matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return a @ b % p


def _matpow(v: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.eye(len(v), dtype=np.int64)
    base = v % p
    while e:
        if e & 1:
            result = _matmul(result, base, p)
        base = _matmul(base, base, p)
        e >>= 1
    return result


def _is_identity(m: np.ndarray) -> bool:
    return np.array_equal(m, np.eye(len(m), dtype=np.int64))


def _minimal_s(p: int, ell: int) -> int:
    """Least s >= 1 with p^s = +-1 mod ell, the degree of the subfield
    holding omega + omega^{-1} for omega of order ell."""
    if ell <= 2:
        return 1
    v = p % ell
    s = 1
    while v not in (1, ell - 1):
        v = v * p % ell
        s += 1
    return s


def order_multiple(p: int, L: int) -> tuple[int, int | None, int | None]:
    """A certified multiple of the order of V, with (n, s) when gcd(ell, p) = 1.

    Coprime ell: p (p^{2s} - 1).  For ell = p^m b the p-part contributes a
    factor p^{m+1} and b its own subfield degree."""
    ell = L // 2
    if ell == 1:
        return p * (p ** 2 - 1), 1, 1
    if ell % p:
        n = multiplicative_order(p, ell)
        s = _minimal_s(p, ell)
        return p * (p ** (2 * s) - 1), n, s
    m = 0
    b = ell
    while b % p == 0:
        b //= p
        m += 1
    nb = multiplicative_order(p, b) if b > 1 else 1
    sb = _minimal_s(p, b) if b > 1 else 1
    return p ** (m + 1) * (p ** (2 * sb) - 1), None, None


def _certify(v: np.ndarray, p: int, t: int) -> bool:
    if not _is_identity(_matpow(v, t, p)):
        return False
    return all(not _is_identity(_matpow(v, t // q, p)) for q in factorint(t))


def matrix_order(m: BrickworkMatrix, method: str = "auto",
                 budget: int = 10 ** 6) -> OrderReport:
    """Exact multiplicative order of V with a minimality certificate.

    divisor_descent factors a known multiple and strips primes that keep
    V^(T/q) = I; direct multiplies V until the identity returns.  auto tries
    the descent and falls back to direct iteration when factorization
    exceeds its budget."""
    v, p, L = m.V, m.p, m.L
    caveats: list[str] = []
    mult, n, s = order_multiple(p, L)

    if method not in ("auto", "divisor_descent", "direct"):
        raise ValueError(f"unknown method {method!r}")

    t = None
    used = method
    factors: dict[int, int] = {}
    if method in ("auto", "divisor_descent"):
        try:
            factors = factorint(mult, budget=budget)
            t = mult
            for q in factors:
                while t % q == 0 and _is_identity(_matpow(v, t // q, p)):
                    t //= q
            used = "divisor_descent"
        except ValueError as exc:
            if method == "divisor_descent":
                raise
            caveats.append(str(exc))
    if t is None:
        w = v.copy()
        t = 1
        while not _is_identity(w):
            if t >= DIRECT_CAP:
                raise RuntimeError(f"direct iteration exceeded {DIRECT_CAP} steps")
            w = _matmul(w, v, p)
            t += 1
        used = "direct"

    certified = _certify(v, p, t)
    return OrderReport(
        L=L, p=p, T=t, n=n, s=s,
        multiple=mult, multiple_factors=factors,
        method=used, certified=certified, caveats=caveats,
    )


def verify_corollary_2pm(p: int, m_max: int) -> list[dict]:
    """Orders at L = 2 p^m against the prediction a p^mu.

    a is twice the multiplicative order of -4 in F_p; mu must land in
    {m-2, m-1, m} (clipped at 0).  mu < m has never been observed, so any
    occurrence is flagged rather than rejected."""
    a = 2 * multiplicative_order(-4 % p, p)
    out = []
    for m in range(m_max + 1):
        L = 2 * p ** m
        t = matrix_order(build_v(L, p)).T
        mu = None
        q, k = t, 0
        if t % a == 0:
            q = t // a
            while q % p == 0:
                q //= p
                k += 1
            if q == 1:
                mu = k
        entry = {
            "p": p, "m": m, "L": L, "T": t, "a": a, "mu": mu,
            "mu_in_range": mu is not None and max(0, m - 2) <= mu <= m,
            "lower_bound_ok": t >= L / 4,
        }
        if mu is not None and mu < m:
            entry["note"] = f"mu={mu} < m={m}, first such case"
        out.append(entry)
    return out


def verify_divisibility(p: int, L: int) -> dict:
    """T | p (p^{2s} - 1) and T <= p^{L-1} - p for gcd(ell, p) = 1."""
    ell = L // 2
    if math.gcd(ell, p) != 1:
        raise ValueError("ell = L/2 must be coprime to p")
    rep = matrix_order(build_v(L, p))
    multiple = p * (p ** (2 * rep.s) - 1)
    # p^(L-1) - p vanishes at L = 2, where the bound says nothing
    bound = p ** (L - 1) - p if L >= 4 else None
    return {
        "p": p, "L": L, "ell": ell, "n": rep.n, "s": rep.s, "T": rep.T,
        "multiple": multiple,
        "divides": multiple % rep.T == 0,
        "upper_bound": bound,
        "upper_bound_ok": bound is None or rep.T <= bound,
    }


def verify_repunit_bound(p: int, k: int) -> dict:
    """Quadratic bound at the repunit lengths ell = 1 + p + ... + p^{k-1}."""
    ell = (p ** k - 1) // (p - 1)
    L = 2 * ell
    t = matrix_order(build_v(L, p)).T
    bound = p * (p - 1) * ell * ((p - 1) * ell + 1)
    return {"p": p, "k": k, "ell": ell, "L": L, "T": t,
            "bound": bound, "ok": t <= bound}


def _block(w: GFElem) -> list[list[GFElem]]:
    wi = w.inverse()
    return [[wi - 1, -wi - 1], [w + 1, w - 1]]


def _block_mul(a, b):
    return [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]


def _block_order(m, one, zero, cap: int) -> int:
    acc = m
    for k in range(1, cap + 1):
        if acc[0][0] == one and acc[1][1] == one and acc[0][1] == zero and acc[1][0] == zero:
            return k
        acc = _block_mul(acc, m)
    raise RuntimeError("block order exceeded its cap")


def block_spectrum(p: int, L: int) -> dict:
    """Spectral 2x2 blocks V(omega) over F_{p^n}, one per ell-th root of unity.

    Each block has characteristic polynomial
    lambda^2 + (2 - omega - omega^{-1}) lambda + 4, and the lcm of the block
    orders is the order of V itself."""
    ell = L // 2
    if math.gcd(ell, p) != 1:
        raise ValueError("ell = L/2 must be coprime to p")
    n = multiplicative_order(p, ell) if ell > 1 else 1
    f = GF(p, n)
    _, _, s = order_multiple(p, L)
    cap = p * (p ** (2 * s) - 1)
    blocks = []
    lcm = 1
    for w in f.roots_of_unity(ell):
        b = _block(w)
        trace = b[0][0] + b[1][1]
        det = b[0][0] * b[1][1] - b[0][1] * b[1][0]
        charpoly_ok = trace == w + w.inverse() - 2 and det == f.el(4)
        order = _block_order(b, f.one, f.zero, cap)
        special = None
        if w == f.el(-1):
            assert b[0][0] == f.el(-2) and b[0][1] == f.zero and order == f.el(-2).order()
            special = "minus_one"
        elif w + w.inverse() == f.el(6):
            assert order == p * GF(p).el(2).order()
            special = "trace6"
        blocks.append({"omega": w, "order": order,
                       "charpoly_ok": charpoly_ok, "special": special})
        lcm = lcm * order // math.gcd(lcm, order)
    t = matrix_order(build_v(L, p)).T
    return {"p": p, "L": L, "ell": ell, "n": n, "field": repr(f),
            "modulus": f.modulus, "blocks": blocks,
            "lcm_block_orders": lcm, "matrix_T": t, "matches": lcm == t}


def coprime_decomposition_check(p: int, a: int, b: int) -> dict:
    """Orders at ell = a b from the coprime parts, with the spare factor d
    measured rather than assumed."""
    if math.gcd(a, b) != 1:
        raise ValueError("a and b must be coprime")
    ta = matrix_order(build_v(2 * a, p)).T if a > 1 else 1
    tb = matrix_order(build_v(2 * b, p)).T if b > 1 else 1
    tab = matrix_order(build_v(2 * a * b, p)).T
    parts = math.lcm(ta, tb)
    g = math.gcd(parts, tab)
    d = math.lcm(parts // g, tab // g)
    return {
        "p": p, "a": a, "b": b, "T_2a": ta, "T_2b": tb, "T_2ab": tab,
        "lcm_parts": parts, "d": d, "d_divides_p_minus_1": (p - 1) % d == 0,
    }


def kernel_dimension_check(p: int, m: int) -> dict:
    """dim ker((J - I) + (J - I)) = 2 for the cyclic shift J on ell = p^m
    sites per parity sector, by exact rank over F_p."""
    ell = p ** m
    j = _shift(ell)
    t = (j - np.eye(ell, dtype=np.int64)) % p
    block = np.zeros((2 * ell, 2 * ell), dtype=np.int64)
    block[:ell, :ell] = t
    block[ell:, ell:] = t
    rank = _rank_mod(block, p)
    return {"p": p, "m": m, "ell": ell, "kernel_dim": 2 * ell - rank,
            "ok": 2 * ell - rank == 2}


def _rank_mod(mat: np.ndarray, p: int) -> int:
    a = mat.copy() % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        pivot = None
        for r in range(rank, rows):
            if a[r, c] % p:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        inv = pow(int(a[rank, c]), -1, p)
        a[rank] = a[rank] * inv % p
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] = (a[r] - a[r, c] * a[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank
