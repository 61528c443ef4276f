"""Factories for dual-unitary gates and permutation maps.

Covers the qubit phase family, dressed swaps, diagonal direct sums and the
controlled unitaries they generate, diagonal (light-cone) compositions, the
linear maps over Z_N, graph-state type gates with their Fourier reduction,
and phase dressings of permutation maps.
"""

from __future__ import annotations

import math
from math import gcd

import numpy as np

from .gates import ATOL_UNITARY, Gate, swap_gate
from .perm_maps import PermMap, to_gate


def n2_family(j: float) -> Gate:
    """The one-parameter qubit family: swap with phases e^{-iJ} on the
    parallel channels and -i e^{iJ} on the crossed ones.

    Dual unitary for every J, never perfect; non-interacting exactly when
    the four phases align (J = pi/4 mod pi/2).
    """
    para = np.exp(-1j * j)
    cross = -1j * np.exp(1j * j)
    mat = np.zeros((4, 4), dtype=complex)
    mat[0, 0] = mat[3, 3] = para
    mat[1, 2] = mat[2, 1] = cross
    return Gate(mat, 2, 2)


def dressed_swap(diag: np.ndarray, n: int, m: int = 0) -> Gate:
    """U = D P for a diagonal unitary D given by its diagonal entries."""
    m = m or n
    diag = np.asarray(diag, dtype=complex).reshape(-1)
    if diag.shape != (n * m,):
        raise ValueError(f"need {n * m} diagonal entries, got {diag.shape[0]}")
    if np.max(np.abs(np.abs(diag) - 1.0)) > ATOL_UNITARY:
        raise ValueError("diagonal entries must be unimodular")
    return Gate(diag[:, None] * swap_gate(n, m).matrix, n, m)


def direct_sum(g1: Gate, g2: Gate) -> Gate:
    """Glue two gates along the diagonal direction.

    For types (n1, m) and (n2, m) the result has type (n1+n2, m): the first
    incoming and the second outgoing leg split into the ranges 1..n1 and
    n1+1..n1+n2, and each block acts as the corresponding summand.
    """
    if g1.m != g2.m:
        raise ValueError("summands must share the transverse dimension m")
    n, m = g1.n + g2.n, g1.m
    t = np.zeros((n, m, m, n), dtype=complex)
    t[: g1.n, :, :, : g1.n] = g1.tensor()
    t[g1.n:, :, :, g1.n:] = g2.tensor()
    return Gate.from_tensor(t)


def controlled_unitary(us: list[np.ndarray]) -> Gate:
    """P [sum_j P^j (x) U^(j)]: the first digit selects which unitary hits
    the second, then the pair swaps.  Always dual unitary."""
    n = len(us)
    us = [np.asarray(u, dtype=complex) for u in us]
    m = us[0].shape[0]
    if any(u.shape != (m, m) for u in us):
        raise ValueError("all controlled blocks must be unitaries of one size")
    block = np.zeros((n * m, n * m), dtype=complex)
    for j, u in enumerate(us):
        block[j * m : (j + 1) * m, j * m : (j + 1) * m] = u
    return Gate(swap_gate(n, m).matrix @ block, n, m)


def diagonal_compose(g1: Gate, g2: Gate) -> Gate:
    """Contract two gates along one light-cone direction.

    Z^{beta,cd}_{ab,alpha} = sum_gamma U^{beta c}_{a gamma} V^{gamma d}_{b alpha};
    the composite has type (n1*n2, m) with the pair (a, b) packed row-major.
    """
    if g1.m != g2.m:
        raise ValueError("factors must share the transverse dimension m")
    n1, n2, m = g1.n, g2.n, g1.m
    t = np.einsum("iguc,jvgd->ijvucd", g1.tensor(), g2.tensor())
    return Gate.from_tensor(t.reshape(n1 * n2, m, m, n1 * n2))


def _embed2(mat: np.ndarray, site: int) -> np.ndarray:
    """Embed a two-qubit operator on sites (site, site+1) of four qubits."""
    eye = np.eye(2 ** (site - 1))
    tail = np.eye(2 ** (3 - site))
    return np.kron(np.kron(eye, mat), tail)


def compose_n4(x: Gate, y: Gate, v: Gate, z: Gate, c: np.ndarray) -> Gate:
    """The four-qubit brick Z_23 Y_34 C_23 V_12 X_23 read as an N=4 gate.

    x, y, v, z are qubit gates (dual unitary for the composite to be dual
    unitary); c is an arbitrary 4x4 unitary.
    """
    for g in (x, y, v, z):
        if (g.n, g.m) != (2, 2):
            raise ValueError("x, y, v, z must be qubit gates")
    c = np.asarray(c, dtype=complex)
    mat = (
        _embed2(z.matrix, 2)
        @ _embed2(y.matrix, 3)
        @ _embed2(c, 2)
        @ _embed2(v.matrix, 1)
        @ _embed2(x.matrix, 2)
    )
    return Gate(mat, 4, 4)


def ring_linear(n: int, coeffs: tuple[int, int, int, int], zero_as_n: bool = False) -> PermMap:
    """The linear map (a, b) -> (alpha a + beta b, gamma a + delta b) on Z_n.

    Ring elements are written as digits via r -> r+1, so that (1,1) is the
    fixed vacuum pair; with zero_as_n the element 0 is written as the digit
    n instead (labels keep their residue mod n).

    Bijective iff det = alpha delta - beta gamma is a unit, dual unitary iff
    beta and gamma are units too, perfect iff alpha and delta are as well.
    """
    alpha, beta, gamma, delta = (x % n for x in coeffs)
    if zero_as_n:
        to_ring = lambda label: label % n
        to_label = lambda r: n if r == 0 else r
    else:
        to_ring = lambda label: label - 1
        to_label = lambda r: r + 1
    cc = np.zeros((n, n), dtype=np.int64)
    dd = np.zeros((n, n), dtype=np.int64)
    for la in range(1, n + 1):
        for lb in range(1, n + 1):
            a, b = to_ring(la), to_ring(lb)
            cc[la - 1, lb - 1] = to_label((alpha * a + beta * b) % n)
            dd[la - 1, lb - 1] = to_label((gamma * a + delta * b) % n)
    return PermMap(cc, dd)


def ring_linear_flags(n: int, coeffs: tuple[int, int, int, int]) -> dict[str, bool]:
    """Invertibility conditions on the coefficients, without building the map."""
    alpha, beta, gamma, delta = coeffs
    unit = lambda x: gcd(x % n, n) == 1
    det = alpha * delta - beta * gamma
    return {
        "bijective": unit(det),
        "dual_unitary": unit(det) and unit(beta) and unit(gamma),
        "perfect": unit(det) and unit(beta) and unit(gamma) and unit(alpha) and unit(delta),
    }


def graph_state_gate(
    n: int,
    alphas: tuple[int, int],
    betas: tuple[int, int],
    gammas: tuple[int, int] = (0, 0),
) -> Gate:
    """U^{ij}_{kl} = omega^F / n with
    F = a1 ij + a2 kl + b1 ik + b2 jl + g1 il + g2 jk  (all mod n).

    Unitary iff b1 b2 - g1 g2 is a unit of Z_n, dual unitary iff
    a1 a2 - g1 g2 is one too, perfect iff a1 a2 - b1 b2 is as well.
    """
    a1, a2 = alphas
    b1, b2 = betas
    g1, g2 = gammas
    idx = np.arange(n)
    i, j, k, l = np.meshgrid(idx, idx, idx, idx, indexing="ij")
    f = (a1 * i * j + a2 * k * l + b1 * i * k + b2 * j * l + g1 * i * l + g2 * j * k) % n
    phases = np.exp(2j * np.pi * f / n) / n
    # rows (i, j) are the outgoing pair, columns (k, l) the incoming one
    mat = phases.reshape(n * n, n * n)
    return Gate(mat, n, n)


def kicked_ising_gate(n: int) -> Gate:
    """The self-dual kicked Ising point: all alpha and beta couplings 1.

    Dual unitary for every n and never perfect (a1 a2 - b1 b2 = 0)."""
    return graph_state_gate(n, (1, 1), (1, 1))


def p_state_gate(n: int) -> Gate:
    """a1 = a2 = b1 = 1, b2 = -1, gamma = 0; perfect exactly for odd n."""
    return graph_state_gate(n, (1, 1), (1, -1))


def fourier_transform(n: int) -> np.ndarray:
    """F_{jk} = omega^{-jk} / sqrt(n)."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)


def fourier_reduce(g: Gate, atol: float = ATOL_UNITARY) -> PermMap:
    """Peel the Fourier dressing off a graph gate without on-site couplings.

    For a1 = a2 = 0 the gate (F (x) F) U is a permutation gate up to a global
    phase; the extracted map is linear, (k,l) -> (b1 k + g1 l, g2 k + b2 l).
    Raises when the transform does not produce a permutation-with-phase
    matrix to within atol.
    """
    if not g.homogeneous:
        raise ValueError("fourier_reduce needs a homogeneous gate")
    n = g.n
    f2 = np.kron(fourier_transform(n), fourier_transform(n))
    w = f2 @ g.matrix
    cols = np.argmax(np.abs(w), axis=0)
    phases = w[cols, np.arange(n * n)]
    resid = np.abs(w).copy()
    resid[cols, np.arange(n * n)] -= 1.0
    if np.max(np.abs(resid)) > atol or len(set(cols.tolist())) != n * n:
        raise ValueError("transformed gate is not a permutation with phases")
    if np.max(np.abs(phases - phases[0])) > atol:
        raise ValueError("permutation phases are not a single global phase")
    cc = np.zeros((n, n), dtype=np.int64)
    dd = np.zeros((n, n), dtype=np.int64)
    for k in range(n):
        for l in range(n):
            out = int(cols[k * n + l])
            cc[k, l] = out // n + 1
            dd[k, l] = out % n + 1
    return PermMap(cc, dd)


def phase_dress_perm(m: PermMap, phases: np.ndarray) -> Gate:
    """U(|a>|b>) = e^{i phi_{cd}} |c>|d> with (c,d) = m(a,b).

    phases[c-1, d-1] holds phi_{cd}; dual unitarity of m is inherited for
    any choice of the phases.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (m.n, m.n):
        raise ValueError("need one phase per outgoing pair (c, d)")
    diag = np.exp(1j * phases.reshape(-1))
    return Gate(diag[:, None] * to_gate(m).matrix, m.n, m.n)
