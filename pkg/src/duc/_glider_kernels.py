"""Union-find kernel for exchange-relation nullspaces of permutation gates.

For a generalized-permutation evolution A = S^{shift} V the relation
O A = p A O couples pairs of basis states that agree outside the operator
window.  Following every such pair through A once yields either an equality
between two window-operator entries (with a complex factor) or forces an
entry to vanish; the solution space is read off from the surviving
components of a weighted union-find over the entries.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _find(parent, weight, x):
    """Root of x and the ratio X_x / X_root, with path compression."""
    root = x
    while parent[root] != root:
        root = parent[root]
    node = x
    total = 1.0 + 0.0j
    while parent[node] != node:
        total *= weight[node]
        node = parent[node]
    node = x
    acc = total
    while parent[node] != node:
        nxt = parent[node]
        wn = weight[node]
        parent[node] = root
        weight[node] = acc
        acc = acc / wn
        node = nxt
    return root, total


@numba.njit(cache=True)
def _union(parent, weight, zero, a, b, kappa, tol):
    """Impose X_b = kappa * X_a; contradictions zero out the component."""
    ra, wa = _find(parent, weight, a)
    rb, wb = _find(parent, weight, b)
    if ra == rb:
        if abs(kappa * wa - wb) > tol:
            zero[ra] = True
    else:
        parent[rb] = ra
        weight[rb] = kappa * wa / wb
        if zero[rb]:
            zero[ra] = True


@numba.njit(cache=True)
def _set_zero(parent, weight, zero, a):
    ra, _ = _find(parent, weight, a)
    zero[ra] = True


@numba.njit(cache=True)
def pair_solve(perm, theta, inv, n, L, w, x0, phase, tol):
    """Solution basis data for O A = phase * A O with O on sites x0..x0+w-1.

    perm and theta describe A on basis states (A|s> = theta[s] |perm[s]>),
    inv is the inverse permutation.  Returns (root, weight, zero) arrays over
    the n^{2w} operator entries: entry e equals weight[e] times the entry at
    root[e], and components flagged zero admit only the trivial solution.
    """
    dw = n ** w
    low = n ** (L - x0 - w)
    high = n ** x0
    mid = low * dw
    d = dw * dw
    parent = np.arange(d)
    weight = np.ones(d, dtype=np.complex128)
    zero = np.zeros(d, dtype=np.bool_)

    for r in range(dw):
        for c in range(dw):
            node = r * dw + c
            for hh in range(high):
                for ll in range(low):
                    # state packing: (high digits, window digits, low digits)
                    s = (hh * dw + r) * low + ll
                    s2 = (hh * dw + c) * low + ll
                    t = perm[s]
                    t2 = perm[s2]
                    rest_t = (t // mid) * low + t % low
                    rest_t2 = (t2 // mid) * low + t2 % low
                    if rest_t == rest_t2:
                        tw = (t // low) % dw
                        tw2 = (t2 // low) % dw
                        kappa = phase * theta[s] * np.conj(theta[s2])
                        _union(parent, weight, zero, node, tw * dw + tw2, kappa, tol)
                    else:
                        _set_zero(parent, weight, zero, node)
                    # backward: the pair as an image; a split preimage
                    # forces this entry of A O A^dag to vanish
                    p = inv[s]
                    p2 = inv[s2]
                    rest_p = (p // mid) * low + p % low
                    rest_p2 = (p2 // mid) * low + p2 % low
                    if rest_p != rest_p2:
                        _set_zero(parent, weight, zero, node)

    root = np.empty(d, dtype=np.int64)
    wgt = np.empty(d, dtype=np.complex128)
    for x in range(d):
        rx, wx = _find(parent, weight, x)
        root[x] = rx
        wgt[x] = wx
    return root, wgt, zero
