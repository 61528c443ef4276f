"""Light-cone channels, transfer matrices, gliders, and exact correlators.

The one-site channels M+ and M- propagate operators along the two light-cone
directions of the brickwork circuit.  Their multi-site extension is a
transfer matrix t_alpha on a chain of 2*alpha auxiliary sites, built from
V = P U^dag and V' = P U^R with a single traced bond.  Unimodular
eigenvalues of t_alpha count gliders; the glider operators themselves are
recovered by solving the exchange relation with the shift and Floquet
operators on a small ring, one linear problem per unimodular eigenvalue.
Correlators are evaluated as exact infinite-temperature traces on a finite
ring, densely or by basis-state counting for generalized-permutation gates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gates import ATOL_EIGVAL, ATOL_UNITARY, Gate, d4_transform, is_unitary, reshuffle_r, swap_gate

DEFAULT_DIM_CAP = 6561  # N^(2 alpha); 3^8 covers N=3 up to alpha=4
EXCHANGE_ATOL = 1e-8


def channel_m(g: Gate, sign: str) -> np.ndarray:
    """Superoperator of M+(o) = Tr_1(U^dag (o x 1) U)/N  (sign "+") or
    M-(o) = Tr_2(U^dag (1 x o) U)/N  (sign "-"), acting on vectorized o.

    Rows and columns are (r, c) pairs of the operator entry o[r, c]."""
    if not g.homogeneous:
        raise ValueError("channels need a homogeneous gate")
    if not is_unitary(g):
        raise ValueError("channels need a unitary gate")
    t = g.tensor()
    n = g.n
    if sign == "+":
        k = np.einsum("mncd,mNCd->nNcC", t.conj(), t) / n
    elif sign == "-":
        k = np.einsum("mncd,MncD->mMdD", t.conj(), t) / n
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return k.reshape(n * n, n * n)


@dataclass
class TransferMatrix:
    alpha: int
    direction: str
    n: int
    matrix: np.ndarray


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    unimodular_count: int
    trivial_subtracted: int
    phase_fractions: list[tuple[int, int]] = field(default_factory=list)


def _is_binary_gate(g: Gate) -> bool:
    m = g.matrix
    return bool(np.array_equal(m.imag, np.zeros_like(m.imag)) and
                np.array_equal(m.real, np.rint(m.real)))


def _gate_as_v_tensors(g: Gate) -> tuple[np.ndarray, np.ndarray]:
    """V = P U^dag and V' = P U^R, each reshaped to [site_out, aux_out,
    site_in, aux_in] for the MPO contraction."""
    n = g.n
    p = swap_gate(n, n).matrix
    v = p @ g.matrix.conj().T
    vp = p @ reshuffle_r(g).matrix
    return v.reshape(n, n, n, n), vp.reshape(n, n, n, n)


def _half_chain(v4: np.ndarray, alpha: int) -> np.ndarray:
    """Product V_{alpha,A} ... V_{1,A} as a tensor [chain_out, aux_out,
    chain_in, aux_in]; the first-applied site is the most significant."""
    w = v4
    n = v4.shape[0]
    for _ in range(alpha - 1):
        d = w.shape[0]
        w = np.einsum("sbim,CmDa->CsbDia", v4, w).reshape(d * n, n, d * n, n)
    return w


def transfer_matrix(g: Gate, alpha: int, direction: str = "right",
                    dim_cap: int = DEFAULT_DIM_CAP) -> TransferMatrix:
    """t_alpha = Tr_A[V'_{2a,A} ... V'_{a+1,A} V_{a,A} ... V_{1,A}] / N.

    direction "left" uses the space-reflected gate.  Chain sites are packed
    row-major, site 1 most significant; for alpha = 1 the matrix equals the
    channel_m("+") superoperator entrywise.
    """
    if not g.homogeneous:
        raise ValueError("transfer matrices need a homogeneous gate")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    n = g.n
    dim = n ** (2 * alpha)
    if dim > dim_cap:
        raise ValueError(
            f"t_alpha dimension {dim} = {n}^{2 * alpha} exceeds the cap {dim_cap}"
        )
    if direction == "left":
        g = d4_transform(g, "s")
    elif direction != "right":
        raise ValueError(f"direction must be 'right' or 'left', got {direction!r}")

    if _is_binary_gate(g):
        # N * t_alpha is an exact integer matrix for permutation gates
        v4, vp4 = _gate_as_v_tensors(g)
        v4 = np.rint(v4.real).astype(np.int64)
        vp4 = np.rint(vp4.real).astype(np.int64)
        w, wp = _half_chain(v4, alpha), _half_chain(vp4, alpha)
        mat = np.einsum("HaKm,LmMa->LHMK", wp, w).reshape(dim, dim)
        return TransferMatrix(alpha, direction, n, mat.astype(np.float64) / n)

    v4, vp4 = _gate_as_v_tensors(g)
    w, wp = _half_chain(v4, alpha), _half_chain(vp4, alpha)
    mat = np.einsum("HaKm,LmMa->LHMK", wp, w).reshape(dim, dim) / n
    return TransferMatrix(alpha, direction, n, mat)


def spectrum_report(t: TransferMatrix, atol: float = ATOL_EIGVAL) -> SpectrumReport:
    """Eigenvalues of t_alpha with the count of unimodular ones.

    phase_fractions lists, for each unimodular eigenvalue, the best rational
    approximation p/q (q <= 2 dim) of its phase over 2 pi: gliders come with
    root-of-unity phases, so a tiny q is the expected signature.
    """
    evs = np.linalg.eigvals(t.matrix)
    uni = np.abs(np.abs(evs) - 1.0) <= atol
    fracs = []
    qmax = 2 * t.matrix.shape[0]
    for lam in evs[uni]:
        f = Fraction(float(np.angle(lam)) / (2.0 * np.pi)).limit_denominator(qmax)
        fracs.append((f.numerator, f.denominator))
    return SpectrumReport(
        eigenvalues=evs,
        unimodular_count=int(uni.sum()),
        trivial_subtracted=int(uni.sum()) - 1,
        phase_fractions=fracs,
    )


def glider_count(g: Gate, alpha: int, dim_cap: int = DEFAULT_DIM_CAP,
                 atol: float = ATOL_EIGVAL) -> int:
    """Unimodular eigenvalues of t_alpha summed over both directions, minus
    the two trivial identity fixed points."""
    total = 0
    for direction in ("right", "left"):
        rep = spectrum_report(transfer_matrix(g, alpha, direction, dim_cap), atol)
        total += rep.unimodular_count
    return total - 2


# ---------------------------------------------------------------------------
# ring evolution (dense vectors over N^L)


def _apply_two_site(psi: np.ndarray, gmat: np.ndarray, i: int, j: int, n: int, L: int):
    """Apply a two-site gate to axes (i, j) of a rank-L state tensor."""
    psi = np.moveaxis(psi, (i, j), (0, 1))
    shape = psi.shape
    psi = gmat @ psi.reshape(n * n, -1)
    return np.moveaxis(psi.reshape(shape), (0, 1), (i, j))


def apply_floquet(psi: np.ndarray, g: Gate, L: int) -> np.ndarray:
    """One Floquet step V = V2 V1 on a state tensor of rank L.

    V1 couples (1,2), (3,4), ...; V2 couples (2,3), ..., (L,1)."""
    n = g.n
    for i in range(0, L, 2):
        psi = _apply_two_site(psi, g.matrix, i, i + 1, n, L)
    for i in range(1, L - 1, 2):
        psi = _apply_two_site(psi, g.matrix, i, i + 1, n, L)
    return _apply_two_site(psi, g.matrix, L - 1, 0, n, L)


def shift_state(psi: np.ndarray, k: int) -> np.ndarray:
    """Translate site contents by k places to the right (site j value moves
    to site j+k), for a rank-L state tensor."""
    L = psi.ndim
    axes = [(i - k) % L for i in range(L)]
    return psi.transpose(axes)


def _site_operator(psi: np.ndarray, op: np.ndarray, x: int, n: int) -> np.ndarray:
    """Apply an operator on sites x..x+w-1 (0-based x) of a state tensor."""
    w = round(np.log(op.shape[0]) / np.log(n))
    L = psi.ndim
    sites = [(x + i) % L for i in range(w)]
    psi = np.moveaxis(psi, sites, range(w))
    shape = psi.shape
    psi = op @ psi.reshape(op.shape[0], -1)
    return np.moveaxis(psi.reshape(shape), range(w), sites)


@dataclass
class GliderCandidate:
    direction: str
    eigenvalue: complex
    phase: complex  # e^{2 i phi}, the exchange-relation factor
    support_range: int
    operator: np.ndarray
    residual: float
    verified: bool


# Right movers anchor on odd sites and commute with S^{+2} V, left movers on
# even sites with S^{-2} V; with O anchored this way, one Floquet step moves
# it two sites along its light cone.
_WINDOW_ANCHOR = {"right": 1, "left": 0}
_WINDOW_SHIFT = {"right": 2, "left": -2}

_DENSE_SOLVER_CAP = 2 ** 25  # max probe-batch entries N^L * N^(4 alpha - 2)


def _exchange_residual(op: np.ndarray, g: Gate, direction: str, phase: complex,
                       L: int, probes: int = 3, seed: int = 11) -> float:
    """Largest residual of O(x) S^{+2} V psi = phase S^{+2} V O(x) psi over
    random probe states (right movers, x odd; S^{-2} and x even for left
    movers), for a unit-norm operator O on sites x .. x+w-1."""
    n = g.n
    rng = np.random.default_rng(seed)
    shift = _WINDOW_SHIFT[direction]
    x0 = _WINDOW_ANCHOR[direction]
    worst = 0.0
    for _ in range(probes):
        psi = rng.standard_normal((n,) * L) + 1j * rng.standard_normal((n,) * L)
        psi /= np.linalg.norm(psi)
        lhs = _site_operator(shift_state(apply_floquet(psi, g, L), shift), op, x0, n)
        rhs = phase * shift_state(apply_floquet(_site_operator(psi, op, x0, n), g, L), shift)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def _batched_floquet(psi: np.ndarray, g: Gate, L: int) -> np.ndarray:
    """One Floquet step on a state tensor with a trailing batch axis."""
    for i in range(0, L, 2):
        psi = _apply_two_site(psi, g.matrix, i, i + 1, g.n, L)
    for i in range(1, L - 1, 2):
        psi = _apply_two_site(psi, g.matrix, i, i + 1, g.n, L)
    return _apply_two_site(psi, g.matrix, L - 1, 0, g.n, L)


def _dense_window_terms(g: Gate, alpha: int, direction: str, L: int,
                        samples: int = 2, seed: int = 23):
    """Sampled matrices (M1, M2) of the exchange relation restricted to
    window operators: the relation with factor p reads (M1 - p M2) vec(O) = 0.

    Columns are window-operator entries (r, c); rows stack the components of
    (O A - p A O)|psi> over random probe states psi, A = S^{shift} V."""
    n = g.n
    w = 2 * alpha - 1
    x0 = _WINDOW_ANCHOR[direction]
    shift = _WINDOW_SHIFT[direction]
    sites = list(range(x0, x0 + w))
    dw = n ** w
    rng = np.random.default_rng(seed)
    m1_rows, m2_rows = [], []
    for _ in range(samples):
        psi = rng.standard_normal((n,) * L) + 1j * rng.standard_normal((n,) * L)
        psi /= np.linalg.norm(psi)
        b = shift_state(apply_floquet(psi, g, L), shift)
        bw = np.moveaxis(b, sites, range(w)).reshape(dw, -1)
        rest = bw.shape[1]
        m1 = np.zeros((dw, rest, dw, dw), dtype=complex)
        for r in range(dw):
            m1[r, :, r, :] = bw.T
        # batch of states O_{r,c}|psi>, one per operator entry
        pw = np.moveaxis(psi, sites, range(w)).reshape(dw, -1)
        batch = np.zeros((dw, rest, dw * dw), dtype=complex)
        for r in range(dw):
            batch[r, :, r * dw:(r + 1) * dw] = pw.T
        batch = np.moveaxis(
            batch.reshape((n,) * L + (dw * dw,)), range(w), sites)
        y = _batched_floquet(batch, g, L)
        y = y.transpose([(i - shift) % L for i in range(L)] + [L])
        m1_rows.append(m1.reshape(dw * rest, dw * dw))
        m2_rows.append(np.moveaxis(y, sites, range(w)).reshape(dw * rest, dw * dw))
    return np.vstack(m1_rows), np.vstack(m2_rows)


def _nullspace(m: np.ndarray, rtol: float = EXCHANGE_ATOL) -> np.ndarray:
    s, vh = np.linalg.svd(m, full_matrices=False)[1:]
    smax = s[0] if len(s) else 1.0
    keep = int(np.sum(s > rtol * max(smax, 1.0)))
    return vh[keep:].conj().T


def _shift_index_map(n: int, L: int, k: int) -> np.ndarray:
    """Basis-state index map of the translation sending site j to j + k."""
    digits = np.indices((n,) * L).reshape(L, -1)
    weights = n ** (L - 1 - (np.arange(L) + k) % L)
    return weights @ digits


def _window_nullspaces_perm(g: Gate, alpha: int, direction: str, L: int,
                            phases: list[complex]) -> list[np.ndarray]:
    """Exact exchange-relation nullspaces for a generalized-permutation gate.

    A = S^{shift} V maps basis states to basis states, so O A = p A O reduces
    to orbit-following over pairs of states agreeing outside the window; a
    union-find with complex weights collects the surviving components."""
    from ._glider_kernels import pair_solve

    n = g.n
    w = 2 * alpha - 1
    x0 = _WINDOW_ANCHOR[direction]
    perm_v, theta = _floquet_permutation(g, L)
    smap = _shift_index_map(n, L, _WINDOW_SHIFT[direction])
    perm = smap[perm_v]
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    out = []
    for phase in phases:
        root, weight, zero = pair_solve(
            perm, theta.astype(np.complex128), inv,
            n, L, w, x0, complex(phase), 1e-8)
        dw2 = n ** (2 * w)
        alive = [r for r in np.unique(root) if not zero[r]]
        basis = np.zeros((dw2, len(alive)), dtype=complex)
        for j, r in enumerate(alive):
            members = root == r
            basis[members, j] = weight[members]
        basis /= np.maximum(np.linalg.norm(basis, axis=0, keepdims=True), 1e-300)
        out.append(basis)
    return out


def _cluster_unimodular(evs: np.ndarray, atol: float) -> list[tuple[complex, int]]:
    """Group unimodular eigenvalues into (representative, multiplicity)
    clusters, ordered by phase angle with +1 first."""
    uni = evs[np.abs(np.abs(evs) - 1.0) <= atol]
    clusters: list[list[complex]] = []
    for lam in sorted(uni, key=lambda z: (np.angle(z) % (2 * np.pi))):
        if clusters and abs(lam - clusters[-1][-1]) <= 1e-6:
            clusters[-1].append(lam)
        else:
            clusters.append([lam])
    # wrap-around: an angle-2pi cluster is the same as the angle-0 one
    if len(clusters) > 1 and abs(clusters[-1][-1] - clusters[0][0]) <= 1e-6:
        clusters[0].extend(clusters.pop())
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def extract_gliders(g: Gate, alpha: int, dim_cap: int = DEFAULT_DIM_CAP,
                    atol: float = ATOL_EIGVAL) -> list[GliderCandidate]:
    """Glider operators of range 2 alpha - 1 for both directions.

    For every unimodular eigenvalue lambda of t_alpha, the exchange relation
    with factor lambda^2 is solved for operators on a window of 2 alpha - 1
    sites of a ring with L = 2 alpha + 4 sites; each solution is re-verified
    on independent probe states.  The number of candidates per direction
    matches the number of unimodular eigenvalues of t_alpha, and the identity
    always appears among the eigenvalue-one candidates.
    """
    n = g.n
    w = 2 * alpha - 1
    dw = n ** w
    L = 2 * alpha + 4
    out: list[GliderCandidate] = []
    for direction in ("right", "left"):
        t = transfer_matrix(g, alpha, direction, dim_cap)
        clusters = _cluster_unimodular(np.linalg.eigvals(t.matrix), atol)
        phases = [lam ** 2 for lam, _ in clusters]
        if n ** L * dw * dw <= _DENSE_SOLVER_CAP:
            m1, m2 = _dense_window_terms(g, alpha, direction, L)
            spaces = [_nullspace(m1 - p * m2) for p in phases]
        else:
            try:
                spaces = _window_nullspaces_perm(g, alpha, direction, L, phases)
            except ValueError:
                raise ValueError(
                    f"glider extraction at alpha={alpha} needs a "
                    f"generalized-permutation gate for N={n}") from None
        for (lam, _), basis in zip(clusters, spaces):
            basis = _identity_first(basis, lam, dw)
            for j in range(basis.shape[1]):
                op = basis[:, j].reshape(dw, dw)
                op = op / np.linalg.norm(op)
                res = _exchange_residual(op, g, direction, lam ** 2, L)
                out.append(GliderCandidate(
                    direction=direction,
                    eigenvalue=lam,
                    phase=lam ** 2,
                    support_range=w,
                    operator=op,
                    residual=res,
                    verified=bool(res <= EXCHANGE_ATOL),
                ))
    return out


def _identity_first(basis: np.ndarray, lam: complex, dw: int) -> np.ndarray:
    """Rotate a nullspace basis so the window identity, when present in its
    span, comes out as the first vector."""
    if basis.shape[1] == 0 or abs(lam - 1.0) > 1e-6:
        return basis
    ident = np.eye(dw, dtype=complex).reshape(-1) / np.sqrt(dw)
    coeff = basis.conj().T @ ident
    if np.linalg.norm(coeff) < 1.0 - 1e-6:
        return basis
    q = np.linalg.qr(np.column_stack([coeff, np.eye(len(coeff), len(coeff) - 1)]))[0]
    return basis @ q


# ---------------------------------------------------------------------------
# exact finite-volume correlators


def on_light_cone(x: int, y: int, t: int, L: int) -> bool:
    """Whether sites x and y (1-based) are connected by a light ray after t
    time steps on a ring of L sites."""
    return (x - y) % L in ((t % L), (-t) % L)


def _floquet_permutation(g: Gate, L: int):
    """Trajectory tables of one Floquet step for a generalized-permutation
    gate: image state index and accumulated phase for every basis state."""
    n = g.n
    cols = np.argmax(np.abs(g.matrix), axis=0)
    phases = g.matrix[cols, np.arange(n * n)]
    resid = np.abs(g.matrix).copy()
    resid[cols, np.arange(n * n)] -= 1.0
    if np.max(np.abs(resid)) > ATOL_UNITARY:
        raise ValueError("gate is not a generalized permutation")

    states = np.indices((n,) * L).reshape(L, -1).T.copy()  # row-major digits
    phase = np.ones(len(states), dtype=complex)

    def pair_update(i, j):
        nonlocal phase
        code = states[:, i] * n + states[:, j]
        phase = phase * phases[code]
        out = cols[code]
        states[:, i], states[:, j] = out // n, out % n

    for i in range(0, L, 2):
        pair_update(i, i + 1)
    for i in range(1, L - 1, 2):
        pair_update(i, i + 1)
    pair_update(L - 1, 0)
    weights = n ** np.arange(L - 1, -1, -1)
    return states @ weights, phase


def _correlator_permutation(g: Gate, L: int, t: int, o1, o2, x: int, y: int) -> complex:
    """Basis-state counting: cost N^L x N per evaluation, no dense Floquet."""
    n = g.n
    perm, phase = _floquet_permutation(g, L)
    pi = np.arange(n ** L)
    ph = np.ones(n ** L, dtype=complex)
    for _ in range(t // 2):
        ph = ph * phase[pi]
        pi = perm[pi]

    digits = np.indices((n,) * L).reshape(L, -1).T
    wx = n ** (L - x)  # weight of site x in the packed index
    wy = n ** (L - y)
    sy = digits[:, y - 1]
    px_digit = (pi // wx) % n
    total = 0.0 + 0.0j
    for b in range(n):
        s2 = np.arange(n ** L) + (b - sy) * wy  # state with site y set to b
        pi2, ph2 = pi[s2], ph[s2]
        px2_digit = (pi2 // wx) % n
        match = (pi2 - (px2_digit - px_digit) * wx) == pi
        total += np.sum(
            np.where(match, o2[b, sy] * np.conj(ph) * ph2 * o1[px_digit, px2_digit], 0.0)
        )
    return complex(total / n ** L)


def correlator(g: Gate, L: int, t: int, o1: np.ndarray, o2: np.ndarray,
               x: int, y: int, state_cap: int = DEFAULT_DIM_CAP) -> complex:
    """Tr(o1(x, t) o2(y, 0)) / N^L on a ring of L sites, t even.

    Heisenberg evolution over t/2 Floquet steps of V = V2 V1; o1 and o2 are
    one-site operators, x and y 1-based site labels.
    """
    n = g.n
    if L % 2:
        raise ValueError("L must be even")
    if t % 2 or t < 0:
        raise ValueError("t must be a nonnegative even integer")
    if n ** L > state_cap:
        raise ValueError(f"state space {n}^{L} exceeds the cap {state_cap}")
    o1 = np.asarray(o1, dtype=complex)
    o2 = np.asarray(o2, dtype=complex)
    if o1.shape != (n, n) or o2.shape != (n, n):
        raise ValueError("o1 and o2 must be one-site operators")
    if not (1 <= x <= L and 1 <= y <= L):
        raise ValueError("x and y must be sites in 1..L")

    try:
        return _correlator_permutation(g, L, t, o1, o2, x, y)
    except ValueError:
        pass

    dim = n ** L
    psi = np.eye(dim, dtype=complex).reshape((n,) * L + (dim,))
    for _ in range(t // 2):
        # evolve all basis columns at once: the state tensor carries an
        # extra axis, untouched by the L site axes
        for i in range(0, L, 2):
            psi = _apply_two_site(psi, g.matrix, i, i + 1, n, L + 1)
        for i in range(1, L - 1, 2):
            psi = _apply_two_site(psi, g.matrix, i, i + 1, n, L + 1)
        psi = _apply_two_site(psi, g.matrix, L - 1, 0, n, L + 1)
    b = psi.reshape(dim, dim)  # b[:, s] = V^{t/2} |s>

    # Tr(B^dag o1_x B o2_y) via the four-leg reduction at sites x and y
    bt = np.moveaxis(b.reshape((n,) * L + (dim,)), x - 1, 0).reshape(n, dim // n, dim)
    bt = np.moveaxis(bt.reshape(n, dim // n, *((n,) * L)), 2 + y - 1, 2)
    bt = bt.reshape(n, dim // n, n, dim // n)
    q = np.einsum("aubv,AuBv->aAbB", bt.conj(), bt, optimize=True)
    return complex(np.einsum("aAbB,aA,Bb->", q, o1, o2, optimize=True) / dim)
