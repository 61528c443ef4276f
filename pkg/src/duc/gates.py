"""Two-site gates and their leg-permutation algebra.

A gate maps C^n (x) C^m to C^m (x) C^n.  Matrix element U^{cd}_{ab} sits at
row (c-1)*n + d, column (a-1)*m + b (indices 1-based, packed row-major), so
that a is the first incoming leg, b the second, c the first outgoing leg and
d the second.  The reshuffled gate U^R and the partly transposed gate U^D are
obtained by regrouping the four legs; a gate is dual unitary when U^R is
unitary on top of U itself, and perfect when U^D is unitary as well.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

#: tolerance for algebraic identities on gate matrices (unitarity, equality)
ATOL_UNITARY = 1e-10

#: tolerance for eigenvalue moduli in spectral counts
ATOL_EIGVAL = 1e-9


@dataclass(frozen=True)
class Gate:
    """A two-site gate, stored as its (n*m, n*m) complex matrix."""

    matrix: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.n * self.m, self.n * self.m):
            raise ValueError(
                f"matrix shape {mat.shape} does not match type ({self.n},{self.m})"
            )
        object.__setattr__(self, "matrix", mat)

    @property
    def homogeneous(self) -> bool:
        return self.n == self.m

    def tensor(self) -> np.ndarray:
        """Four-leg view T[a,b,c,d] = U^{cd}_{ab}, shape (n, m, m, n)."""
        m4 = self.matrix.reshape(self.m, self.n, self.n, self.m)
        return np.einsum("cdab->abcd", m4)

    @staticmethod
    def from_tensor(t: np.ndarray) -> "Gate":
        """Inverse of :meth:`tensor`."""
        n, m = t.shape[0], t.shape[1]
        if t.shape != (n, m, m, n):
            raise ValueError(f"tensor shape {t.shape} is not of the form (n,m,m,n)")
        mat = np.einsum("abcd->cdab", t).reshape(n * m, n * m)
        return Gate(mat, n, m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.matrix, other.matrix)
        )


def gate_from_matrix(mat: np.ndarray, n: int | None = None, m: int | None = None) -> Gate:
    """Wrap a square matrix; defaults to the homogeneous type (n, n)."""
    mat = np.asarray(mat, dtype=complex)
    if n is None and m is None:
        n = m = math.isqrt(mat.shape[0])
    elif m is None:
        m = mat.shape[0] // n
    elif n is None:
        n = mat.shape[0] // m
    return Gate(mat, n, m)


def identity_gate(n: int, m: int = 0) -> Gate:
    m = m or n
    return Gate(np.eye(n * m, dtype=complex), n, m)


def swap_gate(n: int, m: int = 0) -> Gate:
    """P(|a> (x) |b>) = |b> (x) |a>, i.e. P^{cd}_{ab} = delta_ad delta_bc."""
    m = m or n
    t = np.zeros((n, m, m, n), dtype=complex)
    for a in range(n):
        for b in range(m):
            t[a, b, b, a] = 1.0
    return Gate.from_tensor(t)


def is_unitary(g: Gate, atol: float = ATOL_UNITARY) -> bool:
    u = g.matrix
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol)


def reshuffle_r(g: Gate) -> Gate:
    """(U^R)^{db}_{ca} = U^{cd}_{ab}; the result is of type (m, n)."""
    return Gate.from_tensor(np.einsum("abcd->cadb", g.tensor()))


def reshuffle_d(g: Gate) -> Gate:
    """(U^D)^{bc}_{ad} = U^{cd}_{ab}; requires a homogeneous gate."""
    if not g.homogeneous:
        raise ValueError("reshuffle_d needs a homogeneous gate")
    return Gate.from_tensor(np.einsum("abcd->adbc", g.tensor()))


def is_dual_unitary(g: Gate, atol: float = ATOL_UNITARY) -> bool:
    return is_unitary(g, atol) and is_unitary(reshuffle_r(g), atol)


def is_perfect(g: Gate, atol: float = ATOL_UNITARY) -> bool:
    if not g.homogeneous:
        raise ValueError("perfectness is defined for homogeneous gates")
    return is_dual_unitary(g, atol) and is_unitary(reshuffle_d(g), atol)


def dress(g: Gate, a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> Gate:
    """(A (x) B) U (C (x) D) with A: m x m, B: n x n, C: n x n, D: m x m."""
    a, b, c, d = (np.asarray(x, dtype=complex) for x in (a, b, c, d))
    if a.shape != (g.m, g.m) or b.shape != (g.n, g.n):
        raise ValueError("output dressing must act on C^m (x) C^n")
    if c.shape != (g.n, g.n) or d.shape != (g.m, g.m):
        raise ValueError("input dressing must act on C^n (x) C^m")
    return Gate(np.kron(a, b) @ g.matrix @ np.kron(c, d), g.n, g.m)


# The three generators act on the leg tuple (a, b, c, d); every word over
# them lands in the dihedral group of the square whose diagonals are the
# pairs (a, d) and (b, c).
_D4_GENERATORS = {
    "r": "abcd->cadb",  # reshuffle_r
    "s": "abcd->badc",  # space reflection P U P
    "t": "abcd->cdab",  # time reflection U^t
}

#: canonical words for the eight elements of the leg group
D4_ELEMENTS = ("e", "r", "rr", "rrr", "s", "t", "rs", "rt")


def d4_transform(g: Gate, word: str) -> Gate:
    """Apply a word over the generators r, s, t (left factor acts last).

    "e" (or "") is the identity.  The words in :data:`D4_ELEMENTS` list each
    element of the group once.
    """
    if not g.homogeneous:
        raise ValueError("leg transformations need a homogeneous gate")
    t = g.tensor()
    if word == "e":
        word = ""
    for gen in reversed(word):
        try:
            t = np.einsum(_D4_GENERATORS[gen], t)
        except KeyError:
            raise ValueError(f"unknown generator {gen!r} in word {word!r}") from None
    return Gate.from_tensor(t)


def four_leg_state(g: Gate) -> np.ndarray:
    """State tensor u_{abcd} = U^{cd}_{ab} / n for a homogeneous gate."""
    if not g.homogeneous:
        raise ValueError("the four-leg state needs a homogeneous gate")
    return g.tensor() / g.n


def reduced_density(g: Gate, parties: tuple[int, int]) -> np.ndarray:
    """Two-party reduced density matrix of the four-leg state.

    Parties are numbered 1..4 for the legs (a, b, c, d).  The result is an
    n^2 x n^2 Hermitian matrix with unit trace.
    """
    p, q = sorted(parties)
    if not (1 <= p < q <= 4):
        raise ValueError(f"parties must be two distinct legs in 1..4, got {parties}")
    u = four_leg_state(g)
    keep = "abcd"[p - 1] + "abcd"[q - 1]
    # e.g. parties (1,4) contract over b, c: 'abcd,AbcD->adAD'
    spec = f"abcd,{''.join(x.upper() if x in keep else x for x in 'abcd')}->" + keep + keep.upper()
    rho = np.einsum(spec, u, u.conj())
    n2 = g.n * g.n
    return rho.reshape(n2, n2)


class EntanglementReport(NamedTuple):
    entropy: float
    max_entropy: float


def diagonal_entanglement(g: Gate) -> EntanglementReport:
    """Von Neumann entropy (natural log) of rho_14, with its maximum 2 ln n.

    Zero iff the gate is non-interacting, i.e. of the form (A (x) B) P; the
    maximum is attained exactly by perfect gates.
    """
    rho = reduced_density(g, (1, 4))
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-14]
    entropy = float(-np.sum(evals * np.log(evals)))
    return EntanglementReport(entropy, 2.0 * math.log(g.n))


def is_noninteracting(g: Gate, atol: float = ATOL_UNITARY) -> bool:
    """True when the gate factors as (A (x) B) P (zero diagonal entanglement)."""
    return diagonal_entanglement(g).entropy <= math.sqrt(atol)


def to_json(g: Gate) -> str:
    """Serialize; floats survive the round trip bit-exactly."""
    return json.dumps(
        {
            "n": g.n,
            "m": g.m,
            "re": g.matrix.real.tolist(),
            "im": g.matrix.imag.tolist(),
        }
    )


def from_json(text: str) -> Gate:
    data = json.loads(text)
    mat = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return Gate(mat, int(data["n"]), int(data["m"]))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via the QR decomposition."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_diagonal_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    phases = rng.uniform(0.0, 2.0 * math.pi, size=dim)
    return np.diag(np.exp(1j * phases))
