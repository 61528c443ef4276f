"""Classical simulation of permutation brickwork circuits.

States are digit arrays with one byte per site, values in 1..N.  A Floquet
step applies the map on pairs (1,2), (3,4), ... and then on (2,3), ...,
(L,1).  The map acts through precomputed N^2 -> N^2 lookup tables inside
numba kernels, so orbits of 10^8 steps are affordable.  Initial states are
drawn from counter-based Philox streams keyed by (seed, sample index):
parallel and serial runs produce identical samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .perm_maps import PermMap

DEFAULT_BUDGET = 10 ** 8
EXHAUSTIVE_CAP = 2 ** 24


class OrbitBudgetExceeded(RuntimeError):
    """An orbit did not close within the step budget."""

    def __init__(self, budget: int):
        super().__init__(f"budget exceeded at n_max={budget}")
        self.budget = budget


@dataclass
class CAState:
    digits: np.ndarray

    def __post_init__(self):
        self.digits = np.asarray(self.digits, dtype=np.uint8)
        if self.digits.ndim != 1 or len(self.digits) % 2:
            raise ValueError("state must be a flat array over an even number of sites")

    @property
    def L(self) -> int:
        return len(self.digits)


@dataclass
class OrbitStats:
    volume: int
    samples: int
    orbit_lengths: list[int]
    mean: float
    log_mean: float
    repetitions: int
    rel_variance_log: float
    seed: int
    budget_exhausted: int = 0

    def to_dict(self) -> dict:
        return {
            "volume": self.volume,
            "samples": self.samples,
            "mean": self.mean,
            "log_mean": self.log_mean,
            "repetitions": self.repetitions,
            "rel_variance_log": self.rel_variance_log,
            "seed": self.seed,
            "budget_exhausted": self.budget_exhausted,
        }


@dataclass
class RecurrenceResult:
    volume: int
    T: int
    method: str
    caveats: list[str] = field(default_factory=list)


def _tables(m: PermMap) -> tuple[np.ndarray, np.ndarray]:
    """Zero-based output lookup tables out1[code], out2[code] with
    code = a*N + b for input digits (a+1, b+1)."""
    n = m.n
    out1 = np.empty(n * n, dtype=np.uint8)
    out2 = np.empty(n * n, dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            out1[a * n + b] = m.cc[a, b] - 1
            out2[a * n + b] = m.dd[a, b] - 1
    return out1, out2


@numba.njit(cache=True)
def _half_step(s, out1, out2, n, start):
    L = s.shape[0]
    for i in range(start, L - 1, 2):
        code = s[i] * n + s[i + 1]
        s[i] = out1[code]
        s[i + 1] = out2[code]
    if start == 1:
        code = s[L - 1] * n + s[0]
        s[L - 1] = out1[code]
        s[0] = out2[code]


@numba.njit(cache=True)
def _orbit_length(s0, out1, out2, n, budget):
    L = s0.shape[0]
    s = s0.copy()
    for step in range(1, budget + 1):
        _half_step(s, out1, out2, n, 0)
        _half_step(s, out1, out2, n, 1)
        same = True
        for i in range(L):
            if s[i] != s0[i]:
                same = False
                break
        if same:
            return step
    return -1


@numba.njit(cache=True)
def _cycle_lengths(perm):
    visited = np.zeros(perm.shape[0], dtype=np.uint8)
    out = np.empty(perm.shape[0], dtype=np.int64)
    k = 0
    for i in range(perm.shape[0]):
        if visited[i]:
            continue
        length = 0
        j = i
        while not visited[j]:
            visited[j] = 1
            j = perm[j]
            length += 1
        out[k] = length
        k += 1
    return out[:k]


def step(state: np.ndarray, m: PermMap, parity: str) -> np.ndarray:
    """One sublattice layer, in place: parity "odd" updates pairs
    (1,2), (3,4), ...; "even" updates (2,3), ..., (L,1).  A full Floquet
    step is the odd layer followed by the even one."""
    digits = state.digits if isinstance(state, CAState) else state
    L = len(digits)
    if L % 2:
        raise ValueError("L must be even")
    if parity not in ("odd", "even"):
        raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")
    out1, out2 = _tables(m)
    s = np.asarray(digits, dtype=np.uint8) - 1
    _half_step(s, out1, out2, m.n, 0 if parity == "odd" else 1)
    digits[:] = s + 1
    return state


def floquet(state: np.ndarray, m: PermMap) -> np.ndarray:
    """One full period: odd layer then even layer, in place."""
    step(state, m, "odd")
    return step(state, m, "even")


def orbit_length(state: np.ndarray, m: PermMap,
                 budget: int = DEFAULT_BUDGET) -> int:
    """Smallest n >= 1 with Floquet^n(state) = state.

    Each Floquet application covers two time steps of the circuit.  Raises
    OrbitBudgetExceeded when the orbit does not close within the budget."""
    digits = state.digits if isinstance(state, CAState) else np.asarray(state)
    out1, out2 = _tables(m)
    res = _orbit_length(digits.astype(np.uint8) - 1, out1, out2, m.n, budget)
    if res < 0:
        raise OrbitBudgetExceeded(budget)
    return int(res)


def sample_state(m: PermMap, L: int, seed: int, sample_index: int) -> np.ndarray:
    """Uniform initial state from the Philox stream keyed (seed, index)."""
    rng = np.random.Generator(np.random.Philox(key=[seed, sample_index]))
    return rng.integers(1, m.n + 1, size=L, dtype=np.uint8)


def average_orbit_length(m: PermMap, L: int, samples: int = 200,
                         repetitions: int = 10, seed: int = 0,
                         budget: int = DEFAULT_BUDGET) -> OrbitStats:
    """Mean orbit length over i.i.d. uniform initial states.

    Initial states are sampled with replacement; the relative variance of
    log_N(mean) across repetitions gauges the sampling error.  Samples whose
    orbit exceeds the budget are counted in budget_exhausted and excluded
    from the averages."""
    out1, out2 = _tables(m)
    lengths: list[int] = []
    rep_means = []
    exhausted = 0
    for rep in range(repetitions):
        rep_lengths = []
        for j in range(samples):
            s0 = sample_state(m, L, seed, rep * samples + j) - 1
            res = _orbit_length(s0, out1, out2, m.n, budget)
            if res < 0:
                exhausted += 1
                continue
            rep_lengths.append(int(res))
        lengths.extend(rep_lengths)
        if rep_lengths:
            rep_means.append(float(np.mean(rep_lengths)))
    mean = float(np.mean(lengths)) if lengths else float("nan")
    logs = np.log(rep_means) / np.log(m.n) if rep_means else np.array([np.nan])
    rel_var = float(np.std(logs) / np.abs(np.mean(logs))) if len(logs) else float("nan")
    return OrbitStats(
        volume=L,
        samples=samples,
        orbit_lengths=lengths,
        mean=mean,
        log_mean=float(np.log(mean) / np.log(m.n)) if lengths else float("nan"),
        repetitions=repetitions,
        rel_variance_log=rel_var,
        seed=seed,
        budget_exhausted=exhausted,
    )


def _state_permutation(m: PermMap, L: int) -> np.ndarray:
    """Floquet step as a permutation of all N^L packed states.

    Memory is about (L + 8) * N^L bytes; callers enforce the cap."""
    n = m.n
    size = n ** L
    out1, out2 = _tables(m)
    digits = np.empty((L, size), dtype=np.uint8)
    idx = np.arange(size, dtype=np.int64)
    for i in range(L):
        digits[i] = (idx // n ** (L - 1 - i)) % n

    def pairs(i, j):
        code = digits[i].astype(np.int32) * n + digits[j]
        digits[i] = out1[code]
        digits[j] = out2[code]

    for i in range(0, L, 2):
        pairs(i, i + 1)
    for i in range(1, L - 1, 2):
        pairs(i, i + 1)
    pairs(L - 1, 0)

    perm = np.zeros(size, dtype=np.int64)
    for i in range(L):
        perm += digits[i].astype(np.int64) * n ** (L - 1 - i)
    return perm


def _is_additive_brickwork(m: PermMap) -> bool:
    """Whether m is the addition/subtraction pair map (a,b) -> (a+b, a-b)
    over Z_N in the vacuum-shifted digit convention."""
    from .constructions import ring_linear

    try:
        ref = ring_linear(m.n, (1, 1, 1, m.n - 1))
    except ValueError:
        return False
    return np.array_equal(m.cc, ref.cc) and np.array_equal(m.dd, ref.dd)


def recurrence_time(m: PermMap, L: int, method: str = "exhaustive_lcm",
                    samples: int = 64, seed: int = 0,
                    budget: int = DEFAULT_BUDGET) -> RecurrenceResult:
    """Least common multiple of all orbit lengths at volume L.

    exhaustive_lcm enumerates every state (N^L capped at 2^24);
    matrix_order delegates to the exact finite-field order when the map is
    the additive pair map over Z_p; sampled_lower_bound reports the lcm over
    sampled orbits only, flagged as a lower bound."""
    if L % 2:
        raise ValueError("L must be even")
    if method == "exhaustive_lcm":
        if m.n ** L > EXHAUSTIVE_CAP:
            raise ValueError(
                f"state space {m.n}^{L} exceeds the exhaustive cap {EXHAUSTIVE_CAP}")
        lengths = _cycle_lengths(_state_permutation(m, L))
        t = 1
        for v in np.unique(lengths):
            t = math.lcm(t, int(v))
        return RecurrenceResult(volume=L, T=t, method=method)
    if method == "matrix_order":
        if not _is_additive_brickwork(m):
            raise ValueError("matrix_order needs the additive pair map over Z_p")
        from .linear_ca import build_v, matrix_order

        rep = matrix_order(build_v(L, m.n))
        return RecurrenceResult(volume=L, T=rep.T, method=method)
    if method == "sampled_lower_bound":
        t = 1
        exhausted = 0
        out1, out2 = _tables(m)
        for j in range(samples):
            s0 = sample_state(m, L, seed, j) - 1
            res = _orbit_length(s0, out1, out2, m.n, budget)
            if res < 0:
                exhausted += 1
                continue
            t = math.lcm(t, int(res))
        caveats = ["lower bound from sampled orbits"]
        if exhausted:
            caveats.append(f"{exhausted} samples exceeded the budget {budget}")
        return RecurrenceResult(volume=L, T=t, method=method, caveats=caveats)
    raise ValueError(f"unknown method {method!r}")
