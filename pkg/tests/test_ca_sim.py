import math

import numpy as np
import pytest

from duc import ca_sim as ca
from duc.builtins import get_builtin
from duc.constructions import ring_linear
from duc.perm_maps import PermMap

Z3 = ring_linear(3, (1, 1, 1, 2))


def swap_map(n):
    a = np.arange(1, n + 1)
    return PermMap(np.tile(a, (n, 1)), np.repeat(a, n).reshape(n, n))


def test_step_applies_map_on_chosen_pairs():
    m = get_builtin("I1")
    s = np.array([1, 2, 3, 1], dtype=np.uint8)
    odd = ca.step(s.copy(), m, "odd")
    c, d = m(1, 2)
    e, f = m(3, 1)
    assert odd.tolist() == [c, d, e, f]
    even = ca.step(s.copy(), m, "even")
    c, d = m(2, 3)
    e, f = m(1, 1)
    assert even.tolist() == [f, c, d, e]


def test_step_rejects_bad_parity_and_odd_length():
    m = get_builtin("I1")
    with pytest.raises(ValueError):
        ca.step(np.array([1, 2, 3], dtype=np.uint8), m, "odd")
    with pytest.raises(ValueError):
        ca.step(np.array([1, 2, 3, 1], dtype=np.uint8), m, "sideways")


def test_floquet_is_odd_then_even():
    m = get_builtin("E2")
    s = np.array([3, 1, 2, 2, 1, 3], dtype=np.uint8)
    assert np.array_equal(ca.floquet(s.copy(), m), ca.step(ca.step(s.copy(), m, "odd"), m, "even"))


def test_floquet_matches_gate_action_on_basis_state():
    """The CA step must agree with the quantum circuit on product states."""
    from duc.ergodicity import apply_floquet
    from duc.perm_maps import to_gate

    m = get_builtin("I2")
    g = to_gate(m)
    L, n = 6, 3
    digits = np.array([1, 3, 2, 2, 1, 3], dtype=np.uint8)
    psi = np.zeros((n,) * L)
    psi[tuple(digits - 1)] = 1.0
    evolved = apply_floquet(psi, g, L)
    moved = ca.floquet(digits.copy(), m)
    where = np.argwhere(evolved)[0]
    assert np.array_equal(where + 1, moved)


def test_swap_moves_sublattices():
    sw = swap_map(3)
    s = np.array([1, 2, 3, 1, 2, 3], dtype=np.uint8)
    out = ca.floquet(s.copy(), sw)
    expected = np.empty_like(s)
    for site in range(1, 7):
        dest = (site - 1 + 2) % 6 + 1 if site % 2 else (site - 1 - 2) % 6 + 1
        expected[dest - 1] = s[site - 1]
    assert np.array_equal(out, expected)


def test_vacuum_is_fixed_for_ring_linear():
    # residue r is stored as digit r + 1, so the zero state is all ones
    s = np.full(8, 1, dtype=np.uint8)
    assert np.array_equal(ca.floquet(s.copy(), Z3), s)
    assert ca.orbit_length(s, Z3) == 1
    # with zero_as_n the vacuum sits at digit n instead
    mz = ring_linear(3, (1, 1, 1, 2), zero_as_n=True)
    s = np.full(8, 3, dtype=np.uint8)
    assert np.array_equal(ca.floquet(s.copy(), mz), s)


def test_orbit_length_counts_full_cycles():
    s = np.array([1, 2, 3, 1, 2, 3], dtype=np.uint8)
    T = ca.orbit_length(s, Z3)
    cur = s.copy()
    for _ in range(T):
        cur = ca.floquet(cur, Z3)
    assert np.array_equal(cur, s)


def test_orbit_budget_exception():
    s = ca.sample_state(get_builtin("C1"), 20, seed=1, sample_index=0)
    with pytest.raises(ca.OrbitBudgetExceeded, match="n_max=10"):
        ca.orbit_length(s, get_builtin("C1"), budget=10)


def test_sample_state_is_counter_based():
    m = get_builtin("C1")
    a = ca.sample_state(m, 12, seed=7, sample_index=3)
    b = ca.sample_state(m, 12, seed=7, sample_index=3)
    assert np.array_equal(a, b)
    c = ca.sample_state(m, 12, seed=7, sample_index=4)
    assert not np.array_equal(a, c)
    assert a.dtype == np.uint8 and a.min() >= 1 and a.max() <= 3


def test_average_orbit_length_reproducible():
    m = get_builtin("C1")
    a = ca.average_orbit_length(m, 8, samples=20, repetitions=3, seed=5)
    b = ca.average_orbit_length(m, 8, samples=20, repetitions=3, seed=5)
    assert a == b
    assert a.volume == 8
    assert a.samples == 20 and a.repetitions == 3
    assert len(a.orbit_lengths) == 60
    assert a.mean == pytest.approx(np.mean(a.orbit_lengths))
    assert a.budget_exhausted == 0
    assert a.rel_variance_log >= 0.0


def test_average_orbit_length_to_dict_drops_raw_lengths():
    stats = ca.average_orbit_length(get_builtin("I1"), 6, samples=5, repetitions=2, seed=0)
    d = stats.to_dict()
    assert "orbit_lengths" not in d
    assert d["mean"] == stats.mean


def test_budget_exhausted_samples_are_excluded():
    m = get_builtin("C1")
    stats = ca.average_orbit_length(m, 12, samples=10, repetitions=2, seed=3, budget=50)
    assert stats.budget_exhausted > 0
    assert len(stats.orbit_lengths) + stats.budget_exhausted == 20


def test_exhaustive_recurrence_additive_golden():
    got = [ca.recurrence_time(Z3, L).T for L in range(2, 14, 2)]
    assert got == [4, 4, 12, 12, 20, 12]


def test_exhaustive_recurrence_i1_is_half_period():
    for L in (4, 6, 8, 10):
        assert ca.recurrence_time(get_builtin("I1"), L).T == L // 2


def test_recurrence_is_lcm_of_orbit_lengths():
    m = get_builtin("E1")
    res = ca.recurrence_time(m, 6)
    assert res.method == "exhaustive_lcm"
    lengths = {ca.orbit_length(ca.sample_state(m, 6, 0, j), m) for j in range(50)}
    assert all(res.T % T == 0 for T in lengths)


def test_matrix_order_delegation_matches_exhaustive():
    for L in (4, 6, 8, 10, 12):
        direct = ca.recurrence_time(Z3, L, method="exhaustive_lcm").T
        linear = ca.recurrence_time(Z3, L, method="matrix_order").T
        assert direct == linear


def test_matrix_order_refuses_nonadditive_maps():
    with pytest.raises(ValueError):
        ca.recurrence_time(get_builtin("I1"), 8, method="matrix_order")


def test_sampled_lower_bound_divides_exhaustive():
    res = ca.recurrence_time(Z3, 10, method="sampled_lower_bound", samples=40, seed=2)
    full = ca.recurrence_time(Z3, 10, method="exhaustive_lcm").T
    assert full % res.T == 0
    assert any("lower bound" in c for c in res.caveats)


def test_exhaustive_cap():
    with pytest.raises(ValueError):
        ca.recurrence_time(Z3, 40, method="exhaustive_lcm")


def test_state_permutation_is_bijective():
    perm = ca._state_permutation(Z3, 6)
    assert len(np.unique(perm)) == 3**6


def test_castate_wrapper():
    s = ca.CAState(np.array([1, 2, 2, 1], dtype=np.uint8))
    assert s.L == 4
    with pytest.raises(ValueError):
        ca.CAState(np.array([1, 2, 3], dtype=np.uint8))
