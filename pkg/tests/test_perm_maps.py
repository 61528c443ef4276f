import numpy as np
import pytest

from duc.builtins import get_builtin
from duc.perm_maps import (
    MapFlags,
    PermMap,
    canonical_form,
    check_flags,
    diag_similarity,
    enumerate_du,
    from_gate,
    is_noninteracting,
    parse,
    render,
    reshuffle,
    space_reflect,
    time_reflect,
    to_gate,
    yang_baxter_holds,
)


def swap_map(n):
    a = np.arange(1, n + 1)
    return PermMap(np.tile(a, (n, 1)), np.repeat(a, n).reshape(n, n))


def test_call_uses_one_based_tables():
    m = get_builtin("E2")
    assert render(m) == "11 32 21 / 33 13 23 / 12 31 22"
    assert m(1, 1) == (1, 1)
    assert m(3, 2) == (3, 1)


def test_render_parse_round_trip():
    for name in ("I1", "E2", "MOLS7", "table1"):
        m = get_builtin(name)
        again = parse(render(m))
        assert np.array_equal(again.codes(), m.codes())


def test_parse_rejects_ragged_rows():
    with pytest.raises(ValueError):
        parse("11 22 / 12")


def test_codes_round_trip():
    m = get_builtin("E1")
    assert np.array_equal(PermMap.from_codes(m.codes(), m.n).codes(), m.codes())


def test_swap_flags():
    flags = check_flags(swap_map(3))
    assert flags == MapFlags(True, True, False, True)
    assert is_noninteracting(swap_map(3))


def test_nonbijective_map_flags():
    n = 3
    cc = np.ones((n, n), dtype=np.int64)
    dd = np.ones((n, n), dtype=np.int64)
    flags = check_flags(PermMap(cc, dd))
    assert not flags.bijective
    assert not flags.dual_unitary


@pytest.mark.parametrize(
    "name,perfect,self_orth",
    [
        ("I1", False, False),
        ("Z4", False, True),
        ("MOLS7", True, False),
        ("V1", True, False),
        ("V2", True, False),
        ("C1", False, False),
    ],
)
def test_builtin_flags(name, perfect, self_orth):
    flags = check_flags(get_builtin(name))
    assert flags.bijective and flags.dual_unitary
    assert flags.perfect is perfect
    assert flags.self_orthogonal is self_orth


@pytest.mark.parametrize("name,holds", [("I1", True), ("Z4", True), ("C1", False)])
def test_yang_baxter(name, holds):
    assert yang_baxter_holds(get_builtin(name)) is holds


def test_reflections_are_involutions_reshuffle_order_four():
    m = get_builtin("E2")
    for op in (space_reflect, time_reflect):
        assert np.array_equal(op(op(m)).codes(), m.codes())
    cur = m
    for _ in range(4):
        cur = reshuffle(cur)
        assert check_flags(cur).dual_unitary
    assert np.array_equal(cur.codes(), m.codes())
    assert not np.array_equal(reshuffle(reshuffle(m)).codes(), m.codes())


def test_reflections_preserve_flags():
    m = get_builtin("E1")
    base = check_flags(m)
    for op in (space_reflect, time_reflect):
        assert check_flags(op(m)) == base


def test_diag_similarity_preserves_flags():
    m = get_builtin("I2")
    g = diag_similarity(m, (2, 3, 1), (3, 1, 2))
    assert check_flags(g) == check_flags(m)
    # identity permutations act trivially
    assert np.array_equal(diag_similarity(m, (1, 2, 3), (1, 2, 3)).codes(), m.codes())


def test_gate_round_trip():
    for name in ("I1", "C2", "MOLS7"):
        m = get_builtin(name)
        assert np.array_equal(from_gate(to_gate(m)).codes(), m.codes())


def test_from_gate_rejects_dense_input():
    from duc.gates import Gate, random_unitary

    g = Gate(random_unitary(9, np.random.default_rng(7)), 3, 3)
    with pytest.raises(ValueError):
        from_gate(g)


def test_canonical_form_is_class_invariant():
    rng = np.random.default_rng(5)
    for name in ("I1", "E1", "Z4"):
        m = get_builtin(name)
        ref = canonical_form(m).codes()
        sa = rng.permutation(m.n) + 1
        sb = rng.permutation(m.n) + 1
        for moved in (
            space_reflect(m),
            time_reflect(m),
            diag_similarity(m, sa, sb),
            time_reflect(diag_similarity(space_reflect(m), sb, sa)),
        ):
            assert np.array_equal(canonical_form(moved).codes(), ref)


def test_canonical_form_needs_bijective_map():
    n = 2
    cc = np.ones((n, n), dtype=np.int64)
    with pytest.raises(ValueError):
        canonical_form(PermMap(cc, cc))


def test_enumerate_n2():
    rep = enumerate_du(2, with_reshuffle_diagnostic=True)
    assert rep.map_count == 12
    assert rep.class_count == 5
    assert sum(rep.non_interacting) == 3
    assert sum(rep.perfect) == 0
    assert rep.reshuffle_class_count == 5
    assert len(rep.representatives) == 5
    assert sum(rep.class_sizes) == 12


def test_enumerate_refuses_large_n():
    with pytest.raises(ValueError):
        enumerate_du(5)
