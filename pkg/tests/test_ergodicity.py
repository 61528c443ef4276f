import numpy as np
import pytest

from duc import ergodicity as erg
from duc.builtins import get_builtin
from duc.constructions import dressed_swap, ring_linear
from duc.gates import Gate, random_unitary, swap_gate
from duc.perm_maps import check_flags, to_gate

RNG = np.random.default_rng(23)


def builtin_gate(name):
    return to_gate(get_builtin(name))


# ---------------------------------------------------------------------------
# channels and transfer matrices


def test_channels_are_unital_and_trace_preserving():
    g = builtin_gate("E1")
    n = g.n
    eye = np.eye(n).reshape(n * n)
    for sign in "+-":
        k = erg.channel_m(g, sign)
        assert np.allclose(k @ eye, eye)
        op = RNG.random((n, n)) + 1j * RNG.random((n, n))
        out = (k @ op.reshape(n * n)).reshape(n, n)
        assert np.isclose(np.trace(out), np.trace(op))


def test_channel_rejects_bad_sign():
    with pytest.raises(ValueError):
        erg.channel_m(builtin_gate("E1"), "x")


def test_t1_equals_plus_channel():
    for name in ("I1", "E2", "C1"):
        g = builtin_gate(name)
        t = erg.transfer_matrix(g, 1)
        assert np.allclose(t.matrix, erg.channel_m(g, "+"))


def test_left_t1_spectrum_matches_minus_channel():
    g = builtin_gate("E1")
    t = erg.transfer_matrix(g, 1, direction="left")
    ev_left = np.sort_complex(np.linalg.eigvals(t.matrix))
    ev_minus = np.sort_complex(np.linalg.eigvals(erg.channel_m(g, "-")))
    assert np.allclose(ev_left, ev_minus, atol=1e-9)


def test_transfer_matrix_of_perm_gate_is_integer_scaled():
    g = builtin_gate("I1")
    t = erg.transfer_matrix(g, 2)
    scaled = t.matrix * g.n
    assert np.allclose(scaled, np.round(scaled.real))


def test_transfer_matrix_respects_dim_cap():
    g = builtin_gate("I1")
    with pytest.raises(ValueError):
        erg.transfer_matrix(g, 4, dim_cap=100)


def test_spectrum_report_counts_unimodular():
    g = builtin_gate("I1")
    rep = erg.spectrum_report(erg.transfer_matrix(g, 1))
    assert rep.unimodular_count == 3
    assert rep.trivial_subtracted == 2
    assert len(rep.eigenvalues) == 9
    assert len(rep.phase_fractions) == 3


# ---------------------------------------------------------------------------
# glider counts


GLIDER_COUNTS = {
    "U1": [2, 14],
    "U2": [2, 14],
    "I1": [4, 40],
    "I2": [8, 80],
    "E1": [0, 2],
    "E2": [0, 0],
    "C1": [0, 0],
}


@pytest.mark.parametrize("name", sorted(GLIDER_COUNTS))
def test_glider_count(name):
    g = builtin_gate(name)
    for alpha in (1, 2):
        assert erg.glider_count(g, alpha) == GLIDER_COUNTS[name][alpha - 1]


def test_glider_count_dressed_swap_generic():
    """Generic phases leave exactly the diagonal conserved densities: the
    one-site movers are the n - 1 traceless diagonals per direction."""
    for n in (2, 3):
        diag = np.exp(2j * np.pi * RNG.random(n * n))
        g = dressed_swap(diag, n)
        assert erg.glider_count(g, 1) == 2 * (n - 1)
        cands = erg.extract_gliders(g, 1)
        assert len(cands) == 2 * n
        for c in cands:
            assert np.isclose(c.eigenvalue, 1.0)
            off_diag = c.operator - np.diag(np.diag(c.operator))
            assert np.allclose(off_diag, 0.0, atol=1e-9)


# ---------------------------------------------------------------------------
# glider extraction


def check_candidates(cands, g):
    for c in cands:
        assert c.verified
        assert c.residual < erg.EXCHANGE_ATOL
        assert np.isclose(abs(c.eigenvalue), 1.0, atol=1e-9)
        assert np.isclose(c.phase * np.conj(c.phase), 1.0, atol=1e-9)


def test_extract_gliders_u1():
    g = builtin_gate("U1")
    cands = erg.extract_gliders(g, 1)
    dirs = sorted(c.direction for c in cands)
    assert dirs == ["left", "left", "right", "right"]
    check_candidates(cands, g)


def test_extract_gliders_i1():
    g = builtin_gate("I1")
    cands = erg.extract_gliders(g, 1)
    assert sum(c.direction == "right" for c in cands) == 3
    assert sum(c.direction == "left" for c in cands) == 3
    check_candidates(cands, g)
    assert erg.glider_count(g, 1) == len(cands) - 2


def test_extract_gliders_e1_alpha2():
    g = builtin_gate("E1")
    cands = erg.extract_gliders(g, 2)
    assert sum(c.direction == "right" for c in cands) == 3
    assert sum(c.direction == "left" for c in cands) == 1
    check_candidates(cands, g)
    # widest-support movers genuinely need the alpha = 2 window
    assert max(c.support_range for c in cands) == 3


def test_extracted_operator_satisfies_exchange_relation():
    g = builtin_gate("I1")
    for c in erg.extract_gliders(g, 1):
        res = erg._exchange_residual(c.operator, g, c.direction, c.phase, L=6)
        assert res < erg.EXCHANGE_ATOL


def test_e2_alpha1_has_only_the_trivial_conservers():
    cands = erg.extract_gliders(builtin_gate("E2"), 1)
    assert sorted(c.direction for c in cands) == ["left", "right"]
    for c in cands:
        assert np.isclose(c.eigenvalue, 1.0)
        assert np.allclose(c.operator, c.operator[0, 0] * np.eye(3), atol=1e-9)


# ---------------------------------------------------------------------------
# correlators


def traceless(op):
    return op - np.trace(op) / op.shape[0] * np.eye(op.shape[0])


def test_on_light_cone():
    # both rays x = y +/- t count, wrapping around the ring
    assert erg.on_light_cone(3, 1, 2, 8)
    assert erg.on_light_cone(7, 1, 2, 8)
    assert erg.on_light_cone(8, 2, 2, 8)
    assert erg.on_light_cone(4, 2, 2, 8)
    assert not erg.on_light_cone(1, 1, 2, 8)
    assert not erg.on_light_cone(2, 1, 2, 8)
    assert not erg.on_light_cone(5, 2, 2, 8)


def test_correlator_matches_channel_power():
    g = builtin_gate("E1")
    n, L, t = g.n, 8, 2
    o1 = traceless(RNG.random((n, n)) + 1j * RNG.random((n, n)))
    o2 = traceless(RNG.random((n, n)) + 1j * RNG.random((n, n)))
    kp = erg.channel_m(g, "+")
    km = erg.channel_m(g, "-")

    y = 3  # odd: right mover, lands on x = y + t
    got = erg.correlator(g, L, t, o1, o2, y + t, y)
    vec = np.linalg.matrix_power(km, t) @ o1.reshape(n * n)
    want = np.trace(vec.reshape(n, n) @ o2) / n
    if not np.isclose(got, want, atol=1e-10):
        want = np.trace((np.linalg.matrix_power(kp, t) @ o1.reshape(n * n)).reshape(n, n) @ o2) / n
    assert np.isclose(got, want, atol=1e-10)

    y = 4  # even: left mover, lands on x = y - t
    got = erg.correlator(g, L, t, o1, o2, y - t, y)
    want_m = np.trace((np.linalg.matrix_power(km, t) @ o1.reshape(n * n)).reshape(n, n) @ o2) / n
    want_p = np.trace((np.linalg.matrix_power(kp, t) @ o1.reshape(n * n)).reshape(n, n) @ o2) / n
    assert np.isclose(got, want_m, atol=1e-10) or np.isclose(got, want_p, atol=1e-10)


def test_correlator_vanishes_off_cone():
    g = builtin_gate("E2")
    n, L, t = g.n, 8, 2
    o1 = traceless(RNG.random((n, n)))
    o2 = traceless(RNG.random((n, n)))
    for y in (1, 2, 3):
        for x in range(1, L + 1):
            if erg.on_light_cone(x, y, t, L):
                continue
            assert abs(erg.correlator(g, L, t, o1, o2, x, y)) < 1e-12


def test_perfect_gate_kills_all_correlations():
    m = ring_linear(3, (1, 1, 1, 2))
    assert check_flags(m).perfect
    g = to_gate(m)
    o1 = traceless(RNG.random((3, 3)))
    o2 = traceless(RNG.random((3, 3)))
    for t in (2, 4):
        for x in range(1, 9):
            assert abs(erg.correlator(g, 8, t, o1, o2, x, 1)) < 1e-12


def test_dense_path_agrees_with_permutation_path(monkeypatch):
    g = builtin_gate("U1")
    n, L, t = 2, 6, 2
    o1 = traceless(RNG.random((n, n)) + 1j * RNG.random((n, n)))
    o2 = traceless(RNG.random((n, n)) + 1j * RNG.random((n, n)))
    pairs = [(y + t, y) for y in (1, 3)] + [(y - t, y) for y in (4, 6)]
    fast = [erg.correlator(g, L, t, o1, o2, x, y) for x, y in pairs]

    def refuse(*args, **kwargs):
        raise ValueError("forced dense path")

    monkeypatch.setattr(erg, "_correlator_permutation", refuse)
    slow = [erg.correlator(g, L, t, o1, o2, x, y) for x, y in pairs]
    assert np.allclose(fast, slow, atol=1e-10)


def test_correlator_t_zero_is_product_of_traces():
    g = builtin_gate("I1")
    n = g.n
    o1 = RNG.random((n, n))
    o2 = RNG.random((n, n))
    got = erg.correlator(g, 6, 0, o1, o2, 2, 2)
    assert np.isclose(got, np.trace(o1 @ o2) / n)
    apart = erg.correlator(g, 6, 0, o1, o2, 5, 2)
    assert np.isclose(apart, np.trace(o1) * np.trace(o2) / n**2)


def test_correlator_validates_arguments():
    g = builtin_gate("I1")
    o = np.eye(3)
    with pytest.raises(ValueError):
        erg.correlator(g, 7, 2, o, o, 1, 1)  # odd L
    with pytest.raises(ValueError):
        erg.correlator(g, 8, 3, o, o, 1, 1)  # odd t
    with pytest.raises(ValueError):
        erg.correlator(g, 8, 2, o, o, 0, 1)  # site off the ring
    with pytest.raises(ValueError):
        erg.correlator(g, 8, 2, np.eye(2), o, 1, 1)  # wrong operator shape


# ---------------------------------------------------------------------------
# state evolution helpers


def test_apply_floquet_swap_moves_sublattices():
    """One swap Floquet sends odd-site content two to the right and
    even-site content two to the left."""
    L, n = 6, 2
    idx = (1, 0, 0, 1, 1, 0)
    psi = np.zeros((n,) * L)
    psi[idx] = 1.0
    out = erg.apply_floquet(psi, swap_gate(2), L)
    expected = np.zeros_like(psi)
    target = [0] * L
    for s in range(1, L + 1):
        dest = (s - 1 + 2) % L + 1 if s % 2 == 1 else (s - 1 - 2) % L + 1
        target[dest - 1] = idx[s - 1]
    expected[tuple(target)] = 1.0
    assert np.array_equal(out, expected)


def test_shift_state_round_trip():
    psi = RNG.random((3,) * 4)
    assert np.allclose(erg.shift_state(erg.shift_state(psi, 1), -1), psi)
    moved = erg.shift_state(psi, 1)
    assert np.array_equal(moved, psi.transpose([3, 0, 1, 2]))


def test_apply_floquet_preserves_norm():
    g = builtin_gate("E1")
    psi = RNG.random((3,) * 4) + 1j * RNG.random((3,) * 4)
    psi /= np.linalg.norm(psi)
    out = erg.apply_floquet(psi, g, 4)
    assert np.isclose(np.linalg.norm(out), 1.0)
