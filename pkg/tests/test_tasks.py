import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entgroups import errors
from entgroups.tasks import (chsh_closed_form, chsh_value, cnot_equivalence_check,
                             entanglement_swap, gf2_nullspace, gf2_rank, make_simon_instance,
                             simon_run, simon_stabilizer_check, superdense_encode,
                             superdense_gram, superdense_success, swap_stabilizer_eigenvalues,
                             teleport, teleport_table)

import oracles

S = 1 / np.sqrt(2)


def test_dense_bell_orthonormal():
    assert np.abs(superdense_gram(S, S) - np.eye(4)).max() < 1e-12
    assert np.allclose(superdense_encode(0.8, 0.6, 0).amps, [0.8, 0, 0, 0.6])


def test_dense_product_pair_indistinguishable():
    g = superdense_gram(1, 0)
    assert np.isclose(abs(g[0, 3]), 1.0)
    a, b = 0.8, 0.6
    assert np.isclose(superdense_gram(a, b)[0, 3], 1j * (a * a - b * b))


def test_dense_success_values():
    assert np.isclose(superdense_success(S, S), 1.0)
    assert np.isclose(superdense_success(1, 0), 0.5)
    assert np.isclose(superdense_success(0.8, 0.6), 0.98)


@pytest.mark.parametrize("b", [0.0, 0.3, 0.6, S])
def test_dense_success_matches_sdp(b):
    a = np.sqrt(1 - b * b)
    states = [superdense_encode(a, b, m).amps for m in range(4)]
    assert abs(oracles.discrimination_sdp(states) - superdense_success(a, b)) < 1e-6


def test_dense_rejects_bad_amplitudes():
    with pytest.raises(errors.ValidationError):
        superdense_encode(0.6, 0.8, 0)
    with pytest.raises(errors.ValidationError):
        superdense_encode(0.8, 0.6, 4)


# four-row outcome table: 00 -> a|0>+b|1>, 01 -> a|1>+b|0>, 10 -> a|0>-b|1>, 11 -> a|1>-b|0>
def _expected(a, b, bits):
    return {(0, 0): [a, b], (0, 1): [b, a], (1, 0): [a, -b], (1, 1): [-b, a]}[bits]


@pytest.mark.parametrize("pair", [(1, 3), (1, 2)])
def test_teleport_table(pair):
    a, b = 0.6, 0.8j
    table = teleport_table(a, b, pair)
    assert [r["correction"] for r in table] == ["I", "X", "Z", "ZX"]
    for r in table:
        bits = tuple(int(c) for c in r["bits"])
        assert np.allclose(r["state"], _expected(a, b, bits))
        assert r["fidelity"] > 1 - 1e-10 and np.isclose(r["probability"], 0.25)


def test_teleport_examples():
    r = teleport(0.6, 0.8, (1, 3), (1, 1))
    assert r["remaining_qubit"] == 2 and r["correction"] == "I"
    assert np.allclose(r["state"], [0.6, 0.8])
    r = teleport(0.6, 0.8, (1, 2), (-1, 1))
    assert r["remaining_qubit"] == 3 and r["correction"] == "Z"
    assert np.allclose(r["state"], [0.6, -0.8])
    for r in teleport_table(1, 0):
        assert r["fidelity"] > 1 - 1e-12


def test_teleport_random_inputs(rng):
    for _ in range(20):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        for pair in ((1, 3), (1, 2)):
            assert all(r["fidelity"] > 1 - 1e-10 for r in teleport_table(v[0], v[1], pair))


def test_cnot_equivalence():
    assert cnot_equivalence_check(0.6, 0.8) < 1e-12
    assert np.isclose(cnot_equivalence_check(S, S, [1, 0, 0, 0]), 1.0)
    assert cnot_equivalence_check(1, 0, [1, 0, 0, 0]) == 0


def test_swap():
    a = entanglement_swap()
    assert np.allclose(np.diag(a), 0.5)
    assert np.abs(a - np.diag(np.diag(a))).max() < 1e-12
    ev = swap_stabilizer_eigenvalues()
    assert np.isclose(ev["XXXX"], 1) and np.isclose(ev["ZZZZ"], 1)


def test_chsh_values():
    assert np.isclose(chsh_value(S, S, 1.0), 2 * np.sqrt(2))
    v = chsh_value(0.8, 0.6, 0.01)
    assert v > 2 and abs(v - 2 * (1 + 0.0096) / np.sqrt(1.0001)) < 1e-12
    assert chsh_value(1, 0, 0.5) <= 2
    assert chsh_value(0.8, 0.6, 0.0) == pytest.approx(2.0, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, np.pi / 4), st.floats(-2.0, 2.0))
def test_chsh_against_oracles(t, eps):
    p1, p2 = np.cos(t), np.sin(t)
    v = chsh_value(p1, p2, eps)
    assert abs(v - chsh_closed_form(p1, p2, eps)) < 1e-12
    assert abs(v - oracles.chsh_direct(p1, p2, eps)) < 1e-12


def test_chsh_derivative():
    p1, p2, h = 0.8, 0.6, 1e-4
    xx = 2 * p1 * p2
    central = (chsh_value(p1, p2, h) - chsh_value(p1, p2, -h)) / (2 * h)
    assert abs(central - 2 * xx) < 1e-6
    # the one-sided quotient carries an O(eps) curvature term
    one_sided = (chsh_value(p1, p2, h) - chsh_value(p1, p2, 0)) / h
    assert abs(one_sided - 2 * xx) < 2 * h


def test_gf2_against_enumeration(rng):
    for n in range(1, 5):
        for _ in range(30):
            rows = [int(x) for x in rng.integers(0, 2 ** n, size=int(rng.integers(1, 5)))]
            brute = oracles.gf2_null_brute(rows, n)
            basis = gf2_nullspace(rows, n)
            assert 2 ** len(basis) - 1 == len(brute)
            assert n - gf2_rank(rows, n) == len(basis)
            assert all(b in brute for b in basis)


def test_simon_instance_period():
    inst = make_simon_instance(3, "101", seed=1)
    assert oracles.simon_period_brute(list(inst.table)) == [0b101]
    assert simon_run(inst)["xi_bits"] == "101"


def test_simon_runs():
    inst = make_simon_instance(2, "11", seed=5)
    for seed in range(100):
        out = simon_run(inst, seed=seed)
        assert out["xi"] == 3 and out["repetitions"] <= 16
        assert all(bin(z & 3).count("1") % 2 == 0 for z in out["samples"])


def test_simon_invalid():
    with pytest.raises(errors.InvalidInstanceError):
        make_simon_instance(3, "000")
    with pytest.raises(errors.InsufficientRankError):
        simon_run(make_simon_instance(5, "10011"), shots_budget=1)


def test_simon_stabilizers():
    rep = simon_stabilizer_check("000", "101")
    assert rep["x_string_stabilizes"] and np.isclose(rep["x_eigenvalue"], 1)
    assert rep["z_string_stabilizes_after_hadamard"]
    assert simon_stabilizer_check("000", "111")["x_string_stabilizes"]
    bad = simon_stabilizer_check("000", "101", support="100")
    assert not bad["x_string_stabilizes"] and not bad["verify_discrete"]["stabilizer"]
