import numpy as np
import pytest

from entgroups import errors
from entgroups.stabilizer import (AlgebraCache, SearchBudget, bracket_closure_residual,
                                  check_no_sharing, entanglement_dim, full_entanglement_dim,
                                  identity_component, isomorphism_dims, search_discrete,
                                  stabilizer_algebra, subspace_sum, verify_discrete)
from entgroups.statecore import (I2, X, Partition, apply_local, named_state,
                                 random_local_unitary, random_state)

import oracles
from conftest import ace_special, generic3
from frozen import ACE, GHZ86, W

PAIRS = [(0, 1), (0, 2), (1, 2)]


def ghz86():
    return named_state("ghz_general", {"a": 0.8, "b": 0.6})


def w_generic():
    return named_state("w", {"a": 2 / 7, "c": 3 / 7, "d": 6 / 7})


def ace_generic():
    return named_state("ace", {"a": 2 / 7, "c": 3 / 7, "e": 6 / 7})


def test_zero_state():
    s = named_state("zero")
    assert stabilizer_algebra(s).dim == 6
    assert full_entanglement_dim(s) == 0


@pytest.mark.parametrize("state, ref", [(ghz86, GHZ86), (w_generic, W)])
def test_named_dims(state, ref):
    s = state()
    cache = AlgebraCache()
    assert stabilizer_algebra(s, cache=cache).dim == ref["full"]
    assert [stabilizer_algebra(s, mask=m, cache=cache).dim for m in PAIRS] == ref["pairs"]
    assert [stabilizer_algebra(s, mask=(b,), cache=cache).dim for b in range(3)] == ref["singles"]
    for t, v in ref["E"].items():
        assert entanglement_dim(s, None, t, cache=cache) == v
    assert full_entanglement_dim(s, cache=cache) == ref["F"]


def test_ace_generic():
    s = ace_generic()
    assert stabilizer_algebra(s).dim == ACE["full"]
    for t, v in ACE["E"].items():
        assert entanglement_dim(s, None, t) == v


def test_generic3_dims():
    for seed in range(3):
        s = generic3(seed)
        assert stabilizer_algebra(s).dim == 3
        assert all(entanglement_dim(s, None, t) == 0 for t in ACE["E"])


def test_bell_two_qubit():
    assert entanglement_dim(named_state("bell"), None, (0, 1)) == 3
    assert full_entanglement_dim(named_state("bell")) == 3


def test_matches_numeric_oracle(rng):
    for dims in [(2, 2, 2), (2, 3), (3, 3), (2, 2, 3)]:
        s = random_state(dims, rng)
        assert stabilizer_algebra(s).dim == oracles.stabilizer_dim(s.amps, dims, exact=False)
    s = w_generic()
    for t in ACE["E"]:
        assert entanglement_dim(s, None, t) == oracles.entanglement_dim(
            s.amps, s.dims, t, exact=False)


def test_basis_is_stabilizing():
    s = named_state("w")
    alg = stabilizer_algebra(s)
    for k in range(alg.dim):
        hs = alg.block_matrices(k)
        for h in hs:
            assert np.allclose(h, h.conj().T)
        from scipy.linalg import expm
        out = apply_local(s, tuple(expm(0.3j * h) for h in hs))
        assert np.isclose(abs(out.overlap(s)), 1.0)
    assert bracket_closure_residual(alg) < 1e-10


def test_lu_invariance(rng):
    s = ghz86()
    for _ in range(3):
        rot = apply_local(s, random_local_unitary(s.dims, rng))
        assert stabilizer_algebra(rot).dim == 5
        assert full_entanglement_dim(rot) == 2


def test_subspace_sum_ghz():
    s = named_state("ghz")
    singles = [stabilizer_algebra(s, mask=(b,)) for b in range(3)]
    assert subspace_sum(singles).dim == 3
    pairs = [stabilizer_algebra(s, mask=m) for m in PAIRS]
    assert subspace_sum(pairs).dim == 5
    assert subspace_sum([pairs[0], pairs[0]]).dim == pairs[0].dim


def test_isomorphism_and_no_sharing():
    states = [named_state("zero"), named_state("ghz"), ghz86(), w_generic(), ace_generic(),
              named_state("bell_zero"), generic3(0),
              named_state("qubit_qu4it_qubit", {"a": 0.5, "b": 0.5})]
    for s in states:
        for p in PAIRS:
            left, right = isomorphism_dims(s, None, p)
            assert left == right
        rep = check_no_sharing(s, None, (0, 1), (0, 2))
        assert rep.passed
    rep = check_no_sharing(ghz86(), None, (0, 1), (0, 2))
    assert rep.shared_projection_dim == 2


def test_no_sharing_errors():
    with pytest.raises(errors.NoSharedBlockError):
        check_no_sharing(named_state("zero", {"n": 4}), None, (0, 1), (2, 3))


def test_verify_ghz_xxx():
    s = named_state("ghz")
    d = verify_discrete(s, None, (X, X, X))
    assert d.order == 2 and d.normalizes_algebra and d.identity_component == "outside"
    assert abs(d.phase) < 1e-12
    with pytest.raises(errors.NotAStabilizerError):
        verify_discrete(s, None, (X, X, I2))


def test_verify_ace_element():
    s = ace_special()
    a, c, e = np.sqrt(0.5), np.sqrt(0.3), np.sqrt(0.2)
    mid = np.array([[c / a, e / a], [e / a, -c / a]])
    d = verify_discrete(s, None, (X, mid, X))
    assert d.order == 2 and d.identity_component == "outside"


def test_identity_component_inside():
    s = named_state("ghz")
    alg = stabilizer_algebra(s)
    phase = np.diag([1, np.exp(0.4j)])
    g = (phase, phase.conj(), I2)
    assert verify_discrete(s, None, g).identity_component == "inside"
    assert identity_component(g, alg) == "inside"


def _phase_align(a, b):
    k = np.argmax(np.abs(b))
    return a * (b.flat[k] / a.flat[k])


def test_search_ghz():
    found = search_discrete(named_state("ghz"))
    assert len(found) >= 1
    outside = [g for g in found if g.identity_component == "outside"]
    assert any(max(np.abs(_phase_align(m, X) - X).max() for m in g.matrices) < 1e-8
               and g.order == 2 for g in outside)


def test_search_ace_special():
    a, c, e = np.sqrt(0.5), np.sqrt(0.3), np.sqrt(0.2)
    mid = np.array([[c / a, e / a], [e / a, -c / a]])
    found = search_discrete(ace_special())
    assert any(g.order == 2 and np.abs(_phase_align(g.matrices[1], mid) - mid).max() < 1e-8
               for g in found)


def test_search_ghz_general_family():
    s = named_state("ghz_general", {"a": 1j / np.sqrt(2), "b": 1 / np.sqrt(2)})
    found = search_discrete(s)
    assert found
    for g in found:
        assert all(abs(m[0, 0]) < 1e-8 and abs(m[1, 1]) < 1e-8 for m in g.matrices)


def test_search_generic_empty():
    assert search_discrete(generic3(0)) == []


def test_search_budget():
    with pytest.raises(errors.SearchBudgetExceededError):
        search_discrete(named_state("ghz"), budget=SearchBudget(max_candidates=3))


def test_problem_too_large():
    with pytest.raises(errors.ProblemTooLargeError):
        stabilizer_algebra(named_state("zero", {"n": 14}), Partition.parse(
            "1,2,3,4,5,6,7|8,9,10,11,12,13,14"))
