import numpy as np
import pytest

from entgroups import errors
from entgroups.entclass import (enumerate_partitions, fingerprint,
                                maximal_entanglement_report, same_entanglement_type)
from entgroups.statecore import (X, apply_local, named_state, random_local_unitary,
                                 random_state)

import oracles
from conftest import generic3


@pytest.mark.parametrize("n, max_blocks", [(1, None), (3, None), (4, None), (4, 2), (5, 3)])
def test_enumerate_matches_brute_force(n, max_blocks):
    parts = enumerate_partitions(n, max_blocks)
    assert {p.blocks for p in parts} == oracles.set_partitions_brute(n, max_blocks)
    assert len(parts) == len(set(p.blocks for p in parts))


def test_enumerate_small_cases():
    assert [p.format() for p in enumerate_partitions(3)] == [
        "1|2|3", "1|2,3", "1,2|3", "1,3|2", "1,2,3"]
    assert len(enumerate_partitions(4, 2)) == 8
    with pytest.raises(errors.TooManyFactorsError):
        enumerate_partitions(7)


def test_zero_state_fingerprint():
    fp = fingerprint(named_state("zero"))
    for rec in fp.records.values():
        assert all(v == 0 for v in rec.get("dims", {}).values())
        assert rec.get("schmidt", [1]) == [1]


def test_generic3_regrouping():
    fp = fingerprint(generic3(0))
    assert all(v == 0 for v in fp.records["1|2|3"]["dims"].values())
    for key in ("1|2,3", "1,2|3", "1,3|2"):
        assert fp.records[key]["dims"] == {"1,2": 1}


def test_ghz_vs_w():
    g, w = fingerprint(named_state("ghz")), fingerprint(named_state("w"))
    assert g != w
    assert g.records["1|2|3"]["discrete"] == {"1,2,3": [2]}
    assert w.records["1|2|3"]["dims"]["1,2,3"] == 1
    assert all(g.records["1|2|3"]["dims"][k] == 1 for k in ("1,2", "1,3", "2,3"))


def test_fingerprint_lu_invariant(rng):
    base = fingerprint(named_state("ghz"))
    for _ in range(3):
        rot = apply_local(named_state("ghz"), random_local_unitary((2, 2, 2), rng))
        assert fingerprint(rot) == base


def test_fingerprint_json_stable():
    fp = fingerprint(named_state("w"))
    assert fp.to_json() == fingerprint(named_state("w")).to_json()
    assert len(fp.digest()) == 64


def test_same_type():
    a = named_state("ghz_general", {"a": 0.8, "b": 0.6})
    b = named_state("ghz_general", {"a": 0.6, "b": 0.8})
    assert np.isclose(abs(apply_local(a, (X, X, X)).overlap(b)), 1.0)
    assert same_entanglement_type(a, b)
    assert not same_entanglement_type(named_state("ghz"), named_state("w"))
    with pytest.raises(errors.ShapeMismatchError):
        same_entanglement_type(named_state("ghz"), named_state("bell"))


def test_same_type_permute(rng):
    s = random_state((2, 3, 2), rng)
    t = s.tensor().transpose(2, 1, 0).reshape(-1)
    from entgroups.statecore import make_state

    perm = make_state((2, 3, 2), t)
    assert same_entanglement_type(s, perm, permute=True, discrete=False)


def test_max_report_bell_zero():
    rep = maximal_entanglement_report(named_state("bell_zero"), None, (0, 1))
    assert rep.maximal and rep.pair_dim == 3
    assert rep.implications_hold and rep.commutation_ok
    assert all(rep.dims[t] == 0 for t in [(0, 2), (1, 2), (0, 1, 2)])


@pytest.mark.parametrize("a, b, bc", [(0.5, 0.5, 3), (0.4, np.sqrt(0.5 - 0.16), 1)])
def test_max_report_qubit_qu4it_qubit(a, b, bc):
    rep = maximal_entanglement_report(named_state("qubit_qu4it_qubit", {"a": a, "b": b}),
                                      None, (0, 1))
    assert rep.pair_dim == 3 and rep.maximal
    assert rep.dims[(1, 2)] == bc
    assert rep.dims[(0, 2)] == 0 and rep.dims[(0, 1, 2)] == 0
    assert rep.implications_hold and rep.commutation_ok
    assert rep.to_dict()["pair"] == [1, 2]


def test_max_report_too_small():
    with pytest.raises(errors.SubsetTooSmallError):
        maximal_entanglement_report(named_state("bell"), None, (0, 1))
