"""Entanglement types: partition sweeps, fingerprints and restriction reports.

Two states have the same entanglement type when every partition of the
factors yields the same collection of stabilizer groups. Deciding that
exactly would mean comparing groups up to conjugation, so a fingerprint of
local-unitary invariants is used instead. It records the integer dimension of
every entanglement group together with the orders of certified discrete
generators, plus Schmidt multiplicities on bipartitions. Equal types give
equal fingerprints; the converse is not claimed.
"""

import hashlib
from dataclasses import dataclass, field
from itertools import permutations

from . import errors
from ._jsonio import dumps_canonical
from .schmidt import DEGENERACY_RTOL, group_degeneracies, schmidt_decompose
from .stabilizer import (DEFAULT_RTOL, AlgebraCache, SearchBudget, check_no_sharing,
                         entanglement_dim, full_entanglement_dim, identity_component,
                         search_discrete, stabilizer_algebra)
from .statecore import PureState, Partition, check_partition, subsets

MAX_FACTORS = 6


def enumerate_partitions(n, max_blocks=None):
    """All set partitions of ``n`` factors with at most ``max_blocks`` blocks.

    Blocks are sorted by least element; partitions come in decreasing number
    of blocks, then lexicographically.
    """
    n = int(n)
    if n > MAX_FACTORS:
        raise errors.TooManyFactorsError(f"{n} factors exceed the limit of {MAX_FACTORS}")
    if n < 1:
        raise errors.ValidationError("need at least one factor")
    max_blocks = n if max_blocks is None else int(max_blocks)

    out = []

    def grow(i, blocks):
        if i == n:
            out.append(tuple(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            grow(i + 1, blocks)
            b.pop()
        if len(blocks) < max_blocks:
            blocks.append([i])
            grow(i + 1, blocks)
            blocks.pop()

    grow(0, [])
    out.sort(key=lambda bl: (-len(bl), bl))
    return [Partition(bl) for bl in out]


def _subset_key(t):
    return ",".join(str(b + 1) for b in t)


@dataclass(frozen=True)
class Fingerprint:
    """LU-invariant summary, one record per partition keyed by its descriptor."""

    dims: tuple
    records: dict

    def to_dict(self):
        return {"dims": list(self.dims), "partitions": self.records}

    def to_json(self):
        return dumps_canonical(self.to_dict())

    def digest(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def __eq__(self, other):
        return isinstance(other, Fingerprint) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.to_json())


def _discrete_orders(state, partition, cache, budget, tol):
    """Orders of certified-outside discrete generators per block subset.

    A generator found with support mask ``T`` is kept only if it is not in
    the coset of an element already kept for a proper sub-mask.
    """
    kept, out, status = {}, {}, "ok"
    nb = partition.n_blocks
    for t in sorted(subsets(range(nb), 2), key=lambda s: (len(s), s)):
        alg = stabilizer_algebra(state, partition, t, tol, cache=cache)
        try:
            found = search_discrete(state, partition, t, budget, tol, algebra=alg)
        except errors.SearchBudgetExceededError:
            status = "budget_exceeded"
            out[_subset_key(t)] = "budget_exceeded"
            continue
        lower = [h for s, hs in kept.items() if set(s) < set(t) for h in hs]
        new = []
        for g in found:
            if g.identity_component != "outside":
                continue
            explained = False
            for h in lower:
                q = tuple(a @ b.conj().T for a, b in zip(g.matrices, h.matrices))
                if identity_component(q, alg) == "inside":
                    explained = True
                    break
            if not explained:
                new.append(g)
        kept[t] = new
        if new:
            out[_subset_key(t)] = sorted(g.order for g in new)
    return out, status


def partition_record(state, partition, tol=DEFAULT_RTOL, budget=None, discrete=True,
                     rel_tol=DEGENERACY_RTOL):
    partition = check_partition(partition, state.n_factors)
    nb = partition.n_blocks
    rec = {"blocks": partition.format()}
    if nb == 1:
        return rec
    cache = AlgebraCache()
    rec["dims"] = {_subset_key(t): entanglement_dim(state, partition, t, tol, cache)
                   for t in subsets(range(nb), 2)}
    rec["full_dim"] = full_entanglement_dim(state, partition, tol, cache)
    if nb == 2:
        data = schmidt_decompose(state, partition.blocks[0])
        rec["schmidt"] = list(group_degeneracies(data, rel_tol).multiplicities)
    elif discrete:
        # bipartite stabilizers are connected, so only three or more blocks are searched
        rec["discrete"], rec["search"] = _discrete_orders(
            state, partition, cache, budget or SearchBudget(), tol)
    return rec


def fingerprint(state, max_blocks=None, tol=DEFAULT_RTOL, budget=None, discrete=True):
    """Fingerprint over every partition with at most ``max_blocks`` blocks."""
    if not isinstance(state, PureState):
        raise errors.ValidationError("fingerprint needs a PureState")
    parts = enumerate_partitions(state.n_factors, max_blocks)
    records = {}
    for p in parts:
        records[p.format()] = partition_record(state, p, tol, budget, discrete)
    return Fingerprint(tuple(state.dims), records)


def _permute_factors(state, perm):
    from .statecore import make_state

    t = state.tensor().transpose(perm)
    return make_state(tuple(state.dims[i] for i in perm), t.reshape(-1))


def same_entanglement_type(s1, s2, permute=False, **kwargs):
    """Fingerprint equality.

    With ``permute`` the factors of ``s2`` may also be relabelled (only
    relabellings that preserve the dimension tuple are tried).
    """
    if sorted(s1.dims) != sorted(s2.dims):
        raise errors.ShapeMismatchError(f"dimension multisets differ: {s1.dims} vs {s2.dims}")
    f1 = fingerprint(s1, **kwargs)
    if tuple(s1.dims) == tuple(s2.dims) and f1 == fingerprint(s2, **kwargs):
        return True
    if not permute:
        return False
    for perm in permutations(range(s2.n_factors)):
        if perm == tuple(range(s2.n_factors)):
            continue
        if tuple(s2.dims[i] for i in perm) != tuple(s1.dims):
            continue
        if f1 == fingerprint(_permute_factors(s2, perm), **kwargs):
            return True
    return False


@dataclass(frozen=True)
class RestrictionReport:
    pair: tuple
    block_dims: tuple
    pair_dim: int
    maximal: bool
    dims: dict
    expected_trivial: tuple
    no_sharing: tuple = field(default=())

    @property
    def implications_hold(self):
        """Maximality forces every listed subset to carry no entanglement."""
        if not self.maximal:
            return True
        return all(self.dims[t] == 0 for t in self.expected_trivial)

    @property
    def commutation_ok(self):
        return all(r.passed for r in self.no_sharing)

    def to_dict(self):
        return {
            "pair": [b + 1 for b in self.pair],
            "block_dims": list(self.block_dims),
            "pair_dim": self.pair_dim,
            "maximal": self.maximal,
            "dims": {_subset_key(t): v for t, v in self.dims.items()},
            "expected_trivial": [_subset_key(t) for t in self.expected_trivial],
            "implications_hold": self.implications_hold,
            "commutation_ok": self.commutation_ok,
            "no_sharing": [r.to_dict() for r in self.no_sharing],
        }


def maximal_entanglement_report(state, partition, pair, tol=DEFAULT_RTOL):
    """Check the consequences of maximal entanglement within ``pair``.

    The pair is maximal when ``dim E_pair = d**2 - 1`` with ``d`` the smaller
    block dimension. Then no other subset containing the smaller block may be
    entangled; for equal dimensions this extends to subsets containing
    either block.
    """
    partition = check_partition(partition, state.n_factors)
    nb = partition.n_blocks
    if nb < 3:
        raise errors.SubsetTooSmallError("restriction report needs at least three blocks")
    pair = tuple(sorted(set(int(b) for b in pair)))
    if len(pair) != 2 or pair[0] < 0 or pair[1] >= nb:
        raise errors.ValidationError(f"pair {pair} must name two distinct blocks")
    bdims = partition.block_dims(state.dims)
    i, j = pair
    d = min(bdims[i], bdims[j])
    cache = AlgebraCache()
    dims = {t: entanglement_dim(state, partition, t, tol, cache) for t in subsets(range(nb), 2)}
    pair_dim = dims[pair]
    maximal = pair_dim == d * d - 1
    if bdims[i] == bdims[j]:
        through = {i, j}
    else:
        through = {i if bdims[i] < bdims[j] else j}
    expected = tuple(t for t in dims if t != pair and through & set(t))
    reports = tuple(check_no_sharing(state, partition, pair, (x, k), tol, cache=cache)
                    for x in pair for k in range(nb) if k not in pair)
    return RestrictionReport(pair, tuple(bdims), pair_dim, maximal, dims, expected, reports)
