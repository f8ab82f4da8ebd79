"""Bipartite Schmidt decomposition and the resulting bipartite group structure.

For a bipartition with Schmidt multiplicities ``k_1, ..., k_n`` (rank
``r = sum k_i``) the stabilizer splits as::

    S_AB = U(1) x U(k_1) x ... x U(k_n) x U(d_A - r) x U(d_B - r)
    S_A  = U(1) x U(d_A - r)
    S_B  = U(1) x U(d_B - r)
    E_AB = PSU(k_1) x U(k_2) x ... x U(k_n)

so ``dim E_AB = sum k_i**2 - 1``.
"""

from dataclasses import dataclass

import numpy as np

from . import errors

RANK_RTOL = 1e-10
DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    subset: tuple
    complement: tuple

    @property
    def rank(self):
        return int(self.coefficients.size)

    def reconstruct(self):
        """Flat amplitudes in (subset, complement) order."""
        return np.einsum("i,ai,bi->ab", self.coefficients, self.left, self.right).reshape(-1)


@dataclass(frozen=True)
class DegeneracyProfile:
    multiplicities: tuple
    levels: tuple

    @property
    def rank(self):
        return sum(self.multiplicities)


@dataclass(frozen=True)
class GroupFactor:
    kind: str  # "U" or "PSU"
    size: int

    @property
    def dim(self):
        return self.size**2 - (1 if self.kind == "PSU" else 0)

    def __str__(self):
        return f"{self.kind}({self.size})"


@dataclass(frozen=True)
class BipartiteGroupSignature:
    s_ab: tuple
    s_a: tuple
    s_b: tuple
    e_ab: tuple

    @property
    def dim_e(self):
        return sum(f.dim for f in self.e_ab)

    @staticmethod
    def _name(factors):
        return " x ".join(str(f) for f in factors) if factors else "{1}"

    def names(self):
        return {
            "S_AB": self._name(self.s_ab),
            "S_A": self._name(self.s_a),
            "S_B": self._name(self.s_b),
            "E_AB": self._name(self.e_ab),
        }

    def to_dict(self):
        out = self.names()
        out["dim_E_AB"] = self.dim_e
        return out


def _bipartition(state, subset):
    subset = tuple(sorted(set(int(i) for i in subset)))
    complement = tuple(i for i in range(state.n_factors) if i not in subset)
    if not subset or not complement:
        raise errors.EmptySubsetError("both sides of a bipartition must be nonempty")
    if subset[-1] >= state.n_factors or subset[0] < 0:
        raise errors.EmptySubsetError(f"subset {subset} outside the state's factors")
    return subset, complement


def schmidt_decompose(state, subset, rank_rtol=RANK_RTOL):
    """Schmidt decomposition across (``subset``, complement).

    Singular values below ``rank_rtol`` times the largest are dropped.
    """
    subset, complement = _bipartition(state, subset)
    t = state.tensor().transpose(subset + complement)
    d_a = int(np.prod([state.dims[i] for i in subset]))
    m = t.reshape(d_a, -1)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s >= rank_rtol * s[0]))
    return SchmidtData(s[:r].copy(), u[:, :r], vh[:r].T, subset, complement)


def group_degeneracies(data, rel_tol=DEGENERACY_RTOL):
    """Group consecutive coefficients closer than ``rel_tol * p_1`` (chained)."""
    if not 0 < rel_tol < 0.1:
        raise errors.ValidationError("rel_tol must lie in (0, 0.1)")
    p = np.asarray(data.coefficients if isinstance(data, SchmidtData) else data, dtype=float)
    if p.size == 0:
        return DegeneracyProfile((), ())
    groups = [[p[0]]]
    for prev, cur in zip(p[:-1], p[1:]):
        if abs(prev - cur) <= rel_tol * p[0]:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return DegeneracyProfile(tuple(len(g) for g in groups),
                             tuple(float(np.mean(g)) for g in groups))


def bipartite_group_name(profile, d_a, d_b):
    """Group factors from the multiplicities and the two dimensions."""
    ks = tuple(profile.multiplicities if isinstance(profile, DegeneracyProfile) else profile)
    r = sum(ks)
    if r > min(d_a, d_b):
        raise errors.RankExceedsDimensionError(
            f"Schmidt rank {r} exceeds min(d_A, d_B) = {min(d_a, d_b)}")
    if r == 0:
        raise errors.RankExceedsDimensionError("empty multiplicity profile")
    kernel_a = (GroupFactor("U", d_a - r),) if d_a > r else ()
    kernel_b = (GroupFactor("U", d_b - r),) if d_b > r else ()
    s_ab = (GroupFactor("U", 1),) + tuple(GroupFactor("U", k) for k in ks) + kernel_a + kernel_b
    s_a = (GroupFactor("U", 1),) + kernel_a
    s_b = (GroupFactor("U", 1),) + kernel_b
    e_ab = ()
    if ks[0] > 1:
        e_ab += (GroupFactor("PSU", ks[0]),)
    e_ab += tuple(GroupFactor("U", k) for k in ks[1:])
    return BipartiteGroupSignature(s_ab, s_a, s_b, e_ab)


def bipartite_entanglement_dim(state, subset, rank_rtol=RANK_RTOL, rel_tol=DEGENERACY_RTOL):
    """``sum k_i**2 - 1`` for the bipartition (``subset``, complement)."""
    profile = group_degeneracies(schmidt_decompose(state, subset, rank_rtol), rel_tol)
    return sum(k * k for k in profile.multiplicities) - 1


def schmidt_report(state, subset, rank_rtol=RANK_RTOL, rel_tol=DEGENERACY_RTOL):
    data = schmidt_decompose(state, subset, rank_rtol)
    profile = group_degeneracies(data, rel_tol)
    d_a = int(np.prod([state.dims[i] for i in data.subset]))
    d_b = int(np.prod([state.dims[i] for i in data.complement]))
    sig = bipartite_group_name(profile, d_a, d_b)
    return {
        "subset": [i + 1 for i in data.subset],
        "coefficients": [float(x) for x in data.coefficients],
        "rank": data.rank,
        "multiplicities": list(profile.multiplicities),
        "group_signature": sig.to_dict(),
    }
