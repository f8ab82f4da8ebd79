"""Local-unitary stabilizers of a pure state.

The continuous part is handled at the Lie-algebra level. A tuple of
Hermitian matrices ``(H_1, ..., H_k)``, one per partition block, generates a
stabilizer iff ``sum_b H_b`` (each embedded on its block) has ``|psi>`` as an
eigenvector, i.e. ``(1 - |psi><psi|) sum_b H_b |psi> = 0``. That condition is
real-linear in the matrix entries, so every stabilizer algebra is a
nullspace. Masked algebras (blocks outside the mask forced to zero) give the
subgroups that act trivially on some blocks, and entanglement dimensions are
differences of such nullities.

Parameter vectors live in the full space of all blocks: block ``b`` owns
``d_b**2`` consecutive coordinates in :func:`~entgroups._linalg.hermitian_basis`
order and masked-out blocks are zero.

Discrete stabilizers are verified directly and searched for with a hybrid
scheme: monomial matrices (permutation times a phase diagonal) on all blocks
but one, in a frame adapted to the state, and a linear solve for the last
block. It finds the known elements of the named states but is not exhaustive
over unitary tuples.
"""

import math
import threading
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np
import scipy.linalg

from . import errors
from ._linalg import (canonical_rows, commutator, hermitian_basis, hermitian_coords,
                      hermitian_from_coords, is_unitary, nullspace, orthonormal_span,
                      proportional_to_identity, span_residual)
from .statecore import apply_on_axis, block_tensor, check_partition, subsets

DEFAULT_RTOL = 1e-9
MAX_PARAMS = 4096
CHECK_TOL = 1e-8
STABILIZER_TOL = 1e-9
MAX_ORDER = 12


# ---------------------------------------------------------------- containers

@dataclass(frozen=True, eq=False)
class StabilizerAlgebra:
    """Orthonormal basis of a (masked) stabilizer Lie algebra.

    ``basis`` has one row per generator in the full parameter space of the
    partition; ``gap`` is (largest dropped, smallest kept) singular value of
    the constraint map relative to its largest.
    """

    partition: object
    block_dims: tuple
    mask: tuple
    basis: np.ndarray
    gap: tuple = (0.0, math.inf)
    tol: float = DEFAULT_RTOL

    @property
    def dim(self):
        return int(self.basis.shape[0])

    @property
    def offsets(self):
        return block_offsets(self.block_dims)

    @property
    def parameter_dim(self):
        return sum(self.block_dims[b] ** 2 for b in self.mask)

    def block_matrices(self, k):
        """Hermitian matrices of generator ``k``, one per block."""
        return vector_to_tuple(self.basis[k], self.block_dims)

    def restrict(self, blocks):
        """Rows of ``basis`` restricted to the coordinates of ``blocks``."""
        return self.basis[:, block_columns(self.block_dims, blocks)]


@dataclass(frozen=True)
class NoSharingReport:
    pair1: tuple
    pair2: tuple
    shared: tuple
    bracket_residual: float
    shared_projection_dim: int
    center_residual: float
    tol: float

    @property
    def bracket_contained(self):
        return self.bracket_residual < self.tol

    @property
    def center_ok(self):
        return self.center_residual < self.tol

    @property
    def passed(self):
        return self.bracket_contained and self.center_ok

    def to_dict(self):
        return {
            "pair1": [b + 1 for b in self.pair1],
            "pair2": [b + 1 for b in self.pair2],
            "shared": [b + 1 for b in self.shared],
            "bracket_contained": self.bracket_contained,
            "bracket_residual": self.bracket_residual,
            "shared_projection_dim": self.shared_projection_dim,
            "center_ok": self.center_ok,
            "center_residual": self.center_residual,
        }


@dataclass(frozen=True, eq=False)
class DiscreteStabilizer:
    matrices: tuple
    phase: float
    order: int
    normalizes_algebra: bool
    identity_component: str  # "inside" | "outside" | "unknown"
    residual: float
    mask: tuple = ()

    def to_dict(self):
        from ._jsonio import matrix_to_json

        return {
            "matrices": [matrix_to_json(m) for m in self.matrices],
            "phase": self.phase,
            "order": self.order,
            "normalizes_algebra": self.normalizes_algebra,
            "identity_component": self.identity_component,
            "residual": self.residual,
            "mask": [b + 1 for b in self.mask],
        }


@dataclass(frozen=True)
class SearchBudget:
    """Limits for :func:`search_discrete`.

    ``phases`` are the values tried on each nonleading monomial entry.
    """

    max_candidates: int = 200_000
    max_block_dim: int = 4
    phases: tuple = (1, -1, 1j, -1j)


class AlgebraCache:
    """Write-once memo of algebras for one (state, partition, tolerance).

    Safe for concurrent readers; a key is computed at most once.
    """

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get(self, key, factory):
        try:
            return self._data[key]
        except KeyError:
            pass
        value = factory()
        with self._lock:
            return self._data.setdefault(key, value)


# ---------------------------------------------------------------- parameters

def block_offsets(bdims):
    out, acc = [], 0
    for d in bdims:
        out.append(acc)
        acc += d * d
    return out


def block_columns(bdims, blocks):
    offs = block_offsets(bdims)
    return np.concatenate([np.arange(offs[b], offs[b] + bdims[b] ** 2) for b in blocks]) \
        if len(blocks) else np.zeros(0, dtype=int)


def vector_to_tuple(v, bdims):
    offs = block_offsets(bdims)
    return tuple(hermitian_from_coords(v[o:o + d * d], d) for o, d in zip(offs, bdims))


def tuple_to_vector(hs, bdims):
    return np.concatenate([hermitian_coords(np.asarray(h, dtype=complex)) for h in hs])


def _mask(mask, n_blocks):
    if mask is None:
        return tuple(range(n_blocks))
    mask = tuple(sorted(set(int(b) for b in mask)))
    if not mask:
        raise errors.ValidationError("support mask must be nonempty")
    if mask[0] < 0 or mask[-1] >= n_blocks:
        raise errors.ValidationError(f"mask {mask} outside blocks 0..{n_blocks - 1}")
    return mask


def _check_tol(tol):
    if not 0 < tol < 1e-4:
        raise errors.ValidationError(f"tolerance {tol} must lie in (0, 1e-4)")


# ---------------------------------------------------------------- continuous part

def constraint_matrix(psi_t, mask):
    """Real matrix of the linearized stabilizer condition on the masked blocks.

    Rows are the real and imaginary parts of
    ``(1 - |psi><psi|) H_b |psi>``; one column per masked parameter.
    """
    psi = psi_t.reshape(-1)
    cols = []
    for b in mask:
        d = psi_t.shape[b]
        w = np.tensordot(hermitian_basis(d), psi_t, axes=([2], [b]))
        w = np.moveaxis(w, 1, b + 1).reshape(d * d, -1)
        w = w - np.outer(w @ psi.conj(), psi)
        cols.append(w)
    w = np.concatenate(cols, axis=0)
    return np.concatenate([w.real, w.imag], axis=1).T


def _algebra(psi_t, partition, mask, tol, max_params):
    bdims = psi_t.shape
    n_params = sum(bdims[b] ** 2 for b in mask)
    if n_params > max_params:
        raise errors.ProblemTooLargeError(
            f"{n_params} real parameters exceed the cap of {max_params}")
    null, gap = nullspace(constraint_matrix(psi_t, mask), tol)
    basis = np.zeros((null.shape[0], sum(d * d for d in bdims)))
    basis[:, block_columns(bdims, mask)] = null
    return StabilizerAlgebra(partition, tuple(bdims), mask, basis, gap, tol)


def stabilizer_algebra(state, partition=None, mask=None, tol=DEFAULT_RTOL,
                       max_params=MAX_PARAMS, cache=None):
    """Stabilizer Lie algebra of ``state`` supported on the blocks in ``mask``.

    ``mask`` holds 0-based block indices (default: all blocks).
    """
    _check_tol(tol)
    partition = check_partition(partition, state.n_factors)
    mask = _mask(mask, partition.n_blocks)

    def build():
        return _algebra(block_tensor(state, partition), partition, mask, tol, max_params)

    if cache is None:
        return build()
    return cache.get((partition, mask, tol), build)


def subspace_sum(algebras, tol=DEFAULT_RTOL):
    """Span of several algebras on the same partition."""
    algebras = list(algebras)
    if not algebras:
        raise errors.ValidationError("need at least one algebra")
    first = algebras[0]
    for a in algebras[1:]:
        if a.partition != first.partition or a.block_dims != first.block_dims:
            raise errors.PartitionMismatchError("algebras live on different partitions")
    mask = tuple(sorted(set().union(*(a.mask for a in algebras))))
    basis = orthonormal_span(np.vstack([a.basis for a in algebras]), tol)
    return StabilizerAlgebra(first.partition, first.block_dims, mask, basis, (0.0, math.inf), tol)


def _subset(subset, n_blocks, min_size):
    subset = tuple(sorted(set(int(b) for b in subset)))
    if len(subset) < min_size:
        raise errors.SubsetTooSmallError(f"subset {subset} needs at least {min_size} blocks")
    if subset[0] < 0 or subset[-1] >= n_blocks:
        raise errors.ValidationError(f"subset {subset} outside blocks 0..{n_blocks - 1}")
    return subset


def entanglement_dim(state, partition=None, subset=None, tol=DEFAULT_RTOL, cache=None):
    """Continuous dimension of the entanglement group of the blocks in ``subset``.

    This is ``dim s_T`` minus the dimension of the sum of all the algebras
    obtained by removing one block of ``T``.
    """
    partition = check_partition(partition, state.n_factors)
    subset = _subset(range(partition.n_blocks) if subset is None else subset,
                     partition.n_blocks, 2)
    cache = AlgebraCache() if cache is None else cache
    top = stabilizer_algebra(state, partition, subset, tol, cache=cache)
    lower = [stabilizer_algebra(state, partition, tuple(b for b in subset if b != j), tol,
                                cache=cache) for j in subset]
    return top.dim - subspace_sum(lower, tol).dim


def full_entanglement_dim(state, partition=None, tol=DEFAULT_RTOL, cache=None):
    """``dim s_full - sum_i dim s_i``."""
    partition = check_partition(partition, state.n_factors)
    if partition.n_blocks < 2:
        raise errors.SubsetTooSmallError("need at least two blocks")
    cache = AlgebraCache() if cache is None else cache
    full = stabilizer_algebra(state, partition, None, tol, cache=cache)
    return full.dim - sum(stabilizer_algebra(state, partition, (b,), tol, cache=cache).dim
                          for b in range(partition.n_blocks))


def all_entanglement_dims(state, partition=None, tol=DEFAULT_RTOL, cache=None):
    """``{subset: dim E_subset}`` for every block subset of size >= 2."""
    partition = check_partition(partition, state.n_factors)
    cache = AlgebraCache() if cache is None else cache
    return {t: entanglement_dim(state, partition, t, tol, cache)
            for t in subsets(range(partition.n_blocks), 2)}


def projected_span(algebra, blocks, tol=DEFAULT_RTOL):
    """Orthonormal basis of the algebra projected onto ``blocks``."""
    return orthonormal_span(algebra.restrict(blocks), tol)


def isomorphism_dims(state, partition, pair, tol=DEFAULT_RTOL, cache=None):
    """Projected-dimension form of the two-party isomorphism.

    Returns ``(dim pi_a(s_ab) - dim pi_a(s_a), dim pi_b(s_ab) - dim pi_b(s_b))``;
    both equal ``dim E_ab``.
    """
    partition = check_partition(partition, state.n_factors)
    a, b = _subset(pair, partition.n_blocks, 2)
    cache = AlgebraCache() if cache is None else cache
    s_ab = stabilizer_algebra(state, partition, (a, b), tol, cache=cache)
    s_a = stabilizer_algebra(state, partition, (a,), tol, cache=cache)
    s_b = stabilizer_algebra(state, partition, (b,), tol, cache=cache)
    left = projected_span(s_ab, (a,), tol).shape[0] - projected_span(s_a, (a,), tol).shape[0]
    right = projected_span(s_ab, (b,), tol).shape[0] - projected_span(s_b, (b,), tol).shape[0]
    return left, right


def bracket_vector(u, v, bdims):
    """Componentwise bracket ``i[U_b, V_b]`` of two parameter vectors."""
    us, vs = vector_to_tuple(u, bdims), vector_to_tuple(v, bdims)
    return tuple_to_vector([1j * commutator(x, y) for x, y in zip(us, vs)], bdims)


def bracket_closure_residual(algebra):
    """Largest distance of a basis bracket from the algebra (0 for a Lie algebra)."""
    worst = 0.0
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            br = bracket_vector(algebra.basis[i], algebra.basis[j], algebra.block_dims)
            worst = max(worst, span_residual(br, algebra.basis))
    return worst


def intersect_spans(u, v, tol=CHECK_TOL):
    """Orthonormal basis of span(u) & span(v) for orthonormal row sets."""
    if u.shape[0] == 0 or v.shape[0] == 0:
        return np.zeros((0, u.shape[1]))
    left, s, _ = np.linalg.svd(u @ v.T)
    k = int(np.sum(s > 1 - tol))
    return canonical_rows(left[:, :k].T @ u) if k else np.zeros((0, u.shape[1]))


def _restricted_bracket(x, y, dims):
    xs = [hermitian_from_coords(c, d) for c, d in zip(np.split(x, np.cumsum([d * d for d in dims])[:-1]), dims)]
    ys = [hermitian_from_coords(c, d) for c, d in zip(np.split(y, np.cumsum([d * d for d in dims])[:-1]), dims)]
    return np.concatenate([hermitian_coords(1j * commutator(a, b)) for a, b in zip(xs, ys)])


def check_no_sharing(state, partition, pair1, pair2, tol=DEFAULT_RTOL, check_tol=CHECK_TOL,
                     cache=None):
    """Bracket-containment and center checks for two overlapping block sets.

    (i) brackets of ``s_pair1`` with ``s_pair2`` lie in ``s_shared``; (ii) the
    intersection of the two algebras projected onto the shared blocks;
    (iii) every element of that intersection commutes with both projected
    algebras modulo the projection of ``s_shared`` (the one-party part that
    the quotient removes).
    """
    partition = check_partition(partition, state.n_factors)
    nb = partition.n_blocks
    p1, p2 = _subset(pair1, nb, 1), _subset(pair2, nb, 1)
    shared = tuple(sorted(set(p1) & set(p2)))
    if not shared:
        raise errors.NoSharedBlockError(f"{p1} and {p2} share no block")
    cache = AlgebraCache() if cache is None else cache
    s1 = stabilizer_algebra(state, partition, p1, tol, cache=cache)
    s2 = stabilizer_algebra(state, partition, p2, tol, cache=cache)
    s_sh = stabilizer_algebra(state, partition, shared, tol, cache=cache)
    bdims = s1.block_dims

    br_res = 0.0
    for h in s1.basis:
        for k in s2.basis:
            br_res = max(br_res, span_residual(bracket_vector(h, k, bdims), s_sh.basis))

    pa = projected_span(s1, shared, tol)
    pb = projected_span(s2, shared, tol)
    centre = intersect_spans(pa, pb, check_tol)
    one_party = projected_span(s_sh, shared, tol)
    sh_dims = [bdims[b] for b in shared]
    c_res = 0.0
    for g in centre:
        for x in np.vstack([pa, pb]):
            c_res = max(c_res, span_residual(_restricted_bracket(g, x, sh_dims), one_party))
    return NoSharingReport(p1, p2, shared, br_res, int(centre.shape[0]), c_res, check_tol)


# ---------------------------------------------------------------- discrete part

def _apply_tuple(psi_t, mats, blocks):
    out = psi_t
    for b in blocks:
        out = apply_on_axis(out, mats[b], b)
    return out


def _conj_vector(g, v, bdims):
    hs = vector_to_tuple(v, bdims)
    return tuple_to_vector([u @ h @ u.conj().T for u, h in zip(g, hs)], bdims)


def _is_abelian(algebra):
    bdims = algebra.block_dims
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            if np.linalg.norm(bracket_vector(algebra.basis[i], algebra.basis[j], bdims)) > CHECK_TOL:
                return False
    return True


def _eigenspaces(u, tol=1e-8):
    """Distinct eigenvalues and eigenprojectors of a normal matrix."""
    t, z = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t)
    groups = []
    for j, val in enumerate(lam):
        for g in groups:
            if abs(lam[g[0]] - val) < tol:
                g.append(j)
                break
        else:
            groups.append([j])
    vals = [lam[g].mean() for g in groups]
    projs = [z[:, g] @ z[:, g].conj().T for g in groups]
    return vals, projs


def _log_in_algebra(g, algebra, tol=1e-7, max_combos=3**8):
    """Whether ``g = exp(i h)`` for some ``h`` in the algebra (up to block phases).

    Searches the branches of the matrix logarithm that shift each eigenphase
    by at most one turn.
    """
    bdims = algebra.block_dims
    base, shifts = [], []
    offs = block_offsets(bdims)
    total = sum(d * d for d in bdims)
    for b, (u, d) in enumerate(zip(g, bdims)):
        vals, projs = _eigenspaces(u)
        h = sum(np.angle(v) * p for v, p in zip(vals, projs))
        base.append(h)
        for p in projs[1:]:
            w = np.zeros(total)
            w[offs[b]:offs[b] + d * d] = hermitian_coords(2 * np.pi * p)
            shifts.append(w)
    v0 = tuple_to_vector(base, bdims)
    # unmasked blocks carry no algebra directions; their phase is absorbed below
    basis = algebra.basis
    phase_dirs = []
    for b in range(len(bdims)):
        if b not in algebra.mask:
            w = np.zeros(total)
            w[offs[b]:offs[b] + bdims[b] ** 2] = hermitian_coords(np.eye(bdims[b]))
            phase_dirs.append(w / np.linalg.norm(w))
    if phase_dirs:
        # a phase on an unmasked block equals the same phase on a masked one
        basis = orthonormal_span(np.vstack([basis] + phase_dirs), DEFAULT_RTOL)

    def resid(x):
        return x - (x @ basis.T) @ basis

    r0 = resid(v0)
    if not shifts:
        return bool(np.linalg.norm(r0) < tol)
    rw = np.array([resid(w) for w in shifts])
    k = len(shifts)
    if 3**k <= max_combos:
        combos = np.array(list(product((0, 1, -1), repeat=k)), dtype=float)
        norms = np.linalg.norm(r0 + combos @ rw, axis=1)
        return bool(norms.min() < tol)
    n, *_ = np.linalg.lstsq(rw.T, -r0, rcond=None)
    return bool(np.linalg.norm(r0 + np.round(n) @ rw) < tol)


def _exp_fit(g, algebra, starts=6, tol=1e-8):
    """Least-squares search for ``h`` in the algebra with ``exp(i h) = g``.

    Used for nonabelian algebras where logarithms of ``g`` need not be
    functions of ``g``. A success proves membership; a failure proves nothing.
    """
    from scipy.optimize import least_squares

    g = [np.asarray(u, dtype=complex) for u in g]
    mask = algebra.mask
    for b in range(len(g)):
        if b not in mask:
            c = proportional_to_identity(g[b], 1e-8)
            if c is None:
                return False
            g[mask[0]] = g[mask[0]] * c
            g[b] = np.eye(g[b].shape[0], dtype=complex)
    hs = [vector_to_tuple(v, algebra.block_dims) for v in algebra.basis]
    gens = [np.array([h[b] for h in hs]) for b in mask]

    def resid(x):
        out = []
        for b, gen in zip(mask, gens):
            m = scipy.linalg.expm(1j * np.tensordot(x, gen, axes=1)) - g[b]
            out.append(m.real.ravel())
            out.append(m.imag.ravel())
        return np.concatenate(out)

    logs = []
    for b in range(len(g)):
        vals, projs = _eigenspaces(g[b])
        logs.append(sum(np.angle(v) * p for v, p in zip(vals, projs)))
    x0 = algebra.basis @ tuple_to_vector(logs, algebra.block_dims)
    rng = np.random.default_rng(0)
    for k in range(starts):
        x = x0 if k == 0 else rng.normal(scale=np.pi, size=x0.size)
        sol = least_squares(resid, x, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
        if np.linalg.norm(sol.fun) < tol:
            return True
    return False


def _joint_eigenspaces(mats, tol=1e-7):
    """Joint eigenspace projectors of commuting Hermitian matrices."""
    d = mats[0].shape[0]
    coeffs = np.sqrt(np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37], dtype=float))
    combo = np.zeros((d, d), dtype=complex)
    for i, m in enumerate(mats):
        combo += coeffs[i % len(coeffs)] * (1 + i // len(coeffs)) * m
    w, v = np.linalg.eigh(combo)
    scale = max(1.0, float(np.max(np.abs(w))))
    groups = [[0]]
    for j in range(1, d):
        if abs(w[j] - w[groups[-1][-1]]) < tol * scale:
            groups[-1].append(j)
        else:
            groups.append([j])
    return [v[:, g] for g in groups]


def identity_component(g, algebra):
    """Certificate for membership of ``g`` in the identity component of the stabilizer.

    ``"inside"`` when a logarithm of ``g`` lies in the algebra (branch search,
    then a least-squares exponential fit for nonabelian algebras). For an abelian
    algebra ``"outside"`` when conjugation by ``g`` moves the algebra or ``g``
    is not scalar on some joint eigenspace of a block's projected algebra.
    Anything else is ``"unknown"``.
    """
    if _log_in_algebra(g, algebra):
        return "inside"
    if not _is_abelian(algebra):
        return "inside" if _exp_fit(g, algebra) else "unknown"
    bdims = algebra.block_dims
    for v in algebra.basis:
        if np.linalg.norm(_conj_vector(g, v, bdims) - v) > 1e-6:
            return "outside"
    for b in algebra.mask:
        mats = [np.eye(bdims[b], dtype=complex)]
        mats += [h for h in (vector_to_tuple(v, bdims)[b] for v in algebra.basis)
                 if np.linalg.norm(h) > 1e-12]
        for vecs in _joint_eigenspaces(mats):
            sub = vecs.conj().T @ g[b] @ vecs
            if proportional_to_identity(sub, 1e-8) is None:
                return "outside"
    for b in range(len(bdims)):
        if b not in algebra.mask and proportional_to_identity(g[b], 1e-8) is None:
            return "outside"
    return "unknown"


def _element_order(g, max_order=MAX_ORDER, tol=CHECK_TOL):
    powers = [np.eye(u.shape[0], dtype=complex) for u in g]
    for m in range(1, max_order + 1):
        powers = [p @ u for p, u in zip(powers, g)]
        if all(proportional_to_identity(p, tol) is not None for p in powers):
            return m
    return 0


def _check_candidate(candidate, bdims):
    if len(candidate) != len(bdims):
        raise errors.ShapeMismatchError(f"{len(candidate)} matrices for {len(bdims)} blocks")
    mats = []
    for b, (u, d) in enumerate(zip(candidate, bdims)):
        u = np.asarray(u, dtype=complex)
        if u.shape != (d, d):
            raise errors.ShapeMismatchError(f"block {b} needs a {d}x{d} matrix, got {u.shape}")
        if not is_unitary(u, 1e-10):
            raise errors.NonUnitaryError(f"matrix for block {b} is not unitary")
        mats.append(u)
    return tuple(mats)


def _verify(psi_t, g, algebra, tol=STABILIZER_TOL):
    psi = psi_t.reshape(-1)
    gpsi = _apply_tuple(psi_t, g, range(len(g))).reshape(-1)
    ov = np.vdot(psi, gpsi)
    theta = float(np.angle(ov)) % (2 * np.pi)
    if 2 * np.pi - theta < 1e-12:
        theta = 0.0
    resid = float(np.linalg.norm(gpsi - np.exp(1j * theta) * psi))
    if resid >= tol:
        raise errors.NotAStabilizerError(f"not a stabilizer: residual {resid:.3e}")
    bdims = algebra.block_dims
    normalizes = all(span_residual(_conj_vector(g, v, bdims), algebra.basis) < CHECK_TOL
                     for v in algebra.basis)
    return DiscreteStabilizer(
        matrices=tuple(g),
        phase=theta,
        order=_element_order(g),
        normalizes_algebra=bool(normalizes),
        identity_component=identity_component(g, algebra),
        residual=resid,
        mask=algebra.mask,
    )


def verify_discrete(state, partition, candidate, mask=None, tol=DEFAULT_RTOL, algebra=None):
    """Check that ``candidate`` stabilizes ``state`` and classify it.

    The algebra used for the normalizer flag and the identity-component
    certificate is the one supported on ``mask`` (default: all blocks).
    """
    partition = check_partition(partition, state.n_factors)
    psi_t = block_tensor(state, partition)
    g = _check_candidate(candidate, psi_t.shape)
    if algebra is None:
        algebra = stabilizer_algebra(state, partition, mask, tol)
    return _verify(psi_t, g, algebra)


def _frame(rho, hs):
    """Unitary whose columns adapt block ``b`` to the state.

    Joint eigenbasis of the reduced density matrix and the projected
    algebra when these commute, else the eigenbasis of ``rho`` alone;
    each column's largest entry is made real positive.
    """
    mats = [rho] + [h for h in hs if np.linalg.norm(h) > 1e-12]
    commuting = all(np.linalg.norm(commutator(a, b)) < 1e-9
                    for i, a in enumerate(mats) for b in mats[i + 1:])
    if commuting:
        v = np.hstack(_joint_eigenspaces(mats))
    else:
        _, v = np.linalg.eigh(rho)
    idx = np.argmax(np.abs(v), axis=0)
    ph = v[idx, np.arange(v.shape[1])]
    v = v * (np.abs(ph) / ph)
    # order by decreasing population, stable for ties
    pops = np.einsum("ij,ik,kj->j", v.conj(), rho, v).real
    return v[:, np.argsort(-pops, kind="stable")]


def _patterns(rho_diag, phases):
    """Monomial matrices that preserve the (diagonal) reduced density."""
    d = rho_diag.size
    scale = max(float(rho_diag.max()), 1e-300)
    out = []
    for perm in permutations(range(d)):
        if any(abs(rho_diag[perm[j]] - rho_diag[j]) > 1e-8 * scale for j in range(d)):
            continue
        p = np.zeros((d, d), dtype=complex)
        p[list(perm), list(range(d))] = 1.0
        for ph in product(phases, repeat=d - 1):
            out.append(p * np.array((1,) + ph))
    return out


def _solve_last(phi_m, psi_m, tol):
    """Unitary ``R`` with ``phi_m R^T = psi_m`` or ``None``."""
    g_phi = phi_m @ phi_m.conj().T
    g_psi = psi_m @ psi_m.conj().T
    if np.linalg.norm(g_phi - g_psi) > 1e-8:
        return None
    _, s, vh_phi = np.linalg.svd(phi_m)
    _, _, vh_psi = np.linalg.svd(psi_m)
    r = int(np.sum(s > 1e-10 * s[0]))
    rt = np.linalg.pinv(phi_m, rcond=1e-10) @ psi_m
    rt = rt + vh_phi[r:].conj().T @ vh_psi[r:]
    if np.linalg.norm(phi_m @ rt - psi_m) > tol:
        return None
    rmat = rt.T
    if not is_unitary(rmat, 1e-8):
        return None
    # polish onto the unitary group
    w, _, vh = np.linalg.svd(rmat)
    return w @ vh


def _same_coset(g, h, algebra):
    prod_ = tuple(a @ b.conj().T for a, b in zip(g, h))
    if all(proportional_to_identity(u, 1e-8) is not None for u in prod_):
        return True
    return identity_component(prod_, algebra) == "inside"


def search_discrete(state, partition=None, mask=None, budget=None, tol=DEFAULT_RTOL,
                    algebra=None):
    """Discrete stabilizers outside the identity component (hybrid monomial search).

    Blocks outside ``mask`` carry the identity. Returns one representative per
    coset found, each with certificate ``"outside"`` or ``"unknown"``.
    """
    budget = SearchBudget() if budget is None else budget
    partition = check_partition(partition, state.n_factors)
    mask = _mask(mask, partition.n_blocks)
    psi_t = block_tensor(state, partition)
    bdims = psi_t.shape
    if len(mask) < 2:
        return []
    big = [bdims[b] for b in mask if bdims[b] > budget.max_block_dim]
    if big:
        raise errors.SearchBudgetExceededError(
            f"block dimension {max(big)} exceeds the search guard {budget.max_block_dim}")
    if algebra is None:
        algebra = stabilizer_algebra(state, partition, mask, tol)

    frames = {}
    for b in mask:
        t = np.moveaxis(psi_t, b, 0).reshape(bdims[b], -1)
        rho = t @ t.conj().T
        hs = [vector_to_tuple(v, bdims)[b] for v in algebra.basis]
        frames[b] = _frame(rho, hs)
    psi_f = _apply_tuple(psi_t, {b: frames[b].conj().T for b in mask}, mask)
    pats = {}
    for b in mask:
        t = np.moveaxis(psi_f, b, 0).reshape(bdims[b], -1)
        pats[b] = _patterns(np.einsum("ij,ij->i", t, t.conj()).real, budget.phases)

    total = sum(math.prod(len(pats[b]) for b in mask if b != r) for r in mask)
    if total > budget.max_candidates:
        raise errors.SearchBudgetExceededError(
            f"{total} candidate patterns exceed the budget of {budget.max_candidates}")

    found = []
    ident = {b: np.eye(bdims[b], dtype=complex) for b in range(len(bdims))}
    for r in reversed(mask):
        free = [b for b in mask if b != r]
        psi_m = np.moveaxis(psi_f, r, -1).reshape(-1, bdims[r])
        for combo in product(*(pats[b] for b in free)):
            phi = psi_f
            for b, m in zip(free, combo):
                phi = apply_on_axis(phi, m, b)
            rmat = _solve_last(np.moveaxis(phi, r, -1).reshape(-1, bdims[r]), psi_m, 1e-9)
            if rmat is None:
                continue
            local = dict(zip(free, combo))
            local[r] = rmat
            g = []
            for b in range(len(bdims)):
                if b in local:
                    g.append(frames[b] @ local[b] @ frames[b].conj().T)
                else:
                    g.append(ident[b])
            try:
                cand = _verify(psi_t, tuple(g), algebra)
            except errors.NotAStabilizerError:
                continue
            if cand.identity_component == "inside":
                continue
            if any(_same_coset(cand.matrices, f.matrices, algebra) for f in found):
                continue
            found.append(cand)
    return found
