"""Lie algebra generated by the embedded reduced density matrices of a state.

Every reduced density matrix ``rho_S``, tensored with the identity on the
complement, is invariant under conjugation by local-unitary stabilizers. The
real Lie algebra they generate under ``i[., .]`` is therefore centralized by
the stabilizer algebra, and the local part of its centralizer can be compared
with the stabilizer algebra directly.

Operators are handled as Hermitian matrices on the block-ordered Hilbert
space of a partition, vectorized as ``[Re(h).ravel(), Im(h).ravel()]`` so the
Euclidean product is the trace inner product.
"""

from dataclasses import dataclass

import numpy as np

from . import errors
from ._linalg import commutator, hermitian_basis, nullspace, orthonormal_span, span_residual
from .stabilizer import DEFAULT_RTOL, stabilizer_algebra, vector_to_tuple
from .statecore import block_tensor, check_partition, subsets

MAX_TOTAL_DIM = 256


def _vec(h):
    return np.concatenate([h.real.ravel(), h.imag.ravel()])


def _unvec(v, d):
    half = d * d
    return (v[:half] + 1j * v[half:]).reshape(d, d)


@dataclass(frozen=True, eq=False)
class OperatorSpan:
    """Orthonormal Hermitian basis of a real operator space."""

    basis: np.ndarray  # (k, 2 D^2) vectorized
    size: int
    partition: object = None
    block_dims: tuple = ()
    closed: bool = False
    n_generators: int = None

    @property
    def dim(self):
        return int(self.basis.shape[0])

    def matrices(self):
        return np.array([_unvec(v, self.size) for v in self.basis]).reshape(-1, self.size, self.size)

    def contains(self, h, tol=1e-8):
        return span_residual(_vec(np.asarray(h, dtype=complex)), self.basis) < tol


def embed(op, axes, dims):
    """``op`` acting on tensor ``axes`` of a space with factor ``dims``, identity elsewhere."""
    axes = list(axes)
    rest = [k for k in range(len(dims)) if k not in axes]
    d_rest = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    perm = axes + rest
    shape = [dims[k] for k in perm]
    t = full.reshape(shape + shape)
    inv = np.argsort(perm)
    n = len(dims)
    t = t.transpose(list(inv) + [n + i for i in inv])
    D = int(np.prod(dims))
    return t.reshape(D, D)


def subset_density(psi_t, axes):
    axes = list(axes)
    rest = [k for k in range(psi_t.ndim) if k not in axes]
    m = psi_t.transpose(axes + rest).reshape(int(np.prod([psi_t.shape[k] for k in axes])), -1)
    return m @ m.conj().T


def dm_generators(state, partition=None, tol=DEFAULT_RTOL):
    """Span of ``rho_S (x) I`` over all nonempty unions ``S`` of partition blocks."""
    partition = check_partition(partition, state.n_factors)
    if state.dim > MAX_TOTAL_DIM:
        raise errors.ProblemTooLargeError(
            f"total dimension {state.dim} exceeds {MAX_TOTAL_DIM}")
    psi_t = block_tensor(state, partition)
    dims = psi_t.shape
    gens = []
    for s in subsets(range(len(dims)), 1):
        gens.append(_vec(embed(subset_density(psi_t, s), s, dims)))
    basis = orthonormal_span(np.array(gens), tol)
    return OperatorSpan(basis, state.dim, partition, tuple(dims), False, len(gens))


def _brackets(xs, ys, d):
    """Vectorized ``i[X, Y]`` for every pair of rows of ``xs`` and ``ys``."""
    a = np.array([_unvec(v, d) for v in xs])
    b = np.array([_unvec(v, d) for v in ys])
    br = 1j * (np.einsum("kij,ljm->klim", a, b) - np.einsum("lij,kjm->klim", b, a))
    br = br.reshape(-1, d, d)
    return np.concatenate([br.real.reshape(len(br), -1), br.imag.reshape(len(br), -1)], axis=1)


def lie_closure(gen, tol=DEFAULT_RTOL, max_dim=None):
    """Close ``gen`` under brackets ``i[A, B]`` and linear combinations."""
    d = gen.size
    max_dim = d * d if max_dim is None else int(max_dim)
    if max_dim > d * d:
        raise errors.ValidationError(f"max_dim {max_dim} exceeds D^2 = {d * d}")
    basis = gen.basis
    fresh = basis
    while fresh.shape[0] and basis.shape[0] < d * d:
        new = _brackets(fresh, basis, d)
        new = new[np.linalg.norm(new, axis=1) > tol]
        if not new.shape[0]:
            break
        grown = orthonormal_span(np.vstack([basis, new]), tol)
        if grown.shape[0] > max_dim:
            raise errors.MaxDimExceededError(
                f"closure dimension {grown.shape[0]} exceeds max_dim {max_dim}")
        if grown.shape[0] == basis.shape[0]:
            break
        # directions outside the current span
        resid = grown - (grown @ basis.T) @ basis
        fresh = orthonormal_span(resid, 1e-6)
        basis = grown
    return OperatorSpan(basis, d, gen.partition, gen.block_dims, True, gen.n_generators)


def bracket_closure_residual(span):
    """Largest distance of a basis bracket from the span."""
    if span.dim == 0:
        return 0.0
    br = _brackets(span.basis, span.basis, span.size)
    return span_residual(br, span.basis)


@dataclass(frozen=True, eq=False)
class CentralizerReport:
    basis: np.ndarray  # local parameter vectors, stabilizer-module layout
    stabilizer_dim: int
    local_in_stabilizer: float
    stabilizer_in_local: float
    commutation_residual: float
    tol: float

    @property
    def dim(self):
        return int(self.basis.shape[0])

    @property
    def equal(self):
        return self.local_in_stabilizer < self.tol and self.stabilizer_in_local < self.tol

    def to_dict(self):
        return {
            "centralizer_dim": self.dim,
            "stabilizer_dim": self.stabilizer_dim,
            "centralizer_in_stabilizer_residual": self.local_in_stabilizer,
            "stabilizer_in_centralizer_residual": self.stabilizer_in_local,
            "stabilizer_commutation_residual": self.commutation_residual,
            "equal": self.equal,
        }


def _local_operator(v, bdims):
    hs = vector_to_tuple(v, bdims)
    return sum(embed(h, [b], bdims) for b, h in enumerate(hs))


def centralizer_in_local(algebra, state, partition=None, tol=DEFAULT_RTOL, check_tol=1e-8):
    """Local Hermitian tuples whose embedded sum commutes with ``algebra``.

    Compared with the full-mask stabilizer algebra by mutual containment.
    """
    partition = check_partition(partition, state.n_factors)
    if algebra.partition is not None and algebra.partition != partition:
        raise errors.PartitionMismatchError("algebra was built on a different partition")
    bdims = partition.block_dims(state.dims)
    if algebra.size != state.dim:
        raise errors.ShapeMismatchError("operator size does not match the state")
    mats = algebra.matrices()
    cols = []
    for b, d in enumerate(bdims):
        for e in hermitian_basis(d):
            k = embed(e, [b], bdims)
            cols.append(np.concatenate([_vec(1j * commutator(k, a)) for a in mats]))
    m = np.array(cols).T
    local, _ = nullspace(m, tol)
    stab = stabilizer_algebra(state, partition, None, tol)
    comm = 0.0
    for v in stab.basis:
        lv = _local_operator(v, bdims)
        for a in mats:
            comm = max(comm, float(np.linalg.norm(commutator(lv, a))))
    return CentralizerReport(local, stab.dim, span_residual(local, stab.basis),
                             span_residual(stab.basis, local), comm, check_tol)


def dm_report(state, partition=None, tol=DEFAULT_RTOL):
    gen = dm_generators(state, partition, tol)
    alg = lie_closure(gen, tol)
    cen = centralizer_in_local(alg, state, partition, tol)
    out = {"generators": gen.n_generators, "generator_span_dim": gen.dim,
           "closure_dim": alg.dim, "closure_residual": bracket_closure_residual(alg)}
    out.update(cen.to_dict())
    return out
