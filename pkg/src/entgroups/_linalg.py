"""Dense linear-algebra helpers shared by the stabilizer and algebra modules."""

from functools import lru_cache

import numpy as np
import scipy.linalg


@lru_cache(maxsize=None)
def hermitian_basis(d):
    """Orthonormal basis of d x d Hermitian matrices under ``Tr(A B)``.

    Order: diagonal units ``E_jj`` first, then for each ``j < k`` the symmetric
    ``(E_jk + E_kj)/sqrt 2`` followed by the antisymmetric ``i(E_jk - E_kj)/sqrt 2``.
    Returned array has shape ``(d*d, d, d)`` and must not be modified.
    """
    out = np.zeros((d * d, d, d), dtype=complex)
    for j in range(d):
        out[j, j, j] = 1.0
    p = d
    s = 1.0 / np.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            out[p, j, k] = out[p, k, j] = s
            out[p + 1, j, k] = 1j * s
            out[p + 1, k, j] = -1j * s
            p += 2
    out.setflags(write=False)
    return out


def hermitian_coords(h):
    """Real coordinates of a Hermitian matrix in :func:`hermitian_basis`."""
    basis = hermitian_basis(h.shape[0])
    return np.einsum("pij,ji->p", basis, h).real


def hermitian_from_coords(x, d):
    return np.einsum("p,pij->ij", np.asarray(x, dtype=float), hermitian_basis(d))


def nullspace(m, rtol):
    """Right nullspace of a real matrix by singular-value thresholding.

    Returns ``(basis, gap)`` where ``basis`` has orthonormal rows and ``gap`` is
    the pair (largest singular value treated as zero, smallest kept), both
    relative to the largest singular value.
    """
    m = np.atleast_2d(m)
    ncols = m.shape[1]
    if m.size == 0 or not np.any(m):
        return np.eye(ncols), (0.0, np.inf)
    # a complete V is only needed when there are fewer rows than columns
    _, s, vh = np.linalg.svd(m, full_matrices=m.shape[0] < ncols)
    smax = s[0]
    full = np.zeros(ncols)
    full[: len(s)] = s / smax
    keep = full >= rtol
    rank = int(keep.sum())
    dropped = full[~keep]
    gap = (float(dropped.max()) if dropped.size else 0.0,
           float(full[keep].min()) if rank else np.inf)
    return canonical_rows(vh[rank:]), gap


def canonical_rows(rows):
    """Deterministic orthonormal basis of the row span of ``rows``.

    The span's projector is reduced with column-pivoted QR, so the basis
    depends only on the subspace, not on the particular input vectors.
    """
    rows = np.atleast_2d(rows)
    k = rows.shape[0]
    if k == 0:
        return rows.reshape(0, rows.shape[1])
    proj = rows.T @ rows
    q, r, _ = scipy.linalg.qr(proj, pivoting=True)
    basis = q[:, :k].T
    # fix the sign so the largest-magnitude entry of each row is positive
    idx = np.argmax(np.abs(basis), axis=1)
    signs = np.sign(basis[np.arange(k), idx])
    signs[signs == 0] = 1.0
    return basis * signs[:, None]


def orthonormal_span(rows, rtol):
    """Orthonormal rows spanning ``rows`` with rank decided at ``rtol``."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] == 0 or not np.any(rows):
        return np.zeros((0, rows.shape[1]))
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s >= rtol * s[0]))
    return canonical_rows(vh[:rank])


def span_residual(vectors, basis):
    """Largest distance of the rows of ``vectors`` from span(``basis``).

    ``basis`` must have orthonormal rows.
    """
    vectors = np.atleast_2d(vectors)
    if vectors.shape[0] == 0:
        return 0.0
    if basis.shape[0] == 0:
        return float(np.max(np.linalg.norm(vectors, axis=1)))
    resid = vectors - (vectors @ basis.T) @ basis
    return float(np.max(np.linalg.norm(resid, axis=1)))


def commutator(a, b):
    return a @ b - b @ a


def is_unitary(u, atol):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2) < atol


def proportional_to_identity(u, atol):
    """Return the scalar ``c`` with ``u ~ c I`` within ``atol``, else ``None``."""
    c = np.trace(u) / u.shape[0]
    if np.linalg.norm(u - c * np.eye(u.shape[0]), 2) < atol:
        return c
    return None
