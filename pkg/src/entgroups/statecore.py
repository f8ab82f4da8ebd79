"""Pure states on tensor-product spaces, partitions, gates and named states.

Amplitude indexing is row-major with factor 0 most significant, so the
amplitude of ``|i_0 i_1 ... i_{N-1}>`` sits at
``((i_0 * d_1 + i_1) * d_2 + i_2) ...``; this is exactly ``numpy.reshape``
to ``dims``. Factor indices are 0-based throughout the library; the CLI and
the partition string syntax (``"1,2|3"``) are 1-based.
"""

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import errors
from ._linalg import is_unitary

NORM_TOL = 1e-12
INPUT_NORM_TOL = 1e-6
MAX_FACTOR_DIM = 64


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in ``C^{d_1} x ... x C^{d_N}``.

    Use :func:`make_state` to construct; the constructor only validates.
    """

    dims: tuple
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise errors.DimensionMismatchError("at least one tensor factor is required")
        for d in dims:
            if d < 2:
                raise errors.DimensionMismatchError(f"factor dimension {d} < 2")
            if d > MAX_FACTOR_DIM:
                raise errors.DimensionMismatchError(
                    f"factor dimension {d} exceeds the supported maximum {MAX_FACTOR_DIM}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise errors.DimensionMismatchError(
                f"{amps.size} amplitudes for dims {list(dims)} (expected {math.prod(dims)})")
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise errors.NotNormalizableError("PureState amplitudes must have unit norm")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def n_factors(self):
        return len(self.dims)

    @property
    def dim(self):
        return self.amps.size

    def tensor(self):
        return self.amps.reshape(self.dims)

    def overlap(self, other):
        return complex(np.vdot(self.amps, other.amps))

    def __repr__(self):
        return f"PureState(dims={list(self.dims)})"


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint blocks of 0-based factor indices covering ``range(n)``."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise errors.InvalidPartitionError("partition blocks must be nonempty")
        flat = [i for b in blocks for i in b]
        if len(set(flat)) != len(flat):
            raise errors.InvalidPartitionError(f"overlapping blocks in {blocks}")
        if sorted(flat) != list(range(len(flat))):
            raise errors.InvalidPartitionError(
                f"blocks {blocks} do not cover factors 0..{len(flat) - 1}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def singletons(cls, n):
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def parse(cls, text):
        """Parse the 1-based syntax ``"1,2|3"``."""
        try:
            blocks = [[int(tok) - 1 for tok in part.split(",")]
                      for part in text.replace(" ", "").split("|")]
        except ValueError as exc:
            raise errors.InvalidPartitionError(f"cannot parse partition {text!r}") from exc
        return cls(tuple(blocks))

    @property
    def n_factors(self):
        return sum(len(b) for b in self.blocks)

    @property
    def n_blocks(self):
        return len(self.blocks)

    def canonical(self):
        """Same partition with blocks ordered by least element."""
        return Partition(tuple(sorted(self.blocks, key=lambda b: b[0])))

    def block_dims(self, dims):
        return tuple(math.prod(dims[i] for i in b) for b in self.blocks)

    def order(self):
        """Factor permutation that makes the blocks contiguous."""
        return [i for b in self.blocks for i in b]

    def format(self):
        return "|".join(",".join(str(i + 1) for i in b) for b in self.blocks)

    def __str__(self):
        return self.format()


def check_partition(partition, n_factors):
    if partition is None:
        return Partition.singletons(n_factors)
    if isinstance(partition, str):
        partition = Partition.parse(partition)
    elif not isinstance(partition, Partition):
        partition = Partition(tuple(partition))
    if partition.n_factors != n_factors:
        raise errors.InvalidPartitionError(
            f"partition {partition} covers {partition.n_factors} factors, state has {n_factors}")
    return partition


# ---------------------------------------------------------------- construction

def make_state(dims, amps, normalize=False):
    """Build a :class:`PureState`.

    Inputs further than ``1e-6`` from unit norm are rejected unless
    ``normalize`` is set; smaller drift is silently renormalized.
    """
    dims = tuple(int(d) for d in dims)
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    if amps.size != math.prod(dims):
        raise errors.DimensionMismatchError(
            f"{amps.size} amplitudes for dims {list(dims)} (expected {math.prod(dims)})")
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise errors.ZeroVectorError("state vector is zero")
    if not normalize and abs(norm - 1.0) > INPUT_NORM_TOL:
        raise errors.NotNormalizableError(
            f"state norm {norm:.9g} deviates from 1; pass normalize=True to rescale")
    return PureState(dims, amps / norm)


def basis_state(dims, digits):
    dims = tuple(dims)
    amps = np.zeros(math.prod(dims), dtype=complex)
    amps[np.ravel_multi_index(tuple(digits), dims)] = 1.0
    return PureState(dims, amps)


def product_state(*vectors):
    amps = np.array([1.0 + 0j])
    for v in vectors:
        amps = np.kron(amps, np.asarray(v, dtype=complex))
    return make_state([len(v) for v in vectors], amps, normalize=True)


def random_state(dims, rng):
    """Haar-random pure state; ``rng`` is a :class:`numpy.random.Generator`."""
    n = math.prod(dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return make_state(dims, z, normalize=True)


def random_unitary(d, rng):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_local_unitary(dims, rng):
    return tuple(random_unitary(d, rng) for d in dims)


# ---------------------------------------------------------------- tensor moves

def block_tensor(state, partition):
    """Amplitudes as an array with one axis per partition block."""
    partition = check_partition(partition, state.n_factors)
    t = state.tensor().transpose(partition.order())
    return t.reshape(partition.block_dims(state.dims))


def from_block_tensor(tensor, dims, partition):
    """Inverse of :func:`block_tensor`; returns a flat amplitude vector."""
    order = partition.order()
    t = np.asarray(tensor).reshape([dims[i] for i in order])
    return t.transpose(np.argsort(order)).reshape(-1)


def coarse_grain(state, partition):
    """Regard each block as a single factor (block-major amplitude order)."""
    partition = check_partition(partition, state.n_factors)
    t = block_tensor(state, partition)
    return PureState(t.shape, t.reshape(-1))


def apply_on_axis(tensor, op, axis):
    """Apply the matrix ``op`` to one axis of ``tensor``."""
    out = np.tensordot(op, tensor, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def apply_local(state, u, partition=None, unitary_tol=1e-10):
    """Apply ``u_1 x ... x u_k`` (one matrix per block); returns a new state."""
    partition = check_partition(partition, state.n_factors)
    bdims = partition.block_dims(state.dims)
    if len(u) != len(bdims):
        raise errors.ShapeMismatchError(f"{len(u)} matrices for {len(bdims)} blocks")
    t = block_tensor(state, partition)
    for axis, (ub, d) in enumerate(zip(u, bdims)):
        ub = np.asarray(ub, dtype=complex)
        if ub.shape != (d, d):
            raise errors.ShapeMismatchError(f"block {axis} needs a {d}x{d} matrix, got {ub.shape}")
        if not is_unitary(ub, unitary_tol):
            raise errors.NonUnitaryError(f"matrix for block {axis} is not unitary")
        t = apply_on_axis(t, ub, axis)
    amps = from_block_tensor(t, state.dims, partition)
    return PureState(state.dims, amps / np.linalg.norm(amps))


def apply_operator(state, op, factors):
    """Apply a (not necessarily unitary) operator on the listed factors, unnormalized."""
    factors = list(factors)
    t = state.tensor()
    rest = [i for i in range(state.n_factors) if i not in factors]
    t = t.transpose(factors + rest)
    sub = math.prod(state.dims[i] for i in factors)
    m = np.asarray(op, dtype=complex) @ t.reshape(sub, -1)
    m = m.reshape([state.dims[i] for i in factors + rest])
    return m.transpose(np.argsort(factors + rest)).reshape(-1)


def reduced_density(state, subset):
    """Reduced density matrix on ``subset`` (factor order ascending)."""
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise errors.EmptySubsetError("subset must be nonempty")
    if subset[0] < 0 or subset[-1] >= state.n_factors:
        raise errors.EmptySubsetError(f"subset {subset} is outside 0..{state.n_factors - 1}")
    rest = [i for i in range(state.n_factors) if i not in subset]
    t = state.tensor().transpose(subset + rest)
    m = t.reshape(math.prod(state.dims[i] for i in subset), -1)
    rho = m @ m.conj().T
    return (rho + rho.conj().T) / 2


def subsets(items, min_size=1):
    items = list(items)
    for k in range(min_size, len(items) + 1):
        yield from combinations(items, k)


# ---------------------------------------------------------------- gates

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = (Z + X) / np.sqrt(2)
# control on the first listed qubit
CNOT12 = 0.5 * (np.kron(Z, I2) + np.kron(I2, I2) + np.kron(I2, X) - np.kron(Z, X))
CNOT13 = 0.5 * (np.kron(np.kron(Z, I2), I2) + np.eye(8)
                + np.kron(np.kron(I2, I2), X) - np.kron(np.kron(Z, I2), X))
BELL = np.array([
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [0, 1, 1, 0],
    [0, 1, -1, 0],
], dtype=complex) / np.sqrt(2)
for _g in (I2, X, Y, Z, H, CNOT12, CNOT13, BELL):
    _g.setflags(write=False)


def kron_all(*ops):
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


# ---------------------------------------------------------------- named states

def _bits(value, n):
    if isinstance(value, str):
        value = value.strip()
        if len(value) != n or set(value) - {"0", "1"}:
            raise errors.MissingParamError(f"bit string {value!r} must have {n} binary digits")
        return int(value, 2)
    value = int(round(float(np.real(value))))
    if not 0 <= value < 2**n:
        raise errors.MissingParamError(f"bit value {value} out of range for n={n}")
    return value


def _amplitudes(dims, terms):
    amps = np.zeros(math.prod(dims), dtype=complex)
    for digits, coeff in terms:
        amps[np.ravel_multi_index(tuple(digits), dims)] += coeff
    return amps


def _require(params, keys, defaults=None):
    defaults = defaults or {}
    out = []
    for k in keys:
        if k in params:
            out.append(params[k])
        elif k in defaults:
            out.append(defaults[k])
        else:
            raise errors.MissingParamError(f"missing parameter {k!r}")
    return out


def _as_number(v):
    if isinstance(v, str):
        v = complex(v.replace(" ", ""))
    v = complex(v)
    return v.real if v.imag == 0 else v


_R3 = 1 / np.sqrt(3)


def _state_zero(p):
    (n,) = _require(p, ["n"], {"n": 3})
    n = int(n)
    return (2,) * n, [((0,) * n, 1.0)]


def _state_two_qubit(p):
    a, b = _require(p, ["a", "b"])
    return (2, 2), [((0, 0), a), ((1, 1), b)]


def _state_bell(p):
    (k,) = _require(p, ["k"], {"k": 1})
    k = int(k)
    if k not in (1, 2, 3, 4):
        raise errors.MissingParamError("bell index k must be 1..4")
    return (2, 2), [((i >> 1, i & 1), c) for i, c in enumerate(BELL[k - 1])]


def _state_bell_zero(p):
    s = 1 / np.sqrt(2)
    return (2, 2, 2), [((0, 0, 0), s), ((1, 1, 0), s)]


def _state_ghz(p):
    s = 1 / np.sqrt(2)
    return (2, 2, 2), [((0, 0, 0), s), ((1, 1, 1), s)]


def _state_ghz_general(p):
    a, b = _require(p, ["a", "b"])
    return (2, 2, 2), [((0, 0, 0), a), ((1, 1, 1), b)]


def _state_w(p):
    a, c, d = _require(p, ["a", "c", "d"], {"a": _R3, "c": _R3, "d": _R3})
    return (2, 2, 2), [((0, 0, 0), a), ((1, 0, 1), c), ((1, 1, 0), d)]


def _state_ace(p):
    a, c, e = _require(p, ["a", "c", "e"])
    return (2, 2, 2), [((0, 0, 0), a), ((1, 0, 1), c), ((1, 1, 1), e)]


def _state_generic3(p):
    a, b, c, d, e, phi = _require(p, ["a", "b", "c", "d", "e", "phi"])
    return (2, 2, 2), [((0, 0, 0), a), ((1, 0, 0), b * np.exp(1j * float(np.real(phi)))),
                       ((1, 0, 1), c), ((1, 1, 0), d), ((1, 1, 1), e)]


def _state_qubit_qu4it_qubit(p):
    a, b = _require(p, ["a", "b"])
    return (2, 4, 2), [((0, 0, 0), a), ((1, 1, 0), a), ((0, 2, 1), b), ((1, 3, 1), b)]


def _state_simon(p):
    n, x0, xi = _require(p, ["n", "x0", "xi"])
    n = int(n)
    x0, xi = _bits(x0, n), _bits(xi, n)
    if xi == 0:
        raise errors.MissingParamError("xi must be nonzero")
    s = 1 / np.sqrt(2)
    digits = lambda v: tuple((v >> (n - 1 - i)) & 1 for i in range(n))
    return (2,) * n, [(digits(x0), s), (digits(x0 ^ xi), s)]


NAMED_STATES = {
    "zero": _state_zero,
    "two_qubit": _state_two_qubit,
    "bell": _state_bell,
    "bell_zero": _state_bell_zero,
    "ghz": _state_ghz,
    "ghz_general": _state_ghz_general,
    "w": _state_w,
    "ace": _state_ace,
    "generic3": _state_generic3,
    "qubit_qu4it_qubit": _state_qubit_qu4it_qubit,
    "simon": _state_simon,
}


def named_state(name, params=None):
    """State from the library of named examples.

    Parameters are used as given: the resulting vector must already have
    unit norm within ``1e-6`` or :class:`~entgroups.errors.NotNormalizableError`
    is raised.

    ============== ================================== =====================
    name           state                              params
    ============== ================================== =====================
    zero           ``|0...0>``                        n (default 3)
    two_qubit      ``a|00> + b|11>``                  a, b
    bell           Bell state k                       k (default 1)
    bell_zero      ``(|00>+|11>)|0>/sqrt2``           --
    ghz            ``(|000>+|111>)/sqrt2``            --
    ghz_general    ``a|000> + b|111>``                a, b
    w              ``a|000> + c|101> + d|110>``       a, c, d (default 1/sqrt3)
    ace            ``a|000> + c|101> + e|111>``       a, c, e
    generic3       five-term three-qubit normal form  a, b, c, d, e, phi
    qubit_qu4it_qubit  qubit x qu4it x qubit example  a, b
    simon          ``(|x0> + |x0 ^ xi>)/sqrt2``       n, x0, xi
    ============== ================================== =====================
    """
    if name not in NAMED_STATES:
        raise errors.UnknownNameError(
            f"unknown state {name!r}; choose from {', '.join(sorted(NAMED_STATES))}")
    params = {} if params is None else dict(params)
    raw = {}
    for k, v in params.items():
        raw[k] = v if (k in ("x0", "xi") and isinstance(v, str)) else _as_number(v)
    dims, terms = NAMED_STATES[name](raw)
    amps = _amplitudes(dims, terms)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise errors.ZeroVectorError(f"parameters {params} give the zero vector")
    if abs(norm - 1.0) > INPUT_NORM_TOL:
        raise errors.NotNormalizableError(
            f"{name} with parameters {params} has norm {norm:.9g}, not 1")
    return PureState(dims, amps / norm)


# ---------------------------------------------------------------- file I/O

def state_to_dict(state):
    return {
        "dims": list(state.dims),
        "amps_re": [float(v) for v in state.amps.real],
        "amps_im": [float(v) for v in state.amps.imag],
    }


def state_from_dict(obj, normalize=False):
    try:
        dims = [int(d) for d in obj["dims"]]
        re = np.asarray(obj["amps_re"], dtype=float)
        im = np.asarray(obj.get("amps_im", [0.0] * len(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.DimensionMismatchError(f"malformed state object: {exc}") from exc
    if re.shape != im.shape:
        raise errors.DimensionMismatchError("amps_re and amps_im differ in length")
    return make_state(dims, re + 1j * im, normalize=normalize)


def write_state(state, path):
    from ._jsonio import dumps_canonical

    with open(path, "w") as fh:
        fh.write(dumps_canonical(state_to_dict(state)))
        fh.write("\n")


def read_state(path, normalize=False):
    with open(path) as fh:
        return state_from_dict(json.load(fh), normalize=normalize)
