"""Statevector demonstrations of protocols that run on local-unitary invariance.

Dense coding, teleportation, entanglement swapping, a CHSH family built from
the ``Z x Z`` stabilizer, and Simon's period finding. Every random choice
goes through a ``numpy.random.Generator`` passed in by the caller.
"""

from dataclasses import dataclass

import numpy as np

from . import errors
from .statecore import (BELL, CNOT12, CNOT13, H, I2, X, Y, Z, PureState, apply_operator,
                        kron_all, make_state, named_state)
from .stabilizer import verify_discrete

NORM_TOL = 1e-10
ZERO_PROB = 1e-14


@dataclass(frozen=True)
class MeasurementRecord:
    observable: str
    outcome: object
    probability: float
    post_state: np.ndarray


def _check_pair(a, b, real=False):
    a, b = (float(a), float(b)) if real else (complex(a), complex(b))
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > NORM_TOL:
        raise errors.NotNormalizedError(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2}, not 1")
    return a, b


# ---------------------------------------------------------------- dense coding

DENSE_OPS = (I2, X, Y, X @ Y)
DENSE_LABELS = ("I", "X", "Y", "XY")


def superdense_encode(a, b, msg):
    """Message ``msg`` (0..3) encoded by acting on qubit 1 of ``a|00> + b|11>``."""
    a, b = _check_pair(a, b, real=True)
    if not a >= b >= 0:
        raise errors.ValidationError("need a >= b >= 0")
    if msg not in (0, 1, 2, 3):
        raise errors.ValidationError(f"message {msg!r} not in 0..3")
    psi = named_state("two_qubit", {"a": a, "b": b})
    amps = apply_operator(psi, DENSE_OPS[msg], [0])
    return PureState((2, 2), amps)


def superdense_gram(a, b):
    states = np.array([superdense_encode(a, b, m).amps for m in range(4)])
    return states.conj() @ states.T


def helstrom(overlap):
    """Optimal success probability for two equiprobable pure states."""
    return 0.5 * (1 + np.sqrt(max(0.0, 1 - abs(overlap) ** 2)))


def superdense_success(a, b):
    """Optimal probability of identifying the message, equiprobable messages.

    The encoded states split into two orthogonal pairs ({0, 3} on span
    ``|00>, |11>`` and {1, 2} on span ``|01>, |10>``), so the optimum is the
    mean of the two pairwise Helstrom values, which equals ``(1 + 2ab)/2``.
    """
    g = superdense_gram(a, b)
    return 0.5 * (helstrom(g[0, 3]) + helstrom(g[1, 2]))


# ---------------------------------------------------------------- teleportation

CORRECTIONS = {(0, 0): ("I", I2), (0, 1): ("X", X), (1, 0): ("Z", Z), (1, 1): ("ZX", Z @ X)}


def _bit(outcome):
    if outcome not in (1, -1):
        raise errors.ValidationError(f"outcome {outcome!r} must be +1 or -1")
    return 0 if outcome == 1 else 1


def measure_z(psi, n, qubits, bits):
    """Project qubits (0-based) of an ``n``-qubit vector onto ``Z`` outcomes ``bits``.

    Returns the normalized state of the unmeasured qubits.
    """
    t = np.asarray(psi).reshape((2,) * n)
    index = [slice(None)] * n
    for q, bit in zip(qubits, bits):
        index[q] = bit
    vec = t[tuple(index)].reshape(-1)
    prob = float(np.vdot(vec, vec).real)
    if prob < ZERO_PROB:
        raise errors.ZeroProbabilityOutcomeError(f"outcome {bits} has probability {prob:.3e}")
    label = "".join(f"Z{q + 1}" for q in qubits)
    outcome = tuple(1 - 2 * b for b in bits)
    return MeasurementRecord(label, outcome, prob, vec / np.sqrt(prob))


def teleport_circuit_state(a, b):
    """``H_1 CNOT_12`` applied to ``(a|0> + b|1>) (x) phi_1``; qubits 1, 2, 3."""
    a, b = _check_pair(a, b)
    psi = np.kron(np.array([a, b]), BELL[0])
    psi = np.kron(CNOT12, I2) @ psi
    return np.kron(H, np.eye(4)) @ psi


def teleport(a, b, measure_pair=(1, 3), outcome=(1, 1)):
    """Measure ``Z`` on ``measure_pair`` (1-based) and correct the remaining qubit.

    Returns a dict with the residual qubit state, the correction from
    ``I, X, Z, ZX`` and the fidelity with ``a|0> + b|1>`` after correcting.
    """
    a, b = _check_pair(a, b)
    pair = tuple(measure_pair)
    if pair not in ((1, 3), (1, 2)):
        raise errors.ValidationError(f"measure_pair must be (1, 3) or (1, 2), got {pair}")
    bits = (_bit(outcome[0]), _bit(outcome[1]))
    remaining = 2 if pair == (1, 3) else 3
    rec = measure_z(teleport_circuit_state(a, b), 3, [q - 1 for q in pair], bits)
    vec = rec.post_state
    prob = rec.probability
    name, corr = CORRECTIONS[bits]
    fixed = corr @ vec
    target = np.array([a, b])
    return {
        "measure_pair": list(pair),
        "outcome": list(outcome),
        "bits": "".join(map(str, bits)),
        "remaining_qubit": remaining,
        "probability": prob,
        "state": vec,
        "correction": name,
        "corrected_state": fixed,
        "fidelity": float(abs(np.vdot(target, fixed)) ** 2),
    }


def teleport_table(a, b, measure_pair=(1, 3)):
    """All four outcomes in the order 00, 01, 10, 11."""
    return [teleport(a, b, measure_pair, (1 - 2 * i, 1 - 2 * j)) for i in (0, 1) for j in (0, 1)]


def cnot_equivalence_check(a, b, middle=None):
    """``||CNOT_12 psi_0 - CNOT_13 psi_0||`` with ``psi_0 = (a|0> + b|1>) (x) middle``.

    ``middle`` defaults to the Bell state ``phi_1``; pass ``[1, 0, 0, 0]``
    for the product control case.
    """
    a, b = _check_pair(a, b)
    middle = BELL[0] if middle is None else np.asarray(middle, dtype=complex)
    psi = np.kron(np.array([a, b]), middle)
    return float(np.linalg.norm(np.kron(CNOT12, I2) @ psi - CNOT13 @ psi))


# ---------------------------------------------------------------- swapping

def entanglement_swap():
    """``a_kl = <phi_k|_14 <phi_l|_23 (phi_1)_12 (phi_1)_34``."""
    phi = BELL.reshape(4, 2, 2)
    psi = np.einsum("ab,cd->abcd", phi[0], phi[0])  # axes q1 q2 q3 q4
    return np.einsum("kad,lbc,abcd->kl", phi.conj(), phi.conj(), psi)


def swap_stabilizer_eigenvalues():
    """Eigenvalues of the swap input under ``XXXX`` and ``ZZZZ``."""
    psi = np.kron(BELL[0], BELL[0])
    out = {}
    for name, p in (("XXXX", X), ("ZZZZ", Z)):
        op = kron_all(p, p, p, p)
        out[name] = float(np.vdot(psi, op @ psi).real)
        out[name + "_residual"] = float(np.linalg.norm(op @ psi - out[name] * psi))
    return out


# ---------------------------------------------------------------- CHSH

def chsh_operators(epsilon):
    e = float(epsilon)
    norm = np.sqrt(1 + e * e)
    a, a2 = Z, X
    b, b2 = (Z + e * X) / norm, (Z - e * X) / norm
    return np.kron(a, b) + np.kron(a, b2) + np.kron(a2, b) - np.kron(a2, b2)


def chsh_value(p1, p2, epsilon):
    """``|<ab + ab' + a'b - a'b'>|`` on ``p1|00> + p2|11>`` by direct contraction."""
    p1, p2 = _check_pair(p1, p2, real=True)
    if not p1 >= p2 >= 0:
        raise errors.ValidationError("need p1 >= p2 >= 0")
    psi = np.array([p1, 0, 0, p2], dtype=complex)
    zz = np.vdot(psi, np.kron(Z, Z) @ psi).real
    xx = np.vdot(psi, np.kron(X, X) @ psi).real
    if abs(zz - 1) > 1e-12 or abs(xx - 2 * p1 * p2) > 1e-12:
        raise errors.CheckFailed("stabilizer expectations off", counterexample=(zz, xx))
    return float(abs(np.vdot(psi, chsh_operators(epsilon) @ psi)))


def chsh_closed_form(p1, p2, epsilon):
    return 2 * abs(1 + epsilon * 2 * p1 * p2) / np.sqrt(1 + epsilon ** 2)


# ---------------------------------------------------------------- Simon

def dot2(x, y):
    return bin(x & y).count("1") & 1


def bits_to_str(x, n):
    return format(x, f"0{n}b")


@dataclass(frozen=True)
class SimonInstance:
    n: int
    xi: int
    table: tuple
    seed: int = None

    def __post_init__(self):
        n = self.n
        if not 1 <= n <= 6:
            raise errors.InvalidInstanceError(f"width {n} outside 1..6")
        if not 0 < self.xi < 2 ** n:
            raise errors.InvalidInstanceError("xi must be a nonzero n-bit string")
        if len(self.table) != 2 ** n:
            raise errors.InvalidInstanceError("function table has the wrong length")
        for x in range(2 ** n):
            for y in range(2 ** n):
                if (self.table[x] == self.table[y]) != (y in (x, x ^ self.xi)):
                    raise errors.InvalidInstanceError(
                        f"f({x}) = f({y}) contradicts period {self.xi}")


def make_simon_instance(n, xi, seed=0):
    """Random 2:1 function with period ``xi``; ``xi`` is an int or bit string."""
    if isinstance(xi, str):
        xi = int(xi, 2)
    rng = np.random.default_rng(seed)
    n = int(n)
    reps = [x for x in range(2 ** n) if x < (x ^ xi)]
    values = rng.permutation(2 ** n)[:len(reps)]
    table = [0] * (2 ** n)
    for x, v in zip(reps, values):
        table[x] = table[x ^ xi] = int(v)
    return SimonInstance(n, int(xi), tuple(table), seed)


def gf2_nullspace(rows, n):
    """Basis (as ints) of ``{x : r . x = 0 for all rows r}`` over GF(2)."""
    pivots = {}  # pivot bit -> row
    for r in rows:
        r = int(r)
        for bit in sorted(pivots, reverse=True):
            if r >> bit & 1:
                r ^= pivots[bit]
        if r:
            top = r.bit_length() - 1
            for bit in list(pivots):
                if pivots[bit] >> top & 1:
                    pivots[bit] ^= r
            pivots[top] = r
    free = [b for b in range(n) if b not in pivots]
    basis = []
    for f in free:
        x = 1 << f
        for bit, r in pivots.items():
            if r >> f & 1:
                x |= 1 << bit
        basis.append(x)
    return basis


def gf2_rank(rows, n):
    return n - len(gf2_nullspace(rows, n))


def _hadamard_n(n):
    return kron_all(*([H] * n))


def simon_sample(inst, rng):
    """One run of the circuit; returns ``(z, x0 coset, probability of z)``."""
    n = inst.n
    size = 2 ** n
    psi = np.zeros((size, size), dtype=complex)
    psi[0, 0] = 1.0
    psi = _hadamard_n(n) @ psi
    out = np.zeros_like(psi)
    for x in range(size):
        out[x, :] = psi[x, np.arange(size) ^ inst.table[x]]
    psi = out
    p_y = np.sum(np.abs(psi) ** 2, axis=0)
    y = int(rng.choice(size, p=p_y / p_y.sum()))
    reg = psi[:, y] / np.sqrt(p_y[y])
    reg = _hadamard_n(n) @ reg
    p_z = np.abs(reg) ** 2
    z = int(rng.choice(size, p=p_z / p_z.sum()))
    return z, y, float(p_z[z])


def simon_run(inst, shots_budget=None, rng=None, seed=None):
    """Repeat the circuit until the samples pin down ``xi`` (rank ``n - 1``)."""
    n = inst.n
    budget = 4 * n * n if shots_budget is None else int(shots_budget)
    if budget < 1:
        raise errors.ValidationError("shots budget must be positive")
    rng = np.random.default_rng(inst.seed if seed is None else seed) if rng is None else rng
    samples = []
    for k in range(1, budget + 1):
        z, _, _ = simon_sample(inst, rng)
        samples.append(z)
        null = gf2_nullspace(samples, n)
        if len(null) == 1:
            return {"xi": null[0], "xi_bits": bits_to_str(null[0], n),
                    "samples": samples, "repetitions": k}
    raise errors.InsufficientRankError(
        f"{budget} samples did not determine xi (null space dim {len(null)})")


def _string(n, support, op):
    return tuple(op if (support >> (n - 1 - i)) & 1 else I2 for i in range(n))


def simon_stabilizer_check(x0, xi, n=None, support=None):
    """X-string and Z-string stabilizers of ``|x0> + |x0 + xi>``.

    ``support`` selects the qubits carrying ``X`` (default: the ones of
    ``xi``), which gives the negative control when it differs from ``xi``.
    """
    if isinstance(xi, str):
        n = len(xi) if n is None else n
        xi = int(xi, 2)
    if isinstance(x0, str):
        n = len(x0) if n is None else n
        x0 = int(x0, 2)
    if n is None:
        n = max(int(xi).bit_length(), int(x0).bit_length(), 1)
    if xi == 0:
        raise errors.InvalidInstanceError("xi must be nonzero")
    support = xi if support is None else (int(support, 2) if isinstance(support, str) else support)
    state = named_state("simon", {"n": n, "x0": x0, "xi": xi})
    xs = _string(n, support, X)
    gx = kron_all(*xs) @ state.amps
    x_eig = complex(np.vdot(state.amps, gx))
    x_ok = bool(np.linalg.norm(gx - state.amps) < 1e-12)
    hstate = make_state(state.dims, _hadamard_n(n) @ state.amps)
    zs = _string(n, support, Z)
    gz = kron_all(*zs) @ hstate.amps
    z_ok = bool(np.linalg.norm(gz - hstate.amps) < 1e-12)
    try:
        d = verify_discrete(state, None, xs)
        cross = {"stabilizer": True, "phase": d.phase, "order": d.order}
    except errors.NotAStabilizerError:
        cross = {"stabilizer": False}
    return {
        "n": n,
        "x0": bits_to_str(x0, n),
        "xi": bits_to_str(xi, n),
        "support": bits_to_str(support, n),
        "x_string_stabilizes": x_ok,
        "x_eigenvalue": float(x_eig.real),
        "z_string_stabilizes_after_hadamard": z_ok,
        "verify_discrete": cross,
    }
