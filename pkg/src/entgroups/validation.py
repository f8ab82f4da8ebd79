"""Input coercion shared by the estimators and the command line."""

import numbers

import numpy as np

from . import errors
from .statecore import PureState, check_partition, make_state, state_from_dict

__all__ = ["check_state", "check_states", "check_partition", "check_tolerance", "check_rng",
           "check_dims"]


def check_dims(dims):
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError):
        raise errors.ValidationError(f"dims must be a sequence of integers, got {dims!r}") from None
    if not dims:
        raise errors.ValidationError("dims must be nonempty")
    return dims


def check_state(obj, dims=None, normalize=False):
    """Coerce ``obj`` to a :class:`PureState`.

    Accepts a state, a state dictionary, or a flat amplitude vector when
    ``dims`` is given.
    """
    if isinstance(obj, PureState):
        if dims is not None and tuple(obj.dims) != check_dims(dims):
            raise errors.DimensionMismatchError(f"expected dims {dims}, got {obj.dims}")
        return obj
    if isinstance(obj, dict):
        return state_from_dict(obj, normalize=normalize)
    if dims is None:
        raise errors.ValidationError("amplitude input needs dims")
    amps = np.asarray(obj, dtype=complex).reshape(-1)
    return make_state(check_dims(dims), amps, normalize=normalize)


def check_states(X, dims=None, normalize=False):
    """List of states from a sequence of states or a 2-D amplitude array."""
    if isinstance(X, PureState):
        X = [X]
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise errors.ShapeMismatchError("amplitude array must be 2-D (n_samples, dim)")
        return [check_state(row, dims, normalize) for row in X]
    try:
        items = list(X)
    except TypeError:
        raise errors.ValidationError("expected a sequence of states") from None
    if not items:
        raise errors.ValidationError("empty input")
    return [check_state(x, dims, normalize) for x in items]


def check_tolerance(tol, low=0.0, high=1e-4, name="tol"):
    if not isinstance(tol, numbers.Real) or not low < float(tol) < high:
        raise errors.ValidationError(f"{name}={tol!r} must lie in ({low}, {high})")
    return float(tol)


def check_rng(seed):
    """``numpy.random.Generator`` from ``None``, an int or a generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, numbers.Integral):
        return np.random.default_rng(seed)
    raise errors.ValidationError(f"cannot seed a generator from {seed!r}")
