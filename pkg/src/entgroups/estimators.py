"""scikit-learn style wrappers around the stabilizer and fingerprint code.

The estimators take pure states (or rows of a 2-D amplitude array plus a
``dims`` parameter) as samples. Fitted attributes end in an underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import errors
from .entclass import fingerprint
from .stabilizer import (DEFAULT_RTOL, AlgebraCache, SearchBudget, check_no_sharing,
                         entanglement_dim, full_entanglement_dim, isomorphism_dims,
                         search_discrete, stabilizer_algebra)
from .statecore import subsets
from .validation import check_partition, check_state, check_states, check_tolerance


def _key(t):
    return ",".join(str(b + 1) for b in t)


class StabilizerAnalyzer(BaseEstimator):
    """Stabilizer algebra, entanglement dimensions and checks for one state.

    Parameters
    ----------
    partition : str, Partition or None
        Block structure; ``None`` means one block per factor.
    tol : float
        Relative singular-value threshold for the nullspaces.
    discrete_search : bool
        Also run the monomial discrete-stabilizer search on the full mask.
    max_candidates : int
        Search budget.
    dims : tuple or None
        Factor dimensions when ``fit`` gets a raw amplitude vector.
    """

    def __init__(self, partition=None, tol=DEFAULT_RTOL, discrete_search=False,
                 max_candidates=200_000, dims=None):
        self.partition = partition
        self.tol = tol
        self.discrete_search = discrete_search
        self.max_candidates = max_candidates
        self.dims = dims

    def fit(self, X, y=None):
        tol = check_tolerance(self.tol)
        state = check_state(X, self.dims)
        part = check_partition(self.partition, state.n_factors)
        cache = AlgebraCache()
        nb = part.n_blocks
        self.state_ = state
        self.partition_ = part
        self.algebra_ = stabilizer_algebra(state, part, None, tol, cache=cache)
        self.dim_ = self.algebra_.dim
        self.gap_ = self.algebra_.gap
        self.mask_dims_ = {_key(m): stabilizer_algebra(state, part, m, tol, cache=cache).dim
                           for m in subsets(range(nb), 1)}
        self.entanglement_dims_ = {}
        self.isomorphism_ = {}
        self.no_sharing_ = []
        self.full_dim_ = None
        if nb >= 2:
            self.entanglement_dims_ = {_key(t): entanglement_dim(state, part, t, tol, cache)
                                       for t in subsets(range(nb), 2)}
            self.full_dim_ = full_entanglement_dim(state, part, tol, cache)
            self.isomorphism_ = {_key(p): list(isomorphism_dims(state, part, p, tol, cache))
                                 for p in subsets(range(nb), 2) if len(p) == 2}
        if nb >= 3:
            pairs = [p for p in subsets(range(nb), 2) if len(p) == 2]
            for i, p in enumerate(pairs):
                for q in pairs[i + 1:]:
                    if len(set(p) & set(q)) == 1:
                        self.no_sharing_.append(check_no_sharing(state, part, p, q, tol, cache=cache))
        self.discrete_ = []
        if self.discrete_search and nb >= 2:
            budget = SearchBudget(max_candidates=self.max_candidates)
            self.discrete_ = search_discrete(state, part, None, budget, tol, algebra=self.algebra_)
        return self

    def report(self):
        check_is_fitted(self, "algebra_")
        return {
            "partition": self.partition_.format(),
            "stabilizer_dim": self.dim_,
            "spectral_gap": [float(g) for g in self.gap_],
            "mask_dims": self.mask_dims_,
            "entanglement_dims": self.entanglement_dims_,
            "full_dim": self.full_dim_,
            "isomorphism": self.isomorphism_,
            "no_sharing": [r.to_dict() for r in self.no_sharing_],
            "discrete": [d.to_dict() for d in self.discrete_],
        }


def _features(fp):
    """Flatten a fingerprint into ``{name: int}``."""
    out = {}
    for part, rec in sorted(fp.records.items()):
        for sub, v in sorted(rec.get("dims", {}).items()):
            out[f"{part}:E[{sub}]"] = int(v)
        if "full_dim" in rec:
            out[f"{part}:F"] = int(rec["full_dim"])
        if "schmidt" in rec:
            out[f"{part}:schmidt_rank"] = int(sum(rec["schmidt"]))
            out[f"{part}:schmidt_levels"] = len(rec["schmidt"])
            out[f"{part}:schmidt_sq"] = int(sum(k * k for k in rec["schmidt"]))
        for sub, v in sorted(rec.get("discrete", {}).items()):
            out[f"{part}:D[{sub}]"] = -1 if v == "budget_exceeded" else len(v)
    return out


class EntanglementFingerprinter(BaseEstimator, TransformerMixin):
    """Integer LU-invariant features from the fingerprint of each state.

    ``fit`` fixes the feature names (they depend only on the number of
    factors); ``transform`` returns an ``(n_samples, n_features)`` int array.
    """

    def __init__(self, dims=None, max_blocks=None, tol=DEFAULT_RTOL, discrete=True):
        self.dims = dims
        self.max_blocks = max_blocks
        self.tol = tol
        self.discrete = discrete

    def _fingerprints(self, X):
        tol = check_tolerance(self.tol)
        return [fingerprint(s, self.max_blocks, tol, discrete=self.discrete)
                for s in check_states(X, self.dims)]

    def fit(self, X, y=None):
        fps = self._fingerprints(X)
        names = set()
        for fp in fps:
            names.update(_features(fp))
        self.feature_names_ = sorted(names)
        self.n_features_in_ = len(self.feature_names_)
        counts = {len(fp.dims) for fp in fps}
        if len(counts) != 1:
            raise errors.ShapeMismatchError("all samples must have the same number of factors")
        self.n_factors_ = counts.pop()
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_names_")
        fps = self._fingerprints(X)
        index = {n: i for i, n in enumerate(self.feature_names_)}
        out = np.zeros((len(fps), len(index)), dtype=np.int64)
        for r, fp in enumerate(fps):
            if len(fp.dims) != self.n_factors_:
                raise errors.ShapeMismatchError(
                    f"fitted on {self.n_factors_} factors, got {len(fp.dims)}")
            for name, v in _features(fp).items():
                if name in index:
                    out[r, index[name]] = v
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_")
        return np.array(self.feature_names_, dtype=object)


class EntanglementTypeClassifier(BaseEstimator, ClassifierMixin):
    """Label states by entanglement type.

    Exact fingerprint matches return the stored label; other states get the
    label of the nearest training fingerprint in L1 feature distance.
    """

    def __init__(self, dims=None, max_blocks=None, tol=DEFAULT_RTOL, discrete=True):
        self.dims = dims
        self.max_blocks = max_blocks
        self.tol = tol
        self.discrete = discrete

    def fit(self, X, y):
        states = check_states(X, self.dims)
        y = np.asarray(y)
        if y.shape[0] != len(states):
            raise errors.ShapeMismatchError("X and y have different lengths")
        self.fingerprinter_ = EntanglementFingerprinter(
            None, self.max_blocks, self.tol, self.discrete).fit(states)
        self.features_ = self.fingerprinter_.transform(states)
        self.labels_ = y
        self.classes_ = np.unique(y)
        return self

    def predict(self, X):
        check_is_fitted(self, "features_")
        feats = self.fingerprinter_.transform(check_states(X, self.dims))
        dist = np.abs(feats[:, None, :] - self.features_[None, :, :]).sum(axis=2)
        return self.labels_[np.argmin(dist, axis=1)]
