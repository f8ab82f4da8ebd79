"""Subgroups of direct products of finite groups and their Goursat data.

Factor groups are explicit multiplication tables. Elements of a product are
integer tuples (one table index per factor), stored as rows of an integer
array and addressed by a mixed-radix code so that set operations reduce to
sorted-array lookups.

For ``G`` inside ``A x B (x C)`` the slice subgroups ``S_T`` (identity off
``T``), their products ``N`` and the projections ``G_X``, ``N_X`` give
quotients ``G_X / N_X`` that are isomorphic across the factors. The
isomorphism is built from its defining recipe: ``a`` goes to the coset of any
``b`` with ``(a, b)`` in the projected graph.
"""

import json
import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import errors

MAX_ORDER = 10**5


# ---------------------------------------------------------------- factor groups

class FiniteGroup:
    """Group given by its multiplication table ``table[i, j] = i * j``."""

    def __init__(self, table, name=None, check=True, rng=None):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise errors.ValidationError("multiplication table must be a nonempty square array")
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise errors.ValidationError("table entries out of range")
        ids = [i for i in range(n) if np.array_equal(table[i], np.arange(n))
               and np.array_equal(table[:, i], np.arange(n))]
        if not ids:
            raise errors.ValidationError("table has no identity element")
        self.table = table
        self.table.setflags(write=False)
        self.order = n
        self.identity = ids[0]
        if check:
            for row in (table, table.T):
                if not all(len(set(r)) == n for r in row):
                    raise errors.ValidationError("table is not a Latin square")
        inv = np.argmax(table == self.identity, axis=1)
        if not np.all(table[np.arange(n), inv] == self.identity):
            raise errors.ValidationError("some element has no inverse")
        self.inverse = inv
        if check:
            self._check_associative(rng)
        self.name = name or f"G{n}"

    def _check_associative(self, rng):
        n, t = self.order, self.table
        if n <= 64:
            lhs = t[t[:, :, None], np.arange(n)[None, None, :]]
            rhs = t[np.arange(n)[:, None, None], t[None, :, :]]
            ok = np.array_equal(lhs, rhs)
        else:
            rng = np.random.default_rng(0) if rng is None else rng
            a, b, c = rng.integers(0, n, size=(3, 20000))
            ok = np.array_equal(t[t[a, b], c], t[a, t[b, c]])
        if not ok:
            raise errors.ValidationError("multiplication table is not associative")

    def element_order(self, x):
        k, y = 1, x
        while y != self.identity:
            y = self.table[y, x]
            k += 1
        return k

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def cyclic(n):
    i = np.arange(n)
    return FiniteGroup((i[:, None] + i[None, :]) % n, name=f"Z{n}")


def symmetric(n):
    """Symmetric group on ``n`` letters; element 0 is the identity."""
    perms = list(permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    table = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return FiniteGroup(table, name=f"S{n}")


def direct_product(g, h):
    a = np.arange(g.order)
    b = np.arange(h.order)
    t = (g.table[a[:, None, None, None], a[None, None, :, None]] * h.order
         + h.table[b[None, :, None, None], b[None, None, None, :]])
    n = g.order * h.order
    return FiniteGroup(t.reshape(n, n), name=f"{g.name}x{h.name}")


def klein():
    return direct_product(cyclic(2), cyclic(2))


NAMED_GROUPS = {
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z4": lambda: cyclic(4),
    "Z6": lambda: cyclic(6),
    "S3": lambda: symmetric(3),
    "S4": lambda: symmetric(4),
    "Z2xZ2": klein,
}


def named_group(name):
    try:
        return NAMED_GROUPS[name]()
    except KeyError:
        raise errors.UnknownNameError(f"unknown group {name!r}") from None


# ---------------------------------------------------------------- products

class ProductGroup:
    """Direct product of factor groups; elements are rows of an (m, k) int array."""

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise errors.ValidationError("need at least one factor")
        orders = [f.order for f in self.factors]
        self.radix = np.array([math.prod(orders[i + 1:]) for i in range(len(orders))],
                              dtype=np.int64)
        self.identity = np.array([f.identity for f in self.factors], dtype=np.int64)

    @property
    def n_factors(self):
        return len(self.factors)

    @property
    def order(self):
        return math.prod(f.order for f in self.factors)

    def mul(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x), np.asarray(y))
        return np.stack([f.table[x[..., k], y[..., k]] for k, f in enumerate(self.factors)],
                        axis=-1)

    def inv(self, x):
        x = np.asarray(x)
        return np.stack([f.inverse[x[..., k]] for k, f in enumerate(self.factors)], axis=-1)

    def encode(self, x):
        return np.asarray(x, dtype=np.int64) @ self.radix

    def decode(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        orders = np.array([f.order for f in self.factors])
        return (codes[..., None] // self.radix) % orders

    def sub(self, slots):
        return ProductGroup([self.factors[i] for i in slots])


@dataclass(frozen=True, eq=False)
class SubgroupElements:
    """Explicit element set of a subgroup, sorted by code."""

    group: ProductGroup
    elements: np.ndarray
    generators: np.ndarray = None

    @classmethod
    def from_elements(cls, group, elements, generators=None):
        elements = np.asarray(elements, dtype=np.int64).reshape(-1, group.n_factors)
        codes = group.encode(elements)
        codes = np.unique(codes)
        return cls(group, group.decode(codes), generators)

    @property
    def codes(self):
        return self.group.encode(self.elements)

    @property
    def order(self):
        return int(self.elements.shape[0])

    def contains(self, x):
        codes = self.group.encode(np.asarray(x).reshape(-1, self.group.n_factors))
        mine = self.codes
        pos = np.clip(np.searchsorted(mine, codes), 0, len(mine) - 1)
        return mine[pos] == codes

    def issubset(self, other):
        return bool(np.all(other.contains(self.elements)))

    def same_as(self, other):
        return self.order == other.order and self.issubset(other)

    def tuples(self):
        return [tuple(int(v) for v in row) for row in self.elements]

    def _sweep(self):
        return self.elements if self.generators is None else self.generators

    def is_closed(self):
        gens = self._sweep()
        prods = self.group.mul(self.elements[:, None, :], gens[None, :, :]).reshape(-1, self.group.n_factors)
        return bool(np.all(self.contains(prods)))

    def is_normal_in(self, big):
        """Conjugation sweep over a generating set of ``big``."""
        gens = big._sweep()
        g = gens[:, None, :]
        conj = self.group.mul(self.group.mul(g, self.elements[None, :, :]), self.group.inv(g))
        return bool(np.all(self.contains(conj.reshape(-1, self.group.n_factors))))

    def __repr__(self):
        return f"SubgroupElements(order={self.order}, factors={self.group.n_factors})"


def closure(group, generators, max_order=MAX_ORDER):
    """Subgroup generated by ``generators`` (tuples of factor indices)."""
    gens = np.asarray(generators, dtype=np.int64).reshape(-1, group.n_factors)
    for k, f in enumerate(group.factors):
        if gens.size and (gens[:, k].min() < 0 or gens[:, k].max() >= f.order):
            raise errors.ValidationError(f"generator entry out of range for factor {k}")
    seen = {int(group.encode(group.identity))}
    frontier = group.identity[None, :]
    while frontier.size and gens.size:
        prods = group.mul(frontier[:, None, :], gens[None, :, :]).reshape(-1, group.n_factors)
        codes = group.encode(prods)
        new = [c for c in np.unique(codes) if int(c) not in seen]
        seen.update(int(c) for c in new)
        if len(seen) > max_order:
            raise errors.OrderBudgetExceededError(
                f"subgroup order exceeds the budget of {max_order}")
        frontier = group.decode(np.array(new, dtype=np.int64)).reshape(-1, group.n_factors)
    codes = np.array(sorted(seen), dtype=np.int64)
    return SubgroupElements(group, group.decode(codes), gens if gens.size else None)


def slice_subgroup(G, mask):
    """Elements of ``G`` that are the identity outside ``mask``."""
    mask = set(int(m) for m in mask)
    off = [k for k in range(G.group.n_factors) if k not in mask]
    keep = np.all(G.elements[:, off] == G.group.identity[off], axis=1) if off else \
        np.ones(G.order, dtype=bool)
    S = SubgroupElements(G.group, G.elements[keep])
    if not S.is_normal_in(G):
        raise errors.CheckFailed("slice subgroup is not normal", counterexample=tuple(mask))
    return S


def set_product(group, x, y):
    return SubgroupElements.from_elements(
        group, group.mul(x.elements[:, None, :], y.elements[None, :, :]))


def product_subgroup(G, parts):
    """Set product of normal subgroups of ``G``; verified to be a normal subgroup."""
    parts = list(parts)
    out = SubgroupElements(G.group, G.group.identity[None, :].copy())
    for p in parts:
        if not p.issubset(G):
            raise errors.ValidationError("product factor is not contained in G")
        out = set_product(G.group, out, p)
    gens = np.vstack([p.elements for p in parts]) if parts else None
    out = SubgroupElements(G.group, out.elements, gens)
    if not out.is_closed():
        raise errors.NotASubgroupError("set product is not closed")
    if not out.is_normal_in(G):
        raise errors.NotASubgroupError("set product is not normal in G")
    return out


def project(G, slots):
    """Image of ``G`` in the product of the factors listed in ``slots``."""
    slots = list(slots)
    sub = G.group.sub(slots)
    return SubgroupElements.from_elements(sub, G.elements[:, slots])


@dataclass(frozen=True, eq=False)
class QuotientStructure:
    representatives: np.ndarray
    table: np.ndarray
    coset_codes: dict = field(repr=False)
    n_order: int = 1

    @property
    def order(self):
        return int(self.representatives.shape[0])

    def coset_of(self, group, x):
        codes = group.encode(np.asarray(x).reshape(-1, group.n_factors))
        return np.array([self.coset_codes[int(c)] for c in codes])


def quotient(G, N, exhaustive_limit=3000):
    """Coset table of ``G / N``; well-definedness is checked on all pairs when small."""
    if not N.issubset(G):
        raise errors.NotNormalError("N is not contained in G")
    if not N.is_normal_in(G):
        raise errors.NotNormalError("N is not normal in G")
    group = G.group
    coset_codes, reps = {}, []
    for row, code in zip(G.elements, G.codes):
        if int(code) in coset_codes:
            continue
        idx = len(reps)
        reps.append(row)
        for c in group.encode(group.mul(row[None, :], N.elements)):
            coset_codes[int(c)] = idx
    reps = np.array(reps)
    k = len(reps)
    prods = group.mul(reps[:, None, :], reps[None, :, :]).reshape(-1, group.n_factors)
    table = np.array([coset_codes[int(c)] for c in group.encode(prods)]).reshape(k, k)
    q = QuotientStructure(reps, table, coset_codes, N.order)
    if G.order != N.order * k:
        raise errors.CheckFailed("|G| != |N| |G/N|", counterexample=(G.order, N.order, k))
    if G.order <= exhaustive_limit:
        lab = q.coset_of(group, G.elements)
        for i in range(G.order):
            prod = group.mul(G.elements[i][None, :], G.elements)
            got = q.coset_of(group, prod)
            want = table[lab[i], lab]
            if not np.array_equal(got, want):
                j = int(np.argmax(got != want))
                raise errors.CheckFailed("coset product is not well defined",
                                         counterexample=(tuple(G.elements[i]), tuple(G.elements[j])))
    return q


# ---------------------------------------------------------------- Goursat data

@dataclass(frozen=True)
class AlphaCheck:
    source: int
    target: int
    source_quotient_order: int
    target_quotient_order: int
    well_defined: bool
    homomorphism: bool
    surjective: bool
    kernel_ok: bool

    @property
    def ok(self):
        return self.well_defined and self.homomorphism and self.surjective and self.kernel_ok


@dataclass(frozen=True)
class GoursatReport:
    mode: str
    order: int
    n_order: int
    quotient_order: int
    slot_quotient_orders: tuple
    alphas: tuple
    h_order: int = None
    theta_ok: bool = None

    @property
    def passed(self):
        ok = all(a.ok for a in self.alphas)
        if self.h_order is not None:
            ok = ok and self.h_order == self.quotient_order and bool(self.theta_ok)
        return ok

    def to_dict(self):
        return {
            "mode": self.mode,
            "order": self.order,
            "N_order": self.n_order,
            "quotient_order": self.quotient_order,
            "slot_quotient_orders": list(self.slot_quotient_orders),
            "alphas": [{"source": a.source + 1, "target": a.target + 1,
                        "well_defined": a.well_defined, "homomorphism": a.homomorphism,
                        "surjective": a.surjective, "kernel_ok": a.kernel_ok,
                        "quotient_orders": [a.source_quotient_order, a.target_quotient_order]}
                       for a in self.alphas],
            "H_order": self.h_order,
            "theta_ok": self.theta_ok,
            "passed": self.passed,
        }


def normal_core(G, mode):
    k = G.group.n_factors
    if k == 2:
        return product_subgroup(G, [slice_subgroup(G, [0]), slice_subgroup(G, [1])])
    if k != 3:
        raise errors.ValidationError("Goursat check needs two or three factors")
    if mode == "asymmetric":
        masks = [(0, 2), (1, 2)]
    elif mode == "symmetric":
        masks = [(0, 1), (0, 2), (1, 2)]
    else:
        raise errors.ValidationError(f"unknown mode {mode!r}")
    return product_subgroup(G, [slice_subgroup(G, m) for m in masks])


def alpha_map(G, N, x, y):
    """The map ``G_x -> G_y / N_y`` and its four checks.

    Returns ``(AlphaCheck, table)`` where ``table`` maps codes of ``G_x``
    elements to coset indices of ``G_y / N_y``.
    """
    gx, nx = project(G, [x]), project(N, [x])
    gy, ny = project(G, [y]), project(N, [y])
    qx = quotient(gx, nx)
    qy = quotient(gy, ny)
    a_vals = G.elements[:, x]
    cos = qy.coset_of(gy.group, G.elements[:, [y]])
    alpha, well = {}, True
    bad = None
    for a, c in zip(a_vals, cos):
        a, c = int(a), int(c)
        if alpha.setdefault(a, c) != c:
            well, bad = False, ("well_defined", a)
    fx = G.group.factors[x]
    hom = True
    keys = sorted(alpha)
    for a1 in keys:
        for a2 in keys:
            if alpha[int(fx.table[a1, a2])] != qy.table[alpha[a1], alpha[a2]]:
                hom, bad = False, bad or ("homomorphism", a1, a2)
    surj = set(alpha.values()) == set(range(qy.order))
    ker = {a for a, c in alpha.items() if c == qy.coset_codes[int(gy.group.encode(gy.group.identity))]}
    ker_ok = ker == set(int(v) for v in nx.elements[:, 0])
    check = AlphaCheck(x, y, qx.order, qy.order, well, hom, surj, ker_ok)
    if not check.ok:
        raise errors.CheckFailed(f"alpha from slot {x} to slot {y} fails",
                                 counterexample=bad or ("kernel/surjectivity", sorted(ker)))
    return check, alpha


def goursat_check(G, mode="symmetric"):
    """Verify the quotient isomorphisms for ``G`` in a product of 2 or 3 groups."""
    k = G.group.n_factors
    if k not in (2, 3):
        raise errors.ValidationError("Goursat check needs two or three factors")
    N = normal_core(G, mode)
    Q = quotient(G, N)
    if k == 2:
        pairs = [(0, 1), (1, 0)]
    elif mode == "asymmetric":
        pairs = [(0, 1), (1, 0)]
    else:
        pairs = [(0, 1), (0, 2), (1, 2)]
    alphas = tuple(alpha_map(G, N, x, y)[0] for x, y in pairs)
    slots = range(k) if (k == 2 or mode == "symmetric") else range(2)
    qs = [quotient(project(G, [s]), project(N, [s])) for s in slots]
    h_order = theta_ok = None
    if k == 2 or mode == "symmetric":
        labels = np.stack([q.coset_of(project(G, [s]).group, G.elements[:, [s]])
                           for s, q in zip(slots, qs)], axis=1)
        h_order = len({tuple(r) for r in labels})
        theta_ok = _check_thetas(G, Q, qs, labels)
        if h_order != Q.order or not theta_ok:
            raise errors.CheckFailed("diagonal embedding fails", counterexample=(h_order, Q.order))
    return GoursatReport(mode if k == 3 else "two-party", G.order, N.order, Q.order,
                         tuple(q.order for q in qs), alphas, h_order, theta_ok)


def _check_thetas(G, Q, qs, labels):
    """``theta_X : G/N -> G_X/N_X`` is well defined, bijective and multiplicative."""
    cos = Q.coset_of(G.group, G.elements)
    for s, q in enumerate(qs):
        theta = {}
        for t, lab in zip(cos, labels[:, s]):
            if theta.setdefault(int(t), int(lab)) != int(lab):
                return False
        if sorted(theta.values()) != list(range(q.order)) or len(theta) != Q.order:
            return False
        for t1 in range(Q.order):
            for t2 in range(Q.order):
                if theta[int(Q.table[t1, t2])] != q.table[theta[t1], theta[t2]]:
                    return False
    return True


# ---------------------------------------------------------------- two-factor converse

def goursat_data(G):
    """``(G_A, N_A, G_B, N_B, theta)`` for ``G`` in ``A x B``.

    ``theta`` maps each element of ``G_A`` to one element of ``G_B`` in the
    image coset.
    """
    if G.group.n_factors != 2:
        raise errors.ValidationError("goursat_data needs two factors")
    N = normal_core(G, "symmetric")
    theta = {}
    for a, b in G.elements:
        theta.setdefault(int(a), int(b))
    return project(G, [0]), project(N, [0]), project(G, [1]), project(N, [1]), theta


def reconstruct_from_pair(g_a, n_a, g_b, n_b, theta):
    """``{(a, b) : theta([a]) = [b]}`` inside ``A x B``.

    ``theta`` maps elements of ``G_A`` (at least one per coset of ``N_A``)
    to elements of ``G_B`` naming the image cosets, or is a callable.
    """
    for s in (g_a, n_a, g_b, n_b):
        if s.group.n_factors != 1:
            raise errors.ValidationError("reconstruction takes single-factor subgroups")
    qa, qb = quotient(g_a, n_a), quotient(g_b, n_b)
    if qa.order != qb.order:
        raise errors.NotAnIsomorphismError(
            f"quotient orders differ: {qa.order} vs {qb.order}")
    imap = {}
    for a in (int(v) for v in g_a.elements[:, 0]):
        if callable(theta):
            img = theta(a)
        elif a in theta:
            img = theta[a]
        else:
            continue
        ca = int(qa.coset_of(g_a.group, [[a]])[0])
        try:
            cb = int(qb.coset_of(g_b.group, [[int(img)]])[0])
        except KeyError:
            raise errors.NotAnIsomorphismError(f"theta({a}) = {img} is not in G_B") from None
        if imap.setdefault(ca, cb) != cb:
            raise errors.NotAnIsomorphismError(f"theta is not constant on the coset of {a}")
    if sorted(imap) != list(range(qa.order)) or sorted(imap.values()) != list(range(qb.order)):
        raise errors.NotAnIsomorphismError("theta is not a bijection of the quotients")
    for i in range(qa.order):
        for j in range(qa.order):
            if imap[int(qa.table[i, j])] != qb.table[imap[i], imap[j]]:
                raise errors.NotAnIsomorphismError("theta is not a homomorphism")
    group = ProductGroup([g_a.group.factors[0], g_b.group.factors[0]])
    ca = qa.coset_of(g_a.group, g_a.elements)
    cb = qb.coset_of(g_b.group, g_b.elements)
    rows = [(int(a), int(b)) for a, i in zip(g_a.elements[:, 0], ca)
            for b, j in zip(g_b.elements[:, 0], cb) if imap[int(i)] == int(j)]
    out = SubgroupElements.from_elements(group, rows)
    out = SubgroupElements(group, out.elements)
    if not out.is_closed():
        raise errors.NotASubgroupError("reconstructed set is not a subgroup")
    return out


# ---------------------------------------------------------------- oracle

def find_isomorphism(g, h, max_order=24):
    """Brute-force isomorphism ``g -> h`` as an index array, or ``None``.

    Independent of the Goursat machinery; intended for small test instances.
    """
    if g.order != h.order:
        return None
    if g.order > max_order:
        raise errors.OrderBudgetExceededError(f"order {g.order} exceeds {max_order}")
    n = g.order
    gens = []
    span = {g.identity}
    for x in sorted(range(n), key=lambda v: -g.element_order(v)):
        if x not in span:
            gens.append(x)
            span = set(_generated(g, gens))
        if len(span) == n:
            break
    orders_h = [h.element_order(y) for y in range(n)]
    cand = [[y for y in range(n) if orders_h[y] == g.element_order(x)] for x in gens]

    for images in _product_lists(cand):
        phi = _extend(g, h, gens, images)
        if phi is not None:
            return phi
    return None


def _generated(g, gens):
    seen = {g.identity}
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = int(g.table[x, s])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _product_lists(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product_lists(lists[1:]):
            yield (head,) + tail


def _extend(g, h, gens, images):
    phi = {g.identity: h.identity}
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in zip(gens, images):
                y, z = int(g.table[x, s]), int(h.table[phi[x], t])
                if y in phi:
                    if phi[y] != z:
                        return None
                else:
                    phi[y] = z
                    nxt.append(y)
        frontier = nxt
    if len(set(phi.values())) != g.order:
        return None
    arr = np.array([phi[i] for i in range(g.order)])
    if not np.array_equal(h.table[arr[:, None], arr[None, :]], arr[g.table]):
        return None
    return arr


def quotient_group(q):
    """Quotient structure as a :class:`FiniteGroup`."""
    return FiniteGroup(q.table, check=False)


# ---------------------------------------------------------------- specs

def load_group_spec(obj):
    """``(ProductGroup, generators)`` from ``{factors: [...], generators: [...]}``.

    A factor is ``{"order": n, "table": [[...]]}`` or ``{"name": "S3"}``.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        facs = obj["factors"]
        gens = obj.get("generators", [])
    except (KeyError, TypeError, AttributeError):
        raise errors.ValidationError("group spec needs a 'factors' list") from None
    factors = []
    for f in facs:
        if "name" in f:
            factors.append(named_group(f["name"]))
        else:
            grp = FiniteGroup(f["table"])
            if "order" in f and int(f["order"]) != grp.order:
                raise errors.ValidationError("declared order does not match the table")
            factors.append(grp)
    group = ProductGroup(factors)
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, group.n_factors)
    return group, gens


def random_instance(rng, n_factors=3, max_total=10**4, max_gens=3, library=None):
    """Random subgroup of a product of small library groups."""
    library = library or ["Z2", "Z3", "Z4", "S3", "Z2xZ2"]
    while True:
        facs = [named_group(library[i]) for i in rng.integers(0, len(library), n_factors)]
        if math.prod(f.order for f in facs) <= max_total:
            break
    group = ProductGroup(facs)
    k = int(rng.integers(1, max_gens + 1))
    gens = np.stack([rng.integers(0, f.order, size=k) for f in facs], axis=1)
    return closure(group, gens)
