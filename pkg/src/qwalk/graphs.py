"""Circulant and Abelian group-circulant graphs, their characters and spectra.

Vertices of a group circulant on Z_{n1} x ... x Z_{nk} are ordered mixed-radix
lexicographically (last factor fastest), i.e. numpy C order over ``factors``.
A standard circulant on Z_n is the one-factor case with integer indices.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np

DENSE_CAP = 4096
COLLISION_TOL = 1e-9


class ResourceLimitError(RuntimeError):
    """Raised when a dense oracle path would exceed the configured size cap."""


@dataclass(frozen=True)
class CirculantSpec:
    """Circulant graph on Z_n with symmetric connection set ``conn``.

    ``weights`` holds ``(element, weight)`` pairs for non-unit edges; it exists
    for the doubled edge of the two-vertex cycle.
    """

    n: int
    conn: frozenset
    weights: tuple = ()

    @property
    def factors(self) -> tuple[int, ...]:
        return (self.n,)

    @property
    def order(self) -> int:
        return self.n

    def weight(self, d: int) -> float:
        return dict(self.weights).get(d, 1.0) if d in self.conn else 0.0

    def kernel(self) -> np.ndarray:
        """First row ``a_k`` of the adjacency matrix, with weights."""
        f = np.zeros(self.n)
        for d in self.conn:
            f[d] = self.weight(d)
        return f

    def index(self, flat: int) -> int:
        return int(flat)

    def to_dict(self) -> dict:
        out = {"type": "circulant", "n": self.n, "conn": sorted(self.conn)}
        if self.weights:
            out["weights"] = [[d, w] for d, w in self.weights]
        return out


@dataclass(frozen=True)
class GroupCirculantSpec:
    """Circulant over the Abelian group Z_{n1} x ... x Z_{nk}.

    ``conn`` is a set of group elements (tuples); f(x) = 1 iff x in conn.
    """

    factors: tuple
    conn: frozenset

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    def weight(self, x) -> float:
        return 1.0 if tuple(x) in self.conn else 0.0

    def kernel(self) -> np.ndarray:
        f = np.zeros(self.factors)
        for x in self.conn:
            f[x] = 1.0
        return f

    def index(self, flat: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(int(flat), self.factors))

    def to_dict(self) -> dict:
        return {
            "type": "group",
            "factors": list(self.factors),
            "conn": [list(x) for x in sorted(self.conn)],
        }


GraphSpec = Union[CirculantSpec, GroupCirculantSpec]


@dataclass(frozen=True)
class HadamardMatrix:
    order: int
    entries: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues indexed by character (flat mixed-radix index) plus collision classes.

    ``labels[i]`` is the collision class of index ``i``; classes are numbered in
    order of their smallest member.
    """

    factors: tuple
    eigenvalues: np.ndarray
    labels: np.ndarray
    tol: float = COLLISION_TOL

    @property
    def order(self) -> int:
        return len(self.eigenvalues)

    @property
    def distinct_count(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def class_members(self) -> list[np.ndarray]:
        """Flat indices of each class, ascending, classes ordered by smallest member."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(np.bincount(self.labels))[:-1]
        return np.split(order, bounds)

    def index(self, flat: int):
        if len(self.factors) == 1:
            return int(flat)
        return tuple(int(v) for v in np.unravel_index(int(flat), self.factors))

    @property
    def collision_classes(self) -> list[list]:
        return [[self.index(i) for i in members] for members in self.class_members()]

    def eigenvalue(self, index) -> float:
        if isinstance(index, tuple):
            index = np.ravel_multi_index(index, self.factors)
        return float(self.eigenvalues[index])


def make_circulant(
    n: int, conn: Iterable[int], weights: Mapping[int, float] | None = None
) -> CirculantSpec:
    """Validated circulant graph on Z_n."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    conn = frozenset(int(d) for d in conn)
    weights = dict(weights or {})
    for d in sorted(conn):
        if d == 0:
            raise ValueError("connection set contains 0 (a loop)")
        if not 0 < d < n:
            raise ValueError(f"connection element {d} outside [1, {n - 1}]")
        if (n - d) % n not in conn:
            raise ValueError(
                f"connection set is not inverse-closed: {d} present but {n - d} missing"
            )
    for d, w in weights.items():
        if d not in conn:
            raise ValueError(f"weight given for {d}, which is not in the connection set")
        if not w > 0 or not math.isfinite(w):
            raise ValueError(f"weight for {d} must be a positive real, got {w!r}")
        if weights.get((n - d) % n, 1.0) != w:
            raise ValueError(f"weights of {d} and {n - d} differ")
    pairs = tuple(sorted((d, float(w)) for d, w in weights.items() if w != 1.0))
    return CirculantSpec(n, conn, pairs)


def make_cycle(n: int) -> CirculantSpec:
    """Cycle C_n; C_2 is the multigraph with a doubled edge (Hamiltonian [[0,2],[2,0]])."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"cycle length must be >= 2, got {n!r}")
    if n == 2:
        return make_circulant(2, {1}, {1: 2.0})
    return make_circulant(n, {1, n - 1})


def make_complete(n: int) -> CirculantSpec:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"complete graph order must be >= 2, got {n!r}")
    return make_circulant(n, range(1, n))


def make_group_circulant(factors: Iterable[int], conn: Iterable) -> GroupCirculantSpec:
    """Validated Z_{n1} x ... x Z_{nk} circulant."""
    factors = tuple(int(m) for m in factors)
    if not factors or any(m < 1 for m in factors):
        raise ValueError(f"factors must be positive integers, got {list(factors)}")
    if math.prod(factors) < 2:
        raise ValueError("group order must be >= 2")
    elems = set()
    for x in conn:
        x = tuple(int(v) for v in (x if isinstance(x, (tuple, list)) else (x,)))
        if len(x) != len(factors):
            raise ValueError(f"element {list(x)} has wrong dimension for factors {list(factors)}")
        if any(not 0 <= v < m for v, m in zip(x, factors)):
            raise ValueError(f"element {list(x)} is not reduced modulo {list(factors)}")
        elems.add(x)
    identity = (0,) * len(factors)
    if identity in elems:
        raise ValueError("connection set contains the identity (a loop)")
    for x in sorted(elems):
        inv = tuple((-v) % m for v, m in zip(x, factors))
        if inv not in elems:
            raise ValueError(
                f"connection set is not inverse-closed: {list(x)} present but {list(inv)} missing"
            )
    return GroupCirculantSpec(factors, frozenset(elems))


def make_hypercube(d: int) -> GroupCirculantSpec:
    """The d-cube as the Z_2^d circulant generated by the unit vectors."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"hypercube dimension must be >= 1, got {d!r}")
    units = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    return make_group_circulant([2] * d, units)


def character(factors, a, x) -> complex:
    """chi_a(x) = prod_j exp(2 pi i a_j x_j / n_j)."""
    factors = tuple(factors)
    a = tuple(a) if isinstance(a, (tuple, list)) else (a,)
    x = tuple(x) if isinstance(x, (tuple, list)) else (x,)
    if not len(a) == len(x) == len(factors):
        raise ValueError("dimension mismatch between factors, a and x")
    frac = sum(((ai * xi) % m) / m for ai, xi, m in zip(a, x, factors))
    frac -= math.floor(frac)
    # exact values at quarter turns keep +-1, +-i free of rounding noise
    quarter = frac * 4
    if quarter == int(quarter):
        return (1, 1j, -1, -1j)[int(quarter)]
    return cmath.exp(2j * math.pi * frac)


def _index_grid(factors: tuple) -> list[np.ndarray]:
    return [g.ravel() for g in np.indices(factors)]


def _phase_fraction(factors: tuple, a_grid: list[np.ndarray], x) -> np.ndarray:
    """Fractional turns of a . x over all characters a, reduced with integer arithmetic."""
    frac = np.zeros(len(a_grid[0]))
    for ak, xk, m in zip(a_grid, x, factors):
        frac += ((ak * xk) % m) / m
    return frac


def _cos_turns(frac: np.ndarray) -> np.ndarray:
    """cos(2 pi frac), folded to within 1/8 turn of a quarter so quarter turns come out exact."""
    q = np.rint(4 * frac)
    r = 2 * np.pi * (frac - q / 4)
    c, s = np.cos(r), np.sin(r)
    return np.choose(q.astype(np.int64) % 4, [c, -s, -c, s])


def _kernel_items(spec: GraphSpec) -> list[tuple[tuple, float]]:
    if isinstance(spec, CirculantSpec):
        return [((d,), spec.weight(d)) for d in sorted(spec.conn)]
    return [(x, 1.0) for x in sorted(spec.conn)]


@lru_cache(maxsize=64)
def eigenvalue_array(spec: GraphSpec) -> np.ndarray:
    """Real eigenvalues lambda_a = sum_x f(x) conj(chi_a(x)), flat in vertex order.

    Sparse connection sets use the direct cosine sum (the imaginary part
    cancels by inverse closure); dense ones use an n-dimensional FFT. The
    result is symmetrized so lambda_a and lambda_{-a} are bit-identical.
    """
    factors = spec.factors
    n = spec.order
    items = _kernel_items(spec)
    if len(items) <= 2 * max(1, n.bit_length()) + 8:
        grid = _index_grid(factors)
        lam = np.zeros(n)
        for x, w in items:
            lam += w * _cos_turns(_phase_fraction(factors, grid, x))
    else:
        lam = np.fft.fftn(spec.kernel()).real.ravel()
    # lambda_a = lambda_{-a} in exact arithmetic; make it bit-exact
    lam = 0.5 * (lam + lam[negation_index(factors)])
    lam.flags.writeable = False
    return lam


def collision_labels(eigenvalues: np.ndarray, tol: float = COLLISION_TOL) -> np.ndarray:
    """Cluster eigenvalues: sorted neighbours closer than ``tol`` share a class.

    Labels are renumbered so classes appear in order of their smallest index.
    """
    if tol < 0:
        raise ValueError("collision tolerance must be nonnegative")
    order = np.argsort(eigenvalues, kind="stable")
    gaps = np.diff(eigenvalues[order]) > tol
    raw = np.empty(len(eigenvalues), dtype=np.int64)
    raw[order] = np.concatenate([[0], np.cumsum(gaps)])
    _, first = np.unique(raw, return_index=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[raw]


def spectrum(spec: GraphSpec, tol: float = COLLISION_TOL) -> Spectrum:
    lam = eigenvalue_array(spec)
    return Spectrum(tuple(spec.factors), lam, collision_labels(lam, tol), tol)


def eigenvalues_circulant(spec: CirculantSpec, tol: float = COLLISION_TOL) -> Spectrum:
    if not isinstance(spec, CirculantSpec):
        raise TypeError("expected a CirculantSpec")
    return spectrum(spec, tol)


def eigenvalues_group(spec: GroupCirculantSpec, tol: float = COLLISION_TOL) -> Spectrum:
    if not isinstance(spec, GroupCirculantSpec):
        raise TypeError("expected a GroupCirculantSpec")
    return spectrum(spec, tol)


def negation_index(factors: tuple) -> np.ndarray:
    """Flat index of -a for every flat index a."""
    grid = np.indices(factors)
    neg = [(-g) % m for g, m in zip(grid, factors)]
    return np.ravel_multi_index(neg, factors).ravel()


def adjacency_matrix(spec: GraphSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense M[s, t] = f(s - t); an oracle path, refused above ``cap`` vertices."""
    n = spec.order
    if n > cap:
        raise ResourceLimitError(f"dense adjacency of order {n} exceeds cap {cap}")
    factors = spec.factors
    grid = _index_grid(factors)
    diff = [(g[:, None] - g[None, :]) % m for g, m in zip(grid, factors)]
    flat = np.ravel_multi_index(diff, factors)
    return spec.kernel().ravel()[flat]


def hadamard_matrix(order: int) -> HadamardMatrix:
    """Sylvester Hadamard matrix built by the block recursion [[H, H], [H, -H]]."""
    if not isinstance(order, (int, np.integer)) or order < 2 or order & (order - 1):
        raise ValueError(f"Hadamard order must be a power of two >= 2, got {order!r}")
    h = np.array([[1, 1], [1, -1]], dtype=np.int64)
    while len(h) < order:
        h = np.block([[h, h], [h, -h]])
    h.flags.writeable = False
    return HadamardMatrix(int(order), h)


def repeated_eigenvalue_witness(spec: GraphSpec, tol: float = COLLISION_TOL):
    """Two distinct character indices with equal eigenvalues, or None.

    Prefers the structural pair (a, -a) with a != -a; otherwise falls back to
    the first collision class with two members.
    """
    spec_ = spectrum(spec, tol)
    lam = spec_.eigenvalues
    neg = negation_index(spec.factors)
    for a in np.flatnonzero(neg != np.arange(len(neg))):
        b = neg[a]
        if abs(lam[a] - lam[b]) <= tol:
            return spec_.index(a), spec_.index(b)
    for members in spec_.class_members():
        if len(members) >= 2:
            return spec_.index(members[0]), spec_.index(members[1])
    return None


def graph_from_dict(obj: Mapping) -> GraphSpec:
    """Build a spec from the JSON graph object format."""
    if not isinstance(obj, Mapping):
        raise ValueError("graph spec must be a JSON object")
    kind = obj.get("type")
    try:
        if kind == "cycle":
            return make_cycle(_int(obj["n"], "n"))
        if kind == "complete":
            return make_complete(_int(obj["n"], "n"))
        if kind == "circulant":
            weights = {int(d): float(w) for d, w in obj.get("weights", [])}
            return make_circulant(_int(obj["n"], "n"), [_int(d, "conn") for d in obj["conn"]], weights)
        if kind == "hypercube":
            return make_hypercube(_int(obj["d"], "d"))
        if kind == "group":
            conn = [[_int(v, "conn") for v in x] for x in obj["conn"]]
            return make_group_circulant([_int(m, "factors") for m in obj["factors"]], conn)
    except KeyError as exc:
        raise ValueError(f"graph spec of type {kind!r} is missing field {exc.args[0]!r}") from None
    raise ValueError(f"unknown graph type {kind!r}")


def _int(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"field {name!r} must hold integers, got {v!r}")
    return v


def load_graph(text: str) -> GraphSpec:
    """Parse one JSON graph object; JSON errors surface as ValueError with line/column."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return graph_from_dict(obj)
