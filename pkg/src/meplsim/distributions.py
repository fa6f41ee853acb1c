"""Request distributions and the special instances used by the oracles.

Two flavours exist. :class:`ActivityDistribution` is a symmetric product
distribution, p(u, v) = p(u) p(v), stored as the activity vector only.
:class:`PairDistribution` is an explicit sparse map over ordered pairs.
Self-pairs carry probability in both (they cost nothing, distance 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .placement import Placement
from .topology import Topology, build_topology, grid, ring

NORM_TOL = 1e-12


class DistributionError(ValueError):
    pass


class ActivityDistribution:
    """Symmetric product distribution given by normalized activity levels."""

    is_product = True

    def __init__(self, activities: Sequence[float]):
        p = np.array(activities, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise DistributionError("activities must be a non-empty vector")
        if (p < 0).any() or not np.isfinite(p).all():
            raise DistributionError("activities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise DistributionError(f"activities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        self.activities = p

    @property
    def n(self) -> int:
        return self.activities.size

    @property
    def marginals(self) -> np.ndarray:
        return self.activities

    def active(self) -> np.ndarray:
        return np.flatnonzero(self.activities > 0)

    def pair(self, u: int, v: int) -> float:
        return float(self.activities[u] * self.activities[v])

    def to_pairs(self) -> "PairDistribution":
        """Expanded n^2 table; only for small n (equivalence checks)."""
        act = self.active()
        uu, vv = np.meshgrid(act, act, indexing="ij")
        probs = np.outer(self.activities[act], self.activities[act])
        return PairDistribution(uu.ravel(), vv.ravel(), probs.ravel(), self.n, symmetric=True)

    def __repr__(self) -> str:
        return f"ActivityDistribution(n={self.n}, active={self.active().size})"


class PairDistribution:
    """Sparse distribution over ordered request pairs (u, v)."""

    is_product = False

    def __init__(self, u, v, prob, n: int, symmetric: bool = False):
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        prob = np.asarray(prob, dtype=np.float64).ravel()
        if not (u.size == v.size == prob.size):
            raise DistributionError("pair arrays differ in length")
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise DistributionError("pair references a process outside [0, n)")
        if (prob < 0).any():
            raise DistributionError("pair probabilities must be nonnegative")
        if abs(prob.sum() - 1.0) > NORM_TOL:
            raise DistributionError(f"pair probabilities sum to {prob.sum()!r}, not 1")
        # merge duplicate keys
        key = u * n + v
        uniq, inv = np.unique(key, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, prob)
        self.n = int(n)
        self.u, self.v = np.divmod(uniq, n)
        self.prob = merged
        for arr in (self.u, self.v, self.prob):
            arr.setflags(write=False)
        self.symmetric = bool(symmetric)
        if self.symmetric:
            table = dict(zip(zip(self.u.tolist(), self.v.tolist()), self.prob.tolist()))
            for (a, b), q in table.items():
                if abs(table.get((b, a), 0.0) - q) > NORM_TOL:
                    raise DistributionError(f"p({a},{b}) != p({b},{a}) with symmetric flag set")

    @property
    def entries(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(q) for a, b, q in zip(self.u, self.v, self.prob)}

    @property
    def marginals(self) -> np.ndarray:
        """Per-process involvement mass, (row sum + column sum) / 2."""
        m = np.zeros(self.n)
        np.add.at(m, self.u, self.prob / 2)
        np.add.at(m, self.v, self.prob / 2)
        return m

    def active(self) -> np.ndarray:
        return np.flatnonzero(self.marginals > 0)

    def symmetric_weights(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR ``(ptr, idx, w)`` of w[u, x] = p(u, x) + p(x, u) for x != u."""
        off = self.u != self.v
        a = np.concatenate([self.u[off], self.v[off]])
        b = np.concatenate([self.v[off], self.u[off]])
        q = np.concatenate([self.prob[off], self.prob[off]])
        key = a * self.n + b
        uniq, inv = np.unique(key, return_inverse=True)
        w = np.zeros(uniq.size)
        np.add.at(w, inv, q)
        rows, cols = np.divmod(uniq, self.n)
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(ptr, rows + 1, 1)
        return np.cumsum(ptr), cols.astype(np.int64), w

    def __repr__(self) -> str:
        return f"PairDistribution(n={self.n}, entries={self.prob.size})"


@dataclass(frozen=True)
class ClusterSpec:
    """Disjoint active clusters with weights; everything else is inactive."""

    n: int
    clusters: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.clusters) != len(self.weights):
            raise DistributionError("one weight per cluster required")
        seen: set[int] = set()
        for members in self.clusters:
            if not members:
                raise DistributionError("empty cluster")
            for u in members:
                if not 0 <= u < self.n:
                    raise DistributionError(f"process {u} outside [0, {self.n})")
                if u in seen:
                    raise DistributionError(f"process {u} appears in two clusters")
                seen.add(u)
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > NORM_TOL:
            raise DistributionError("cluster weights must be nonnegative and sum to 1")

    @property
    def inactive(self) -> tuple[int, ...]:
        used = {u for c in self.clusters for u in c}
        return tuple(u for u in range(self.n) if u not in used)

    def labels(self) -> np.ndarray:
        """Cluster id per process: 1..c for active clusters, 0 for the inactive set."""
        lab = np.zeros(self.n, dtype=np.int64)
        for i, members in enumerate(self.clusters, start=1):
            lab[list(members)] = i
        return lab


def uniform_cluster_spec(n: int, clusters: int, cluster_size: int | None = None,
                         inactive: int = 0) -> ClusterSpec:
    """Equal-weight clusters over contiguous process ids.

    With ``cluster_size`` unset, the ``n - inactive`` active processes are split
    as evenly as possible (the first ``r`` clusters get one extra member).
    """
    if clusters < 1:
        raise DistributionError("need at least one cluster")
    if cluster_size is None:
        budget = n - inactive
        base, extra = divmod(budget, clusters)
        sizes = [base + (1 if i < extra else 0) for i in range(clusters)]
    else:
        sizes = [cluster_size] * clusters
    if min(sizes) < 1 or sum(sizes) + inactive > n:
        raise DistributionError(f"{clusters} clusters of sizes {sizes} plus {inactive} inactive exceed n={n}")
    groups, start = [], 0
    for s in sizes:
        groups.append(tuple(range(start, start + s)))
        start += s
    return ClusterSpec(n=n, clusters=tuple(groups), weights=tuple([1.0 / clusters] * clusters))


def product_distribution(raw_activities: Sequence[float]) -> ActivityDistribution:
    raw = np.asarray(raw_activities, dtype=np.float64)
    if (raw < 0).any():
        raise DistributionError("activities must be nonnegative")
    total = raw.sum()
    if not total > 0:
        raise DistributionError("at least one activity must be positive")
    return ActivityDistribution(raw / total)


def clustered_distribution(spec: ClusterSpec) -> PairDistribution:
    us, vs, ps = [], [], []
    for members, weight in zip(spec.clusters, spec.weights):
        m = np.asarray(members, dtype=np.int64)
        uu, vv = np.meshgrid(m, m, indexing="ij")
        us.append(uu.ravel())
        vs.append(vv.ravel())
        ps.append(np.full(m.size * m.size, weight / m.size**2))
    return PairDistribution(np.concatenate(us), np.concatenate(vs), np.concatenate(ps),
                            spec.n, symmetric=True)


def clique_instance(edge_list: Iterable[Sequence[int]], k: int,
                    n: int | None = None) -> tuple[Topology, ActivityDistribution]:
    """k-clique reduction: activity 1/k on processes 0..k-1 of a general host graph."""
    topo = build_topology({"kind": "general", "edges": [list(e) for e in edge_list],
                           **({"n": n} if n is not None else {})})
    if not 1 <= k <= topo.n:
        raise DistributionError(f"k={k} must lie in [1, {topo.n}]")
    p = np.zeros(topo.n)
    p[:k] = 1.0
    return topo, product_distribution(p)


def tree_instance(tree_edges: Iterable[Sequence[int]]) -> tuple[Topology, PairDistribution]:
    """Tree-embedding reduction on the k x k grid (k = number of tree nodes).

    Each tree edge gets mass 1/(k-1), split evenly over its two directions.
    """
    edges = [tuple(int(x) for x in e) for e in tree_edges]
    if not edges:
        raise DistributionError("tree needs at least one edge")
    nodes = sorted({x for e in edges for x in e})
    k = len(nodes)
    if nodes != list(range(k)) or len(edges) != k - 1:
        raise DistributionError("input is not a tree on nodes 0..k-1")
    deg = np.zeros(k, dtype=int)
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            raise DistributionError("input contains a cycle")
        parent[ra] = rb
        deg[a] += 1
        deg[b] += 1
    if deg.max() > 4:
        raise DistributionError("tree has a node of degree > 4")
    topo = grid(2, k)
    half = 1.0 / (2 * (k - 1))
    us = [a for a, b in edges] + [b for a, b in edges]
    vs = [b for a, b in edges] + [a for a, b in edges]
    return topo, PairDistribution(us, vs, [half] * len(us), topo.n, symmetric=True)


def worst_case_line_arrangement(d: int, side: int) -> tuple[Topology, ActivityDistribution, Placement]:
    """``side`` uniform active processes laid out in a row along axis 0."""
    topo = grid(d, side)
    p = np.zeros(topo.n)
    p[:side] = 1.0
    stride = side ** (d - 1)
    placement = Placement.from_partial({i: i * stride for i in range(side)}, topo.n)
    return topo, product_distribution(p), placement


def interleaved_ring_placement(c: int, k: int) -> tuple[Topology, PairDistribution, Placement]:
    """Ring of c clusters of 2k+1 members placed round-robin across clusters.

    Cluster j owns processes ``j*(2k+1) .. (j+1)*(2k+1)-1``; host h holds member
    ``h // c`` of cluster ``h % c``. The identity placement is the contiguous one.
    """
    if c < 2 or k < 1:
        raise DistributionError("need c >= 2 and k >= 1")
    size = 2 * k + 1
    n = c * size
    spec = uniform_cluster_spec(n, c, cluster_size=size)
    inverse = [(h % c) * size + h // c for h in range(n)]
    return ring(n), clustered_distribution(spec), Placement.from_inverse(inverse)


def random_activities(n: int, family: str = "uniform", seed=None, s: float = 1.0,
                      alpha: float = 1.0) -> ActivityDistribution:
    """Activity vectors for experiments.

    ``uniform`` and ``zipf`` are deterministic (zipf in descending order by id);
    ``dirichlet`` draws from a symmetric Dirichlet(alpha) with the given seed.
    """
    if n < 1:
        raise DistributionError("n must be >= 1")
    if family == "uniform":
        return product_distribution(np.ones(n))
    if family == "zipf":
        return product_distribution(1.0 / np.arange(1, n + 1) ** s)
    if family == "dirichlet":
        rng = np.random.default_rng(seed)
        return product_distribution(rng.dirichlet(np.full(n, alpha)))
    raise DistributionError(f"unknown activity family {family!r}")
