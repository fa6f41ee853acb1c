"""Host graphs: d-dimensional grids, tori and arbitrary connected graphs.

Lines are 1-d grids and rings are 1-d tori. Grid/torus hosts are indexed
row-major: the coordinate ``(c_0, ..., c_{d-1})`` maps to
``sum(c_i * k**(d-1-i))``, so axis 0 is the slowest-varying one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

KINDS = ("grid", "torus", "general")
MOVE_SETS = ("adjacent", "adjacent+knight")

_KNIGHT_OFFSETS = ((-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1))


class TopologyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Topology:
    kind: str
    n: int
    d: int | None = None
    k: int | None = None
    edges: tuple[tuple[int, int], ...] = field(default=(), repr=False)

    @property
    def node_count(self) -> int:
        return self.n

    @property
    def is_lattice(self) -> bool:
        return self.kind in ("grid", "torus")

    # -- coordinates -----------------------------------------------------

    def coords(self, h: int) -> tuple[int, ...]:
        if not self.is_lattice:
            raise TopologyError("coordinates are only defined for grid/torus")
        self._check_host(h)
        out = []
        for _ in range(self.d):
            h, r = divmod(h, self.k)
            out.append(r)
        return tuple(reversed(out))

    def index(self, coords: Sequence[int]) -> int:
        if not self.is_lattice:
            raise TopologyError("coordinates are only defined for grid/torus")
        if len(coords) != self.d:
            raise TopologyError(f"expected {self.d} coordinates, got {len(coords)}")
        h = 0
        for c in coords:
            if not 0 <= c < self.k:
                raise TopologyError(f"coordinate {c} outside [0, {self.k})")
            h = h * self.k + int(c)
        return h

    @cached_property
    def coord_array(self) -> np.ndarray:
        """(n, d) array of host coordinates; (n, 1) host indices for general graphs."""
        if not self.is_lattice:
            return np.arange(self.n).reshape(-1, 1)
        idx = np.arange(self.n)
        cols = []
        for _ in range(self.d):
            idx, r = np.divmod(idx, self.k)
            cols.append(r)
        return np.stack(cols[::-1], axis=1)

    # -- distances -------------------------------------------------------

    def distance(self, a: int, b: int) -> int:
        self._check_host(a)
        self._check_host(b)
        if self.kind == "general":
            return int(self.distance_matrix[a, b])
        total = 0
        for ca, cb in zip(self.coords(a), self.coords(b)):
            diff = abs(ca - cb)
            if self.kind == "torus":
                diff = min(diff, self.k - diff)
            total += diff
        return total

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Dense all-pairs hop distances as an (n, n) int32 array."""
        if self.kind == "general":
            return _bfs_all_pairs(self.n, self.adjacency)
        xs = self.coord_array
        dm = np.zeros((self.n, self.n), dtype=np.int32)
        for axis in range(self.d):
            diff = np.abs(xs[:, axis][:, None] - xs[:, axis][None, :])
            if self.kind == "torus":
                diff = np.minimum(diff, self.k - diff)
            dm += diff.astype(np.int32)
        dm.setflags(write=False)
        return dm

    # -- neighbourhoods --------------------------------------------------

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        if self.kind == "general":
            nbrs: list[set[int]] = [set() for _ in range(self.n)]
            for a, b in self.edges:
                nbrs[a].add(b)
                nbrs[b].add(a)
            return tuple(tuple(sorted(s)) for s in nbrs)
        out = []
        for h in range(self.n):
            c = self.coords(h)
            found = set()
            for axis in range(self.d):
                for step in (-1, 1):
                    q = list(c)
                    q[axis] += step
                    if self.kind == "torus":
                        q[axis] %= self.k
                    elif not 0 <= q[axis] < self.k:
                        continue
                    found.add(self.index(q))
            found.discard(h)
            out.append(tuple(sorted(found)))
        return tuple(out)

    def adjacent_neighbors(self, h: int) -> list[int]:
        self._check_host(h)
        return list(self.adjacency[h])

    def knight_neighbors(self, h: int) -> list[int]:
        """Hosts a chess-knight move away; clipped on grids, wrapped on tori."""
        if not (self.is_lattice and self.d == 2):
            raise TopologyError("knight moves need a 2-dimensional grid or torus")
        self._check_host(h)
        x, y = self.coords(h)
        found = set()
        for dx, dy in _KNIGHT_OFFSETS:
            qx, qy = x + dx, y + dy
            if self.kind == "torus":
                qx, qy = qx % self.k, qy % self.k
            elif not (0 <= qx < self.k and 0 <= qy < self.k):
                continue
            found.add(qx * self.k + qy)
        found.discard(h)
        return sorted(found)

    def move_neighbors(self, h: int, move_set: str = "adjacent") -> list[int]:
        if move_set == "adjacent":
            return self.adjacent_neighbors(h)
        if move_set == "adjacent+knight":
            return sorted(set(self.adjacent_neighbors(h)) | set(self.knight_neighbors(h)))
        raise TopologyError(f"unknown move set {move_set!r}")

    def move_csr(self, move_set: str = "adjacent") -> tuple[np.ndarray, np.ndarray]:
        """Move sets as CSR arrays ``(ptr, idx)``; neighbours ascending per host."""
        cache = self.__dict__.setdefault("_move_csr_cache", {})
        if move_set not in cache:
            rows = [self.move_neighbors(h, move_set) for h in range(self.n)]
            ptr = np.zeros(self.n + 1, dtype=np.int64)
            ptr[1:] = np.cumsum([len(r) for r in rows])
            idx = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(ptr[-1]))
            cache[move_set] = (ptr, idx)
        return cache[move_set]

    def to_spec(self) -> dict:
        if self.kind == "general":
            return {"kind": "general", "n": self.n, "edges": [list(e) for e in self.edges]}
        return {"kind": self.kind, "d": self.d, "k": self.k}

    def _check_host(self, h: int) -> None:
        if not 0 <= h < self.n:
            raise TopologyError(f"host {h} outside [0, {self.n})")


def grid(d: int, k: int) -> Topology:
    return build_topology({"kind": "grid", "d": d, "k": k})


def torus(d: int, k: int) -> Topology:
    return build_topology({"kind": "torus", "d": d, "k": k})


def line(n: int) -> Topology:
    return grid(1, n)


def ring(n: int) -> Topology:
    return torus(1, n)


def general(edges: Iterable[Sequence[int]], n: int | None = None) -> Topology:
    spec = {"kind": "general", "edges": [list(e) for e in edges]}
    if n is not None:
        spec["n"] = n
    return build_topology(spec)


def build_topology(spec: dict) -> Topology:
    """Validate a topology description and return the immutable host graph.

    Accepts ``{"kind": "grid"|"torus", "d": int, "k": int}`` or
    ``{"kind": "general", "edges": [[a, b], ...], "n": optional int}``.
    """
    kind = spec.get("kind")
    if kind not in KINDS:
        raise TopologyError(f"unknown topology kind {kind!r}")
    if kind in ("grid", "torus"):
        d, k = int(spec.get("d", 1)), int(spec.get("k", 0))
        if d < 1 or k < 1:
            raise TopologyError(f"grid/torus needs d >= 1 and k >= 1, got d={d}, k={k}")
        return Topology(kind=kind, n=k**d, d=d, k=k)

    raw = spec.get("edges")
    if raw is None:
        raise TopologyError("general topology needs an edge list")
    edges = set()
    for e in raw:
        a, b = (int(x) for x in e)
        if a < 0 or b < 0:
            raise TopologyError(f"negative node id in edge {e}")
        if a != b:
            edges.add((min(a, b), max(a, b)))
    top = max((max(e) for e in edges), default=-1) + 1
    n = int(spec.get("n", max(top, 1)))
    if n < 1:
        raise TopologyError("general topology needs at least one node")
    if top > n:
        raise TopologyError(f"edge references node >= n={n}")
    t = Topology(kind="general", n=n, edges=tuple(sorted(edges)))
    if (t.distance_matrix < 0).any():
        raise TopologyError("general topology must be connected")
    return t


def _bfs_all_pairs(n: int, adjacency: Sequence[Sequence[int]]) -> np.ndarray:
    dm = np.full((n, n), -1, dtype=np.int32)
    for s in range(n):
        row = dm[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adjacency[x]:
                if row[y] < 0:
                    row[y] = row[x] + 1
                    queue.append(y)
    dm.setflags(write=False)
    return dm
