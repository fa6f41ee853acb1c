from __future__ import annotations

from typing import Sequence

import numpy as np


class Placement:
    """Bijection from processes (guest nodes) to hosts, with inverse lookup."""

    __slots__ = ("forward", "inverse")

    def __init__(self, forward: Sequence[int]):
        fwd = np.array(forward, dtype=np.int64)
        n = fwd.size
        inv = np.full(n, -1, dtype=np.int64)
        if n and (fwd.min() < 0 or fwd.max() >= n):
            raise ValueError("placement maps outside [0, n)")
        inv[fwd] = np.arange(n)
        if (inv < 0).any():
            raise ValueError("placement is not a bijection")
        fwd.setflags(write=False)
        inv.setflags(write=False)
        self.forward = fwd
        self.inverse = inv

    @classmethod
    def identity(cls, n: int) -> "Placement":
        return cls(np.arange(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Placement":
        return cls(rng.permutation(n))

    @classmethod
    def from_inverse(cls, inverse: Sequence[int]) -> "Placement":
        inv = np.asarray(inverse, dtype=np.int64)
        fwd = np.empty_like(inv)
        fwd[inv] = np.arange(inv.size)
        return cls(fwd)

    @classmethod
    def from_partial(cls, assignment: dict[int, int], n: int) -> "Placement":
        """Place the given processes; the rest fill the free hosts in ascending order."""
        fwd = np.full(n, -1, dtype=np.int64)
        for u, h in assignment.items():
            fwd[u] = h
        free = np.setdiff1d(np.arange(n), fwd[fwd >= 0])
        fwd[fwd < 0] = free
        return cls(fwd)

    def __len__(self) -> int:
        return self.forward.size

    def host(self, u: int) -> int:
        return int(self.forward[u])

    def process(self, h: int) -> int:
        return int(self.inverse[h])

    def swapped(self, u: int, v: int) -> "Placement":
        fwd = self.forward.copy()
        fwd[u], fwd[v] = fwd[v], fwd[u]
        return Placement(fwd)

    def relabeled(self, perm: Sequence[int]) -> "Placement":
        """Placement of processes renamed by ``perm`` (old id u becomes perm[u])."""
        perm = np.asarray(perm)
        fwd = np.empty_like(self.forward)
        fwd[perm] = self.forward
        return Placement(fwd)

    def __eq__(self, other) -> bool:
        return isinstance(other, Placement) and np.array_equal(self.forward, other.forward)

    def __hash__(self) -> int:
        return hash(self.forward.tobytes())

    def __repr__(self) -> str:
        return f"Placement({self.forward.tolist()})"
