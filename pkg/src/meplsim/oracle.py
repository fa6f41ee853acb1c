"""Exact ground truth for small instances.

Brute force runs over placements of the *active* processes only (inactive
ones cost nothing) and treats interchangeable processes as one, so a 3x3
grid with nine distinct activities is 9! leaves and a 4x4 grid with four
uniform ones is C(16, 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .distributions import ActivityDistribution, random_activities
from .dynamics import DEFAULT_EPS, DynamicsConfig, run_dynamics
from .metrics import CENTER_TIE_TOL, UnsupportedDistributionError, epl
from .placement import Placement
from .topology import Topology

DEFAULT_ACTIVE_LIMIT = 9
DEFAULT_HOST_LIMIT = 25
LEAF_BUDGET = 20_000_000


class OracleLimitError(ValueError):
    pass


@dataclass
class OracleResult:
    mepl_value: float
    optimal_placement: Placement
    explored_count: int
    c_min: float | None = None
    c_min_placement: Placement | None = None


@dataclass
class _Prepared:
    active: np.ndarray      # process ids in enumeration order
    classes: np.ndarray     # twin-class label per position, contiguous
    W: np.ndarray           # (m, m) symmetric pair weights, zero diagonal
    pact: np.ndarray        # activities of the active processes (product) or zeros
    leaves: int


def _twin_classes(dist, act: np.ndarray, W: np.ndarray) -> list[list[int]]:
    """Group positions of ``act`` whose processes can be swapped without changing anything."""
    m = act.size
    groups: list[list[int]] = []
    for i in range(m):
        for g in groups:
            j = g[0]
            if dist.is_product:
                same = dist.activities[act[i]] == dist.activities[act[j]]
            else:
                mask = np.ones(m, dtype=bool)
                mask[[i, j]] = False
                same = np.array_equal(W[i, mask], W[j, mask])
            if same:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _prepare(t: Topology, dist, limit: int, host_limit: int) -> _Prepared:
    if t.n != dist.n:
        raise ValueError("topology and distribution sizes differ")
    act = dist.active()
    m = act.size
    if m > limit:
        raise OracleLimitError(f"{m} active processes exceed the limit of {limit}")
    if t.n > host_limit:
        raise OracleLimitError(f"{t.n} hosts exceed the limit of {host_limit}")
    if dist.is_product:
        p = dist.activities[act]
        W = 2.0 * np.outer(p, p)
    else:
        pos = np.full(dist.n, -1)
        pos[act] = np.arange(m)
        W = np.zeros((m, m))
        off = dist.u != dist.v
        np.add.at(W, (pos[dist.u[off]], pos[dist.v[off]]), dist.prob[off])
        W = W + W.T
    np.fill_diagonal(W, 0.0)
    groups = _twin_classes(dist, act, W)
    order = [i for g in groups for i in g]
    classes = np.array([gi for gi, g in enumerate(groups) for _ in g], dtype=np.int64)
    W = np.ascontiguousarray(W[np.ix_(order, order)])
    act = act[order]
    pact = (np.ascontiguousarray(dist.activities[act], dtype=np.float64) if dist.is_product
            else np.zeros(m))
    leaves = math.perm(t.n, m)
    for g in groups:
        leaves //= math.factorial(len(g))
    if leaves > LEAF_BUDGET:
        raise OracleLimitError(f"{leaves} canonical placements exceed the budget of {LEAF_BUDGET}")
    return _Prepared(act.astype(np.int64), classes, W, pact, leaves)


def _to_placement(prep: _Prepared, assign: np.ndarray, n: int) -> Placement:
    return Placement.from_partial({int(u): int(h) for u, h in zip(prep.active, assign)}, n)


def _run(t, dist, prep, rule="M", move_set="adjacent", check_local=False, eps=DEFAULT_EPS,
         kernels=None):
    k = kernels or _kernels
    mptr, midx = t.move_csr(move_set)
    D = np.ascontiguousarray(t.distance_matrix, dtype=np.int32)
    rule_code = _kernels.RULE_M if rule == "M" else _kernels.RULE_C
    return k.enumerate_placements(D, prep.W, prep.pact, prep.classes, mptr, midx, rule_code,
                                  bool(dist.is_product), check_local, eps, CENTER_TIE_TOL)


def brute_force_mepl(t: Topology, dist, limit: int = DEFAULT_ACTIVE_LIMIT,
                     host_limit: int = DEFAULT_HOST_LIMIT, kernels=None) -> OracleResult:
    """Exact MEPL (and C_min for product distributions) by exhaustive enumeration."""
    prep = _prepare(t, dist, limit, host_limit)
    best, assign, cmin, cassign, count, *_ = _run(t, dist, prep, kernels=kernels)
    res = OracleResult(float(best), _to_placement(prep, assign, t.n), int(count))
    if dist.is_product:
        res.c_min = float(cmin)
        res.c_min_placement = _to_placement(prep, cassign, t.n)
    return res


@dataclass
class LocalMinima:
    """Every canonical local minimum of one instance, with the global optimum."""

    mepl: float
    c_min: float | None
    explored_count: int
    active: np.ndarray
    assignments: np.ndarray  # (K, m) hosts of the active processes
    epls: np.ndarray
    c_values: np.ndarray
    n: int

    @property
    def count(self) -> int:
        return int(self.epls.size)

    @property
    def worst_epl(self) -> float:
        return float(self.epls.max()) if self.count else math.nan

    @property
    def worst_ratio(self) -> float:
        return approximation_ratio(self.worst_epl, self.mepl)

    def placement(self, i: int) -> Placement:
        return Placement.from_partial(
            {int(u): int(h) for u, h in zip(self.active, self.assignments[i])}, self.n)


def local_minima(t: Topology, dist, rule: str, move_set: str = "adjacent",
                 limit: int = DEFAULT_ACTIVE_LIMIT, host_limit: int = DEFAULT_HOST_LIMIT,
                 eps: float = DEFAULT_EPS, kernels=None) -> LocalMinima:
    if rule == "C" and not dist.is_product:
        raise UnsupportedDistributionError("the C-rule needs a product distribution")
    prep = _prepare(t, dist, limit, host_limit)
    best, _, cmin, _, count, la, le, lc = _run(t, dist, prep, rule, move_set, True, eps, kernels)
    return LocalMinima(float(best), float(cmin) if dist.is_product else None, int(count),
                       prep.active, la, le, lc, t.n)


def enumerate_local_minima(t: Topology, dist, rule: str, move_set: str = "adjacent",
                           limit: int = DEFAULT_ACTIVE_LIMIT, host_limit: int = DEFAULT_HOST_LIMIT,
                           eps: float = DEFAULT_EPS, kernels=None) -> list[tuple[Placement, float]]:
    """All local minima (up to interchangeable processes), worst EPL first."""
    lm = local_minima(t, dist, rule, move_set, limit, host_limit, eps, kernels)
    order = np.argsort(-lm.epls, kind="stable")
    return [(lm.placement(i), float(lm.epls[i])) for i in order]


def approximation_ratio(local_epl: float, mepl: float) -> float:
    if mepl <= 0.0:
        return 1.0 if local_epl <= 1e-15 else math.inf
    return local_epl / mepl


def c_min_rearrangement(t: Topology, dist: ActivityDistribution) -> float:
    """C_min without enumeration: for each center, most active processes go closest."""
    if not dist.is_product:
        raise UnsupportedDistributionError("C_min needs a product distribution")
    p = np.sort(dist.activities)[::-1]
    D = np.sort(t.distance_matrix, axis=1)
    return float((D @ p).min())


def triangle_count(x) -> int:
    """Lattice points in the right triangle with axis-parallel legs x and x/2."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    fl = math.floor(x)
    return sum(fl + 1 - 2 * i for i in range(math.floor(Fraction(x) / 2) + 1))


def polygon_rank_bound(a: int, b: int) -> int:
    """Lattice points of the dominating polygon for a node offset (a, b) from the center."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be >= 1")
    s1 = (a - 1) * (b - 1)
    s2 = triangle_count(a - 1)
    s3 = triangle_count(b + Fraction(a, 2))
    s4 = triangle_count(a + Fraction(b, 2))
    s5 = triangle_count(b - 1)
    return s1 + s2 + s3 + s4 + s5 - 3


@dataclass(frozen=True)
class RingClusterAnalytics:
    """Closed forms for c clusters of 2k+1 members on a ring.

    ``interleaved_epl`` and ``contiguous_epl`` are the classical closed forms
    and ``ratio`` their quotient (3c/2). The closed form for the contiguous
    block counts every unordered pair once, while the interleaved one averages
    over ordered pairs; ``contiguous_epl_ordered_pairs`` and
    ``ratio_ordered_pairs`` (3c/4) put both on the ordered-pair footing used by
    :func:`meplsim.metrics.epl`.
    """

    c: int
    k: int
    interleaved_epl: Fraction
    contiguous_epl: Fraction
    ratio: Fraction
    contiguous_epl_ordered_pairs: Fraction
    ratio_ordered_pairs: Fraction


def ring_cluster_analytics(c: int, k: int) -> RingClusterAnalytics:
    if c < 2 or k < 1:
        raise ValueError("need c >= 2 and k >= 1")
    inter = Fraction(c * k * (k + 1), 2 * k + 1)
    contig = Fraction(k * (2 * k + 2), 3 * (2 * k + 1))
    return RingClusterAnalytics(c, k, inter, contig, inter / contig, 2 * contig, inter / (2 * contig))


@dataclass
class RatioStudy:
    ratios: list[float]
    max_ratio: float
    mean_ratio: float
    histogram: tuple[list[int], list[float]]


def approximation_ratio_study(t: Topology, dist_family: str, rule: str, move_set: str = "adjacent",
                              trials: int = 100, seed: int = 0, active: int | None = None,
                              kernels=None) -> RatioStudy:
    """Local-minimum EPL reached by dynamics from random starts, over brute-force MEPL.

    Each trial draws an activity vector from ``dist_family`` on ``active``
    randomly chosen processes (default: all, capped at the brute-force
    limit), a random initial placement, runs round-robin dynamics and divides.
    """
    m = min(active or t.n, t.n, DEFAULT_ACTIVE_LIMIT)
    ratios = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        base = random_activities(m, dist_family, seed=rng.integers(1 << 32), s=1.0).activities
        p = np.zeros(t.n)
        p[rng.choice(t.n, size=m, replace=False)] = base
        dist = ActivityDistribution(p)
        start = Placement.random(t.n, rng)
        final, _ = run_dynamics(t, dist, start, DynamicsConfig(rule=rule, move_set=move_set),
                                kernels=kernels)
        opt = brute_force_mepl(t, dist, kernels=kernels)
        ratios.append(approximation_ratio(epl(t, dist, final), opt.mepl_value))
    arr = np.asarray(ratios)
    top = max(1.0, float(arr.max())) + 1e-9
    counts, edges = np.histogram(arr, bins=10, range=(1.0 - 1e-9, top))
    return RatioStudy(ratios, float(arr.max()), float(arr.mean()),
                      (counts.tolist(), edges.tolist()))
