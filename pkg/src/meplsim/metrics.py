"""Expected path length, expected center, ranks and the rank-based bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .distributions import ActivityDistribution, PairDistribution
from .placement import Placement
from .topology import Topology

INEQ_TOL = 1e-9
CENTER_TIE_TOL = 1e-12

CONTEXTS = ("line", "grid2d", "none")


class UnsupportedDistributionError(TypeError):
    """Raised when a product-only quantity is requested for a pair distribution."""


def _check_sizes(t: Topology, dist, pl: Placement) -> None:
    if not (t.n == dist.n == len(pl)):
        raise ValueError(f"size mismatch: topology {t.n}, distribution {dist.n}, placement {len(pl)}")


def epl(t: Topology, dist: ActivityDistribution | PairDistribution, pl: Placement) -> float:
    """Expected path length sum_{(u,v)} p(u,v) d(phi(u), phi(v))."""
    _check_sizes(t, dist, pl)
    D = t.distance_matrix
    if dist.is_product:
        act = dist.active()
        p = dist.activities[act]
        hosts = pl.forward[act]
        return float(p @ D[np.ix_(hosts, hosts)] @ p)
    return float(np.dot(dist.prob, D[pl.forward[dist.u], pl.forward[dist.v]]))


def center_sums(t: Topology, dist: ActivityDistribution, pl: Placement) -> np.ndarray:
    """Per-host expected distance sum_u p(u) d(phi(u), x)."""
    act = dist.active()
    return dist.activities[act] @ t.distance_matrix[pl.forward[act]].astype(np.float64)


def expected_center(t: Topology, dist: ActivityDistribution, pl: Placement) -> tuple[int, float]:
    """Center host and C; ties go to the lowest host index (within 1e-12)."""
    if not dist.is_product:
        raise UnsupportedDistributionError("expected center needs a product distribution")
    _check_sizes(t, dist, pl)
    S = center_sums(t, dist, pl)
    c = int(np.flatnonzero(S <= S.min() + CENTER_TIE_TOL)[0])
    return c, float(S[c])


def ranks(dist: ActivityDistribution) -> np.ndarray:
    """Rank per process: 0 for the most active, ties broken by ascending id."""
    p = dist.activities
    order = np.lexsort((np.arange(p.size), -p))
    r = np.empty(p.size, dtype=np.int64)
    r[order] = np.arange(p.size)
    return r


def expected_rank(dist: ActivityDistribution) -> float:
    return float(np.dot(dist.activities, ranks(dist)))


def expected_sqrt_rank(dist: ActivityDistribution) -> float:
    return float(np.dot(dist.activities, np.sqrt(ranks(dist))))


@dataclass
class BoundReport:
    epl: float
    c_value: float
    center: int
    expected_rank: float
    expected_sqrt_rank: float
    sandwich_ok: bool
    upper_2ER: float
    upper_4div_sqrt6: float
    lower_half_ER: float
    lower_inv_sqrt2: float
    context: str = "none"
    local_minimum: bool | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(t: Topology, dist, pl: Placement, context: str = "none",
                 local_minimum: bool | None = None) -> BoundReport:
    """Evaluate the sandwich inequality and the rank bounds for one placement.

    ``local_minimum`` is the caller's certificate that ``pl`` is a C-rule local
    minimum for the move set matching ``context`` (adjacent on a line,
    adjacent+knight on a 2-d grid); upper bounds are only checked when it is set.
    Lower bounds hold for MEPL, hence for every placement's EPL as well.
    """
    if not dist.is_product:
        raise UnsupportedDistributionError("rank bounds are undefined for pair distributions")
    if context not in CONTEXTS:
        raise ValueError(f"unknown context {context!r}")
    e = epl(t, dist, pl)
    center, c = expected_center(t, dist, pl)
    er = expected_rank(dist)
    esr = expected_sqrt_rank(dist)
    rep = BoundReport(
        epl=e, c_value=c, center=center, expected_rank=er, expected_sqrt_rank=esr,
        sandwich_ok=bool(c <= e + INEQ_TOL and e <= 2 * c + INEQ_TOL),
        upper_2ER=2 * er,
        upper_4div_sqrt6=4 / math.sqrt(6) * esr,
        lower_half_ER=er / 2,
        lower_inv_sqrt2=esr / math.sqrt(2),
        context=context, local_minimum=local_minimum,
    )
    if context == "line":
        rep.checks["epl_ge_half_ER"] = e >= rep.lower_half_ER - INEQ_TOL
        if local_minimum:
            rep.checks["c_le_ER"] = c <= er + INEQ_TOL
            rep.checks["epl_le_2ER"] = e <= rep.upper_2ER + INEQ_TOL
    elif context == "grid2d":
        rep.checks["epl_ge_inv_sqrt2_ESR"] = e >= rep.lower_inv_sqrt2 - INEQ_TOL
        if local_minimum:
            rep.checks["c_le_4div_sqrt6_ESR"] = c <= rep.upper_4div_sqrt6 + INEQ_TOL
    return rep
