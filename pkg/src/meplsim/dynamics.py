"""Greedy local switching (M-rule / C-rule) and local-minimum certificates."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .distributions import ActivityDistribution
from .metrics import CENTER_TIE_TOL, UnsupportedDistributionError, center_sums, epl, expected_center
from .placement import Placement
from .topology import MOVE_SETS, Topology

RULES = ("M", "C")
SCHEDULES = ("round_robin", "random_pair")
MODES = ("exact", "online")
DEFAULT_EPS = 1e-12

TRACE_COLUMNS = ("sweep", "step", "u", "v", "host_u", "host_v", "rule", "delta", "epl_after", "c_after")


@dataclass(frozen=True)
class DynamicsConfig:
    rule: str = "M"
    move_set: str = "adjacent"
    schedule: str = "round_robin"
    seed: int | None = None
    epsilon: float = DEFAULT_EPS
    max_sweeps: int = 10_000
    mode: str = "exact"
    window: int = 0

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")
        if self.move_set not in MOVE_SETS:
            raise ValueError(f"move_set must be one of {MOVE_SETS}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if (self.mode == "online" or self.schedule == "random_pair") and self.seed is None:
            raise ValueError(f"{self.mode}/{self.schedule} dynamics need a seed")

    @classmethod
    def from_dict(cls, d: dict) -> "DynamicsConfig":
        return cls(**d)


@dataclass(frozen=True)
class TraceStep:
    sweep: int
    step: int
    u: int
    v: int
    host_u: int
    host_v: int
    delta: float
    epl_after: float
    c_after: float


@dataclass
class DynamicsTrace:
    rule: str
    initial_epl: float
    initial_c: float
    steps: list[TraceStep] = field(default_factory=list)
    terminated: str = "max_sweeps"
    sweeps: int = 0

    @property
    def final_epl(self) -> float:
        return self.steps[-1].epl_after if self.steps else self.initial_epl

    @property
    def final_c(self) -> float:
        return self.steps[-1].c_after if self.steps else self.initial_c

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        # step 0 carries the initial state so summaries can be rebuilt from the file alone
        w.writerow([0, 0, "", "", "", "", self.rule, "", repr(float(self.initial_epl)),
                    repr(float(self.initial_c))])
        for s in self.steps:
            w.writerow([s.sweep, s.step, s.u, s.v, s.host_u, s.host_v, self.rule,
                        repr(s.delta), repr(s.epl_after), repr(s.c_after)])

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


class _Deltas:
    """Switch deltas evaluated directly from the distribution (no kernel)."""

    def __init__(self, t: Topology, dist):
        self.D = t.distance_matrix
        self.product = dist.is_product
        self.p = np.asarray(dist.marginals, dtype=np.float64)
        if self.product:
            self.act = dist.active()
        else:
            self.wptr, self.widx, self.wval = dist.symmetric_weights()

    def m_delta(self, fwd, u, v) -> float:
        D = self.D
        h, h2 = fwd[u], fwd[v]
        if self.product:
            others = self.act[(self.act != u) & (self.act != v)]
            hw = fwd[others]
            diff = D[h2, hw].astype(np.float64) - D[h, hw]
            return float(2.0 * (self.p[u] - self.p[v]) * np.dot(self.p[others], diff))
        total = 0.0
        for a, b, sign in ((u, v, 1.0), (v, u, -1.0)):
            lo, hi = self.wptr[a], self.wptr[a + 1]
            nb = self.widx[lo:hi]
            keep = nb != b
            hw = fwd[nb[keep]]
            total += sign * float(np.dot(self.wval[lo:hi][keep], D[h2, hw].astype(np.float64) - D[h, hw]))
        return total

    def c_delta(self, fwd, u, v, center) -> float:
        D = self.D
        return float((self.p[u] - self.p[v]) * (D[fwd[v], center] - D[fwd[u], center]))


def switch_delta(t: Topology, dist, pl: Placement, u: int, v: int, rule: str,
                 center: int | None = None) -> float:
    """Change of the rule's objective if processes ``u`` and ``v`` swap hosts.

    M-rule: change in EPL. C-rule: change in expected distance to the current
    center, which is held fixed (pass ``center`` to override). Negative values
    are improvements.
    """
    if u == v:
        raise ValueError("a switch needs two distinct processes")
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    ev = _Deltas(t, dist)
    if rule == "M":
        return ev.m_delta(pl.forward, u, v)
    if not dist.is_product:
        raise UnsupportedDistributionError("the C-rule needs a product distribution")
    if center is None:
        center, _ = expected_center(t, dist, pl)
    return ev.c_delta(pl.forward, u, v, center)


def _candidate_pairs(t: Topology, move_set: str):
    ptr, idx = t.move_csr(move_set)
    for h in range(t.n):
        for h2 in idx[ptr[h]:ptr[h + 1]]:
            if h2 > h:
                yield h, int(h2)


def is_local_minimum(t: Topology, dist, pl: Placement, rule: str, move_set: str = "adjacent",
                     eps: float = DEFAULT_EPS) -> bool:
    """True iff no switch in the move set improves the rule's objective by more than eps."""
    if rule == "C" and not dist.is_product:
        raise UnsupportedDistributionError("the C-rule needs a product distribution")
    ev = _Deltas(t, dist)
    fwd, inv = pl.forward, pl.inverse
    center = expected_center(t, dist, pl)[0] if rule == "C" else None
    for h, h2 in _candidate_pairs(t, move_set):
        u, v = int(inv[h]), int(inv[h2])
        if ev.p[u] == 0.0 and ev.p[v] == 0.0:
            continue
        d = ev.m_delta(fwd, u, v) if rule == "M" else ev.c_delta(fwd, u, v, center)
        if d < -eps:
            return False
    return True


def verify_center_monotone(t: Topology, dist: ActivityDistribution, pl: Placement,
                           move_set: str = "adjacent", tol: float = DEFAULT_EPS) -> list[tuple[int, int]]:
    """Ordered process pairs (u, v) breaking center monotonicity.

    A pair violates the property when phi(v) is reachable from phi(u) along
    legal switch moves that each get strictly closer to the center, yet
    p(u) > p(v) + tol.
    """
    if not dist.is_product:
        raise UnsupportedDistributionError("center monotonicity needs a product distribution")
    c, _ = expected_center(t, dist, pl)
    D = t.distance_matrix
    dc = D[:, c]
    ptr, idx = t.move_csr(move_set)
    n = t.n
    reach = np.zeros((n, n), dtype=bool)
    for x in np.argsort(dc, kind="stable"):
        for y in idx[ptr[x]:ptr[x + 1]]:
            if dc[y] < dc[x]:
                reach[x, y] = True
                reach[x] |= reach[y]
    p = dist.activities
    pu = p[pl.inverse]  # activity of the process at each host
    bad = reach & (pu[:, None] > pu[None, :] + tol)
    xs, ys = np.nonzero(bad)
    return [(int(pl.inverse[x]), int(pl.inverse[y])) for x, y in zip(xs, ys)]


def _kernel_inputs(t: Topology, dist, cfg: DynamicsConfig):
    D = np.ascontiguousarray(t.distance_matrix, dtype=np.int32)
    mptr, midx = t.move_csr(cfg.move_set)
    p = np.ascontiguousarray(dist.marginals, dtype=np.float64)
    act = np.ascontiguousarray(dist.active(), dtype=np.int64)
    if dist.is_product:
        wptr = np.zeros(t.n + 1, dtype=np.int64)
        widx = np.zeros(0, dtype=np.int64)
        wval = np.zeros(0)
    else:
        wptr, widx, wval = dist.symmetric_weights()
    return D, mptr, midx, p, act, wptr, widx, wval


def run_dynamics(t: Topology, dist, pl0: Placement, cfg: DynamicsConfig,
                 kernels=None) -> tuple[Placement, DynamicsTrace]:
    """Run greedy switching until a sweep accepts nothing or ``max_sweeps`` is hit.

    ``kernels`` overrides the backend module (testing/benchmarks).
    """
    if cfg.mode == "online":
        return run_online_dynamics(t, dist, pl0, cfg)
    if t.n != dist.n or t.n != len(pl0):
        raise ValueError("topology, distribution and placement sizes differ")
    if cfg.rule == "C" and not dist.is_product:
        raise UnsupportedDistributionError("the C-rule needs a product distribution")
    k = kernels or _kernels
    n = t.n
    D, mptr, midx, p, act, wptr, widx, wval = _kernel_inputs(t, dist, cfg)
    fwd = pl0.forward.copy()
    inv = pl0.inverse.copy()
    pair_mode = not dist.is_product
    if pair_mode:
        S = np.zeros(n)
        state = np.array([epl(t, dist, pl0), np.nan, 0.0])
    else:
        S = np.ascontiguousarray(center_sums(t, dist, pl0))
        c = k.pick_center(S, CENTER_TIE_TOL)
        state = np.array([epl(t, dist, pl0), S[c], float(c)])
    trace = DynamicsTrace(rule=cfg.rule, initial_epl=float(state[0]), initial_c=float(state[1]))
    rule_code = _kernels.RULE_M if cfg.rule == "M" else _kernels.RULE_C
    rng = np.random.default_rng(cfg.seed)
    out_i = [np.zeros(n, dtype=np.int64) for _ in range(4)]
    out_f = [np.zeros(n) for _ in range(3)]
    zeros = np.zeros(n, dtype=np.int64)
    ident = np.arange(n, dtype=np.int64)
    step = 0
    for sweep_no in range(1, cfg.max_sweeps + 1):
        if cfg.schedule == "round_robin":
            order, rot = ident, zeros
        else:
            order = rng.permutation(n).astype(np.int64)
            rot = rng.integers(0, 1 << 30, size=n, dtype=np.int64)
        cnt = k.sweep(D, mptr, midx, fwd, inv, order, rot, rule_code, p, act,
                      wptr, widx, wval, pair_mode, S, state, cfg.epsilon, CENTER_TIE_TOL,
                      *out_i, *out_f)
        trace.sweeps = sweep_no
        for i in range(cnt):
            step += 1
            trace.steps.append(TraceStep(
                sweep_no, step, int(out_i[0][i]), int(out_i[1][i]), int(out_i[2][i]), int(out_i[3][i]),
                float(out_f[0][i]), float(out_f[1][i]), float(out_f[2][i])))
        if cnt == 0:
            trace.terminated = "local_min"
            break
    return Placement(fwd), trace


def run_online_dynamics(t: Topology, dist: ActivityDistribution, pl0: Placement,
                        cfg: DynamicsConfig) -> tuple[Placement, DynamicsTrace]:
    """Switching driven by sampled requests instead of the true activities.

    Each sweep draws ``cfg.window`` requests from p x p. A switch of u and v is
    judged on the activities estimated from the partners seen in requests that
    involve u or v; with no such request there is no evidence and no switch.
    Trace values (epl_after, c_after) are the true ones.
    """
    if not dist.is_product:
        raise UnsupportedDistributionError("online dynamics sample from a product distribution")
    if cfg.seed is None:
        raise ValueError("online dynamics need a seed")
    n = t.n
    D = t.distance_matrix
    Df = D.astype(np.float64)
    mptr, midx = t.move_csr(cfg.move_set)
    p = dist.activities
    rng = np.random.default_rng(cfg.seed)
    fwd = pl0.forward.copy()
    inv = pl0.inverse.copy()
    c0 = expected_center(t, dist, pl0)[1]
    trace = DynamicsTrace(rule=cfg.rule, initial_epl=epl(t, dist, pl0), initial_c=c0)
    order_rr = np.arange(n)
    step = 0
    for sweep_no in range(1, cfg.max_sweeps + 1):
        trace.sweeps = sweep_no
        if cfg.window > 0:
            a = rng.choice(n, size=cfg.window, p=p)
            b = rng.choice(n, size=cfg.window, p=p)
            counts = np.bincount(a * n + b, minlength=n * n).reshape(n, n).astype(np.float64)
            counts = counts + counts.T
        else:
            counts = np.zeros((n, n))
        if cfg.schedule == "round_robin":
            order, rot = order_rr, np.zeros(n, dtype=np.int64)
        else:
            order = rng.permutation(n)
            rot = rng.integers(0, 1 << 30, size=n)
        accepted = 0
        for u in order:
            u = int(u)
            h = int(fwd[u])
            cand = midx[mptr[h]:mptr[h + 1]]
            if cand.size == 0:
                continue
            start = int(rot[u]) % cand.size
            for j in range(cand.size):
                h2 = int(cand[(start + j) % cand.size])
                v = int(inv[h2])
                seen = counts[u] + counts[v]
                tot = seen.sum()
                if tot == 0:
                    continue
                q = seen / tot
                if q[u] == 0.0 and q[v] == 0.0:
                    continue
                if cfg.rule == "M":
                    others = np.ones(n, dtype=bool)
                    others[[u, v]] = False
                    diff = Df[h2, fwd[others]] - Df[h, fwd[others]]
                    delta = 2.0 * (q[u] - q[v]) * float(np.dot(q[others], diff))
                else:
                    Sq = q @ Df[fwd]
                    c = int(np.flatnonzero(Sq <= Sq.min() + CENTER_TIE_TOL)[0])
                    delta = float((q[u] - q[v]) * (Df[h2, c] - Df[h, c]))
                if delta < -cfg.epsilon:
                    fwd[u], fwd[v] = h2, h
                    inv[h2], inv[h] = u, v
                    cur = Placement(fwd)
                    step += 1
                    accepted += 1
                    trace.steps.append(TraceStep(sweep_no, step, u, v, h, h2, delta,
                                                 epl(t, dist, cur), expected_center(t, dist, cur)[1]))
                    break
        if accepted == 0:
            trace.terminated = "local_min"
            break
    return Placement(fwd), trace
