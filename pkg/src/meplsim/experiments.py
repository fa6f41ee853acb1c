"""Scenario runner and the ring/torus cluster ratio sweep.

Output files (UTF-8):

* ``trace_rep{r}.csv``: one row per accepted switch, columns as in
  :data:`meplsim.dynamics.TRACE_COLUMNS`; row ``step == 0`` is the start state.
* ``snapshot_{initial,final}_rep{r}.csv``: one row per host with columns
  ``host, x, y, cluster_id, is_center, process``.
* ``summary.json``: scenario echo, per-trial numbers and their means.
* ``ratio_curve.csv`` / ``ratio_trials.csv``: written by the sweep.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .distributions import (ActivityDistribution, ClusterSpec, PairDistribution, clustered_distribution,
                            interleaved_ring_placement, product_distribution, random_activities,
                            uniform_cluster_spec, worst_case_line_arrangement)
from .dynamics import DynamicsConfig, DynamicsTrace, run_dynamics
from .metrics import expected_center
from .placement import Placement
from .topology import Topology, build_topology, ring, torus

SNAPSHOT_COLUMNS = ("host", "x", "y", "cluster_id", "is_center", "process")
CURVE_COLUMNS = ("cluster_count", "mean_initial_epl", "mean_final_epl", "mean_ratio", "std_ratio",
                 "repetitions", "cluster_sizes")
TRIAL_COLUMNS = ("cluster_count", "rep", "seed", "initial_epl", "final_epl", "ratio", "sweeps", "steps")


class ScenarioError(ValueError):
    pass


def worker_count() -> int:
    env = os.environ.get("MEPLSIM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# scenario description


@dataclass
class Scenario:
    topology: dict
    distribution: dict
    placement: dict = field(default_factory=lambda: {"type": "random"})
    dynamics: dict = field(default_factory=dict)
    repetitions: int = 1
    seed: int = 0
    output: str | None = None
    name: str = "scenario"

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ScenarioError(f"unknown scenario keys {sorted(unknown)}")
        for key in ("topology", "distribution"):
            if key not in d:
                raise ScenarioError(f"scenario needs a {key!r} entry")
        s = cls(**d)
        if s.repetitions < 1:
            raise ScenarioError("repetitions must be >= 1")
        return s

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Instance:
    topology: Topology
    dist: ActivityDistribution | PairDistribution
    labels: np.ndarray              # cluster id per process, 0 = inactive
    construction: Placement | None  # placement implied by the instance, if any
    meta: dict


def _labels_from_activity(dist: ActivityDistribution) -> np.ndarray:
    return (dist.activities > 0).astype(np.int64)


def build_instance(topo_spec: dict, dist_spec: dict) -> Instance:
    """Topology plus distribution from their JSON descriptions.

    Distribution types: ``product`` (``activities``), ``random`` (``family``,
    ``seed``, optional ``s``/``alpha``), ``clustered`` (``clusters`` count or
    explicit member lists, optional ``cluster_size``, ``inactive``,
    ``weights``), ``pairs`` (``entries`` = [[u, v, p], ...]),
    ``interleaved_ring`` (``c``, ``k``) and ``worst_case_line`` (``d``, ``side``).
    The last two also fix the topology and a construction placement.
    """
    kind = dist_spec.get("type")
    if kind == "interleaved_ring":
        t, dist, pl = interleaved_ring_placement(int(dist_spec["c"]), int(dist_spec["k"]))
        k = int(dist_spec["k"])
        labels = np.repeat(np.arange(1, int(dist_spec["c"]) + 1), 2 * k + 1)
        return Instance(t, dist, labels, pl, {"clusters": int(dist_spec["c"]), "cluster_size": 2 * k + 1})
    if kind == "worst_case_line":
        t, dist, pl = worst_case_line_arrangement(int(dist_spec["d"]), int(dist_spec["side"]))
        return Instance(t, dist, _labels_from_activity(dist), pl, {})
    t = build_topology(topo_spec)
    n = t.n
    if kind == "product":
        dist = product_distribution(dist_spec["activities"])
        labels = _labels_from_activity(dist)
        meta = {}
    elif kind == "random":
        dist = random_activities(n, dist_spec.get("family", "uniform"), seed=dist_spec.get("seed", 0),
                                 s=float(dist_spec.get("s", 1.0)), alpha=float(dist_spec.get("alpha", 1.0)))
        labels = _labels_from_activity(dist)
        meta = {}
    elif kind == "clustered":
        cl = dist_spec["clusters"]
        if isinstance(cl, int):
            spec = uniform_cluster_spec(n, cl, dist_spec.get("cluster_size"), int(dist_spec.get("inactive", 0)))
            if "weights" in dist_spec:
                spec = ClusterSpec(n, spec.clusters, tuple(float(w) for w in dist_spec["weights"]))
        else:
            groups = tuple(tuple(int(u) for u in g) for g in cl)
            weights = dist_spec.get("weights", [1.0 / len(groups)] * len(groups))
            spec = ClusterSpec(n, groups, tuple(float(w) for w in weights))
        dist = clustered_distribution(spec)
        labels = spec.labels()
        meta = {"cluster_sizes": [len(g) for g in spec.clusters], "inactive": len(spec.inactive)}
    elif kind == "pairs":
        e = np.asarray(dist_spec["entries"], dtype=np.float64).reshape(-1, 3)
        dist = PairDistribution(e[:, 0].astype(np.int64), e[:, 1].astype(np.int64), e[:, 2], n,
                                symmetric=bool(dist_spec.get("symmetric", False)))
        labels = (dist.marginals > 0).astype(np.int64)
        meta = {}
    else:
        raise ScenarioError(f"unknown distribution type {kind!r}")
    if dist.n != n:
        raise ScenarioError(f"distribution has {dist.n} processes, topology {n} hosts")
    return Instance(t, dist, labels, None, meta)


def initial_placement(inst: Instance, spec: dict, rng: np.random.Generator) -> Placement:
    kind = spec.get("type", "random")
    n = inst.topology.n
    if kind == "random":
        return Placement.random(n, rng)
    if kind == "identity":
        return Placement.identity(n)
    if kind == "explicit":
        return Placement(spec["forward"])
    if kind == "construction":
        if inst.construction is None:
            raise ScenarioError("this distribution has no construction placement")
        return inst.construction
    raise ScenarioError(f"unknown placement type {kind!r}")


# ---------------------------------------------------------------------------
# snapshots and cluster statistics


def cluster_centers(t: Topology, dist, labels: np.ndarray, pl: Placement) -> dict[int, int]:
    """Center host per cluster id (the expected center for product distributions)."""
    if dist.is_product:
        return {1: expected_center(t, dist, pl)[0]}
    D = t.distance_matrix
    out = {}
    for cid in np.unique(labels[labels > 0]):
        hosts = pl.forward[labels == cid]
        S = D[hosts].sum(axis=0)
        out[int(cid)] = int(np.flatnonzero(S == S.min())[0])
    return out


def snapshot_rows(t: Topology, dist, labels: np.ndarray, pl: Placement) -> list[list]:
    coords = t.coord_array
    centers = set(cluster_centers(t, dist, labels, pl).values())
    rows = []
    for h in range(t.n):
        c = coords[h]
        x = int(c[0]) if t.is_lattice else h
        y = int(c[1]) if t.is_lattice and t.d > 1 else 0
        u = int(pl.inverse[h])
        rows.append([h, x, y, int(labels[u]), int(h in centers), u])
    return rows


def mean_intra_cluster_distance(t: Topology, labels: np.ndarray, pl: Placement) -> float:
    """Mean host distance over ordered pairs of distinct members of the same cluster."""
    D = t.distance_matrix
    tot, cnt = 0.0, 0
    for cid in np.unique(labels[labels > 0]):
        hosts = pl.forward[labels == cid]
        m = hosts.size
        if m > 1:
            tot += float(D[np.ix_(hosts, hosts)].sum())
            cnt += m * (m - 1)
    return tot / cnt if cnt else 0.0


def random_baseline_distance(t: Topology) -> float:
    """Expected distance between two distinct uniformly random hosts."""
    n = t.n
    return float(t.distance_matrix.sum()) / (n * (n - 1)) if n > 1 else 0.0


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# scenario runs


def _trial_seeds(seed: int, reps: int) -> list[int]:
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(reps)]


def _one_trial(inst: Instance, s: Scenario, rep: int, trial_seed: int, kernels=None):
    rng = np.random.default_rng(trial_seed)
    pl0 = initial_placement(inst, s.placement, rng)
    cfg_d = dict(s.dynamics)
    cfg_d["seed"] = int(rng.integers(0, 2**63 - 1))
    cfg = DynamicsConfig.from_dict(cfg_d)
    final, trace = run_dynamics(inst.topology, inst.dist, pl0, cfg, kernels=kernels)
    return pl0, final, trace


def _trial_record(inst, rep, trial_seed, pl0, final, trace: DynamicsTrace) -> dict:
    rec = {
        "rep": rep, "seed": trial_seed,
        "initial_epl": trace.initial_epl, "final_epl": trace.final_epl,
        "ratio": trace.initial_epl / trace.final_epl if trace.final_epl > 0 else 1.0,
        "initial_c": None if math.isnan(trace.initial_c) else trace.initial_c,
        "final_c": None if math.isnan(trace.final_c) else trace.final_c,
        "sweeps": trace.sweeps, "steps": len(trace.steps), "terminated": trace.terminated,
    }
    if (inst.labels > 0).any():
        rec["initial_intra_cluster_distance"] = mean_intra_cluster_distance(inst.topology, inst.labels, pl0)
        rec["final_intra_cluster_distance"] = mean_intra_cluster_distance(inst.topology, inst.labels, final)
    return rec


def summarize(trials: list[dict]) -> dict:
    keys = ("initial_epl", "final_epl", "ratio", "final_intra_cluster_distance")
    out = {}
    for k in keys:
        vals = [t[k] for t in trials if t.get(k) is not None]
        if vals:
            out["mean_" + k] = float(np.mean(vals))
    return out


def run_scenario(s: Scenario, out_dir=None, kernels=None) -> dict:
    """Run every repetition; write traces, snapshots and ``summary.json`` if an output dir is set.

    Returns the summary dictionary. Trials run concurrently; the files are
    written afterwards in repetition order, so output is independent of the
    thread count.
    """
    inst = build_instance(s.topology, s.distribution)
    out = Path(out_dir or s.output) if (out_dir or s.output) else None
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ScenarioError(f"cannot create output directory {out}: {exc}") from exc
    seeds = _trial_seeds(s.seed, s.repetitions)
    with ThreadPoolExecutor(max_workers=min(worker_count(), s.repetitions)) as ex:
        results = list(ex.map(lambda r: _one_trial(inst, s, r, seeds[r], kernels), range(s.repetitions)))

    trials = []
    for rep, (pl0, final, trace) in enumerate(results):
        trials.append(_trial_record(inst, rep, seeds[rep], pl0, final, trace))
        if out is not None:
            with open(out / f"trace_rep{rep}.csv", "w", encoding="utf-8", newline="") as fh:
                trace.write_csv(fh)
            for tag, pl in (("initial", pl0), ("final", final)):
                _write_csv(out / f"snapshot_{tag}_rep{rep}.csv", SNAPSHOT_COLUMNS,
                           snapshot_rows(inst.topology, inst.dist, inst.labels, pl))
    summary = {
        "scenario": s.to_dict(),
        "hosts": inst.topology.n,
        "instance": inst.meta,
        "random_baseline_distance": random_baseline_distance(inst.topology),
        "trials": trials,
        "aggregate": summarize(trials),
    }
    if out is not None:
        with open(out / "summary.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return summary


def summary_from_traces(out_dir) -> list[tuple[float, float]]:
    """(initial_epl, final_epl) per repetition, read back from the trace files."""
    res = []
    r = 0
    while (p := Path(out_dir) / f"trace_rep{r}.csv").exists():
        with open(p, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        res.append((float(rows[0]["epl_after"]), float(rows[-1]["epl_after"])))
        r += 1
    return res


# ---------------------------------------------------------------------------
# ratio curve


@dataclass
class RatioCurvePoint:
    cluster_count: int
    mean_initial_epl: float
    mean_final_epl: float
    mean_ratio: float
    std_ratio: float
    repetitions: int
    cluster_sizes: list[int] = field(default_factory=list)
    trials: list[dict] = field(default_factory=list, repr=False)


def sweep_topology(kind: str, n: int) -> Topology:
    if kind == "ring":
        return ring(n)
    if kind == "torus":
        k = math.isqrt(n)
        if k * k != n:
            raise ValueError(f"torus sweep needs a square host count, got {n}")
        return torus(2, k)
    raise ValueError(f"unknown sweep topology {kind!r}")


def cluster_ratio_sweep(kind: str, n: int, cluster_counts, reps: int, seed: int,
                        inactive: int = 0, move_set: str = "adjacent", kernels=None,
                        ) -> list[RatioCurvePoint]:
    """Initial/final EPL ratio of M-rule dynamics from random starts, per cluster count.

    Clusters get equal weight and split the ``n - inactive`` active processes
    as evenly as possible. Every (cluster count, repetition) pair has its own
    seed spawned from ``seed``.
    """
    t = sweep_topology(kind, n)
    cfg = DynamicsConfig(rule="M", move_set=move_set)
    counts = [int(c) for c in cluster_counts]
    children = np.random.SeedSequence(seed).spawn(len(counts))
    jobs = []
    dists = {}
    for c, child in zip(counts, children):
        spec = uniform_cluster_spec(n, c, inactive=inactive)
        dists[c] = (clustered_distribution(spec), [len(g) for g in spec.clusters])
        for r, g in enumerate(child.spawn(reps)):
            jobs.append((c, r, int(g.generate_state(1)[0])))

    def work(job):
        c, r, s = job
        pl0 = Placement.random(n, np.random.default_rng(s))
        _, trace = run_dynamics(t, dists[c][0], pl0, cfg, kernels=kernels)
        fe = trace.final_epl
        return {"cluster_count": c, "rep": r, "seed": s, "initial_epl": trace.initial_epl,
                "final_epl": fe, "ratio": trace.initial_epl / fe if fe > 0 else 1.0,
                "sweeps": trace.sweeps, "steps": len(trace.steps)}

    with ThreadPoolExecutor(max_workers=worker_count()) as ex:
        results = list(ex.map(work, jobs))

    points = []
    for c in counts:
        rows = [x for x in results if x["cluster_count"] == c]
        ratios = np.array([x["ratio"] for x in rows])
        points.append(RatioCurvePoint(
            c, float(np.mean([x["initial_epl"] for x in rows])),
            float(np.mean([x["final_epl"] for x in rows])),
            float(ratios.mean()), float(ratios.std()), reps, dists[c][1], rows))
    return points


def write_ratio_curve(points: list[RatioCurvePoint], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "ratio_curve.csv", CURVE_COLUMNS,
               [[p.cluster_count, repr(p.mean_initial_epl), repr(p.mean_final_epl), repr(p.mean_ratio),
                 repr(p.std_ratio), p.repetitions, " ".join(map(str, p.cluster_sizes))] for p in points])
    _write_csv(out / "ratio_trials.csv", TRIAL_COLUMNS,
               [[t[k] if not isinstance(t[k], float) else repr(t[k]) for k in TRIAL_COLUMNS]
                for p in points for t in p.trials])


def backend() -> str:
    return _kernels.BACKEND
