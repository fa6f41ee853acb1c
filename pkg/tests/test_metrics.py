import math

import numpy as np
import pytest
from conftest import dirichlet_dist, naive_epl
from hypothesis import given, settings
from hypothesis import strategies as st

from meplsim.distributions import (clustered_distribution, interleaved_ring_placement, product_distribution,
                                   uniform_cluster_spec)
from meplsim.metrics import (UnsupportedDistributionError, bound_report, center_sums, epl, expected_center,
                             expected_rank, expected_sqrt_rank, ranks)
from meplsim.placement import Placement
from meplsim.topology import grid, line, ring, torus


def test_epl_examples():
    t = line(2)
    assert epl(t, product_distribution([1, 1]), Placement.identity(2)) == 0.5
    t, d, pl = interleaved_ring_placement(2, 1)
    assert epl(t, d, pl) == pytest.approx(4 / 3, abs=1e-12)


def test_contiguous_ring_clusters_measured():
    # per-cluster ordered-pair average over 5 contiguous ring hosts is 40/25
    t, d, _ = interleaved_ring_placement(4, 2)
    assert epl(t, d, Placement.identity(t.n)) == pytest.approx(1.6, abs=1e-12)
    hosts = np.arange(5)
    D = t.distance_matrix[np.ix_(hosts, hosts)]
    assert D.sum() / 25 == pytest.approx(1.6, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["line", "ring", "grid", "torus"]))
def test_epl_matches_pair_loop(seed, kind):
    rng = np.random.default_rng(seed)
    t = {"line": line(7), "ring": ring(6), "grid": grid(2, 3), "torus": torus(2, 3)}[kind]
    d = dirichlet_dist(t.n, rng, int(rng.integers(1, t.n + 1)))
    pl = Placement.random(t.n, rng)
    assert epl(t, d, pl) == pytest.approx(naive_epl(t, d, pl.forward), abs=1e-12)
    assert epl(t, d.to_pairs(), pl) == pytest.approx(epl(t, d, pl), abs=1e-12)


def test_pair_epl_matches_loop(rng):
    t = ring(12)
    d = clustered_distribution(uniform_cluster_spec(12, 3, inactive=3))
    pl = Placement.random(12, rng)
    assert epl(t, d, pl) == pytest.approx(naive_epl(t, d, pl.forward), abs=1e-12)


def test_center_examples():
    c, C = expected_center(line(3), product_distribution([1, 1, 1]), Placement.identity(3))
    assert c == 1 and C == pytest.approx(2 / 3)
    pl = Placement([4, 0, 1, 2, 3])
    c, C = expected_center(line(5), product_distribution([0, 0, 1, 0, 0]), pl)
    assert c == pl.host(2) and C == 0.0
    # ties resolve to the lowest host
    c, C = expected_center(line(2), product_distribution([1, 1]), Placement.identity(2))
    assert c == 0 and C == 0.5


def test_center_matches_exhaustive_host_scan(rng):
    t = grid(2, 3)
    d = product_distribution([0.5, 0.3, 0.2] + [0] * 6)
    for _ in range(10):
        pl = Placement.random(9, rng)
        vals = [sum(d.activities[u] * t.distance(pl.host(u), x) for u in range(9)) for x in range(9)]
        c, C = expected_center(t, d, pl)
        assert C == pytest.approx(min(vals), abs=1e-12)
        assert c == int(np.argmin(np.round(vals, 12)))
        assert np.allclose(center_sums(t, d, pl), vals)


def test_center_rejects_pair_distributions():
    t, d, pl = interleaved_ring_placement(2, 1)
    with pytest.raises(UnsupportedDistributionError):
        expected_center(t, d, pl)
    with pytest.raises(UnsupportedDistributionError):
        bound_report(t, d, pl)


def test_ranks_examples():
    assert ranks(product_distribution([0.5, 0.3, 0.2])).tolist() == [0, 1, 2]
    assert ranks(product_distribution([1, 1, 1, 1])).tolist() == [0, 1, 2, 3]
    assert ranks(product_distribution([0.1, 0.7, 0.2])).tolist() == [2, 0, 1]


def test_expected_rank_examples():
    assert expected_rank(product_distribution([1, 0, 0])) == 0.0
    assert expected_rank(product_distribution([1] * 6)) == pytest.approx(2.5)
    assert expected_rank(product_distribution([0.5, 0.3, 0.2])) == pytest.approx(0.7)
    assert expected_sqrt_rank(product_distribution([0.5, 0.3, 0.2])) == pytest.approx(0.3 + 0.2 * math.sqrt(2))


def test_bound_report_examples():
    r = bound_report(line(2), product_distribution([1, 1]), Placement.identity(2))
    assert r.c_value == 0.5 and r.epl == 0.5 and r.sandwich_ok
    d = r.to_dict()
    for key in ("epl", "c_value", "center", "expected_rank", "expected_sqrt_rank", "sandwich_ok",
                "upper_2ER", "upper_4div_sqrt6", "lower_half_ER", "lower_inv_sqrt2"):
        assert key in d
    r = bound_report(line(4), product_distribution([4, 3, 2, 1]), Placement.identity(4), "line",
                     local_minimum=True)
    assert set(r.checks) == {"epl_ge_half_ER", "c_le_ER", "epl_le_2ER"} and all(r.checks.values())
    r = bound_report(grid(2, 3), product_distribution(range(1, 10)), Placement.identity(9), "grid2d")
    assert list(r.checks) == ["epl_ge_inv_sqrt2_ESR"]
    with pytest.raises(ValueError):
        bound_report(line(2), product_distribution([1, 1]), Placement.identity(2), "cube")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_sandwich_property(seed):
    rng = np.random.default_rng(seed)
    t = (line(9), ring(10), grid(2, 4), torus(2, 4))[seed % 4]
    d = dirichlet_dist(t.n, rng, int(rng.integers(1, t.n + 1)))
    r = bound_report(t, d, Placement.random(t.n, rng))
    assert r.c_value <= r.epl + 1e-9 and r.epl <= 2 * r.c_value + 1e-9
