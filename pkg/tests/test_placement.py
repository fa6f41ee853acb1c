import numpy as np
import pytest

from meplsim.placement import Placement


def test_inverse_and_lookup():
    pl = Placement([2, 0, 1])
    assert pl.inverse.tolist() == [1, 2, 0]
    assert pl.host(0) == 2 and pl.process(2) == 0
    assert Placement.from_inverse(pl.inverse) == pl


def test_not_a_bijection():
    with pytest.raises(ValueError):
        Placement([0, 0, 1])
    with pytest.raises(ValueError):
        Placement([0, 3, 1])


def test_swapped_and_immutability():
    pl = Placement.identity(4)
    s = pl.swapped(1, 3)
    assert s.forward.tolist() == [0, 3, 2, 1]
    assert pl.forward.tolist() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        pl.forward[0] = 1


def test_from_partial_fills_ascending():
    pl = Placement.from_partial({3: 0, 0: 2}, 5)
    assert pl.forward.tolist() == [2, 1, 3, 0, 4]


def test_relabeled():
    pl = Placement([1, 2, 0])
    r = pl.relabeled([2, 0, 1])
    assert r.host(2) == pl.host(0) and r.host(0) == pl.host(1)


def test_random_is_seeded():
    a = Placement.random(10, np.random.default_rng(1))
    b = Placement.random(10, np.random.default_rng(1))
    assert a == b and hash(a) == hash(b)
