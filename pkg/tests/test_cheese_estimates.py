import math

import numpy as np
import pytest

from quasicheese.cheese_estimates import (TouchesHole, bound_contributions,
                                          cheese_derivative_bound, circle_targets,
                                          distance_profile, verify_cheese_bound)
from quasicheese.geometry import AbstractSwissCheese, Disk
from quasicheese.rational_jets import RationalFunction

UNIT = Disk(0j, 1.0)
EMPTY = AbstractSwissCheese(UNIT)


@pytest.mark.parametrize("k", [0, 1, 5, 12])
def test_cauchy_estimate_without_holes(k):
    assert cheese_derivative_bound(EMPTY, 0, k) == pytest.approx(math.factorial(k), rel=1e-14)
    z = 0.3 + 0.1j
    d0 = 1 - abs(z)
    assert cheese_derivative_bound(EMPTY, z, k) == pytest.approx(math.factorial(k) / d0 ** (k + 1),
                                                                 rel=1e-13)


def test_single_hole_example():
    ch = AbstractSwissCheese(UNIT, (Disk(0.5, 0.2),))
    assert cheese_derivative_bound(ch, 0, 1) == pytest.approx(1 + 0.2 / 0.09, rel=1e-14)


def test_tail_term():
    ch = AbstractSwissCheese(UNIT, (), tail_bound=0.1)
    assert cheese_derivative_bound(ch, 0, 0, tail_d_min=0.5) == pytest.approx(1.2)
    parts = bound_contributions(ch, 0, 0, tail_d_min=0.5)
    assert parts == {"outer": pytest.approx(1.0), "holes": 0.0, "tail": pytest.approx(0.2)}
    with pytest.raises(ValueError):
        cheese_derivative_bound(ch, 0, 0)


def test_touching_raises():
    ch = AbstractSwissCheese(UNIT, (Disk(0.5, 0.2),))
    with pytest.raises(TouchesHole, match="point touches a deleted disk"):
        cheese_derivative_bound(ch, 0.3, 2)
    with pytest.raises(TouchesHole):
        cheese_derivative_bound(EMPTY, 1.0, 0)
    assert distance_profile(ch, 0.3).touching == [1]


def test_zero_radius_hole_has_no_effect():
    ch = AbstractSwissCheese(UNIT, (Disk(0.1, 0.0),))
    assert cheese_derivative_bound(ch, 0.1, 3) == pytest.approx(cheese_derivative_bound(EMPTY, 0.1, 3))


def _random_cheese(rng, n=15):
    c = rng.uniform(-0.6, 0.6, n) + 1j * rng.uniform(-0.6, 0.6, n)
    return AbstractSwissCheese.from_arrays(UNIT, c, rng.uniform(0.001, 0.03, n))


def _far_point(rng, ch):
    while True:
        z = complex(*rng.uniform(-0.7, 0.7, 2))
        if distance_profile(ch, z).d.min() > 0.02:
            return z


def test_adding_hole_increases_bound():
    rng = np.random.default_rng(21)
    for _ in range(20):
        ch = _random_cheese(rng)
        z = _far_point(rng, ch)
        extra = Disk(complex(*rng.uniform(-0.5, 0.5, 2)), 0.005)
        if abs(z - extra.center) < 0.05:
            continue
        bigger = AbstractSwissCheese(UNIT, ch.holes + (extra,))
        for k in (0, 3, 8):
            assert cheese_derivative_bound(bigger, z, k) > cheese_derivative_bound(ch, z, k)


def test_scale_covariance():
    rng = np.random.default_rng(22)
    for _ in range(20):
        ch = _random_cheese(rng)
        z = _far_point(rng, ch)
        lam = float(rng.uniform(0.2, 5))
        scaled = AbstractSwissCheese(Disk(0j, lam),
                                     tuple(Disk(h.center * lam, h.radius * lam) for h in ch.holes))
        for k in (0, 1, 4, 9):
            assert cheese_derivative_bound(scaled, z * lam, k) == pytest.approx(
                cheese_derivative_bound(ch, z, k) * lam ** -k, rel=1e-12)


def test_verify_pole_outside_unit_cheese():
    f = RationalFunction.simple_pole(2.0)
    rep = verify_cheese_bound(EMPTY, f, [0j], K=12, delta=0.02)
    assert rep.ok
    for row in rep.rows:
        assert row.exact == pytest.approx(math.factorial(row.k) / 2 ** (row.k + 1), rel=1e-12)
        assert row.slack > 0


def test_verify_constant():
    ch = AbstractSwissCheese(UNIT, (Disk(0.5, 0.2),))
    rep = verify_cheese_bound(ch, RationalFunction.constant(2.0), circle_targets(0, 0.25, 8),
                              K=5, delta=0.02)
    assert rep.ok
    for row in rep.rows:
        if row.k:
            assert row.exact == 0 and row.slack == row.bound


def test_verify_random_cheese_and_functions():
    rng = np.random.default_rng(23)
    for _ in range(5):
        ch = _random_cheese(rng, 8)
        pts = [_far_point(rng, ch) for _ in range(4)]
        f = RationalFunction.simple_pole(complex(*rng.uniform(1.5, 3, 2)))
        rep = verify_cheese_bound(ch, f, pts, K=8, delta=0.02)
        assert rep.ok and rep.min_slack >= 0


def test_verify_on_construction(construction):
    f = RationalFunction.simple_pole(2.0)
    rep = verify_cheese_bound(construction.cheese, f, circle_targets(0, 0.5, 32), K=10,
                              delta=0.01, tail_d_min=construction.tail_d_min)
    assert rep.ok
    assert rep.min_slack >= 0
    assert len(rep.table()) == 32 * 11
