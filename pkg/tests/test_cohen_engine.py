import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import b_exact, b_poly_paths
from quasicheese.cohen_engine import (FOUR_E, InsufficientDivergence, b_entry, b_table,
                                      cohen_sum, easycase_bound, max_b_entry,
                                      propagate_vanishing_bound, sequence_digest,
                                      verify_cohen_bounds)
from quasicheese.sequences import PositiveSequence, factorial_family, geometric_family


def test_base_cases():
    a = 0.1
    t = b_table(a, 6)
    for k in range(7):
        assert t[0, k] == 0
    for j in range(1, 7):
        assert t[j, j] == 1
    assert t[1, 2] == pytest.approx(a)
    assert t[2, 3] == pytest.approx(a + a * a)
    with pytest.raises(IndexError):
        t[3, 2]


def test_recursion_identity():
    a = 0.07
    t = b_table(a, 13)
    for j in range(0, 12):
        for k in range(j + 1, 12):
            assert t[j + 1, k + 1] == pytest.approx(t[j, k + 1] + a * t[j + 1, k], rel=1e-15)


def test_matches_exact_rationals_and_path_count():
    a = Fraction(1, 13)
    t = b_table(float(a), 9)
    for k in range(1, 10):
        for j in range(0, k + 1):
            exact = b_exact(a, j, k)
            assert t[j, k] == pytest.approx(float(exact), rel=1e-14, abs=1e-300)
            assert b_entry(float(a), j, k) == pytest.approx(float(exact), rel=1e-12, abs=1e-300)
    for k in range(1, 8):
        for j in range(0, k + 1):
            assert b_exact(a, j, k) == sum(c * a ** p for p, c in b_poly_paths(j, k).items())


def test_monotone_in_alpha():
    lo, hi = b_table(0.02, 15).entries, b_table(0.08, 15).entries
    assert np.all(lo <= hi)


def test_max_entry_closed_form():
    for a in (0.01, 0.05, 0.09):
        t = b_table(a, 40)
        iu = np.triu_indices(41, 1)
        assert max_b_entry(a, 40) == pytest.approx(t.entries[iu].max(), rel=1e-12)
        assert t[39, 40] == pytest.approx(max_b_entry(a, 40), rel=1e-12)


def test_alpha_domain():
    with pytest.raises(ValueError):
        b_table(1.0, 3)
    with pytest.raises(ValueError):
        verify_cohen_bounds(1 / FOUR_E, 10)


@pytest.mark.parametrize("alpha", [0.05, 1 / FOUR_E - 1e-4])
def test_verify_passes_below_threshold(alpha):
    rep = verify_cohen_bounds(alpha, 300)
    assert rep.ok
    assert rep.max_B < 0.5 and rep.max_sum < 2
    assert rep.K_est == pytest.approx(rep.max_B / alpha)


def test_verify_near_threshold_max_b():
    # Catalan generating function at 1/(4e): (1 - sqrt(1 - 4/(4e))) / 2
    a = 1 / FOUR_E - 1e-9
    limit = (1 - math.sqrt(1 - 1 / math.e)) / 2
    rep = verify_cohen_bounds(a, 200)
    assert rep.max_B < limit < 0.5


def test_cohen_sum_small_n():
    a = 0.05
    assert cohen_sum(a, 1) == pytest.approx(1 + 2 * a)
    assert cohen_sum(a, 2) == pytest.approx(1 + 2 * a + 2 * (2 * a) ** 2 / 2)


def test_certificate_factorial_replays():
    M = factorial_family(60)
    cert = propagate_vanishing_bound(M, 0.2, 40)
    assert cert.n == 40 and not cert.snapped
    assert cert.replay_ok, cert.replay_failures
    ratio_sum = sum(1 / (j + 1) for j in range(41))
    assert cert.ratio_sum == pytest.approx(ratio_sum, rel=1e-12)
    assert cert.alpha == pytest.approx(0.2 / ratio_sum, rel=1e-12)
    assert cert.final_bound == pytest.approx(max_b_entry(cert.alpha, 41))
    assert cert.final_bound < 0.5
    for (j, k), v in cert.bound_table.items():
        assert v <= cert.bound(j, k) * (1 + 1e-9) + 1e-300


def test_certificate_grid():
    cert = propagate_vanishing_bound(factorial_family(60), 0.3, 50)
    g = cert.grid
    assert g[0] == 0 and np.all(np.diff(g) > 0)
    assert g[-1] <= 0.3 * (1 + 1e-12)
    # x_j - x_{j-1} = alpha * M_{n-j} / M_{n-j+1} = alpha / (n - j + 1)
    steps = np.diff(g)
    n = cert.n
    assert np.allclose(steps, [cert.alpha / (n - j + 1) for j in range(1, n + 1)], rtol=1e-12)
    assert cert.covered_length == g[-1]


def test_certificate_geometric():
    cert = propagate_vanishing_bound(geometric_family(60, 2.0), 0.5, 40)
    assert cert.ratio_sum == pytest.approx(41 * 0.5)
    assert cert.replay_ok
    assert cert.grid[-1] == pytest.approx(40 * 0.5 * cert.alpha)


def test_final_bounds_decrease_with_order():
    M = factorial_family(3000)
    certs = [propagate_vanishing_bound(M, 0.3, n, replay_limit=0) for n in (300, 1000, 2900)]
    assert certs[0].alpha > certs[1].alpha > certs[2].alpha
    assert certs[0].final_bound > certs[1].final_bound > certs[2].final_bound


def test_trivial_zero_length():
    cert = propagate_vanishing_bound(factorial_family(10), 0.0, 5)
    assert cert.final_bound == 0.0
    assert cert.covered_length == 0.0


def test_insufficient_divergence():
    with pytest.raises(InsufficientDivergence, match="insufficient divergence"):
        propagate_vanishing_bound(factorial_family(60), 0.5, 40)
    with pytest.raises(ValueError):
        propagate_vanishing_bound(factorial_family(10), 0.1, 10)


def test_snaps_to_principal_index():
    M = PositiveSequence.from_values([1, 4, 8, 100, 200, 5000, 1e4])
    cert = propagate_vanishing_bound(M, 0.001, 3)
    assert cert.snapped and cert.n == 2 and cert.requested_n == 3
    assert cert.replay_ok


def test_as_dict_and_digest():
    M = factorial_family(30)
    d = propagate_vanishing_bound(M, 0.1, 20).as_dict()
    assert d["provenance"]["sequence_sha256"] == sequence_digest(M)
    assert len(d["grid"]) == d["n"] + 1
    assert sequence_digest(M) != sequence_digest(M.scaled(2.0))


def test_easycase_examples():
    e = easycase_bound(factorial_family(10), 0.5)
    assert e.bound == pytest.approx(0.5 ** 10)
    e = easycase_bound(PositiveSequence.from_values([3, 1, 100]), 0.5)
    assert (e.best_n, e.bound) == (1, pytest.approx(0.5))
    e = easycase_bound(factorial_family(5).scaled(3.0), 0.0)
    assert (e.best_n, e.bound) == (0, pytest.approx(3.0))
    with pytest.raises(ValueError):
        easycase_bound(factorial_family(5), -1)
