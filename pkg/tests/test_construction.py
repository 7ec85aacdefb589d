import math

import numpy as np
import pytest

from quasicheese.construction import (AnnulusSpec, BudgetExhausted, annulus_specs,
                                      build_construction, choose_gamma, choose_n0,
                                      display_bound, gamma_bound_term, gamma_display_sums,
                                      gamma_term_minimizer, last_level,
                                      quasianalyticity_certificate, regular_annulus_cheese)
from quasicheese.geometry import Disk, contains_point, empty_interior_witness, is_classical, rho
from quasicheese.rational_jets import RationalFunction


def test_annulus_example():
    spec = AnnulusSpec(0j, 1.0, 0.5, 0.1, 0.02)
    ch = regular_annulus_cheese(spec)
    assert ch.holes[0] == Disk(0j, 0.5)
    assert is_classical(ch).is_classical
    assert float(ch.hole_radii[1:].sum()) < 0.1
    for theta in (0.0, 1.3, 2.9, 4.4):
        region = Disk(0.75 * complex(math.cos(theta), math.sin(theta)), 0.2)
        ok, gap = empty_interior_witness(ch, region, 0.02)
        assert ok and gap <= 0.02


def test_annulus_centre_hole_empty():
    ch = regular_annulus_cheese(AnnulusSpec(0.1j, 0.4, 0.0, 0.05, 0.05))
    assert ch.holes[0].radius == 0.0
    assert contains_point(ch, 0.1j)
    assert is_classical(ch).is_classical


def test_annulus_large_eps_capped():
    spec = AnnulusSpec(0j, 1.0, 0.5, 1e6, 0.05)
    ch = regular_annulus_cheese(spec)
    assert is_classical(ch).is_classical
    h1 = spec.width / 4
    assert float(ch.hole_radii[1:].max()) <= h1 / 4


def test_annulus_deterministic():
    spec = AnnulusSpec(0.2, 0.7, 0.3, 0.01, 0.03)
    a, b = regular_annulus_cheese(spec), regular_annulus_cheese(spec)
    assert np.array_equal(a.hole_centers, b.hole_centers)
    assert np.array_equal(a.hole_radii, b.hole_radii)


def test_annulus_holes_stay_inside():
    spec = AnnulusSpec(0j, 0.9, 0.6, 0.01, 0.02)
    ch = regular_annulus_cheese(spec)
    d = np.abs(ch.hole_centers[1:])
    r = ch.hole_radii[1:]
    assert np.all(d - r > 0.6) and np.all(d + r < 0.9)


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted) as info:
        regular_annulus_cheese(AnnulusSpec(0j, 1.0, 0.5, 1e-296, 1e-4))
    assert info.value.achieved_resolution > 1e-4


def test_annulus_spec_validation():
    with pytest.raises(ValueError):
        AnnulusSpec(0j, 0.5, 0.5, 1.0, 0.1)
    with pytest.raises(ValueError):
        AnnulusSpec(0j, 1.0, 0.5, 0.0, 0.1)


def test_gamma_spot_value():
    n0 = 8
    direct = (2.0 ** -n0) ** 2 * math.log(4) / 2
    assert gamma_bound_term(n0, 1, 1) == pytest.approx(direct, rel=1e-14)


def test_gamma_choice():
    n0, eps = 3, 1.0
    g = choose_gamma(n0, eps, 20, count=40)
    assert sum(g) < eps
    for n, gn in enumerate(g, 1):
        assert gn <= eps * 2.0 ** (-n - 1) * (1 + 1e-15)
        for k in range(1, 21):
            assert gn <= gamma_bound_term(n0, n, k) * (1 + 1e-12)
    for k, total, rhs in gamma_display_sums(g, n0, 20):
        assert total <= rhs


def test_gamma_terms_eventually_increase():
    n0, n = 1, 0
    k_star = gamma_term_minimizer(n0, n)
    assert math.isfinite(k_star)
    ks = range(max(1, int(k_star) + 2), int(k_star) + 40)
    terms = [gamma_bound_term(n0, n, k) for k in ks]
    assert all(b > a for a, b in zip(terms, terms[1:]))
    assert gamma_term_minimizer(3, 20) == math.inf


@pytest.mark.parametrize("r, n0", [(0.5, 3), (0.3, 3), (0.9, 5), (0.1, 5)])
def test_choose_n0(r, n0):
    assert choose_n0(r) == n0
    assert r + 2.0 ** (1 - n0) < 1 and r - 2.0 ** (1 - n0) > 0


def test_annuli_disjoint_and_off_circle():
    r, n0 = 0.5, 3
    spans = []
    for k in range(1, 12):
        A, B = annulus_specs(r, n0, k, 1e-3, 0.01)
        spans += [(A.inner_radius, A.outer_radius), (B.inner_radius, B.outer_radius)]
        assert A.outer_radius < r < B.inner_radius
    spans.sort()
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))


def test_last_level():
    k = last_level(3, 0.01)
    assert 2.0 ** (2 - 3 - k) * 9 / 8 < 0.01 <= 2.0 ** (2 - 3 - (k - 1)) * 9 / 8


def test_construction_passes(construction):
    res = construction
    assert res.passed
    assert set(res.verification) == {"classical", "rho", "circle", "gamma_display",
                                     "hole_margins", "density"}
    assert rho(res.cheese) < 1
    assert res.n0 == 3 and sum(res.gamma) < res.eps
    assert res.cheese.tail_bound > 0 and res.tail_d_min > 0


def test_construction_hole_records(construction):
    res = construction
    labels = [(a.label, a.level) for a in res.annuli]
    assert labels[:2] == [("A", 1), ("B", 1)]
    assert res.annuli[-1].stop_hole == len(res.cheese.holes) + 1
    for a in res.annuli:
        idx = slice(a.first_hole - 1, a.stop_hole - 1)
        d = np.abs(res.cheese.hole_centers[idx])
        rad = res.cheese.hole_radii[idx]
        assert np.all(d - rad >= a.spec.inner_radius - 1e-15)
        assert np.all(d + rad <= a.spec.outer_radius + 1e-15)
    circles = res.boundary_circles
    assert circles[0] == (0j, 0.5)
    assert len(circles) == 1 + 2 * len(res.annuli) - 1


def test_construction_deterministic(construction):
    again = build_construction(0.5, 1.0, 0.01)
    assert np.array_equal(again.cheese.hole_centers, construction.cheese.hole_centers)
    assert np.array_equal(again.cheese.hole_radii, construction.cheese.hole_radii)
    assert again.cheese.tail_bound == construction.cheese.tail_bound


def test_construction_rejects_bad_r():
    with pytest.raises(ValueError):
        build_construction(1.0, 1.0, 0.01)


def test_other_radius_n0_increase():
    res = build_construction(0.8, 0.5, 0.02)
    assert res.n0 == 4 and res.passed


def test_certificate_constant(construction):
    rep = quasianalyticity_certificate(construction, RationalFunction.constant(3.0), K=10, J=40)
    assert rep.infinite and rep.ok
    assert rep.circle_sups[0] == pytest.approx(3.0)
    assert all(s == 0 for s in rep.circle_sups[1:])


def test_certificate_identity(construction):
    rep = quasianalyticity_certificate(construction, RationalFunction.polynomial([0, 1]), K=10, J=40)
    assert rep.infinite and rep.ok
    assert rep.circle_sups[:3] == [pytest.approx(0.5), pytest.approx(1.0), 0.0]


def test_display_bound_formula():
    assert display_bound(0, 2.0, 0.5) == pytest.approx(2.0 * (2 + 1))
    assert display_bound(3, 1.0, 0.5) == pytest.approx(6 * (16 + math.log(6) ** 3))
