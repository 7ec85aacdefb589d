"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import poly_derivative, random_path, random_poly, random_rational
from oracles import (b_exact, b_poly_ballot, factorial_root_sum, harmonic,
                     hull_vertices_by_test, minorant_pairwise, minorant_subsets)
from quasicheese.cohen_engine import b_table, propagate_vanishing_bound, verify_cohen_bounds
from quasicheese.construction import build_construction, display_bound, quasianalyticity_certificate
from quasicheese.paths import (Path, arclength_parametrize, check_cohen_taylor_bound,
                               check_F_derivative, check_pathwise_derivative_bound,
                               contour_integral, length, reverse, sup_on_path)
from quasicheese.rational_jets import RationalFunction, sup_on_cheese
from quasicheese.sequences import (Divergence, PositiveSequence, classify_divergence,
                                   constant_family, dc_partial_sums, factorial_family,
                                   log_convex_minorant)

EULER_GAMMA = 0.5772156649015329


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}")


def test_acceptance_1_cohen_bound_lemma(capsys):
    t = time.perf_counter()
    reps = [verify_cohen_bounds(a, 200) for a in (0.01, 0.05, 0.09)]
    elapsed = time.perf_counter() - t
    ok = all(r.b_bound_ok and r.sum_check_ok for r in reps) and elapsed < 1
    detail = "; ".join(f"alpha={r.alpha}: max B={r.max_B:.6g}, max sum={r.max_sum:.6g}"
                       for r in reps)
    report(capsys, 1, ok, f"{detail}; {elapsed:.2f}s")
    assert ok


def test_acceptance_2_b_table_oracle(capsys):
    worst = 0.0
    for a in (0.01, 0.05, 0.09):
        tab = b_table(a, 12)
        for k in range(1, 13):
            for j in range(0, k + 1):
                poly = b_poly_ballot(j, k)
                ref = math.fsum(c * a ** p for p, c in poly.items())
                assert ref == pytest.approx(float(b_exact(Fraction(a), j, k)), rel=1e-14, abs=0)
                if ref:
                    worst = max(worst, abs(tab[j, k] - ref) / ref)
                else:
                    assert tab[j, k] == 0
    ok = worst <= 1e-12
    report(capsys, 2, ok, f"worst relative deviation {worst:.3g} over K <= 12")
    assert ok


def _lemma_errors(y, h, principal):
    """Worst violation of: minorant below data, contact at principal
    indices (starting at 0), constant ratio between consecutive ones."""
    err = float(np.max(h - y)) if len(y) else 0.0
    err = max(err, 0.0 if principal[0] == 0 else math.inf)
    for p in principal:
        err = max(err, abs(h[p] - y[p]))
    for a, b in zip(principal[:-1], principal[1:]):
        base = h[a] - h[a + 1]
        for j in range(a, b):
            err = max(err, abs((h[j] - h[j + 1]) - base))
    return err


def test_acceptance_3_minorant(capsys):
    rng = np.random.default_rng(2024)
    worst, oracle_miss, subset_checked = 0.0, 0, 0
    for _ in range(500):
        N = int(rng.integers(0, 31))
        y = rng.normal(size=N + 1) * rng.uniform(0.1, 10) + rng.normal() * np.arange(N + 1)
        r = log_convex_minorant(PositiveSequence(y))
        h = r.minorant.log_values
        worst = max(worst, _lemma_errors(y, h, r.principal_indices))
        if not np.allclose(h, minorant_pairwise(list(y)), rtol=0, atol=1e-12):
            oracle_miss += 1
        if list(r.vertices) != hull_vertices_by_test(list(y)):
            oracle_miss += 1
        if N <= 12:
            subset_checked += 1
            vals, verts = minorant_subsets(list(y))
            if not (np.allclose(h, vals, rtol=0, atol=1e-12) and r.vertices == tuple(verts)):
                oracle_miss += 1
    ok = worst <= 1e-12 and oracle_miss == 0
    report(capsys, 3, ok, f"500 sequences, worst property error {worst:.3g}, oracle mismatches "
                          f"{oracle_miss} ({subset_checked} also vs exhaustive subsets)")
    assert ok


def test_acceptance_4_denjoy_carleman(capsys):
    t = time.perf_counter()
    total = float(dc_partial_sums(factorial_family(1000)).root_sums[-1])
    target = math.e * (math.log(1000) + EULER_GAMMA)
    rel = abs(total - target) / target
    fact2 = classify_divergence(factorial_family(1000, 2.0)).label
    fact = classify_divergence(factorial_family(1000)).label
    const = classify_divergence(constant_family(1000, 2.0)).label
    elapsed = time.perf_counter() - t
    oracle = factorial_root_sum(1000)
    checks = {
        "sum within 5%": rel <= 0.05,
        "(n!)^2 convergent": fact2 is Divergence.CONVERGENT_EVIDENCE,
        "n! divergent": fact is Divergence.DIVERGENT_EVIDENCE,
        "constant divergent": const is Divergence.DIVERGENT_EVIDENCE,
        "< 1 s": elapsed < 1,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report(capsys, 4, ok, f"sum={total:.6f} (mpmath {oracle:.6f}) vs e(ln N + gamma)={target:.6f}, "
                          f"off by {100 * rel:.1f}%; failed: {failed or 'none'}; {elapsed:.2f}s")
    assert abs(total - oracle) <= 1e-10 * oracle
    assert ok


def test_acceptance_5_certificate_decay(capsys):
    t = time.perf_counter()
    M = factorial_family(300_002)
    certs = [propagate_vanishing_bound(M, 1.0, n, replay_limit=0) for n in (30_000, 100_000, 300_000)]
    elapsed = time.perf_counter() - t
    alpha_err = max(abs(c.alpha * harmonic(c.n + 1) - 1) for c in certs)
    bounds = [c.final_bound for c in certs]
    ok = (all(c.n == n and not c.snapped for c, n in zip(certs, (30_000, 100_000, 300_000)))
          and bounds[0] > bounds[1] > bounds[2] and alpha_err <= 0.01 and elapsed < 10)
    report(capsys, 5, ok, f"final bounds {', '.join(f'{b:.6g}' for b in bounds)}; "
                          f"max |alpha H_(n+1) - 1| = {alpha_err:.2g}; {elapsed:.2f}s")
    assert ok


def test_acceptance_6_cheese_estimate(construction, capsys):
    f = RationalFunction.simple_pole(2.0)
    rep = quasianalyticity_certificate(construction, f, K=20, J=60)
    exact = [math.factorial(k) / 1.5 ** (k + 1) for k in range(21)]
    sup_err = max(abs(rep.circle_sups[k] - e) / e for k, e in enumerate(exact))
    sup_X = sup_on_cheese(f, construction.cheese, construction.delta)
    d0 = 1 - construction.r
    slacks = [display_bound(k, sup_X, d0) - exact[k] for k in range(21)]
    ok = sup_err <= 1e-8 and min(slacks) >= 0 and rep.display_ok
    report(capsys, 6, ok, f"sup-norm relative error {sup_err:.2g}; min display slack "
                          f"{min(slacks):.4g} over k <= 20; |f|_X = {sup_X:.12g}")
    assert ok


def test_acceptance_7_construction(capsys):
    t = time.perf_counter()
    res = build_construction(0.5, 1.0, 0.01, check=False)
    elapsed = time.perf_counter() - t
    holes = len(res.cheese.holes)
    ok = res.passed and len(res.verification) == 6 and elapsed < 60 and holes <= 100_000
    clauses = ", ".join(f"{k}={'ok' if v['ok'] else 'FAIL'}" for k, v in res.verification.items())
    report(capsys, 7, ok, f"{clauses}; {holes} holes; {elapsed:.2f}s")
    assert ok


def test_acceptance_8_path_calculus(capsys):
    r1 = abs(contour_integral(lambda z: z, Path.line(0, 1)).value - 0.5)
    r2 = abs(contour_integral(lambda z: 1 / z, Path.circle()).value - 2j * math.pi)
    rng = np.random.default_rng(808)
    paths = [random_path(rng) for _ in range(20)]
    anti = 0.0
    for p in paths[:10]:
        f = random_poly(rng)
        anti = max(anti, abs(contour_integral(f, p).value + contour_integral(f, reverse(p)).value))
    product = 0.0
    for _ in range(100):
        f, g = random_poly(rng, 3), random_poly(rng, 3)
        df, dg = poly_derivative(f), poly_derivative(g)
        res, _ = check_F_derivative(lambda z: f(z) * g(z), lambda z: df(z) * g(z) + f(z) * dg(z),
                                    paths)
        product = max(product, res)
    conj, _ = check_F_derivative(np.conj, lambda z: np.ones_like(z), [Path.line(0, 1j)])
    ok = max(r1, r2, anti, product) < 1e-9 and abs(conj - 2) <= 1e-6
    report(capsys, 8, ok, f"z: {r1:.2g}, 1/z: {r2:.2g}, reverse: {anti:.2g}, product rule "
                          f"(100 pairs x 20 paths): {product:.2g}, conjugation residual {conj:.9f}")
    assert ok


def test_acceptance_9_pathwise_estimates(capsys):
    rng = np.random.default_rng(909)
    worst_path, worst_taylor = math.inf, math.inf
    for _ in range(200):
        f = random_rational(rng, pole_min=3.0)
        path = arclength_parametrize(random_path(rng, scale=0.5))
        ok1, slack1 = check_pathwise_derivative_bound(f, f.derivative(1), path)
        worst_path = min(worst_path, slack1)
        L = length(path)
        m = int(rng.integers(1, 5))
        pts = np.sort(rng.uniform(0, 0.6 * L, m))
        s = float(rng.uniform(pts[-1], L)) if rng.uniform() < 0.7 else L
        if s <= pts[-1]:
            s = L
        dm = f.derivative(m)
        M = 1.001 * sup_on_path(lambda z: dm(z), path, t_range=(float(pts[0]), path.interval[1]))
        ok2, slack2 = check_cohen_taylor_bound(f, path, pts.tolist(), M, s)
        worst_taylor = min(worst_taylor, slack2)
        assert ok1 and ok2
    ok_t, tight = check_cohen_taylor_bound(RationalFunction.polynomial([0, 1]), Path.line(0, 1),
                                           [0.0], 1.0, 1.0)
    ok = worst_path >= 0 and worst_taylor >= 0 and ok_t and abs(tight) < 1e-9
    report(capsys, 9, ok, f"200 instances, min path-estimate slack {worst_path:.3g}, "
                          f"min Taylor slack {worst_taylor:.3g}; tight m=1 slack {tight:.2g}")
    assert ok
