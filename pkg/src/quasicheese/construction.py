"""Deterministic Swiss cheese constructions.

``regular_annulus_cheese`` packs tiny holes on concentric rings inside an
annulus, refining dyadically until the ring spacing drops below the
requested resolution.  ``build_construction`` stacks such annuli around a
circle ``C_r`` (inner annuli ``A_k``, outer annuli ``B_k`` approaching
``C_r`` dyadically), merges their holes into one cheese in the unit disk
and verifies the result.  Only geometry is produced here: nothing about the
uniform algebra R(X) is claimed for the generated sets.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import geometry as geo
from .geometry import AbstractSwissCheese, Disk
from .rational_jets import RationalFunction, sup_jet_on_circle, sup_on_cheese
from .sequences import (Divergence, PositiveSequence, classify_divergence,
                        log_convex_minorant)

MIN_RADIUS = 1e-300


class BudgetExhausted(RuntimeError):
    def __init__(self, message, achieved_resolution):
        super().__init__(message)
        self.achieved_resolution = achieved_resolution


class VerificationFailed(RuntimeError):
    def __init__(self, clause, report):
        super().__init__(f"construction check failed: {clause}")
        self.clause = clause
        self.report = report


def thread_cap() -> int:
    env = os.environ.get("QUASICHEESE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class AnnulusSpec:
    center: complex
    outer_radius: float
    inner_radius: float
    eps: float
    delta: float

    def __post_init__(self):
        if not (self.outer_radius > self.inner_radius >= 0):
            raise ValueError("need outer_radius > inner_radius >= 0")
        if not (self.eps > 0 and self.delta > 0):
            raise ValueError("eps and delta must be positive")

    @property
    def width(self) -> float:
        return self.outer_radius - self.inner_radius


@dataclass(frozen=True)
class _AnnulusHoles:
    centers: np.ndarray
    radii: np.ndarray
    levels: np.ndarray
    resolution: float


def _annulus_holes(spec: AnnulusSpec) -> _AnnulusHoles:
    a, lam1 = complex(spec.center), spec.inner_radius
    W = spec.width
    placed_c: list[np.ndarray] = []
    placed_r: list[np.ndarray] = []
    placed_l: list[np.ndarray] = []
    trees: list[tuple[cKDTree, float]] = []
    m, h = 0, math.inf
    while True:
        m += 1
        h = W * 2.0 ** (-m - 1)
        rings = lam1 + (np.arange(2 ** (m + 1)) + 0.5) * h
        counts = np.floor(2 * math.pi * rings / h).astype(int)
        total = int(counts.sum())
        radius = min(spec.eps * 2.0 ** (-m - 1) / total, h / 4)
        if not radius > MIN_RADIUS:
            prev = 2 * h if m > 1 else math.inf
            raise BudgetExhausted(
                f"hole budget exhausted at level {m}; achieved resolution {prev}", prev)
        rho = np.repeat(rings, counts)
        start = np.concatenate([[0], np.cumsum(counts)[:-1]])
        idx = np.arange(total) - np.repeat(start, counts)
        theta = 2 * math.pi * idx / np.repeat(counts, counts)
        c = a + rho * np.exp(1j * theta)
        keep = np.ones(total, dtype=bool)
        pts = np.column_stack([c.real, c.imag])
        for tree, r_old in trees:
            reach = radius + r_old
            d, _ = tree.query(pts, k=1, distance_upper_bound=reach * (1 + 1e-9))
            keep &= ~np.isfinite(d)
        c = c[keep]
        if len(c):
            placed_c.append(c)
            placed_r.append(np.full(len(c), radius))
            placed_l.append(np.full(len(c), m))
            trees.append((cKDTree(np.column_stack([c.real, c.imag])), radius))
        if h < spec.delta:
            break
    return _AnnulusHoles(np.concatenate(placed_c), np.concatenate(placed_r),
                         np.concatenate(placed_l), h)


def regular_annulus_cheese(spec: AnnulusSpec) -> AbstractSwissCheese:
    """Classical cheese with outer disk ``(a, lam0)``, hole 1 ``(a, lam1)``
    and ring-packed holes of total radius below ``eps``.

    Level ``m`` puts centres on circles of radii ``lam1 + (i + 1/2) h_m``,
    ``h_m = (lam0 - lam1) 2^(-m-1)``, at angular spacing at least ``h_m``;
    all holes of a level share the radius
    ``min(eps 2^(-m-1) / N_m, h_m / 4)`` with ``N_m`` the number of
    candidate centres.  Candidates colliding with earlier levels are
    skipped.  Stops after the first level with ``h_m < delta``.
    """
    holes = _annulus_holes(spec)
    centers = np.concatenate([[spec.center], holes.centers])
    radii = np.concatenate([[spec.inner_radius], holes.radii])
    return AbstractSwissCheese.from_arrays(Disk(spec.center, spec.outer_radius),
                                           centers, radii)


# --- gamma budget -----------------------------------------------------------

def gamma_bound_term(n0: int, n: int, k: int) -> float:
    """``(2^(1-n0-n))^(k+1) (log(k+3))^k / 2^k``."""
    lb = (1 - n0 - n) * math.log(2)
    return math.exp((k + 1) * lb + k * math.log(math.log(k + 3)) - k * math.log(2))


def gamma_term_minimizer(n0: int, n: int) -> float:
    """Where ``k -> gamma_bound_term(n0, n, k)`` stops decreasing.

    The log-ratio of consecutive terms is ``log b + log(log(k+4)/2) + o(1)``
    with ``b = 2^(1-n0-n)``, so the turning point sits near
    ``k = exp(2 / b)``; returns ``inf`` when that overflows.
    """
    x = 2.0 / 2.0 ** (1 - n0 - n)
    return math.exp(x) - 3 if x < 700 else math.inf


def choose_gamma(n0: int, eps: float, K_probe: int = 20, count: int = 64) -> list[float]:
    """``gamma_1 .. gamma_count`` with

        gamma_n <= gamma_bound_term(n0, n, k) / 2^n   for 1 <= k <= K_probe,
        gamma_n <= eps 2^(-n-1).

    The extra ``2^-n`` makes ``sum_n gamma_n / (2^(1-n0-n))^(k+1)`` at most
    ``(log(k+3))^k`` for every probed ``k``; that display is re-checked.
    """
    if K_probe < 1:
        raise ValueError("K_probe must be positive")
    ks = np.arange(1, K_probe + 1, dtype=float)
    out = []
    for n in range(1, count + 1):
        lb = (1 - n0 - n) * math.log(2)
        logs = (ks + 1) * lb + ks * np.log(np.log(ks + 3)) - ks * math.log(2) - n * math.log(2)
        cap = math.log(eps) - (n + 1) * math.log(2)
        out.append(math.exp(min(float(logs.min()), cap)))
    for k, total, rhs in gamma_display_sums(out, n0, K_probe):
        if total > rhs * (1 + 1e-12):
            raise AssertionError(f"gamma display fails at k={k}")
    return out


def gamma_display_sums(gamma, n0: int, K_probe: int) -> list[tuple[int, float, float]]:
    """``(k, sum_n gamma_n / (2^(1-n0-n))^(k+1), (log(k+3))^k)`` for ``k <= K_probe``."""
    rows = []
    for k in range(1, K_probe + 1):
        total = math.fsum(math.exp(math.log(g) - (1 - n0 - n) * (k + 1) * math.log(2))
                          for n, g in enumerate(gamma, 1) if g > 0)
        rows.append((k, total, math.log(k + 3) ** k))
    return rows


# --- full construction ------------------------------------------------------

@dataclass(frozen=True)
class AnnulusRecord:
    label: str  # "A" or "B"
    level: int
    spec: AnnulusSpec
    first_hole: int  # 1-based index in the merged cheese
    stop_hole: int   # one past the last


@dataclass
class ConstructionResult:
    cheese: AbstractSwissCheese
    r: float
    eps: float
    delta: float
    n0: int
    gamma: list
    levels_built: int
    annuli: list
    tail_d_min: float
    K_probe: int
    hole_levels: np.ndarray = field(repr=False)
    verification: dict = field(default_factory=dict)

    @property
    def boundary_circles(self) -> list[tuple[complex, float]]:
        """``C_r`` and every annulus boundary circle (the exceptional set E)."""
        out = [(0j, self.r)]
        for a in self.annuli:
            out.append((a.spec.center, a.spec.outer_radius))
            if a.spec.inner_radius > 0:
                out.append((a.spec.center, a.spec.inner_radius))
        return out

    @property
    def passed(self) -> bool:
        return all(v["ok"] for v in self.verification.values())


def choose_n0(r: float) -> int:
    n0 = 1
    while not (r + 2.0 ** (1 - n0) < 1 and r - 2.0 ** (1 - n0) > 0):
        n0 += 1
    return n0


def annulus_specs(r: float, n0: int, k: int, gamma_k: float, delta: float):
    """The pair ``(A_k, B_k)``."""
    if k == 1:
        A = AnnulusSpec(0j, r - 2.0 ** (1 - n0), 0.0, gamma_k / 2, delta)
        B = AnnulusSpec(0j, 1.0, r + 2.0 ** (1 - n0), gamma_k / 2, delta)
    else:
        A = AnnulusSpec(0j, r - 2.0 ** (2 - n0 - k), r - 2.0 ** (3 - n0 - k), gamma_k / 2, delta)
        B = AnnulusSpec(0j, r + 2.0 ** (3 - n0 - k), r + 2.0 ** (2 - n0 - k), gamma_k / 2, delta)
    return A, B


def last_level(n0: int, delta: float) -> int:
    """First ``k`` whose gap ``2^(2-n0-k)`` to ``C_r``, plus the inset of
    the outermost ring, is below ``delta``."""
    k = 1
    while 2.0 ** (2 - n0 - k) * 9 / 8 >= delta:
        k += 1
    return k


def build_construction(r: float, eps: float, delta: float, K_probe: int = 20,
                       witness: str = "sampled", check: bool = True) -> ConstructionResult:
    """Assemble and verify the cheese around ``C_r``.

    ``witness`` is ``"sampled"`` (a dozen small disks across all annuli and
    on ``C_r``) or ``"full"`` (the whole unit disk).  With ``check`` set, any
    failed clause raises :class:`VerificationFailed`.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if not (eps > 0 and delta > 0):
        raise ValueError("eps and delta must be positive")
    n0 = choose_n0(r)
    k_last = last_level(n0, delta)
    tail_levels = 200
    gamma = choose_gamma(n0, eps, K_probe, count=k_last + tail_levels)

    specs = []
    for k in range(1, k_last + 1):
        A, B = annulus_specs(r, n0, k, gamma[k - 1], delta)
        specs += [("A", k, A), ("B", k, B)]
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        generated = list(pool.map(lambda t: _annulus_holes(t[2]), specs))

    centers, radii, levels, records = [], [], [], []
    seen: set = set()
    pos = 1
    for (label, k, spec), holes in zip(specs, generated):
        first = pos
        for c, rad in zip(holes.centers.tolist(), holes.radii.tolist()):
            key = (c.real, c.imag, rad)
            if key in seen:
                continue
            seen.add(key)
            centers.append(c)
            radii.append(rad)
            levels.append(k)
            pos += 1
        records.append(AnnulusRecord(label, k, spec, first, pos))

    tail = math.fsum(gamma[k_last:]) + eps * 2.0 ** (-(k_last + tail_levels) - 1)
    cheese = AbstractSwissCheese.from_arrays(Disk(0j, 1.0), np.array(centers), np.array(radii),
                                             tail_bound=tail)
    res = ConstructionResult(
        cheese=cheese, r=r, eps=eps, delta=delta, n0=n0, gamma=gamma,
        levels_built=k_last, annuli=records, tail_d_min=2.0 ** (2 - n0 - (k_last + 1)),
        K_probe=K_probe, hole_levels=np.array(levels),
    )
    res.verification = verify_construction(res, witness=witness)
    if check and not res.passed:
        failed = next(k for k, v in res.verification.items() if not v["ok"])
        raise VerificationFailed(failed, res.verification)
    return res


def witness_regions(res: ConstructionResult) -> list[Disk]:
    rad = 5 * res.delta
    radii = [0.0, res.r / 2, res.r - 2.0 ** (1 - res.n0),
             res.r - 1.5 * 2.0 ** (1 - res.n0 - 1), res.r,
             res.r + 1.5 * 2.0 ** (1 - res.n0 - 1), (1 + res.r) / 2]
    out = []
    for i, rho in enumerate(radii):
        for j in range(2 if rho > 0 else 1):
            theta = 0.37 + 2.1 * j + 0.9 * i
            out.append(Disk(rho * complex(math.cos(theta), math.sin(theta)),
                            min(rad, 1 - rho - 1e-12)))
    return out


def verify_construction(res: ConstructionResult, witness: str = "sampled") -> dict:
    cheese = res.cheese
    out: dict = {}

    rep = geo.is_classical(cheese)
    out["classical"] = {"ok": rep.is_classical,
                        "containment_margin": rep.worst_containment_margin,
                        "separation_margin": rep.worst_separation_margin,
                        "violations": len(rep.violating_indices)}

    rho = geo.rho(cheese)
    out["rho"] = {"ok": rho < res.eps, "rho": rho, "eps": res.eps,
                  "stored": rho - cheese.tail_bound, "tail_bound": cheese.tail_bound}

    out["circle"] = {"ok": geo.circle_in_cheese(cheese, 0j, res.r), "r": res.r}

    rows = gamma_display_sums(res.gamma, res.n0, res.K_probe)
    out["gamma_display"] = {"ok": all(t <= rhs for _, t, rhs in rows),
                            "worst_ratio": max(t / rhs for _, t, rhs in rows),
                            "K_probe": res.K_probe}

    # closed-hole distance to C_r versus 2^(2-n0-k) for a hole from level k
    dist = np.abs(np.abs(cheese.hole_centers) - res.r) - cheese.hole_radii
    need = 2.0 ** (2 - res.n0 - res.hole_levels)
    ratio = float(np.min(dist / need)) if len(dist) else math.inf
    out["hole_margins"] = {"ok": bool(np.all(dist > need)) and res.tail_d_min > 0,
                           "min_distance_over_required": ratio,
                           "tail_d_min": res.tail_d_min}

    regions = [Disk(0j, 1.0)] if witness == "full" else witness_regions(res)
    gaps = [geo.empty_interior_witness(cheese, d, res.delta) for d in regions]
    out["density"] = {"ok": all(g[0] for g in gaps), "worst_gap": max(g[1] for g in gaps),
                      "regions": len(regions), "delta": res.delta}
    return out


# --- quasianalyticity certificate -------------------------------------------

@dataclass
class QuasianalyticityReport:
    sup_X: float
    circle_sups: list
    display_rows: list
    N: int | None
    infinite: bool
    root_terms: list
    comparison_terms: list
    domination_ok: bool
    divergence: str
    certificates: list
    display_ok: bool

    @property
    def ok(self) -> bool:
        if self.infinite:
            return self.display_ok
        return self.display_ok and self.domination_ok and self.divergence == Divergence.DIVERGENT_EVIDENCE.value

    def as_dict(self) -> dict:
        return {
            "ok": self.ok, "sup_X": self.sup_X, "infinite_convention": self.infinite,
            "N": self.N, "divergence": self.divergence,
            "display": [{"k": k, "exact": e, "bound": b, "slack": b - e}
                        for k, e, b in self.display_rows],
            "partial_sums": {
                "root": list(np.cumsum(self.root_terms)) if self.root_terms else [],
                "comparison": list(np.cumsum(self.comparison_terms)) if self.comparison_terms else [],
            },
            "domination_ok": self.domination_ok,
            "certificates": self.certificates,
        }


def display_bound(k: int, sup_X: float, d0: float) -> float:
    """``k! |f|_X (1/d0^(k+1) + (log(k+3))^k)``."""
    return math.exp(math.lgamma(k + 1)) * sup_X * (d0 ** (-(k + 1)) + math.log(k + 3) ** k)


def quasianalyticity_certificate(res: ConstructionResult, f: RationalFunction,
                                 K: int = 20, J: int = 60) -> QuasianalyticityReport:
    """Check derivative growth of ``f`` on ``C_r`` against the cheese bound
    and the divergence of ``sum |f^(j)|_{C_r}^(-1/j)``.

    Sup norms on ``C_r`` come from angular sampling with polishing; ``|f|_X``
    from ``sup_on_cheese`` at the construction resolution.
    """
    return circle_certificate(res.cheese, res.r, res.delta, f, K, J)


def circle_certificate(cheese: AbstractSwissCheese, r: float, delta: float,
                       f: RationalFunction, K: int = 20, J: int = 60) -> QuasianalyticityReport:
    """:func:`quasianalyticity_certificate` for any cheese centred at the
    origin containing ``C_r``."""
    from .cohen_engine import InsufficientDivergence, propagate_vanishing_bound

    d0 = cheese.outer.radius - r
    sup_X = sup_on_cheese(f, cheese, delta)
    top = max(K, J)
    sups = sup_jet_on_circle(f, 0j, r, top)
    scale = max(sups[0], sup_X, 1e-300)
    sups = [0.0 if s <= 1e-13 * scale * math.factorial(k) else s for k, s in enumerate(sups)]

    rows = [(k, sups[k], display_bound(k, sup_X, d0)) for k in range(K + 1)]
    display_ok = all(e <= b * (1 + 1e-9) for _, e, b in rows)

    infinite = any(s == 0 for s in sups)
    if infinite:
        return QuasianalyticityReport(sup_X, sups, rows, None, True, [], [], True,
                                      Divergence.DIVERGENT_EVIDENCE.value, [], display_ok)

    N = None
    for k in range(1, top + 1):
        if all(math.log(j + 3) ** j >= d0 ** (-(j + 1)) for j in range(k, top + 1)):
            N = k
            break
    root_terms, comp_terms, dom_ok = [], [], N is not None
    if N is not None:
        for j in range(N, top + 1):
            t = sups[j] ** (-1.0 / j)
            c = 1.0 / ((2 * sup_X) ** (1.0 / j) * j * math.log(j + 3))
            root_terms.append(t)
            comp_terms.append(c)
            dom_ok &= t >= c * (1 - 1e-12)

    M = PositiveSequence.from_values(sups)
    label = classify_divergence(M).label.value if top >= 32 else Divergence.INCONCLUSIVE.value

    certs = []
    principal = [p for p in log_convex_minorant(M).principal_indices if top // 4 <= p <= top - 1]
    if principal:
        lm = log_convex_minorant(M).minorant.log_values
        first = principal[0]
        ratio_sum = float(np.exp(lm[:first + 1] - lm[1:first + 2]).sum())
        s_demo = min(2 * math.pi * r, ratio_sum / (8 * math.e))
        for p in principal:
            try:
                c = propagate_vanishing_bound(M, s_demo, p, replay_limit=0)
            except InsufficientDivergence:
                continue
            certs.append({"n": c.n, "alpha": c.alpha, "final_bound": c.final_bound,
                          "covered_length": c.covered_length, "path_length": s_demo})
    return QuasianalyticityReport(sup_X, sups, rows, N, False, root_terms, comp_terms,
                                  dom_ok, label, certs, display_ok)
