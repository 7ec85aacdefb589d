"""Derivative bounds for rational functions on Swiss cheese sets.

For ``z`` with positive distance to every deleted disk,

    |f^(k)(z)| <= k! * sum_j r_j / d_j^(k+1) * |f|_X,

where index 0 is the outer disk with ``d_0 = r_0 - |z - a_0|``.  The sum
runs over the stored holes; the declared tail adds
``tail_bound / tail_d_min^(k+1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .geometry import AbstractSwissCheese
from .rational_jets import RationalFunction, jets_at, sup_on_cheese


class TouchesHole(ValueError):
    pass


@dataclass(frozen=True)
class DistanceProfile:
    z: complex
    d: np.ndarray  # d[0] outer, d[n] hole n; inf for radius-0 holes
    d_tail_min: float | None = None

    @property
    def touching(self) -> list[int]:
        """Indices with ``d <= 0``."""
        return [int(i) for i in np.flatnonzero(self.d <= 0)]

    @property
    def positive(self) -> bool:
        return not self.touching


def distance_profile(cheese: AbstractSwissCheese, z: complex,
                     tail_d_min: float | None = None) -> DistanceProfile:
    z = complex(z)
    d0 = cheese.outer.radius - abs(z - cheese.outer.center)
    r = cheese.hole_radii
    dh = np.maximum(np.abs(z - cheese.hole_centers) - r, 0.0)
    dh = np.where(r > 0, dh, np.inf)
    return DistanceProfile(z, np.concatenate([[d0], dh]), tail_d_min)


def _log_series(cheese: AbstractSwissCheese, prof: DistanceProfile, k: int,
                tail_d_min: float | None) -> float:
    if not prof.positive:
        raise TouchesHole(f"point touches a deleted disk (indices {prof.touching[:5]})")
    radii = np.concatenate([[cheese.outer.radius], cheese.hole_radii])
    use = (radii > 0) & np.isfinite(prof.d)
    logs = np.log(radii[use]) - (k + 1) * np.log(prof.d[use])
    if cheese.tail_bound > 0:
        if tail_d_min is None or not tail_d_min > 0:
            raise ValueError("tail_d_min > 0 is required when tail_bound > 0")
        logs = np.append(logs, math.log(cheese.tail_bound) - (k + 1) * math.log(tail_d_min))
    return float(logsumexp(logs))


def cheese_derivative_bound(cheese: AbstractSwissCheese, z: complex, k: int,
                            tail_d_min: float | None = None) -> float:
    """The per-unit bound ``k! * (sum r_j / d_j^(k+1) + tail term)``."""
    prof = distance_profile(cheese, z)
    return math.exp(math.lgamma(k + 1) + _log_series(cheese, prof, k, tail_d_min))


def bound_contributions(cheese: AbstractSwissCheese, z: complex, k: int,
                        tail_d_min: float | None = None) -> dict:
    """Split of the bound into outer, stored holes and tail."""
    prof = distance_profile(cheese, z)
    if not prof.positive:
        raise TouchesHole("point touches a deleted disk")
    lf = math.lgamma(k + 1)
    outer = math.exp(lf + math.log(cheese.outer.radius) - (k + 1) * math.log(prof.d[0]))
    r = cheese.hole_radii
    use = (r > 0) & np.isfinite(prof.d[1:])
    holes = float(np.exp(lf + logsumexp(np.log(r[use]) - (k + 1) * np.log(prof.d[1:][use])))) \
        if use.any() else 0.0
    tail = 0.0
    if cheese.tail_bound > 0:
        tail = math.exp(lf + math.log(cheese.tail_bound) - (k + 1) * math.log(tail_d_min))
    return {"outer": outer, "holes": holes, "tail": tail}


@dataclass
class BoundRow:
    z: complex
    k: int
    exact: float
    bound: float

    @property
    def slack(self) -> float:
        return self.bound - self.exact


@dataclass
class CheeseBoundReport:
    sup_norm: float
    rows: list = field(default_factory=list)
    noise_budget: float = 1e-9

    @property
    def min_slack(self) -> float:
        return min(r.slack for r in self.rows) if self.rows else math.inf

    @property
    def ok(self) -> bool:
        return all(r.slack >= -self.noise_budget * max(r.bound, 1.0) for r in self.rows)

    def table(self) -> list[tuple]:
        return [(r.z, r.k, r.exact, r.bound, r.slack) for r in self.rows]


def circle_targets(center: complex, r: float, count: int = 64) -> np.ndarray:
    return center + r * np.exp(2j * math.pi * np.arange(count) / count)


def verify_cheese_bound(cheese: AbstractSwissCheese, f: RationalFunction, targets,
                        K: int, delta: float, tail_d_min: float | None = None,
                        noise_budget: float = 1e-9) -> CheeseBoundReport:
    """Compare exact ``|f^(k)(z)|`` with ``bound(z, k) * |f|_X`` for every
    target and ``k <= K``.

    ``|f|_X`` is a sampled estimate (``sup_on_cheese`` at grid ``delta``);
    ``noise_budget`` is the relative shortfall tolerated on that account.
    """
    sup = sup_on_cheese(f, cheese, delta)
    pts = np.atleast_1d(np.asarray(targets, dtype=complex))
    exact = jets_at(f, pts, K)
    rep = CheeseBoundReport(sup, noise_budget=noise_budget)
    for i, z in enumerate(pts):
        prof = distance_profile(cheese, z)
        for k in range(K + 1):
            unit = math.exp(gammaln(k + 1) + _log_series(cheese, prof, k, tail_d_min))
            rep.rows.append(BoundRow(complex(z), k, float(exact[i, k]), unit * sup))
    return rep
