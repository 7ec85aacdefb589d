"""Disks, abstract Swiss cheeses and their classicality.

An abstract Swiss cheese is stored as a finite prefix of holes plus a
``tail_bound``: a declared upper bound on the total radius of every hole
that is not stored.  Membership and classicality are exact for the stored
prefix; anything that sums over holes must add the tail term itself.

Hole numbering follows the cheese indexing: the outer disk is index 0 and
``holes[i]`` is hole number ``i + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

BOUNDARY_ULPS = 8


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius >= 0.0:
            raise ValueError(f"disk radius must be nonnegative, got {self.radius}")

    @property
    def is_empty_open(self) -> bool:
        """Radius 0: the open disk is empty and the closed disk is ``{center}``."""
        return self.radius == 0.0


@dataclass(frozen=True)
class AbstractSwissCheese:
    outer: Disk
    holes: tuple[Disk, ...] = ()
    tail_bound: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))
        object.__setattr__(self, "tail_bound", float(self.tail_bound))
        if not self.tail_bound >= 0.0:
            raise ValueError("tail_bound must be nonnegative")

    @classmethod
    def from_arrays(cls, outer: Disk, centers, radii, tail_bound: float = 0.0):
        centers = np.asarray(centers, dtype=complex)
        radii = np.asarray(radii, dtype=float)
        holes = tuple(Disk(complex(c), float(r)) for c, r in zip(centers, radii))
        cheese = cls(outer, holes, tail_bound)
        # seed the array cache so large constructions skip a rebuild
        cheese.__dict__["hole_centers"] = centers.copy()
        cheese.__dict__["hole_radii"] = radii.copy()
        return cheese

    @cached_property
    def hole_centers(self) -> np.ndarray:
        return np.array([h.center for h in self.holes], dtype=complex)

    @cached_property
    def hole_radii(self) -> np.ndarray:
        return np.array([h.radius for h in self.holes], dtype=float)

    @cached_property
    def _tree(self) -> cKDTree | None:
        mask = self.hole_radii > 0
        if not mask.any():
            return None
        c = self.hole_centers[mask]
        return cKDTree(np.column_stack([c.real, c.imag]))

    @cached_property
    def _tree_index(self) -> np.ndarray:
        return np.flatnonzero(self.hole_radii > 0)

    @property
    def max_hole_radius(self) -> float:
        return float(self.hole_radii.max()) if len(self.holes) else 0.0

    def __len__(self):
        return len(self.holes)


@dataclass(frozen=True)
class ClassicalityReport:
    is_classical: bool
    worst_containment_margin: float
    worst_separation_margin: float
    violating_indices: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "is_classical": self.is_classical,
            "worst_containment_margin": self.worst_containment_margin,
            "worst_separation_margin": self.worst_separation_margin,
            "violating_indices": [list(v) if isinstance(v, tuple) else v
                                  for v in self.violating_indices],
        }


def rho(cheese: AbstractSwissCheese) -> float:
    """Total hole radius of the cheese, declared tail included."""
    return math.fsum(cheese.hole_radii.tolist()) + cheese.tail_bound


def _xy(z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.column_stack([z.real, z.imag])


def is_classical(cheese: AbstractSwissCheese, strictness_tol: float = 0.0) -> ClassicalityReport:
    """Check the strict containment and disjointness conditions.

    Holes with radius 0 are skipped.  Violations are reported as hole
    numbers (containment) or pairs of hole numbers (separation).  The
    separation margin is exact: a nearest-neighbour pass gives an upper
    bound ``m0`` on the worst margin, and every pair that could beat it has
    centre distance at most ``m0 + 2 * max_radius``.
    """
    tol = float(strictness_tol)
    r0 = cheese.outer.radius
    idx = cheese._tree_index
    violations: list = []

    if len(idx) == 0:
        containment = math.inf
        separation = math.inf
    else:
        c = cheese.hole_centers[idx]
        r = cheese.hole_radii[idx]
        cont = r0 - np.abs(c - cheese.outer.center) - r
        containment = float(cont.min())
        for i in np.flatnonzero(cont <= tol):
            violations.append(int(idx[i]) + 1)

        separation = math.inf
        if len(idx) > 1:
            pts = _xy(c)
            tree = cheese._tree
            dist, nn = tree.query(pts, k=2)
            # duplicate centres can return the query point second
            own = nn[:, 1] == np.arange(len(idx))
            other = np.where(own, nn[:, 0], nn[:, 1])
            m0 = float(np.min(dist[:, 1] - r - r[other]))
            reach = max(m0, tol) + 2.0 * float(r.max())
            pairs = tree.query_pairs(reach, output_type="ndarray")
            if len(pairs):
                a, b = pairs[:, 0], pairs[:, 1]
                sep = np.abs(c[a] - c[b]) - r[a] - r[b]
                separation = float(min(sep.min(), m0))
                bad = np.flatnonzero(sep <= tol)
                for p in bad[np.lexsort((b[bad], a[bad]))]:
                    i, j = sorted((int(idx[a[p]]) + 1, int(idx[b[p]]) + 1))
                    violations.append((i, j))
            else:
                separation = m0

    ok = (
        r0 > 0
        and math.isfinite(rho(cheese))
        and containment > tol
        and separation > tol
    )
    return ClassicalityReport(bool(ok), containment, separation, violations)


def _slack(z, c, r):
    # a few ulps: points computed on a boundary circle must stay on it
    return BOUNDARY_ULPS * np.finfo(float).eps * (np.abs(z) + np.abs(c) + r)


def _large_holes(r: np.ndarray, limit: int = 256) -> tuple[np.ndarray, float]:
    """Mask of the ``limit`` largest holes and the largest radius among the
    rest.  Ball queries use the latter so one big hole does not pull every
    other hole into every query."""
    if len(r) <= limit:
        return np.zeros(len(r), dtype=bool), float(r.max()) if len(r) else 0.0
    cut = float(np.partition(r, len(r) - limit - 1)[len(r) - limit - 1])
    return r > cut, cut


def contains_points(cheese: AbstractSwissCheese, z) -> np.ndarray:
    """Vectorised membership in the closed set X (stored prefix only).

    Boundary circles belong to X; distances within ``BOUNDARY_ULPS`` units
    in the last place of a radius count as on the boundary.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    o = cheese.outer
    inside = np.abs(z - o.center) <= o.radius + _slack(z, o.center, o.radius)
    tree = cheese._tree
    if tree is None or not inside.any():
        return inside
    c = cheese.hole_centers[cheese._tree_index]
    r = cheese.hole_radii[cheese._tree_index]
    big, rmax = _large_holes(r)
    for cb, rb in zip(c[big], r[big]):
        inside &= ~(np.abs(z - cb) < rb - _slack(z, cb, rb))
    cand = np.flatnonzero(inside)
    hits = tree.query_ball_point(_xy(z[cand]), rmax, return_sorted=False)
    for p, nbrs in zip(cand, hits):
        if nbrs and np.any(np.abs(z[p] - c[nbrs]) < r[nbrs] - _slack(z[p], c[nbrs], r[nbrs])):
            inside[p] = False
    return inside


def contains_point(cheese: AbstractSwissCheese, z: complex) -> bool:
    return bool(contains_points(cheese, z)[0])


def circle_in_cheese(cheese: AbstractSwissCheese, c: complex, r: float) -> bool:
    """Exact test that the circle ``|z - c| = r`` lies in X."""
    if not r > 0:
        raise ValueError("circle radius must be positive")
    if abs(c - cheese.outer.center) + r > cheese.outer.radius:
        return False
    if not len(cheese.holes):
        return True
    gap = np.abs(np.abs(cheese.hole_centers - c) - r)
    return bool(np.all(gap >= cheese.hole_radii))


def distance_to_complement(cheese: AbstractSwissCheese, z) -> np.ndarray:
    """Distance from each point to (open holes) union (exterior of the outer disk).

    Points outside X get distance 0.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d = np.maximum(cheese.outer.radius - np.abs(z - cheese.outer.center), 0.0)
    tree = cheese._tree
    if tree is None or len(z) == 0:
        return d
    c = cheese.hole_centers[cheese._tree_index]
    r = cheese.hole_radii[cheese._tree_index]
    big, rmax = _large_holes(r)
    for cb, rb in zip(c[big], r[big]):
        d = np.minimum(d, np.maximum(np.abs(z - cb) - rb, 0.0))
    pts = _xy(z)
    k = min(8, len(c))
    _, nn = tree.query(pts, k=k)
    nn = nn.reshape(len(z), k)
    upper = np.minimum(d, np.min(np.maximum(np.abs(z[:, None] - c[nn]) - r[nn], 0.0), axis=1))
    hits = tree.query_ball_point(pts, upper + rmax, return_sorted=False)
    out = upper.copy()
    for p, nbrs in enumerate(hits):
        if nbrs:
            cand = np.maximum(np.abs(z[p] - c[nbrs]) - r[nbrs], 0.0)
            out[p] = min(out[p], float(cand.min()))
    return out


def grid_in_disk(region: Disk, spacing: float) -> np.ndarray:
    """Square grid of the given spacing clipped to the closed disk."""
    if region.radius == 0:
        return np.array([region.center])
    n = int(math.floor(region.radius / spacing))
    t = spacing * np.arange(-n, n + 1)
    zz = region.center + (t[None, :] + 1j * t[:, None]).ravel()
    return zz[np.abs(zz - region.center) <= region.radius]


def empty_interior_witness(cheese: AbstractSwissCheese, region: Disk,
                           resolution: float) -> tuple[bool, float]:
    """Finite-resolution proxy for ``int X = empty`` inside ``region``.

    Every grid point (spacing ``resolution / 2``) of ``region`` that lies in
    X must be within ``resolution`` of the complement of X.  Returns the
    verdict and the worst distance found.
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    if region.radius == 0:
        return True, 0.0
    pts = grid_in_disk(region, resolution / 2.0)
    pts = pts[contains_points(cheese, pts)]
    if len(pts) == 0:
        return True, 0.0
    gap = float(distance_to_complement(cheese, pts).max())
    return gap <= resolution, gap
