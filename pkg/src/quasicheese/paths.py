"""Piecewise paths (lines, circular arcs, polylines) and contour integration.

A :class:`Path` is a list of segments traversed over consecutive knots
``t_0 < t_1 < ... < t_m`` of its parameter interval; segment ``i`` is run
over ``[t_i, t_{i+1}]`` with its native parametrisation rescaled affinely.
Lines and arcs are constant speed natively.  A polyline carries its own
vertex knots in ``[0, 1]`` (uniform by default), so a unit-speed polyline
is expressible without splitting it.

Integrands are callables accepting numpy arrays of complex points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

ComplexFn = Callable[[np.ndarray], np.ndarray]

QUAD_TOL = 1e-10
MAX_LEVELS = 20
SUP_REL_TOL = 1e-6


class PathError(ValueError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


# --- segments ---------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    kind = "line"

    def point(self, u):
        return self.start + (self.end - self.start) * np.asarray(u, dtype=float)

    def velocity(self, u):
        return np.full(np.shape(u), self.end - self.start, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def cut(self, u0, u1):
        return Line(complex(self.point(u0)), complex(self.point(u1)))

    def reversed(self):
        return Line(self.end, self.start)

    def pieces(self):
        return [self]


@dataclass(frozen=True)
class Arc:
    """Arc of ``|z - center| = radius`` from ``angle_start`` to ``angle_end``.

    Orientation is the sign of ``angle_end - angle_start`` (+1 is
    counterclockwise).
    """
    center: complex
    radius: float
    angle_start: float
    angle_end: float

    kind = "arc"

    @property
    def orientation(self) -> int:
        return 1 if self.angle_end > self.angle_start else -1

    def _theta(self, u):
        return self.angle_start + (self.angle_end - self.angle_start) * np.asarray(u, dtype=float)

    def point(self, u):
        return self.center + self.radius * np.exp(1j * self._theta(u))

    def velocity(self, u):
        return 1j * (self.angle_end - self.angle_start) * self.radius * np.exp(1j * self._theta(u))

    @property
    def length(self) -> float:
        return self.radius * abs(self.angle_end - self.angle_start)

    def cut(self, u0, u1):
        return Arc(self.center, self.radius, float(self._theta(u0)), float(self._theta(u1)))

    def reversed(self):
        return Arc(self.center, self.radius, self.angle_end, self.angle_start)

    def pieces(self):
        return [self]


@dataclass(frozen=True)
class Polyline:
    points: tuple
    knots: tuple | None = None

    kind = "polyline"

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(pts) < 2:
            raise PathError("polyline needs at least two points")
        object.__setattr__(self, "points", pts)
        if self.knots is None:
            kn = tuple(np.linspace(0.0, 1.0, len(pts)).tolist())
        else:
            kn = tuple(float(k) for k in self.knots)
            if len(kn) != len(pts) or kn[0] != 0.0 or kn[-1] != 1.0 or np.any(np.diff(kn) <= 0):
                raise PathError("polyline knots must increase from 0 to 1, one per point")
        object.__setattr__(self, "knots", kn)

    def _locate(self, u):
        u = np.asarray(u, dtype=float)
        kn = np.asarray(self.knots)
        i = np.clip(np.searchsorted(kn, u, side="right") - 1, 0, len(kn) - 2)
        w = (u - kn[i]) / (kn[i + 1] - kn[i])
        return i, w

    def point(self, u):
        p = np.asarray(self.points)
        i, w = self._locate(u)
        return p[i] + (p[i + 1] - p[i]) * w

    def velocity(self, u):
        p = np.asarray(self.points)
        kn = np.asarray(self.knots)
        i, _ = self._locate(u)
        return (p[i + 1] - p[i]) / (kn[i + 1] - kn[i])

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(np.asarray(self.points)))))

    def cut(self, u0, u1):
        kn = np.asarray(self.knots)
        inner = [k for k in kn if u0 < k < u1]
        us = [u0, *inner, u1]
        pts = [complex(self.point(u)) for u in us]
        knots = [(u - u0) / (u1 - u0) for u in us]
        knots[0], knots[-1] = 0.0, 1.0
        return Polyline(tuple(pts), tuple(knots))

    def reversed(self):
        return Polyline(self.points[::-1], tuple(1.0 - k for k in self.knots[::-1]))

    def pieces(self):
        """The straight edges, each with its share of the local parameter."""
        return [Line(a, b) for a, b in zip(self.points[:-1], self.points[1:])]


Segment = Line | Arc | Polyline


# --- paths ------------------------------------------------------------------

@dataclass(frozen=True)
class Path:
    segments: tuple
    knots: tuple = field(default=None)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise PathError("a path needs at least one segment")
        object.__setattr__(self, "segments", segs)
        if self.knots is None:
            kn = tuple(float(i) for i in range(len(segs) + 1))
        else:
            kn = tuple(float(k) for k in self.knots)
        if len(kn) != len(segs) + 1 or np.any(np.diff(kn) <= 0):
            raise PathError("knots must be strictly increasing, one more than segments")
        object.__setattr__(self, "knots", kn)
        for s in segs:
            if s.length == 0.0:
                raise PathError("constant path not admissible")
            if isinstance(s, Polyline) and any(e.length == 0 for e in s.pieces()):
                raise PathError("constant path not admissible")
        for a, b in zip(segs[:-1], segs[1:]):
            za, zb = complex(a.point(1.0)), complex(b.point(0.0))
            if abs(za - zb) > 1e-9 * max(1.0, abs(za)):
                raise PathError(f"segments do not join: {za} vs {zb}")

    @classmethod
    def line(cls, z0, z1, a=0.0, b=1.0):
        return cls((Line(complex(z0), complex(z1)),), (a, b))

    @classmethod
    def circle(cls, center=0j, radius=1.0, orientation=1):
        return cls((Arc(complex(center), float(radius), 0.0, orientation * 2 * math.pi),), (0.0, 1.0))

    @classmethod
    def polyline(cls, points, a=0.0, b=1.0):
        return cls((Polyline(tuple(points)),), (a, b))

    @property
    def interval(self) -> tuple[float, float]:
        return self.knots[0], self.knots[-1]

    @property
    def start(self) -> complex:
        return complex(self.segments[0].point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.segments[-1].point(1.0))

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        kn = np.asarray(self.knots)
        i = np.clip(np.searchsorted(kn, t, side="right") - 1, 0, len(self.segments) - 1)
        u = (t - kn[i]) / (kn[i + 1] - kn[i])
        return i, u

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        i, u = self._locate(t)
        out = np.empty(np.shape(t), dtype=complex)
        for k, seg in enumerate(self.segments):
            m = i == k
            if np.any(m):
                out[m] = seg.point(u[m])
        return out if out.ndim else complex(out)

    def concat(self, other: "Path") -> "Path":
        shift = self.knots[-1] - other.knots[0]
        return Path(self.segments + other.segments,
                    self.knots + tuple(k + shift for k in other.knots[1:]))


def length(path: Path) -> float:
    return math.fsum(s.length for s in path.segments)


def reverse(path: Path) -> Path:
    """The reverse ``t -> path(-t)`` on ``[-b, -a]``."""
    segs = tuple(s.reversed() for s in reversed(path.segments))
    return Path(segs, tuple(-k for k in reversed(path.knots)))


def subpath(path: Path, t0: float, t1: float) -> Path:
    a, b = path.interval
    if t0 == t1:
        raise PathError("degenerate subinterval")
    if not (a <= t0 < t1 <= b):
        raise PathError(f"subinterval [{t0}, {t1}] not inside [{a}, {b}]")
    kn = path.knots
    segs, knots = [], [t0]
    for k, seg in enumerate(path.segments):
        lo, hi = max(kn[k], t0), min(kn[k + 1], t1)
        if hi <= lo:
            continue
        u0 = (lo - kn[k]) / (kn[k + 1] - kn[k])
        u1 = (hi - kn[k]) / (kn[k + 1] - kn[k])
        segs.append(seg if (u0 == 0.0 and u1 == 1.0) else seg.cut(u0, u1))
        knots.append(hi)
    return Path(tuple(segs), tuple(knots))


def arclength_parametrize(path: Path, normalized: bool = False) -> Path:
    """Unit-speed reparametrisation on ``[0, length]`` (or ``[0, 1]``)."""
    total = length(path)
    if total == 0.0:
        raise PathError("constant path not admissible")
    segs, knots, acc = [], [0.0], 0.0
    for seg in path.segments:
        if isinstance(seg, Polyline):
            edges = np.abs(np.diff(np.asarray(seg.points)))
            cum = np.concatenate([[0.0], np.cumsum(edges)]) / edges.sum()
            cum[-1] = 1.0
            seg = Polyline(seg.points, tuple(cum.tolist()))
        segs.append(seg)
        acc += seg.length
        knots.append(acc)
    knots[-1] = total
    if normalized:
        knots = [k / total for k in knots]
        knots[-1] = 1.0
    return Path(tuple(segs), tuple(knots))


def arclength_at(path: Path, t: float) -> float:
    """``length(path | [a, t])``."""
    a, _ = path.interval
    if t <= a:
        return 0.0
    return length(subpath(path, a, t))


# --- quadrature -------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    subdivisions: int


def _as_array_fn(f: ComplexFn):
    def g(z):
        z = np.asarray(z, dtype=complex)
        out = f(z)
        out = np.asarray(out, dtype=complex)
        if out.shape != z.shape:
            out = np.broadcast_to(out, z.shape).astype(complex)
        return out
    return g


def _gk15(h, lo, hi):
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
    vals = h(c + r * _NODES)
    k = r * np.dot(_WK, vals)
    g = r * np.dot(_WG15, vals)
    return k, abs(k - g)


def _integrate_piece(h, share: float, tol: float, max_levels: int):
    """Adaptive bisection of ``int_0^1 h(u) du`` with local tolerance
    ``tol * share * (interval width)``."""
    total, err, count, failed = 0j, 0.0, 0, False
    stack = [(0.0, 1.0, 0)]
    while stack:
        lo, hi, lev = stack.pop()
        val, e = _gk15(h, lo, hi)
        count += 1
        if e <= tol * share * (hi - lo) or lev >= max_levels:
            if e > tol * share * (hi - lo):
                failed = True
            total += val
            err += e
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, lev + 1))
            stack.append((lo, mid, lev + 1))
    return total, err, count, failed


def contour_integral(f: ComplexFn, path: Path, tol: float = QUAD_TOL,
                     max_levels: int = MAX_LEVELS) -> QuadratureResult:
    """``int_path f(z) dz`` by adaptive Gauss-Kronrod (7/15) per smooth piece.

    Each piece gets the share of ``tol`` proportional to its length, so the
    summed error estimate is at most ``tol`` on success.  Raises
    :class:`QuadratureError` (carrying the best estimate) when some interval
    still misses its tolerance after ``max_levels`` bisections.
    """
    f = _as_array_fn(f)
    total_len = length(path)
    value, err, count, failed = 0j, 0.0, 0, False
    for seg in path.segments:
        for piece in seg.pieces():
            share = piece.length / total_len

            def h(u, piece=piece):
                return f(piece.point(u)) * piece.velocity(u)

            v, e, n, bad = _integrate_piece(h, share, tol, max_levels)
            value += v
            err += e
            count += n
            failed |= bad
    result = QuadratureResult(complex(value), float(err), count)
    if failed:
        raise QuadratureError(
            f"quadrature did not reach tol={tol} within {max_levels} bisections "
            f"(error estimate {err:.3e})", result)
    return result


def check_F_derivative(f: ComplexFn, g: ComplexFn, paths: Sequence[Path],
                       tol: float = QUAD_TOL) -> tuple[float, int]:
    """Largest ``|int_gamma g dz - (f(end) - f(start))|`` over the family.

    Returns the residual and the index of the worst path.
    """
    f = _as_array_fn(f)
    worst, where = -1.0, -1
    for i, p in enumerate(paths):
        lhs = contour_integral(g, p, tol).value
        ends = f(np.array([p.start, p.end]))
        res = abs(lhs - (ends[1] - ends[0]))
        if res > worst:
            worst, where = res, i
    return worst, where


# --- sup norms along paths --------------------------------------------------

def sup_on_path(f: ComplexFn, path: Path, rel_tol: float = SUP_REL_TOL,
                t_range: tuple[float, float] | None = None,
                start_samples: int = 64, max_samples: int = 2 ** 18) -> float:
    """Estimate ``sup |f|`` over ``path([t0, t1])``.

    Dyadic refinement until two successive levels agree within ``rel_tol``,
    then a bounded local maximisation around the best sample.  The result is
    an estimate, not a proof.
    """
    f = _as_array_fn(f)
    t0, t1 = t_range if t_range is not None else path.interval
    kn = np.asarray(path.knots)
    inner = kn[(kn > t0) & (kn < t1)]

    def sample(n):
        t = np.unique(np.concatenate([np.linspace(t0, t1, n + 1), inner]))
        return t, np.abs(f(path(t)))

    n = start_samples
    t, v = sample(n)
    prev = float(v.max())
    while n < max_samples:
        n *= 2
        t, v = sample(n)
        cur = float(v.max())
        if abs(cur - prev) <= rel_tol * max(cur, 1e-300):
            prev = cur
            break
        prev = cur
    best = int(np.argmax(v))
    lo, hi = t[max(best - 1, 0)], t[min(best + 1, len(t) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda s: -abs(complex(f(np.array([path(s)]))[0])),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14 * max(1.0, abs(hi))})
        prev = max(prev, -float(res.fun))
    return prev


def check_pathwise_derivative_bound(f: ComplexFn, f1: ComplexFn, path: Path,
                                    samples: int = 64) -> tuple[bool, float]:
    """``|f(end)| <= |f(start)| + length * sup |f1|`` on the path image.

    Returns ``(holds, slack)`` with ``slack = rhs - lhs``.  A relative
    rounding allowance of 1e-12 is applied to the verdict only.
    """
    f = _as_array_fn(f)
    ends = f(np.array([path.start, path.end]))
    lhs = abs(ends[1])
    rhs = abs(ends[0]) + length(path) * sup_on_path(f1, path, start_samples=samples)
    slack = rhs - lhs
    return slack >= -1e-12 * max(rhs, 1.0), slack


def check_cohen_taylor_bound(g, path: Path, points: Sequence[float], M: float,
                             s: float) -> tuple[bool, float]:
    """Taylor-type bound along a unit-speed path.

    ``g`` is a :class:`~quasicheese.rational_jets.RationalFunction`,
    ``points`` are ``s_0 < ... < s_{m-1}`` in arc length and ``M`` bounds
    ``|g^(m)|`` on ``path([s_0, length])``.  Checks

        |g(path(s))| <= sum_{p<m} |g^(p)(path(s_{m-p-1}))| (s - s_{m-p-1})^p / p!
                        + M (s - s_0)^m / m!

    and returns ``(holds, slack)``.  Raises ``ValueError`` if sampling finds
    ``|g^(m)|`` above ``M``.
    """
    from .rational_jets import eval_jet

    pts = [float(x) for x in points]
    m = len(pts)
    ell = length(path)
    a, b = path.interval
    if m < 1:
        raise ValueError("need at least one point")
    if abs((b - a) - ell) > 1e-9 * max(ell, 1.0):
        raise ValueError("path must be parametrised by arc length")
    if any(y <= x for x, y in zip(pts[:-1], pts[1:])) or pts[0] < a or pts[-1] >= b:
        raise ValueError("points must satisfy start <= s_0 < ... < s_{m-1} < end")
    if not (pts[-1] < s <= b + 1e-15 * max(1.0, abs(b))):
        raise ValueError("s must lie in (s_{m-1}, length]")
    s = min(s, b)

    sup_m = sup_on_path(lambda z: g.derivative(m)(z), path, t_range=(pts[0], b))
    if sup_m > M * (1 + 1e-9):
        raise ValueError(f"M={M} is below sampled sup |g^({m})| = {sup_m}")

    rhs = math.fsum(
        abs(eval_jet(g, complex(path(pts[m - p - 1])), p).values[p])
        * (s - pts[m - p - 1]) ** p / math.factorial(p)
        for p in range(m)
    ) + M / math.factorial(m) * (s - pts[0]) ** m
    lhs = abs(g(complex(path(s))))
    slack = rhs - lhs
    return slack >= -1e-12 * max(rhs, 1.0), slack
