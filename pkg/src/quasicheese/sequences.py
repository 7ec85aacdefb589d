"""Positive sequences: algebra/log-convexity checks, log-convex minorants,
Denjoy-Carleman partial sums and related statistics.

Every operation sees a finite prefix ``M_0 .. M_N`` only; classifications
are evidence labels for that horizon, never statements about the infinite
sequence.  Values are held as natural logarithms so that factorial-type
sequences far beyond the float range are fine.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal, getcontext
from typing import Sequence

import numpy as np
from scipy.special import gammaln

REL_TOL = 1e-12


def _close_le(a, b, scale) -> bool:
    return a <= b + REL_TOL * max(1.0, scale)


@dataclass(frozen=True)
class PositiveSequence:
    """``M_0 .. M_N`` stored through ``log_values``."""
    log_values: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.log_values, dtype=float)
        if lv.ndim != 1 or len(lv) == 0:
            raise ValueError("need a nonempty 1-d sequence")
        if np.any(np.isnan(lv)) or np.any(lv == -np.inf):
            raise ValueError("all entries must be positive")
        lv.setflags(write=False)
        object.__setattr__(self, "log_values", lv)

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "PositiveSequence":
        v = np.asarray(values, dtype=float)
        if np.any(~(v > 0)):
            raise ValueError("all entries must be positive")
        return cls(np.log(v))

    @classmethod
    def from_decimal_strings(cls, values: Sequence[str]) -> "PositiveSequence":
        getcontext().prec = 40
        logs = []
        for s in values:
            d = Decimal(s)
            if not d > 0:
                raise ValueError(f"entry {s!r} is not positive")
            logs.append(float(d.ln()))
        return cls(np.array(logs))

    def to_decimal_strings(self) -> list[str]:
        getcontext().prec = 40
        return [format(Decimal(repr(float(x))).exp(), ".17g") for x in self.log_values]

    @property
    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_values)

    @property
    def N(self) -> int:
        return len(self.log_values) - 1

    def __len__(self):
        return len(self.log_values)

    def scaled(self, c: float) -> "PositiveSequence":
        return PositiveSequence(self.log_values + math.log(c))


# --- named families ---------------------------------------------------------

def factorial_family(N: int, power: float = 1.0) -> PositiveSequence:
    return PositiveSequence(power * gammaln(np.arange(N + 1) + 1.0))


def geometric_family(N: int, c: float) -> PositiveSequence:
    return PositiveSequence(np.arange(N + 1) * math.log(c))


def power_family(N: int) -> PositiveSequence:
    """``n^n`` with ``0^0 = 1``."""
    n = np.arange(N + 1, dtype=float)
    return PositiveSequence(np.where(n > 0, n * np.log(np.maximum(n, 1.0)), 0.0))


def constant_family(N: int, c: float = 1.0) -> PositiveSequence:
    return PositiveSequence(np.full(N + 1, math.log(c)))


def named_family(name: str, N: int) -> PositiveSequence:
    """``factorial``, ``factorial2`` / ``factorial:p``, ``geometric:c``,
    ``power:nn`` or ``constant[:c]``."""
    head, _, arg = name.partition(":")
    if head == "factorial":
        return factorial_family(N, float(arg) if arg else 1.0)
    if head == "factorial2":
        return factorial_family(N, 2.0)
    if head == "geometric":
        return geometric_family(N, float(arg) if arg else 2.0)
    if head == "power":
        return power_family(N)
    if head == "constant":
        return constant_family(N, float(arg) if arg else 1.0)
    raise ValueError(f"unknown family {name!r}")


# --- checks -----------------------------------------------------------------

def is_algebra_sequence(M: PositiveSequence) -> tuple[bool, tuple[int, int] | None]:
    """``M_0 = 1`` and ``C(j+k, k) <= M_{j+k} / (M_j M_k)`` for ``j + k <= N``.

    Returns the verdict and the first violating ``(j, k)`` (ordered by
    ``j + k``, then ``j``); ``(0, 0)`` flags ``M_0 != 1``.
    """
    lv = M.log_values
    if abs(lv[0]) > REL_TOL:
        return False, (0, 0)
    N = M.N
    lf = gammaln(np.arange(N + 1) + 1.0)
    for n in range(2, N + 1):
        for j in range(1, n):
            k = n - j
            lhs = lf[n] - lf[j] - lf[k]
            rhs = lv[n] - lv[j] - lv[k]
            if not _close_le(lhs, rhs, max(abs(lv[n]), abs(lhs))):
                return False, (j, k)
    return True, None


def is_log_convex(M: PositiveSequence) -> tuple[bool, int | None]:
    lv = M.log_values
    for k in range(1, M.N):
        if not _close_le(2 * lv[k], lv[k - 1] + lv[k + 1], abs(lv[k])):
            return False, k
    return True, None


@dataclass(frozen=True)
class MinorantResult:
    minorant: PositiveSequence
    principal_indices: tuple[int, ...]
    vertices: tuple[int, ...]

    def ratio(self, j: int) -> float:
        """``M^c_j / M^c_{j+1}``."""
        lv = self.minorant.log_values
        return math.exp(lv[j] - lv[j + 1])


def _lower_hull(y: np.ndarray) -> list[int]:
    """Vertices of the lower convex hull of ``(n, y_n)``; collinear points dropped."""
    hull: list[int] = []
    for i in range(len(y)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # pop b unless it lies strictly below the chord a -> i
            if (y[b] - y[a]) * (i - a) >= (y[i] - y[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def log_convex_minorant(M: PositiveSequence) -> MinorantResult:
    """Largest log-convex sequence below ``M``.

    Computed as the exponential of the lower convex hull of ``(n, log M_n)``
    with one monotone stack sweep.  Principal indices are all contact points
    ``M^c_n = M_n`` (to ``1e-12`` relative), so collinear contacts count and
    an already log-convex input returns every index.  The final index ``N``
    is always a contact point of a finite prefix.
    """
    y = M.log_values
    verts = _lower_hull(y)
    n = np.arange(len(y), dtype=float)
    hull = np.interp(n, np.array(verts, dtype=float), y[verts])
    hull[verts] = y[verts]
    hull = np.minimum(hull, y)
    contact = np.abs(y - hull) <= REL_TOL * np.maximum(1.0, np.abs(y))
    hull[contact] = y[contact]
    principal = tuple(int(i) for i in np.flatnonzero(contact))
    return MinorantResult(PositiveSequence(hull), principal, tuple(verts))


def liminf_root_hypothesis_note(M: PositiveSequence) -> str:
    """Principal indices keep coming only when ``liminf M_n^{1/n} = infinity``,
    which a finite prefix cannot confirm."""
    tail = M.log_values[1:] / np.arange(1, len(M))
    trend = "increasing" if len(tail) > 2 and tail[-1] > tail[len(tail) // 2] else "not increasing"
    return f"liminf M_n^(1/n) = inf is unverifiable on a prefix; log M_n / n is {trend} at the horizon"


# --- Denjoy-Carleman --------------------------------------------------------

@dataclass(frozen=True)
class DCPartialSums:
    """``root_sums[n-1] = sum_{j=1}^{n} M_j^{-1/j}`` and
    ``ratio_sums[n] = sum_{j=0}^{n} M^c_j / M^c_{j+1}``.

    ``infinite`` is set when some entry is zero (the divergence convention);
    ``ratio_sums`` is then ``None``.
    """
    root_sums: np.ndarray
    ratio_sums: np.ndarray | None
    infinite: bool
    zero_index: int | None = None


def _logs_with_zeros(values) -> tuple[np.ndarray, int | None]:
    if isinstance(values, PositiveSequence):
        return values.log_values, None
    v = np.asarray(values, dtype=float)
    if np.any(v < 0) or np.any(np.isnan(v)):
        raise ValueError("sup-norm style entries must be nonnegative")
    zeros = np.flatnonzero(v == 0)
    with np.errstate(divide="ignore"):
        return np.log(v), (int(zeros[0]) if len(zeros) else None)


def dc_partial_sums(M, up_to: int | None = None) -> DCPartialSums:
    lv, zero = _logs_with_zeros(M)
    N = len(lv) - 1
    up_to = N if up_to is None else int(up_to)
    if not 1 <= up_to <= N:
        raise ValueError(f"up_to must be in [1, {N}]")
    n = np.arange(1, up_to + 1)
    with np.errstate(over="ignore"):
        terms = np.exp(-lv[1:up_to + 1] / n)
    if zero is not None:
        roots = np.cumsum(terms)
        roots[max(zero, 1) - 1:] = np.inf
        return DCPartialSums(roots, None, True, zero)
    mc = log_convex_minorant(PositiveSequence(lv)).minorant.log_values
    ratios = np.exp(mc[:up_to] - mc[1:up_to + 1])
    return DCPartialSums(np.cumsum(terms), np.cumsum(ratios), False, None)


class Divergence(enum.Enum):
    DIVERGENT_EVIDENCE = "DIVERGENT_EVIDENCE"
    CONVERGENT_EVIDENCE = "CONVERGENT_EVIDENCE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class DivergenceReport:
    label: Divergence
    slope: float
    residual: float
    infinite: bool = False


DIVERGENT_SLOPE = -1.05
CONVERGENT_SLOPE = -1.3


def classify_divergence(M, min_length: int = 32) -> DivergenceReport:
    """Heuristic label for ``sum M_n^{-1/n}`` from the decay of its terms.

    Fits ``log a_n`` against ``log n`` on the top half of ``1..N`` where
    ``a_n = M_n^{-1/n}``.  Slope ``>= -1.05`` is divergent evidence; slope
    ``<= -1.3`` with decreasing terms is convergent evidence.  A zero entry
    is divergent by convention.
    """
    lv, zero = _logs_with_zeros(M)
    N = len(lv) - 1
    if zero is not None:
        return DivergenceReport(Divergence.DIVERGENT_EVIDENCE, math.inf, 0.0, True)
    if N < min_length:
        raise ValueError(f"need N >= {min_length}, got {N}")
    n = np.arange(max(1, N // 2), N + 1, dtype=float)
    log_a = -lv[n.astype(int)] / n
    x = np.log(n)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, log_a, rcond=None)
    slope = float(coef[0])
    residual = float(np.sqrt(np.mean((A @ coef - log_a) ** 2)))
    if slope >= DIVERGENT_SLOPE:
        label = Divergence.DIVERGENT_EVIDENCE
    elif slope <= CONVERGENT_SLOPE and np.all(np.diff(log_a) <= 0):
        label = Divergence.CONVERGENT_EVIDENCE
    else:
        label = Divergence.INCONCLUSIVE
    return DivergenceReport(label, slope, residual)


@dataclass(frozen=True)
class DalesDavieNorm:
    partial_sum: float
    infinite: bool
    terms: np.ndarray


def dales_davie_norm(sup_norms: Sequence[float], M: PositiveSequence,
                     window: float = 0.25) -> DalesDavieNorm:
    """``sum_j |f^[j]| / M_j`` over the prefix.

    ``infinite`` flags terms that have stopped decaying: the nonzero terms
    in the last ``window`` fraction do not decrease overall and are not
    negligible against the partial sum.
    """
    s = np.asarray(sup_norms, dtype=float)
    if len(s) != len(M):
        raise ValueError("sup_norms and M must have the same length")
    with np.errstate(under="ignore"):
        terms = s * np.exp(-M.log_values)
    total = math.fsum(terms.tolist())
    w = max(2, int(math.ceil(window * len(terms))))
    tail = terms[-w:]
    nz = tail[tail > 0]
    infinite = bool(len(nz) >= 2 and nz[-1] >= nz[0] and nz[-1] > 1e-12 * max(total, 1e-300))
    return DalesDavieNorm(total, infinite, terms)


@dataclass(frozen=True)
class AnalyticStatistic:
    """``stat[k-1] = (|f^[k]| / k!)^{1/k}`` for ``k >= 1`` and the running
    sup of the tail ``tail_sup[k-1] = max_{j >= k} stat[j-1]``."""
    stat: np.ndarray
    tail_sup: np.ndarray
    unbounded: bool


def f_analytic_statistic(sup_norms) -> AnalyticStatistic:
    """Boundedness of ``(|f^[k]| / k!)^{1/k}``; zeros give statistic 0.

    ``unbounded`` is a horizon heuristic: the statistic keeps growing over
    the second half and ends at least 1.5 times its midpoint value.
    """
    lv, _ = _logs_with_zeros(sup_norms)
    K = len(lv) - 1
    k = np.arange(1, K + 1, dtype=float)
    with np.errstate(invalid="ignore"):
        logstat = (lv[1:] - gammaln(k + 1)) / k
    stat = np.where(np.isneginf(lv[1:]), 0.0, np.exp(logstat))
    tail = np.maximum.accumulate(stat[::-1])[::-1]
    unbounded = False
    if K >= 4:
        half = stat[K // 2 - 1:]
        unbounded = bool(np.all(np.diff(half) > 0) and half[-1] >= 1.5 * half[0])
    return AnalyticStatistic(stat, tail, unbounded)
