"""Cohen's triangular constants and the vanishing-bound propagation.

``B[j, k]`` (``0 <= j <= k``) is defined by ``B[0, k] = 0``, ``B[j, j] = 1``
for ``j >= 1`` and ``B[j+1, k+1] = B[j, k+1] + alpha * B[j+1, k]``.

Unrolling the recursion as weighted lattice paths gives

    B[j, k] = sum_{d=1}^{j} alpha^(k-d) * (C(a+b, a) - C(a+b, b+1)),
              a = j - d,  b = k - d - 1,

a ballot-number count.  In particular ``B[k-1, k]`` is a partial sum of
``alpha^(a+1) * Catalan(a)``, entries grow with ``j`` along a column, and the
largest entry of a table of size ``K`` is ``B[K-1, K]``.  That identity lets
certificates of order ``10^5`` skip the quadratic table.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .sequences import PositiveSequence, log_convex_minorant

FOUR_E = 4 * math.e


@dataclass(frozen=True)
class BTable:
    alpha: float
    K: int
    entries: np.ndarray  # (K+1, K+1), upper triangle used

    def __getitem__(self, jk):
        j, k = jk
        if not 0 <= j <= k <= self.K:
            raise IndexError(f"B[{j}, {k}] outside 0 <= j <= k <= {self.K}")
        return float(self.entries[j, k])


def b_table(alpha: float, K: int) -> BTable:
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if K < 1:
        raise ValueError("K must be at least 1")
    B = np.zeros((K + 1, K + 1))
    for c in range(1, K + 1):
        B[c, c] = 1.0
        for r in range(1, c):
            B[r, c] = B[r - 1, c] + alpha * B[r, c - 1]
    B.setflags(write=False)
    return BTable(float(alpha), int(K), B)


def _log_comb(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def b_entry(alpha: float, j: int, k: int) -> float:
    """Single entry from the ballot-number expansion, no table needed."""
    if j == 0:
        return 0.0
    if j == k:
        return 1.0
    if not 0 < j < k:
        raise IndexError("need 0 <= j <= k")
    d = np.arange(1, j + 1, dtype=float)
    a = j - d
    b = k - d - 1
    log_first = _log_comb(a + b, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        second = np.where(b + 1 <= a + b, np.exp(_log_comb(a + b, b + 1) - log_first), 0.0)
    log_terms = (k - d) * math.log(alpha) + log_first + np.log1p(-second)
    return float(np.exp(log_terms).sum())


def max_b_entry(alpha: float, K: int) -> float:
    """``max_{1 <= j < k <= K} B[j, k] = B[K-1, K] = sum_{a<K-1} alpha^(a+1) Catalan(a)``."""
    if K < 2:
        return 0.0
    a = np.arange(K - 1, dtype=float)
    log_cat = gammaln(2 * a + 1) - gammaln(a + 1) - gammaln(a + 2)
    return float(np.exp((a + 1) * math.log(alpha) + log_cat).sum())


def cohen_sum(alpha: float, n: int) -> float:
    """``sum_{j<n} ((j+1) alpha)^j / j! + 2 (n alpha)^n / n!``."""
    j = np.arange(n, dtype=float)
    terms = np.exp(j * np.log((j + 1) * alpha) - gammaln(j + 1))
    return float(terms.sum() + 2 * math.exp(n * math.log(n * alpha) - math.lgamma(n + 1)))


@dataclass(frozen=True)
class CohenBoundsReport:
    alpha: float
    K: int
    K_est: float
    max_B: float
    max_sum: float
    b_bound_ok: bool
    sum_check_ok: bool

    @property
    def ok(self) -> bool:
        return self.b_bound_ok and self.sum_check_ok


def verify_cohen_bounds(alpha: float, K: int) -> CohenBoundsReport:
    """Check ``B[j, k] < 1/2`` for ``1 <= j < k <= K`` and ``cohen_sum(alpha, n) < 2``
    for ``1 <= n <= K`` using the full recursion table."""
    if not 0 < alpha < 1 / FOUR_E:
        raise ValueError(f"alpha must lie in (0, 1/(4e)) = (0, {1 / FOUR_E:.6f})")
    if K < 2:
        raise ValueError("K must be at least 2")
    tab = b_table(alpha, K)
    iu = np.triu_indices(K + 1, k=1)
    upper = tab.entries[iu][iu[0] >= 1]
    max_B = float(upper.max())
    sums = [cohen_sum(alpha, n) for n in range(1, K + 1)]
    return CohenBoundsReport(alpha, K, max_B / alpha, max_B, max(sums),
                             max_B < 0.5, max(sums) < 2.0)


# --- bound propagation ------------------------------------------------------

class InsufficientDivergence(ValueError):
    pass


@dataclass
class PropagationCertificate:
    """Replay of the vanishing-bound induction at one order.

    ``grid`` holds ``x_0 = 0 < ... < x_n``; the claim at ``(j, k)`` is
    ``|f^[k]| <= B[j, n-k+1] * M^c_k`` on ``sigma([0, x_j])``.
    ``final_bound`` bounds ``|f|`` on ``sigma([0, x_n])`` by
    ``max B * M_0``.  ``bound_table`` is filled only when the induction is
    replayed (``n <= replay_limit``); :meth:`bound` works at any order.
    """
    n: int
    requested_n: int
    snapped: bool
    alpha: float
    path_length: float
    ratio_sum: float
    grid: np.ndarray
    final_bound: float
    K_est: float
    log_minorant: np.ndarray = field(repr=False)
    principal_indices: tuple = field(repr=False, default=())
    bound_table: dict | None = field(repr=False, default=None)
    replay_ok: bool | None = None
    replay_failures: list = field(default_factory=list, repr=False)
    sequence_digest: str = ""

    def bound(self, j: int, k: int) -> float:
        if not (0 <= j <= self.n and 0 <= k <= self.n - j + 1):
            raise IndexError("need 0 <= j <= n and k <= n - j + 1")
        return b_entry(self.alpha, j, self.n - k + 1) * math.exp(self.log_minorant[k])

    @property
    def covered_length(self) -> float:
        return float(self.grid[-1]) if len(self.grid) else 0.0

    def as_dict(self, include_grid: bool = True) -> dict:
        d = {
            "n": self.n,
            "requested_n": self.requested_n,
            "snapped": self.snapped,
            "alpha": self.alpha,
            "final_bound": self.final_bound,
            "K_est": self.K_est,
            "ratio_sum": self.ratio_sum,
            "covered_length": self.covered_length,
            "replay_ok": self.replay_ok,
            "provenance": {"sequence_sha256": self.sequence_digest,
                           "path_length": self.path_length},
        }
        if include_grid:
            d["grid"] = self.grid.tolist()
        return d


def sequence_digest(M: PositiveSequence) -> str:
    return hashlib.sha256(np.ascontiguousarray(M.log_values).tobytes()).hexdigest()


def propagate_vanishing_bound(M: PositiveSequence, s: float, n: int,
                              replay_limit: int = 400) -> PropagationCertificate:
    """Certificate that ``|f| <= final_bound`` along a path of length ``s``
    from a point where every derivative of ``f`` vanishes, given
    ``|f^[k]| <= M_k``.

    ``n`` snaps down to the nearest principal index of the log-convex
    minorant.  Requires ``sum_{j<=n} M^c_j / M^c_{j+1} > 4 e s``.  ``M``
    needs at least ``n + 2`` entries.
    """
    if s < 0:
        raise ValueError("path length must be nonnegative")
    mr = log_convex_minorant(M)
    lm = mr.minorant.log_values
    digest = sequence_digest(M)
    if n + 1 > M.N:
        raise ValueError(f"order {n} needs M_0..M_{n + 1}; only {M.N + 1} entries")
    principal = [p for p in mr.principal_indices if p <= n]
    order = principal[-1]
    if s == 0:
        return PropagationCertificate(order, n, order != n, 0.0, 0.0, 0.0,
                                      np.zeros(1), 0.0, 0.0, lm, mr.principal_indices,
                                      sequence_digest=digest)
    if order == 0:
        raise InsufficientDivergence("insufficient divergence at this order")
    ratios = np.exp(lm[:order + 1] - lm[1:order + 2])
    ratio_sum = math.fsum(ratios.tolist())
    if not ratio_sum > FOUR_E * s:
        raise InsufficientDivergence(
            f"insufficient divergence at this order: sum of ratios {ratio_sum:.6g} "
            f"<= 4e * s = {FOUR_E * s:.6g}")
    alpha = s / ratio_sum
    # x_j - x_{j-1} = alpha * M^c_{n-j} / M^c_{n-j+1}
    steps = alpha * ratios[order - 1::-1]
    grid = np.concatenate([[0.0], np.cumsum(steps)])
    max_B = max_b_entry(alpha, order + 1)
    cert = PropagationCertificate(
        n=order, requested_n=n, snapped=order != n, alpha=alpha, path_length=float(s),
        ratio_sum=ratio_sum, grid=grid, final_bound=max_B * math.exp(lm[0]),
        K_est=max_B / alpha, log_minorant=lm, principal_indices=mr.principal_indices,
        sequence_digest=digest,
    )
    if order <= replay_limit:
        _replay(cert)
    return cert


def _replay(cert: PropagationCertificate) -> None:
    """Re-run the double induction, storing each claimed bound divided by
    ``M^c_k`` (the B-coefficient actually achieved) and recording every
    inequality of the argument that fails."""
    n, alpha = cert.n, cert.alpha
    lm = cert.log_minorant
    B = b_table(alpha, n + 1).entries
    principal = set(cert.principal_indices)
    plist = sorted(p for p in principal if p <= n + 1)
    if n + 1 not in principal:
        plist.append(n + 1)
    failures: list = []
    # coef[j][k]: claimed |f^[k]| / M^c_k on [0, x_j]
    coef = {0: {k: 0.0 for k in range(n + 2)}}
    ratio = lambda i: math.exp(lm[i] - lm[i + 1])  # noqa: E731
    tiny = 1e-12

    for j in range(1, n + 1):
        i = n - j + 1
        row: dict[int, float] = {}
        if i in principal:
            row[i] = 1.0
        else:
            r = max(p for p in plist if p < i)
            r1 = min(p for p in plist if p > i)
            m = r1 - i
            if j - m < 1:
                failures.append(("index", j, i))
            R = ratio(r)
            combo = math.fsum(
                coef[j - 1 - p][i + p] * ((p + 1) * alpha) ** p / math.factorial(p)
                for p in range(m)
            ) + (m * alpha) ** m / math.factorial(m)
            if not combo <= 1.0 + tiny:
                failures.append(("taylor", j, i, combo))
            if abs(R - ratio(i)) > 1e-9 * R:
                failures.append(("ratio", j, i))
            row[i] = 1.0
        for k in range(i - 1, -1, -1):
            # ratio inequality M^c_{n-j}/M^c_{n-j+1} <= M^c_k/M^c_{k+1}
            if ratio(n - j) > ratio(k) * (1 + tiny):
                failures.append(("logconvex", j, k))
            step = coef[j - 1][k] + alpha * row[k + 1]
            if abs(step - B[j, n - k + 1]) > tiny * max(1.0, B[j, n - k + 1]):
                failures.append(("step", j, k, step, B[j, n - k + 1]))
            row[k] = step
        coef[j] = row
    cert.bound_table = {(j, k): coef[j][k] * math.exp(lm[k])
                        for j in coef for k in coef[j] if k <= n - j + 1}
    cert.replay_failures = failures
    cert.replay_ok = not failures
    top = coef[n][0] * math.exp(lm[0])
    if top > cert.final_bound * (1 + 1e-9):
        failures.append(("final", top, cert.final_bound))
        cert.replay_ok = False


@dataclass(frozen=True)
class EasyCaseBound:
    best_n: int
    bound: float


def easycase_bound(M: PositiveSequence, s: float) -> EasyCaseBound:
    """``min_n M_n s^n / n!`` over the prefix (``0^0 = 1``)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    n = np.arange(len(M), dtype=float)
    if s == 0:
        vals = np.where(n == 0, M.log_values[0], np.inf)
    else:
        vals = M.log_values + n * math.log(s) - gammaln(n + 1)
    i = int(np.argmin(vals))
    return EasyCaseBound(i, float(np.exp(vals[i])))
