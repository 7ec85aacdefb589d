"""Rational functions and their derivative jets.

Derivatives are taken from truncated Taylor series: shift numerator and
denominator to the base point, divide the series, and scale the ``k``-th
coefficient by ``k!``.  Everything is vectorised over arrays of base
points.  No gcd normalisation is performed; :meth:`RationalFunction.poles`
discards denominator roots cancelled by numerator roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

POLE_REL_THRESHOLD = 1e-12


class PoleError(ValueError):
    pass


def _trim(c: Sequence[complex]) -> tuple[complex, ...]:
    c = [complex(x) for x in c]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (0j,)


@dataclass(frozen=True)
class RationalFunction:
    """``num(z) / den(z)`` with ascending-degree complex coefficients."""
    num: tuple
    den: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "num", _trim(self.num))
        object.__setattr__(self, "den", _trim(self.den))
        if all(c == 0 for c in self.den):
            raise ValueError("denominator is identically zero")

    @classmethod
    def polynomial(cls, coeffs):
        return cls(tuple(coeffs), (1.0,))

    @classmethod
    def constant(cls, c):
        return cls((c,), (1.0,))

    @classmethod
    def simple_pole(cls, p, residue=1.0):
        """``residue / (z - p)``."""
        return cls((residue,), (-p, 1.0))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.polyval(self.num[::-1], z) / np.polyval(self.den[::-1], z)
        return out if out.ndim else complex(out)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(np.polymul(self.num[::-1], other.num[::-1])[::-1],
                                np.polymul(self.den[::-1], other.den[::-1])[::-1])

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        a = np.polymul(self.num[::-1], other.den[::-1])
        b = np.polymul(other.num[::-1], self.den[::-1])
        return RationalFunction(np.polyadd(a, b)[::-1],
                                np.polymul(self.den[::-1], other.den[::-1])[::-1])

    def scale(self, c: complex) -> "RationalFunction":
        return RationalFunction(tuple(c * x for x in self.num), self.den)

    def derivative(self, k: int = 1):
        """Callable ``z -> f^(k)(z)`` (vectorised)."""
        def fk(z):
            z = np.asarray(z, dtype=complex)
            out = taylor_coefficients(self, z.ravel(), k)[:, k] * math.factorial(k)
            return out.reshape(z.shape) if z.ndim else complex(out[0])
        return fk

    def poles(self, tol: float = 1e-9) -> np.ndarray:
        """Denominator roots not cancelled by a numerator root."""
        den_roots = list(np.roots(self.den[::-1])) if len(self.den) > 1 else []
        num_roots = list(np.roots(self.num[::-1])) if len(self.num) > 1 else []
        if all(c == 0 for c in self.num):
            return np.array([], dtype=complex)
        out = []
        for p in den_roots:
            j = next((i for i, q in enumerate(num_roots)
                      if abs(p - q) <= tol * max(1.0, abs(p))), None)
            if j is None:
                out.append(p)
            else:
                num_roots.pop(j)
        return np.array(out, dtype=complex)

    def as_dict(self) -> dict:
        return {"num": [[c.real, c.imag] for c in self.num],
                "den": [[c.real, c.imag] for c in self.den]}

    @classmethod
    def from_dict(cls, d: dict) -> "RationalFunction":
        def parse(lst):
            return tuple(complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)
                         for x in lst)
        return cls(parse(d["num"]), parse(d.get("den", [[1.0, 0.0]])))


@dataclass(frozen=True)
class Jet:
    base: complex
    values: tuple

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __mul__(self, other: "Jet") -> "Jet":
        """Leibniz rule, truncated to the shorter jet."""
        if self.base != other.base:
            raise ValueError("jets at different base points")
        K = min(self.order, other.order)
        vals = tuple(
            sum(math.comb(k, i) * self.values[i] * other.values[k - i] for i in range(k + 1))
            for k in range(K + 1)
        )
        return Jet(self.base, vals)


def _shift(coeffs: Sequence[complex], z: np.ndarray, K: int) -> np.ndarray:
    """Taylor coefficients of a polynomial at each point of ``z``, up to order K.

    Repeated synthetic division; returns shape ``(len(z), K + 1)``.
    """
    c = np.array(coeffs, dtype=complex)
    n = len(c)
    out = np.zeros((len(z), K + 1), dtype=complex)
    work = np.broadcast_to(c, (len(z), n)).copy()
    for k in range(min(K + 1, n)):
        m = n - k
        acc = work[:, m - 1].copy()
        q = np.empty((len(z), max(m - 1, 0)), dtype=complex)
        for i in range(m - 2, -1, -1):
            q[:, i] = acc
            acc = work[:, i] + z * acc
        out[:, k] = acc
        work = q
    return out


def _abs_scale(coeffs, z):
    return np.polyval(np.abs(np.array(coeffs))[::-1], np.abs(z))


def taylor_coefficients(f: RationalFunction, z, K: int) -> np.ndarray:
    """Taylor coefficients ``f^(k)(z) / k!`` for ``k <= K``, shape ``(len(z), K+1)``.

    Raises :class:`PoleError` if ``|den(z)|`` is below ``1e-12`` times the
    absolute coefficient scale ``sum |b_n| |z|^n``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = _shift(f.num, z, K)
    b = _shift(f.den, z, K)
    b0 = b[:, 0]
    bad = np.abs(b0) <= POLE_REL_THRESHOLD * _abs_scale(f.den, z)
    if np.any(bad):
        raise PoleError(f"pole at evaluation point {z[np.argmax(bad)]}")
    c = np.zeros_like(a)
    for k in range(K + 1):
        acc = a[:, k].copy()
        for i in range(1, k + 1):
            acc -= b[:, i] * c[:, k - i]
        c[:, k] = acc / b0
    return c


def eval_jet(f: RationalFunction, z: complex, K: int) -> Jet:
    coeffs = taylor_coefficients(f, [z], K)[0]
    return Jet(complex(z), tuple(complex(coeffs[k] * math.factorial(k)) for k in range(K + 1)))


def jets_at(f: RationalFunction, z, K: int) -> np.ndarray:
    """``|f^(k)(z)|`` for each point and ``k <= K``; shape ``(len(z), K+1)``."""
    c = taylor_coefficients(f, z, K)
    fact = np.array([math.factorial(k) for k in range(K + 1)], dtype=float)
    return np.abs(c) * fact


def _check_circle_clearance(f, center, r, refine_tol):
    for p in f.poles():
        if abs(abs(p - center) - r) <= refine_tol * max(r, 1.0):
            raise PoleError(f"pole {p} within {refine_tol} of the circle")


def sup_jet_on_circle(f: RationalFunction, center: complex, r: float, K: int,
                      refine_tol: float = 1e-10, start: int = 64,
                      max_points: int = 2 ** 16) -> list[float]:
    """Estimates of ``sup |f^(k)|`` on the circle ``|z - center| = r`` for ``k <= K``.

    Angular grids are doubled until every order agrees with the previous
    level within ``refine_tol`` (relative); each maximum is then polished
    with a bounded scalar search around the best grid angle.
    """
    _check_circle_clearance(f, center, r, refine_tol)

    def level(n):
        th = 2 * math.pi * np.arange(n) / n
        return th, jets_at(f, center + r * np.exp(1j * th), K)

    n = start
    th, vals = level(n)
    prev = vals.max(axis=0)
    while n < max_points:
        n *= 2
        th, vals = level(n)
        cur = vals.max(axis=0)
        if np.all(np.abs(cur - prev) <= refine_tol * np.maximum(cur, 1e-300)):
            prev = cur
            break
        prev = cur
    out = []
    h = 2 * math.pi / n
    for k in range(K + 1):
        i = int(np.argmax(vals[:, k]))
        best = float(vals[i, k])
        if best > 0:
            def neg(t, k=k):
                return -float(jets_at(f, [center + r * np.exp(1j * t)], k)[0, k])
            res = minimize_scalar(neg, bounds=(th[i] - h, th[i] + h), method="bounded",
                                  options={"xatol": 1e-13})
            best = max(best, -float(res.fun))
        out.append(best)
    return out


def sup_on_cheese(f: RationalFunction, cheese, delta: float,
                  boundary_points: int = 4096) -> float:
    """Estimate ``|f|_X`` from a grid of spacing ``delta`` plus boundary samples.

    Poles are located exactly (roots of the reduced denominator) and any
    pole lying in X raises :class:`PoleError`.
    """
    from .geometry import contains_points, grid_in_disk

    poles = f.poles()
    if len(poles):
        on_x = contains_points(cheese, poles)
        if np.any(on_x):
            raise PoleError(f"pole on X at {poles[np.argmax(on_x)]}")

    pts = grid_in_disk(cheese.outer, delta)
    pts = pts[contains_points(cheese, pts)]
    best = float(np.abs(f(pts)).max()) if len(pts) else 0.0

    o = cheese.outer
    n_out = max(boundary_points, int(math.ceil(2 * math.pi * o.radius / delta)))
    th = 2 * math.pi * np.arange(n_out) / n_out
    best = max(best, float(np.abs(f(o.center + o.radius * np.exp(1j * th))).max()))
    best = max(best, _polish_circle(f, o.center, o.radius, th))

    if len(cheese.holes):
        c = cheese.hole_centers
        r = cheese.hole_radii
        keep = r > 0
        if keep.any():
            c, r = c[keep], r[keep]
            m = 8
            phi = 2 * math.pi * np.arange(m) / m
            ring = (c[:, None] + r[:, None] * np.exp(1j * phi)[None, :]).ravel()
            best = max(best, float(np.abs(f(ring)).max()))
    return best


def _polish_circle(f, center, r, th):
    vals = np.abs(f(center + r * np.exp(1j * th)))
    i = int(np.argmax(vals))
    h = th[1] - th[0] if len(th) > 1 else math.pi
    res = minimize_scalar(lambda t: -abs(f(center + r * np.exp(1j * t))),
                          bounds=(th[i] - h, th[i] + h), method="bounded",
                          options={"xatol": 1e-13})
    return max(float(vals[i]), -float(res.fun))
