"""Random instance generators shared by the path tests and the acceptance suite."""
import math

import numpy as np

from quasicheese.paths import Arc, Line, Path, Polyline
from quasicheese.rational_jets import RationalFunction


def random_path(rng, pieces=None, scale=1.0) -> Path:
    """Continuous chain of lines, arcs and polylines inside ``|z| < 2 scale``."""
    pieces = pieces or int(rng.integers(1, 5))
    z = complex(*rng.uniform(-0.5, 0.5, 2)) * scale
    segs = []
    for _ in range(pieces):
        kind = rng.integers(3)
        if kind == 0:
            w = z + complex(*rng.uniform(-0.6, 0.6, 2)) * scale
            if abs(w - z) < 1e-3:
                w = z + 0.1 * scale
            segs.append(Line(z, w))
            z = w
        elif kind == 1:
            rad = float(rng.uniform(0.1, 0.5)) * scale
            phi = float(rng.uniform(0, 2 * math.pi))
            center = z - rad * complex(math.cos(phi), math.sin(phi))
            sweep = float(rng.uniform(0.3, 3.0)) * (1 if rng.integers(2) else -1)
            arc = Arc(center, rad, phi, phi + sweep)
            segs.append(arc)
            z = complex(arc.point(1.0))
        else:
            pts = [z]
            for _ in range(int(rng.integers(2, 5))):
                pts.append(pts[-1] + complex(*rng.uniform(-0.3, 0.3, 2)) * scale + 0.01)
            segs.append(Polyline(tuple(pts)))
            z = pts[-1]
    knots = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 2.0, len(segs)))])
    return Path(tuple(segs), tuple(knots.tolist()))


def random_poly(rng, max_deg=4) -> RationalFunction:
    deg = int(rng.integers(0, max_deg + 1))
    c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    return RationalFunction.polynomial(c.tolist())


def poly_derivative(f: RationalFunction) -> RationalFunction:
    c = f.num
    if len(c) == 1:
        return RationalFunction.constant(0.0)
    return RationalFunction.polynomial([i * c[i] for i in range(1, len(c))])


def random_rational(rng, pole_min=3.0) -> RationalFunction:
    """Low-degree rational function with every pole outside ``|z| < pole_min``."""
    num = rng.normal(size=int(rng.integers(1, 4))) + 1j * rng.normal(size=1)
    f = RationalFunction.polynomial(num.tolist())
    for _ in range(int(rng.integers(1, 3))):
        p = pole_min * (1 + rng.uniform(0, 1)) * np.exp(2j * math.pi * rng.uniform())
        f = f * RationalFunction.simple_pole(complex(p), complex(rng.normal(), rng.normal()))
    return f
