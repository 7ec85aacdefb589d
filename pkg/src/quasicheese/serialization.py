"""JSON documents for cheeses, paths, rational functions and sequences.

Floats are written by :mod:`json` with ``repr``, the shortest string that
reads back to the identical double, so every document round-trips exactly.
Complex numbers are ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
import math
from pathlib import Path as FsPath

import numpy as np

from .geometry import AbstractSwissCheese, Disk
from .paths import Arc, Line, Path, Polyline
from .rational_jets import RationalFunction
from .sequences import PositiveSequence, named_family


class MalformedDocument(ValueError):
    pass


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise MalformedDocument(f"expected [re, im], got {x!r}")


def _finite(x, what) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError) as exc:
        raise MalformedDocument(f"{what}: not a number") from exc
    if not math.isfinite(v):
        raise MalformedDocument(f"{what}: not finite")
    return v


# --- cheese -----------------------------------------------------------------

def cheese_to_dict(cheese: AbstractSwissCheese) -> dict:
    c, r = cheese.hole_centers, cheese.hole_radii
    return {
        "kind": "swiss_cheese",
        "outer": {"center": _pair(cheese.outer.center), "radius": cheese.outer.radius},
        "holes": [{"center": [x, y], "radius": rad}
                  for x, y, rad in zip(c.real.tolist(), c.imag.tolist(), r.tolist())],
        "tail_bound": cheese.tail_bound,
    }


def cheese_from_dict(doc: dict) -> AbstractSwissCheese:
    try:
        o = doc["outer"]
        outer = Disk(_complex(o["center"]), _finite(o["radius"], "outer radius"))
        holes = doc.get("holes", [])
        centers = np.array([_complex(h["center"]) for h in holes], dtype=complex)
        radii = np.array([_finite(h["radius"], "hole radius") for h in holes], dtype=float)
        tail = _finite(doc.get("tail_bound", 0.0), "tail_bound")
    except (KeyError, TypeError) as exc:
        raise MalformedDocument(f"bad cheese document: {exc}") from exc
    if np.any(radii < 0) or tail < 0:
        raise MalformedDocument("radii and tail_bound must be nonnegative")
    try:
        return AbstractSwissCheese.from_arrays(outer, centers, radii, tail)
    except ValueError as exc:
        raise MalformedDocument(str(exc)) from exc


# --- paths ------------------------------------------------------------------

def path_to_dict(path: Path) -> dict:
    segs = []
    for s in path.segments:
        if isinstance(s, Line):
            segs.append({"kind": "line", "start": _pair(s.start), "end": _pair(s.end)})
        elif isinstance(s, Arc):
            segs.append({"kind": "arc", "center": _pair(s.center), "radius": s.radius,
                         "angle_start": s.angle_start, "angle_end": s.angle_end,
                         "orientation": s.orientation})
        else:
            segs.append({"kind": "polyline", "points": [_pair(p) for p in s.points],
                         "knots": list(s.knots)})
    return {"kind": "path", "segments": segs, "knots": list(path.knots)}


def path_from_dict(doc: dict) -> Path:
    segs = []
    try:
        for s in doc["segments"]:
            kind = s["kind"]
            if kind == "line":
                segs.append(Line(_complex(s["start"]), _complex(s["end"])))
            elif kind == "arc":
                a0, a1 = float(s["angle_start"]), float(s["angle_end"])
                orient = s.get("orientation")
                if orient is not None and int(orient) != (1 if a1 > a0 else -1):
                    raise MalformedDocument("arc orientation disagrees with its angles")
                segs.append(Arc(_complex(s["center"]), float(s["radius"]), a0, a1))
            elif kind == "polyline":
                segs.append(Polyline(tuple(_complex(p) for p in s["points"]),
                                     tuple(s["knots"]) if s.get("knots") else None))
            else:
                raise MalformedDocument(f"unknown segment kind {kind!r}")
        return Path(tuple(segs), tuple(doc["knots"]) if doc.get("knots") else None)
    except (KeyError, TypeError) as exc:
        raise MalformedDocument(f"bad path document: {exc}") from exc


# --- rational functions and sequences ----------------------------------------

def rational_from_dict(doc: dict) -> RationalFunction:
    try:
        return RationalFunction.from_dict(doc)
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise MalformedDocument(f"bad rational function document: {exc}") from exc


def sequence_from_dict(doc: dict) -> PositiveSequence:
    """Accepts ``{"log_values": [...]}``, ``{"values": [...]}`` (numbers or
    decimal strings) or ``{"family": name, "N": count}``."""
    try:
        if "log_values" in doc:
            return PositiveSequence(np.array(doc["log_values"], dtype=float))
        if "values" in doc:
            vals = doc["values"]
            if all(isinstance(v, str) for v in vals):
                return PositiveSequence.from_decimal_strings(vals)
            return PositiveSequence.from_values(vals)
        if "family" in doc:
            return named_family(doc["family"], int(doc["N"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad sequence document: {exc}") from exc
    raise MalformedDocument("sequence document needs log_values, values or family")


def sequence_to_dict(M: PositiveSequence) -> dict:
    return {"kind": "sequence", "log_values": M.log_values.tolist()}


# --- files ------------------------------------------------------------------

def _default(o):
    if isinstance(o, complex):
        return _pair(o)
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value") and hasattr(o, "name"):
        return o.value
    raise TypeError(f"not serialisable: {type(o).__name__}")


def dumps(doc, indent: int | None = 1) -> str:
    return json.dumps(doc, indent=indent, default=_default, allow_nan=True)


def write_json(doc, path, indent: int | None = 1) -> None:
    FsPath(path).write_text(dumps(doc, indent) + "\n")


def read_json(path) -> dict:
    text = FsPath(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{path}: top level must be an object")
    return doc
