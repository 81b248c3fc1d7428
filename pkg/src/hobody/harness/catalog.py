"""Built-in test bodies and the JSON catalog loader."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..bodies import (Ellipsoid, Polytope, ball, cross_polytope, hull_from_vertices, random_polytope,
                      regular_polygon, simplex, smoothed_polygon, unit_cube)
from ..errors import HobodyError

MAX_N = 4


class CatalogError(HobodyError):
    """Malformed catalog input; carries line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line, self.column = line, column


@dataclass(frozen=True)
class Entry:
    id: str
    body: object
    kind: str  # polytope | ellipsoid
    simplex: bool = False

    @property
    def n(self) -> int:
        return self.body.dim


def _rotation(n: int, angle: float) -> np.ndarray:
    R = np.eye(n)
    c, s = math.cos(angle), math.sin(angle)
    R[:2, :2] = [[c, -s], [s, c]]
    return R


def _ellipsoid(n: int) -> Ellipsoid:
    axes = np.linspace(1.5, 0.6, n)
    return Ellipsoid(np.zeros(n), _rotation(n, 0.4) @ np.diag(axes), f"ellipsoid{n}")


def builtin(n: int) -> list[Entry]:
    if not 1 <= n <= MAX_N:
        raise CatalogError(f"no built-in bodies for n={n}")
    if n == 1:
        return [Entry("segment", simplex(1), "polytope", True),
                Entry("interval", hull_from_vertices([[-1.0], [2.0]], "interval"), "polytope", True)]
    out = [Entry(f"cube{n}", unit_cube(n), "polytope"),
           Entry(f"simplex{n}", simplex(n), "polytope", True),
           Entry(f"cross{n}", cross_polytope(n), "polytope")]
    if n == 2:
        out += [Entry("hexagon", regular_polygon(6), "polytope"),
                Entry("64-gon", regular_polygon(64), "polytope"),
                Entry("random2-1", random_polytope(2, 1), "polytope"),
                Entry("random2-2", random_polytope(2, 2), "polytope")]
    elif n == 3:
        out += [Entry("random3-1", random_polytope(3, 1), "polytope"),
                Entry("random3-2", random_polytope(3, 2), "polytope")]
    else:
        out += [Entry("random4-1", random_polytope(4, 1), "polytope")]
    out.append(Entry(f"ball{n}", ball(n), "ellipsoid"))
    if n <= 3:  # surface area of a general ellipsoid is implemented up to n = 3
        out.append(Entry(f"ellipsoid{n}", _ellipsoid(n), "ellipsoid"))
    return out


def smooth_triangle() -> Polytope:
    """Many-facet approximant of a rounded triangle."""
    return smoothed_polygon(simplex(2).vertices, eps=0.05, k=16)


_BUILDERS = {
    "cube": lambda n: unit_cube(n),
    "simplex": lambda n: simplex(n),
    "cross": lambda n: cross_polytope(n),
    "ball": lambda n: ball(n),
}


def _parse_entry(raw: dict, idx: int) -> Entry:
    if not isinstance(raw, dict):
        raise CatalogError(f"entry {idx} must be an object")
    bid = str(raw.get("id", f"body{idx}"))
    kind = raw.get("type")
    try:
        if kind == "polytope":
            P = hull_from_vertices(np.asarray(raw["vertices"], dtype=float), bid)
            return Entry(bid, P, "polytope", bool(raw.get("simplex", P.vertices.shape[0] == P.dim + 1)))
        if kind == "ellipsoid":
            E = Ellipsoid(np.asarray(raw["center"], dtype=float), np.asarray(raw["factor"], dtype=float), bid)
            return Entry(bid, E, "ellipsoid")
        if kind == "builtin":
            name, n = raw["name"], int(raw["n"])
            if name not in _BUILDERS:
                raise CatalogError(f"entry {idx}: unknown builtin {name!r}")
            body = _BUILDERS[name](n)
            return Entry(bid, body, "ellipsoid" if name == "ball" else "polytope", name == "simplex")
    except KeyError as exc:
        raise CatalogError(f"entry {idx} ({bid}): missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError, HobodyError) as exc:
        if isinstance(exc, CatalogError):
            raise
        raise CatalogError(f"entry {idx} ({bid}): {exc}") from exc
    raise CatalogError(f"entry {idx} ({bid}): unknown type {kind!r}")


def load_catalog(path: str | Path) -> list[Entry]:
    """Read bodies from JSON: {"bodies": [{"id": ..., "type": "polytope", "vertices": [...]}, ...]}."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    items = data.get("bodies") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise CatalogError("catalog must be a list or an object with a 'bodies' list")
    return [_parse_entry(raw, i) for i, raw in enumerate(items)]


def bodies_for(n: int, path: str | Path | None = None) -> list[Entry]:
    entries = load_catalog(path) if path else builtin(n)
    return [e for e in entries if e.n == n]
