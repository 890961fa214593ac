"""Geometric realisations of 3-D fans with exact rational rays."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import rational as q
from .fan import FanComplex, is_jammed, link, validate


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class GeometricFan:
    rays: tuple
    complex: FanComplex

    def __post_init__(self):
        rays = tuple(q.vec(r) for r in self.rays)
        for r in rays:
            if q.is_zero(r):
                raise GeometryError("zero ray vector")
        if len(rays) != self.complex.ray_count:
            raise GeometryError("ray count does not match the complex")
        object.__setattr__(self, "rays", rays)

    @classmethod
    def build(cls, rays, cells) -> "GeometricFan":
        rays = list(rays)
        return cls(tuple(rays), FanComplex(len(rays), cells))

    def normalized(self) -> "GeometricFan":
        return GeometricFan(tuple(q.primitive(r) for r in self.rays), self.complex)

    def transformed(self, m) -> "GeometricFan":
        return GeometricFan(tuple(q.matvec(m, r) for r in self.rays), self.complex)

    def to_json(self) -> dict:
        return {
            "rays": [[q.fmt_rat(x) for x in r] for r in self.rays],
            "cells": [list(c) for c in self.complex.cells],
        }

    @classmethod
    def from_json(cls, doc) -> "GeometricFan":
        if isinstance(doc, str):
            doc = json.loads(doc)
        rays = [tuple(q.parse_rat(x) for x in r) for r in doc["rays"]]
        return cls.build(rays, doc["cells"])


@dataclass
class Diagnostics:
    ok: bool = True
    messages: list = field(default_factory=list)

    def fail(self, msg: str):
        self.ok = False
        self.messages.append(msg)

    def __bool__(self):
        return self.ok


def quotient(ray):
    """Linear map R^3 -> R^2 with kernel span(ray): eliminate the first nonzero coordinate."""
    k = next(i for i in range(3) if ray[i] != 0)
    keep = [i for i in range(3) if i != k]

    def proj(x):
        t = x[k] / ray[k]
        y = q.sub(x, q.scale(t, ray))
        return (y[keep[0]], y[keep[1]])

    return proj


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _is_complete_2d(vectors) -> Optional[str]:
    """None if cyclically ordered nonzero 2-D vectors bound a complete fan."""
    k = len(vectors)
    if k < 3:
        return f"only {k} link rays"
    if any(v == (0, 0) for v in vectors):
        return "link ray collapses in the quotient"
    turns = [_cross2(vectors[i], vectors[(i + 1) % k]) for i in range(k)]
    if all(t > 0 for t in turns):
        pass
    elif all(t < 0 for t in turns):
        vectors = [(x, -y) for x, y in vectors]
    else:
        return "link rays do not turn consistently by less than a half-turn"
    d = vectors[0]
    winding = 0
    for i in range(k):
        a, b = vectors[i], vectors[(i + 1) % k]
        if _cross2(a, d) >= 0 and _cross2(d, b) > 0:
            winding += 1
    if winding != 1:
        return f"link winds {winding} times"
    return None


def _cell_cone_ok(rays, walk) -> Optional[str]:
    """Each consecutive pair of walk rays must span a facet with the rest strictly inside."""
    k = len(walk)
    signs = set()
    for i in range(k):
        a, b = rays[walk[i]], rays[walk[(i + 1) % k]]
        nrm = q.cross(a, b)
        for j in range(k):
            if j in (i, (i + 1) % k):
                continue
            s = q.dot(nrm, rays[walk[j]])
            if s == 0:
                return "walk rays are not extreme (coplanar triple)"
            signs.add(s > 0)
    if len(signs) != 1:
        return "walk is not a convex cyclic order of a pointed cone"
    return None


def _link_rays(complex: FanComplex, r: int) -> list:
    """Other endpoints of the 2-cones around ``r``, in link order."""
    cyc = link(complex, r)
    return [u if v == r else v for u, v in cyc.edges_around]


def verify_complete(fan: GeometricFan) -> Diagnostics:
    diag = Diagnostics()
    rep = validate(fan.complex)
    if not rep.ok:
        for kind, detail in rep.violations:
            diag.fail(f"complex: {kind}" + (f" ({detail})" if detail else ""))
        return diag
    cx, rays = fan.complex, fan.rays
    for k, walk in enumerate(cx.cells):
        msg = _cell_cone_ok(rays, walk)
        if msg:
            diag.fail(f"cell {k}: {msg}")
    for e, (a, b) in sorted(cx.edge_cells.items()):
        nrm = q.cross(rays[e[0]], rays[e[1]])
        if q.is_zero(nrm):
            diag.fail(f"edge {e}: parallel rays")
            continue
        sa = q.dot(nrm, rays[next(r for r in cx.cells[a] if r not in e)])
        sb = q.dot(nrm, rays[next(r for r in cx.cells[b] if r not in e)])
        if not sa * sb < 0:
            diag.fail(f"edge {e}: cells {a} and {b} not on opposite sides")
    for r in range(cx.ray_count):
        proj = quotient(rays[r])
        msg = _is_complete_2d([proj(rays[w]) for w in _link_rays(cx, r)])
        if msg:
            diag.fail(f"ray {r}: {msg}")
    if cx.ray_count - len(cx.edges) + cx.cell_count != 2:
        diag.fail("Euler relation fails")
    return diag


@dataclass
class GeometricCertificate:
    jammed: bool
    ray_pairs: dict = field(default_factory=dict)  # ray -> ((w0, w2, lambda), (w1, w3, mu))
    negation: Optional[tuple] = None  # ray map induced by v -> -v
    messages: list = field(default_factory=list)

    def __bool__(self):
        return self.jammed


def _antipodal_ratio(u, v) -> Optional[Fraction]:
    """lambda > 0 with v = -lambda u, else None."""
    k = next(i for i in range(len(u)) if u[i] != 0)
    lam = -v[k] / u[k]
    if lam <= 0 or any(v[i] != -lam * u[i] for i in range(len(u))):
        return None
    return lam


def _same_direction(u, v) -> bool:
    return q.primitive(u) == q.primitive(v)


def negation_map(fan: GeometricFan) -> Optional[tuple]:
    prim = {q.primitive(r): i for i, r in enumerate(fan.rays)}
    out = []
    for r in fan.rays:
        j = prim.get(q.primitive(q.neg(r)))
        if j is None:
            return None
        out.append(j)
    return tuple(out)


def is_jammed_geometric(fan: GeometricFan) -> GeometricCertificate:
    diag = verify_complete(fan)
    if not diag:
        raise GeometryError("fan is not complete: " + "; ".join(diag.messages))
    cx = fan.complex
    cert = GeometricCertificate(True)
    comb = is_jammed(cx)
    if not comb.jammed:
        cert.jammed = False
        cert.messages.append(f"combinatorially rejected: {comb.reason}")
        return cert
    for r in range(cx.ray_count):
        if cx.valence(r) != 4:
            continue
        proj = quotient(fan.rays[r])
        w = [proj(fan.rays[x]) for x in _link_rays(cx, r)]
        lam = _antipodal_ratio(w[0], w[2])
        mu = _antipodal_ratio(w[1], w[3])
        if lam is None or mu is None:
            cert.jammed = False
            cert.messages.append(f"link of ray {r} is not centrally symmetric")
        else:
            cert.ray_pairs[r] = (lam, mu)
    if comb.antipodal is not None:
        neg = negation_map(fan)
        if neg is None:
            cert.jammed = False
            cert.messages.append("ray set not closed under negation")
        else:
            index = {s: k for k, s in enumerate(cx.cell_sets)}
            cmap = []
            for c in cx.cells:
                img = frozenset(neg[x] for x in c)
                cmap.append(index.get(img))
            if tuple(cmap) != comb.antipodal.cell_map:
                cert.jammed = False
                cert.messages.append("negation does not induce the antipodal pairing on cells")
            else:
                cert.negation = neg
    return cert


# --- normal fans ---------------------------------------------------------------


def normal_fan(poly) -> GeometricFan:
    """Rays = outer facet normals, cells = normal cones of the vertices."""
    from .cells import DegenerateError

    if q.affine_dimension(poly.vertex_points()) < 3:
        raise DegenerateError("normal fan needs a full-dimensional polytope")
    rays = [f.normal for f in poly.facets]
    cells = []
    for v in poly.vertices:
        around = [i for i, f in enumerate(poly.facets) if v in f.vertices]
        # facets at v are adjacent when they share an edge through v
        def shares_edge(i, j):
            common = set(poly.facets[i].vertices) & set(poly.facets[j].vertices)
            return v in common and len(common) >= 2

        walk = [around[0]]
        while len(walk) < len(around):
            nxt = next((j for j in around if j not in walk and shares_edge(walk[-1], j)), None)
            if nxt is None:
                raise GeometryError(f"facets around vertex {v} do not form a cycle")
            walk.append(nxt)
        cells.append(tuple(walk))
    return GeometricFan.build(rays, cells)


# --- witnesses -----------------------------------------------------------------

_WITNESS_DATA = {
    "tetrahedron": {
        "rays": [(-1, 0, 0), (0, -1, 0), (0, 0, -1), (1, 1, 1)],
        "cells": [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)],
    },
    "octahedron": {
        # normal fan of the octahedron conv{+-e_i}: rays are the 8 sign vectors
        "rays": [(sx, sy, sz) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)],
        "cells": [
            (0, 1, 3, 2),  # +e1
            (4, 6, 7, 5),  # -e1
            (0, 4, 5, 1),  # +e2
            (2, 3, 7, 6),  # -e2
            (0, 2, 6, 4),  # +e3
            (1, 5, 7, 3),  # -e3
        ],
    },
    "quadrangular-pyramid": {
        # normal fan of conv{0, e1, e2, e1+e2, e3}
        "rays": [(0, 0, -1), (-1, 0, 0), (0, -1, 0), (1, 0, 1), (0, 1, 1)],
        "cells": [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1), (1, 2, 3, 4)],
    },
    "triangular-prism": {
        # normal fan of conv{0, e1, e2} x [0, e3]
        "rays": [(-1, 0, 0), (0, -1, 0), (1, 1, 0), (0, 0, -1), (0, 0, 1)],
        "cells": [(0, 1, 3), (1, 2, 3), (2, 0, 3), (0, 1, 4), (1, 2, 4), (2, 0, 4)],
    },
    "parallelepiped": {
        "rays": [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)],
        "cells": [(x, y, z) for x in (0, 1) for y in (2, 3) for z in (4, 5)],
    },
}

WITNESSES = tuple(_WITNESS_DATA)


def witness(type_tag: str) -> GeometricFan:
    try:
        data = _WITNESS_DATA[type_tag]
    except KeyError:
        raise KeyError(f"unknown type tag {type_tag!r}; expected one of {', '.join(WITNESSES)}") from None
    return GeometricFan.build(data["rays"], data["cells"])
