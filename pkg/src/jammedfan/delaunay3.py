"""Voronoi and Delaunay structure of rank-3 lattices in exact Gram arithmetic.

Everything is done in lattice coordinates: the lattice is Z^3 and the Gram
matrix supplies the metric, so hexagonal or FCC lattices stay rational.
Volumes are reported in coordinate units, where the covolume is 1.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import rational as q
from .cells import PointConfig, check_duality, hull3, tag_for_polytope, volume
from .fan import canonical_code
from .geom import GeometricFan, is_jammed_geometric, verify_complete, witness
from .lattice import span_lattice

log = logging.getLogger(__name__)


class GramError(ValueError):
    pass


class UnclassifiableCellError(RuntimeError):
    pass


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple

    def __post_init__(self):
        m = tuple(tuple(q.parse_rat(x) for x in row) for row in self.entries)
        if len(m) != 3 or any(len(r) != 3 for r in m):
            raise GramError("Gram matrix must be 3x3")
        if any(m[i][j] != m[j][i] for i in range(3) for j in range(3)):
            raise GramError("Gram matrix must be symmetric")
        minors = (m[0][0], m[0][0] * m[1][1] - m[0][1] * m[1][0], q.det(m))
        if any(x <= 0 for x in minors):
            raise GramError("Gram matrix is not positive definite")
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_json(cls, doc) -> "GramMatrix":
        if isinstance(doc, str):
            doc = json.loads(doc)
        if isinstance(doc, dict):
            doc = doc["gram"]
        return cls(doc)

    def to_json(self) -> list:
        return [[q.fmt_rat(x) for x in r] for r in self.entries]

    def norm(self, v) -> Fraction:
        return q.quad(self.entries, v)

    @property
    def inverse(self):
        return q.inverse(self.entries)

    def conjugate(self, u) -> "GramMatrix":
        """Gram matrix of the basis given by the columns of ``u``."""
        return GramMatrix(q.matmul(q.transpose(u), q.matmul(self.entries, u)))


IDENTITY = GramMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
FCC = GramMatrix(((2, 1, 1), (1, 2, 1), (1, 1, 2)))
BCC = GramMatrix(((3, -1, -1), (-1, 3, -1), (-1, -1, 3)))
A2_Z = GramMatrix(((2, 1, 0), (1, 2, 0), (0, 0, 1)))

NAMED_GRAMS = {"identity": IDENTITY, "fcc": FCC, "bcc": BCC, "a2+z": A2_Z}


def _box(gram: GramMatrix, radius2: Fraction) -> list:
    """Per-coordinate bounds |v_i| <= sqrt(radius2 * (G^-1)_ii) for vectors with norm <= radius2."""
    inv = gram.inverse
    return [q.rat_sqrt_floor(radius2 * inv[i][i]) for i in range(3)]


def _points_in_ball(gram: GramMatrix, centre, radius2: Fraction) -> list:
    """Integer vectors u with norm(centre - u) <= radius2."""
    bounds = _box(gram, radius2)
    ranges = []
    for i in range(3):
        lo = math.ceil(centre[i] - bounds[i] - 1)
        hi = math.floor(centre[i] + bounds[i] + 1)
        ranges.append(range(lo, hi + 1))
    out = []
    for u in itertools.product(*ranges):
        d = gram.norm(q.sub(centre, u))
        if d <= radius2:
            out.append((tuple(Fraction(x) for x in u), d))
    return out


def relevant_vectors(gram: GramMatrix) -> list:
    """Voronoi-relevant vectors: v such that +-v are the only minima of v + 2Z^3."""
    out = []
    for parity in itertools.product((0, 1), repeat=3):
        if not any(parity):
            continue
        p = q.vec(parity)
        best = gram.norm(p)
        bounds = _box(gram, best)
        members = []
        for z in itertools.product(*[range(-(b // 2) - 1, b // 2 + 2) for b in bounds]):
            v = q.add(p, q.scale(2, q.vec(z)))
            if any(abs(v[i]) > bounds[i] for i in range(3)):
                continue
            n = gram.norm(v)
            if n < best:
                best, members = n, [v]
            elif n == best:
                members.append(v)
        members = [v for v in members if gram.norm(v) == best]
        if len(members) == 2:
            out.extend(members)
    return sorted(out)


@dataclass(frozen=True)
class DelaunayCell:
    centre: tuple
    points: tuple
    multiplicity: int = 1  # 2 when -cell is not a translate of the cell

    def to_json(self) -> dict:
        return {
            "centre": [q.fmt_rat(x) for x in self.centre],
            "points": [[int(x) for x in p] for p in self.points],
            "multiplicity": self.multiplicity,
        }


def _frac(x) -> tuple:
    return tuple(c - math.floor(c) for c in x)


def voronoi_vertices(gram: GramMatrix, relevant: Optional[list] = None) -> list:
    """Delaunay cells at the Voronoi vertices, one per class modulo translations and -1."""
    rel = relevant if relevant is not None else relevant_vectors(gram)
    g = gram.entries
    planes = [(q.matvec(g, v), gram.norm(v) / 2) for v in rel]
    verts = set()
    for (a, ra), (b, rb), (c, rc) in itertools.combinations(planes, 3):
        m = (a, b, c)
        if q.det(m) == 0:
            continue
        x = q.solve3(m, (ra, rb, rc))
        if all(q.dot(n, x) <= r for n, r in planes):
            verts.add(x)
    classes = {}
    for x in sorted(verts):
        fx, fnx = _frac(x), _frac(q.neg(x))
        key = min(fx, fnx)
        if key in classes:
            continue
        centre = key
        # lattice points nearest to the chosen centre
        r2 = gram.norm(x)
        near = _points_in_ball(gram, centre, r2)
        closer = [u for u, d in near if d < r2]
        if closer:
            raise AssertionError(f"lattice point strictly closer than the vertex radius at {centre}")
        pts = tuple(sorted(u for u, d in near if d == r2))
        classes[key] = DelaunayCell(centre, pts, 1 if fx == fnx else 2)
    return [classes[k] for k in sorted(classes)]


def tangent_fan(cell: DelaunayCell, gram: GramMatrix) -> GeometricFan:
    """Fan of the Voronoi tiling at the cell's centre: one cone per nearest lattice point.

    The cone of point u is {y : y . G(w - u) <= 0 for the other nearest w}.
    """
    g = gram.entries
    cone_rays = []
    for u in cell.points:
        cons = [q.matvec(g, q.sub(w, u)) for w in cell.points if w != u]
        rays = {}
        for a, b in itertools.combinations(cons, 2):
            y = q.cross(a, b)
            if q.is_zero(y):
                continue
            for cand in (y, q.neg(y)):
                if all(q.dot(c, cand) <= 0 for c in cons):
                    rays[q.primitive(cand)] = cand
        prims = sorted(rays)
        # facet pairs: constraints tight at exactly two extreme rays
        pairs = set()
        for c in cons:
            tight = [p for p in prims if q.dot(c, p) == 0]
            if len(tight) == 2:
                pairs.add(tuple(tight))
        walk = [prims[0]]
        while len(walk) < len(prims):
            nxt = next(
                (b if a == walk[-1] else a for a, b in sorted(pairs) if walk[-1] in (a, b) and (b if a == walk[-1] else a) not in walk),
                None,
            )
            if nxt is None:
                raise AssertionError("tangent cone rays do not close up")
            walk.append(nxt)
        cone_rays.append(walk)
    all_rays = sorted({r for w in cone_rays for r in w})
    index = {r: i for i, r in enumerate(all_rays)}
    return GeometricFan.build(all_rays, [tuple(index[r] for r in w) for w in cone_rays])


@dataclass
class ClassifiedCell:
    cell: DelaunayCell
    type_tag: Optional[str]
    duality_ok: bool
    lattice_ok: bool
    jammed: bool
    code_ok: bool
    dimension: int
    volume: Fraction

    @property
    def ok(self) -> bool:
        return self.type_tag is not None and self.duality_ok and self.lattice_ok and self.jammed and self.code_ok

    def to_json(self) -> dict:
        d = self.cell.to_json()
        d.update(
            {
                "type_tag": self.type_tag,
                "duality_ok": self.duality_ok,
                "lattice_ok": self.lattice_ok,
                "jammed": self.jammed,
                "code_ok": self.code_ok,
                "dimension": self.dimension,
                "volume": q.fmt_rat(self.volume),
            }
        )
        return d


def classify_cell(cell: DelaunayCell, gram: GramMatrix) -> ClassifiedCell:
    config = PointConfig(cell.points)
    dim = q.affine_dimension(config.points)
    if dim != 3:
        raise UnclassifiableCellError(f"cell at {cell.centre} has affine dimension {dim}")
    poly = hull3(config)
    tag = tag_for_polytope(poly)
    if tag is None:
        raise UnclassifiableCellError(f"cell at {cell.centre} has face vector {poly.f_vector}")
    fan = tangent_fan(cell, gram)
    complete = verify_complete(fan)
    jammed = bool(complete) and is_jammed_geometric(fan).jammed
    duality = check_duality(fan.complex, config, poly)
    code_ok = canonical_code(fan.complex) == canonical_code(witness(tag).complex)
    lattice_ok = span_lattice(config).covolume == 1
    return ClassifiedCell(cell, tag, duality.ok, lattice_ok, jammed, code_ok, dim, volume(poly))


def verify_faces_jammed(gram: GramMatrix, cells: Optional[list] = None) -> bool:
    cells = cells if cells is not None else voronoi_vertices(gram)
    for cell in cells:
        fan = tangent_fan(cell, gram)
        if not verify_complete(fan) or not is_jammed_geometric(fan).jammed:
            return False
    return True


def verify_midpoint_interior(gram: GramMatrix, cells: Optional[list] = None, relevant: Optional[list] = None) -> bool:
    """Edge midpoints of (-D) + x + c lie strictly inside the Voronoi cell of c, for tetrahedral D."""
    rel = relevant if relevant is not None else relevant_vectors(gram)
    cells = cells if cells is not None else voronoi_vertices(gram, rel)
    g = gram.entries
    for cell in cells:
        if len(cell.points) != 4:
            continue
        x = cell.centre
        for c in cell.points:
            for a, b in itertools.combinations(cell.points, 2):
                m = q.sub(q.add(x, c), q.scale(Fraction(1, 2), q.add(a, b)))
                rel_pos = q.sub(m, c)
                if any(2 * q.bilinear(g, rel_pos, v) >= gram.norm(v) for v in rel):
                    return False
    return True


@dataclass
class LatticeResult:
    name: str
    gram: Optional[GramMatrix]
    relevant_count: int = 0
    cells: list = field(default_factory=list)
    faces_jammed: bool = False
    midpoint: Optional[bool] = None
    partition_ok: bool = False
    seconds: float = 0.0
    error: Optional[str] = None

    @property
    def types(self) -> list:
        return sorted({c.type_tag for c in self.cells})

    @property
    def ok(self) -> bool:
        return (
            self.error is None
            and self.faces_jammed
            and self.partition_ok
            and self.midpoint is not False
            and all(c.ok for c in self.cells)
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "gram": self.gram.to_json() if self.gram else None,
            "relevant_vectors": self.relevant_count,
            "cells": [c.to_json() for c in self.cells],
            "types": self.types,
            "faces_jammed": self.faces_jammed,
            "midpoint_interior": self.midpoint,
            "partition_ok": self.partition_ok,
            "ok": self.ok,
            "error": self.error,
        }


def analyse(name: str, gram: GramMatrix) -> LatticeResult:
    t0 = time.perf_counter()
    res = LatticeResult(name, gram)
    try:
        rel = relevant_vectors(gram)
        res.relevant_count = len(rel)
        cells = voronoi_vertices(gram, rel)
        res.cells = [classify_cell(c, gram) for c in cells]
        res.faces_jammed = verify_faces_jammed(gram, cells)
        if any(len(c.points) == 4 for c in cells):
            res.midpoint = verify_midpoint_interior(gram, cells, rel)
        total = sum((c.cell.multiplicity * c.volume for c in res.cells), Fraction(0))
        res.partition_ok = total == 1
    except Exception as exc:  # one bad lattice must not sink the survey
        log.warning("lattice %s failed: %s", name, exc)
        res.error = f"{type(exc).__name__}: {exc}"
    res.seconds = time.perf_counter() - t0
    return res


def _analyse_entry(entry):
    name, gram = entry
    return analyse(name, gram)


@dataclass
class SurveyReport:
    results: list

    @property
    def types(self) -> list:
        return sorted({t for r in self.results for t in r.types})

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {"lattices": [r.to_json() for r in self.results], "types": self.types, "ok": self.ok}

    def table(self) -> str:
        lines = ["| lattice | types | faces jammed | duality | index 1 | midpoints | partition | seconds |", "|---|---|---|---|---|---|---|---|"]
        for r in self.results:
            if r.error:
                lines.append(f"| {r.name} | error: {r.error} | | | | | | {r.seconds:.2f} |")
                continue
            lines.append(
                f"| {r.name} | {', '.join(r.types)} | {r.faces_jammed} | {all(c.duality_ok for c in r.cells)} | "
                f"{all(c.lattice_ok for c in r.cells)} | {r.midpoint if r.midpoint is not None else 'n/a'} | "
                f"{r.partition_ok} | {r.seconds:.2f} |"
            )
        return "\n".join(lines)


def survey(grams, workers: int = 1) -> SurveyReport:
    """Analyse each (name, GramMatrix) pair; results keep input order."""
    entries, bad = [], {}
    for i, (n, g) in enumerate(grams):
        if isinstance(g, GramMatrix):
            entries.append((n, g))
            continue
        try:
            entries.append((n, GramMatrix(g)))
        except (GramError, q.RationalFormatError) as exc:
            bad[i] = LatticeResult(n, None, error=f"{type(exc).__name__}: {exc}")
            entries.append(None)
    todo = [e for e in entries if e is not None]
    if workers > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = iter(pool.map(_analyse_entry, todo))
    else:
        done = iter([_analyse_entry(e) for e in todo])
    results = [bad[i] if e is None else next(done) for i, e in enumerate(entries)]
    return SurveyReport(results)


def load_gram_family(path) -> list:
    """Read a JSON list of {"name", "gram"} objects (or bare matrices)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict) and "grams" in doc:
        doc = doc["grams"]
    out = []
    for i, item in enumerate(doc):
        if isinstance(item, dict):
            out.append((item.get("name", f"gram{i}"), item["gram"]))
        else:
            out.append((f"gram{i}", item))
    return out


def curated_family() -> list:
    from importlib.resources import files

    text = files("jammedfan").joinpath("data/curated_grams.json").read_text(encoding="utf-8")
    doc = json.loads(text)
    return [(item["name"], item["gram"]) for item in doc["grams"]]
