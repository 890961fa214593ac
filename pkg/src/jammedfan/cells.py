"""Associated cells: linear systems from jammed fans, exact hulls, duality.

Points of an associated cell are labelled by the cells (maximal cones) of
the fan they came from, so label ``m`` is the centre belonging to cell ``m``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

from . import rational as q
from .fan import FanComplex, antipodal_involution, is_jammed, link


class DegenerateError(ValueError):
    """Raised when a point set is not full-dimensional."""


class InconsistentSystemError(RuntimeError):
    pass


@dataclass(frozen=True)
class EquationSystem:
    """Quadruples (m1, m2, m3, m4): x_m1 + x_m2 = x_m3 + x_m4."""

    cell_count: int
    quadruples: tuple


@dataclass(frozen=True)
class PointConfig:
    points: tuple  # label m -> Vec3

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(q.vec(p) for p in self.points))

    def __len__(self):
        return len(self.points)

    def transformed(self, m) -> "PointConfig":
        return PointConfig([q.matvec(m, p) for p in self.points])

    def satisfies(self, system: EquationSystem) -> bool:
        p = self.points
        return all(q.add(p[a], p[b]) == q.add(p[c], p[d]) for a, b, c, d in system.quadruples)


def derive_equations(complex: FanComplex) -> EquationSystem:
    cert = is_jammed(complex)
    if not cert.jammed:
        raise ValueError(f"not a jammed complex: {cert.reason}")
    quads = []
    for r in range(complex.ray_count):
        if complex.valence(r) == 4:
            a, b, c, d = link(complex, r).cells_around
            quads.append((a, c, b, d))
    anti = cert.antipodal
    if anti is None and _has_disjoint(complex):
        anti = antipodal_involution(complex)
    if anti is not None:
        pairs = sorted({tuple(sorted((k, j))) for k, j in enumerate(anti.cell_map)})
        for a, b in pairs[1:]:
            quads.append((pairs[0][0], pairs[0][1], a, b))
    return EquationSystem(complex.cell_count, tuple(quads))


def _has_disjoint(complex: FanComplex) -> bool:
    return any(not complex.cell_sets[a] & complex.cell_sets[b] for a, b in combinations(range(complex.cell_count), 2))


def _preferred_free(complex: Optional[FanComplex], n: int) -> list:
    """Labels that should become free parameters: neighbours of cell 0 across edges."""
    if complex is None:
        return []
    nbrs = set()
    for e, cs in complex.edge_cells.items():
        if 0 in cs:
            nbrs.update(c for c in cs if c != 0)
    return sorted(nbrs)


def solve_cell(system: EquationSystem, complex: Optional[FanComplex] = None, free_values=None) -> PointConfig:
    """Rational solution with x_0 = 0 and the free labels set to e1, e2, e3.

    ``free_values`` may override e1, e2, e3 with any three vectors (used for
    generic instantiations).
    """
    n = system.cell_count
    unknowns = list(range(1, n))
    preferred = [m for m in _preferred_free(complex, n) if m in unknowns]
    # free columns come out of RREF as the right-most non-pivots
    order = [m for m in unknowns if m not in preferred] + preferred
    col = {m: i for i, m in enumerate(order)}
    rows = []
    for a, b, c, d in system.quadruples:
        row = [Fraction(0)] * len(order)
        for m, s in ((a, 1), (b, 1), (c, -1), (d, -1)):
            if m != 0:
                row[col[m]] += s
        rows.append(row)
    red, pivots = q.rref(rows) if rows else ([], [])
    free = [i for i in range(len(order)) if i not in pivots]
    if len(free) != 3:
        raise InconsistentSystemError(f"solution space has dimension {len(free)}, expected 3")
    if free_values is None:
        free_values = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    free_values = [q.vec(v) for v in free_values]
    values = {}
    for k, i in enumerate(free):
        values[i] = free_values[k]
    for r, pc in enumerate(pivots):
        acc = (Fraction(0),) * 3
        for k, i in enumerate(free):
            acc = q.sub(acc, q.scale(red[r][i], free_values[k]))
        values[pc] = acc
    pts = [(Fraction(0),) * 3] + [values[col[m]] for m in unknowns]
    config = PointConfig(pts)
    if not config.satisfies(system):
        raise InconsistentSystemError("solution fails substitution check")
    return config


# --- hulls ---------------------------------------------------------------------


@dataclass(frozen=True)
class Facet:
    normal: tuple  # outward, primitive integer
    offset: Fraction  # normal . x <= offset on the polytope
    vertices: tuple  # labels in cyclic order


@dataclass
class Polytope3:
    points: tuple  # all input points by label
    vertices: tuple  # labels of extreme points
    facets: tuple
    edges: tuple = field(default=())

    def __post_init__(self):
        if not self.edges:
            es = set()
            for f in self.facets:
                k = len(f.vertices)
                for i in range(k):
                    a, b = f.vertices[i], f.vertices[(i + 1) % k]
                    es.add((min(a, b), max(a, b)))
            self.edges = tuple(sorted(es))

    @property
    def f_vector(self) -> tuple:
        return (len(self.vertices), len(self.edges), len(self.facets))

    def faces(self) -> dict:
        """Proper nonempty faces plus the polytope itself, as label sets -> dimension."""
        out = {frozenset((v,)): 0 for v in self.vertices}
        out.update({frozenset(e): 1 for e in self.edges})
        out.update({frozenset(f.vertices): 2 for f in self.facets})
        out[frozenset(self.vertices)] = 3
        return out

    def contains(self, x, strict: bool = False) -> bool:
        for f in self.facets:
            val = q.dot(f.normal, x)
            if val > f.offset or (strict and val == f.offset):
                return False
        return True

    def vertex_points(self) -> list:
        return [self.points[v] for v in self.vertices]


def _proj_axis(normal) -> int:
    return max(range(3), key=lambda i: abs(normal[i]))


def _polygon_order(labels, pts, normal) -> tuple:
    """Extreme points of a planar point set, counter-clockwise seen from ``normal``."""
    ax = _proj_axis(normal)
    keep = [i for i in range(3) if i != ax]
    flip = normal[ax] < 0
    proj = {m: (pts[m][keep[0]], pts[m][keep[1]]) for m in labels}
    if flip:
        proj = {m: (x, -y) for m, (x, y) in proj.items()}
    # a cyclic dropped-axis projection keeps orientation when ax == 1 only after a swap
    if ax == 1:
        proj = {m: (y, x) for m, (x, y) in proj.items()}
    order = sorted(labels, key=lambda m: (proj[m], m))

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for m in order:
        while len(lower) >= 2 and turn(proj[lower[-2]], proj[lower[-1]], proj[m]) <= 0:
            lower.pop()
        lower.append(m)
    for m in reversed(order):
        while len(upper) >= 2 and turn(proj[upper[-2]], proj[upper[-1]], proj[m]) <= 0:
            upper.pop()
        upper.append(m)
    ring = lower[:-1] + upper[:-1]
    # rotate so the smallest label leads, for determinism
    k = ring.index(min(ring))
    return tuple(ring[k:] + ring[:k])


def hull3(config) -> Polytope3:
    """Exact convex hull by supporting-plane search over point triples."""
    pts = tuple(q.vec(p) for p in (config.points if isinstance(config, PointConfig) else config))
    if len(pts) < 4:
        raise DegenerateError("need at least 4 points")
    if len(set(pts)) != len(pts):
        raise DegenerateError("repeated points")
    if q.affine_dimension(pts) < 3:
        raise DegenerateError(f"affine dimension {q.affine_dimension(pts)} < 3")
    n = len(pts)
    # same geometry on integer coordinates; plain ints are far faster than Fractions
    den = 1
    for p in pts:
        for x in p:
            den = den * x.denominator // gcd(den, x.denominator)
    ipts = [tuple(int(x * den) for x in p) for p in pts]
    seen = {}
    covered = set()  # triples inside an already found facet
    for i, j, k in combinations(range(n), 3):
        if (i, j, k) in covered:
            continue
        a, b, c = ipts[i], ipts[j], ipts[k]
        u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
        v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
        nrm = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        if nrm == (0, 0, 0):
            continue
        off = nrm[0] * a[0] + nrm[1] * a[1] + nrm[2] * a[2]
        vals = [nrm[0] * p[0] + nrm[1] * p[1] + nrm[2] * p[2] - off for p in ipts]
        if all(x <= 0 for x in vals):
            pass
        elif all(x >= 0 for x in vals):
            nrm = (-nrm[0], -nrm[1], -nrm[2])
        else:
            continue
        on = frozenset(m for m, x in enumerate(vals) if x == 0)
        if on in seen:
            continue
        covered.update(combinations(sorted(on), 3))
        prim = q.primitive(nrm)
        seen[on] = (prim, q.dot(prim, pts[i]))
    facets = []
    for on, (nrm, off) in seen.items():
        facets.append(Facet(nrm, off, _polygon_order(sorted(on), pts, nrm)))
    facets.sort(key=lambda f: f.vertices)
    verts = tuple(sorted({v for f in facets for v in f.vertices}))
    return Polytope3(pts, verts, tuple(facets))


def volume(poly: Polytope3) -> Fraction:
    """Exact volume by coning every facet from the vertex centroid."""
    vp = poly.vertex_points()
    if q.affine_dimension(vp) < 3:
        raise DegenerateError("degenerate polytope")
    k = len(vp)
    ref = tuple(sum(p[i] for p in vp) / k for i in range(3))
    total = Fraction(0)
    for f in poly.facets:
        ring = [poly.points[v] for v in f.vertices]
        for t in range(1, len(ring) - 1):
            total += abs(q.det3(q.sub(ring[0], ref), q.sub(ring[t], ref), q.sub(ring[t + 1], ref)))
    return total / 6


# --- brute-force face oracle ----------------------------------------------------


def _in_affine_hull_of_conv(target_rows, target_rhs, pts) -> bool:
    """Does conv(pts) meet {x : A x = b}?  Checked on supports of size <= rank + 1."""
    m = len(target_rows)
    for size in range(1, min(len(pts), m + 1) + 1):
        for sub in combinations(pts, size):
            # unknown weights w: sum w = 1, A (sum w p) = b
            rows = [[Fraction(1)] * size + [Fraction(1)]]
            for a, rhs in zip(target_rows, target_rhs):
                rows.append([q.dot(a, p) for p in sub] + [rhs])
            red, piv = q.rref(rows)
            if size in piv:
                continue  # inconsistent
            free = [i for i in range(size) if i not in piv]
            if free:
                continue  # a smaller support also works
            w = [Fraction(0)] * size
            for r, pc in enumerate(piv):
                w[pc] = red[r][size]
            if all(x >= 0 for x in w):
                return True
    return False


def brute_force_faces(points: Sequence) -> dict:
    """All faces of conv(points) by subset enumeration (points in convex position).

    A subset S is a face iff aff(S) misses conv(rest); returns label sets ->
    affine dimension, with the full set included.
    """
    pts = [q.vec(p) for p in points]
    n = len(pts)
    out = {}
    for size in range(1, n + 1):
        for sub in combinations(range(n), size):
            rest = [pts[i] for i in range(n) if i not in sub]
            base = pts[sub[0]]
            dirs = [q.sub(pts[i], base) for i in sub[1:]]
            dim = q.rank(dirs) if dirs else 0
            if dim == 3:
                if size == n:
                    out[frozenset(sub)] = 3
                continue
            # equations of aff(S): normals orthogonal to dirs
            normals = _orth_complement(dirs)
            rhs = [q.dot(nv, base) for nv in normals]
            if rest and _in_affine_hull_of_conv(normals, rhs, rest):
                continue
            if size == n:
                continue
            # S must be all points on its affine hull
            if any(all(q.dot(nv, pts[i]) == r for nv, r in zip(normals, rhs)) for i in range(n) if i not in sub):
                continue
            out[frozenset(sub)] = dim
    return out


def _orth_complement(dirs) -> list:
    if not dirs:
        return [q.vec(1, 0, 0), q.vec(0, 1, 0), q.vec(0, 0, 1)]
    red, piv = q.rref(dirs)
    free = [c for c in range(3) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * 3
        v[f] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -red[r][f]
        basis.append(tuple(v))
    return basis


# --- duality --------------------------------------------------------------------


def subcells(complex: FanComplex) -> dict:
    """Cone -> set of cell labels whose maximal cones contain it.

    Cones are keyed as ('apex',), ('ray', r), ('edge', (u, v)), ('cell', m).
    """
    out = {("apex",): frozenset(range(complex.cell_count))}
    for r in range(complex.ray_count):
        out[("ray", r)] = frozenset(complex.ray_cells[r])
    for e, cs in complex.edge_cells.items():
        out[("edge", e)] = frozenset(cs)
    for m in range(complex.cell_count):
        out[("cell", m)] = frozenset((m,))
    return out


_CONE_DIM = {"apex": 0, "ray": 1, "edge": 2, "cell": 3}


@dataclass
class DualityReport:
    ok: bool
    cone_to_face: dict
    failures: list


def check_duality(complex: FanComplex, config: PointConfig, poly: Optional[Polytope3] = None) -> DualityReport:
    if poly is None:
        poly = hull3(config)
    faces = poly.faces()
    sc = subcells(complex)
    failures = []
    mapping = {}
    for cone, labels in sc.items():
        if labels not in faces:
            failures.append(("condition 1", cone, sorted(labels)))
            continue
        if faces[labels] != 3 - _CONE_DIM[cone[0]]:
            failures.append(("dimension", cone, sorted(labels)))
        mapping[cone] = labels
    subcell_sets = set(sc.values())
    for face in faces:
        if face not in subcell_sets:
            failures.append(("condition 2", None, sorted(face)))
    if len(poly.vertices) != len(config.points):
        failures.append(("non-extreme points", None, sorted(set(range(len(config.points))) - set(poly.vertices))))
    return DualityReport(not failures, mapping, failures)


# --- recognition ----------------------------------------------------------------

F_VECTORS = {
    (4, 6, 4): "tetrahedron",
    (6, 12, 8): "octahedron",
    (5, 8, 5): "quadrangular-pyramid",
    (6, 9, 5): "triangular-prism",
    (8, 12, 6): "parallelepiped",
}

_FACET_SIZES = {
    "tetrahedron": (3, 3, 3, 3),
    "octahedron": (3,) * 8,
    "quadrangular-pyramid": (3, 3, 3, 3, 4),
    "triangular-prism": (3, 3, 4, 4, 4),
    "parallelepiped": (4,) * 6,
}


def tag_for_polytope(poly: Polytope3) -> Optional[str]:
    tag = F_VECTORS.get(poly.f_vector)
    if tag is None:
        return None
    if tuple(sorted(len(f.vertices) for f in poly.facets)) != _FACET_SIZES[tag]:
        return None
    return tag


def cell_for_complex(complex: FanComplex, free_values=None):
    system = derive_equations(complex)
    config = solve_cell(system, complex, free_values)
    return config, hull3(config)


def canonical_complex(tag: str) -> FanComplex:
    from .geom import witness

    return witness(tag).complex


def canonical_config(tag: str) -> PointConfig:
    cx = canonical_complex(tag)
    return solve_cell(derive_equations(cx), cx)


def random_invertible(rng: random.Random, spread: int = 9):
    while True:
        m = tuple(
            tuple(Fraction(rng.randint(-spread, spread), rng.randint(1, spread)) for _ in range(3)) for _ in range(3)
        )
        if q.det(m) != 0:
            return m


def random_instantiation(tag: str, rng: random.Random) -> tuple:
    """Generic rational values for the three free vectors, rerolled if degenerate."""
    cx = canonical_complex(tag)
    system = derive_equations(cx)
    ref = hull3(solve_cell(system, cx)).f_vector
    while True:
        free = random_invertible(rng)
        config = solve_cell(system, cx, free)
        try:
            poly = hull3(config)
        except DegenerateError:
            continue
        if poly.f_vector == ref:
            return cx, config, poly


def cell_report(tag: str) -> dict:
    cx = canonical_complex(tag)
    config = canonical_config(tag)
    poly = hull3(config)
    rep = check_duality(cx, config, poly)
    return {
        "type_tag": tag,
        "points": [[q.fmt_rat(x) for x in p] for p in config.points],
        "facets": [
            {"normal": list(f.normal), "offset": q.fmt_rat(f.offset), "vertices": list(f.vertices)} for f in poly.facets
        ],
        "f_vector": list(poly.f_vector),
        "duality": {
            "ok": rep.ok,
            "map": {_cone_key(c): sorted(v) for c, v in sorted(rep.cone_to_face.items(), key=lambda kv: _cone_key(kv[0]))},
            "failures": [[k, _cone_key(c) if c else None, v] for k, c, v in rep.failures],
        },
    }


def _cone_key(cone) -> str:
    if cone[0] == "apex":
        return "apex"
    if cone[0] == "edge":
        return f"edge:{cone[1][0]}-{cone[1][1]}"
    return f"{cone[0]}:{cone[1]}"
