"""Complete 3-dimensional fans as combinatorial sphere complexes.

A :class:`FanComplex` stores its maximal cones ("cells") as cyclic walks of
ray indices. Edges (2-cones) are derived. Everything else -- links,
automorphisms, canonical codes, jammedness -- is computed from that.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterator, Optional


class InvalidComplexError(ValueError):
    pass


Edge = tuple  # (u, v) with u < v


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class FanComplex:
    ray_count: int
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(tuple(int(r) for r in c) for c in self.cells))

    @classmethod
    def from_json(cls, doc) -> "FanComplex":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(int(doc["rays"]), doc["cells"])

    def to_json(self) -> dict:
        return {"rays": self.ray_count, "cells": [list(c) for c in self.cells]}

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @cached_property
    def edges(self) -> tuple:
        out = set()
        for c in self.cells:
            for i, u in enumerate(c):
                out.add(_edge(u, c[(i + 1) % len(c)]))
        return tuple(sorted(out))

    @cached_property
    def edge_cells(self) -> dict:
        inc: dict = {}
        for k, c in enumerate(self.cells):
            for i, u in enumerate(c):
                inc.setdefault(_edge(u, c[(i + 1) % len(c)]), []).append(k)
        return inc

    @cached_property
    def ray_cells(self) -> tuple:
        inc = [[] for _ in range(self.ray_count)]
        for k, c in enumerate(self.cells):
            for r in c:
                if 0 <= r < self.ray_count:
                    inc[r].append(k)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def neighbours(self) -> tuple:
        adj = [set() for _ in range(self.ray_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def valence(self, ray: int) -> int:
        """Number of 2-cones containing ``ray`` (equal to the number of cells around it)."""
        return len(self.neighbours[ray])

    @cached_property
    def cell_sets(self) -> tuple:
        return tuple(frozenset(c) for c in self.cells)

    # --- orientation and rotation system ------------------------------------

    @cached_property
    def oriented_cells(self) -> tuple:
        """Cells re-oriented so every edge is traversed once in each direction."""
        n = len(self.cells)
        flip: list = [None] * n
        for start in range(n):
            if flip[start] is not None:
                continue
            flip[start] = False
            queue = deque([start])
            while queue:
                k = queue.popleft()
                walk = self.cells[k][::-1] if flip[k] else self.cells[k]
                for i, u in enumerate(walk):
                    v = walk[(i + 1) % len(walk)]
                    for j in self.edge_cells[_edge(u, v)]:
                        if j == k:
                            continue
                        # neighbour must traverse v -> u
                        forward = _has_dart(self.cells[j], v, u)
                        want = not forward
                        if flip[j] is None:
                            flip[j] = want
                            queue.append(j)
                        elif flip[j] != want:
                            raise InvalidComplexError("non-orientable complex")
        return tuple(c[::-1] if f else c for c, f in zip(self.cells, flip))

    @cached_property
    def dart_cell(self) -> dict:
        out = {}
        for k, c in enumerate(self.oriented_cells):
            for i, u in enumerate(c):
                out[(u, c[(i + 1) % len(c)])] = k
        return out

    def _after(self, cell: int, ray: int) -> int:
        c = self.oriented_cells[cell]
        return c[(c.index(ray) + 1) % len(c)]

    def _before(self, cell: int, ray: int) -> int:
        c = self.oriented_cells[cell]
        return c[c.index(ray) - 1]

    def rotate(self, v: int, w: int, mirror: bool = False) -> int:
        """Next neighbour of ``v`` after ``w`` in the rotation around ``v``."""
        if mirror:
            return self._before(self.dart_cell[(v, w)], v)
        return self._after(self.dart_cell[(w, v)], v)


def _has_dart(cell, u, v) -> bool:
    n = len(cell)
    return any(cell[i] == u and cell[(i + 1) % n] == v for i in range(n))


# --- validation ----------------------------------------------------------------


@dataclass
class ValidityReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str = ""):
        self.violations.append((kind, detail))

    def kinds(self) -> set:
        return {k for k, _ in self.violations}


def validate(complex: FanComplex) -> ValidityReport:
    rep = ValidityReport()
    n = complex.ray_count
    if not complex.cells:
        rep.add("no cells")
        return rep
    if len(complex.cells) < 4:
        rep.add("too few cells", f"{len(complex.cells)} < 4")
    structural = True
    for k, c in enumerate(complex.cells):
        if len(c) < 3:
            rep.add("cell length", f"cell {k} has {len(c)} rays")
            structural = False
        if any(not 0 <= r < n for r in c):
            rep.add("ray index", f"cell {k} references a ray outside 0..{n - 1}")
            structural = False
        if len(set(c)) != len(c):
            rep.add("repeated ray", f"cell {k}")
            structural = False
    if not structural:
        return rep

    for e, cs in complex.edge_cells.items():
        if len(cs) != 2 or cs[0] == cs[1]:
            rep.add("edge multiplicity", f"edge {e} lies in {len(cs)} cell slots")
    for r in range(n):
        if complex.valence(r) < 3:
            rep.add("ray degree", f"ray {r} has degree {complex.valence(r)}")
    for a, b in combinations(range(len(complex.cells)), 2):
        common = complex.cell_sets[a] & complex.cell_sets[b]
        if len(common) >= 3 or (len(common) == 2 and _edge(*common) not in complex.edge_cells):
            rep.add("pairwise intersection not a face", f"cells {a} and {b} share {sorted(common)}")
        elif len(common) == 2:
            u, v = sorted(common)
            if not (_adjacent_in(complex.cells[a], u, v) and _adjacent_in(complex.cells[b], u, v)):
                rep.add("pairwise intersection not a face", f"cells {a} and {b} share {sorted(common)}")
    if rep.ok:
        for r in range(n):
            if not _link_is_single_cycle(complex, r):
                rep.add("link condition", f"cells around ray {r} do not form one cycle")
    chi = n - len(complex.edges) + len(complex.cells)
    if chi != 2:
        rep.add("euler", f"V - E + F = {chi}")
    if rep.ok:
        try:
            complex.oriented_cells
        except InvalidComplexError:
            rep.add("non-orientable")
    return rep


def _adjacent_in(cell, u, v) -> bool:
    return _has_dart(cell, u, v) or _has_dart(cell, v, u)


def _link_is_single_cycle(complex: FanComplex, r: int) -> bool:
    cells = complex.ray_cells[r]
    if not cells:
        return False
    # each cell at r touches two edges at r; walk across shared edges
    edges_at = {}
    for k in cells:
        c = complex.cells[k]
        i = c.index(r)
        edges_at[k] = (_edge(r, c[i - 1]), _edge(r, c[(i + 1) % len(c)]))
    seen = {cells[0]}
    prev_edge = edges_at[cells[0]][0]
    k = cells[0]
    while True:
        e = edges_at[k][1] if edges_at[k][0] == prev_edge else edges_at[k][0]
        others = [j for j in complex.edge_cells[e] if j != k]
        if len(others) != 1:
            return False
        k, prev_edge = others[0], e
        if k == cells[0]:
            break
        if k in seen:
            return False
        seen.add(k)
    return len(seen) == len(cells)


def require_valid(complex: FanComplex) -> None:
    rep = validate(complex)
    if not rep.ok:
        raise InvalidComplexError("; ".join(f"{k}: {d}" if d else k for k, d in rep.violations))


# --- profile, links ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Profile:
    a3: int
    a4: int
    b: int
    c: int

    def as_tuple(self) -> tuple:
        return (self.a3, self.a4, self.b, self.c)

    def __str__(self) -> str:
        return ",".join(map(str, self.as_tuple()))

    @classmethod
    def parse(cls, text: str) -> "Profile":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"profile needs four integers a3,a4,b,c; got {text!r}")
        return cls(*parts)

    @property
    def rays(self) -> int:
        return self.a3 + self.a4


def profile(complex: FanComplex) -> Profile:
    require_valid(complex)
    vals = Counter(complex.valence(r) for r in range(complex.ray_count))
    return Profile(vals[3], vals[4], len(complex.edges), len(complex.cells))


@dataclass(frozen=True)
class LinkCycle:
    ray: int
    cells_around: tuple
    edges_around: tuple  # edges_around[i] is shared by cells_around[i] and cells_around[i+1]

    @property
    def valence(self) -> int:
        return len(self.cells_around)


def link(complex: FanComplex, ray: int) -> LinkCycle:
    if not 0 <= ray < complex.ray_count:
        raise IndexError(f"unknown ray {ray}")
    cells = complex.ray_cells[ray]
    start = min(cells)
    # two possible directions; go towards the smaller-index neighbour first
    c = complex.oriented_cells[start]
    i = c.index(ray)
    cand = []
    for nb in (c[i - 1], c[(i + 1) % len(c)]):
        e = _edge(ray, nb)
        other = next(j for j in complex.edge_cells[e] if j != start)
        cand.append((other, e))
    cand.sort()
    order, edges = [start], []
    nxt, e = cand[0]
    while nxt != start:
        edges.append(e)
        order.append(nxt)
        cell = complex.cells[nxt]
        j = cell.index(ray)
        e2 = [_edge(ray, cell[j - 1]), _edge(ray, cell[(j + 1) % len(cell)])]
        e = e2[1] if e2[0] == e else e2[0]
        nxt = next(k for k in complex.edge_cells[e] if k != nxt)
    edges.append(e)
    return LinkCycle(ray, tuple(order), tuple(edges))


# --- canonical code and automorphisms ------------------------------------------


def _bfs_code(complex: FanComplex, v0: int, w0: int, mirror: bool) -> tuple:
    label = {v0: 0}
    order = [v0]
    first = {v0: w0}
    rows = []
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        w = first[v]
        row = []
        for _ in range(complex.valence(v)):
            if w not in label:
                label[w] = len(order)
                order.append(w)
                first[w] = v
            row.append(label[w])
            w = complex.rotate(v, w, mirror)
        rows.append(tuple(row))
    return tuple(rows)


def _darts(complex: FanComplex) -> Iterator[tuple]:
    for u, v in complex.edges:
        yield u, v
        yield v, u


def canonical_code(complex: FanComplex) -> str:
    """Label-invariant code: equal strings exactly for isomorphic complexes.

    Minimum over all starting darts and both orientations of the
    breadth-first relabelled rotation system.
    """
    require_valid(complex)
    best = min(_bfs_code(complex, u, v, m) for u, v in _darts(complex) for m in (False, True))
    return f"{complex.ray_count}:" + ";".join(",".join(map(str, row)) for row in best)


def are_isomorphic(x: FanComplex, y: FanComplex) -> bool:
    return canonical_code(x) == canonical_code(y)


def _map_from(complex: FanComplex, src: tuple, dst: tuple, mirror: bool) -> Optional[tuple]:
    """Ray map sending dart ``src`` to ``dst`` (orientation reversed if ``mirror``)."""
    n = complex.ray_count
    phi = {src[0]: dst[0]}
    first = {src[0]: (src[1], dst[1])}
    queue = deque([src[0]])
    while queue:
        v = queue.popleft()
        w, w2 = first[v]
        v2 = phi[v]
        if complex.valence(v) != complex.valence(v2):
            return None
        for _ in range(complex.valence(v)):
            if w in phi:
                if phi[w] != w2:
                    return None
            else:
                phi[w] = w2
                first[w] = (v, v2)
                queue.append(w)
            w = complex.rotate(v, w)
            w2 = complex.rotate(v2, w2, mirror)
    if len(phi) != n or len(set(phi.values())) != n:
        return None
    ray_map = tuple(phi[i] for i in range(n))
    cells = set(complex.cell_sets)
    if any(frozenset(ray_map[r] for r in c) not in cells for c in complex.cells):
        return None
    return ray_map


def automorphisms(complex: FanComplex) -> list:
    """All ray permutations that map cells to cells (reflections included)."""
    require_valid(complex)
    src = complex.edges[0]
    out = set()
    for d in _darts(complex):
        for m in (False, True):
            phi = _map_from(complex, src, d, m)
            if phi is not None:
                out.add(phi)
    return sorted(out)


@dataclass(frozen=True)
class AntipodalInvolution:
    ray_map: tuple
    cell_map: tuple

    def cell_pairs(self) -> frozenset:
        return frozenset(frozenset((k, j)) for k, j in enumerate(self.cell_map))


def induced_cell_map(complex: FanComplex, ray_map: tuple) -> tuple:
    index = {s: k for k, s in enumerate(complex.cell_sets)}
    return tuple(index[frozenset(ray_map[r] for r in c)] for c in complex.cells)


def antipodal_involutions(complex: FanComplex) -> list:
    out = []
    for phi in automorphisms(complex):
        if any(phi[phi[r]] != r or phi[r] == r for r in range(complex.ray_count)):
            continue
        cmap = induced_cell_map(complex, phi)
        if any(complex.cell_sets[k] & complex.cell_sets[j] for k, j in enumerate(cmap)):
            continue
        out.append(AntipodalInvolution(phi, cmap))
    return out


def antipodal_involution(complex: FanComplex) -> Optional[AntipodalInvolution]:
    """Lexicographically least fixed-point-free involution pairing ray-disjoint cells."""
    found = antipodal_involutions(complex)
    return found[0] if found else None


# --- jammedness ----------------------------------------------------------------


@dataclass
class JammedCertificate:
    edge_pairs: list  # (cell, cell, edge)
    ray_pairs: list  # (cell, cell, ray) opposite at a valence-4 ray
    antipodal: Optional[AntipodalInvolution]

    jammed = True


@dataclass
class RejectionWitness:
    reason: str
    cells: tuple = ()
    ray: Optional[int] = None

    jammed = False


def _cell_disjoint_pairs(complex: FanComplex) -> set:
    return {
        frozenset((a, b))
        for a, b in combinations(range(len(complex.cells)), 2)
        if not complex.cell_sets[a] & complex.cell_sets[b]
    }


def is_jammed(complex: FanComplex):
    """Return a JammedCertificate or a RejectionWitness.

    Two cells must meet in an edge, or in a single valence-4 ray where they
    sit opposite each other in the link, or be disjoint and swapped by a
    combinatorial central symmetry that pairs exactly the disjoint cells.
    """
    require_valid(complex)
    for r in range(complex.ray_count):
        if complex.valence(r) not in (3, 4):
            return RejectionWitness(f"valence {complex.valence(r)}", ray=r)
    links = {r: link(complex, r) for r in range(complex.ray_count)}
    edge_pairs, ray_pairs = [], []
    disjoint = _cell_disjoint_pairs(complex)
    for a, b in combinations(range(len(complex.cells)), 2):
        common = complex.cell_sets[a] & complex.cell_sets[b]
        if len(common) == 2:
            edge_pairs.append((a, b, _edge(*common)))
        elif len(common) == 1:
            (r,) = common
            cyc = links[r].cells_around
            if len(cyc) != 4:
                return RejectionWitness("cells meet in a ray of valence 3 only", (a, b), r)
            if (cyc.index(a) - cyc.index(b)) % 4 != 2:
                return RejectionWitness("cells not opposite in link", (a, b), r)
            ray_pairs.append((a, b, r))
    anti = None
    if disjoint:
        anti = next((inv for inv in antipodal_involutions(complex) if inv.cell_pairs() == disjoint), None)
        if anti is None:
            a, b = sorted(min(disjoint, key=sorted))
            return RejectionWitness("disjoint cells not exchanged by a central symmetry", (a, b))
    return JammedCertificate(edge_pairs, ray_pairs, anti)


def cell_pair_count_identity(complex: FanComplex) -> bool:
    """Check that cell pairs are counted by 2*a4 + b (+ c/2 if symmetric)."""
    p = profile(complex)
    pairs = p.c * (p.c - 1) // 2
    extra = p.c // 2 if _cell_disjoint_pairs(complex) else 0
    return pairs == 2 * p.a4 + p.b + extra


# --- a few named complexes -----------------------------------------------------


def tetrahedral_fan() -> FanComplex:
    return FanComplex(4, [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)])


def octant_fan() -> FanComplex:
    """Rays 0..5 = +e1, -e1, +e2, -e2, +e3, -e3; one cell per octant."""
    cells = []
    for sx in (0, 1):
        for sy in (2, 3):
            for sz in (4, 5):
                cells.append((sx, sy, sz))
    return FanComplex(6, cells)


def cube_face_fan() -> FanComplex:
    """Rays = the 8 sign vectors (index bits: x, y, z), cells = the 6 cube faces."""

    def idx(x, y, z):
        return 4 * x + 2 * y + z

    cells = [
        (idx(0, 0, 0), idx(0, 1, 0), idx(0, 1, 1), idx(0, 0, 1)),
        (idx(1, 0, 0), idx(1, 0, 1), idx(1, 1, 1), idx(1, 1, 0)),
        (idx(0, 0, 0), idx(0, 0, 1), idx(1, 0, 1), idx(1, 0, 0)),
        (idx(0, 1, 0), idx(1, 1, 0), idx(1, 1, 1), idx(0, 1, 1)),
        (idx(0, 0, 0), idx(1, 0, 0), idx(1, 1, 0), idx(0, 1, 0)),
        (idx(0, 0, 1), idx(0, 1, 1), idx(1, 1, 1), idx(1, 0, 1)),
    ]
    return FanComplex(8, cells)


def square_pyramid_fan() -> FanComplex:
    """Ray 4 is the apex (valence 4); cell 4 is the base quadrilateral."""
    return FanComplex(5, [(4, 0, 1), (4, 1, 2), (4, 2, 3), (4, 3, 0), (0, 3, 2, 1)])


def bipyramid_fan() -> FanComplex:
    """Triangular bipyramid: equator 0,1,2; apexes 3 and 4."""
    return FanComplex(5, [(3, 0, 1), (3, 1, 2), (3, 2, 0), (4, 1, 0), (4, 2, 1), (4, 0, 2)])
